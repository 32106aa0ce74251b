use std::sync::Arc;

use anyhow::Result;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use ahss_core::abgroup::rational::Q;
use ahss_core::abgroup::CoefficientTag;
use ahss_core::cochains::{bockstein_tilde, cohomology, cup, rho_p, Cochain};
use ahss_core::forms::{has_integral_periods, DiscreteForm};
use ahss_core::simpcomplex::{shipped_space_ids, SimplicialComplex};
use ahss_core::sseq::{bockstein_compare, leibniz_check, run_with, theory, RunOptions};
use ahss_core::steenrod::{adem_reduce, derive_theta, milnor_q, parse_expression, sq};

use crate::compute::load_space;
use crate::{oracle, Suite};

const Z2: CoefficientTag = CoefficientTag::ModP(2);

struct Out {
    suite: &'static str,
    failed: usize,
}

impl Out {
    fn case(&mut self, case: String, pass: bool, detail: Value) {
        if !pass {
            self.failed += 1;
        }
        println!("{}", json!({ "suite": self.suite, "case": case, "pass": pass, "detail": detail }));
    }
}

fn spaces(only: Option<&str>, default: &[&str]) -> Result<Vec<Arc<SimplicialComplex>>> {
    match only {
        Some(s) => Ok(vec![load_space(s)?]),
        None if default.is_empty() => shipped_space_ids().iter().map(|s| load_space(s)).collect(),
        None => default.iter().map(|s| load_space(s)).collect(),
    }
}

pub fn run(suite: Suite, only: Option<&str>, trials: usize, seed: u64) -> Result<u8> {
    let name = match suite {
        Suite::Bockstein => "bockstein",
        Suite::Leibniz => "leibniz",
        Suite::Steenrod => "steenrod",
        Suite::Periods => "periods",
        Suite::Oracle => "oracle",
    };
    let mut out = Out { suite: name, failed: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Oracle => oracle_suite(&mut out, only)?,
        Suite::Steenrod => steenrod_suite(&mut out, only, trials, &mut rng)?,
        Suite::Periods => periods_suite(&mut out, only, trials, &mut rng)?,
        Suite::Bockstein => bockstein_suite(&mut out, only)?,
        Suite::Leibniz => {
            for x in spaces(only, &["torus2"])? {
                for id in ["HZ", "Deligne:1", "Deligne:2"] {
                    let r = leibniz_check(&theory(id)?, &x, trials.max(50), seed)?;
                    out.case(format!("{id} on {}", x.name()), r.passed(), serde_json::to_value(&r)?);
                }
            }
        }
    }
    Ok(if out.failed == 0 { 0 } else { 3 })
}

fn oracle_suite(out: &mut Out, only: Option<&str>) -> Result<()> {
    for x in spaces(only, &[])? {
        let h = oracle::homology(&x);
        for k in 0..=x.dim() {
            for (tag, expected) in [
                (CoefficientTag::IntZ, oracle::integral(&h, k)),
                (Z2, oracle::mod2(&h, k)),
                (CoefficientTag::QmodZ, oracle::qmodz(&h, k)),
            ] {
                let got = cohomology(&x, k, tag).group().clone();
                let pass = got == expected;
                out.case(
                    format!("H^{k}({}; {tag})", x.name()),
                    pass,
                    json!({ "computed": got, "oracle": expected }),
                );
            }
        }
    }
    Ok(())
}

fn random_class(x: &Arc<SimplicialComplex>, k: usize, rng: &mut ChaCha8Rng) -> Cochain {
    let g = cohomology(x, k, Z2);
    let coords: Vec<Q> = (0..g.len()).map(|_| Q::from_integer(BigInt::from(rng.gen_range(0..2)))).collect();
    g.lift(&coords)
}

fn same_class(a: &Cochain, b: &Cochain) -> Result<bool> {
    Ok(cohomology(a.space(), a.degree(), a.tag()).is_zero_class(&a.sub(b)?)?)
}

fn steenrod_suite(out: &mut Out, only: Option<&str>, trials: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    for x in spaces(only, &[])? {
        let d = x.dim();
        let mut ok = [true; 4];
        for k in 0..=d {
            for _ in 0..4 {
                let a = random_class(&x, k, rng);
                ok[0] &= same_class(&sq(0, &a)?, &a)?;
                ok[1] &= sq(k as u32, &a)? == cup(&a, &a)?;
                ok[2] &= (k as u32 + 1..=d as u32 + 1).all(|i| sq(i, &a).map(|c| c.is_zero()).unwrap_or(false));
                let b = bockstein_tilde(&a)?;
                ok[3] &= k == d || same_class(&sq(1, &a)?, &rho_p(&b, 2)?)?;
            }
        }
        for (i, what) in ["Sq0 = 1", "Sq^n x = x^2", "Sq^i x = 0 for i > n", "Sq1 = rho beta"].iter().enumerate() {
            out.case(format!("{what} on {}", x.name()), ok[i], Value::Null);
        }
        let mut cartan = 0;
        let mut failures = Vec::new();
        for _ in 0..trials.max(50) {
            let a = rng.gen_range(0..=d);
            let b = rng.gen_range(0..=d - a);
            let (u, v) = (random_class(&x, a, rng), random_class(&x, b, rng));
            let uv = cup(&u, &v)?;
            for k in 0..=(d - a - b) as u32 {
                let mut rhs = Cochain::zero(x.clone(), a + b + k as usize, Z2);
                for i in 0..=k {
                    rhs = rhs.add(&cup(&sq(i, &u)?, &sq(k - i, &v)?)?)?;
                }
                if !same_class(&sq(k, &uv)?, &rhs)? {
                    failures.push(json!([a, b, k]));
                }
            }
            cartan += 1;
        }
        out.case(format!("Cartan on {}", x.name()), failures.is_empty(), json!({ "pairs": cartan, "failures": failures }));
    }
    if only.is_none() {
        binomial_case(out)?;
    }
    for n in 0..=3u32 {
        let q = milnor_q(n);
        let theta = derive_theta(n)?;
        let sum = parse_expression("Sq1")?.mul(&theta).add(&q);
        out.case(
            format!("Q{n}"),
            q.degree() == (1 << (n + 1)) - 1 && adem_reduce(&sum).in_left_ideal_of_sq1(),
            json!({ "Q": q.to_string(), "theta": theta.to_string() }),
        );
    }
    Ok(())
}

/// Sq^i x^k = C(k, i) x^{k+i} on the powers of the generator of H^1(RP^2; Z/2).
fn binomial_case(out: &mut Out) -> Result<()> {
    let x = load_space("rp2")?;
    let gen = cohomology(&x, 1, Z2).generator(0);
    let powers = [Cochain::unit(x.clone(), Z2), gen.clone(), cup(&gen, &gen)?];
    let mut ok = !cohomology(&x, 2, Z2).is_zero_class(&powers[2])?;
    for k in 0..=2usize {
        for i in 0..=3usize {
            let odd = i <= k && (i & !k) == 0;
            let want = if odd && k + i <= 2 { powers[k + i].clone() } else { Cochain::zero(x.clone(), k + i, Z2) };
            ok &= same_class(&sq(i as u32, &powers[k])?, &want)?;
        }
    }
    out.case("binomial Sq^i x^k on RP2".into(), ok, Value::Null);
    Ok(())
}

fn random_form(x: &Arc<SimplicialComplex>, k: usize, rng: &mut ChaCha8Rng) -> Result<DiscreteForm> {
    // integral generators with coefficients in Z, Z/2 or Z/3, plus an exact part
    let g = cohomology(x, k, CoefficientTag::IntZ);
    let den = [1i64, 1, 2, 3][rng.gen_range(0..4)];
    let coords: Vec<Q> = (0..g.len()).map(|_| Q::new(BigInt::from(rng.gen_range(-4i64..=4)), BigInt::from(den))).collect();
    let mut f = DiscreteForm::new(x.clone(), k, g.lift_values(&coords))?;
    if k > 0 {
        let vals: Vec<Q> = (0..x.count(k - 1)).map(|_| Q::new(BigInt::from(rng.gen_range(-5i64..=5)), BigInt::from(rng.gen_range(1i64..=4)))).collect();
        f = f.add(&DiscreteForm::exact(&Cochain::new(x.clone(), k - 1, CoefficientTag::Rational, vals)?)?)?;
    }
    Ok(f)
}

fn periods_suite(out: &mut Out, only: Option<&str>, trials: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    for x in spaces(only, &["circle", "torus2", "sphere(2)"])? {
        for n in 1..=3usize {
            if n > x.dim() {
                out.case(format!("Deligne:{n} on {}", x.name()), true, json!({ "vacuous": "no closed forms above the dimension" }));
                continue;
            }
            let ss = run_with(&x, &theory(&format!("Deligne:{n}"))?, RunOptions::default())?;
            let (mut agree, mut integral) = (0, 0);
            let mut bad = Vec::new();
            for _ in 0..trials {
                let f = random_form(&x, n, rng)?;
                let int = has_integral_periods(&f);
                integral += int as usize;
                if ss.form_survives(&f) == Some(int) {
                    agree += 1;
                } else {
                    bad.push(f.values().iter().map(|v| v.to_string()).collect::<Vec<_>>());
                }
            }
            out.case(
                format!("Deligne:{n} on {}", x.name()),
                bad.is_empty(),
                json!({ "forms": trials, "agree": agree, "integral": integral, "counterexamples": bad }),
            );
        }
    }
    Ok(())
}

fn bockstein_suite(out: &mut Out, only: Option<&str>) -> Result<()> {
    for x in spaces(only, &[])? {
        for (diff, int, page) in [("diffK0", "K0", 3), ("diffMoravaInt:2", "MoravaInt:2", 7)] {
            let opts = || RunOptions { through_page: Some(page), ..RunOptions::default() };
            let a = run_with(&x, &theory(diff)?, opts())?;
            let b = run_with(&x, &theory(int)?, opts())?;
            let case = format!("{diff} vs {int} on {}", x.name());
            match bockstein_compare(&a, &b) {
                Ok(r) => {
                    let at: Vec<_> = r.cases.iter().filter(|c| c.r == page).collect();
                    let vacuous = at.iter().filter(|c| c.vacuous).count();
                    out.case(
                        case,
                        true,
                        json!({ "page": page, "entries": at.len(), "vacuous": vacuous, "all_pages_checked": r.checked }),
                    );
                }
                Err(e) => out.case(case, false, json!({ "error": e.to_string() })),
            }
        }
    }
    Ok(())
}
