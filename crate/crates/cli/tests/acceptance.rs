//! Acceptance suite: one line per criterion, nonzero exit on any failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ahss_core::abgroup::rational::Q;
use ahss_core::abgroup::{CoefficientTag, PresentedAbGroup};
use ahss_core::cochains::{bockstein_tilde, cohomology, cup, rho_p, Cochain};
use ahss_core::forms::{has_integral_periods, DiscreteForm};
use ahss_core::simpcomplex::{builtin_space, shipped_space_ids, SimplicialComplex};
use ahss_core::sseq::{
    ahss_bundle, bockstein_compare, leibniz_check, run, run_with, theory, Quadrant, RowKind, RunOptions,
    SpectralSequence,
};
use ahss_core::steenrod::{adem_reduce, derive_theta, milnor_q, sq, OperationId, SteenrodElement};

use common::*;

const Z2: CoefficientTag = CoefficientTag::ModP(2);
const SEED: u64 = 20;

/// Wall-clock limits per criterion, in seconds.
const LIMITS: [u64; 10] = [10, 30, 5, 60, 30, 60, 10, 30, 10, 60];
const CARTAN_PAIRS: usize = 50;
const RANDOM_FORMS: usize = 100;
const LEIBNIZ_PAIRS: usize = 60;

type Outcome = Result<String, String>;

fn space(id: &str) -> Arc<SimplicialComplex> {
    Arc::new(builtin_space(id).expect("shipped space"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn total(ss: &SpectralSequence, n: i64) -> PresentedAbGroup {
    ss.e_inf()
        .entries
        .iter()
        .filter(|((p, q), _)| p + q == n)
        .fold(PresentedAbGroup::zero(), |a, (_, g)| a.direct_sum(g))
}

fn random_mod2(x: &Arc<SimplicialComplex>, k: usize, rng: &mut ChaCha8Rng) -> Cochain {
    let g = cohomology(x, k, Z2);
    let c: Vec<Q> = (0..g.len()).map(|_| Q::from_integer(BigInt::from(rng.gen_range(0..2)))).collect();
    g.lift(&c)
}

fn same_class(a: &Cochain, b: &Cochain) -> bool {
    cohomology(a.space(), a.degree(), a.tag()).is_zero_class(&a.sub(b).unwrap()).unwrap()
}

fn c1_cohomology() -> Outcome {
    let mut checked = 0;
    for id in shipped_space_ids() {
        let x = space(&id);
        let h = integral_homology(&x);
        for k in 0..=x.dim() {
            for (tag, want) in [(CoefficientTag::IntZ, h_int(&h, k)), (Z2, h_mod(&h, k, 2)), (CoefficientTag::QmodZ, h_qz(&h, k))] {
                let got = cohomology(&x, k, tag).group().clone();
                ensure(got == want, || format!("H^{k}({id}; {tag}): {got:?} vs oracle {want:?}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} groups"))
}

fn c2_steenrod() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pairs = 0;
    for id in shipped_space_ids() {
        let x = space(&id);
        let d = x.dim();
        for k in 0..=d {
            for _ in 0..3 {
                let a = random_mod2(&x, k, &mut rng);
                ensure(same_class(&sq(0, &a).unwrap(), &a), || format!("Sq0 on {id}, degree {k}"))?;
                ensure(sq(k as u32, &a).unwrap() == cup(&a, &a).unwrap(), || format!("Sq^n on {id}, degree {k}"))?;
                for i in k as u32 + 1..=d as u32 + 1 {
                    ensure(sq(i, &a).unwrap().is_zero(), || format!("Sq{i} on degree {k} of {id}"))?;
                }
                if k < d {
                    let b = rho_p(&bockstein_tilde(&a).unwrap(), 2).unwrap();
                    ensure(same_class(&sq(1, &a).unwrap(), &b), || format!("Sq1 = rho beta on {id}, degree {k}"))?;
                }
            }
        }
        for _ in 0..CARTAN_PAIRS {
            let a = rng.gen_range(0..=d);
            let b = rng.gen_range(0..=d - a);
            let (u, v) = (random_mod2(&x, a, &mut rng), random_mod2(&x, b, &mut rng));
            let uv = cup(&u, &v).unwrap();
            for k in 0..=(d - a - b) as u32 {
                let mut rhs = Cochain::zero(x.clone(), a + b + k as usize, Z2);
                for i in 0..=k {
                    rhs = rhs.add(&cup(&sq(i, &u).unwrap(), &sq(k - i, &v).unwrap()).unwrap()).unwrap();
                }
                ensure(same_class(&sq(k, &uv).unwrap(), &rhs), || format!("Cartan Sq{k} on {id}, degrees {a}, {b}"))?;
            }
            pairs += 1;
        }
    }
    // Sq^i x^k = C(k, i) x^{k+i} for the generator of H^1(RP^2; Z/2)
    let x = space("rp2");
    let gen = cohomology(&x, 1, Z2).generator(0);
    let powers = [Cochain::unit(x.clone(), Z2), gen.clone(), cup(&gen, &gen).unwrap()];
    ensure(!cohomology(&x, 2, Z2).is_zero_class(&powers[2]).unwrap(), || "x^2 = 0 on rp2".into())?;
    for k in 1..=2usize {
        for i in 0..=3usize {
            let got = sq(i as u32, &powers[k]).unwrap();
            let odd = (i & !k) == 0 && i <= k;
            let want = if odd && k + i <= 2 { powers[k + i].clone() } else { Cochain::zero(x.clone(), k + i, Z2) };
            ensure(same_class(&got, &want), || format!("Sq{i}(x^{k}) on rp2"))?;
        }
    }
    Ok(format!("{} spaces, {pairs} Cartan pairs", shipped_space_ids().len()))
}

fn c3_adem() -> Outcome {
    let mut table = 0;
    for b in 1..=8u32 {
        for a in 1..2 * b {
            let d = a + b;
            let basis = admissible(d);
            let images: Vec<SymPoly> = basis.iter().map(|t| act(t, d as usize)).collect();
            let coeffs = f2_solve(&images, &act(&[a, b], d as usize)).ok_or("action outside the admissible span")?;
            let mut want: Vec<Vec<u32>> = basis.iter().zip(&coeffs).filter(|(_, &c)| c).map(|(t, _)| t.clone()).collect();
            want.sort();
            let mut got: Vec<Vec<u32>> = adem_reduce(&SteenrodElement::monomial(vec![a, b])).terms().cloned().collect();
            got.sort();
            ensure(got == want, || format!("Sq{a} Sq{b}: {got:?} vs {want:?}"))?;
            table += 1;
        }
    }
    let q1 = adem_reduce(&milnor_q(1));
    let want = SteenrodElement::sq(3).add(&SteenrodElement::monomial(vec![2, 1]));
    ensure(q1 == want, || format!("Q1 = {q1}"))?;
    ensure(derive_theta(1).map_err(|e| e.to_string())? == SteenrodElement::sq(2), || "Theta1 != Sq2".into())?;
    for n in 0..=3u32 {
        let q = milnor_q(n);
        let d = (1u32 << (n + 1)) - 1;
        ensure(q.degree() == d, || format!("deg Q{n} = {}", q.degree()))?;
        let theta = derive_theta(n).map_err(|e| e.to_string())?;
        let sum = SteenrodElement::sq(1).mul(&theta).add(&q);
        ensure(sum.in_left_ideal_of_sq1(), || format!("Sq1 Theta{n} + Q{n} not in A Sq1"))?;
        // the same membership, decided by the polynomial action
        let mut terms: Vec<Vec<u32>> = q.terms().cloned().collect();
        terms.extend(theta.terms().map(|t| [vec![1], t.clone()].concat()));
        let ideal: Vec<SymPoly> = admissible(d - 1).into_iter().map(|t| act(&[t, vec![1]].concat(), d as usize)).collect();
        ensure(f2_solve(&ideal, &act_sum(&terms, d as usize)).is_some(), || format!("action check for Q{n}"))?;
    }
    Ok(format!("{table} Adem products, Q0..Q3"))
}

fn random_form(x: &Arc<SimplicialComplex>, n: usize, rng: &mut ChaCha8Rng) -> (DiscreteForm, bool) {
    let g = cohomology(x, n, CoefficientTag::IntZ);
    let den = [1i64, 1, 2, 3, 5][rng.gen_range(0..5)];
    let coords: Vec<Q> = (0..g.len()).map(|_| Q::new(BigInt::from(rng.gen_range(-5i64..=5)), BigInt::from(den))).collect();
    let integral = coords.iter().all(|c| c.is_integer());
    let mut f = DiscreteForm::new(x.clone(), n, g.lift_values(&coords)).unwrap();
    let h: Vec<Q> = (0..x.count(n - 1))
        .map(|_| Q::new(BigInt::from(rng.gen_range(-7i64..=7)), BigInt::from(rng.gen_range(1i64..=6))))
        .collect();
    let h = Cochain::new(x.clone(), n - 1, CoefficientTag::Rational, h).unwrap();
    f = f.add(&DiscreteForm::exact(&h).unwrap()).unwrap();
    (f, integral)
}

fn c4_deligne() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut forms, mut vacuous, mut nonintegral) = (0, 0, 0);
    for id in ["circle", "torus2", "sphere(2)"] {
        let x = space(id);
        let h = integral_homology(&x);
        for n in 1..=3usize {
            let ss = run(&x, &theory(&format!("Deligne:{n}")).unwrap(), None).map_err(|e| e.to_string())?;
            ensure(ss.report().unresolved.is_empty(), || format!("Deligne:{n} on {id} has unresolved differentials"))?;
            if n > x.dim() {
                // no closed forms above the dimension
                ensure(ss.form_vector(&DiscreteForm::zero(x.clone(), n)).is_none(), || format!("forms at n = {n} on {id}"))?;
                vacuous += 1;
            } else {
                for _ in 0..RANDOM_FORMS {
                    let (f, integral) = random_form(&x, n, &mut rng);
                    ensure(has_integral_periods(&f) == integral, || format!("period integrality on {id}"))?;
                    let kept = ss.form_survives(&f).ok_or("form not placed at (0,0)")?;
                    ensure(kept == integral, || format!("Deligne:{n} on {id}: survives {kept}, integral {integral}"))?;
                    forms += 1;
                    nonintegral += usize::from(!integral);
                }
            }
            for p in 1..=x.dim() as i64 {
                let k = n + p as usize;
                let want = if k <= x.dim() { h_int(&h, k) } else { PresentedAbGroup::zero() };
                let got = total(&ss, p);
                ensure(got == want, || format!("Deligne:{n} on {id}, degree {p}: {got:?} vs {want:?}"))?;
            }
        }
    }
    Ok(format!("{forms} forms ({nonintegral} non-integral), {vacuous} vacuous cases with n > dim"))
}

fn c5_k_theory() -> Outcome {
    let qz = PresentedAbGroup::with_all(0, vec![], 1, 0);
    for id in ["sphere(2)", "sphere(4)"] {
        let x = space(id);
        let h = integral_homology(&x);
        let d = x.dim() as i64;
        let ss = run(&x, &theory("diffK0").unwrap(), None).map_err(|e| e.to_string())?;
        let rep = ss.report();
        ensure(rep.unresolved.is_empty(), || format!("unresolved on {id}"))?;
        let fired: Vec<_> = rep.differentials.iter().filter(|r| r.nonzero && !r.rule.starts_with("ExpPeriod")).collect();
        ensure(fired.is_empty(), || format!("rule fired on {id}: {:?}", fired[0]))?;
        let e2 = ss.page(2).ok_or("no E2")?;
        for q in (-2 * d - 1..0).filter(|q| q % 2 != 0) {
            for p in 0..=d {
                let want = h_qz(&h, p as usize);
                ensure(e2.entry(p, q) == want, || format!("E2({p},{q}) on {id}"))?;
                // forms of even degree k and their tails map onto (d, 1 - k)
                let hit = p == d && (2..=d).step_by(2).any(|k| q == 1 - k);
                let want = if !want.is_zero() && !hit { qz.clone() } else { PresentedAbGroup::zero() };
                ensure(ss.e_inf().entry(p, q) == want, || format!("E_inf({p},{q}) on {id}"))?;
            }
        }
        let k0 = run(&x, &theory("K0").unwrap(), None).map_err(|e| e.to_string())?;
        let t0 = total(&k0, 0);
        ensure(t0 == PresentedAbGroup::free(2), || format!("K0 degree 0 on {id}: {t0:?}"))?;
    }
    Ok("sphere(2), sphere(4)".into())
}

fn c6_bockstein() -> Outcome {
    let mut lines = Vec::new();
    for (diff, int, page) in [("diffK0", "K0", 3usize), ("diffMoravaInt:2", "MoravaInt:2", 7)] {
        let (mut cases, mut vacuous) = (0, 0);
        for id in shipped_space_ids() {
            let x = space(&id);
            let opts = || RunOptions { through_page: Some(page), ..RunOptions::default() };
            let a = run_with(&x, &theory(diff).unwrap(), opts()).map_err(|e| e.to_string())?;
            let b = run_with(&x, &theory(int).unwrap(), opts()).map_err(|e| e.to_string())?;
            let r = bockstein_compare(&a, &b).map_err(|e| format!("{diff}/{int} on {id}: {e}"))?;
            ensure(!r.pages.contains(&1), || "a check was attempted at r = 1".into())?;
            for c in r.cases.iter().filter(|c| c.r == page) {
                cases += 1;
                vacuous += usize::from(c.vacuous);
            }
        }
        lines.push(format!("{diff}/{int} r={page}: {cases} entries, {vacuous} vacuous"));
    }
    Ok(lines.join("; "))
}

fn c7_morava() -> Outcome {
    for n in 1..=3u32 {
        let t = theory(&format!("diffMoravaInt:{n}")).unwrap();
        let period = 2 * ((1i64 << n) - 1);
        for q in -60..0 {
            let flat = t.row_kinds(q).contains(&&RowKind::Constant(CoefficientTag::QmodZ));
            ensure(flat == ((q - 1) % period == 0), || format!("n = {n}: flat row at q = {q} is {flat}"))?;
        }
        let first = t.rules_for(30).iter().filter(|r| r.quadrant == Quadrant::Negative).map(|r| r.page).min();
        ensure(first == Some((1 << (n + 1)) - 1), || format!("n = {n}: first flat rule at {first:?}"))?;
        let forms = t.rules_for(30).iter().filter(|r| r.quadrant == Quadrant::Forms).map(|r| r.page).min();
        ensure(forms == Some(period as usize), || format!("n = {n}: forms rule at {forms:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for id in shipped_space_ids() {
        let x = space(&id);
        let a = run(&x, &theory("diffMoravaInt:1").unwrap(), None).map_err(|e| e.to_string())?.report();
        let b = run(&x, &theory("diffK0").unwrap(), None).map_err(|e| e.to_string())?.report();
        let strip = |r: &ahss_core::sseq::Report| {
            r.differentials.iter().map(|d| (d.r, d.from, d.to, d.matrix.clone())).collect::<Vec<_>>()
        };
        ensure(strip(&a) == strip(&b) && a.e_inf == b.e_inf, || format!("diffMoravaInt:1 and diffK0 differ on {id}"))?;
        for k in 0..=x.dim().saturating_sub(3) {
            let g = cohomology(&x, k, CoefficientTag::IntZ);
            let c: Vec<Q> = (0..g.len()).map(|_| Q::from_integer(BigInt::from(rng.gen_range(-3..=3)))).collect();
            let y = g.lift(&c);
            let (p, q) = (OperationId::MilnorQInt(1).apply(&y).unwrap(), OperationId::Sq3Int.apply(&y).unwrap());
            ensure(same_class(&p, &q), || format!("Q1 and Sq3 differ on {id}, degree {k}"))?;
            let g = cohomology(&x, k, CoefficientTag::QmodZ);
            let c: Vec<Q> = (0..g.len()).map(|_| Q::new(BigInt::from(rng.gen_range(0..6)), BigInt::from(6))).collect();
            let y = g.lift(&c);
            let p = OperationId::GammaQRhoBeta(1).apply(&y).unwrap();
            let q = OperationId::GammaSqRhoBeta.apply(&y).unwrap();
            ensure(same_class(&p, &q), || format!("flat Q1 and Sq3 differ on {id}, degree {k}"))?;
        }
    }
    Ok("rows, pages and level-one agreement".into())
}

fn c8_leibniz() -> Outcome {
    let x = space("torus2");
    let r = leibniz_check(&theory("Deligne:2").unwrap(), &x, LEIBNIZ_PAIRS, SEED).map_err(|e| e.to_string())?;
    ensure(r.pairs >= 50, || format!("only {} pairs", r.pairs))?;
    ensure(r.passed(), || format!("failures: {:?}", r.failures))?;
    Ok(format!("{} pairs, {} with a nonzero differential", r.pairs, r.nonvacuous))
}

fn c9_bundle() -> Outcome {
    let c = space("circle");
    let ss = ahss_bundle(&c, &c, &theory("HZ").unwrap()).map_err(|e| e.to_string())?;
    let ranks: Vec<usize> = (0..=2).map(|n| total(&ss, n).free_rank).collect();
    ensure(ranks == [1, 2, 1], || format!("ranks {ranks:?}"))?;
    let pt = space("point");
    for id in ["circle", "torus2", "rp2"] {
        let m = space(id);
        for t in ["HZ", "K0", "flatK", "MoravaInt:1"] {
            let t = theory(t).unwrap();
            let a = ahss_bundle(&m, &pt, &t).map_err(|e| e.to_string())?.report().to_json();
            let b = run(&m, &t, None).map_err(|e| e.to_string())?.report().to_json();
            ensure(a == b, || format!("point fiber differs from the base run for {} on {id}", t.id))?;
        }
    }
    Ok("ranks (1, 2, 1); point fiber identical".into())
}

fn c10_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ahss");
    let configs: [&[&str]; 4] = [
        &["--space", "torus2", "--theory", "Deligne:2"],
        &["--space", "rp3", "--theory", "K1", "--all-differentials"],
        &["--space", "moore(2,2)", "--theory", "diffK0"],
        &["--space", "circle", "--theory", "HZ", "--fiber", "circle"],
    ];
    for cfg in configs {
        let mut outs = Vec::new();
        for threads in ["1", "4", "1"] {
            let o = Command::new(bin)
                .arg("compute")
                .args(cfg)
                .env("RAYON_NUM_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(!o.stdout.is_empty(), || format!("no output for {cfg:?}"))?;
            outs.push(o.stdout);
        }
        ensure(outs.windows(2).all(|w| w[0] == w[1]), || format!("outputs differ for {cfg:?}"))?;
    }
    Ok(format!("{} configurations, 1 and 4 threads", configs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cohomology oracle", c1_cohomology),
        ("Steenrod squares", c2_steenrod),
        ("Adem and Milnor", c3_adem),
        ("Deligne reconstruction", c4_deligne),
        ("K-theory collapse", c5_k_theory),
        ("Bockstein comparison", c6_bockstein),
        ("Morava layout", c7_morava),
        ("Leibniz", c8_leibniz),
        ("fiber bundle", c9_bundle),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        let limit = Duration::from_secs(LIMITS[i]);
        let (ok, detail) = match out {
            Ok(d) if t <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {}s limit", LIMITS[i])),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {}: {} {name} ({:.2}s / {}s) {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.as_secs_f64(),
            LIMITS[i]
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
