//! Randomized check of `d(xy) = d(x) y + (-1)^{p+q} x d(y)` on `E_2`.
//!
//! Pairs are `x` from the theory and `y` an integral class (so `d(y) = 0`),
//! plus, for `Deligne(n)`, products of a rational closed `a`-form with an
//! integral closed `b`-form, `a + b = n`.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::engine::{run, BlockRole, SpectralSequence};
use super::{SseqError, TheorySpec};
use crate::abgroup::rational::{sub_vec, Q};
use crate::abgroup::{CoefficientTag, GenKind};
use crate::cochains::{coboundary, cup, exp_reduce, Cochain};
use crate::forms::DiscreteForm;
use crate::simpcomplex::SimplicialComplex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeibnizReport {
    pub theory: String,
    pub space: String,
    pub pairs: usize,
    /// Pairs where some differential involved is nonzero.
    pub nonvacuous: usize,
    pub failures: Vec<String>,
}

impl LeibnizReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn rand_q(rng: &mut ChaCha8Rng) -> Q {
    Q::new(BigInt::from(rng.gen_range(-6i64..=6)), BigInt::from(rng.gen_range(1i64..=6)))
}

fn rand_z(rng: &mut ChaCha8Rng) -> Q {
    Q::from_integer(BigInt::from(rng.gen_range(-3i64..=3)))
}

/// A random integral cocycle of degree `k`: integer combination of the
/// cohomology generators plus an integral coboundary.
fn random_integral_cocycle(ss: &SpectralSequence, k: usize, rng: &mut ChaCha8Rng) -> Cochain {
    let x = ss.space();
    let g = ss.cache().get(k, CoefficientTag::IntZ);
    let coords: Vec<Q> = g.kinds().iter().map(|_| rand_z(rng)).collect();
    let mut c = g.lift(&coords);
    if k > 0 {
        let b: Vec<Q> = (0..x.count(k - 1)).map(|_| rand_z(rng)).collect();
        let b = Cochain::new(x.clone(), k - 1, CoefficientTag::IntZ, b).expect("integral");
        c = c.add(&coboundary(&b)).expect("same degree");
    }
    c
}

fn random_rational_form(ss: &SpectralSequence, k: usize, rng: &mut ChaCha8Rng) -> Cochain {
    let x = ss.space();
    let basis = ss.cache().closed(k);
    let mut v = vec![Q::from_integer(0.into()); x.count(k)];
    for b in &basis.basis {
        let a = rand_q(rng);
        for (o, y) in v.iter_mut().zip(b) {
            *o += &a * y;
        }
    }
    Cochain::new(x.clone(), k, CoefficientTag::Rational, v).expect("rational")
}

/// Ambient vector of a cocycle placed in the block `role` of `(p, q)`.
fn place(ss: &SpectralSequence, p: i64, q: i64, role: BlockRole, c: &Cochain) -> Option<Vec<Q>> {
    let blocks = ss.blocks(p, q);
    let b = blocks.iter().find(|b| b.role == role && b.cochain_degree == c.degree())?;
    let mut v = vec![Q::from_integer(0.into()); ss.ambient_dim(p, q)];
    for (i, y) in b.raw_coords(c.values()).into_iter().enumerate() {
        v[b.offset + i] = y;
    }
    Some(v)
}

/// Compares `d_r(src)` with `expected` in `E_r` at the target of `(p, q)`.
/// Returns `(agrees, nonzero)`.
fn compare(ss: &SpectralSequence, r: usize, p: i64, q: i64, src: Option<Vec<Q>>, expected: Option<Vec<Q>>) -> (bool, bool) {
    let (tp, tq) = (p + r as i64, q - r as i64 + 1);
    let Some(tgt) = ss.subquotient(r, tp, tq) else {
        return (true, false);
    };
    let zero = vec![Q::from_integer(0.into()); ss.ambient_dim(tp, tq)];
    let lhs = match (ss.differential_matrix(r, p, q), src) {
        (Some(m), Some(v)) => m.apply(&v),
        _ => zero.clone(),
    };
    let rhs = expected.unwrap_or(zero);
    let nonzero = !tgt.rel.contains(&lhs) || !tgt.rel.contains(&rhs);
    (tgt.rel.contains(&sub_vec(&lhs, &rhs)), nonzero)
}

/// Runs `trials` random pairs for `HZ` or `Deligne(n)`.
pub fn leibniz_check(t: &TheorySpec, x: &Arc<SimplicialComplex>, trials: usize, seed: u64) -> Result<LeibnizReport, SseqError> {
    let n = match t.id.as_str() {
        "HZ" => None,
        id if id.starts_with("Deligne") => Some(t.period),
        _ => return Err(SseqError::Unsupported(format!("Leibniz check for {}", t.id))),
    };
    let ss = run(x, t, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = x.dim();
    let mut report = LeibnizReport {
        theory: t.id.clone(),
        space: x.name().to_string(),
        pairs: 0,
        nonvacuous: 0,
        failures: Vec::new(),
    };
    let Some(n) = n else {
        // ordinary cohomology: every differential from E_2 on vanishes
        for _ in 0..trials {
            let (a, b) = (rng.gen_range(0..=dim), rng.gen_range(0..=dim));
            let (ya, yb) = (random_integral_cocycle(&ss, a, &mut rng), random_integral_cocycle(&ss, b, &mut rng));
            if a + b <= dim && !crate::cochains::is_cocycle(&cup(&ya, &yb)?) {
                report.failures.push(format!("product of degrees {a}, {b} is not a cocycle"));
            }
            report.pairs += 1;
        }
        return Ok(report);
    };
    for i in 0..trials {
        let kind = if n >= 2 { i % 3 } else { i % 2 };
        match kind {
            // x a closed n-form, y an integral class of degree b
            0 => {
                let b = rng.gen_range(0..=dim.saturating_sub(n));
                let omega = random_rational_form(&ss, n, &mut rng);
                let y = random_integral_cocycle(&ss, b, &mut rng);
                let prod = cup(&omega, &y)?;
                let role = if b == 0 { BlockRole::ClosedForms(n) } else { BlockRole::DeRham(n) };
                let src = place(&ss, b as i64, 0, role, &prod);
                let expected = cup(&exp_reduce(&omega)?, &y)?;
                let tgt = place(&ss, (b + n) as i64, 1 - n as i64, BlockRole::Row(CoefficientTag::QmodZ), &expected);
                let (ok, nz) = compare(&ss, n, b as i64, 0, src, tgt);
                if !ok {
                    report.failures.push(format!("form of degree {n} times integral class of degree {b}"));
                }
                report.nonvacuous += nz as usize;
            }
            // x a flat class, y integral: both sides vanish on this row
            1 => {
                let a = rng.gen_range(0..=dim);
                let g = ss.cache().get(a, CoefficientTag::QmodZ);
                let coords: Vec<Q> = g.kinds().iter().map(|k| match k {
                    GenKind::Divisible => rand_q(&mut rng),
                    _ => rand_z(&mut rng),
                }).collect();
                let xa = g.lift(&coords);
                let b = rng.gen_range(0..=dim - a);
                let y = random_integral_cocycle(&ss, b, &mut rng);
                if !crate::cochains::is_cocycle(&cup(&xa, &y)?) {
                    report.failures.push(format!("flat class of degree {a} times integral class of degree {b}"));
                }
            }
            // rational a-form times integral b-form, a + b = n
            _ => {
                let a = rng.gen_range(1..n);
                let b = n - a;
                let omega = random_rational_form(&ss, a, &mut rng);
                let eta = random_integral_cocycle(&ss, b, &mut rng).retag(CoefficientTag::Rational)?;
                let prod = DiscreteForm::from_cochain(&cup(&omega, &eta)?)?;
                let src = ss.form_vector(&prod);
                let expected = cup(&exp_reduce(&omega)?, &eta.retag(CoefficientTag::IntZ)?)?;
                let tgt = place(&ss, n as i64, 1 - n as i64, BlockRole::Row(CoefficientTag::QmodZ), &expected);
                let (ok, nz) = compare(&ss, n, 0, 0, src, tgt);
                if !ok {
                    report.failures.push(format!("forms of degrees {a} and {b}"));
                }
                report.nonvacuous += nz as usize;
            }
        }
        report.pairs += 1;
    }
    Ok(report)
}
