//! Product bundles `F -> M × F -> M`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;

use super::engine::{run, SpectralSequence};
use super::{RowKind, SseqError, TheorySpec};
use crate::abgroup::{CoefficientTag, PresentedAbGroup};
use crate::cochains::cohomology;
use crate::simpcomplex::{product, SimplicialComplex};

fn is_point(x: &SimplicialComplex) -> bool {
    x.vertex_count() == 1
}

/// `H^p(M; Z/d)` by universal coefficients.
fn cohomology_mod(m: &Arc<SimplicialComplex>, p: usize, d: &BigInt) -> PresentedAbGroup {
    let hp = cohomology(m, p, CoefficientTag::IntZ).group().clone();
    let mut orders = vec![d.clone(); hp.free_rank];
    orders.extend(hp.torsion.iter().map(|t| t.gcd(d)));
    if p < m.dim() {
        let hn = cohomology(m, p + 1, CoefficientTag::IntZ).group().clone();
        orders.extend(hn.torsion.iter().map(|t| t.gcd(d)));
    }
    PresentedAbGroup::new(0, orders)
}

/// `H^p(M; G)` for a group given by its isomorphism type.
fn cohomology_with(m: &Arc<SimplicialComplex>, p: usize, g: &PresentedAbGroup) -> PresentedAbGroup {
    let mut out = PresentedAbGroup::zero();
    let times = |h: &PresentedAbGroup, n: usize| (0..n).fold(PresentedAbGroup::zero(), |acc, _| acc.direct_sum(h));
    out = out.direct_sum(&times(cohomology(m, p, CoefficientTag::IntZ).group(), g.free_rank));
    for d in &g.torsion {
        out = out.direct_sum(&cohomology_mod(m, p, d));
    }
    out = out.direct_sum(&times(cohomology(m, p, CoefficientTag::QmodZ).group(), g.divisible_rank));
    out.direct_sum(&times(cohomology(m, p, CoefficientTag::Rational).group(), g.vector_rank))
}

/// The sequence of the trivial bundle over `m` with fiber `f`.
///
/// Row `q` carries `T^q(F)`, taken from a run on the fiber as the direct sum
/// of its graded pieces. A point fiber returns the plain run on `m`.
pub fn ahss_bundle(m: &Arc<SimplicialComplex>, f: &Arc<SimplicialComplex>, t: &TheorySpec) -> Result<SpectralSequence, SseqError> {
    if is_point(f) {
        return run(m, t, None);
    }
    if t.rows.iter().any(|r| matches!(r.kind, RowKind::Forms { .. })) {
        return Err(SseqError::Unsupported(format!("bundle sequence for {} (forms row)", t.id)));
    }
    let fiber = run(f, t, None)?;
    let report = fiber.report();
    let mut rows: BTreeMap<i64, PresentedAbGroup> = BTreeMap::new();
    for (n, pieces) in &report.filtration {
        let n: i64 = n.parse().expect("integer key");
        let g = pieces.iter().fold(PresentedAbGroup::zero(), |acc, pc| acc.direct_sum(&pc.group));
        rows.insert(n, g);
    }
    let mut entries = BTreeMap::new();
    for (&q, g) in &rows {
        for p in 0..=m.dim() {
            let h = cohomology_with(m, p, g);
            if !h.is_zero() {
                entries.insert((p as i64, q), h);
            }
        }
    }
    let id = format!("{}[{}]", t.id, f.name());
    let mut ss = SpectralSequence::from_groups(m, &id, &entries, None);
    while !ss.is_finished() {
        ss.apply_rules_and_turn()?;
    }
    Ok(ss)
}

/// As [`ahss_bundle`], after checking that `total` is the product `m × f`.
pub fn ahss_bundle_total(
    total: &SimplicialComplex,
    m: &Arc<SimplicialComplex>,
    f: &Arc<SimplicialComplex>,
    t: &TheorySpec,
) -> Result<SpectralSequence, SseqError> {
    let expected = product(m, f);
    let same = expected.f_vector() == total.f_vector()
        && (0..=expected.dim()).all(|k| expected.simplices(k) == total.simplices(k));
    if !same {
        return Err(SseqError::NonProductBundle(format!(
            "{} is not {} × {}",
            total.name(),
            m.name(),
            f.name()
        )));
    }
    ahss_bundle(m, f, t)
}
