//! The Bockstein map from flat rows of a differential theory to its
//! underlying integral theory, checked page by page against the differentials.

use serde::Serialize;

use super::engine::{Block, SpectralSequence};
use super::SseqError;
use crate::abgroup::rational::{sub_vec, QMatrix, Q};
use crate::abgroup::{CoefficientTag, GenKind};
use crate::cochains::bockstein_exp;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BocksteinCase {
    pub r: usize,
    pub from: [i64; 2],
    pub generators: usize,
    /// Both differentials vanish on the page, or the source is zero.
    pub vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BocksteinReport {
    pub pages: Vec<usize>,
    pub cases: Vec<BocksteinCase>,
    pub checked: usize,
    pub vacuous: usize,
}

/// Matrix of `β` from the flat entry `(p, q)` of `flat` to `(p + 1, q - 1)` of `int`.
fn beta_matrix(flat: &SpectralSequence, int: &SpectralSequence, p: i64, q: i64) -> Result<QMatrix, SseqError> {
    let (src, tgt) = (flat.blocks(p, q), int.blocks(p + 1, q - 1));
    let mut m = QMatrix::zeros(int.ambient_dim(p + 1, q - 1), flat.ambient_dim(p, q));
    for sb in src.iter().filter(|b| b.tag() == CoefficientTag::QmodZ) {
        for tb in tgt.iter().filter(|b| b.tag() == CoefficientTag::IntZ && b.cochain_degree == sb.cochain_degree + 1) {
            fill(flat, sb, tb, &mut m)?;
        }
    }
    Ok(m)
}

fn fill(flat: &SpectralSequence, sb: &Block, tb: &Block, m: &mut QMatrix) -> Result<(), SseqError> {
    for (j, kind) in sb.kinds.iter().enumerate() {
        // a divisible generator lifts to a rational cocycle, whose Bockstein vanishes
        if *kind == GenKind::Divisible {
            continue;
        }
        let b = bockstein_exp(&sb.generator_cochain(flat.space(), j))?;
        for (i, v) in tb.raw_coords(b.values()).into_iter().enumerate() {
            m.data[tb.offset + i][sb.offset + j] = v;
        }
    }
    Ok(())
}

fn apply_or_zero(m: Option<&QMatrix>, rows: usize, v: &[Q]) -> Vec<Q> {
    match m {
        Some(m) => m.apply(v),
        None => vec![Q::from_integer(0.into()); rows],
    }
}

/// Checks `β d_r = d_r β` on every flat entry (`q < 0`) of `flat` for all
/// pages `r ≥ 2` computed by both sequences.
pub fn bockstein_compare(flat: &SpectralSequence, int: &SpectralSequence) -> Result<BocksteinReport, SseqError> {
    let last = flat.current_page().min(int.current_page());
    let first = flat.theory().start_page.max(int.theory().start_page).max(2);
    let mut cases = Vec::new();
    let mut pages = Vec::new();
    for r in first..last {
        pages.push(r);
        let Some(page) = flat.page(r) else { continue };
        for &(p, q) in page.entries.keys() {
            if q >= 0 || !flat.blocks(p, q).iter().any(|b| b.tag() == CoefficientTag::QmodZ) {
                continue;
            }
            let ri = r as i64;
            let (ft, it) = ((p + ri, q - ri + 1), (p + ri + 1, q - ri));
            let b_src = beta_matrix(flat, int, p, q)?;
            let b_tgt = beta_matrix(flat, int, ft.0, ft.1)?;
            let a_flat = flat.differential_matrix(r, p, q);
            let a_int = int.differential_matrix(r, p + 1, q - 1);
            let gens = flat.subquotient(r, p, q).expect("entry").decompose().gens;
            let int_src = int.subquotient(r, p + 1, q - 1);
            let int_tgt = int.subquotient(r, it.0, it.1);
            let mut vacuous = true;
            for gvec in &gens {
                let bg = b_src.apply(gvec);
                if let Some(s) = &int_src {
                    if !s.sub.contains(&bg) {
                        return Err(SseqError::CommutationFailure { r, p, q });
                    }
                }
                let lhs = b_tgt.apply(&apply_or_zero(a_flat, flat.ambient_dim(ft.0, ft.1), gvec));
                let rhs = apply_or_zero(a_int, int.ambient_dim(it.0, it.1), &bg);
                let rel_ok = |v: &[Q]| match &int_tgt {
                    Some(t) => t.rel.contains(v),
                    None => v.iter().all(|x| *x == Q::from_integer(0.into())),
                };
                if !rel_ok(&sub_vec(&lhs, &rhs)) {
                    return Err(SseqError::CommutationFailure { r, p, q });
                }
                if !rel_ok(&lhs) || !rel_ok(&rhs) {
                    vacuous = false;
                }
            }
            cases.push(BocksteinCase { r, from: [p, q], generators: gens.len(), vacuous });
        }
    }
    let vacuous = cases.iter().filter(|c| c.vacuous).count();
    Ok(BocksteinReport { pages, checked: cases.len(), vacuous, cases })
}
