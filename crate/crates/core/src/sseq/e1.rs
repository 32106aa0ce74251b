//! The cochain-level first page for theories with constant coefficient rows.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use super::{RowKind, SseqError, TheorySpec};
use crate::abgroup::rational::{unit_vec, QMatrix, Q};
use crate::abgroup::{CoefficientTag, PresentedAbGroup, SemiLattice, Subquotient};
use crate::simpcomplex::SimplicialComplex;

/// `E_1^{p,q} = C^p(X; h^q)` with `d_1 = δ`.
#[derive(Clone, Debug)]
pub struct E1Page {
    pub theory: String,
    pub entries: BTreeMap<(i64, i64), PresentedAbGroup>,
    rows: BTreeMap<i64, CoefficientTag>,
    space: Arc<SimplicialComplex>,
    memo: Arc<Mutex<HashMap<(usize, CoefficientTag), PresentedAbGroup>>>,
}

fn cochain_group(n: usize, tag: CoefficientTag) -> PresentedAbGroup {
    match tag {
        CoefficientTag::IntZ => PresentedAbGroup::free(n),
        CoefficientTag::ModP(p) => PresentedAbGroup::new(0, vec![BigInt::from(p); n]),
        CoefficientTag::Rational => PresentedAbGroup::with_all(0, vec![], 0, n),
        CoefficientTag::QmodZ => PresentedAbGroup::with_all(0, vec![], n, 0),
    }
}

fn cochain_lattices(n: usize, tag: CoefficientTag) -> (SemiLattice, SemiLattice) {
    let units: Vec<Vec<Q>> = (0..n).map(|i| unit_vec(n, i)).collect();
    match tag {
        CoefficientTag::IntZ => (SemiLattice::new(n, vec![], units), SemiLattice::zero(n)),
        CoefficientTag::ModP(p) => {
            let pq = Q::from_integer(BigInt::from(p));
            let rel = units.iter().map(|u| u.iter().map(|x| x * &pq).collect()).collect();
            (SemiLattice::new(n, vec![], units), SemiLattice::new(n, vec![], rel))
        }
        CoefficientTag::Rational => (SemiLattice::new(n, units, vec![]), SemiLattice::zero(n)),
        CoefficientTag::QmodZ => (SemiLattice::new(n, units.clone(), vec![]), SemiLattice::new(n, vec![], units)),
    }
}

/// Matrix of `δ: C^p → C^{p+1}`.
pub fn coboundary_matrix(x: &SimplicialComplex, p: usize) -> QMatrix {
    let (rows, cols) = (x.count(p + 1), x.count(p));
    let mut m = QMatrix::zeros(rows, cols);
    if p < x.dim() {
        for s in 0..rows {
            for (i, &f) in x.faces(p + 1, s).iter().enumerate() {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                m.data[s][f] += Q::from_integer(BigInt::from(sign));
            }
        }
    }
    m
}

pub fn e1_page(x: &Arc<SimplicialComplex>, t: &TheorySpec) -> Result<E1Page, SseqError> {
    let mut rows = BTreeMap::new();
    for q in t.rows_in_window(x.dim()) {
        for kind in t.row_kinds(q) {
            match kind {
                RowKind::Constant(tag) => {
                    rows.insert(q, *tag);
                }
                RowKind::Forms { .. } => return Err(SseqError::FormsRowAtE1(t.id.clone())),
            }
        }
    }
    let mut entries = BTreeMap::new();
    for (&q, &tag) in &rows {
        for p in 0..=x.dim() {
            let g = cochain_group(x.count(p), tag);
            if !g.is_zero() {
                entries.insert((p as i64, q), g);
            }
        }
    }
    Ok(E1Page { theory: t.id.clone(), entries, rows, space: x.clone(), memo: Arc::default() })
}

impl E1Page {
    pub fn row_tag(&self, q: i64) -> Option<CoefficientTag> {
        self.rows.get(&q).copied()
    }

    /// `d_1` out of `(p, q)`.
    pub fn d1(&self, p: usize) -> QMatrix {
        coboundary_matrix(&self.space, p)
    }

    /// `E_2^{p,q}` as the homology of `d_1`.
    pub fn homology(&self, p: usize, q: i64) -> PresentedAbGroup {
        let Some(tag) = self.row_tag(q) else { return PresentedAbGroup::zero() };
        if let Some(g) = self.memo.lock().expect("memo").get(&(p, tag)) {
            return g.clone();
        }
        let x = &self.space;
        let n = x.count(p);
        let (sub, rel) = cochain_lattices(n, tag);
        let cycles = if p < x.dim() {
            let (_, rel_next) = cochain_lattices(x.count(p + 1), tag);
            sub.preimage(&self.d1(p), &rel_next)
        } else {
            sub
        };
        let boundaries = if p > 0 {
            let (sub_prev, _) = cochain_lattices(x.count(p - 1), tag);
            rel.sum(&sub_prev.image(&self.d1(p - 1)))
        } else {
            rel
        };
        let g = Subquotient::new(cycles, boundaries).group();
        self.memo.lock().expect("memo").insert((p, tag), g.clone());
        g
    }
}
