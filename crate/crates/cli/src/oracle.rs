//! Brute-force cohomology by dense elimination of boundary matrices and the
//! universal coefficient theorem. Shares nothing with the library's lattice code.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use ahss_core::abgroup::PresentedAbGroup;
use ahss_core::simpcomplex::SimplicialComplex;

fn boundary(x: &SimplicialComplex, k: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); x.count(k)]; x.count(k - 1)];
    for (j, s) in x.simplices(k).iter().enumerate() {
        for i in 0..s.len() {
            let mut face = s.clone();
            face.remove(i);
            let row = x.index_of(&face).expect("faces are present");
            m[row][j] += if i % 2 == 0 { 1 } else { -1 };
        }
    }
    m
}

/// Diagonal entries left after unimodular row and column elimination.
fn diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = &a[i][t] / &a[t][t];
            if !q.is_zero() {
                for j in t..cols {
                    let v = &q * &a[t][j];
                    a[i][j] -= v;
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..cols {
            let q = &a[t][j] / &a[t][t];
            if !q.is_zero() {
                for i in t..rows {
                    let v = &q * &a[i][t];
                    a[i][j] -= v;
                }
            }
            clean &= a[t][j].is_zero();
        }
        if clean {
            diag.push(a[t][t].abs());
            t += 1;
        }
    }
    diag
}

/// Betti numbers and torsion coefficients of integral homology.
pub struct Homology {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<BigInt>>,
}

pub fn homology(x: &SimplicialComplex) -> Homology {
    let d = x.dim();
    let mut ranks = vec![0usize; d + 2];
    let mut tors = vec![Vec::new(); d + 2];
    for k in 1..=d {
        let diag = diagonal(boundary(x, k));
        ranks[k] = diag.len();
        tors[k - 1] = diag.into_iter().filter(|v| *v > BigInt::from(1)).collect();
    }
    let betti = (0..=d).map(|k| x.count(k) - ranks[k] - ranks[k + 1]).collect();
    tors.truncate(d + 1);
    Homology { betti, torsion: tors }
}

pub fn integral(h: &Homology, k: usize) -> PresentedAbGroup {
    let t = if k > 0 { h.torsion[k - 1].clone() } else { vec![] };
    PresentedAbGroup::new(h.betti[k], t)
}

pub fn mod2(h: &Homology, k: usize) -> PresentedAbGroup {
    let even = |v: &Vec<BigInt>| v.iter().filter(|d| (*d % 2u32).is_zero()).count();
    let n = h.betti[k] + even(&h.torsion[k]) + if k > 0 { even(&h.torsion[k - 1]) } else { 0 };
    PresentedAbGroup::new(0, vec![BigInt::from(2); n])
}

pub fn qmodz(h: &Homology, k: usize) -> PresentedAbGroup {
    PresentedAbGroup::with_all(0, h.torsion[k].clone(), h.betti[k], 0)
}
