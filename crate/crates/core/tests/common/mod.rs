//! Brute-force oracles shared by the integration tests. None of this calls
//! into the library's algebra; only the simplex lists are read.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use ahss_core::abgroup::PresentedAbGroup;
use ahss_core::simpcomplex::SimplicialComplex;

// ---------------------------------------------------------------------------
// integral (co)homology by dense elimination

fn boundary_dense(x: &SimplicialComplex, k: usize) -> Vec<Vec<BigInt>> {
    let rows = x.count(k - 1);
    let mut m = vec![vec![BigInt::zero(); x.count(k)]; rows];
    for (j, s) in x.simplices(k).iter().enumerate() {
        for i in 0..s.len() {
            let face: Vec<usize> = s.iter().enumerate().filter(|&(t, _)| t != i).map(|(_, &v)| v).collect();
            let r = x.simplices(k - 1).iter().position(|f| *f == face).expect("face");
            m[r][j] += if i % 2 == 0 { 1 } else { -1 };
        }
    }
    m
}

/// Invariant factors (with 1s) of an integer matrix, by gcd-pivoted elimination.
pub fn invariant_factors(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    loop {
        if t >= rows || t >= cols {
            break;
        }
        let mut pivot = None;
        for j in t..cols {
            if let Some(i) = (t..rows).find(|&i| !a[i][j].is_zero()) {
                pivot = Some((i, j));
                break;
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        // |a[t][t]| only shrinks, strictly on every swap
        loop {
            for i in t + 1..rows {
                while !a[i][t].is_zero() {
                    let q = &a[i][t] / &a[t][t];
                    for j in t..cols {
                        let v = &q * &a[t][j];
                        a[i][j] -= v;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                    }
                }
            }
            let mut swapped = false;
            for j in t + 1..cols {
                while !a[t][j].is_zero() {
                    let q = &a[t][j] / &a[t][t];
                    for i in t..rows {
                        let v = &q * &a[i][t];
                        a[i][j] -= v;
                    }
                    if !a[t][j].is_zero() {
                        for r in a.iter_mut() {
                            r.swap(t, j);
                        }
                        swapped = true;
                    }
                }
            }
            if !swapped {
                break;
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    // diagonal to Smith form via pairwise gcd/lcm
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            let g = num_integer::Integer::gcd(&out[i], &out[j]);
            if !g.is_zero() {
                let l = &out[i] / &g * &out[j];
                out[i] = g;
                out[j] = l;
            }
        }
    }
    out
}

pub struct IntHomology {
    pub betti: Vec<usize>,
    /// torsion of `H_k`
    pub torsion: Vec<Vec<BigInt>>,
}

pub fn integral_homology(x: &SimplicialComplex) -> IntHomology {
    let d = x.dim();
    let mut rank = vec![0usize; d + 2];
    let mut torsion = vec![Vec::new(); d + 1];
    for k in 1..=d {
        let f = invariant_factors(boundary_dense(x, k));
        rank[k] = f.len();
        torsion[k - 1] = f.into_iter().filter(|v| !v.is_one()).collect();
    }
    let betti = (0..=d).map(|k| x.count(k) - rank[k] - rank[k + 1]).collect();
    IntHomology { betti, torsion }
}

/// `H^k(X; Z)` by universal coefficients.
pub fn h_int(h: &IntHomology, k: usize) -> PresentedAbGroup {
    let t = if k == 0 { Vec::new() } else { h.torsion[k - 1].clone() };
    PresentedAbGroup::new(h.betti[k], t)
}

/// `H^k(X; Z/p)` for a prime `p`.
pub fn h_mod(h: &IntHomology, k: usize, p: u32) -> PresentedAbGroup {
    let div = |v: &Vec<BigInt>| v.iter().filter(|t| (*t % p).is_zero()).count();
    let n = h.betti[k] + div(&h.torsion[k]) + if k == 0 { 0 } else { div(&h.torsion[k - 1]) };
    PresentedAbGroup::new(0, vec![BigInt::from(p); n])
}

/// `H^k(X; Q/Z) = Hom(H_k, Q/Z)`.
pub fn h_qz(h: &IntHomology, k: usize) -> PresentedAbGroup {
    PresentedAbGroup::with_all(0, h.torsion[k].clone(), h.betti[k], 0)
}

pub fn betti_q(h: &IntHomology, k: usize) -> usize {
    h.betti.get(k).copied().unwrap_or(0)
}

// ---------------------------------------------------------------------------
// rational rank

pub fn rank_q(rows: &[Vec<i64>], cols: usize) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        let inv = a[rank][c].recip();
        for j in c..cols {
            a[rank][j] = &a[rank][j] * &inv;
        }
        for i in 0..a.len() {
            if i != rank && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let v = &f * &a[rank][j];
                    a[i][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// Steenrod algebra acting on x_1 ... x_m in F_2[x_1, ..., x_m]
//
// Every polynomial reached from x_1...x_m is symmetric with exponents powers of
// two, so it is a set of monomial symmetric functions, each recorded by the
// number of variables carrying exponent 2^j.

pub type SymPoly = BTreeSet<Vec<usize>>;

fn trim(mut v: Vec<usize>) -> Vec<usize> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn binom_odd(n: usize, k: usize) -> bool {
    k <= n && (k & !n) == 0
}

fn sq_type(k: usize, lam: &[usize], out: &mut SymPoly) {
    // t[j] variables doubled from 2^j to 2^{j+1}
    fn rec(j: usize, k: usize, lam: &[usize], t: &mut Vec<usize>, out: &mut SymPoly) {
        if j == lam.len() {
            if k != 0 {
                return;
            }
            let mut mu = vec![0; lam.len() + 1];
            for i in 0..lam.len() {
                mu[i] += lam[i] - t[i];
                mu[i + 1] += t[i];
            }
            let odd = (0..lam.len()).all(|i| binom_odd(mu[i + 1], t[i]));
            if odd {
                let mu = trim(mu);
                if !out.remove(&mu) {
                    out.insert(mu);
                }
            }
            return;
        }
        let w = 1usize << j;
        for tj in 0..=lam[j] {
            if tj * w > k {
                break;
            }
            t.push(tj);
            rec(j + 1, k - tj * w, lam, t, out);
            t.pop();
        }
    }
    rec(0, k, lam, &mut Vec::new(), out);
}

pub fn sq_poly(k: usize, f: &SymPoly) -> SymPoly {
    let mut out = SymPoly::new();
    for lam in f {
        let mut part = SymPoly::new();
        sq_type(k, lam, &mut part);
        for m in part {
            if !out.remove(&m) {
                out.insert(m);
            }
        }
    }
    out
}

/// `Sq^{i_1} ... Sq^{i_r}(x_1 ... x_m)`.
pub fn act(monomial: &[u32], m: usize) -> SymPoly {
    let mut f = SymPoly::from([vec![m]]);
    for &i in monomial.iter().rev() {
        f = sq_poly(i as usize, &f);
    }
    f
}

pub fn act_sum<'a>(terms: impl IntoIterator<Item = &'a Vec<u32>>, m: usize) -> SymPoly {
    let mut out = SymPoly::new();
    for t in terms {
        for x in act(t, m) {
            if !out.remove(&x) {
                out.insert(x);
            }
        }
    }
    out
}

/// Admissible sequences of total degree `d`, enumerated directly.
pub fn admissible(d: u32) -> Vec<Vec<u32>> {
    fn rec(rem: u32, next_max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        // the next (rightward) entry is at most half the previous
        for i in (1..=rem.min(next_max)).rev() {
            cur.push(i);
            rec(rem - i, i / 2, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// Solves `target = Σ c_i images[i]` over F_2; `None` if not in the span.
pub fn f2_solve(images: &[SymPoly], target: &SymPoly) -> Option<Vec<bool>> {
    let mut index: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
    for p in images.iter().chain(std::iter::once(target)) {
        for m in p {
            let n = index.len();
            index.entry(m).or_insert(n);
        }
    }
    let n = images.len();
    let dim = index.len();
    // augmented columns: rows are basis monomials, columns are images + target
    let mut rows: Vec<Vec<bool>> = vec![vec![false; n + 1]; dim];
    for (c, p) in images.iter().enumerate() {
        for m in p {
            rows[index[m]][c] = true;
        }
    }
    for m in target {
        rows[index[m]][n] = true;
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..dim).find(|&i| rows[i][c]) else { continue };
        rows.swap(r, p);
        for i in 0..dim {
            if i != r && rows[i][c] {
                let pivot = rows[r].clone();
                for (a, b) in rows[i].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..dim).any(|i| rows[i][n]) {
        return None;
    }
    let mut sol = vec![false; n];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = rows[i][n];
    }
    Some(sol)
}

pub fn f2_independent(images: &[SymPoly]) -> bool {
    let n = images.len();
    (0..n).all(|i| {
        let rest: Vec<SymPoly> = images.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
        f2_solve(&rest, &images[i]).is_none()
    })
}

// ---------------------------------------------------------------------------
// barycentric subdivision and dual blocks

/// Face poset element: (dimension, index).
pub type Cell = (usize, usize);

pub struct Subdivision {
    /// simplices of sd X by dimension, each a chain of cells of increasing dimension
    pub simplices: Vec<Vec<Vec<Cell>>>,
    index: Vec<BTreeMap<Vec<Cell>, usize>>,
    /// vertex sets of the cells
    verts: BTreeMap<Cell, BTreeSet<usize>>,
}

impl Subdivision {
    pub fn new(x: &SimplicialComplex) -> Self {
        let mut verts = BTreeMap::new();
        for k in 0..=x.dim() {
            for (i, s) in x.simplices(k).iter().enumerate() {
                verts.insert((k, i), s.iter().copied().collect::<BTreeSet<_>>());
            }
        }
        let cells: Vec<Cell> = verts.keys().copied().collect();
        let mut simplices: Vec<Vec<Vec<Cell>>> = vec![cells.iter().map(|&c| vec![c]).collect()];
        loop {
            let mut next = Vec::new();
            for chain in simplices.last().unwrap() {
                let top = *chain.last().unwrap();
                for &c in &cells {
                    if c.0 > top.0 && verts[&top].is_subset(&verts[&c]) {
                        let mut ch = chain.clone();
                        ch.push(c);
                        next.push(ch);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            simplices.push(next);
        }
        let index = simplices
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Subdivision { simplices, index, verts }
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |l| l.len())
    }

    /// Whether every cell of the chain contains `sigma`.
    pub fn in_block(&self, chain: &[Cell], sigma: Cell) -> bool {
        chain.iter().all(|c| self.verts[&sigma].is_subset(&self.verts[c]))
    }

    /// Indices of the `k`-simplices of the dual block `D(sigma)`.
    pub fn block(&self, sigma: Cell, k: usize) -> Vec<usize> {
        match self.simplices.get(k) {
            Some(l) => (0..l.len()).filter(|&i| self.in_block(&l[i], sigma)).collect(),
            None => Vec::new(),
        }
    }

    /// Coboundary `C^k(D) -> C^{k+1}(D)` as dense rows, in the block's local indices.
    pub fn block_coboundary(&self, sigma: Cell, k: usize) -> Vec<Vec<i64>> {
        let src = self.block(sigma, k);
        let tgt = self.block(sigma, k + 1);
        let local: BTreeMap<usize, usize> = src.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        tgt.iter()
            .map(|&t| {
                let mut row = vec![0i64; src.len()];
                let chain = &self.simplices[k + 1][t];
                for i in 0..chain.len() {
                    let mut face = chain.clone();
                    face.remove(i);
                    let g = self.index[k][&face];
                    row[local[&g]] += if i % 2 == 0 { 1 } else { -1 };
                }
                row
            })
            .collect()
    }
}

/// `dim Ȟ^p` of the presheaf of closed `k`-cochains on the dual-block cover of
/// `X`, for `p` from 0 to `dim X`.
pub fn dual_block_cech_dims(x: &SimplicialComplex, k: usize) -> Vec<usize> {
    let sd = Subdivision::new(x);
    let d = x.dim();
    // column offsets of C^p = ⊕_{σ ∈ X_p} C^k(D(σ))
    let blocks: Vec<Vec<Vec<usize>>> =
        (0..=d).map(|p| (0..x.count(p)).map(|i| sd.block((p, i), k)).collect()).collect();
    let offsets = |p: usize| -> Vec<usize> {
        let mut o = vec![0];
        for b in &blocks[p] {
            o.push(o.last().unwrap() + b.len());
        }
        o
    };
    // blockwise coboundary D_p and Čech differential Δ_p
    let local_d = |p: usize| -> (Vec<Vec<i64>>, usize) {
        let off = offsets(p);
        let cols = *off.last().unwrap();
        let mut rows = Vec::new();
        for i in 0..x.count(p) {
            for r in sd.block_coboundary((p, i), k) {
                let mut full = vec![0i64; cols];
                full[off[i]..off[i + 1]].copy_from_slice(&r);
                rows.push(full);
            }
        }
        (rows, cols)
    };
    let cech = |p: usize| -> Vec<Vec<i64>> {
        let src = offsets(p);
        let cols = *src.last().unwrap();
        let mut rows = Vec::new();
        if p == d {
            return rows;
        }
        for (ti, tau) in x.simplices(p + 1).iter().enumerate() {
            for &g in &blocks[p + 1][ti] {
                let mut row = vec![0i64; cols];
                for i in 0..tau.len() {
                    let face: Vec<usize> = tau.iter().enumerate().filter(|&(t, _)| t != i).map(|(_, &v)| v).collect();
                    let fi = x.simplices(p).iter().position(|f| *f == face).expect("face");
                    let pos = blocks[p][fi].iter().position(|&h| h == g).expect("restriction");
                    row[src[fi] + pos] += if i % 2 == 0 { 1 } else { -1 };
                }
                rows.push(row);
            }
        }
        rows
    };
    let mut stacked_rank = Vec::new();
    let mut d_rank = Vec::new();
    let mut dims = Vec::new();
    for p in 0..=d {
        let (dr, cols) = local_d(p);
        let mut st = dr.clone();
        st.extend(cech(p));
        stacked_rank.push(rank_q(&st, cols));
        d_rank.push(rank_q(&dr, cols));
        dims.push(cols);
    }
    (0..=d)
        .map(|p| {
            let kernel = dims[p] - stacked_rank[p];
            let image = if p == 0 { 0 } else { stacked_rank[p - 1] - d_rank[p - 1] };
            kernel - image
        })
        .collect()
}
