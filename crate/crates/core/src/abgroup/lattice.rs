//! Subgroups of Q^m of the form (vector subspace) + (lattice), and their quotients.
//!
//! Every subgroup that arises when turning pages is of this shape: integral
//! classes give lattices, rational classes and closed forms give subspaces,
//! and divisible U(1)-type generators are subspaces modulo a lattice.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::group::PresentedAbGroup;
use super::matrix::{hermite, integer_left_kernel, DenseSmith};
use super::rational::{
    axpy, common_denominator, is_zero_vec, left_inverse, nullspace, solve, to_q, zero_vec, QMatrix,
    Rref, Q,
};

/// `space ⊕ lattice` inside Q^dim, in canonical form: the space in reduced
/// echelon form and the lattice in Hermite form with every row reduced modulo
/// the space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiLattice {
    space: Rref,
    lattice: Vec<Vec<Q>>,
    lattice_pivots: Vec<usize>,
}

impl SemiLattice {
    pub fn new(dim: usize, space_gens: Vec<Vec<Q>>, lattice_gens: Vec<Vec<Q>>) -> Self {
        let space = Rref::from_rows(dim, space_gens);
        let reduced: Vec<Vec<Q>> = lattice_gens
            .iter()
            .map(|v| space.reduce(v))
            .filter(|v| !is_zero_vec(v))
            .collect();
        let (lattice, lattice_pivots) = lattice_basis(dim, &reduced);
        SemiLattice { space, lattice, lattice_pivots }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, Vec::new(), Vec::new())
    }

    /// Z^dim with the standard basis.
    pub fn standard_lattice(dim: usize) -> Self {
        let gens = (0..dim).map(|i| super::rational::unit_vec(dim, i)).collect();
        Self::new(dim, Vec::new(), gens)
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn space_basis(&self) -> &[Vec<Q>] {
        &self.space.rows
    }

    pub fn lattice_basis(&self) -> &[Vec<Q>] {
        &self.lattice
    }

    pub fn space_rank(&self) -> usize {
        self.space.rank()
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_zero(&self) -> bool {
        self.space.rank() == 0 && self.lattice.is_empty()
    }

    /// Integer coordinates of `v` modulo the space, in the lattice basis.
    pub fn lattice_coords(&self, v: &[Q]) -> Option<Vec<BigInt>> {
        let mut w = self.space.reduce(v);
        let mut out = Vec::with_capacity(self.lattice.len());
        for (row, &p) in self.lattice.iter().zip(&self.lattice_pivots) {
            let c = &w[p] / &row[p];
            if !c.is_integer() {
                return None;
            }
            axpy(&mut w, &-c.clone(), row);
            out.push(c.to_integer());
        }
        if is_zero_vec(&w) {
            Some(out)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.lattice_coords(v).is_some()
    }

    pub fn contains_all(&self, other: &SemiLattice) -> bool {
        other.space.rows.iter().all(|v| self.space.contains(v))
            && other.lattice.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &SemiLattice) -> SemiLattice {
        assert_eq!(self.dim(), other.dim());
        let space = self.space.rows.iter().chain(&other.space.rows).cloned().collect();
        let lat = self.lattice.iter().chain(&other.lattice).cloned().collect();
        SemiLattice::new(self.dim(), space, lat)
    }

    /// Image under the linear map `a` (target_dim x dim).
    pub fn image(&self, a: &QMatrix) -> SemiLattice {
        assert_eq!(a.cols, self.dim());
        let space = self.space.rows.iter().map(|v| a.apply(v)).collect();
        let lat = self.lattice.iter().map(|v| a.apply(v)).collect();
        SemiLattice::new(a.rows, space, lat)
    }

    /// `{s in self : a s in target}`.
    pub fn preimage(&self, a: &QMatrix, target: &SemiLattice) -> SemiLattice {
        assert_eq!(a.cols, self.dim());
        assert_eq!(a.rows, target.dim());
        let sw: Vec<Vec<Q>> = self.space.rows.iter().map(|v| a.apply(v)).collect();
        let sl: Vec<Vec<Q>> = self.lattice.iter().map(|v| a.apply(v)).collect();
        let neg = |v: &Vec<Q>| v.iter().map(|x| -x).collect::<Vec<Q>>();
        let tw: Vec<Vec<Q>> = target.space.rows.iter().map(neg).collect();
        let tl: Vec<Vec<Q>> = target.lattice.iter().map(neg).collect();
        let (na, nb) = (sw.len(), sl.len());
        let vec_cols: Vec<Vec<Q>> = sw.into_iter().chain(tw).collect();
        let lat_cols: Vec<Vec<Q>> = sl.into_iter().chain(tl).collect();
        let (kspace, klat) = mixed_kernel(a.rows, &vec_cols, &lat_cols);
        let dim = self.dim();
        let embed = |x: &[Q], n: &[Q]| {
            let mut v = zero_vec(dim);
            for (c, g) in x[..na].iter().zip(&self.space.rows) {
                axpy(&mut v, c, g);
            }
            for (c, g) in n[..nb].iter().zip(&self.lattice) {
                axpy(&mut v, c, g);
            }
            v
        };
        let zeros_lat = zero_vec(nb + target.lattice.len());
        let space: Vec<Vec<Q>> = kspace.iter().map(|x| embed(x, &zeros_lat)).collect();
        let lat: Vec<Vec<Q>> = klat.iter().map(|(x, n)| embed(x, n)).collect();
        SemiLattice::new(dim, space, lat)
    }

    pub fn intersection(&self, other: &SemiLattice) -> SemiLattice {
        self.preimage(&QMatrix::identity(self.dim()), other)
    }
}

/// Hermite basis of the lattice spanned by rational vectors.
fn lattice_basis(dim: usize, gens: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<usize>) {
    if gens.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let den = common_denominator(gens.iter().flatten());
    let den_q = Q::from_integer(den.clone());
    let ints: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|v| v.iter().map(|x| (x * &den_q).to_integer()).collect())
        .collect();
    let h = hermite(ints, dim, false);
    let rows = h
        .rows
        .iter()
        .map(|r| r.iter().map(|x| Q::new(x.clone(), den.clone())).collect())
        .collect();
    (rows, h.pivots)
}

/// Kernel of `(x, n) -> sum x_i vcols_i + sum n_j lcols_j` with x rational and n integral.
///
/// Returns a basis of the vector part `{(x, 0)}` (as x-vectors) and generators
/// `(x, n)` of a complementary lattice part.
fn mixed_kernel(m: usize, vcols: &[Vec<Q>], lcols: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<(Vec<Q>, Vec<Q>)>) {
    let kspace = nullspace(m, vcols);
    let w = Rref::from_rows(m, vcols.iter().cloned());
    let reduced: Vec<Vec<Q>> = lcols.iter().map(|c| w.reduce(c)).collect();
    let den = common_denominator(reduced.iter().flatten());
    let den_q = Q::from_integer(den);
    let ints: Vec<Vec<BigInt>> = reduced
        .iter()
        .map(|v| v.iter().map(|x| (x * &den_q).to_integer()).collect())
        .collect();
    let kernel = integer_left_kernel(&ints, m);
    let mut klat = Vec::with_capacity(kernel.len());
    for n in kernel {
        let nq = to_q(&n);
        let mut t = zero_vec(m);
        for (c, col) in nq.iter().zip(lcols) {
            axpy(&mut t, &-c.clone(), col);
        }
        let x = if vcols.is_empty() {
            debug_assert!(is_zero_vec(&t));
            Vec::new()
        } else {
            solve(m, vcols, &t).expect("lattice kernel element must land in the vector span")
        };
        klat.push((x, nq));
    }
    (kspace, klat)
}

/// Kind of a generator in a decomposed quotient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    Free,
    Torsion(BigInt),
    /// A copy of Q/Z: multiples t * gen with t taken modulo 1.
    Divisible,
    /// A copy of Q.
    Vector,
}

/// Quotient `sub / rel` of semilattices with `rel ⊆ sub`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient {
    pub sub: SemiLattice,
    pub rel: SemiLattice,
}

impl Subquotient {
    pub fn new(sub: SemiLattice, rel: SemiLattice) -> Self {
        debug_assert!(sub.contains_all(&rel), "relations must lie in the subgroup");
        Subquotient { sub, rel }
    }

    pub fn dim(&self) -> usize {
        self.sub.dim()
    }

    pub fn group(&self) -> PresentedAbGroup {
        self.decompose().group()
    }

    pub fn decompose(&self) -> Decomposition {
        Decomposition::compute(&self.sub, &self.rel)
    }
}

/// Explicit splitting of `sub / rel` into cyclic, Q/Z and Q summands.
///
/// Generators are ordered free, torsion, divisible, vector. `coords` is a
/// homomorphism from `sub` onto the coordinate group; it is only defined
/// on elements of `sub`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub kinds: Vec<GenKind>,
    pub gens: Vec<Vec<Q>>,
    dim: usize,
    // projection modulo the vector part of rel
    rel_space: Rref,
    keep: Vec<usize>,
    // the projected sub
    sub_bar: SemiLattice,
    u: Vec<Vec<BigInt>>,
    lattice_lifts: Vec<Vec<Q>>,
    nontrivial: Vec<usize>,
    div_inverse: QMatrix,
    n_div: usize,
}

impl Decomposition {
    fn compute(sub: &SemiLattice, rel: &SemiLattice) -> Decomposition {
        let dim = sub.dim();
        let rel_space = rel.space.clone();
        let keep = rel_space.free_columns();
        let k = keep.len();
        let proj = |v: &[Q]| -> Vec<Q> {
            let r = rel_space.reduce(v);
            keep.iter().map(|&c| r[c].clone()).collect()
        };
        let lift = |u: &[Q]| -> Vec<Q> {
            let mut v = zero_vec(dim);
            for (x, &c) in u.iter().zip(&keep) {
                v[c] = x.clone();
            }
            v
        };
        let sub_bar = SemiLattice::new(
            k,
            sub.space.rows.iter().map(|v| proj(v)).collect(),
            sub.lattice.iter().map(|v| proj(v)).collect(),
        );
        let rel_gens: Vec<Vec<Q>> =
            rel.lattice.iter().map(|v| proj(v)).filter(|v| !is_zero_vec(v)).collect();
        let b = sub_bar.lattice_rank();
        let nr = rel_gens.len();
        // relations in the lattice basis of sub_bar (mod its space)
        let mut rmat = vec![vec![BigInt::zero(); nr]; b];
        for (j, r) in rel_gens.iter().enumerate() {
            let c = sub_bar
                .lattice_coords(r)
                .expect("relation outside the subgroup");
            for i in 0..b {
                rmat[i][j] = c[i].clone();
            }
        }
        let snf = DenseSmith::compute(rmat, b, nr, true);
        let rank = snf.rank;
        let ell = sub_bar.lattice_basis().to_vec();
        let combo = |coeffs: &dyn Fn(usize) -> BigInt, basis: &[Vec<Q>]| -> Vec<Q> {
            let mut v = zero_vec(k);
            for (j, g) in basis.iter().enumerate() {
                let c = coeffs(j);
                if !c.is_zero() {
                    axpy(&mut v, &Q::from_integer(c), g);
                }
            }
            v
        };
        // g_i = sum_j (U^{-1})_{j i} ell_j, adjusted so that d_i g_i lies in rel
        let mut lattice_lifts = Vec::with_capacity(b);
        for i in 0..b {
            let g = combo(&|j| snf.u_inv[j][i].clone(), &ell);
            if i < rank {
                let d = Q::from_integer(snf.diag[i].clone());
                let r = combo(&|kk| snf.v[kk][i].clone(), &rel_gens);
                let mut w = g.iter().map(|x| x * &d).collect::<Vec<Q>>();
                axpy(&mut w, &-Q::one(), &r);
                let mut gp = g;
                axpy(&mut gp, &-(Q::one() / d), &w);
                lattice_lifts.push(gp);
            } else {
                lattice_lifts.push(g);
            }
        }
        // divisible part: rel ∩ space(sub), then a complement inside space(sub)
        let r0: Vec<Vec<Q>> =
            (rank..nr).map(|i| combo(&|kk| snf.v[kk][i].clone(), &rel_gens)).collect();
        let mut span = Rref::from_rows(k, r0.iter().cloned());
        let mut vecs = Vec::new();
        for v in sub_bar.space_basis() {
            if span.insert(v.clone()) {
                vecs.push(v.clone());
            }
        }
        let n_div = r0.len();
        let basis: Vec<Vec<Q>> = r0.iter().chain(&vecs).cloned().collect();
        let div_inverse = left_inverse(k, &basis);

        let mut kinds = Vec::new();
        let mut gens = Vec::new();
        let mut nontrivial = Vec::new();
        for i in rank..b {
            kinds.push(GenKind::Free);
            gens.push(lift(&lattice_lifts[i]));
            nontrivial.push(i);
        }
        for i in 0..rank {
            if !snf.diag[i].is_one() {
                kinds.push(GenKind::Torsion(snf.diag[i].clone()));
                gens.push(lift(&lattice_lifts[i]));
                nontrivial.push(i);
            }
        }
        for v in &r0 {
            kinds.push(GenKind::Divisible);
            gens.push(lift(v));
        }
        for v in &vecs {
            kinds.push(GenKind::Vector);
            gens.push(lift(v));
        }
        Decomposition {
            kinds,
            gens,
            dim,
            rel_space,
            keep,
            sub_bar,
            u: snf.u,
            lattice_lifts,
            nontrivial,
            div_inverse,
            n_div,
        }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn group(&self) -> PresentedAbGroup {
        let mut free = 0;
        let mut torsion = Vec::new();
        let mut div = 0;
        let mut vec = 0;
        for k in &self.kinds {
            match k {
                GenKind::Free => free += 1,
                GenKind::Torsion(d) => torsion.push(d.clone()),
                GenKind::Divisible => div += 1,
                GenKind::Vector => vec += 1,
            }
        }
        PresentedAbGroup::with_all(free, torsion, div, vec)
    }

    fn project(&self, v: &[Q]) -> Vec<Q> {
        let r = self.rel_space.reduce(v);
        self.keep.iter().map(|&c| r[c].clone()).collect()
    }

    /// Normalized coordinates of an element of `sub`: torsion coordinates in
    /// `[0, d)`, divisible coordinates in `[0, 1)`. `None` if `v` is not in `sub`.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(v.len(), self.dim);
        let vb = self.project(v);
        let n = self.sub_bar.lattice_coords(&vb)?;
        let b = n.len();
        let y: Vec<BigInt> = (0..b)
            .map(|i| (0..b).map(|j| &self.u[i][j] * &n[j]).sum())
            .collect();
        let mut rem = vb;
        for i in 0..b {
            if !y[i].is_zero() {
                axpy(&mut rem, &-Q::from_integer(y[i].clone()), &self.lattice_lifts[i]);
            }
        }
        let st = self.div_inverse.apply(&rem);
        let mut out = Vec::with_capacity(self.len());
        let mut idx = 0;
        for kind in &self.kinds {
            match kind {
                GenKind::Free => out.push(Q::from_integer(y[self.nontrivial[idx]].clone())),
                GenKind::Torsion(d) => {
                    let yi = &y[self.nontrivial[idx]];
                    out.push(Q::from_integer(modulo(yi, d)));
                }
                _ => {}
            }
            idx += 1;
        }
        for (j, t) in st.iter().enumerate() {
            if j < self.n_div {
                out.push(frac_part(t));
            } else {
                out.push(t.clone());
            }
        }
        debug_assert_eq!(out.len(), self.len());
        Some(out)
    }

    /// Representative in Q^dim of the element with the given coordinates.
    pub fn lift(&self, coords: &[Q]) -> Vec<Q> {
        assert_eq!(coords.len(), self.len());
        let mut v = zero_vec(self.dim);
        for (c, g) in coords.iter().zip(&self.gens) {
            axpy(&mut v, c, g);
        }
        v
    }

    /// Whether two coordinate vectors name the same element.
    pub fn coords_equal(&self, a: &[Q], b: &[Q]) -> bool {
        self.normalize(a) == self.normalize(b)
    }

    pub fn normalize(&self, c: &[Q]) -> Vec<Q> {
        c.iter()
            .zip(&self.kinds)
            .map(|(x, k)| match k {
                GenKind::Torsion(d) => {
                    assert!(x.is_integer());
                    Q::from_integer(modulo(&x.to_integer(), d))
                }
                GenKind::Divisible => frac_part(x),
                _ => x.clone(),
            })
            .collect()
    }

    pub fn is_zero_class(&self, v: &[Q]) -> Option<bool> {
        self.coords(v).map(|c| c.iter().all(|x| x.is_zero()))
    }
}

pub fn modulo(a: &BigInt, d: &BigInt) -> BigInt {
    let r = a % d;
    if r.is_negative() {
        r + d
    } else {
        r
    }
}

pub fn frac_part(x: &BigRational) -> BigRational {
    x - x.floor()
}
