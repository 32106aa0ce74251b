//! Cohomology groups with explicit generators and coordinate maps.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::fp::{nullspace_mod, FpEchelon};
use super::{coboundary, is_cocycle, Cochain, CochainError, CoefficientTag};
use crate::abgroup::rational::{left_inverse, nullspace, QMatrix, Q};
use crate::abgroup::{frac_part, integer_left_kernel, modulo, DenseSmith, GenKind, PresentedAbGroup};
use crate::simpcomplex::SimplicialComplex;

/// Smith form of the coboundary `δ_k : C^k -> C^{k+1}`.
#[derive(Debug)]
pub(crate) struct CoboundarySnf {
    pub rank: usize,
    pub diag: Vec<BigInt>,
    pub u: Vec<Vec<BigInt>>,
    pub u_inv: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

fn coboundary_dense(x: &SimplicialComplex, k: usize) -> Vec<Vec<BigInt>> {
    let rows = x.count(k + 1);
    let cols = x.count(k);
    let mut m = vec![vec![BigInt::zero(); cols]; rows];
    for (s, row) in m.iter_mut().enumerate() {
        for (i, &f) in x.faces(k + 1, s).iter().enumerate() {
            row[f] = BigInt::from(if i % 2 == 0 { 1 } else { -1 });
        }
    }
    m
}

fn compute_snf(x: &SimplicialComplex, k: usize) -> CoboundarySnf {
    let rows = x.count(k + 1);
    let cols = x.count(k);
    let s = DenseSmith::compute(coboundary_dense(x, k), rows, cols, true);
    CoboundarySnf { rank: s.rank, diag: s.diag, u: s.u, u_inv: s.u_inv, v: s.v }
}

fn identity_snf(n: usize) -> CoboundarySnf {
    let id = crate::abgroup::matrix_identity(n);
    CoboundarySnf { rank: 0, diag: Vec::new(), u: id.clone(), u_inv: id.clone(), v: id }
}

/// Basis of the closed rational cochains `Z^k(X; Q)` with a coordinate map.
#[derive(Debug)]
pub struct ClosedCochains {
    pub basis: Vec<Vec<Q>>,
    left_inv: QMatrix,
}

impl ClosedCochains {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a closed rational cochain (caller checks closedness).
    pub fn coords(&self, values: &[Q]) -> Vec<Q> {
        self.left_inv.apply(values)
    }
}

pub fn closed_cochain_basis(x: &SimplicialComplex, k: usize) -> ClosedCochains {
    let n = x.count(k);
    let m = x.count(k + 1);
    let dense = coboundary_dense(x, k);
    let cols: Vec<Vec<Q>> = (0..n)
        .map(|j| (0..m).map(|i| Q::from_integer(dense[i][j].clone())).collect())
        .collect();
    let basis = nullspace(m, &cols);
    let left_inv = left_inverse(n, &basis);
    ClosedCochains { basis, left_inv }
}

#[derive(Debug)]
enum Coords {
    Zero,
    Int {
        prev: Arc<CoboundarySnf>,
        torsion: Vec<usize>,
        free_inv: QMatrix,
    },
    Rational {
        prev: Arc<CoboundarySnf>,
        free_inv: QMatrix,
    },
    QmodZ {
        next: Arc<CoboundarySnf>,
        torsion: Vec<usize>,
        t_lifts: Vec<Vec<Q>>,
        prev: Arc<CoboundarySnf>,
        free_inv: QMatrix,
    },
    ModP {
        p: u64,
        echelon: FpEchelon,
    },
}

/// `H^k(X; tag)` with chosen generators.
///
/// Generators are listed free, torsion, divisible, vector (the order of
/// [`GenKind`]); each comes with a cochain-level lift, and `coords` maps any
/// cocycle to normalized coordinates.
#[derive(Debug)]
pub struct CohomologyGroup {
    space: Arc<SimplicialComplex>,
    degree: usize,
    tag: CoefficientTag,
    group: PresentedAbGroup,
    kinds: Vec<GenKind>,
    gen_lifts: Vec<Vec<Q>>,
    coords: Coords,
}

/// A cohomology class: coordinates plus a representative cocycle.
#[derive(Clone, Debug)]
pub struct CohomologyClass {
    pub group: Arc<CohomologyGroup>,
    pub coords: Vec<Q>,
    pub representative: Cochain,
}

impl CohomologyClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

impl CohomologyGroup {
    pub fn space(&self) -> &Arc<SimplicialComplex> {
        &self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn tag(&self) -> CoefficientTag {
        self.tag
    }

    pub fn group(&self) -> &PresentedAbGroup {
        &self.group
    }

    pub fn kinds(&self) -> &[GenKind] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    /// Cochain-level lift of generator `i`: integral values for `IntZ`,
    /// residues for `ModP`, rationals otherwise. For a divisible `Q/Z`
    /// generator this is an integral cocycle `z`, standing for the classes `t z`.
    pub fn generator_lift(&self, i: usize) -> &[Q] {
        &self.gen_lifts[i]
    }

    /// Representative cocycle of generator `i` (for divisible generators,
    /// the element with coordinate 1/2 is not canonical, so this returns the
    /// class with coordinate 1, i.e. zero; use `lift` instead).
    pub fn generator(&self, i: usize) -> Cochain {
        let mut c = vec![Q::zero(); self.len()];
        c[i] = Q::one();
        self.lift(&c)
    }

    /// Cocycle with the given coordinates.
    pub fn lift(&self, coords: &[Q]) -> Cochain {
        assert_eq!(coords.len(), self.len());
        Cochain::new(self.space.clone(), self.degree, self.tag, self.lift_values(coords))
            .expect("lifted values fit the coefficient domain")
    }

    /// Unnormalized rational values of the lift.
    pub fn lift_values(&self, coords: &[Q]) -> Vec<Q> {
        let n = self.space.count(self.degree);
        let mut v = vec![Q::zero(); n];
        for (c, g) in coords.iter().zip(&self.gen_lifts) {
            if c.is_zero() {
                continue;
            }
            for (vi, gi) in v.iter_mut().zip(g) {
                if !gi.is_zero() {
                    *vi += c * gi;
                }
            }
        }
        v
    }

    pub fn normalize(&self, coords: &[Q]) -> Vec<Q> {
        coords
            .iter()
            .zip(&self.kinds)
            .map(|(x, k)| match k {
                GenKind::Torsion(d) => Q::from_integer(modulo(&x.to_integer(), d)),
                GenKind::Divisible => frac_part(x),
                _ => x.clone(),
            })
            .collect()
    }

    pub fn class_of(self: &Arc<Self>, c: &Cochain) -> Result<CohomologyClass, CochainError> {
        let coords = self.coords(c)?;
        Ok(CohomologyClass { group: self.clone(), coords, representative: c.clone() })
    }

    /// Normalized coordinates of a cocycle with this group's tag and degree.
    pub fn coords(&self, c: &Cochain) -> Result<Vec<Q>, CochainError> {
        if c.tag() != self.tag {
            return Err(CochainError::TagMismatch(format!("class of a {} cochain in {} cohomology", c.tag(), self.tag)));
        }
        if c.degree() != self.degree {
            return Err(CochainError::DegreeMismatch { expected: self.degree, got: c.degree() });
        }
        if !is_cocycle(c) {
            return Err(CochainError::NotCocycle(c.degree()));
        }
        Ok(self.coords_unchecked(c.values()))
    }

    /// Coordinates from cocycle values, without validation. For `Q/Z` the
    /// values may be any rational lift.
    pub fn coords_unchecked(&self, values: &[Q]) -> Vec<Q> {
        self.normalize(&self.coords_raw(values))
    }

    /// Coordinates before reduction modulo torsion orders and Z. On rational
    /// lifts of `Q/Z` cocycles this is Q-linear in the lift.
    pub fn coords_raw(&self, values: &[Q]) -> Vec<Q> {
        match &self.coords {
            Coords::Zero => Vec::new(),
            Coords::Int { prev, torsion, free_inv } => {
                let r = prev.rank;
                let y = mat_vec(&prev.u, values);
                let mut out: Vec<Q> = free_inv.apply(&y[r..]);
                for &i in torsion {
                    out.push(Q::from_integer(y[i].to_integer()));
                }
                out
            }
            Coords::Rational { prev, free_inv } => {
                let y = mat_vec(&prev.u, values);
                free_inv.apply(&y[prev.rank..])
            }
            Coords::QmodZ { next, torsion, t_lifts, prev, free_inv } => {
                let lifted = Cochain::new(self.space.clone(), self.degree, CoefficientTag::Rational, values.to_vec())
                    .expect("rational lift");
                let d = coboundary(&lifted);
                let y = mat_vec(&next.u, d.values());
                let mut rem = values.to_vec();
                for i in 0..next.rank {
                    if y[i].is_zero() {
                        continue;
                    }
                    for (r, t) in rem.iter_mut().zip(&t_lifts[i]) {
                        if !t.is_zero() {
                            *r -= &y[i] * t;
                        }
                    }
                }
                let mut out = Vec::new();
                for &i in torsion {
                    out.push(Q::from_integer(y[i].to_integer()));
                }
                let yr = mat_vec(&prev.u, &rem);
                out.extend(free_inv.apply(&yr[prev.rank..]));
                out
            }
            Coords::ModP { p, echelon } => {
                let mut v: Vec<u64> = values
                    .iter()
                    .map(|x| x.to_integer().to_u64().expect("residue") % p)
                    .collect();
                let t = echelon.reduce(&mut v);
                debug_assert!(v.iter().all(|&x| x == 0), "cocycle outside Z^k");
                t.into_iter().map(|x| Q::from_integer(BigInt::from(x))).collect()
            }
        }
    }

    pub fn is_zero_class(&self, c: &Cochain) -> Result<bool, CochainError> {
        Ok(self.coords(c)?.iter().all(|x| x.is_zero()))
    }
}

fn mat_vec(m: &[Vec<BigInt>], v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|row| {
            let mut s = Q::zero();
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    s += b * Q::from_integer(a.clone());
                }
            }
            s
        })
        .collect()
}

/// Per-space cache of coboundary Smith forms and cohomology groups.
///
/// Reads are concurrent; a missing entry is computed outside the lock and the
/// first registered value wins, so results do not depend on scheduling.
#[derive(Debug)]
pub struct CohomologyCache {
    space: Arc<SimplicialComplex>,
    snfs: RwLock<HashMap<usize, Arc<CoboundarySnf>>>,
    groups: RwLock<HashMap<(usize, CoefficientTag), Arc<CohomologyGroup>>>,
    closed: RwLock<HashMap<usize, Arc<ClosedCochains>>>,
}

impl CohomologyCache {
    pub fn new(space: Arc<SimplicialComplex>) -> Self {
        CohomologyCache {
            space,
            snfs: RwLock::new(HashMap::new()),
            groups: RwLock::new(HashMap::new()),
            closed: RwLock::new(HashMap::new()),
        }
    }

    pub fn space(&self) -> &Arc<SimplicialComplex> {
        &self.space
    }

    fn snf(&self, k: usize) -> Arc<CoboundarySnf> {
        if let Some(s) = self.snfs.read().expect("lock").get(&k) {
            return s.clone();
        }
        let s = Arc::new(compute_snf(&self.space, k));
        self.snfs.write().expect("lock").entry(k).or_insert(s).clone()
    }

    /// Smith data of `δ_{k-1}`, the identity when `k = 0`.
    fn snf_prev(&self, k: usize) -> Arc<CoboundarySnf> {
        if k == 0 {
            Arc::new(identity_snf(self.space.count(0)))
        } else {
            self.snf(k - 1)
        }
    }

    pub fn closed(&self, k: usize) -> Arc<ClosedCochains> {
        if let Some(c) = self.closed.read().expect("lock").get(&k) {
            return c.clone();
        }
        let c = Arc::new(closed_cochain_basis(&self.space, k));
        self.closed.write().expect("lock").entry(k).or_insert(c).clone()
    }

    pub fn get(&self, k: usize, tag: CoefficientTag) -> Arc<CohomologyGroup> {
        if let Some(g) = self.groups.read().expect("lock").get(&(k, tag)) {
            return g.clone();
        }
        let g = Arc::new(self.compute(k, tag));
        self.groups.write().expect("lock").entry((k, tag)).or_insert(g).clone()
    }

    fn compute(&self, k: usize, tag: CoefficientTag) -> CohomologyGroup {
        let x = &self.space;
        let empty = |tag| CohomologyGroup {
            space: x.clone(),
            degree: k,
            tag,
            group: PresentedAbGroup::zero(),
            kinds: Vec::new(),
            gen_lifts: Vec::new(),
            coords: Coords::Zero,
        };
        if x.count(k) == 0 {
            return empty(tag);
        }
        match tag {
            CoefficientTag::IntZ => self.integral(k),
            CoefficientTag::Rational => {
                let int = self.integral_free(k);
                let b = int.0.len();
                CohomologyGroup {
                    space: x.clone(),
                    degree: k,
                    tag,
                    group: PresentedAbGroup::with_all(0, Vec::new(), 0, b),
                    kinds: vec![GenKind::Vector; b],
                    gen_lifts: int.0,
                    coords: Coords::Rational { prev: int.1, free_inv: int.2 },
                }
            }
            CoefficientTag::QmodZ => self.divisible(k),
            CoefficientTag::ModP(p) => self.mod_p(k, p),
        }
    }

    /// Free part of `H^k(X; Z)`: lifts, the Smith data of `δ_{k-1}`, and the
    /// left inverse recovering free coordinates from `U x`.
    fn integral_free(&self, k: usize) -> (Vec<Vec<Q>>, Arc<CoboundarySnf>, QMatrix) {
        let x = &self.space;
        let prev = self.snf_prev(k);
        let n = x.count(k);
        let r = prev.rank;
        // columns r.. of U^{-1} span a complement of the coboundary span
        let w: Vec<Vec<BigInt>> = (r..n).map(|j| (0..n).map(|i| prev.u_inv[i][j].clone()).collect()).collect();
        let m = x.count(k + 1);
        let images: Vec<Vec<BigInt>> = w
            .iter()
            .map(|col| {
                (0..m)
                    .map(|s| {
                        let mut acc = BigInt::zero();
                        for (i, &f) in x.faces(k + 1, s).iter().enumerate() {
                            if i % 2 == 0 {
                                acc += &col[f];
                            } else {
                                acc -= &col[f];
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let kernel = if m == 0 {
            crate::abgroup::matrix_identity(n - r)
        } else {
            integer_left_kernel(&images, m)
        };
        let kq: Vec<Vec<Q>> = kernel.iter().map(|c| c.iter().map(|v| Q::from_integer(v.clone())).collect()).collect();
        let free_inv = left_inverse(n - r, &kq);
        let lifts = kernel
            .iter()
            .map(|c| {
                (0..n)
                    .map(|i| {
                        let s: BigInt = c.iter().zip(&w).map(|(cj, wj)| cj * &wj[i]).sum();
                        Q::from_integer(s)
                    })
                    .collect()
            })
            .collect();
        (lifts, prev, free_inv)
    }

    fn integral(&self, k: usize) -> CohomologyGroup {
        let (free_lifts, prev, free_inv) = self.integral_free(k);
        let n = self.space.count(k);
        let mut kinds = vec![GenKind::Free; free_lifts.len()];
        let mut gen_lifts = free_lifts;
        let mut torsion = Vec::new();
        let mut orders = Vec::new();
        for i in 0..prev.rank {
            let d = &prev.diag[i];
            if d.is_one() {
                continue;
            }
            torsion.push(i);
            orders.push(d.clone());
            kinds.push(GenKind::Torsion(d.clone()));
            gen_lifts.push((0..n).map(|j| Q::from_integer(prev.u_inv[j][i].clone())).collect());
        }
        let free = kinds.len() - torsion.len();
        CohomologyGroup {
            space: self.space.clone(),
            degree: k,
            tag: CoefficientTag::IntZ,
            group: PresentedAbGroup::new(free, orders),
            kinds,
            gen_lifts,
            coords: Coords::Int { prev, torsion, free_inv },
        }
    }

    fn divisible(&self, k: usize) -> CohomologyGroup {
        let x = &self.space;
        let n = x.count(k);
        let (free_lifts, prev, free_inv) = self.integral_free(k);
        let next = if x.count(k + 1) == 0 { Arc::new(identity_snf(0)) } else { self.snf(k) };
        let mut kinds = Vec::new();
        let mut gen_lifts = Vec::new();
        let mut torsion = Vec::new();
        let mut orders = Vec::new();
        let mut t_lifts = Vec::with_capacity(next.rank);
        for i in 0..next.rank {
            let e = Q::from_integer(next.diag[i].clone());
            let t: Vec<Q> = (0..n).map(|j| Q::from_integer(next.v[j][i].clone()) / &e).collect();
            if !next.diag[i].is_one() {
                torsion.push(i);
                orders.push(next.diag[i].clone());
                kinds.push(GenKind::Torsion(next.diag[i].clone()));
                gen_lifts.push(t.clone());
            }
            t_lifts.push(t);
        }
        let b = free_lifts.len();
        kinds.extend(std::iter::repeat(GenKind::Divisible).take(b));
        gen_lifts.extend(free_lifts);
        CohomologyGroup {
            space: x.clone(),
            degree: k,
            tag: CoefficientTag::QmodZ,
            group: PresentedAbGroup::with_all(0, orders, b, 0),
            kinds,
            gen_lifts,
            coords: Coords::QmodZ { next, torsion, t_lifts, prev, free_inv },
        }
    }

    fn mod_p(&self, k: usize, p: u64) -> CohomologyGroup {
        let x = &self.space;
        let n = x.count(k);
        let entry = |i: usize| if i % 2 == 0 { 1u64 } else { p - 1 };
        // coboundaries: images of the basis (k-1)-cochains
        let mut boundaries: Vec<Vec<u64>> = if k == 0 { Vec::new() } else { vec![vec![0u64; n]; x.count(k - 1)] };
        if k > 0 {
            for s in 0..n {
                for (i, &f) in x.faces(k, s).iter().enumerate() {
                    boundaries[f][s] = entry(i);
                }
            }
        }
        let m = x.count(k + 1);
        let mut delta = vec![vec![0u64; n]; m];
        for (s, row) in delta.iter_mut().enumerate() {
            for (i, &f) in x.faces(k + 1, s).iter().enumerate() {
                row[f] = entry(i);
            }
        }
        let cycles = if m == 0 {
            (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
        } else {
            nullspace_mod(p, delta, n)
        };
        // first pass finds the complement, second builds the tagged echelon
        let mut probe = FpEchelon::new(p, 0);
        for b in &boundaries {
            probe.insert(b.clone(), Vec::new());
        }
        let gens: Vec<Vec<u64>> = cycles.into_iter().filter(|z| probe.insert(z.clone(), Vec::new())).collect();
        let g = gens.len();
        let mut echelon = FpEchelon::new(p, g);
        for b in boundaries {
            echelon.insert(b, vec![0; g]);
        }
        for (j, z) in gens.iter().enumerate() {
            let mut t = vec![0u64; g];
            t[j] = 1;
            echelon.insert(z.clone(), t);
        }
        CohomologyGroup {
            space: x.clone(),
            degree: k,
            tag: CoefficientTag::ModP(p),
            group: PresentedAbGroup::new(0, vec![BigInt::from(p); g]),
            kinds: vec![GenKind::Torsion(BigInt::from(p)); g],
            gen_lifts: gens.iter().map(|z| z.iter().map(|&v| Q::from_integer(BigInt::from(v))).collect()).collect(),
            coords: Coords::ModP { p, echelon },
        }
    }
}

/// `H^k(X; tag)` computed from scratch.
pub fn cohomology(x: &Arc<SimplicialComplex>, k: usize, tag: CoefficientTag) -> Arc<CohomologyGroup> {
    CohomologyCache::new(x.clone()).get(k, tag)
}
