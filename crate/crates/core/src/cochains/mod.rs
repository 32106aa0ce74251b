//! Simplicial cochains with coefficients in Z, Z/p, Q and Q/Z.

mod cohomology;
pub(crate) mod fp;

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub use crate::abgroup::CoefficientTag;
use crate::abgroup::rational::Q;
use crate::abgroup::frac_part;
use crate::simpcomplex::SimplicialComplex;

pub use cohomology::{
    closed_cochain_basis, cohomology, ClosedCochains, CohomologyCache, CohomologyClass, CohomologyGroup,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CochainError {
    #[error("coefficient mismatch: {0}")]
    TagMismatch(String),
    #[error("cochains live on different spaces")]
    SpaceMismatch,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value {0} is not allowed for these coefficients")]
    BadValue(String),
    #[error("cochain of degree {0} is not a cocycle")]
    NotCocycle(usize),
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
}

/// A k-cochain: one coefficient per k-simplex.
///
/// Values are exact rationals normalized by tag: integers for `IntZ`,
/// residues in `[0, p)` for `ModP(p)`, and representatives in `[0, 1)` for `QmodZ`.
#[derive(Clone, Debug)]
pub struct Cochain {
    space: Arc<SimplicialComplex>,
    degree: usize,
    tag: CoefficientTag,
    values: Vec<Q>,
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space)
            && self.degree == other.degree
            && self.tag == other.tag
            && self.values == other.values
    }
}

impl Cochain {
    pub fn new(
        space: Arc<SimplicialComplex>,
        degree: usize,
        tag: CoefficientTag,
        values: Vec<Q>,
    ) -> Result<Self, CochainError> {
        let n = space.count(degree);
        if values.len() != n {
            return Err(CochainError::LengthMismatch { expected: n, got: values.len() });
        }
        let values = values
            .into_iter()
            .map(|v| normalize_value(tag, v))
            .collect::<Result<Vec<Q>, CochainError>>()?;
        Ok(Cochain { space, degree, tag, values })
    }

    pub fn from_ints(
        space: Arc<SimplicialComplex>,
        degree: usize,
        tag: CoefficientTag,
        values: &[i64],
    ) -> Result<Self, CochainError> {
        let v = values.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect();
        Self::new(space, degree, tag, v)
    }

    pub fn zero(space: Arc<SimplicialComplex>, degree: usize, tag: CoefficientTag) -> Self {
        let n = space.count(degree);
        Cochain { space, degree, tag, values: vec![Q::zero(); n] }
    }

    /// Constant 0-cochain with value 1.
    pub fn unit(space: Arc<SimplicialComplex>, tag: CoefficientTag) -> Self {
        let n = space.count(0);
        Cochain::new(space, 0, tag, vec![Q::one(); n]).expect("unit")
    }

    pub fn space(&self) -> &Arc<SimplicialComplex> {
        &self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn tag(&self) -> CoefficientTag {
        self.tag
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Same values, new coefficient tag (values are re-normalized).
    pub fn retag(&self, tag: CoefficientTag) -> Result<Cochain, CochainError> {
        Cochain::new(self.space.clone(), self.degree, tag, self.values.clone())
    }

    fn check_same(&self, other: &Cochain) -> Result<(), CochainError> {
        if !same_space(&self.space, &other.space) {
            return Err(CochainError::SpaceMismatch);
        }
        if self.tag != other.tag {
            return Err(CochainError::TagMismatch(format!("{} vs {}", self.tag, other.tag)));
        }
        if self.degree != other.degree {
            return Err(CochainError::DegreeMismatch { expected: self.degree, got: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, CochainError> {
        self.check_same(other)?;
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Cochain::new(self.space.clone(), self.degree, self.tag, v)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain, CochainError> {
        self.check_same(other)?;
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Cochain::new(self.space.clone(), self.degree, self.tag, v)
    }

    pub fn neg(&self) -> Cochain {
        let v = self.values.iter().map(|a| -a).collect();
        Cochain::new(self.space.clone(), self.degree, self.tag, v).expect("negation keeps the value domain")
    }

    /// Multiplication by an integer (or any rational for `Rational`).
    pub fn scale(&self, c: &Q) -> Result<Cochain, CochainError> {
        if !c.is_integer() && self.tag != CoefficientTag::Rational {
            return Err(CochainError::BadValue(format!("scalar {c} for {} cochains", self.tag)));
        }
        let v = self.values.iter().map(|a| a * c).collect();
        Cochain::new(self.space.clone(), self.degree, self.tag, v)
    }

    /// Evaluation on a chain given as (simplex index, coefficient) pairs.
    pub fn evaluate(&self, chain: &[(usize, BigInt)]) -> Q {
        let s: Q = chain.iter().map(|(i, c)| &self.values[*i] * Q::from_integer(c.clone())).sum();
        normalize_value(self.tag, s).expect("evaluation stays in the value domain")
    }
}

fn same_space(a: &Arc<SimplicialComplex>, b: &Arc<SimplicialComplex>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn normalize_value(tag: CoefficientTag, v: Q) -> Result<Q, CochainError> {
    match tag {
        CoefficientTag::IntZ => {
            if v.is_integer() {
                Ok(v)
            } else {
                Err(CochainError::BadValue(format!("{v} is not an integer")))
            }
        }
        CoefficientTag::ModP(p) => {
            if !v.is_integer() {
                return Err(CochainError::BadValue(format!("{v} is not an integer residue")));
            }
            let pb = BigInt::from(p);
            Ok(Q::from_integer(v.to_integer().mod_floor(&pb)))
        }
        CoefficientTag::Rational => Ok(v),
        CoefficientTag::QmodZ => Ok(frac_part(&v)),
    }
}

/// Simplicial coboundary: `(δc)(σ) = Σ_i (-1)^i c(∂_i σ)`.
pub fn coboundary(c: &Cochain) -> Cochain {
    let x = &c.space;
    let k = c.degree + 1;
    let n = x.count(k);
    let mut out = vec![Q::zero(); n];
    for (s, o) in out.iter_mut().enumerate() {
        for (i, &f) in x.faces(k, s).iter().enumerate() {
            let v = &c.values[f];
            if v.is_zero() {
                continue;
            }
            if i % 2 == 0 {
                *o += v;
            } else {
                *o -= v;
            }
        }
    }
    Cochain::new(x.clone(), k, c.tag, out).expect("coboundary keeps the value domain")
}

pub fn is_cocycle(c: &Cochain) -> bool {
    coboundary(c).is_zero()
}

fn product_tag(a: CoefficientTag, b: CoefficientTag) -> Result<CoefficientTag, CochainError> {
    use CoefficientTag::*;
    match (a, b) {
        (x, y) if x == y => Ok(x),
        (IntZ, y) => Ok(y),
        (x, IntZ) => Ok(x),
        _ => Err(CochainError::TagMismatch(format!("cannot multiply {a} and {b} cochains"))),
    }
}

/// Alexander-Whitney cup product: `(a ∪ b)(v_0..v_{p+q}) = a(v_0..v_p) b(v_p..v_{p+q})`.
///
/// Integral cochains act on every coefficient type.
pub fn cup(a: &Cochain, b: &Cochain) -> Result<Cochain, CochainError> {
    if !same_space(&a.space, &b.space) {
        return Err(CochainError::SpaceMismatch);
    }
    let tag = product_tag(a.tag, b.tag)?;
    let x = &a.space;
    let (p, q) = (a.degree, b.degree);
    let k = p + q;
    let n = x.count(k);
    let mut out = vec![Q::zero(); n];
    for (s, o) in out.iter_mut().enumerate() {
        let simplex = x.simplex(k, s);
        let fa = x.index_of(&simplex[..=p]).expect("front face");
        let va = &a.values[fa];
        if va.is_zero() {
            continue;
        }
        let fb = x.index_of(&simplex[p..]).expect("back face");
        *o = va * &b.values[fb];
    }
    Cochain::new(x.clone(), k, tag, out)
}

/// Steenrod's cup-i product over F_2.
///
/// For `σ = (v_0..v_n)` with `n = p + q - i`, the sum runs over
/// `0 ≤ u_0 < ... < u_i ≤ n`; `a` sees the vertices in the intervals
/// `[0,u_0], [u_1,u_2], ...` and `b` those in `[u_0,u_1], [u_2,u_3], ...`.
pub fn cup_i(a: &Cochain, b: &Cochain, i: usize) -> Result<Cochain, CochainError> {
    if !same_space(&a.space, &b.space) {
        return Err(CochainError::SpaceMismatch);
    }
    let two = CoefficientTag::ModP(2);
    if a.tag != two || b.tag != two {
        if i == 0 {
            return cup(a, b);
        }
        return Err(CochainError::TagMismatch(format!("cup-{i} needs Z/2 cochains")));
    }
    let x = &a.space;
    let (p, q) = (a.degree, b.degree);
    if i > p + q {
        return Err(CochainError::DegreeMismatch { expected: p + q, got: i });
    }
    let n = p + q - i;
    let count = x.count(n);
    let av = to_bits(a);
    let bv = to_bits(b);
    let tuples = increasing_tuples(n, i + 1);
    let mut out = vec![Q::zero(); count];
    let mut va = Vec::with_capacity(p + 1);
    let mut vb = Vec::with_capacity(q + 1);
    for (s, o) in out.iter_mut().enumerate() {
        let simplex = x.simplex(n, s);
        let mut acc = 0u8;
        for u in &tuples {
            if !split_sizes_match(u, n, p, q) {
                continue;
            }
            va.clear();
            vb.clear();
            let mut start = 0;
            for (j, &end) in u.iter().chain(std::iter::once(&n)).enumerate() {
                let target = if j % 2 == 0 { &mut va } else { &mut vb };
                target.extend_from_slice(&simplex[start..=end]);
                start = end;
            }
            let ia = x.index_of(&va).expect("face");
            if av[ia] == 0 {
                continue;
            }
            let ib = x.index_of(&vb).expect("face");
            acc ^= bv[ib];
        }
        if acc == 1 {
            *o = Q::one();
        }
    }
    Cochain::new(x.clone(), n, two, out)
}

fn to_bits(c: &Cochain) -> Vec<u8> {
    c.values.iter().map(|v| (v.to_integer() % 2u32).to_u8().unwrap_or(0)).collect()
}

fn split_sizes_match(u: &[usize], n: usize, p: usize, q: usize) -> bool {
    let mut sa = 0;
    let mut sb = 0;
    let mut start = 0;
    for (j, &end) in u.iter().chain(std::iter::once(&n)).enumerate() {
        let len = end - start + 1;
        if j % 2 == 0 {
            sa += len;
        } else {
            sb += len;
        }
        start = end;
    }
    // intervals of the same parity are disjoint
    sa == p + 1 && sb == q + 1
}

/// All strictly increasing `len`-tuples from `0..=n`.
fn increasing_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(start: usize, n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            if n + 1 - v < len - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, len, cur, out);
            cur.pop();
        }
    }
    rec(0, n, len, &mut cur, &mut out);
    out
}

/// Mod-p reduction of an integral cochain.
pub fn rho_p(c: &Cochain, p: u64) -> Result<Cochain, CochainError> {
    if c.tag != CoefficientTag::IntZ {
        return Err(CochainError::TagMismatch(format!("reduction needs Z cochains, got {}", c.tag)));
    }
    c.retag(CoefficientTag::ModP(p))
}

/// Embedding `Z/p -> Q/Z`, `v -> v/p`.
pub fn gamma_p(c: &Cochain) -> Result<Cochain, CochainError> {
    let CoefficientTag::ModP(p) = c.tag else {
        return Err(CochainError::TagMismatch(format!("embedding needs Z/p cochains, got {}", c.tag)));
    };
    let pq = Q::from_integer(BigInt::from(p));
    let v = c.values.iter().map(|x| x / &pq).collect();
    Cochain::new(c.space.clone(), c.degree, CoefficientTag::QmodZ, v)
}

/// Integral lift with values in `[0, p)` (for `ModP`) or the same integers.
pub fn integral_lift(c: &Cochain) -> Result<Cochain, CochainError> {
    match c.tag {
        CoefficientTag::ModP(_) | CoefficientTag::IntZ => c.retag(CoefficientTag::IntZ),
        t => Err(CochainError::TagMismatch(format!("no integral lift of {t} cochains"))),
    }
}

/// Rational lift of `Q/Z` values in `[0, 1)`, or the inclusion of integral values.
pub fn rational_lift(c: &Cochain) -> Result<Cochain, CochainError> {
    match c.tag {
        CoefficientTag::QmodZ | CoefficientTag::IntZ | CoefficientTag::Rational => c.retag(CoefficientTag::Rational),
        t => Err(CochainError::TagMismatch(format!("no rational lift of {t} cochains"))),
    }
}

/// Reduction `Q -> Q/Z`.
pub fn exp_reduce(c: &Cochain) -> Result<Cochain, CochainError> {
    match c.tag {
        CoefficientTag::Rational | CoefficientTag::IntZ => c.retag(CoefficientTag::QmodZ),
        t => Err(CochainError::TagMismatch(format!("cannot exponentiate {t} cochains"))),
    }
}

fn require_cocycle(c: &Cochain) -> Result<(), CochainError> {
    if is_cocycle(c) {
        Ok(())
    } else {
        Err(CochainError::NotCocycle(c.degree))
    }
}

/// Bockstein of `0 -> Z -p-> Z -> Z/p -> 0`: lift to Z, apply δ, divide by p.
pub fn bockstein_tilde(c: &Cochain) -> Result<Cochain, CochainError> {
    let CoefficientTag::ModP(p) = c.tag else {
        return Err(CochainError::TagMismatch(format!("integral Bockstein needs Z/p cochains, got {}", c.tag)));
    };
    require_cocycle(c)?;
    let d = coboundary(&integral_lift(c)?);
    let pq = Q::from_integer(BigInt::from(p));
    let v = d.values.iter().map(|x| x / &pq).collect();
    Cochain::new(c.space.clone(), c.degree + 1, CoefficientTag::IntZ, v)
}

/// Bockstein of `0 -> Z -> Q -> Q/Z -> 0`: lift to Q, apply δ.
pub fn bockstein_exp(c: &Cochain) -> Result<Cochain, CochainError> {
    if c.tag != CoefficientTag::QmodZ {
        return Err(CochainError::TagMismatch(format!("exponential Bockstein needs Q/Z cochains, got {}", c.tag)));
    }
    require_cocycle(c)?;
    let d = coboundary(&rational_lift(c)?);
    d.retag(CoefficientTag::IntZ)
}

/// Bockstein of `0 -> Z/p -> Z/p^2 -> Z/p -> 0`, computed in Z/p^2.
pub fn bockstein_p(c: &Cochain) -> Result<Cochain, CochainError> {
    let CoefficientTag::ModP(p) = c.tag else {
        return Err(CochainError::TagMismatch(format!("mod-p Bockstein needs Z/p cochains, got {}", c.tag)));
    };
    require_cocycle(c)?;
    let p2 = p * p;
    let lifted = c.retag(CoefficientTag::ModP(p2)).map_err(|e| CochainError::BadValue(e.to_string()))?;
    // δ in Z/p^2 (ModP normalization only needs an integer modulus)
    let d = coboundary_mod(&lifted, p2);
    let v: Vec<Q> = d
        .iter()
        .map(|x| {
            debug_assert!(x % p == 0);
            Q::from_integer(BigInt::from(x / p))
        })
        .collect();
    Cochain::new(c.space.clone(), c.degree + 1, CoefficientTag::ModP(p), v)
}

fn coboundary_mod(c: &Cochain, m: u64) -> Vec<u64> {
    let x = &c.space;
    let k = c.degree + 1;
    let vals: Vec<u64> = c.values.iter().map(|v| v.to_integer().to_u64().expect("residue")).collect();
    (0..x.count(k))
        .map(|s| {
            let mut acc = 0u64;
            for (i, &f) in x.faces(k, s).iter().enumerate() {
                if i % 2 == 0 {
                    acc = (acc + vals[f]) % m;
                } else {
                    acc = (acc + m - vals[f] % m) % m;
                }
            }
            acc
        })
        .collect()
}

/// Pullback along a simplicial map; collapsed simplices get 0.
pub fn pullback(f: &crate::simpcomplex::SimplicialMap, c: &Cochain) -> Result<Cochain, CochainError> {
    if !same_space(&f.target, &c.space) {
        return Err(CochainError::SpaceMismatch);
    }
    let k = c.degree;
    let vals = f
        .source
        .simplices(k)
        .iter()
        .map(|s| match f.image_nondegenerate(s) {
            Some(img) => {
                // the image keeps source order; sort and track the sign
                let mut sorted = img.clone();
                sorted.sort_unstable();
                let sign = permutation_sign(&img);
                let idx = f.target.index_of(&sorted).expect("image is a simplex");
                if sign > 0 {
                    c.values[idx].clone()
                } else {
                    -c.values[idx].clone()
                }
            }
            None => Q::zero(),
        })
        .collect();
    Cochain::new(f.source.clone(), k, c.tag, vals)
}

fn permutation_sign(v: &[usize]) -> i32 {
    let mut inversions = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_of(v: i64) -> num_rational::BigRational {
        Q::from_integer(BigInt::from(v))
    }
    use crate::simpcomplex::{builtin_space, sphere};

    fn circle() -> Arc<SimplicialComplex> {
        Arc::new(sphere(1))
    }

    #[test]
    fn constants_are_cocycles() {
        let x = Arc::new(builtin_space("torus2").unwrap());
        let one = Cochain::unit(x, CoefficientTag::IntZ);
        assert!(is_cocycle(&one));
    }

    #[test]
    fn coboundary_on_circle() {
        let x = circle();
        let c = Cochain::from_ints(x, 0, CoefficientTag::IntZ, &[1, 0, 0]).unwrap();
        let d = coboundary(&c);
        let total: Q = d.values().iter().sum();
        assert!(total.is_zero() || d.values().iter().filter(|v| !v.is_zero()).count() == 2);
        assert_eq!(d.values()[0], q_of(-1));
    }

    #[test]
    fn unit_for_cup() {
        let x = Arc::new(builtin_space("rp2").unwrap());
        let one = Cochain::unit(x.clone(), CoefficientTag::IntZ);
        let a = Cochain::from_ints(x.clone(), 1, CoefficientTag::IntZ, &(0..15).collect::<Vec<i64>>()).unwrap();
        assert_eq!(cup(&one, &a).unwrap().values(), a.values());
        assert_eq!(cup(&a, &one).unwrap().values(), a.values());
    }

    #[test]
    fn cup_zero_is_cup() {
        let x = Arc::new(builtin_space("torus2").unwrap());
        let two = CoefficientTag::ModP(2);
        let a = Cochain::from_ints(x.clone(), 1, two, &(0..21).map(|i| i % 2).collect::<Vec<_>>()).unwrap();
        let b = Cochain::from_ints(x.clone(), 1, two, &(0..21).map(|i| (i / 3) % 2).collect::<Vec<_>>()).unwrap();
        assert_eq!(cup_i(&a, &b, 0).unwrap().values(), cup(&a, &b).unwrap().values());
    }

    #[test]
    fn coefficient_maps() {
        let x = circle();
        let c = Cochain::from_ints(x.clone(), 0, CoefficientTag::IntZ, &[3, 4, 6]).unwrap();
        let r = rho_p(&c, 2).unwrap();
        assert_eq!(r.values(), &[q_of(1), q_of(0), q_of(0)]);
        let g = gamma_p(&r).unwrap();
        assert_eq!(g.values()[0], Q::new(BigInt::from(1), BigInt::from(2)));
        assert!(matches!(rho_p(&r, 2), Err(CochainError::TagMismatch(_))));
        assert!(matches!(gamma_p(&c), Err(CochainError::TagMismatch(_))));
    }

    #[test]
    fn tuples() {
        assert_eq!(increasing_tuples(3, 2).len(), 6);
        assert_eq!(increasing_tuples(2, 3), vec![vec![0, 1, 2]]);
    }
}
