//! Discrete differential forms: closed rational cochains, their periods on
//! integral homology cycles, and exponentiated periods in `Q/Z` cohomology.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::abgroup::rational::{to_z, Q};
use crate::abgroup::{GenKind, PresentedAbGroup, SemiLattice, Subquotient};
use crate::cochains::{
    closed_cochain_basis, coboundary, cohomology, exp_reduce, Cochain, CochainError, CoefficientTag,
    CohomologyClass,
};
use crate::simpcomplex::SimplicialComplex;

/// Default tolerance for approximate period tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("form of degree {0} is not closed")]
    NotClosed(usize),
    #[error("degree {0} is not in the degree set of the bundle")]
    DegreeNotPresent(usize),
    #[error("expected a form of degree {expected}, got degree {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("bad form data: {0}")]
    Parse(String),
    #[error(transparent)]
    Cochain(#[from] CochainError),
}

/// A closed rational cochain.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteForm {
    cochain: Cochain,
}

impl DiscreteForm {
    pub fn new(space: Arc<SimplicialComplex>, degree: usize, values: Vec<Q>) -> Result<Self, FormError> {
        let c = Cochain::new(space, degree, CoefficientTag::Rational, values)?;
        Self::from_cochain(&c)
    }

    pub fn from_cochain(c: &Cochain) -> Result<Self, FormError> {
        let c = c.retag(CoefficientTag::Rational)?;
        if !coboundary(&c).is_zero() {
            return Err(FormError::NotClosed(c.degree()));
        }
        Ok(DiscreteForm { cochain: c })
    }

    pub fn zero(space: Arc<SimplicialComplex>, degree: usize) -> Self {
        DiscreteForm { cochain: Cochain::zero(space, degree, CoefficientTag::Rational) }
    }

    /// `δg` for a rational cochain `g`.
    pub fn exact(g: &Cochain) -> Result<Self, FormError> {
        Self::from_cochain(&coboundary(&g.retag(CoefficientTag::Rational)?))
    }

    /// The form `Σ c_i b_i` in a fixed basis `b_i` of closed cochains.
    pub fn from_closed_coords(space: Arc<SimplicialComplex>, degree: usize, coords: &[Q]) -> Result<Self, FormError> {
        let basis = closed_cochain_basis(&space, degree);
        if coords.len() != basis.dim() {
            return Err(FormError::Parse(format!("{} coordinates for {} closed cochains", coords.len(), basis.dim())));
        }
        let mut values = vec![Q::zero(); space.count(degree)];
        for (c, b) in coords.iter().zip(&basis.basis) {
            for (v, x) in values.iter_mut().zip(b) {
                *v += c * x;
            }
        }
        Self::new(space, degree, values)
    }

    pub fn space(&self) -> &Arc<SimplicialComplex> {
        self.cochain.space()
    }

    pub fn degree(&self) -> usize {
        self.cochain.degree()
    }

    pub fn values(&self) -> &[Q] {
        self.cochain.values()
    }

    pub fn cochain(&self) -> &Cochain {
        &self.cochain
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormError> {
        Ok(DiscreteForm { cochain: self.cochain.add(&other.cochain)? })
    }

    pub fn scale(&self, c: &Q) -> Self {
        DiscreteForm { cochain: self.cochain.scale(c).expect("rational scaling") }
    }
}

/// Representative cycles for the generators of `H_k(X; Z)`: free generators
/// first, then torsion generators.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: usize,
    pub group: PresentedAbGroup,
    pub kinds: Vec<GenKind>,
    pub cycles: Vec<Vec<BigInt>>,
}

pub fn homology_cycle_basis(x: &SimplicialComplex, k: usize) -> HomologyBasis {
    let n = x.count(k);
    let chains = SemiLattice::standard_lattice(n);
    let cycles = if k == 0 || n == 0 {
        chains.clone()
    } else {
        let d = x.boundary_matrix(k).expect("degree in range").to_qmatrix();
        chains.preimage(&d, &SemiLattice::zero(d.rows))
    };
    let boundaries = if k < x.dim() {
        let d = x.boundary_matrix(k + 1).expect("degree in range").to_qmatrix();
        SemiLattice::standard_lattice(d.cols).image(&d)
    } else {
        SemiLattice::zero(n)
    };
    let dec = Subquotient::new(cycles, boundaries).decompose();
    let group = dec.group();
    let cycles = dec
        .gens
        .iter()
        .map(|g| to_z(g).expect("integral cycle representative"))
        .collect();
    HomologyBasis { degree: k, group, kinds: dec.kinds.clone(), cycles }
}

/// Pairings of a closed form with the cycles of a [`HomologyBasis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodVector {
    pub degree: usize,
    pub values: Vec<Q>,
}

impl PeriodVector {
    pub fn is_integral(&self) -> bool {
        self.values.iter().all(|v| v.is_integer())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        PeriodVector { degree: self.degree, values }
    }
}

impl Serialize for PeriodVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.values.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

fn pair(values: &[Q], cycle: &[BigInt]) -> Q {
    values
        .iter()
        .zip(cycle)
        .filter(|(_, c)| !c.is_zero())
        .map(|(v, c)| v * Q::from_integer(c.clone()))
        .sum()
}

pub fn periods(f: &DiscreteForm) -> Result<PeriodVector, FormError> {
    if !coboundary(f.cochain()).is_zero() {
        return Err(FormError::NotClosed(f.degree()));
    }
    let basis = homology_cycle_basis(f.space(), f.degree());
    let values = basis.cycles.iter().map(|z| pair(f.values(), z)).collect();
    Ok(PeriodVector { degree: f.degree(), values })
}

pub fn has_integral_periods(f: &DiscreteForm) -> bool {
    periods(f).expect("forms are closed by construction").is_integral()
}

/// Exact forms always have rational periods.
pub fn has_rational_periods(_f: &DiscreteForm) -> bool {
    true
}

/// The class of `f mod 1` in `H^m(X; Q/Z)`.
pub fn exp_period_class(f: &DiscreteForm, m: usize) -> Result<CohomologyClass, FormError> {
    if f.degree() != m {
        return Err(FormError::DegreeMismatch { expected: m, found: f.degree() });
    }
    let group = cohomology(f.space(), m, CoefficientTag::QmodZ);
    Ok(group.class_of(&exp_reduce(f.cochain())?)?)
}

/// A family of closed forms indexed by a degree set, plus an integer summand.
#[derive(Clone, Debug)]
pub struct FormBundle {
    space: Arc<SimplicialComplex>,
    degrees: BTreeSet<usize>,
    components: BTreeMap<usize, DiscreteForm>,
    pub integer: BigInt,
}

impl FormBundle {
    pub fn new(space: Arc<SimplicialComplex>, degrees: BTreeSet<usize>) -> Self {
        FormBundle { space, degrees, components: BTreeMap::new(), integer: BigInt::zero() }
    }

    /// Even degrees up to the dimension.
    pub fn even(space: Arc<SimplicialComplex>) -> Self {
        let d = (0..=space.dim()).filter(|k| k % 2 == 0).collect();
        Self::new(space, d)
    }

    /// Odd degrees up to the dimension.
    pub fn odd(space: Arc<SimplicialComplex>) -> Self {
        let d = (0..=space.dim()).filter(|k| k % 2 == 1).collect();
        Self::new(space, d)
    }

    pub fn space(&self) -> &Arc<SimplicialComplex> {
        &self.space
    }

    pub fn degrees(&self) -> &BTreeSet<usize> {
        &self.degrees
    }

    pub fn insert(&mut self, f: DiscreteForm) -> Result<(), FormError> {
        if !self.degrees.contains(&f.degree()) {
            return Err(FormError::DegreeNotPresent(f.degree()));
        }
        match self.components.get(&f.degree()) {
            Some(g) => {
                let s = g.add(&f)?;
                self.components.insert(f.degree(), s);
            }
            None => {
                self.components.insert(f.degree(), f);
            }
        }
        Ok(())
    }

    /// The homogeneous component of degree `k` (zero when absent).
    pub fn component(&self, k: usize) -> Result<DiscreteForm, FormError> {
        if !self.degrees.contains(&k) {
            return Err(FormError::DegreeNotPresent(k));
        }
        Ok(self.components.get(&k).cloned().unwrap_or_else(|| DiscreteForm::zero(self.space.clone(), k)))
    }

    pub fn components(&self) -> impl Iterator<Item = &DiscreteForm> {
        self.components.values()
    }
}

/// `d_{2m}`: projection to the degree-`2m` component followed by exponentiated periods.
pub fn d2m(b: &FormBundle, m: usize) -> Result<CohomologyClass, FormError> {
    exp_period_class(&b.component(2 * m)?, 2 * m)
}

/// Odd analogue `d_{2m+1}` for bundles of odd-degree forms.
pub fn d2m_plus_1(b: &FormBundle, m: usize) -> Result<CohomologyClass, FormError> {
    exp_period_class(&b.component(2 * m + 1)?, 2 * m + 1)
}

/// A form with floating point values, for approximate mode only.
#[derive(Clone, Debug)]
pub struct ApproxForm {
    pub space: Arc<SimplicialComplex>,
    pub degree: usize,
    pub values: Vec<f64>,
}

impl ApproxForm {
    pub fn is_closed(&self, tol: f64) -> bool {
        let k = self.degree;
        if k >= self.space.dim() {
            return true;
        }
        (0..self.space.count(k + 1)).all(|s| {
            let v: f64 = self
                .space
                .faces(k + 1, s)
                .iter()
                .enumerate()
                .map(|(i, &f)| if i % 2 == 0 { self.values[f] } else { -self.values[f] })
                .sum();
            v.abs() < tol
        })
    }

    pub fn periods(&self, tol: f64) -> Result<Vec<f64>, FormError> {
        if !self.is_closed(tol) {
            return Err(FormError::NotClosed(self.degree));
        }
        let basis = homology_cycle_basis(&self.space, self.degree);
        Ok(basis
            .cycles
            .iter()
            .map(|z| {
                z.iter()
                    .zip(&self.values)
                    .map(|(c, v)| c.to_f64().unwrap_or(f64::NAN) * v)
                    .sum()
            })
            .collect())
    }
}

pub fn approx_integral(periods: &[f64], tol: f64) -> bool {
    periods.iter().all(|p| (p - p.round()).abs() < tol)
}

/// Whether each value is within `tol` of a rational with denominator at most `max_den`.
pub fn approx_rational(periods: &[f64], tol: f64, max_den: u32) -> bool {
    periods
        .iter()
        .all(|p| (1..=max_den).any(|d| (p * d as f64 - (p * d as f64).round()).abs() < tol * d as f64))
}

/// Form data as read from JSON before attaching it to a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormRecord {
    pub degree: usize,
    pub values: Vec<Value>,
}

pub enum ParsedForm {
    Exact(DiscreteForm),
    Approx(ApproxForm),
}

fn parse_rational(s: &str) -> Result<Q, FormError> {
    let s = s.trim();
    let bad = || FormError::Parse(format!("'{s}' is not a rational number"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(a, b))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FormRecord {
    pub fn attach(&self, space: &Arc<SimplicialComplex>, tol: f64) -> Result<ParsedForm, FormError> {
        if self.degree > space.dim() {
            return Err(FormError::Parse(format!("degree {} exceeds dimension {}", self.degree, space.dim())));
        }
        if self.values.len() != space.count(self.degree) {
            return Err(FormError::Parse(format!(
                "{} values for {} simplices of degree {}",
                self.values.len(),
                space.count(self.degree),
                self.degree
            )));
        }
        let exact: Option<Vec<Q>> = self
            .values
            .iter()
            .map(|v| match v {
                Value::String(s) => parse_rational(s).ok(),
                Value::Number(n) => n.as_i64().map(|i| Q::from_integer(i.into())),
                _ => None,
            })
            .collect();
        if let Some(values) = exact {
            return Ok(ParsedForm::Exact(DiscreteForm::new(space.clone(), self.degree, values)?));
        }
        let values: Vec<f64> = self
            .values
            .iter()
            .map(|v| match v {
                Value::Number(n) => n.as_f64().ok_or_else(|| FormError::Parse(format!("bad number {n}"))),
                Value::String(s) => parse_rational(s).and_then(|q| {
                    q.to_f64().ok_or_else(|| FormError::Parse(format!("'{s}' out of range")))
                }),
                other => Err(FormError::Parse(format!("bad value {other}"))),
            })
            .collect::<Result<_, _>>()?;
        let f = ApproxForm { space: space.clone(), degree: self.degree, values };
        if !f.is_closed(tol) {
            return Err(FormError::NotClosed(self.degree));
        }
        Ok(ParsedForm::Approx(f))
    }
}

impl From<&DiscreteForm> for FormRecord {
    fn from(f: &DiscreteForm) -> Self {
        FormRecord { degree: f.degree(), values: f.values().iter().map(|v| Value::String(v.to_string())).collect() }
    }
}

/// Accepts a single form object or an array of them.
pub fn parse_form_records(text: &str) -> Result<Vec<FormRecord>, FormError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormError::Parse(e.to_string()))?;
    let items = match v {
        Value::Array(a) => a,
        other => vec![other],
    };
    items
        .into_iter()
        .map(|i| serde_json::from_value(i).map_err(|e| FormError::Parse(e.to_string())))
        .collect()
}

/// Rounds a rational to a nonnegative representative class mod 1 for display.
pub fn mod_one(x: &Q) -> Q {
    let r = x - Q::from_integer(x.floor().to_integer());
    if r.is_negative() {
        r + Q::from_integer(1.into())
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::rational::q_frac;
    use crate::simpcomplex::{builtin_space, sphere};

    fn space(id: &str) -> Arc<SimplicialComplex> {
        Arc::new(builtin_space(id).unwrap())
    }

    #[test]
    fn circle_period() {
        let x = space("circle");
        // edges 01, 02, 12 with the cyclic orientation 0 -> 1 -> 2 -> 0
        let f = DiscreteForm::new(x, 1, vec![q_frac(1, 3), q_frac(-1, 3), q_frac(1, 3)]).unwrap();
        let p = periods(&f).unwrap();
        assert_eq!(p.values.len(), 1);
        assert_eq!(p.values[0].abs(), q_frac(1, 1));
        assert!(has_integral_periods(&f));
        assert!(exp_period_class(&f, 1).unwrap().is_zero());
    }

    #[test]
    fn sphere_half_period() {
        let x = Arc::new(sphere(2));
        let mut v = vec![Q::zero(); x.count(2)];
        v[0] = q_frac(1, 2);
        let f = DiscreteForm::new(x, 2, v).unwrap();
        let p = periods(&f).unwrap();
        assert_eq!(p.values[0].abs(), q_frac(1, 2));
        assert!(!has_integral_periods(&f));
        let c = exp_period_class(&f, 2).unwrap();
        assert!(!c.is_zero());
        assert!(exp_period_class(&f, 1).is_err());
    }

    #[test]
    fn exact_forms_have_zero_periods() {
        let x = space("torus2");
        let g = Cochain::new(x.clone(), 1, CoefficientTag::Rational, (0..x.count(1)).map(|i| q_frac(i as i64, 7)).collect())
            .unwrap();
        let f = DiscreteForm::exact(&g).unwrap();
        assert!(periods(&f).unwrap().values.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn non_closed_rejected() {
        let x = space("circle");
        let mut v = vec![Q::zero(); x.count(0)];
        v[0] = q_frac(1, 1);
        assert_eq!(DiscreteForm::new(x, 0, v), Err(FormError::NotClosed(0)));
    }

    #[test]
    fn homology_bases() {
        let rp2 = space("rp2");
        let h1 = homology_cycle_basis(&rp2, 1);
        assert_eq!(h1.group, PresentedAbGroup::cyclic(2));
        let t = space("torus2");
        assert_eq!(homology_cycle_basis(&t, 1).group, PresentedAbGroup::free(2));
        assert_eq!(homology_cycle_basis(&t, 2).group, PresentedAbGroup::free(1));
    }

    #[test]
    fn bundle_projection() {
        let x = Arc::new(sphere(2));
        let mut b = FormBundle::even(x.clone());
        let mut v = vec![Q::zero(); x.count(2)];
        v[1] = q_frac(1, 3);
        b.insert(DiscreteForm::new(x.clone(), 2, v).unwrap()).unwrap();
        assert!(!d2m(&b, 1).unwrap().is_zero());
        assert!(d2m(&b, 0).unwrap().is_zero());
        assert_eq!(d2m(&b, 2).unwrap_err(), FormError::DegreeNotPresent(4));
        assert!(b.insert(DiscreteForm::zero(x, 1)).is_err());
    }

    #[test]
    fn json_records() {
        let x = space("circle");
        let recs = parse_form_records(r#"{"degree":1,"values":["1/3","-1/3","1/3"]}"#).unwrap();
        let ParsedForm::Exact(f) = recs[0].attach(&x, DEFAULT_TOLERANCE).unwrap() else { panic!() };
        assert_eq!(FormRecord::from(&f), recs[0]);
        let recs = parse_form_records(r#"[{"degree":1,"values":[0.5,-0.25,0.25]}]"#).unwrap();
        let ParsedForm::Approx(a) = recs[0].attach(&x, DEFAULT_TOLERANCE).unwrap() else { panic!() };
        let p = a.periods(DEFAULT_TOLERANCE).unwrap();
        assert!(approx_integral(&p, DEFAULT_TOLERANCE));
    }

    #[test]
    fn approx_rationality() {
        assert!(approx_rational(&[0.5, 1.0 / 3.0], 1e-9, 12));
        assert!(!approx_rational(&[std::f64::consts::PI], 1e-9, 12));
        assert!(approx_integral(&[1.0, -2.0], 1e-9));
    }
}
