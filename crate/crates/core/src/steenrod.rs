//! Steenrod squares on cochains and the symbolic mod-2 Steenrod algebra.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cochains::{
    bockstein_exp, bockstein_tilde, cup_i, gamma_p, is_cocycle, rho_p, Cochain, CochainError, CoefficientTag,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteenrodError {
    #[error("no solution of Q_n = Sq1 Θ + Ψ Sq1 in degree {0}")]
    NoSolution(u32),
    #[error("cannot parse operation: {0}")]
    Parse(String),
    #[error(transparent)]
    Cochain(#[from] CochainError),
}

/// A monomial `Sq^{i_1} Sq^{i_2} ... Sq^{i_k}` (applied right to left); the
/// empty monomial is the identity.
pub type Monomial = Vec<u32>;

/// Homogeneous element of the mod-2 Steenrod algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SteenrodElement {
    degree: u32,
    terms: BTreeSet<Monomial>,
}

impl SteenrodElement {
    pub fn zero(degree: u32) -> Self {
        SteenrodElement { degree, terms: BTreeSet::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Vec::new())
    }

    pub fn sq(i: u32) -> Self {
        Self::monomial(vec![i])
    }

    /// `Sq^0` factors are dropped.
    pub fn monomial(m: Monomial) -> Self {
        let m: Monomial = m.into_iter().filter(|&i| i != 0).collect();
        let degree = m.iter().sum();
        let mut terms = BTreeSet::new();
        terms.insert(m);
        SteenrodElement { degree, terms }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, other.degree, "sum of elements of different degrees");
        let terms = self.terms.symmetric_difference(&other.terms).cloned().collect();
        SteenrodElement { degree: self.degree, terms }
    }

    /// Composite `self ∘ other`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = SteenrodElement::zero(self.degree + other.degree);
        for a in &self.terms {
            for b in &other.terms {
                let mut m = a.clone();
                m.extend_from_slice(b);
                out.toggle(m);
            }
        }
        out
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.terms.iter().all(|m| is_admissible(m))
    }

    /// Whether every admissible term ends in `Sq^1`, i.e. the element lies in `A·Sq^1`.
    pub fn in_left_ideal_of_sq1(&self) -> bool {
        adem_reduce(self).terms.iter().all(|m| m.last() == Some(&1))
    }
}

pub fn is_admissible(m: &[u32]) -> bool {
    m.windows(2).all(|w| w[0] >= 2 * w[1])
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<&Monomial> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)));
        let parts: Vec<String> = terms
            .iter()
            .map(|m| {
                if m.is_empty() {
                    "1".to_string()
                } else {
                    m.iter().map(|i| format!("Sq{i}")).collect::<Vec<_>>().join(" ")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `C(n, k) mod 2` via Lucas' theorem.
pub fn binomial_mod2(n: i64, k: i64) -> u8 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    u8::from(k & !n == 0)
}

static ADEM_MEMO: Mutex<Option<HashMap<Monomial, BTreeSet<Monomial>>>> = Mutex::new(None);

/// Admissible form by repeated Adem relations
/// `Sq^a Sq^b = Σ_c C(b-1-c, a-2c) Sq^{a+b-c} Sq^c` for `a < 2b`.
pub fn adem_reduce(e: &SteenrodElement) -> SteenrodElement {
    let mut out = SteenrodElement::zero(e.degree);
    for m in &e.terms {
        for t in reduce_monomial(m) {
            out.toggle(t);
        }
    }
    out
}

fn reduce_monomial(m: &Monomial) -> BTreeSet<Monomial> {
    if is_admissible(m) {
        return BTreeSet::from([m.clone()]);
    }
    if let Some(r) = ADEM_MEMO.lock().expect("memo").get_or_insert_with(HashMap::new).get(m) {
        return r.clone();
    }
    let j = m.windows(2).position(|w| w[0] < 2 * w[1]).expect("inadmissible pair");
    let (a, b) = (m[j] as i64, m[j + 1] as i64);
    let mut result: BTreeSet<Monomial> = BTreeSet::new();
    for c in 0..=a / 2 {
        if binomial_mod2(b - 1 - c, a - 2 * c) == 0 {
            continue;
        }
        let mut t: Monomial = m[..j].to_vec();
        t.push((a + b - c) as u32);
        if c > 0 {
            t.push(c as u32);
        }
        t.extend_from_slice(&m[j + 2..]);
        for r in reduce_monomial(&t) {
            if !result.remove(&r) {
                result.insert(r);
            }
        }
    }
    ADEM_MEMO
        .lock()
        .expect("memo")
        .get_or_insert_with(HashMap::new)
        .insert(m.clone(), result.clone());
    result
}

/// Admissible monomials of a given degree.
pub fn admissible_basis(degree: u32) -> Vec<Monomial> {
    fn rec(remaining: u32, max_first: u32, prefix: &mut Monomial, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(prefix.iter().rev().copied().collect());
            return;
        }
        // build from the right: the next (leftward) exponent is at least twice the previous
        let min = prefix.last().map_or(1, |&p| 2 * p);
        for i in min..=remaining.min(max_first) {
            prefix.push(i);
            rec(remaining - i, max_first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(degree, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Milnor primitive `Q_n`, from `Q_0 = Sq^1` and
/// `Q_{j+1} = Sq^{2^{j+1}} Q_j + Q_j Sq^{2^{j+1}}`.
pub fn milnor_q(n: u32) -> SteenrodElement {
    let mut q = SteenrodElement::sq(1);
    for j in 0..n {
        let s = SteenrodElement::sq(1 << (j + 1));
        q = adem_reduce(&s.mul(&q).add(&q.mul(&s)));
    }
    q
}

/// Solves `Q_n = Sq^1 Θ + Ψ Sq^1` over F_2 and returns `Θ` (degree `2^{n+1} - 2`).
///
/// Ψ unknowns are eliminated first, so Θ is nonzero only where Ψ·Sq^1 cannot
/// absorb the term; this gives `Θ_0 = 0` and `Θ_1 = Sq^2`.
pub fn derive_theta(n: u32) -> Result<SteenrodElement, SteenrodError> {
    static CACHE: Mutex<Vec<(u32, SteenrodElement)>> = Mutex::new(Vec::new());
    if let Some((_, t)) = CACHE.lock().expect("cache").iter().find(|(k, _)| *k == n) {
        return Ok(t.clone());
    }
    let target = milnor_q(n);
    let d = target.degree() - 1;
    let basis = admissible_basis(d);
    let out_basis = admissible_basis(d + 1);
    let index: HashMap<&Monomial, usize> = out_basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let vectorize = |e: &SteenrodElement| -> Vec<u8> {
        let mut v = vec![0u8; out_basis.len()];
        for m in adem_reduce(e).terms() {
            v[index[m]] ^= 1;
        }
        v
    };
    let sq1 = SteenrodElement::sq(1);
    // columns: Ψ-part first, then Θ-part
    let mut cols: Vec<Vec<u8>> = Vec::new();
    for m in &basis {
        cols.push(vectorize(&SteenrodElement::monomial(m.clone()).mul(&sq1)));
    }
    for m in &basis {
        cols.push(vectorize(&sq1.mul(&SteenrodElement::monomial(m.clone()))));
    }
    let rhs = vectorize(&target);
    let x = solve_f2(&cols, &rhs, out_basis.len()).ok_or(SteenrodError::NoSolution(d + 1))?;
    let mut theta = SteenrodElement::zero(d);
    for (i, m) in basis.iter().enumerate() {
        if x[basis.len() + i] == 1 {
            theta.toggle(m.clone());
        }
    }
    CACHE.lock().expect("cache").push((n, theta.clone()));
    Ok(theta)
}

/// A solution of `Σ x_j cols_j = rhs` over F_2 with non-pivot unknowns zero;
/// pivots are taken in column order.
fn solve_f2(cols: &[Vec<u8>], rhs: &[u8], rows: usize) -> Option<Vec<u8>> {
    let n = cols.len();
    let mut a: Vec<Vec<u8>> = (0..rows)
        .map(|i| {
            let mut r: Vec<u8> = cols.iter().map(|c| c[i]).collect();
            r.push(rhs[i]);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(i) = (r..rows).find(|&i| a[i][c] == 1) else { continue };
        a.swap(i, r);
        let pr = a[r].clone();
        for (k, row) in a.iter_mut().enumerate() {
            if k != r && row[c] == 1 {
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x ^= y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| row[n] == 1) {
        return None;
    }
    let mut x = vec![0u8; n];
    for (row, &c) in a.iter().zip(&pivots) {
        x[c] = row[n];
    }
    Some(x)
}

/// Parses a whitespace-separated product of factors, with `+` between terms.
///
/// Factors: `SqN` or `Sq^N`, `Q N` or `QN` (Milnor primitive), `theta N`, `1`, `0`.
pub fn parse_expression(text: &str) -> Result<SteenrodElement, SteenrodError> {
    let mut total: Option<SteenrodElement> = None;
    for term in text.split('+') {
        let tokens: Vec<&str> = term.split_whitespace().collect();
        if tokens.is_empty() {
            return Err(SteenrodError::Parse(format!("empty term in '{text}'")));
        }
        let mut acc = SteenrodElement::one();
        let mut i = 0;
        while i < tokens.len() {
            let tok = tokens[i];
            let lower = tok.to_ascii_lowercase();
            let factor = if let Some(rest) = lower.strip_prefix("sq") {
                let rest = rest.trim_start_matches('^');
                SteenrodElement::sq(parse_index(rest, tok)?)
            } else if lower == "q" || lower == "theta" {
                let arg = tokens.get(i + 1).ok_or_else(|| SteenrodError::Parse(format!("'{tok}' needs an index")))?;
                i += 1;
                let n = parse_index(arg, arg)?;
                if lower == "q" {
                    milnor_q(n)
                } else {
                    derive_theta(n)?
                }
            } else if let Some(rest) = lower.strip_prefix("theta") {
                derive_theta(parse_index(rest, tok)?)?
            } else if let Some(rest) = lower.strip_prefix('q') {
                milnor_q(parse_index(rest, tok)?)
            } else if tok == "1" {
                SteenrodElement::one()
            } else if tok == "0" {
                SteenrodElement::zero(0)
            } else {
                return Err(SteenrodError::Parse(format!("unknown factor '{tok}'")));
            };
            acc = if factor.is_zero() && factor.degree() == 0 && tok == "0" {
                SteenrodElement::zero(acc.degree())
            } else {
                acc.mul(&factor)
            };
            i += 1;
        }
        let acc = adem_reduce(&acc);
        total = Some(match total {
            None => acc,
            Some(t) => {
                if !t.is_zero() && !acc.is_zero() && t.degree() != acc.degree() {
                    return Err(SteenrodError::Parse(format!("terms of degrees {} and {}", t.degree(), acc.degree())));
                }
                t.add(&acc)
            }
        });
    }
    Ok(adem_reduce(&total.expect("at least one term")))
}

fn parse_index(s: &str, tok: &str) -> Result<u32, SteenrodError> {
    if s.len() > 4 {
        return Err(SteenrodError::Parse(format!("index too large in '{tok}'")));
    }
    s.parse().map_err(|_| SteenrodError::Parse(format!("bad index in '{tok}'")))
}

fn require_mod2(x: &Cochain) -> Result<(), SteenrodError> {
    if x.tag() != CoefficientTag::ModP(2) {
        return Err(CochainError::TagMismatch(format!("expected Z/2 cochain, got {}", x.tag())).into());
    }
    Ok(())
}

/// `Sq^k x = x ∪_{n-k} x` for a mod-2 cocycle of degree `n`; zero for `k > n`.
pub fn sq(k: u32, x: &Cochain) -> Result<Cochain, SteenrodError> {
    require_mod2(x)?;
    let n = x.degree();
    let k = k as usize;
    if k > n {
        return Ok(Cochain::zero(x.space().clone(), n + k, x.tag()));
    }
    Ok(cup_i(x, x, n - k)?)
}

/// Evaluates an element of the Steenrod algebra on a mod-2 cocycle.
pub fn apply(e: &SteenrodElement, x: &Cochain) -> Result<Cochain, SteenrodError> {
    require_mod2(x)?;
    let mut acc = Cochain::zero(x.space().clone(), x.degree() + e.degree() as usize, x.tag());
    for m in e.terms() {
        let mut y = x.clone();
        for &i in m.iter().rev() {
            y = sq(i, &y)?;
        }
        acc = acc.add(&y)?;
    }
    Ok(acc)
}

fn require_cocycle(x: &Cochain) -> Result<(), SteenrodError> {
    if is_cocycle(x) {
        Ok(())
    } else {
        Err(CochainError::NotCocycle(x.degree()).into())
    }
}

/// Integral `Sq^3 = β̃ Sq^2 ρ_2`.
pub fn sq3_int(x: &Cochain) -> Result<Cochain, SteenrodError> {
    require_cocycle(x)?;
    Ok(bockstein_tilde(&sq(2, &rho_p(x, 2)?)?)?)
}

/// Integral lift `Q̃_n = β̃ Θ_n ρ_2`.
pub fn milnor_q_int(n: u32, x: &Cochain) -> Result<Cochain, SteenrodError> {
    require_cocycle(x)?;
    let theta = derive_theta(n)?;
    Ok(bockstein_tilde(&apply(&theta, &rho_p(x, 2)?)?)?)
}

/// `Γ_2 Sq^2 ρ_2 β` on a `Q/Z` cocycle; raises degree by 3.
pub fn gamma_sq_rho_beta(x: &Cochain) -> Result<Cochain, SteenrodError> {
    let b = bockstein_exp(x)?;
    Ok(gamma_p(&sq(2, &rho_p(&b, 2)?)?)?)
}

/// `Γ_2 Θ_n ρ_2 β` on a `Q/Z` cocycle; raises degree by `2^{n+1} - 1`.
pub fn gamma_q_rho_beta(n: u32, x: &Cochain) -> Result<Cochain, SteenrodError> {
    let theta = derive_theta(n)?;
    let b = bockstein_exp(x)?;
    Ok(gamma_p(&apply(&theta, &rho_p(&b, 2)?)?)?)
}

/// Names of the operations that serve as spectral sequence differentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperationId {
    Sq(u32),
    Sq3Int,
    MilnorQ(u32),
    MilnorQInt(u32),
    GammaSqRhoBeta,
    GammaQRhoBeta(u32),
    ExpPeriod(u32),
}

impl OperationId {
    /// Change in cochain degree.
    pub fn cochain_shift(&self) -> usize {
        match *self {
            OperationId::Sq(k) => k as usize,
            OperationId::Sq3Int | OperationId::GammaSqRhoBeta => 3,
            OperationId::MilnorQ(n) | OperationId::MilnorQInt(n) | OperationId::GammaQRhoBeta(n) => {
                (1usize << (n + 1)) - 1
            }
            OperationId::ExpPeriod(_) => 0,
        }
    }

    /// Bidegree `(Δp, Δq)` of the operation as a differential.
    pub fn bidegree(&self) -> (i64, i64) {
        let r = match *self {
            OperationId::ExpPeriod(m) => m as i64,
            _ => self.cochain_shift() as i64,
        };
        (r, 1 - r)
    }

    pub fn source_tag(&self) -> CoefficientTag {
        match self {
            OperationId::Sq(_) | OperationId::MilnorQ(_) => CoefficientTag::ModP(2),
            OperationId::Sq3Int | OperationId::MilnorQInt(_) => CoefficientTag::IntZ,
            OperationId::GammaSqRhoBeta | OperationId::GammaQRhoBeta(_) => CoefficientTag::QmodZ,
            OperationId::ExpPeriod(_) => CoefficientTag::Rational,
        }
    }

    pub fn target_tag(&self) -> CoefficientTag {
        match self {
            OperationId::Sq(_) | OperationId::MilnorQ(_) => CoefficientTag::ModP(2),
            OperationId::Sq3Int | OperationId::MilnorQInt(_) => CoefficientTag::IntZ,
            _ => CoefficientTag::QmodZ,
        }
    }

    /// Applies the operation to a cocycle of the source coefficient type.
    pub fn apply(&self, x: &Cochain) -> Result<Cochain, SteenrodError> {
        match *self {
            OperationId::Sq(k) => sq(k, x),
            OperationId::MilnorQ(n) => apply(&milnor_q(n), x),
            OperationId::Sq3Int => sq3_int(x),
            OperationId::MilnorQInt(n) => milnor_q_int(n, x),
            OperationId::GammaSqRhoBeta => gamma_sq_rho_beta(x),
            OperationId::GammaQRhoBeta(n) => gamma_q_rho_beta(n, x),
            OperationId::ExpPeriod(_) => Ok(crate::cochains::exp_reduce(x)?),
        }
    }
}

impl fmt::Display for OperationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperationId::Sq(k) => write!(f, "Sq{k}"),
            OperationId::Sq3Int => write!(f, "Sq3Int"),
            OperationId::MilnorQ(n) => write!(f, "MilnorQ({n})"),
            OperationId::MilnorQInt(n) => write!(f, "MilnorQInt({n})"),
            OperationId::GammaSqRhoBeta => write!(f, "GammaSqRhoBeta"),
            OperationId::GammaQRhoBeta(n) => write!(f, "GammaQRhoBeta({n})"),
            OperationId::ExpPeriod(m) => write!(f, "ExpPeriod({m})"),
        }
    }
}
