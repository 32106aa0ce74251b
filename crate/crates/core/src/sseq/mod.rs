//! Atiyah-Hirzebruch spectral sequences: theory registry, pages, differentials
//! and convergence reports.

mod bockstein;
mod bundle;
mod e1;
mod engine;
mod leibniz;
mod report;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::abgroup::{AbError, CoefficientTag};
use crate::cochains::CochainError;
use crate::forms::FormError;
use crate::simpcomplex::SpaceError;
use crate::steenrod::{OperationId, SteenrodError};

pub use bockstein::{bockstein_compare, BocksteinCase, BocksteinReport};
pub use bundle::{ahss_bundle, ahss_bundle_total};
pub use e1::{e1_page, E1Page};
pub use engine::{e2_page, run, run_with, Block, BlockRole, Page, RunOptions, SpectralSequence};
pub use leibniz::{leibniz_check, LeibnizReport};
pub use report::{DifferentialRecord, FiltrationPiece, FormReport, Report, UnresolvedRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SseqError {
    #[error("unknown theory '{0}'")]
    UnknownTheory(String),
    #[error("theory {0} has a forms row; E_1 is only available for constant coefficient rows")]
    FormsRowAtE1(String),
    #[error("rule {op} at page {page} has bidegree ({dp}, {dq}), expected ({page}, {})", 1 - *page as i64)]
    RuleDegreeMismatch { op: OperationId, page: usize, dp: i64, dq: i64 },
    #[error("fiber bundle is not a product: {0}")]
    NonProductBundle(String),
    #[error("Bockstein does not commute with d_{r} at ({p}, {q})")]
    CommutationFailure { r: usize, p: i64, q: i64 },
    #[error("d_{r} composed with d_{r} is nonzero at ({p}, {q})")]
    NonzeroSquare { r: usize, p: i64, q: i64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Steenrod(#[from] SteenrodError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Group(#[from] AbError),
}

/// Degrees `start, start + step, start + 2 step, ...` (just `start` when `step = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSet {
    pub start: usize,
    pub step: usize,
}

impl DegreeSet {
    pub fn single(k: usize) -> Self {
        DegreeSet { start: k, step: 0 }
    }

    pub fn contains(&self, k: usize) -> bool {
        if self.step == 0 {
            k == self.start
        } else {
            k >= self.start && (k - self.start) % self.step == 0
        }
    }

    pub fn up_to(&self, max: usize) -> Vec<usize> {
        (0..=max).filter(|&k| self.contains(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RowKind {
    /// Ordinary cohomology with the given coefficients.
    Constant(CoefficientTag),
    /// Closed forms of degrees in `degrees` at `p = 0`, their de Rham tails for
    /// `p > 0`, plus integral cohomology when `has_z`.
    Forms { degrees: DegreeSet, has_z: bool },
}

/// Which rows a row kind occupies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RowSign {
    Any,
    Positive,
    Negative,
}

/// Rows `q ≡ residue (mod modulus)` of the given sign; `modulus = 0` means `q = residue`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowFamily {
    pub kind: RowKind,
    pub residue: i64,
    pub modulus: i64,
    pub sign: RowSign,
}

impl RowFamily {
    pub fn single(kind: RowKind, q: i64) -> Self {
        RowFamily { kind, residue: q, modulus: 0, sign: RowSign::Any }
    }

    pub fn periodic(kind: RowKind, residue: i64, modulus: i64, sign: RowSign) -> Self {
        RowFamily { kind, residue, modulus, sign }
    }

    pub fn contains(&self, q: i64) -> bool {
        let on = if self.modulus == 0 { q == self.residue } else { (q - self.residue).rem_euclid(self.modulus) == 0 };
        on && match self.sign {
            RowSign::Any => true,
            RowSign::Positive => q > 0,
            RowSign::Negative => q < 0,
        }
    }
}

/// Where a rule's source block lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quadrant {
    Any,
    /// Rows `q > 0`.
    Positive,
    /// Rows `q < 0`.
    Negative,
    /// Form components of the `q = 0` row.
    Forms,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialRule {
    pub page: usize,
    pub quadrant: Quadrant,
    pub op: OperationId,
}

impl DifferentialRule {
    pub fn new(page: usize, quadrant: Quadrant, op: OperationId) -> Self {
        DifferentialRule { page, quadrant, op }
    }

    pub fn check_degree(&self) -> Result<(), SseqError> {
        let (dp, dq) = self.op.bidegree();
        if dp != self.page as i64 || dq != 1 - self.page as i64 {
            return Err(SseqError::RuleDegreeMismatch { op: self.op, page: self.page, dp, dq });
        }
        Ok(())
    }
}

/// Declarative description of a theory: its rows, period and differentials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheorySpec {
    pub id: String,
    pub period: usize,
    pub rows: Vec<RowFamily>,
    pub rules: Vec<DifferentialRule>,
    pub start_page: usize,
}

impl TheorySpec {
    pub fn is_differential(&self) -> bool {
        self.rows.iter().any(|r| matches!(r.kind, RowKind::Forms { .. }))
    }

    pub fn forms_degrees(&self) -> Option<(&DegreeSet, bool)> {
        self.rows.iter().find_map(|r| match &r.kind {
            RowKind::Forms { degrees, has_z } => Some((degrees, *has_z)),
            _ => None,
        })
    }

    /// Row kinds present at `q`.
    pub fn row_kinds(&self, q: i64) -> Vec<&RowKind> {
        self.rows.iter().filter(|r| r.contains(q)).map(|r| &r.kind).collect()
    }

    /// Half-width of the row window used on a complex of dimension `dim`.
    pub fn row_window(&self, dim: usize) -> i64 {
        let spread = self.rows.iter().map(|r| r.residue.abs() + r.modulus).max().unwrap_or(0);
        2 * dim as i64 + self.period.max(spread as usize) as i64
    }

    /// Rows with at least one kind in the window for `dim`.
    pub fn rows_in_window(&self, dim: usize) -> Vec<i64> {
        let w = self.row_window(dim);
        (-w..=w).filter(|&q| !self.row_kinds(q).is_empty()).collect()
    }

    /// All rules, including exponentiated-period rules for form degrees up to `dim`.
    pub fn rules_for(&self, dim: usize) -> Vec<DifferentialRule> {
        let mut rules = self.rules.clone();
        if let Some((d, _)) = self.forms_degrees() {
            for k in d.up_to(dim.max(d.start)) {
                if k >= self.start_page {
                    rules.push(DifferentialRule::new(k, Quadrant::Forms, OperationId::ExpPeriod(k as u32)));
                }
            }
        }
        rules
    }

    /// Pages at which the forms row supports its exponentiated-period rule.
    pub fn forms_pages(&self, dim: usize) -> Vec<usize> {
        self.forms_degrees()
            .map(|(d, _)| d.up_to(dim.max(d.start)).into_iter().filter(|&k| k > 0 && k >= self.start_page).collect())
            .unwrap_or_default()
    }

    /// Flat rows (`q < 0`) and their rules alone, as a theory of its own.
    pub fn flat_part(&self) -> TheorySpec {
        let rows = self
            .rows
            .iter()
            .filter(|r| matches!(r.kind, RowKind::Constant(CoefficientTag::QmodZ)))
            .cloned()
            .collect();
        let rules = self.rules.iter().filter(|r| r.op.source_tag() == CoefficientTag::QmodZ).cloned().collect();
        TheorySpec { id: format!("{}.flat", self.id), period: self.period, rows, rules, start_page: 2 }
    }
}

impl fmt::Display for TheorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

/// Period `2(2^n - 1)` of integral Morava K-theory.
pub fn morava_period(n: u32) -> usize {
    2 * ((1usize << n) - 1)
}

const MAX_LEVEL: u32 = 3;

fn hz() -> TheorySpec {
    TheorySpec {
        id: "HZ".into(),
        period: 0,
        rows: vec![RowFamily::single(RowKind::Constant(CoefficientTag::IntZ), 0)],
        rules: Vec::new(),
        start_page: 2,
    }
}

fn hu1() -> TheorySpec {
    TheorySpec {
        id: "HU1".into(),
        period: 0,
        rows: vec![RowFamily::single(RowKind::Constant(CoefficientTag::QmodZ), 0)],
        rules: Vec::new(),
        start_page: 2,
    }
}

fn deligne(n: u32) -> TheorySpec {
    let n_us = n as usize;
    TheorySpec {
        id: format!("Deligne:{n}"),
        period: n_us,
        rows: vec![
            RowFamily::single(RowKind::Forms { degrees: DegreeSet::single(n_us), has_z: false }, 0),
            RowFamily::single(RowKind::Constant(CoefficientTag::QmodZ), 1 - n as i64),
        ],
        rules: Vec::new(),
        start_page: n_us.min(2),
    }
}

fn k_theory(parity: i64) -> TheorySpec {
    TheorySpec {
        id: format!("K{parity}"),
        period: 2,
        rows: vec![RowFamily::periodic(RowKind::Constant(CoefficientTag::IntZ), parity, 2, RowSign::Any)],
        rules: vec![DifferentialRule::new(3, Quadrant::Any, OperationId::Sq3Int)],
        start_page: 2,
    }
}

fn flat_k() -> TheorySpec {
    TheorySpec {
        id: "flatK".into(),
        period: 2,
        rows: vec![RowFamily::periodic(RowKind::Constant(CoefficientTag::QmodZ), 0, 2, RowSign::Any)],
        rules: vec![DifferentialRule::new(3, Quadrant::Any, OperationId::GammaSqRhoBeta)],
        start_page: 2,
    }
}

fn diff_k(parity: i64) -> TheorySpec {
    // integral rows K^{j+q}(pt) for q > 0, flat rows K^{j+q-1}_{U(1)}(pt) for q < 0
    let forms_start = if parity == 0 { 2 } else { 1 };
    TheorySpec {
        id: format!("diffK{parity}"),
        period: 2,
        rows: vec![
            RowFamily::periodic(RowKind::Constant(CoefficientTag::IntZ), parity, 2, RowSign::Positive),
            RowFamily::single(
                RowKind::Forms { degrees: DegreeSet { start: forms_start, step: 2 }, has_z: parity == 0 },
                0,
            ),
            RowFamily::periodic(RowKind::Constant(CoefficientTag::QmodZ), parity + 1, 2, RowSign::Negative),
        ],
        rules: vec![
            DifferentialRule::new(3, Quadrant::Positive, OperationId::Sq3Int),
            DifferentialRule::new(3, Quadrant::Negative, OperationId::GammaSqRhoBeta),
        ],
        start_page: 2,
    }
}

fn morava_int(n: u32) -> TheorySpec {
    let p = morava_period(n);
    TheorySpec {
        id: format!("MoravaInt:{n}"),
        period: p,
        rows: vec![RowFamily::periodic(RowKind::Constant(CoefficientTag::IntZ), 0, p as i64, RowSign::Any)],
        rules: vec![DifferentialRule::new(p + 1, Quadrant::Any, OperationId::MilnorQInt(n))],
        start_page: 2,
    }
}

fn flat_morava(n: u32) -> TheorySpec {
    let p = morava_period(n);
    TheorySpec {
        id: format!("flatMorava:{n}"),
        period: p,
        rows: vec![RowFamily::periodic(RowKind::Constant(CoefficientTag::QmodZ), 0, p as i64, RowSign::Any)],
        rules: vec![DifferentialRule::new(p + 1, Quadrant::Any, OperationId::GammaQRhoBeta(n))],
        start_page: 2,
    }
}

fn diff_morava_int(n: u32) -> TheorySpec {
    let p = morava_period(n);
    TheorySpec {
        id: format!("diffMoravaInt:{n}"),
        period: p,
        rows: vec![
            RowFamily::periodic(RowKind::Constant(CoefficientTag::IntZ), 0, p as i64, RowSign::Positive),
            RowFamily::single(RowKind::Forms { degrees: DegreeSet { start: p, step: p }, has_z: true }, 0),
            RowFamily::periodic(RowKind::Constant(CoefficientTag::QmodZ), 1, p as i64, RowSign::Negative),
        ],
        rules: vec![
            DifferentialRule::new(p + 1, Quadrant::Positive, OperationId::MilnorQInt(n)),
            DifferentialRule::new(p + 1, Quadrant::Negative, OperationId::GammaQRhoBeta(n)),
        ],
        start_page: 2,
    }
}

/// Every shipped theory.
pub fn registry() -> Vec<TheorySpec> {
    let mut out = vec![hz(), hu1()];
    out.extend((1..=MAX_LEVEL).map(deligne));
    out.extend([k_theory(0), k_theory(1), flat_k(), diff_k(0), diff_k(1)]);
    out.extend((1..=MAX_LEVEL).map(morava_int));
    out.extend((1..=MAX_LEVEL).map(flat_morava));
    out.extend((1..=MAX_LEVEL).map(diff_morava_int));
    out
}

/// Looks up a theory by id; parameters may be written `Name:n` or `Name(n)`.
pub fn theory(id: &str) -> Result<TheorySpec, SseqError> {
    let unknown = || SseqError::UnknownTheory(id.to_string());
    let t = id.trim();
    let (name, arg) = if let Some((a, b)) = t.split_once(':') {
        (a.trim(), Some(b.trim()))
    } else if let Some(open) = t.find('(') {
        let inner = t[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
        (t[..open].trim(), Some(inner.trim()))
    } else {
        (t, None)
    };
    let level = match arg {
        Some(a) => {
            let n: u32 = a.parse().map_err(|_| unknown())?;
            if !(1..=MAX_LEVEL).contains(&n) {
                return Err(unknown());
            }
            Some(n)
        }
        None => None,
    };
    let spec = match (name, level) {
        ("HZ", None) => hz(),
        ("HU1", None) => hu1(),
        ("Deligne", Some(n)) => deligne(n),
        ("K0", None) => k_theory(0),
        ("K1", None) => k_theory(1),
        ("flatK", None) => flat_k(),
        ("diffK0", None) => diff_k(0),
        ("diffK1", None) => diff_k(1),
        ("MoravaInt", Some(n)) => morava_int(n),
        ("flatMorava", Some(n)) => flat_morava(n),
        ("diffMoravaInt", Some(n)) => diff_morava_int(n),
        _ => return Err(unknown()),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup() {
        assert_eq!(theory("Deligne:3").unwrap().id, "Deligne:3");
        assert_eq!(theory("Deligne(2)").unwrap().id, "Deligne:2");
        assert!(matches!(theory("Deligne:4"), Err(SseqError::UnknownTheory(_))));
        assert!(matches!(theory("KO"), Err(SseqError::UnknownTheory(_))));
        assert_eq!(registry().len(), 19);
        for t in registry() {
            assert_eq!(theory(&t.id).unwrap(), t);
            for r in t.rules_for(6) {
                r.check_degree().unwrap();
            }
        }
    }

    #[test]
    fn row_layouts() {
        let k0 = theory("K0").unwrap();
        assert!(k0.row_kinds(-4).len() == 1 && k0.row_kinds(3).is_empty());
        let d = theory("diffK0").unwrap();
        assert!(d.row_kinds(-1).len() == 1 && d.row_kinds(-2).is_empty() && d.row_kinds(2).len() == 1);
        let m = theory("flatMorava:2").unwrap();
        assert!(m.row_kinds(-6).len() == 1 && m.row_kinds(-5).is_empty());
        let dm = theory("diffMoravaInt:2").unwrap();
        assert!(dm.row_kinds(-5).len() == 1 && dm.row_kinds(-11).len() == 1 && dm.row_kinds(-6).is_empty());
        assert_eq!(dm.forms_pages(20), vec![6, 12, 18]);
        let del = theory("Deligne:1").unwrap();
        assert_eq!(del.row_kinds(0).len(), 2);
        assert_eq!(del.start_page, 1);
    }

    #[test]
    fn bad_rule_degree() {
        let r = DifferentialRule::new(2, Quadrant::Positive, OperationId::Sq3Int);
        assert!(matches!(r.check_degree(), Err(SseqError::RuleDegreeMismatch { .. })));
    }
}
