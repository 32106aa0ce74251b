//! Serializable run summaries.

use std::collections::BTreeMap;

use serde::Serialize;

use super::engine::Page;
use crate::abgroup::PresentedAbGroup;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PageRecord {
    pub r: usize,
    pub entries: BTreeMap<String, PresentedAbGroup>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialRecord {
    pub r: usize,
    pub from: [i64; 2],
    pub to: [i64; 2],
    /// Rows indexed by target generators, columns by source generators.
    pub matrix: Vec<Vec<String>>,
    pub rule: String,
    pub nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnresolvedRecord {
    pub r: usize,
    pub from: [i64; 2],
    pub to: [i64; 2],
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationPiece {
    pub p: i64,
    pub q: i64,
    pub group: PresentedAbGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormReport {
    pub degree: usize,
    pub periods: Vec<String>,
    pub integral_periods: bool,
    pub exp_class: Vec<String>,
    pub differential_page: usize,
    pub in_kernel: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub theory: String,
    pub space: String,
    pub pages: Vec<PageRecord>,
    pub differentials: Vec<DifferentialRecord>,
    #[serde(rename = "E_inf")]
    pub e_inf: BTreeMap<String, PresentedAbGroup>,
    pub unresolved: Vec<UnresolvedRecord>,
    pub filtration: BTreeMap<String, Vec<FiltrationPiece>>,
    /// Total degrees with more than one nonzero graded piece.
    pub extensions_unresolved: Vec<i64>,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub forms: Vec<FormReport>,
}

pub(crate) fn key(p: i64, q: i64) -> String {
    format!("{p},{q}")
}

fn entries(page: &Page) -> BTreeMap<String, PresentedAbGroup> {
    page.entries.iter().map(|(&(p, q), g)| (key(p, q), g.clone())).collect()
}

impl Report {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        theory: &str,
        space: &str,
        pages: &[Page],
        differentials: Vec<DifferentialRecord>,
        unresolved: Vec<UnresolvedRecord>,
        filtration: BTreeMap<i64, Vec<FiltrationPiece>>,
        extensions_unresolved: Vec<i64>,
        converged: bool,
        forms: Vec<FormReport>,
    ) -> Self {
        Report {
            theory: theory.to_string(),
            space: space.to_string(),
            pages: pages.iter().map(|p| PageRecord { r: p.r, entries: entries(p) }).collect(),
            differentials,
            e_inf: pages.last().map(entries).unwrap_or_default(),
            unresolved,
            filtration: filtration.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
            extensions_unresolved,
            converged,
            forms,
        }
    }

    /// Keeps only nonzero differentials (the default for output).
    pub fn nonzero_only(mut self) -> Self {
        self.differentials.retain(|d| d.nonzero);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
