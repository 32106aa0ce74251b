//! Pages as subquotients of a fixed rational ambient space, and page turning.
//!
//! Every entry `E_r^{p,q}` is a direct sum of blocks (cohomology groups or
//! closed forms) fixed at the first page. Each block generator is one
//! coordinate of the entry's ambient `Q^G`. The entry at page `r` is
//! `sub_r / rel_r` for semilattices `rel_r ⊆ sub_r ⊆ Q^G`.
//! A differential is a rational matrix built block by block from the
//! theory's rules.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::report::{DifferentialRecord, FiltrationPiece, FormReport, Report, UnresolvedRecord};
use super::{DifferentialRule, Quadrant, RowKind, SseqError, TheorySpec};
use crate::abgroup::rational::{unit_vec, QMatrix, Q};
use crate::abgroup::{GenKind, PresentedAbGroup, SemiLattice, Subquotient};
use crate::cochains::{ClosedCochains, Cochain, CoefficientTag, CohomologyCache, CohomologyGroup};
use crate::forms::{exp_period_class, has_integral_periods, periods, DiscreteForm};
use crate::simpcomplex::SimplicialComplex;
use crate::steenrod::OperationId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BlockRole {
    /// A constant coefficient row.
    Row(CoefficientTag),
    /// Closed forms of degree `k` (only at `p = 0`).
    ClosedForms(usize),
    /// De Rham tail `H^{k+p}(X; Q)` of the degree-`k` forms (for `p > 0`).
    DeRham(usize),
    /// `H^p(X; Z)` summand of the forms row.
    IntSummand,
    /// A group given only up to isomorphism, with no cochain model.
    Abstract,
}

impl BlockRole {
    pub fn tag(&self) -> CoefficientTag {
        match self {
            BlockRole::Row(t) => *t,
            BlockRole::ClosedForms(_) | BlockRole::DeRham(_) => CoefficientTag::Rational,
            BlockRole::IntSummand | BlockRole::Abstract => CoefficientTag::IntZ,
        }
    }

    pub fn form_degree(&self) -> Option<usize> {
        match self {
            BlockRole::ClosedForms(k) | BlockRole::DeRham(k) => Some(*k),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
enum BlockData {
    Coh(Arc<CohomologyGroup>),
    Closed(Arc<ClosedCochains>),
    Abstract,
}

/// One summand of an `E_2` entry.
#[derive(Clone, Debug)]
pub struct Block {
    pub role: BlockRole,
    pub cochain_degree: usize,
    pub offset: usize,
    pub kinds: Vec<GenKind>,
    data: BlockData,
}

impl Block {
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn tag(&self) -> CoefficientTag {
        self.role.tag()
    }

    /// The cohomology group behind a constant-row, tail or integral block.
    pub fn cohomology(&self) -> Option<&Arc<CohomologyGroup>> {
        match &self.data {
            BlockData::Coh(g) => Some(g),
            BlockData::Closed(_) | BlockData::Abstract => None,
        }
    }

    /// Cocycle representing generator `i` (for divisible generators, the
    /// integral cocycle spanning the line).
    pub fn generator_cochain(&self, space: &Arc<SimplicialComplex>, i: usize) -> Cochain {
        match &self.data {
            BlockData::Coh(g) => match self.kinds[i] {
                GenKind::Divisible => Cochain::new(
                    space.clone(),
                    self.cochain_degree,
                    CoefficientTag::Rational,
                    g.generator_lift(i).to_vec(),
                )
                .expect("rational lift"),
                _ => g.generator(i),
            },
            BlockData::Closed(c) => {
                Cochain::new(space.clone(), self.cochain_degree, CoefficientTag::Rational, c.basis[i].clone())
                    .expect("closed form")
            }
            BlockData::Abstract => panic!("abstract blocks carry no cochains"),
        }
    }

    /// Q-linear coordinates of a cocycle given by (rational lift) values.
    pub fn raw_coords(&self, values: &[Q]) -> Vec<Q> {
        match &self.data {
            BlockData::Coh(g) => g.coords_raw(values),
            BlockData::Closed(c) => c.coords(values),
            BlockData::Abstract => panic!("abstract blocks carry no cochains"),
        }
    }

    fn initial(&self, dim: usize, space: &mut Vec<Vec<Q>>, lattice: &mut Vec<Vec<Q>>, rel_lat: &mut Vec<Vec<Q>>) {
        for (i, k) in self.kinds.iter().enumerate() {
            let e = unit_vec(dim, self.offset + i);
            match k {
                GenKind::Free => lattice.push(e),
                GenKind::Torsion(d) => {
                    rel_lat.push(e.iter().map(|x| x * Q::from_integer(d.clone())).collect());
                    lattice.push(e);
                }
                GenKind::Divisible => {
                    rel_lat.push(e.clone());
                    space.push(e);
                }
                GenKind::Vector => space.push(e),
            }
        }
    }

    fn key(&self) -> (BlockRole, usize) {
        (self.role, self.cochain_degree)
    }
}

/// Static layout of an entry.
#[derive(Clone, Debug)]
struct Layout {
    blocks: Vec<Block>,
    dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct EntryState {
    sub: SemiLattice,
    rel: SemiLattice,
}

impl EntryState {
    fn group(&self) -> PresentedAbGroup {
        Subquotient::new(self.sub.clone(), self.rel.clone()).group()
    }

    fn is_zero(&self) -> bool {
        self.rel.contains_all(&self.sub)
    }
}

/// Groups of one page.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Page {
    pub r: usize,
    pub entries: BTreeMap<(i64, i64), PresentedAbGroup>,
}

impl Page {
    pub fn entry(&self, p: i64, q: i64) -> PresentedAbGroup {
        self.entries.get(&(p, q)).cloned().unwrap_or_else(PresentedAbGroup::zero)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub max_page: Option<usize>,
    /// Keep turning (trivially, once converged) until this page exists.
    pub through_page: Option<usize>,
    pub forms: Vec<DiscreteForm>,
    pub cache: Option<Arc<CohomologyCache>>,
}

/// How a block pair is treated on a page.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Decision {
    Op(OperationId),
    Zero(&'static str),
    Unresolved,
}

/// A differential `d_r` out of one entry, as an ambient matrix.
#[derive(Clone, Debug)]
pub(crate) struct Differential {
    pub r: usize,
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub matrix: QMatrix,
    pub ops: BTreeSet<OperationId>,
    pub zero_reasons: BTreeSet<&'static str>,
    pub unresolved: Vec<String>,
}

type MemoKey = (OperationId, (BlockRole, usize), (BlockRole, usize));

/// A spectral sequence run in progress or completed.
pub struct SpectralSequence {
    space: Arc<SimplicialComplex>,
    theory: TheorySpec,
    cache: Arc<CohomologyCache>,
    rules: Vec<DifferentialRule>,
    forms_pages: Vec<usize>,
    layouts: BTreeMap<(i64, i64), Layout>,
    states: Vec<(usize, BTreeMap<(i64, i64), EntryState>)>,
    diffs: Vec<Differential>,
    memo: Mutex<HashMap<MemoKey, Arc<Vec<Vec<Q>>>>>,
    max_page: usize,
    through_page: usize,
    forms: Vec<DiscreteForm>,
}

/// The first page of `T` on `X` (`E_2`, or `E_1` of the exponentiated-period
/// map for `Deligne:1`).
pub fn e2_page(x: &Arc<SimplicialComplex>, t: &TheorySpec) -> Result<SpectralSequence, SseqError> {
    SpectralSequence::new(x, t, RunOptions::default())
}

/// Runs until convergence or `max_page`.
pub fn run(x: &Arc<SimplicialComplex>, t: &TheorySpec, max_page: Option<usize>) -> Result<SpectralSequence, SseqError> {
    run_with(x, t, RunOptions { max_page, ..RunOptions::default() })
}

pub fn run_with(x: &Arc<SimplicialComplex>, t: &TheorySpec, opts: RunOptions) -> Result<SpectralSequence, SseqError> {
    let mut ss = SpectralSequence::new(x, t, opts)?;
    while !ss.is_finished() {
        ss.apply_rules_and_turn()?;
    }
    Ok(ss)
}

fn max_row_gap(rows: &[i64]) -> usize {
    rows.windows(2).map(|w| (w[1] - w[0]) as usize).max().unwrap_or(0)
}

impl SpectralSequence {
    pub fn new(x: &Arc<SimplicialComplex>, t: &TheorySpec, opts: RunOptions) -> Result<Self, SseqError> {
        let dim = x.dim();
        let rules = t.rules_for(dim);
        for r in &rules {
            r.check_degree()?;
        }
        let cache = opts.cache.clone().unwrap_or_else(|| Arc::new(CohomologyCache::new(x.clone())));
        let rows = t.rows_in_window(dim);
        let max_page = opts.max_page.unwrap_or(dim + max_row_gap(&rows) + 2);
        let mut keys = Vec::new();
        for &q in &rows {
            for p in 0..=dim as i64 {
                keys.push((p, q));
            }
        }
        let built: Vec<((i64, i64), Layout)> = keys
            .par_iter()
            .map(|&(p, q)| ((p, q), build_layout(x, &cache, t, p, q)))
            .collect();
        let layouts: BTreeMap<(i64, i64), Layout> = built.into_iter().filter(|(_, l)| l.dim > 0).collect();
        for f in &opts.forms {
            match t.forms_degrees() {
                Some((d, _)) if d.contains(f.degree()) && f.degree() > 0 => {}
                _ => return Err(crate::forms::FormError::DegreeNotPresent(f.degree()).into()),
            }
        }
        let mut ss = Self::assemble(x, t.clone(), cache, rules, t.forms_pages(dim), layouts, max_page, opts.forms);
        if let Some(through) = opts.through_page {
            ss.through_page = through;
            ss.max_page = ss.max_page.max(through + 1);
        }
        Ok(ss)
    }

    /// A sequence whose `E_2` entries are prescribed groups with no
    /// operations available; every possible differential is unresolved.
    pub fn from_groups(
        x: &Arc<SimplicialComplex>,
        id: &str,
        entries: &BTreeMap<(i64, i64), PresentedAbGroup>,
        max_page: Option<usize>,
    ) -> Self {
        let mut layouts = BTreeMap::new();
        for (&k, g) in entries {
            let kinds = group_kinds(g);
            if kinds.is_empty() {
                continue;
            }
            let n = kinds.len();
            let block = Block { role: BlockRole::Abstract, cochain_degree: k.0.max(0) as usize, offset: 0, kinds, data: BlockData::Abstract };
            layouts.insert(k, Layout { blocks: vec![block], dim: n });
        }
        let rows: Vec<i64> = entries.keys().map(|k| k.1).collect::<BTreeSet<_>>().into_iter().collect();
        let max_page = max_page.unwrap_or(x.dim() + max_row_gap(&rows) + 2);
        let spec = TheorySpec { id: id.to_string(), period: 0, rows: vec![], rules: vec![], start_page: 2 };
        let cache = Arc::new(CohomologyCache::new(x.clone()));
        Self::assemble(x, spec, cache, vec![], vec![], layouts, max_page, vec![])
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        x: &Arc<SimplicialComplex>,
        theory: TheorySpec,
        cache: Arc<CohomologyCache>,
        rules: Vec<DifferentialRule>,
        forms_pages: Vec<usize>,
        layouts: BTreeMap<(i64, i64), Layout>,
        max_page: usize,
        forms: Vec<DiscreteForm>,
    ) -> Self {
        let mut first = BTreeMap::new();
        for (k, l) in &layouts {
            let (mut sp, mut lat, mut rl) = (Vec::new(), Vec::new(), Vec::new());
            for b in &l.blocks {
                b.initial(l.dim, &mut sp, &mut lat, &mut rl);
            }
            first.insert(*k, EntryState { sub: SemiLattice::new(l.dim, sp, lat), rel: SemiLattice::new(l.dim, vec![], rl) });
        }
        let start = theory.start_page;
        SpectralSequence {
            space: x.clone(),
            theory,
            cache,
            rules,
            forms_pages,
            layouts,
            states: vec![(start, first)],
            diffs: Vec::new(),
            memo: Mutex::new(HashMap::new()),
            max_page: max_page.max(start),
            through_page: 0,
            forms,
        }
    }

    pub fn space(&self) -> &Arc<SimplicialComplex> {
        &self.space
    }

    pub fn theory(&self) -> &TheorySpec {
        &self.theory
    }

    pub fn cache(&self) -> &Arc<CohomologyCache> {
        &self.cache
    }

    /// Current page number.
    pub fn current_page(&self) -> usize {
        self.states.last().expect("at least one page").0
    }

    /// Whether all later differentials vanish for dimension reasons.
    pub fn is_converged(&self) -> bool {
        self.current_page() > self.space.dim()
    }

    pub fn is_finished(&self) -> bool {
        let r = self.current_page();
        (self.is_converged() && r > self.through_page) || r >= self.max_page
    }

    pub fn blocks(&self, p: i64, q: i64) -> &[Block] {
        self.layouts.get(&(p, q)).map(|l| l.blocks.as_slice()).unwrap_or(&[])
    }

    pub fn ambient_dim(&self, p: i64, q: i64) -> usize {
        self.layouts.get(&(p, q)).map_or(0, |l| l.dim)
    }

    fn state_at(&self, r: usize) -> Option<&BTreeMap<(i64, i64), EntryState>> {
        self.states.iter().find(|(s, _)| *s == r).map(|(_, m)| m)
    }

    /// `E_r^{p,q}` as a subquotient of the entry's ambient space.
    pub fn subquotient(&self, r: usize, p: i64, q: i64) -> Option<Subquotient> {
        self.state_at(r)?.get(&(p, q)).map(|e| Subquotient::new(e.sub.clone(), e.rel.clone()))
    }

    /// The last computed page's subquotient.
    pub fn final_subquotient(&self, p: i64, q: i64) -> Option<Subquotient> {
        self.subquotient(self.current_page(), p, q)
    }

    pub fn pages(&self) -> Vec<Page> {
        self.states
            .iter()
            .map(|(r, m)| Page {
                r: *r,
                entries: m.iter().filter(|(_, e)| !e.is_zero()).map(|(k, e)| (*k, e.group())).collect(),
            })
            .collect()
    }

    pub fn page(&self, r: usize) -> Option<Page> {
        self.pages().into_iter().find(|p| p.r == r)
    }

    /// Entries of the last page (`E_∞` when converged).
    pub fn e_inf(&self) -> Page {
        self.pages().pop().expect("at least one page")
    }

    /// Ambient matrix of `d_r` out of `(p, q)`, if one was computed.
    pub fn differential_matrix(&self, r: usize, p: i64, q: i64) -> Option<&QMatrix> {
        self.diffs.iter().find(|d| d.r == r && d.from == (p, q)).map(|d| &d.matrix)
    }

    /// Ambient vector of a closed form at `(0, 0)`.
    pub fn form_vector(&self, f: &DiscreteForm) -> Option<Vec<Q>> {
        let l = self.layouts.get(&(0, 0))?;
        let b = l.blocks.iter().find(|b| b.role == BlockRole::ClosedForms(f.degree()))?;
        let c = b.raw_coords(f.values());
        let mut v = vec![Q::zero(); l.dim];
        for (i, x) in c.into_iter().enumerate() {
            v[b.offset + i] = x;
        }
        Some(v)
    }

    /// Whether a form survives to the last page at `(0, 0)`.
    pub fn form_survives(&self, f: &DiscreteForm) -> Option<bool> {
        let v = self.form_vector(f)?;
        Some(self.state_at(self.current_page())?.get(&(0, 0))?.sub.contains(&v))
    }

    /// Computes `d_r` on the current page and passes to the next.
    pub fn apply_rules_and_turn(&mut self) -> Result<(), SseqError> {
        let r = self.current_page();
        for rule in self.rules.iter().filter(|ru| ru.page == r) {
            rule.check_degree()?;
        }
        let state = self.states.last().expect("page").1.clone();
        let sources: Vec<(i64, i64)> = state
            .keys()
            .copied()
            .filter(|&(p, q)| state.contains_key(&(p + r as i64, q - r as i64 + 1)))
            .collect();
        let results: Vec<Result<Option<Differential>, SseqError>> =
            sources.par_iter().map(|&(p, q)| self.differential(r, &state, p, q)).collect();
        let mut diffs = Vec::new();
        for d in results {
            if let Some(d) = d? {
                diffs.push(d);
            }
        }
        let by_from: BTreeMap<(i64, i64), &Differential> = diffs.iter().map(|d| (d.from, d)).collect();
        let by_to: BTreeMap<(i64, i64), &Differential> = diffs.iter().map(|d| (d.to, d)).collect();
        let mut next = BTreeMap::new();
        for (&key, e) in &state {
            let mut sub = e.sub.clone();
            let mut rel = e.rel.clone();
            if let Some(d) = by_from.get(&key) {
                let tgt = &state[&d.to];
                sub = sub.preimage(&d.matrix, &tgt.rel);
            }
            if let Some(d) = by_to.get(&key) {
                let src = &state[&d.from];
                let img = src.sub.image(&d.matrix);
                if let Some(out) = by_from.get(&key) {
                    let tgt = &state[&out.to];
                    if !tgt.rel.contains_all(&img.image(&out.matrix)) {
                        return Err(SseqError::NonzeroSquare { r, p: key.0, q: key.1 });
                    }
                }
                rel = rel.sum(&img);
            }
            next.insert(key, EntryState { sub, rel });
        }
        self.diffs.extend(diffs);
        self.states.push((r + 1, next));
        Ok(())
    }

    fn decide(&self, r: usize, src: &Block, q_src: i64, tgt: &Block) -> Decision {
        if src.role == BlockRole::Abstract || tgt.role == BlockRole::Abstract {
            return Decision::Unresolved;
        }
        for rule in self.rules.iter().filter(|ru| ru.page == r) {
            let quadrant_ok = match rule.quadrant {
                Quadrant::Any => src.role.form_degree().is_none(),
                Quadrant::Positive => q_src > 0,
                Quadrant::Negative => q_src < 0,
                Quadrant::Forms => src.role.form_degree().is_some(),
            };
            if !quadrant_ok || rule.op.source_tag() != src.tag() || rule.op.target_tag() != tgt.tag() {
                continue;
            }
            if let OperationId::ExpPeriod(m) = rule.op {
                if src.role.form_degree() != Some(m as usize) {
                    continue;
                }
            }
            if src.cochain_degree + rule.op.cochain_shift() != tgt.cochain_degree {
                continue;
            }
            return Decision::Op(rule.op);
        }
        if tgt.tag() == CoefficientTag::Rational && src.tag() == CoefficientTag::IntZ {
            return Decision::Zero("rationally trivial");
        }
        if r == 1 {
            return Decision::Zero("first page maps between cohomology groups");
        }
        if self.forms_pages.contains(&r) {
            return Decision::Zero("only the homogeneous form component differs from zero on this page");
        }
        Decision::Unresolved
    }

    fn op_columns(&self, op: OperationId, src: &Block, tgt: &Block) -> Result<Arc<Vec<Vec<Q>>>, SseqError> {
        let key = (op, src.key(), tgt.key());
        if let Some(m) = self.memo.lock().expect("memo").get(&key) {
            return Ok(m.clone());
        }
        let mut cols = Vec::with_capacity(src.len());
        for (i, kind) in src.kinds.iter().enumerate() {
            let col = match (kind, op) {
                (GenKind::Vector, OperationId::ExpPeriod(_)) => {
                    let c = src.generator_cochain(&self.space, i);
                    tgt.raw_coords(c.values())
                }
                (GenKind::Vector, _) | (GenKind::Divisible, _) => vec![Q::zero(); tgt.len()],
                (_, OperationId::ExpPeriod(_)) => vec![Q::zero(); tgt.len()],
                _ => {
                    let c = src.generator_cochain(&self.space, i);
                    let out = op.apply(&c)?;
                    tgt.raw_coords(out.values())
                }
            };
            cols.push(col);
        }
        let cols = Arc::new(cols);
        self.memo.lock().expect("memo").entry(key).or_insert_with(|| cols.clone());
        Ok(cols)
    }

    fn differential(
        &self,
        r: usize,
        state: &BTreeMap<(i64, i64), EntryState>,
        p: i64,
        q: i64,
    ) -> Result<Option<Differential>, SseqError> {
        let to = (p + r as i64, q - r as i64 + 1);
        let (se, te) = (&state[&(p, q)], &state[&to]);
        if se.is_zero() || te.is_zero() {
            return Ok(None);
        }
        let (sl, tl) = (&self.layouts[&(p, q)], &self.layouts[&to]);
        let mut matrix = QMatrix::zeros(tl.dim, sl.dim);
        let mut ops = BTreeSet::new();
        let mut zero_reasons = BTreeSet::new();
        let mut unresolved = Vec::new();
        for sb in &sl.blocks {
            for tb in &tl.blocks {
                match self.decide(r, sb, q, tb) {
                    Decision::Op(op) => {
                        let cols = self.op_columns(op, sb, tb)?;
                        for (j, col) in cols.iter().enumerate() {
                            for (i, v) in col.iter().enumerate() {
                                matrix.data[tb.offset + i][sb.offset + j] = v.clone();
                            }
                        }
                        ops.insert(op);
                    }
                    Decision::Zero(reason) => {
                        zero_reasons.insert(reason);
                    }
                    Decision::Unresolved => {
                        unresolved.push(format!("{:?} -> {:?}", sb.role, tb.role));
                    }
                }
            }
        }
        // the operation must descend to E_r: cycles to cycles, boundaries to boundaries
        if !matrix.is_zero() {
            let img = se.sub.image(&matrix);
            let ok = te.sub.contains_all(&img) && te.rel.contains_all(&se.rel.image(&matrix));
            if !ok {
                for op in &ops {
                    unresolved.push(format!("{op} does not descend to page {r}"));
                }
                ops.clear();
                matrix = QMatrix::zeros(tl.dim, sl.dim);
            }
        }
        Ok(Some(Differential { r, from: (p, q), to, matrix, ops, zero_reasons, unresolved }))
    }

    /// Whether the induced map on the page is nonzero.
    pub(crate) fn is_nonzero(&self, d: &Differential) -> bool {
        let st = self.state_at(d.r).expect("page");
        let img = st[&d.from].sub.image(&d.matrix);
        !st[&d.to].rel.contains_all(&img)
    }

    /// Matrix of `d` with respect to the generators of the page's groups.
    fn generator_matrix(&self, d: &Differential) -> Vec<Vec<String>> {
        let st = self.state_at(d.r).expect("page");
        let sd = Subquotient::new(st[&d.from].sub.clone(), st[&d.from].rel.clone()).decompose();
        let td = Subquotient::new(st[&d.to].sub.clone(), st[&d.to].rel.clone()).decompose();
        let mut rows = vec![Vec::with_capacity(sd.len()); td.len()];
        for g in &sd.gens {
            let img = d.matrix.apply(g);
            let c = td.coords(&img).expect("image lies in the target subgroup");
            for (row, x) in rows.iter_mut().zip(c) {
                row.push(x.to_string());
            }
        }
        rows
    }

    pub fn report(&self) -> Report {
        let pages = self.pages();
        let mut differentials = Vec::new();
        let mut unresolved = Vec::new();
        for d in &self.diffs {
            let nonzero = self.is_nonzero(d);
            let rule = if !d.ops.is_empty() {
                d.ops.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" + ")
            } else if !d.unresolved.is_empty() {
                "unresolved".to_string()
            } else {
                format!("zero: {}", d.zero_reasons.iter().copied().collect::<Vec<_>>().join("; "))
            };
            differentials.push(DifferentialRecord {
                r: d.r,
                from: [d.from.0, d.from.1],
                to: [d.to.0, d.to.1],
                matrix: self.generator_matrix(d),
                rule,
                nonzero,
            });
            for u in &d.unresolved {
                unresolved.push(UnresolvedRecord {
                    r: d.r,
                    from: [d.from.0, d.from.1],
                    to: [d.to.0, d.to.1],
                    reason: u.clone(),
                });
            }
        }
        if !self.is_converged() {
            let r = self.current_page();
            unresolved.push(UnresolvedRecord {
                r,
                from: [0, 0],
                to: [0, 0],
                reason: format!("stopped at page {r} before convergence"),
            });
        }
        let last = pages.last().expect("page").clone();
        let mut filtration: BTreeMap<i64, Vec<FiltrationPiece>> = BTreeMap::new();
        for (&(p, q), g) in &last.entries {
            filtration.entry(p + q).or_default().push(FiltrationPiece { p, q, group: g.clone() });
        }
        let extension_unresolved = filtration.iter().filter(|(_, v)| v.len() > 1).map(|(n, _)| *n).collect();
        let forms = self.forms.iter().map(|f| self.form_report(f)).collect();
        Report::new(
            &self.theory.id,
            self.space.name(),
            &pages,
            differentials,
            unresolved,
            filtration,
            extension_unresolved,
            self.is_converged(),
            forms,
        )
    }

    fn form_report(&self, f: &DiscreteForm) -> FormReport {
        let per = periods(f).expect("forms are closed");
        let class = exp_period_class(f, f.degree()).expect("degree matches");
        FormReport {
            degree: f.degree(),
            periods: per.values.iter().map(|v| v.to_string()).collect(),
            integral_periods: has_integral_periods(f),
            exp_class: class.coords.iter().map(|v| v.to_string()).collect(),
            differential_page: f.degree(),
            in_kernel: self.form_survives(f).unwrap_or(false),
        }
    }
}

fn group_kinds(g: &PresentedAbGroup) -> Vec<GenKind> {
    let mut kinds = vec![GenKind::Free; g.free_rank];
    kinds.extend(g.torsion.iter().map(|d| GenKind::Torsion(d.clone())));
    kinds.extend(std::iter::repeat(GenKind::Divisible).take(g.divisible_rank));
    kinds.extend(std::iter::repeat(GenKind::Vector).take(g.vector_rank));
    kinds
}

fn build_layout(
    x: &Arc<SimplicialComplex>,
    cache: &Arc<CohomologyCache>,
    t: &TheorySpec,
    p: i64,
    q: i64,
) -> Layout {
    let pu = p as usize;
    let dim = x.dim();
    let mut blocks = Vec::new();
    let coh = |k: usize, tag| cache.get(k, tag);
    let mut push = |role: BlockRole, degree: usize, data: BlockData, kinds: Vec<GenKind>| {
        if !kinds.is_empty() {
            blocks.push(Block { role, cochain_degree: degree, offset: 0, kinds, data });
        }
    };
    for kind in t.row_kinds(q) {
        match kind {
            RowKind::Constant(tag) => {
                let g = coh(pu, *tag);
                push(BlockRole::Row(*tag), pu, BlockData::Coh(g.clone()), g.kinds().to_vec());
            }
            RowKind::Forms { degrees, has_z } => {
                for k in degrees.up_to(dim) {
                    if k == 0 {
                        continue;
                    }
                    if pu == 0 {
                        let c = cache.closed(k);
                        let n = c.dim();
                        push(BlockRole::ClosedForms(k), k, BlockData::Closed(c), vec![GenKind::Vector; n]);
                    } else if k + pu <= dim {
                        let g = coh(k + pu, CoefficientTag::Rational);
                        push(BlockRole::DeRham(k), k + pu, BlockData::Coh(g.clone()), g.kinds().to_vec());
                    }
                }
                if *has_z {
                    let g = coh(pu, CoefficientTag::IntZ);
                    push(BlockRole::IntSummand, pu, BlockData::Coh(g.clone()), g.kinds().to_vec());
                }
            }
        }
    }
    let mut offset = 0;
    for b in blocks.iter_mut() {
        b.offset = offset;
        offset += b.len();
    }
    Layout { blocks, dim: offset }
}
