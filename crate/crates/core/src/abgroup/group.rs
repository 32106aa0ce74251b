use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeMap, Serializer};

use super::lattice::{Decomposition, SemiLattice, Subquotient};
use super::matrix::{smith_normal_form, IntMatrix};
use super::rational::{to_q, to_z, QMatrix, Q};
use super::{AbError, CoefficientTag};

/// Isomorphism type `Z^free ⊕ ⊕ Z/d_i ⊕ (Q/Z)^divisible ⊕ Q^vector`.
///
/// Torsion is kept as an invariant-factor chain `d_1 | d_2 | ...`, so
/// structural equality is isomorphism. The last two ranks are zero for
/// finitely generated groups and are omitted from the JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PresentedAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub divisible_rank: usize,
    pub vector_rank: usize,
}

impl PresentedAbGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        PresentedAbGroup { free_rank: rank, ..Default::default() }
    }

    pub fn cyclic(d: u64) -> Self {
        Self::new(0, vec![BigInt::from(d)])
    }

    /// Orders may be arbitrary; they are normalized to invariant factors.
    /// An order of 0 counts as a free summand, an order of 1 is dropped.
    pub fn new(free_rank: usize, orders: Vec<BigInt>) -> Self {
        Self::with_all(free_rank, orders, 0, 0)
    }

    pub fn with_all(free_rank: usize, orders: Vec<BigInt>, divisible_rank: usize, vector_rank: usize) -> Self {
        let mut free = free_rank;
        let mut ords = Vec::new();
        for d in orders {
            let d = if d < BigInt::zero() { -d } else { d };
            if d.is_zero() {
                free += 1;
            } else if !d.is_one() {
                ords.push(d);
            }
        }
        PresentedAbGroup { free_rank: free, torsion: invariant_factors(ords), divisible_rank, vector_rank }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty() && self.divisible_rank == 0 && self.vector_rank == 0
    }

    pub fn is_finitely_generated(&self) -> bool {
        self.divisible_rank == 0 && self.vector_rank == 0
    }

    /// Number of cyclic generators of a finitely generated group.
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Order if the group is finite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 || self.divisible_rank > 0 || self.vector_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().product())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        Self::with_all(
            self.free_rank + other.free_rank,
            t,
            self.divisible_rank + other.divisible_rank,
            self.vector_rank + other.vector_rank,
        )
    }

    /// The presentation `Z^n -> Z^n` whose cokernel is this group (f.g. part only).
    pub fn relation_lattice(&self) -> SemiLattice {
        let n = self.generator_count();
        let mut gens = Vec::new();
        for (i, d) in self.torsion.iter().enumerate() {
            let mut v = super::rational::zero_vec(n);
            v[self.free_rank + i] = Q::from_integer(d.clone());
            gens.push(v);
        }
        SemiLattice::new(n, Vec::new(), gens)
    }
}

/// Invariant factors of a list of cyclic orders (each ≥ 2).
fn invariant_factors(orders: Vec<BigInt>) -> Vec<BigInt> {
    if orders.len() <= 1 {
        return orders;
    }
    if orders.windows(2).all(|w| w[1].is_multiple_of(&w[0])) {
        return orders;
    }
    let n = orders.len();
    let snf = smith_normal_form(&IntMatrix::diagonal(n, n, &orders));
    snf.diagonal().into_iter().filter(|d| !d.is_one()).collect()
}

impl fmt::Display for PresentedAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        match self.divisible_rank {
            0 => {}
            1 => parts.push("Q/Z".to_string()),
            r => parts.push(format!("(Q/Z)^{r}")),
        }
        match self.vector_rank {
            0 => {}
            1 => parts.push("Q".to_string()),
            r => parts.push(format!("Q^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Serialize for PresentedAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let extra = usize::from(self.divisible_rank > 0) + usize::from(self.vector_rank > 0);
        let mut m = s.serialize_map(Some(2 + extra))?;
        m.serialize_entry("free_rank", &self.free_rank)?;
        let torsion: Vec<serde_json::Value> = self
            .torsion
            .iter()
            .map(|d| match d.to_u64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(d.to_string()),
            })
            .collect();
        m.serialize_entry("torsion", &torsion)?;
        if self.divisible_rank > 0 {
            m.serialize_entry("divisible_rank", &self.divisible_rank)?;
        }
        if self.vector_rank > 0 {
            m.serialize_entry("vector_rank", &self.vector_rank)?;
        }
        m.end()
    }
}

/// Cokernel of `m`, read as relations (columns) on `Z^rows`.
pub fn cokernel(m: &IntMatrix) -> PresentedAbGroup {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let nonzero: Vec<BigInt> = diag.iter().filter(|d| !d.is_zero()).cloned().collect();
    PresentedAbGroup::new(m.rows() - nonzero.len(), nonzero)
}

/// Homomorphism of finitely generated groups in their cyclic bases
/// (free generators first, then torsion generators in chain order).
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: PresentedAbGroup,
    pub target: PresentedAbGroup,
    pub matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(source: PresentedAbGroup, target: PresentedAbGroup, matrix: IntMatrix) -> Result<Self, AbError> {
        if !source.is_finitely_generated() || !target.is_finitely_generated() {
            return Err(AbError::DimensionMismatch("homomorphisms need finitely generated groups".into()));
        }
        if matrix.rows() != target.generator_count() || matrix.cols() != source.generator_count() {
            return Err(AbError::DimensionMismatch(format!(
                "matrix is {}x{}, groups need {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generator_count(),
                source.generator_count()
            )));
        }
        let h = GroupHom { source, target, matrix };
        let rel_t = h.target.relation_lattice();
        let qm = h.qmatrix();
        for (i, d) in h.source.torsion.iter().enumerate() {
            let j = h.source.free_rank + i;
            let mut e = super::rational::zero_vec(h.source.generator_count());
            e[j] = Q::from_integer(d.clone());
            if !rel_t.contains(&qm.apply(&e)) {
                return Err(AbError::IllDefined(format!("torsion generator {j} of order {d}")));
            }
        }
        Ok(h)
    }

    pub fn zero(source: PresentedAbGroup, target: PresentedAbGroup) -> Self {
        let matrix = IntMatrix::zeros(target.generator_count(), source.generator_count());
        GroupHom { source, target, matrix }
    }

    pub fn qmatrix(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.matrix.rows(), self.matrix.cols());
        for (i, j, v) in self.matrix.iter() {
            m.data[i][j] = Q::from_integer(v.clone());
        }
        m
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.matrix.apply(x);
        reduce_mod_relations(&self.target, y)
    }

    pub fn is_zero(&self) -> bool {
        let rel = self.target.relation_lattice();
        let qm = self.qmatrix();
        qm.columns().iter().all(|c| rel.contains(c))
    }

    pub fn compose(&self, first: &GroupHom) -> Result<GroupHom, AbError> {
        if first.target != self.source {
            return Err(AbError::DimensionMismatch("composition of incompatible maps".into()));
        }
        Ok(GroupHom {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&first.matrix),
        })
    }
}

fn reduce_mod_relations(g: &PresentedAbGroup, mut y: Vec<BigInt>) -> Vec<BigInt> {
    for (i, d) in g.torsion.iter().enumerate() {
        y[g.free_rank + i] = super::lattice::modulo(&y[g.free_rank + i], d);
    }
    y
}

/// `ker g / im f` with a class map and a section.
#[derive(Clone, Debug)]
pub struct Homology {
    pub group: PresentedAbGroup,
    pub decomposition: Decomposition,
    middle: PresentedAbGroup,
}

impl Homology {
    /// Class of an element of `ker g`; `None` if the element is not a cycle.
    pub fn class_of(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.decomposition.coords(&to_q(x))?;
        to_z(&c)
    }

    /// A representative of the class with the given coordinates.
    pub fn lift(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let v = self.decomposition.lift(&to_q(coords));
        let z = to_z(&v).expect("finitely generated lifts are integral");
        reduce_mod_relations(&self.middle, z)
    }
}

pub fn homology_at(f: &GroupHom, g: &GroupHom) -> Result<Homology, AbError> {
    if f.target != g.source {
        return Err(AbError::DimensionMismatch("f and g do not compose".into()));
    }
    if !g.compose(f)?.is_zero() {
        return Err(AbError::CompositionNotZero);
    }
    let b = &g.source;
    let n = b.generator_count();
    let ker = SemiLattice::standard_lattice(n).preimage(&g.qmatrix(), &g.target.relation_lattice());
    let im = SemiLattice::standard_lattice(f.source.generator_count()).image(&f.qmatrix());
    let rel = im.sum(&b.relation_lattice());
    let decomposition = Subquotient::new(ker, rel).decompose();
    Ok(Homology { group: decomposition.group(), decomposition, middle: b.clone() })
}

/// Coefficient change on the isomorphism type.
///
/// `ModP(p)` tensors with `Z/p`. `Rational` tensors with `Q`; the result is a
/// vector space reported by its dimension in `free_rank`. `QmodZ` gives the
/// divisible-dual form in which each free summand becomes a copy of `Q/Z` and
/// torsion is kept.
pub fn change_coefficients(g: &PresentedAbGroup, target: CoefficientTag) -> Result<PresentedAbGroup, AbError> {
    match target {
        CoefficientTag::ModP(p) => {
            if p < 2 || !super::is_prime(p) {
                return Err(AbError::UnsupportedTarget(format!("Z/{p} is not a prime field")));
            }
            let pb = BigInt::from(p);
            let mut orders = vec![pb.clone(); g.free_rank];
            for d in &g.torsion {
                orders.push(d.gcd(&pb));
            }
            Ok(PresentedAbGroup::new(0, orders))
        }
        CoefficientTag::Rational => Ok(PresentedAbGroup::free(g.free_rank + g.vector_rank)),
        CoefficientTag::QmodZ => Ok(PresentedAbGroup::with_all(
            0,
            g.torsion.clone(),
            g.free_rank + g.divisible_rank,
            0,
        )),
        CoefficientTag::IntZ => Err(AbError::UnsupportedTarget("Z".into())),
    }
}
