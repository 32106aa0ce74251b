//! Exact arithmetic over Z, Z/p, Q and Q/Z: Smith normal form, presented
//! abelian groups, homomorphisms and subquotients.

mod group;
mod lattice;
mod matrix;
pub mod rational;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use group::{change_coefficients, cokernel, homology_at, GroupHom, Homology, PresentedAbGroup};
pub use lattice::{frac_part, modulo, Decomposition, GenKind, SemiLattice, Subquotient};
pub use matrix::{smith_normal_form, IntMatrix, SmithDecomposition};
pub(crate) use matrix::{identity_dense as matrix_identity, integer_left_kernel, DenseSmith};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbError {
    #[error("composition of consecutive maps is not zero")]
    CompositionNotZero,
    #[error("unsupported coefficient target: {0}")]
    UnsupportedTarget(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map is not well defined on {0}")]
    IllDefined(String),
}

/// Coefficient ring of a cochain or cohomology group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoefficientTag {
    IntZ,
    ModP(u64),
    Rational,
    QmodZ,
}

impl std::fmt::Display for CoefficientTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefficientTag::IntZ => write!(f, "Z"),
            CoefficientTag::ModP(p) => write!(f, "Z/{p}"),
            CoefficientTag::Rational => write!(f, "Q"),
            CoefficientTag::QmodZ => write!(f, "Q/Z"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
