//! Exact-arithmetic laboratory for abelian Cayley color graphs and
//! polynomial incidence counting over finite fields.
//!
//! The lab builds the incidence graph of a monomial-supported polynomial
//! space V ⊆ F_q[x_1..x_m] — the Cayley color graph on (V, +) whose
//! connection function counts the zeros of f − f' — computes its spectrum
//! exactly through additive characters valued in ℤ\[ζ_p\], and verifies the
//! incidence identities and mixing inequalities that the spectrum implies.
//! Everything that is an exact statement is checked in exact arithmetic;
//! floating point appears only where a bound is genuinely irrational.

pub mod cayley;
pub mod cyclo;
pub mod error;
pub mod ffield;
pub mod harness;
pub mod incidence;
pub mod polyspace;
pub mod report;
pub mod rng;

pub use error::{LabError, Result};
pub use ffield::{FieldCtx, FieldDescriptor, FieldElem};

use serde::{Deserialize, Serialize};

/// Enumeration budgets. Defaults keep a full run at desk scale.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct Budget {
    /// Cap on q^dim, the number of polynomials in a space.
    #[serde(default = "Budget::default_max_space")]
    pub max_space: u64,
    /// Cap on q^m, the number of evaluation points.
    #[serde(default = "Budget::default_max_points")]
    pub max_points: u64,
    /// Cap on |G| for the quadratic-work spectrum paths.
    #[serde(default = "Budget::default_max_spectrum")]
    pub max_spectrum: u64,
}

impl Budget {
    fn default_max_space() -> u64 {
        1 << 22
    }
    fn default_max_points() -> u64 {
        1 << 16
    }
    fn default_max_spectrum() -> u64 {
        1 << 13
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_space: Budget::default_max_space(),
            max_points: Budget::default_max_points(),
            max_spectrum: Budget::default_max_spectrum(),
        }
    }
}
