//! Free strict n-categories on a computad, decided by bounded congruence closure.
//!
//! Cells of each dimension live in their own e-graph level. A level is
//! saturated under the strict axioms up to a size bound and then frozen;
//! the next level uses its classes as boundaries.

mod certificate;
mod engine;
mod generate;
mod term;

pub use certificate::{Certificate, DistinctReason, Step, Verdict};
pub use engine::{
    AuditReport, AxiomFamily, CellInfo, ClassId, CongruenceEngine, EngineStats, SaturationReport,
};
pub use generate::generate_terms;
pub use term::{Side, Signature, Term};

use serde::Serialize;

/// Limits for saturation. `size` bounds the number of top-dimensional
/// generators in a cell and applies at every level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub size: usize,
    pub max_rounds: usize,
    pub max_nodes: usize,
}

impl Bounds {
    pub fn with_size(size: usize) -> Self {
        Bounds {
            size,
            ..Bounds::default()
        }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            size: 3,
            max_rounds: 32,
            max_nodes: 400_000,
        }
    }
}
