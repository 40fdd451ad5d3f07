//! Binary reachability: the formulas ψ and φ, and exact pair queries.

mod check;
mod formulas;

use thiserror::Error;

pub use check::{check_pair, scale_factor};
pub use formulas::{build_phi, build_psi, phi_encoding, psi_encoding, PhiEncoding, ReachEncoding};

use crate::model::ModelError;
use crate::region::RegionError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReachError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("common denominator {0} of the query is too large")]
    ScaleOverflow(u64),
}
