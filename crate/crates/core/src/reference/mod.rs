//! Classical baselines: torus matching, brute-force minimum weight and exact
//! maximum likelihood by coset enumeration.

mod min_weight;
mod ml;
mod mwpm;

pub use min_weight::min_weight_decode;
pub use ml::{exact_ml_decode, ml_class_weights, MlClassWeights, ML_MAX_TERMS_LOG2};
pub use mwpm::{
    match_defects, mwpm_decode, mwpm_decode_detailed, mwpm_decode_plaquettes, torus_distance,
    DefectSet, Matching, MwpmOutcome, Sector, Site, EXACT_MATCHING_LIMIT,
};

use thiserror::Error;

use crate::code::CodeError;
use crate::gf2::Gf2Error;

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error("decoder requires a code built on a toric lattice")]
    NotToric,
    #[error("odd number of defects ({0}) in one sector")]
    OddDefects(usize),
    #[error("syndrome has {found} bits, expected {expected}")]
    SyndromeWidth { expected: usize, found: usize },
    #[error("syndrome is not produced by any error")]
    InvalidSyndrome,
    #[error("no consistent error of weight at most {cap}")]
    NotFound { cap: usize },
    #[error("coset enumeration needs 2^{needed} terms, limit is 2^{limit}")]
    SizeGuard { needed: usize, limit: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

impl From<Gf2Error> for ReferenceError {
    fn from(e: Gf2Error) -> Self {
        ReferenceError::Code(e.into())
    }
}
