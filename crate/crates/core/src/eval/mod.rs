//! Path metrics, Monte-Carlo validation and sweeps.

mod montecarlo;
mod outage;
mod sweep;

pub use montecarlo::{expected_sinr, mc_expected_sinr, FadingModel, McEstimate, MonteCarloConfig};
pub use outage::{connectivity_outage, outage_along, OutageReport};
pub use sweep::{format_sig6, sweep, SweepResult, SweepRow, SweepSpec, SWEEP_HEADER};

use thiserror::Error;

use crate::gainmap::MapError;
use crate::planner::PlanError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
