//! Oracles, validity checks, statistical experiments, scaling studies and report output.

mod experiments;
mod oracle;
mod report;

pub use experiments::{residual_sparsity_experiment, shattering_experiment, ExperimentReport};
pub use oracle::{check_mis, component_sizes, sequential_lfmis, states_from_set, MisReport};
pub use report::{
    median, run_algorithm, scaling_runs, scaling_study, summarize, write_csv, Algorithm, GraphKind, GraphSpec,
    RunMetrics, RunOutcome, ScalingRow,
};

use thiserror::Error;

use crate::engine::EngineError;
use crate::graphs::GraphError;
use crate::ldt::LdtError;
use crate::mis::ParamsError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("ordering is not a permutation of the nodes")]
    NotPermutation,
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ldt(#[from] LdtError),
    #[error(transparent)]
    AwakeParams(#[from] ParamsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
