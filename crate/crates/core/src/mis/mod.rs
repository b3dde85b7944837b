//! MIS node programs: VT-MIS, LDT-MIS, Awake-MIS and a Luby baseline.

mod awake;
mod luby;
mod vt;

pub use awake::{awake_mis, awake_mis_batches, AwakeMsg, log_star, AwakeMisNode, AwakeMisParams, BatchAssignment, ParamsError};
pub use luby::{luby_baseline, LubyNode};
pub use vt::{vt_mis, VtNode};

use serde::{Deserialize, Serialize};

use crate::engine::{ExecutionTrace, Graph, Outcome, RunConfig};
use crate::graphs::IdAssignment;
use crate::ldt::{ldt_pipeline, Goal, LdtError, PipelineOutput};

/// Output variable of every MIS program. Decided states are terminal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MisState {
    #[default]
    Undecided,
    InMis,
    NotInMis,
    Failed,
}

impl MisState {
    pub fn is_decided(self) -> bool {
        matches!(self, MisState::InMis | MisState::NotInMis)
    }
}

/// Final per-node states. Engine failures, unfinished nodes and undecided halts all map to
/// [`MisState::Failed`].
pub fn final_states(trace: &ExecutionTrace<MisState>) -> Vec<MisState> {
    trace
        .outputs()
        .map(|o| match o {
            Outcome::Output(s) if s.is_decided() => *s,
            _ => MisState::Failed,
        })
        .collect()
}

/// LDT-MIS on one connected component: build an LDT, rank it, broadcast a random
/// permutation of the ranks and run VT-MIS on the permuted IDs.
pub fn ldt_mis_round(
    graph: &Graph,
    ids: &IdAssignment,
    n_bound: u64,
    config: &RunConfig,
) -> Result<ExecutionTrace<MisState>, LdtError> {
    let trace = ldt_pipeline(graph, ids, n_bound, Goal::Mis, config)?;
    Ok(trace.map_outputs(|_, o| match o {
        PipelineOutput::Decided(s) => s,
        _ => MisState::Failed,
    }))
}
