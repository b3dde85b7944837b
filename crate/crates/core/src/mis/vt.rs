use crate::engine::{run_simulation, EngineError, ExecutionTrace, Graph, NodeCtx, NodeProgram, Next, Port, RunConfig};
use crate::graphs::IdAssignment;
use crate::vtree::awake_schedule;

use super::MisState;

/// VT-MIS with virtual round `r` in engine round `r - 1`.
///
/// The holder of ID `k` is awake in round `k` and in the rounds of its communication set.
/// Every awake node announces whether it is in the MIS; an undecided node that hears a
/// member drops out, and in its own round a still undecided node joins.
#[derive(Clone, Debug)]
pub struct VtNode {
    id: u64,
    rounds: Vec<u64>,
    state: MisState,
}

impl VtNode {
    pub fn new(id: u64, id_bound: u64) -> Self {
        let rounds = awake_schedule(id, id_bound).unwrap_or_default();
        VtNode { id, rounds, state: MisState::Undecided }
    }

    fn next_round(&self, now: u64) -> Option<u64> {
        self.rounds.iter().map(|r| r - 1).find(|&r| r > now)
    }
}

impl NodeProgram for VtNode {
    type Msg = bool;
    type Output = MisState;

    fn send(&mut self, ctx: &mut NodeCtx<'_>) -> Vec<(Port, bool)> {
        if !self.rounds.contains(&(ctx.round + 1)) {
            return Vec::new();
        }
        let in_mis = self.state == MisState::InMis;
        (0..ctx.degree).map(|i| (Port::from_index(i), in_mis)).collect()
    }

    fn receive(&mut self, ctx: &mut NodeCtx<'_>, inbox: &[(Port, bool)]) -> Next<MisState> {
        if self.state == MisState::Undecided {
            if inbox.iter().any(|&(_, m)| m) {
                self.state = MisState::NotInMis;
                return Next::Halt(self.state);
            }
            if ctx.round + 1 == self.id {
                self.state = MisState::InMis;
            }
        }
        match self.next_round(ctx.round) {
            Some(r) => Next::WakeAt(r),
            None if self.state == MisState::Undecided => Next::Halt(MisState::Failed),
            None => Next::Halt(self.state),
        }
    }

    fn message_bits(&self, _: &bool) -> u32 {
        1
    }
}

/// Runs VT-MIS over the ID range `[1, ids.bound()]`.
pub fn vt_mis(graph: &Graph, ids: &IdAssignment, config: &RunConfig) -> Result<ExecutionTrace<MisState>, EngineError> {
    let programs = ids.ids().iter().map(|id| VtNode::new(id.0, ids.bound())).collect();
    run_simulation(graph, programs, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ceil_log2;
    use crate::graphs::NodeId;
    use crate::mis::final_states;

    fn run(edges: &[(usize, usize)], ids: &[u64], bound: u64) -> (Vec<MisState>, usize) {
        let g = Graph::from_edges(ids.len(), edges).unwrap();
        let ids = IdAssignment::new(ids.iter().map(|&i| NodeId(i)).collect(), bound).unwrap();
        let trace = vt_mis(&g, &ids, &RunConfig::new(bound.max(ids.len() as u64), 0)).unwrap();
        (final_states(&trace), trace.max_awake())
    }

    use MisState::*;

    #[test]
    fn single_node_joins() {
        assert_eq!(run(&[], &[1], 1).0, vec![InMis]);
    }

    #[test]
    fn path_takes_the_ends() {
        assert_eq!(run(&[(0, 1), (1, 2)], &[1, 2, 3], 3).0, vec![InMis, NotInMis, InMis]);
    }

    #[test]
    fn triangle_takes_the_smallest() {
        assert_eq!(run(&[(0, 1), (1, 2), (0, 2)], &[2, 1, 3], 3).0, vec![NotInMis, InMis, NotInMis]);
    }

    #[test]
    fn awake_rounds_stay_within_the_tree_depth() {
        let bound = 1000;
        let (states, awake) = run(&[(0, 1), (1, 2), (2, 3)], &[700, 3, 999, 1], bound);
        assert_eq!(states, vec![NotInMis, InMis, NotInMis, InMis]);
        assert!(awake <= ceil_log2(bound) as usize + 1);
    }
}
