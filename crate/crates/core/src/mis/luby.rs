use rand::Rng;

use crate::engine::{ceil_log2, run_simulation, EngineError, ExecutionTrace, Graph, NodeCtx, NodeProgram, Next, Port, RunConfig};

use super::MisState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LubyMsg {
    Priority(u64),
    Joined,
}

/// Randomized MIS where every undecided node is awake in every round.
///
/// Each round an undecided node draws a fresh priority and sends it to all neighbors. A node
/// whose priority is strictly below every priority it hears joins, announces it in the next
/// round and halts. A node hearing such an announcement halts outside the MIS.
#[derive(Clone, Debug)]
pub struct LubyNode {
    priority_bits: u32,
    priority: u64,
    joining: bool,
}

impl LubyNode {
    pub fn new(n_bound: u64) -> Self {
        LubyNode { priority_bits: (4 * ceil_log2(n_bound.max(2))).min(63), priority: 0, joining: false }
    }
}

impl NodeProgram for LubyNode {
    type Msg = LubyMsg;
    type Output = MisState;

    fn send(&mut self, ctx: &mut NodeCtx<'_>) -> Vec<(Port, LubyMsg)> {
        let msg = if self.joining {
            LubyMsg::Joined
        } else {
            self.priority = ctx.rng.gen_range(0..1u64 << self.priority_bits);
            LubyMsg::Priority(self.priority)
        };
        (0..ctx.degree).map(|i| (Port::from_index(i), msg)).collect()
    }

    fn receive(&mut self, _ctx: &mut NodeCtx<'_>, inbox: &[(Port, LubyMsg)]) -> Next<MisState> {
        if self.joining {
            return Next::Halt(MisState::InMis);
        }
        if inbox.iter().any(|(_, m)| *m == LubyMsg::Joined) {
            return Next::Halt(MisState::NotInMis);
        }
        self.joining = inbox.iter().all(|(_, m)| matches!(m, LubyMsg::Priority(p) if *p > self.priority));
        Next::Continue
    }

    fn message_bits(&self, msg: &LubyMsg) -> u32 {
        match msg {
            LubyMsg::Priority(_) => self.priority_bits,
            LubyMsg::Joined => 1,
        }
    }
}

pub fn luby_baseline(graph: &Graph, config: &RunConfig) -> Result<ExecutionTrace<MisState>, EngineError> {
    let programs = (0..graph.node_count()).map(|_| LubyNode::new(config.n_bound)).collect();
    run_simulation(graph, programs, config)
}
