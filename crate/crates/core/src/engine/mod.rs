//! Synchronous sleeping-model simulator.
//!
//! Every round has two halves. Awake nodes first emit their outbound messages
//! ([`NodeProgram::send`]), then read the messages that arrived in the same round
//! ([`NodeProgram::receive`]). A message is delivered only if the receiver is also awake in
//! that round; otherwise it is lost. All nodes are awake in round 0.

mod graph;
mod sim;
mod trace;

pub use graph::{Graph, Link, Port};
pub use sim::{run_simulation, NodeCtx, NodeProgram, Next, RunConfig};
pub use trace::{worst_case_awake, ExecutionTrace, NodeTrace, Outcome, Violation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("node {node} out of range for {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("port {port} at node {node} does not map back")]
    BrokenPort { node: usize, port: Port },
    #[error("line {line}: cannot parse {text:?}")]
    Parse { line: usize, text: String },
    #[error("{programs} programs for {nodes} nodes")]
    ProgramCount { programs: usize, nodes: usize },
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("run stopped at the round cutoff with unhalted nodes")]
    Incomplete,
}

/// `⌈log2 x⌉` for `x ≥ 1`; 0 for `x ≤ 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Bits needed to write any value in `0..count` (at least 0).
pub fn bits_for(count: u64) -> u32 {
    ceil_log2(count)
}
