//! Labeled distance trees (LDTs): the block transmission schedule, the tree primitives built
//! on it, deterministic construction, broadcast and ranking.

mod check;
mod node;
mod primitives;
mod schedule;

pub use check::{check_ldt, in_order_ranks, LdtViolation};
pub use node::{ldt_construct_round, ldt_pipeline, Choice, ConstructOutcome, Goal, LdtMsg, LdtNode, LdtPlan, PipelineOutput};

pub use primitives::{
    fragment_broadcast, ldt_broadcast, ldt_ranking, transmit_adjacent, upcast_min, Rank,
};
pub use schedule::{block_len, transmission_schedule, Slot, TransmissionSchedule};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{EngineError, Graph, Port};
use crate::graphs::{IdAssignment, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LdtError {
    #[error("size bound must be positive")]
    ZeroBound,
    #[error("depth {depth} exceeds bound {n_bound}")]
    DepthTooLarge { depth: u64, n_bound: u64 },
    #[error("non-root node at depth 0")]
    NonRootAtDepthZero,
    #[error("{states} LDT states for {nodes} nodes")]
    StateCount { states: usize, nodes: usize },
    #[error("node {node}: tree neighbor {id} is not adjacent")]
    NotAdjacent { node: usize, id: NodeId },
    #[error("ID {0} appears on several nodes")]
    DuplicateId(NodeId),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Edge identifier: endpoint IDs in increasing order, compared lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    pub lo: u64,
    pub hi: u64,
}

impl EdgeId {
    pub fn new(a: u64, b: u64) -> Self {
        EdgeId { lo: a.min(b), hi: a.max(b) }
    }

    pub fn has(&self, id: u64) -> bool {
        self.lo == id || self.hi == id
    }

    pub fn other(&self, id: u64) -> u64 {
        if self.lo == id {
            self.hi
        } else {
            self.lo
        }
    }
}

/// What one node knows about its LDT.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LdtState {
    pub root_id: NodeId,
    pub depth: u64,
    pub parent_id: Option<NodeId>,
    /// Ascending by ID.
    pub children_ids: Vec<NodeId>,
    pub n_bound: u64,
}

impl LdtState {
    /// A single-node tree.
    pub fn singleton(id: NodeId, n_bound: u64) -> Self {
        LdtState { root_id: id, depth: 0, parent_id: None, children_ids: Vec::new(), n_bound }
    }

    pub fn is_root(&self) -> bool {
        self.parent_id.is_none()
    }
}

/// The same information in terms of local ports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct LocalTree {
    pub root_id: u64,
    pub depth: u64,
    pub parent: Option<Port>,
    /// Ordered by ascending child ID.
    pub children: Vec<Port>,
}

impl LocalTree {
    pub fn singleton(id: u64) -> Self {
        LocalTree { root_id: id, depth: 0, parent: None, children: Vec::new() }
    }

    pub fn is_tree_port(&self, port: Port) -> bool {
        self.parent == Some(port) || self.children.contains(&port)
    }
}

/// Port-level trees for every node, resolving parent and child IDs through the graph.
pub(crate) fn local_trees(
    graph: &Graph,
    ids: &IdAssignment,
    states: &[LdtState],
) -> Result<Vec<LocalTree>, LdtError> {
    if states.len() != graph.node_count() {
        return Err(LdtError::StateCount { states: states.len(), nodes: graph.node_count() });
    }
    let mut index = HashMap::with_capacity(ids.len());
    for (u, id) in ids.ids().iter().enumerate() {
        if index.insert(*id, u).is_some() {
            return Err(LdtError::DuplicateId(*id));
        }
    }
    let port_to = |u: usize, id: NodeId| -> Result<Port, LdtError> {
        index
            .get(&id)
            .and_then(|&v| graph.port_to(u, v))
            .ok_or(LdtError::NotAdjacent { node: u, id })
    };
    states
        .iter()
        .enumerate()
        .map(|(u, s)| {
            Ok(LocalTree {
                root_id: s.root_id.0,
                depth: s.depth,
                parent: s.parent_id.map(|p| port_to(u, p)).transpose()?,
                children: s.children_ids.iter().map(|&c| port_to(u, c)).collect::<Result<_, _>>()?,
            })
        })
        .collect()
}
