//! Single-block tree operations run directly on an existing LDT forest.
//!
//! Round 0 is the model's mandatory awake round; every operation's block starts at round 1.

use serde::Serialize;

use super::schedule::{block_len, next_slots, transmission_schedule, Slot, TransmissionSchedule};
use super::{local_trees, LdtError, LdtState, LocalTree};
use crate::engine::{bits_for, run_simulation, ExecutionTrace, Graph, NodeCtx, NodeProgram, Next, Port, RunConfig};
use crate::graphs::IdAssignment;

const START: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Broadcast,
    UpcastMin,
    Adjacent,
}

#[derive(Clone, Debug, Default)]
struct PrimitiveOut {
    value: Option<u64>,
    side: Vec<(Port, u64)>,
}

struct PrimitiveNode {
    op: Op,
    tree: LocalTree,
    degree: usize,
    schedule: TransmissionSchedule,
    bits: u32,
    out: PrimitiveOut,
    pending: Vec<Slot>,
}

impl PrimitiveNode {
    fn wants(&self, slot: Slot) -> bool {
        let has_children = !self.tree.children.is_empty();
        let is_root = self.tree.parent.is_none();
        match (self.op, slot) {
            (Op::Broadcast, Slot::DownReceive) => !is_root,
            (Op::Broadcast, Slot::DownSend) => has_children,
            (Op::UpcastMin, Slot::UpReceive) => has_children,
            (Op::UpcastMin, Slot::UpSend) => !is_root,
            (Op::Adjacent, Slot::Side) => self.degree > self.tree.children.len() + usize::from(!is_root),
            _ => false,
        }
    }

    fn side_ports(&self) -> impl Iterator<Item = Port> + '_ {
        (0..self.degree).map(Port::from_index).filter(|&p| !self.tree.is_tree_port(p))
    }
}

impl NodeProgram for PrimitiveNode {
    type Msg = u64;
    type Output = PrimitiveOut;

    fn send(&mut self, _ctx: &mut NodeCtx<'_>) -> Vec<(Port, u64)> {
        let mut out = Vec::new();
        let Some(value) = self.out.value else { return out };
        for slot in &self.pending {
            match slot {
                Slot::DownSend => out.extend(self.tree.children.iter().map(|&c| (c, value))),
                Slot::Side => out.extend(self.side_ports().map(|p| (p, value))),
                Slot::UpSend => out.extend(self.tree.parent.map(|p| (p, value))),
                _ => {}
            }
        }
        out
    }

    fn receive(&mut self, ctx: &mut NodeCtx<'_>, inbox: &[(Port, u64)]) -> Next<PrimitiveOut> {
        let down = self.pending.contains(&Slot::DownReceive);
        let up = self.pending.contains(&Slot::UpReceive);
        let side = self.pending.contains(&Slot::Side);
        for &(port, msg) in inbox {
            if Some(port) == self.tree.parent && down {
                self.out.value = Some(msg);
            } else if self.tree.children.contains(&port) && up {
                self.out.value = Some(self.out.value.map_or(msg, |v| v.min(msg)));
            } else if !self.tree.is_tree_port(port) && side {
                self.out.side.push((port, msg));
            }
        }
        let after = (ctx.round >= START).then_some(ctx.round);
        match next_slots(&self.schedule, after, |s| self.wants(s)) {
            Some((round, slots)) => {
                self.pending = slots;
                Next::WakeAt(round)
            }
            None => Next::Halt(std::mem::take(&mut self.out)),
        }
    }

    fn message_bits(&self, _msg: &u64) -> u32 {
        self.bits
    }
}

fn run_primitive(
    graph: &Graph,
    ids: &IdAssignment,
    states: &[LdtState],
    op: Op,
    values: &[Option<u64>],
    bits: u32,
    config: &RunConfig,
) -> Result<ExecutionTrace<PrimitiveOut>, LdtError> {
    let trees = local_trees(graph, ids, states)?;
    let programs = trees
        .into_iter()
        .enumerate()
        .map(|(u, tree)| {
            let schedule =
                transmission_schedule(tree.depth, states[u].n_bound, tree.parent.is_none(), START)?;
            Ok(PrimitiveNode {
                op,
                degree: graph.degree(u),
                schedule,
                bits,
                out: PrimitiveOut { value: values[u], side: Vec::new() },
                pending: Vec::new(),
                tree,
            })
        })
        .collect::<Result<Vec<_>, LdtError>>()?;
    Ok(run_simulation(graph, programs, config)?)
}

/// Every root sends `message` (of `bits` bits) to all nodes of its tree in one block.
/// Each node's output is the message it holds afterwards.
pub fn fragment_broadcast(
    graph: &Graph,
    ids: &IdAssignment,
    states: &[LdtState],
    message: u64,
    bits: u32,
    config: &RunConfig,
) -> Result<ExecutionTrace<Option<u64>>, LdtError> {
    let values: Vec<Option<u64>> =
        states.iter().map(|s| s.is_root().then_some(message)).collect();
    Ok(run_primitive(graph, ids, states, Op::Broadcast, &values, bits, config)?
        .map_outputs(|_, o| o.value))
}

/// Broadcast over an LDT. Same block as [`fragment_broadcast`].
pub fn ldt_broadcast(
    graph: &Graph,
    ids: &IdAssignment,
    states: &[LdtState],
    message: u64,
    bits: u32,
    config: &RunConfig,
) -> Result<ExecutionTrace<Option<u64>>, LdtError> {
    fragment_broadcast(graph, ids, states, message, bits, config)
}

/// Converge-cast of the minimum. Each node outputs the minimum over its subtree, so the
/// root outputs the minimum over the whole tree.
pub fn upcast_min(
    graph: &Graph,
    ids: &IdAssignment,
    states: &[LdtState],
    values: &[u64],
    bits: u32,
    config: &RunConfig,
) -> Result<ExecutionTrace<Option<u64>>, LdtError> {
    let values: Vec<Option<u64>> = values.iter().map(|&v| Some(v)).collect();
    Ok(run_primitive(graph, ids, states, Op::UpcastMin, &values, bits, config)?
        .map_outputs(|_, o| o.value))
}

/// Nodes with a message send it over every non-tree edge in the shared Side round. Each node
/// outputs what it received, tagged with the arrival port.
pub fn transmit_adjacent(
    graph: &Graph,
    ids: &IdAssignment,
    states: &[LdtState],
    messages: &[Option<u64>],
    bits: u32,
    config: &RunConfig,
) -> Result<ExecutionTrace<Vec<(Port, u64)>>, LdtError> {
    Ok(run_primitive(graph, ids, states, Op::Adjacent, messages, bits, config)?
        .map_outputs(|_, o| o.side))
}

/// Position of a node in the generalized in-order of its LDT, and the LDT's size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Rank {
    pub rank: u64,
    pub total: u64,
}

/// Bits for a size or offset that may exceed the bound by one (the overflow marker).
pub(crate) fn size_bits(n_bound: u64) -> u32 {
    bits_for(n_bound + 2).max(1)
}

/// Own rank and per-child offsets for a node with offset `x` and ordered child subtree sizes.
pub(crate) fn split_offsets(x: u64, sizes: &[u64]) -> (u64, Vec<u64>) {
    let rank = x + sizes.first().copied().unwrap_or(0) + 1;
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut acc = x + 1;
    for (i, &s) in sizes.iter().enumerate() {
        if i == 0 {
            offsets.push(x);
        } else {
            offsets.push(acc);
        }
        acc += s;
    }
    (rank, offsets)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankMsg {
    Size(u64),
    Offset { x: u64, total: u64 },
}

struct RankNode {
    tree: LocalTree,
    n_bound: u64,
    up: TransmissionSchedule,
    down: TransmissionSchedule,
    child_sizes: Vec<u64>,
    offset: u64,
    total: u64,
    pending: Vec<Slot>,
    in_down: bool,
}

impl RankNode {
    fn size(&self) -> u64 {
        (1 + self.child_sizes.iter().sum::<u64>()).min(self.n_bound + 1)
    }

    fn wants(&self, slot: Slot, down: bool) -> bool {
        let has_children = !self.tree.children.is_empty();
        let is_root = self.tree.parent.is_none();
        match (down, slot) {
            (false, Slot::UpReceive) => has_children,
            (false, Slot::UpSend) => !is_root,
            (true, Slot::DownReceive) => !is_root,
            (true, Slot::DownSend) => has_children,
            _ => false,
        }
    }

    fn outcome(&self) -> Option<Rank> {
        if self.total == 0 || self.total > self.n_bound {
            return None;
        }
        let (rank, _) = split_offsets(self.offset, &self.child_sizes);
        Some(Rank { rank, total: self.total })
    }
}

impl NodeProgram for RankNode {
    type Msg = RankMsg;
    type Output = Option<Rank>;

    fn send(&mut self, _ctx: &mut NodeCtx<'_>) -> Vec<(Port, RankMsg)> {
        let mut out = Vec::new();
        for slot in &self.pending {
            match (self.in_down, slot) {
                (false, Slot::UpSend) => out.push((self.tree.parent.unwrap(), RankMsg::Size(self.size()))),
                (true, Slot::DownSend) => {
                    if self.tree.parent.is_none() {
                        self.total = self.size();
                    }
                    let (_, offsets) = split_offsets(self.offset, &self.child_sizes);
                    for (&c, x) in self.tree.children.iter().zip(offsets) {
                        out.push((c, RankMsg::Offset { x, total: self.total }));
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn receive(&mut self, ctx: &mut NodeCtx<'_>, inbox: &[(Port, RankMsg)]) -> Next<Option<Rank>> {
        for &(port, msg) in inbox {
            match msg {
                RankMsg::Size(s) => {
                    if let Some(i) = self.tree.children.iter().position(|&c| c == port) {
                        self.child_sizes[i] = s;
                    }
                }
                RankMsg::Offset { x, total } if Some(port) == self.tree.parent => {
                    self.offset = x;
                    self.total = total;
                }
                RankMsg::Offset { .. } => {}
            }
        }
        let after = (ctx.round >= START).then_some(ctx.round);
        if !self.in_down {
            if let Some((r, slots)) = next_slots(&self.up, after, |s| self.wants(s, false)) {
                self.pending = slots;
                return Next::WakeAt(r);
            }
            self.in_down = true;
        }
        if let Some((r, slots)) = next_slots(&self.down, after, |s| self.wants(s, true)) {
            self.pending = slots;
            return Next::WakeAt(r);
        }
        if self.tree.parent.is_none() {
            self.total = self.size();
        }
        Next::Halt(self.outcome())
    }

    fn message_bits(&self, msg: &RankMsg) -> u32 {
        let b = size_bits(self.n_bound);
        match msg {
            RankMsg::Size(_) => b,
            RankMsg::Offset { .. } => 2 * b,
        }
    }
}

/// Two blocks: subtree sizes flow up, then offsets and the total flow down. Outputs `None`
/// when the tree turns out larger than its size bound.
pub fn ldt_ranking(
    graph: &Graph,
    ids: &IdAssignment,
    states: &[LdtState],
    config: &RunConfig,
) -> Result<ExecutionTrace<Option<Rank>>, LdtError> {
    let trees = local_trees(graph, ids, states)?;
    let programs = trees
        .into_iter()
        .enumerate()
        .map(|(u, tree)| {
            let n = states[u].n_bound;
            let root = tree.parent.is_none();
            Ok(RankNode {
                up: transmission_schedule(tree.depth, n, root, START)?,
                down: transmission_schedule(tree.depth, n, root, START + block_len(n))?,
                child_sizes: vec![0; tree.children.len()],
                tree,
                n_bound: n,
                offset: 0,
                total: 0,
                pending: Vec::new(),
                in_down: false,
            })
        })
        .collect::<Result<Vec<_>, LdtError>>()?;
    Ok(run_simulation(graph, programs, config)?)
}
