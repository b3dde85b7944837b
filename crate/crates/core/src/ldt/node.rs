//! The per-node program behind LDT construction, ranking and LDT-MIS.
//!
//! Everything runs in blocks of `2n + 1` rounds laid out from a public plan, so every node
//! of a component agrees on which block is which without communication. Within a block each
//! node is awake only in the named rounds it needs.
//!
//! Construction runs `⌈log2 n⌉ + 1` phases. A phase is:
//!
//! * probe: side exchange of LDT IDs, upcast of the minimum outgoing edge;
//! * choose: the root announces the chosen edge, the endpoints learn who chose whom, and the
//!   root learns whether its LDT is a root of the choice forest, has children there, and
//!   which LDT it points to;
//! * coloring: Cole-Vishkin steps on the choice forest until six colors remain;
//! * matching: one block per color, plus one to deliver the last proposals;
//! * merge edges: every LDT announces one edge, which joins it to a matched pair;
//! * propagation: smallest LDT ID and hop distance spread over the merge edges;
//! * reorientation: LDTs at distance `j` from the core re-hang under their neighbor at
//!   distance `j - 1`, reversing the path from the attach point to their old root.
//!
//! The last phase only probes, as a check that a single LDT spans the component.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::primitives::{size_bits, split_offsets, Rank};
use super::schedule::{block_len, next_slots, transmission_schedule, Slot, TransmissionSchedule};
use super::{EdgeId, LdtError, LdtState, LocalTree};
use crate::engine::{bits_for, ceil_log2, run_simulation, ExecutionTrace, Graph, NodeCtx, NodeProgram, Next, Port, RunConfig};
use crate::graphs::{IdAssignment, NodeId};
use crate::mis::MisState;
use crate::vtree::awake_schedule;

const MATCH_BLOCKS: u64 = 7;
const PROPAGATE_BLOCKS: u64 = 3;
/// Reorientation handles LDTs up to this many hops from the core.
const MAX_MERGE_DIST: u64 = 4;
const REORIENT_BLOCKS: u64 = MAX_MERGE_DIST + 1;
const DIST_BITS: u32 = 3;

/// Cole-Vishkin iterations that bring `colors` colors down to at most six.
pub(crate) fn cv_iterations(colors: u64) -> u32 {
    let mut b = colors;
    let mut k = 0;
    while b > 6 {
        b = 2 * u64::from(ceil_log2(b));
        k += 1;
    }
    k
}

/// One Cole-Vishkin step. A node without a parent compares against bit 0.
pub(crate) fn cv_step(own: u64, parent: Option<u64>) -> u64 {
    let i = match parent {
        Some(p) if p != own => (own ^ p).trailing_zeros() as u64,
        _ => 0,
    };
    2 * i + ((own >> i) & 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BlockKind {
    Probe,
    Choose,
    Cv(u64),
    Match(u64),
    FEdge,
    Propagate(u64),
    Reorient(u64),
    RankUp,
    RankDown,
    Chunk(u64),
}

/// Public timing of one LDT pipeline, identical at every node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LdtPlan {
    /// Upper bound on the component size.
    pub n_bound: u64,
    /// Upper bound on node IDs.
    pub id_bound: u64,
    pub bit_budget: u32,
    /// Round of the discovery step; blocks start right after.
    pub start: u64,
    pub phases: u64,
    pub cv_iterations: u32,
    pub cv_blocks: u64,
    pub construct_blocks: u64,
    pub chunk_blocks: u64,
}

impl LdtPlan {
    pub fn new(n_bound: u64, id_bound: u64, bit_budget: u32, start: u64) -> Result<Self, LdtError> {
        if n_bound == 0 || id_bound == 0 || bit_budget == 0 {
            return Err(LdtError::ZeroBound);
        }
        let phases = u64::from(ceil_log2(n_bound)) + 1;
        let cv_iterations = cv_iterations(id_bound);
        let cv_blocks = u64::from(cv_iterations.saturating_sub(1)).max(1);
        let per_phase = 2 + cv_blocks + MATCH_BLOCKS + 1 + PROPAGATE_BLOCKS + REORIENT_BLOCKS;
        let construct_blocks = (phases - 1) * per_phase + 2;
        let perm_bits = n_bound * u64::from(ceil_log2(n_bound));
        let chunk_blocks = perm_bits.div_ceil(u64::from(bit_budget));
        Ok(LdtPlan {
            n_bound,
            id_bound,
            bit_budget,
            start,
            phases,
            cv_iterations,
            cv_blocks,
            construct_blocks,
            chunk_blocks,
        })
    }

    pub fn per_phase(&self) -> u64 {
        2 + self.cv_blocks + MATCH_BLOCKS + 1 + PROPAGATE_BLOCKS + REORIENT_BLOCKS
    }

    pub fn block_len(&self) -> u64 {
        block_len(self.n_bound)
    }

    pub fn block_start(&self, b: u64) -> u64 {
        self.start + 1 + b * self.block_len()
    }

    pub fn total_blocks(&self) -> u64 {
        self.construct_blocks + 2 + self.chunk_blocks
    }

    /// Engine round of the first virtual-tree round.
    pub fn vt_base(&self) -> u64 {
        self.block_start(self.total_blocks())
    }

    /// Rounds from discovery through the last virtual-tree round.
    pub fn length(&self) -> u64 {
        1 + self.total_blocks() * self.block_len() + self.n_bound
    }

    pub fn id_bits(&self) -> u32 {
        bits_for(self.id_bound).max(1)
    }

    fn kind(&self, b: u64) -> BlockKind {
        if b >= self.construct_blocks {
            return match b - self.construct_blocks {
                0 => BlockKind::RankUp,
                1 => BlockKind::RankDown,
                t => BlockKind::Chunk(t - 2),
            };
        }
        let off = b % self.per_phase();
        let c = self.cv_blocks;
        match off {
            0 => BlockKind::Probe,
            1 => BlockKind::Choose,
            o if o < 2 + c => BlockKind::Cv(o - 1),
            o if o < 2 + c + MATCH_BLOCKS => BlockKind::Match(o - 2 - c),
            o if o == 2 + c + MATCH_BLOCKS => BlockKind::FEdge,
            o if o < 3 + c + MATCH_BLOCKS + PROPAGATE_BLOCKS => {
                BlockKind::Propagate(o - 2 - c - MATCH_BLOCKS)
            }
            o => BlockKind::Reorient(o - 2 - c - MATCH_BLOCKS - PROPAGATE_BLOCKS),
        }
    }

    fn is_last_phase(&self, b: u64) -> bool {
        b / self.per_phase() == self.phases - 1
    }

    /// Whether coloring block `c` performs an iteration (the first one happens after choose).
    fn cv_has_iter(&self, c: u64) -> bool {
        c < u64::from(self.cv_iterations)
    }
}

/// How far the pipeline runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    Construct,
    Rank,
    Mis,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineOutput {
    Tree(LdtState),
    Ranked { state: LdtState, rank: Rank },
    Decided(MisState),
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Choice {
    Finished,
    Failed,
    Edge(EdgeId),
}

/// Messages of the pipeline. Which kind a message is follows from the round it is sent in,
/// so only payload bits are counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LdtMsg {
    Discover(u64),
    LdtId(u64),
    MinEdge(Option<EdgeId>),
    Choice(Choice),
    Chose(bool),
    ChooseUp { troot: bool, has_child: bool, relevant: bool, parent_ldt: Option<u64> },
    Color { color: u64, leaf: bool },
    ParentColor(u64),
    Leaf(bool),
    ReportColor(Option<u64>),
    MatchDown { matched: bool, propose: Option<EdgeId> },
    Propose,
    Matched,
    MatchUp { proposed: bool, min_unmatched: Option<EdgeId> },
    FEdge(EdgeId),
    InF(bool),
    FUp { cand: Option<(u64, u64)>, has_f: bool },
    Best((u64, u64)),
    Cand(Option<(u64, u64)>),
    Final((u64, u64)),
    NewDepth(u64),
    PathKey(u64),
    Size(u64),
    Offset { x: u64, total: u64 },
    Chunk { words: Vec<u64>, len: u32 },
    State(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Building,
    Finished,
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Discover,
    Blocks,
    Vt,
}

/// Aggregates reported by children in the current block.
#[derive(Clone, Debug, Default)]
struct Acc {
    edge: Option<EdgeId>,
    troot: bool,
    has_child: bool,
    parent_ldt: Option<u64>,
    color: Option<u64>,
    proposed: bool,
    cand: Option<(u64, u64)>,
}

/// State that lives for one construction phase.
#[derive(Clone, Debug, Default)]
struct Phase {
    nbr_ldt: Vec<Option<u64>>,
    outgoing: Vec<Port>,
    own_min: Option<EdgeId>,
    moe: Option<EdgeId>,

    choice: Option<Choice>,
    chosen_port: Option<Port>,
    local_troot: bool,
    local_parent_ldt: Option<u64>,
    t_child: Vec<Port>,
    relevant_children: Vec<Port>,
    chooser_child: Option<Port>,

    troot: bool,
    leaf: bool,
    color: u64,
    parent_ldt: Option<u64>,

    leaf_child: Vec<Port>,
    got_parent_color: Option<u64>,

    matched: bool,
    block_matched: bool,
    proposal: Option<EdgeId>,
    proposal_edge: Option<EdgeId>,
    propose_next: Option<EdgeId>,
    min_child_edge: Option<EdgeId>,
    quit_matching: bool,
    proposed_port: Option<Port>,
    child_matched: Vec<Port>,
    got_proposal: bool,

    f_edge: Option<EdgeId>,
    f_ports: Vec<Port>,
    f_children: Vec<Port>,
    best: Option<(u64, u64)>,
    nbr_best: Vec<(Port, (u64, u64))>,
    child_report: Vec<(Port, (u64, u64))>,

    fin: Option<(u64, u64)>,
    on_path: bool,
    path_child: Option<Port>,
    attach_port: Option<Port>,
    new_depth: Option<u64>,
}

fn min_opt<T: Ord>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn get_bit(words: &[u64], i: u64) -> bool {
    words.get((i / 64) as usize).is_some_and(|w| (w >> (i % 64)) & 1 == 1)
}

fn set_bit(words: &mut [u64], i: u64) {
    words[(i / 64) as usize] |= 1 << (i % 64);
}

/// One node's LDT pipeline. First stepped at `plan.start`.
#[derive(Clone, Debug)]
pub struct LdtNode {
    plan: LdtPlan,
    goal: Goal,
    id: u64,
    stage: Stage,
    status: Status,
    fail_after_block: bool,

    nbr_id: Vec<u64>,
    active: Vec<bool>,
    tree: LocalTree,

    block: u64,
    started: bool,
    sched: Option<TransmissionSchedule>,
    pending: Vec<Slot>,
    ph: Phase,
    acc: Acc,
    down: Option<LdtMsg>,

    child_sizes: Vec<u64>,
    offset: u64,
    total: u64,
    perm_words: Vec<u64>,
    chunks: BTreeMap<u64, Vec<u64>>,

    vt_id: u64,
    vt_rounds: Vec<u64>,
    decision: MisState,
}

impl LdtNode {
    pub fn new(plan: LdtPlan, goal: Goal, id: NodeId) -> Self {
        LdtNode {
            plan,
            goal,
            id: id.0,
            stage: Stage::Discover,
            status: Status::Building,
            fail_after_block: false,
            nbr_id: Vec::new(),
            active: Vec::new(),
            tree: LocalTree::singleton(id.0),
            block: 0,
            started: false,
            sched: None,
            pending: Vec::new(),
            ph: Phase::default(),
            acc: Acc::default(),
            down: None,
            child_sizes: Vec::new(),
            offset: 0,
            total: 0,
            perm_words: Vec::new(),
            chunks: BTreeMap::new(),
            vt_id: 0,
            vt_rounds: Vec::new(),
            decision: MisState::Undecided,
        }
    }

    pub fn plan(&self) -> &LdtPlan {
        &self.plan
    }

    /// The LDT as known locally, with parent and children as IDs.
    pub fn state(&self) -> LdtState {
        LdtState {
            root_id: NodeId(self.tree.root_id),
            depth: self.tree.depth,
            parent_id: self.tree.parent.map(|p| NodeId(self.nbr_id[p.index()])),
            children_ids: self.tree.children.iter().map(|p| NodeId(self.nbr_id[p.index()])).collect(),
            n_bound: self.plan.n_bound,
        }
    }

    fn is_root(&self) -> bool {
        self.tree.parent.is_none()
    }

    fn nbr(&self, p: Port) -> u64 {
        self.nbr_id[p.index()]
    }

    fn active_ports(&self) -> impl Iterator<Item = Port> + '_ {
        (0..self.active.len()).filter(|&i| self.active[i]).map(Port::from_index)
    }

    fn side_ports(&self) -> Vec<Port> {
        self.active_ports().filter(|&p| !self.tree.is_tree_port(p)).collect()
    }

    fn edge_mode(&self) -> bool {
        matches!(self.ph.choice, Some(Choice::Edge(_)))
    }

    fn is_child_chooser(&self) -> bool {
        self.ph.chosen_port.is_some() && !self.ph.local_troot
    }

    fn h_ports(&self) -> Vec<Port> {
        let mut v = self.ph.t_child.clone();
        if let Some(p) = self.ph.chosen_port {
            if !v.contains(&p) {
                v.push(p);
            }
        }
        v
    }

    fn relevant(&self) -> bool {
        self.ph.chosen_port.is_some() || !self.ph.t_child.is_empty() || !self.ph.relevant_children.is_empty()
    }

    fn on_chooser_path(&self) -> bool {
        self.is_child_chooser() || self.ph.chooser_child.is_some()
    }

    fn nonleaf_t_child(&self) -> impl Iterator<Item = Port> + '_ {
        self.ph.t_child.iter().copied().filter(|p| !self.ph.leaf_child.contains(p))
    }

    fn unmatched_child(&self, p: Port) -> bool {
        if self.ph.proposed_port == Some(p) {
            return false;
        }
        self.ph.leaf_child.contains(&p) || !self.ph.child_matched.contains(&p)
    }

    fn own_unmatched(&self) -> Option<EdgeId> {
        self.ph
            .t_child
            .iter()
            .filter(|&&p| self.unmatched_child(p))
            .map(|&p| EdgeId::new(self.id, self.nbr(p)))
            .min()
    }

    fn own_f_cand(&self) -> Option<(u64, u64)> {
        self.ph.f_ports.iter().filter_map(|p| self.ph.nbr_ldt[p.index()]).map(|l| (l, 1)).min()
    }

    fn own_cand(&self) -> Option<(u64, u64)> {
        self.ph.nbr_best.iter().map(|&(_, (c, d))| (c, d + 1)).min()
    }

    fn f_relevant(&self) -> bool {
        !self.ph.f_ports.is_empty() || !self.ph.f_children.is_empty()
    }

    fn dist(&self) -> Option<u64> {
        self.ph.fin.map(|f| f.1)
    }

    /// Merge-edge ports leading to LDTs one hop farther from the core.
    fn f_child_ports(&self) -> Vec<Port> {
        let Some((core, d)) = self.ph.fin else { return Vec::new() };
        self.ph
            .nbr_best
            .iter()
            .filter(|&&(_, (c, nd))| c == core && nd == d + 1)
            .map(|&(p, _)| p)
            .collect()
    }

    /// Old children that take their new depth from this node in the depth-fix step.
    fn b_children(&self) -> Vec<Port> {
        let skip = if self.ph.on_path { self.ph.path_child } else { None };
        self.tree.children.iter().copied().filter(|&c| Some(c) != skip).collect()
    }

    fn subtree_size(&self) -> u64 {
        (1 + self.child_sizes.iter().sum::<u64>()).min(self.plan.n_bound + 1)
    }

    fn perm_width(&self) -> u64 {
        u64::from(ceil_log2(self.total))
    }

    /// Bit range of the permutation entries for ranks `lo..=hi`.
    fn rank_bits(&self, lo: u64, hi: u64) -> (u64, u64) {
        let w = self.perm_width();
        ((lo - 1) * w, hi * w)
    }

    fn chunk_overlaps(&self, t: u64, range: (u64, u64)) -> bool {
        let b = u64::from(self.plan.bit_budget);
        range.0 < range.1 && range.0 < (t + 1) * b && t * b < range.1
    }

    fn chunk_children(&self, t: u64) -> Vec<(Port, (u64, u64))> {
        let (_, offsets) = split_offsets(self.offset, &self.child_sizes);
        self.tree
            .children
            .iter()
            .zip(offsets)
            .zip(&self.child_sizes)
            .map(|((&c, off), &n)| (c, self.rank_bits(off + 1, off + n)))
            .filter(|&(_, r)| self.chunk_overlaps(t, r))
            .collect()
    }

    fn wants(&self, kind: BlockKind, slot: Slot) -> bool {
        use Slot::*;
        let ph = &self.ph;
        let root = self.is_root();
        let kids = !self.tree.children.is_empty();
        match kind {
            BlockKind::Probe => match slot {
                Side => !self.side_ports().is_empty(),
                UpReceive => kids,
                UpSend => !root,
                _ => false,
            },
            BlockKind::Choose => {
                let edge = self.edge_mode();
                match slot {
                    DownReceive => !root,
                    DownSend => kids,
                    Side => edge && !ph.outgoing.is_empty(),
                    UpReceive => edge && kids,
                    UpSend => edge && !root,
                }
            }
            BlockKind::Cv(c) => {
                if !self.edge_mode() || (c > 1 && ph.leaf) {
                    return false;
                }
                let iter = self.plan.cv_has_iter(c);
                match slot {
                    DownReceive => !root && self.relevant(),
                    DownSend => !ph.relevant_children.is_empty(),
                    Side => {
                        let chooser = self.is_child_chooser() && (c == 1 || (iter && !ph.leaf));
                        let parent_side = if c == 1 {
                            !ph.t_child.is_empty()
                        } else {
                            iter && self.nonleaf_t_child().next().is_some()
                        };
                        chooser || parent_side
                    }
                    UpReceive => iter && !ph.leaf && ph.chooser_child.is_some(),
                    UpSend => iter && !ph.leaf && !root && self.on_chooser_path(),
                }
            }
            BlockKind::Match(_) => {
                if !self.edge_mode() || ph.leaf || ph.quit_matching {
                    return false;
                }
                match slot {
                    DownReceive => !root && self.relevant(),
                    DownSend => !ph.relevant_children.is_empty(),
                    Side => {
                        if ph.block_matched {
                            let proposing = ph.proposal.is_some_and(|e| e.has(self.id))
                                && ph.proposed_port.is_some_and(|p| !ph.leaf_child.contains(&p));
                            ph.proposal.is_some() && (proposing || self.is_child_chooser())
                        } else {
                            self.is_child_chooser() || self.nonleaf_t_child().next().is_some()
                        }
                    }
                    UpReceive => !ph.block_matched && !ph.relevant_children.is_empty(),
                    UpSend => !ph.block_matched && !root && self.relevant(),
                }
            }
            BlockKind::FEdge => {
                if !self.edge_mode() {
                    return false;
                }
                match slot {
                    DownReceive => !root && self.relevant(),
                    DownSend => !ph.relevant_children.is_empty(),
                    Side => ph.chosen_port.is_some() || !ph.t_child.is_empty(),
                    UpReceive => !ph.relevant_children.is_empty(),
                    UpSend => !root && self.relevant(),
                }
            }
            BlockKind::Propagate(_) => {
                if !self.edge_mode() {
                    return false;
                }
                match slot {
                    DownReceive => !root && self.f_relevant(),
                    DownSend => !ph.f_children.is_empty(),
                    Side => !ph.f_ports.is_empty(),
                    UpReceive => !ph.f_children.is_empty(),
                    UpSend => !root && self.f_relevant(),
                }
            }
            BlockKind::Reorient(t) => {
                if !self.edge_mode() {
                    return false;
                }
                let d = self.dist();
                let fixing = t >= 2 && d == Some(t - 1);
                match slot {
                    DownReceive => !root && if t == 1 { true } else { fixing && !ph.on_path },
                    DownSend => if t == 1 { kids } else { fixing && !self.b_children().is_empty() },
                    Side => {
                        (d == Some(t - 1) && !self.f_child_ports().is_empty())
                            || (d == Some(t) && ph.attach_port.is_some())
                    }
                    UpReceive => d == Some(t) && ph.on_path && ph.path_child.is_some(),
                    UpSend => d == Some(t) && ph.on_path && !root,
                }
            }
            BlockKind::RankUp => match slot {
                UpReceive => kids,
                UpSend => !root,
                _ => false,
            },
            BlockKind::RankDown => match slot {
                DownReceive => !root,
                DownSend => kids,
                _ => false,
            },
            BlockKind::Chunk(t) => {
                if self.perm_width() == 0 {
                    return false;
                }
                match slot {
                    DownReceive => {
                        !root && {
                            let size = self.subtree_size();
                            self.chunk_overlaps(t, self.rank_bits(self.offset + 1, self.offset + size))
                        }
                    }
                    DownSend => !self.chunk_children(t).is_empty(),
                    _ => false,
                }
            }
        }
    }

    /// Applies the LDT-wide message of the current block. The root calls this on the message
    /// it composed; other nodes on what arrived from their parent.
    fn on_down(&mut self, kind: BlockKind, msg: LdtMsg) {
        match (&kind, &msg) {
            (_, LdtMsg::Choice(c)) => {
                self.ph.choice = Some(*c);
                match c {
                    Choice::Finished => self.status = Status::Finished,
                    Choice::Failed => self.fail_after_block = true,
                    Choice::Edge(e) => {
                        if e.has(self.id) {
                            let other = e.other(self.id);
                            self.ph.chosen_port =
                                self.ph.outgoing.iter().copied().find(|&p| self.nbr(p) == other);
                        }
                    }
                }
            }
            (_, LdtMsg::Color { color, leaf }) => {
                self.ph.color = *color;
                self.ph.leaf = *leaf;
            }
            (_, LdtMsg::MatchDown { matched, propose }) => {
                self.ph.matched = *matched;
                self.ph.block_matched = *matched;
                self.ph.proposal = *propose;
                if let Some(e) = propose.filter(|e| e.has(self.id)) {
                    let other = e.other(self.id);
                    self.ph.proposed_port = self.ph.t_child.iter().copied().find(|&p| self.nbr(p) == other);
                }
            }
            (_, LdtMsg::FEdge(e)) => {
                self.ph.f_edge = Some(*e);
                if e.has(self.id) {
                    let other = e.other(self.id);
                    if let Some(p) = self.h_ports().into_iter().find(|&p| self.nbr(p) == other) {
                        if !self.ph.f_ports.contains(&p) {
                            self.ph.f_ports.push(p);
                        }
                    }
                }
            }
            (_, LdtMsg::Best(b)) => self.ph.best = Some(*b),
            (_, LdtMsg::Final(f)) => self.on_final(*f),
            (BlockKind::Reorient(_), LdtMsg::NewDepth(x)) => self.ph.new_depth = Some(x + 1),
            (_, LdtMsg::Offset { x, total }) => {
                self.offset = *x;
                self.total = *total;
            }
            (BlockKind::Chunk(t), LdtMsg::Chunk { words, .. }) => {
                self.chunks.insert(*t, words.clone());
            }
            _ => {}
        }
        self.down = Some(msg);
    }

    fn on_final(&mut self, fin: (u64, u64)) {
        self.ph.fin = Some(fin);
        if fin.1 == 0 {
            self.ph.new_depth = Some(self.tree.depth);
            return;
        }
        if self.own_cand() == Some(fin) {
            self.ph.on_path = true;
            self.ph.attach_port = self
                .ph
                .nbr_best
                .iter()
                .find(|&&(_, (c, d))| (c, d + 1) == fin)
                .map(|&(p, _)| p);
        } else if let Some(&(c, _)) = self.ph.child_report.iter().find(|&&(_, v)| v == fin) {
            self.ph.on_path = true;
            self.ph.path_child = Some(c);
        }
    }

    fn begin_block(&mut self, kind: BlockKind, rng: &mut ChaCha8Rng) {
        self.acc = Acc::default();
        self.down = None;
        let root = self.is_root();
        match kind {
            BlockKind::Probe => {
                self.ph = Phase { nbr_ldt: vec![None; self.active.len()], ..Phase::default() };
            }
            BlockKind::Choose => {
                if root {
                    let choice = match self.ph.moe {
                        None => Choice::Finished,
                        Some(_) if self.plan.is_last_phase(self.block) => Choice::Failed,
                        Some(e) => Choice::Edge(e),
                    };
                    self.on_down(kind, LdtMsg::Choice(choice));
                }
            }
            BlockKind::Cv(_) => {
                self.ph.got_parent_color = None;
                if root && self.edge_mode() {
                    let msg = LdtMsg::Color { color: self.ph.color, leaf: self.ph.leaf };
                    self.on_down(kind, msg);
                }
            }
            BlockKind::Match(_) => {
                self.ph.got_proposal = false;
                if root && self.edge_mode() && !self.ph.leaf && !self.ph.quit_matching {
                    let msg = LdtMsg::MatchDown {
                        matched: self.ph.matched,
                        propose: self.ph.propose_next.take(),
                    };
                    self.on_down(kind, msg);
                }
            }
            BlockKind::FEdge => {
                if root && self.edge_mode() {
                    let e = if let Some(e) = self.ph.proposal_edge {
                        Some(e)
                    } else if !self.ph.troot {
                        self.ph.moe
                    } else {
                        self.ph.min_child_edge
                    };
                    match e {
                        Some(e) => self.on_down(kind, LdtMsg::FEdge(e)),
                        None => self.status = Status::Failed,
                    }
                }
            }
            BlockKind::Propagate(_) => {
                if root && self.edge_mode() {
                    let best = self.ph.best.unwrap_or((self.tree.root_id, 0));
                    self.on_down(kind, LdtMsg::Best(best));
                }
                self.ph.child_report.clear();
            }
            BlockKind::Reorient(1) => {
                if root && self.edge_mode() {
                    let best = self.ph.best.unwrap_or((self.tree.root_id, 0));
                    self.on_down(kind, LdtMsg::Final(best));
                }
            }
            BlockKind::Reorient(_) => {}
            BlockKind::RankUp => {
                self.child_sizes = vec![0; self.tree.children.len()];
            }
            BlockKind::RankDown => {
                if root {
                    let total = self.subtree_size();
                    self.on_down(kind, LdtMsg::Offset { x: 0, total });
                }
            }
            BlockKind::Chunk(t) => {
                if root && self.perm_width() > 0 {
                    if t == 0 {
                        self.draw_permutation(rng);
                    }
                    let b = u64::from(self.plan.bit_budget);
                    let total_bits = self.total * self.perm_width();
                    let lo = t * b;
                    if lo < total_bits {
                        let len = (total_bits - lo).min(b);
                        let mut words = vec![0u64; len.div_ceil(64) as usize];
                        for i in 0..len {
                            if get_bit(&self.perm_words, lo + i) {
                                set_bit(&mut words, i);
                            }
                        }
                        self.on_down(kind, LdtMsg::Chunk { words, len: len as u32 });
                    }
                }
            }
        }
    }

    fn draw_permutation(&mut self, rng: &mut ChaCha8Rng) {
        let mut perm: Vec<u64> = (0..self.total).collect();
        perm.shuffle(rng);
        let w = self.perm_width();
        let mut words = vec![0u64; (self.total * w).div_ceil(64) as usize];
        for (i, &v) in perm.iter().enumerate() {
            for j in 0..w {
                if (v >> j) & 1 == 1 {
                    set_bit(&mut words, i as u64 * w + j);
                }
            }
        }
        self.perm_words = words;
    }

    fn end_block(&mut self, kind: BlockKind) {
        let root = self.is_root();
        match kind {
            BlockKind::Probe => {
                if root {
                    self.ph.moe = min_opt(self.ph.own_min, self.acc.edge);
                }
            }
            BlockKind::Choose => {
                if root && self.edge_mode() {
                    let troot = self.ph.local_troot || self.acc.troot;
                    self.ph.troot = troot;
                    self.ph.leaf = !(self.acc.has_child || !self.ph.t_child.is_empty());
                    self.ph.parent_ldt = self.ph.local_parent_ldt.or(self.acc.parent_ldt);
                    self.ph.color = self.tree.root_id - 1;
                    if self.plan.cv_iterations >= 1 {
                        let parent = if troot { None } else { self.ph.parent_ldt.map(|p| p - 1) };
                        self.ph.color = cv_step(self.ph.color, parent);
                    }
                }
            }
            BlockKind::Cv(c) => {
                if root && self.edge_mode() && !self.ph.leaf && self.plan.cv_has_iter(c) {
                    let parent = if self.ph.troot {
                        None
                    } else {
                        self.ph.got_parent_color.or(self.acc.color)
                    };
                    self.ph.color = cv_step(self.ph.color, parent);
                }
            }
            BlockKind::Match(m) => {
                if self.edge_mode() && !self.ph.leaf && !self.ph.quit_matching {
                    if self.ph.block_matched {
                        self.ph.quit_matching = true;
                    } else if root {
                        if self.ph.got_proposal || self.acc.proposed {
                            self.ph.matched = true;
                        }
                        let min_unmatched = min_opt(self.own_unmatched(), self.acc.edge);
                        if m == 0 {
                            self.ph.min_child_edge = min_unmatched;
                        }
                        if !self.ph.matched && self.ph.color == m {
                            if let Some(e) = min_unmatched {
                                self.ph.propose_next = Some(e);
                                self.ph.proposal_edge = Some(e);
                                self.ph.matched = true;
                            }
                        }
                    }
                }
            }
            BlockKind::FEdge => {
                if root && self.edge_mode() {
                    let cand = min_opt(self.own_f_cand(), self.acc.cand);
                    self.ph.best = min_opt(Some((self.tree.root_id, 0)), cand);
                }
            }
            BlockKind::Propagate(_) => {
                if root && self.edge_mode() {
                    let cand = min_opt(self.own_cand(), self.acc.cand);
                    self.ph.best = min_opt(self.ph.best, cand);
                }
            }
            BlockKind::Reorient(t) => {
                if t == REORIENT_BLOCKS && self.edge_mode() {
                    self.commit();
                }
            }
            BlockKind::RankUp => {}
            BlockKind::RankDown => {
                if self.total == 0 || self.total > self.plan.n_bound {
                    self.status = Status::Failed;
                }
            }
            BlockKind::Chunk(_) => {}
        }
        if self.fail_after_block {
            self.status = Status::Failed;
        }
    }

    fn commit(&mut self) {
        let Some((core, d)) = self.ph.fin else {
            self.status = Status::Failed;
            return;
        };
        let Some(depth) = self.ph.new_depth else {
            self.status = Status::Failed;
            return;
        };
        let on_path = d > 0 && self.ph.on_path;
        let parent = if !on_path {
            self.tree.parent
        } else {
            self.ph.attach_port.or(self.ph.path_child)
        };
        let mut children: Vec<Port> = self
            .tree
            .children
            .iter()
            .copied()
            .filter(|&c| !(on_path && Some(c) == self.ph.path_child))
            .collect();
        if on_path {
            children.extend(self.tree.parent);
        }
        children.extend(self.f_child_ports());
        children.sort_by_key(|&p| self.nbr(p));
        children.dedup();
        self.tree = LocalTree { root_id: core, depth, parent, children };
    }

    fn emit(&self, kind: BlockKind, slot: Slot) -> Vec<(Port, LdtMsg)> {
        let ph = &self.ph;
        let mut out = Vec::new();
        match slot {
            Slot::DownSend => match kind {
                BlockKind::Reorient(t) if t >= 2 => {
                    if let Some(nd) = ph.new_depth {
                        out.extend(self.b_children().into_iter().map(|c| (c, LdtMsg::NewDepth(nd))));
                    }
                }
                BlockKind::RankDown => {
                    let (_, offsets) = split_offsets(self.offset, &self.child_sizes);
                    for (&c, x) in self.tree.children.iter().zip(offsets) {
                        out.push((c, LdtMsg::Offset { x, total: self.total }));
                    }
                }
                BlockKind::Chunk(t) => {
                    if let Some(msg) = &self.down {
                        out.extend(self.chunk_children(t).into_iter().map(|(c, _)| (c, msg.clone())));
                    }
                }
                _ => {
                    let Some(msg) = &self.down else { return out };
                    let targets: &[Port] = match kind {
                        BlockKind::Choose | BlockKind::Reorient(_) => &self.tree.children,
                        BlockKind::Propagate(_) => &ph.f_children,
                        _ => &ph.relevant_children,
                    };
                    out.extend(targets.iter().map(|&c| (c, msg.clone())));
                }
            },
            Slot::Side => match kind {
                BlockKind::Probe => {
                    out.extend(self.side_ports().into_iter().map(|p| (p, LdtMsg::LdtId(self.tree.root_id))));
                }
                BlockKind::Choose => {
                    out.extend(ph.outgoing.iter().map(|&p| (p, LdtMsg::Chose(Some(p) == ph.chosen_port))));
                }
                BlockKind::Cv(c) => {
                    if c == 1 && self.is_child_chooser() {
                        out.push((ph.chosen_port.unwrap(), LdtMsg::Leaf(ph.leaf)));
                    }
                    if self.plan.cv_has_iter(c) {
                        let targets: Vec<Port> =
                            if c == 1 { ph.t_child.clone() } else { self.nonleaf_t_child().collect() };
                        out.extend(targets.into_iter().map(|p| (p, LdtMsg::ParentColor(ph.color))));
                    }
                }
                BlockKind::Match(_) => {
                    if ph.block_matched && ph.proposal.is_some() {
                        if let Some(p) = ph.proposed_port.filter(|p| !ph.leaf_child.contains(p)) {
                            if ph.proposal.is_some_and(|e| e.has(self.id)) {
                                out.push((p, LdtMsg::Propose));
                            }
                        }
                        if self.is_child_chooser() {
                            out.push((ph.chosen_port.unwrap(), LdtMsg::Matched));
                        }
                    }
                }
                BlockKind::FEdge => {
                    out.extend(self.h_ports().into_iter().map(|p| (p, LdtMsg::InF(ph.f_ports.contains(&p)))));
                }
                BlockKind::Propagate(_) => {
                    if let Some(b) = ph.best {
                        out.extend(ph.f_ports.iter().map(|&p| (p, LdtMsg::Best(b))));
                    }
                }
                BlockKind::Reorient(t) if self.dist() == Some(t - 1) => {
                    if let Some(nd) = ph.new_depth {
                        out.extend(self.f_child_ports().into_iter().map(|p| (p, LdtMsg::NewDepth(nd))));
                    }
                }
                _ => {}
            },
            Slot::UpSend => {
                let Some(parent) = self.tree.parent else { return out };
                let acc = &self.acc;
                let msg = match kind {
                    BlockKind::Probe => LdtMsg::MinEdge(min_opt(ph.own_min, acc.edge)),
                    BlockKind::Choose => LdtMsg::ChooseUp {
                        troot: ph.local_troot || acc.troot,
                        has_child: !ph.t_child.is_empty() || acc.has_child,
                        relevant: self.relevant(),
                        parent_ldt: ph.local_parent_ldt.or(acc.parent_ldt),
                    },
                    BlockKind::Cv(_) => LdtMsg::ReportColor(ph.got_parent_color.or(acc.color)),
                    BlockKind::Match(_) => LdtMsg::MatchUp {
                        proposed: ph.got_proposal || acc.proposed,
                        min_unmatched: min_opt(self.own_unmatched(), acc.edge),
                    },
                    BlockKind::FEdge => LdtMsg::FUp {
                        cand: min_opt(self.own_f_cand(), acc.cand),
                        has_f: self.f_relevant(),
                    },
                    BlockKind::Propagate(_) => LdtMsg::Cand(min_opt(self.own_cand(), acc.cand)),
                    BlockKind::Reorient(_) => match ph.new_depth {
                        Some(nd) => LdtMsg::PathKey(nd + self.tree.depth),
                        None => return out,
                    },
                    BlockKind::RankUp => LdtMsg::Size(self.subtree_size()),
                    _ => return out,
                };
                out.push((parent, msg));
            }
            _ => {}
        }
        out
    }

    fn absorb_side(&mut self, kind: BlockKind, port: Port, msg: &LdtMsg) {
        match (kind, msg) {
            (BlockKind::Probe, LdtMsg::LdtId(l)) => {
                self.ph.nbr_ldt[port.index()] = Some(*l);
                if *l != self.tree.root_id {
                    self.ph.outgoing.push(port);
                    let e = EdgeId::new(self.id, self.nbr(port));
                    self.ph.own_min = min_opt(self.ph.own_min, Some(e));
                }
            }
            (BlockKind::Choose, LdtMsg::Chose(chose)) => {
                let their = self.ph.nbr_ldt[port.index()].unwrap_or(0);
                if Some(port) == self.ph.chosen_port {
                    if *chose && self.tree.root_id < their {
                        self.ph.local_troot = true;
                        self.ph.t_child.push(port);
                    } else {
                        self.ph.local_parent_ldt = Some(their);
                    }
                } else if *chose {
                    self.ph.t_child.push(port);
                }
            }
            (BlockKind::Cv(_), LdtMsg::Leaf(true)) => self.ph.leaf_child.push(port),
            (BlockKind::Cv(_), LdtMsg::ParentColor(c)) if Some(port) == self.ph.chosen_port => {
                self.ph.got_parent_color = Some(*c);
            }
            (BlockKind::Match(_), LdtMsg::Propose) if Some(port) == self.ph.chosen_port => {
                self.ph.got_proposal = true;
            }
            (BlockKind::Match(_), LdtMsg::Matched) => self.ph.child_matched.push(port),
            (BlockKind::FEdge, LdtMsg::InF(true)) => {
                if !self.ph.f_ports.contains(&port) {
                    self.ph.f_ports.push(port);
                }
            }
            (BlockKind::Propagate(_), LdtMsg::Best(b)) => {
                self.ph.nbr_best.retain(|&(p, _)| p != port);
                self.ph.nbr_best.push((port, *b));
            }
            (BlockKind::Reorient(_), LdtMsg::NewDepth(x)) if Some(port) == self.ph.attach_port => {
                self.ph.new_depth = Some(x + 1);
            }
            _ => {}
        }
    }

    fn absorb_up(&mut self, kind: BlockKind, port: Port, msg: &LdtMsg) {
        let acc = &mut self.acc;
        match (kind, msg) {
            (BlockKind::Probe, LdtMsg::MinEdge(e)) => acc.edge = min_opt(acc.edge, *e),
            (BlockKind::Choose, LdtMsg::ChooseUp { troot, has_child, relevant, parent_ldt }) => {
                acc.troot |= troot;
                acc.has_child |= has_child;
                acc.parent_ldt = acc.parent_ldt.or(*parent_ldt);
                if *relevant {
                    self.ph.relevant_children.push(port);
                }
                if parent_ldt.is_some() {
                    self.ph.chooser_child = Some(port);
                }
            }
            (BlockKind::Cv(_), LdtMsg::ReportColor(c)) => acc.color = acc.color.or(*c),
            (BlockKind::Match(_), LdtMsg::MatchUp { proposed, min_unmatched }) => {
                acc.proposed |= proposed;
                acc.edge = min_opt(acc.edge, *min_unmatched);
            }
            (BlockKind::FEdge, LdtMsg::FUp { cand, has_f }) => {
                acc.cand = min_opt(acc.cand, *cand);
                if *has_f {
                    self.ph.f_children.push(port);
                }
            }
            (BlockKind::Propagate(_), LdtMsg::Cand(c)) => {
                acc.cand = min_opt(acc.cand, *c);
                if let Some(c) = c {
                    self.ph.child_report.push((port, *c));
                }
            }
            (BlockKind::Reorient(_), LdtMsg::PathKey(k)) if Some(port) == self.ph.path_child => {
                self.ph.new_depth = Some(k.saturating_sub(self.tree.depth));
            }
            (BlockKind::RankUp, LdtMsg::Size(s)) => {
                if let Some(i) = self.tree.children.iter().position(|&c| c == port) {
                    self.child_sizes[i] = *s;
                }
            }
            _ => {}
        }
    }

    fn output(&self) -> PipelineOutput {
        match self.goal {
            Goal::Construct => PipelineOutput::Tree(self.state()),
            Goal::Rank => {
                let (rank, _) = split_offsets(self.offset, &self.child_sizes);
                PipelineOutput::Ranked { state: self.state(), rank: Rank { rank, total: self.total } }
            }
            Goal::Mis => PipelineOutput::Decided(self.decision),
        }
    }

    fn enter_vt(&mut self) {
        let (rank, _) = split_offsets(self.offset, &self.child_sizes);
        let w = self.perm_width();
        let mut v = 0u64;
        let b = u64::from(self.plan.bit_budget);
        for j in 0..w {
            let q = (rank - 1) * w + j;
            let bit = if self.is_root() {
                get_bit(&self.perm_words, q)
            } else {
                self.chunks.get(&(q / b)).is_some_and(|words| get_bit(words, q % b))
            };
            if bit {
                v |= 1 << j;
            }
        }
        self.vt_id = v + 1;
        self.vt_rounds = awake_schedule(self.vt_id.min(self.total), self.total).unwrap_or_default();
        self.chunks.clear();
        self.perm_words.clear();
        self.stage = Stage::Vt;
    }

    /// Schedules the next awake round, or halts.
    fn advance(&mut self, now: u64, rng: &mut ChaCha8Rng) -> Next<PipelineOutput> {
        loop {
            if self.status == Status::Failed {
                return Next::Halt(PipelineOutput::Failed);
            }
            if self.stage == Stage::Vt {
                let base = self.plan.vt_base();
                return match self.vt_rounds.iter().map(|&r| base + r - 1).find(|&r| r > now) {
                    Some(r) => Next::WakeAt(r),
                    None if self.decision == MisState::Undecided => Next::Halt(PipelineOutput::Failed),
                    None => Next::Halt(self.output()),
                };
            }
            let b = self.block;
            let construct_end = self.plan.construct_blocks;
            if !self.started {
                if self.goal == Goal::Construct && b >= construct_end {
                    return Next::Halt(self.output());
                }
                if self.goal == Goal::Rank && b >= construct_end + 2 {
                    return Next::Halt(self.output());
                }
                if b >= self.plan.total_blocks() {
                    self.enter_vt();
                    continue;
                }
                if self.status == Status::Finished && b < construct_end {
                    self.block = construct_end;
                    continue;
                }
                let kind = self.plan.kind(b);
                self.begin_block(kind, rng);
                let start = self.plan.block_start(b);
                match transmission_schedule(self.tree.depth, self.plan.n_bound, self.is_root(), start) {
                    Ok(s) => self.sched = Some(s),
                    Err(_) => {
                        self.status = Status::Failed;
                        continue;
                    }
                }
                self.started = true;
            }
            let kind = self.plan.kind(b);
            let sched = self.sched.expect("schedule set when block starts");
            if let Some((r, slots)) = next_slots(&sched, Some(now), |s| self.wants(kind, s)) {
                self.pending = slots;
                return Next::WakeAt(r);
            }
            self.end_block(kind);
            self.block += 1;
            self.started = false;
        }
    }
}

impl NodeProgram for LdtNode {
    type Msg = LdtMsg;
    type Output = PipelineOutput;

    fn send(&mut self, ctx: &mut NodeCtx<'_>) -> Vec<(Port, LdtMsg)> {
        match self.stage {
            Stage::Discover => {
                (0..ctx.degree).map(|i| (Port::from_index(i), LdtMsg::Discover(self.id))).collect()
            }
            Stage::Blocks => {
                let kind = self.plan.kind(self.block);
                let mut out = Vec::new();
                for &slot in &self.pending {
                    out.extend(self.emit(kind, slot));
                }
                out
            }
            Stage::Vt => {
                let in_mis = self.decision == MisState::InMis;
                self.active_ports().map(|p| (p, LdtMsg::State(in_mis))).collect()
            }
        }
    }

    fn receive(&mut self, ctx: &mut NodeCtx<'_>, inbox: &[(Port, LdtMsg)]) -> Next<PipelineOutput> {
        match self.stage {
            Stage::Discover => {
                self.nbr_id = vec![0; ctx.degree];
                self.active = vec![false; ctx.degree];
                for (p, msg) in inbox {
                    if let LdtMsg::Discover(id) = msg {
                        self.nbr_id[p.index()] = *id;
                        self.active[p.index()] = true;
                    }
                }
                self.stage = Stage::Blocks;
            }
            Stage::Blocks => {
                let kind = self.plan.kind(self.block);
                let pending = std::mem::take(&mut self.pending);
                for slot in &pending {
                    match slot {
                        Slot::DownReceive => {
                            let parent = self.tree.parent;
                            if let Some((_, msg)) = inbox.iter().find(|(p, _)| Some(*p) == parent) {
                                self.on_down(kind, msg.clone());
                            }
                        }
                        Slot::Side => {
                            for (p, msg) in inbox {
                                if !self.tree.is_tree_port(*p) {
                                    self.absorb_side(kind, *p, msg);
                                }
                            }
                        }
                        Slot::UpReceive => {
                            for (p, msg) in inbox {
                                if self.tree.children.contains(p) {
                                    self.absorb_up(kind, *p, msg);
                                }
                            }
                        }
                        _ => {}
                    }
                }
            }
            Stage::Vt => {
                let heard = inbox.iter().any(|(_, m)| matches!(m, LdtMsg::State(true)));
                if self.decision == MisState::Undecided {
                    if heard {
                        self.decision = MisState::NotInMis;
                        return Next::Halt(self.output());
                    }
                    let r = ctx.round + 1 - self.plan.vt_base();
                    if r == self.vt_id {
                        self.decision = MisState::InMis;
                    }
                }
            }
        }
        self.advance(ctx.round, ctx.rng)
    }

    fn message_bits(&self, msg: &LdtMsg) -> u32 {
        let id = self.plan.id_bits();
        let size = size_bits(self.plan.n_bound);
        let key = bits_for(2 * self.plan.n_bound + 2).max(1);
        match msg {
            LdtMsg::Discover(_) | LdtMsg::LdtId(_) | LdtMsg::ParentColor(_) => id,
            LdtMsg::MinEdge(_) => 1 + 2 * id,
            LdtMsg::Choice(_) => 2 + 2 * id,
            LdtMsg::Chose(_) | LdtMsg::Leaf(_) | LdtMsg::Propose | LdtMsg::Matched | LdtMsg::InF(_) => 1,
            LdtMsg::ChooseUp { .. } => 4 + id,
            LdtMsg::Color { .. } => id + 1,
            LdtMsg::ReportColor(_) => 1 + id,
            LdtMsg::MatchDown { .. } | LdtMsg::MatchUp { .. } => 2 + 2 * id,
            LdtMsg::FEdge(_) => 2 * id,
            LdtMsg::FUp { .. } => 2 + id + DIST_BITS,
            LdtMsg::Best(_) | LdtMsg::Final(_) => id + DIST_BITS,
            LdtMsg::Cand(_) => 1 + id + DIST_BITS,
            LdtMsg::NewDepth(_) | LdtMsg::PathKey(_) => key,
            LdtMsg::Size(_) => size,
            LdtMsg::Offset { .. } => 2 * size,
            LdtMsg::Chunk { len, .. } => *len,
            LdtMsg::State(_) => 1,
        }
    }
}

/// Result of running the construction on its own.
#[derive(Clone, Debug)]
pub struct ConstructOutcome {
    /// Per-node LDT state, `None` where the node failed.
    pub states: Vec<Option<LdtState>>,
    pub trace: ExecutionTrace<PipelineOutput>,
}

impl ConstructOutcome {
    /// All states, if no node failed.
    pub fn complete_states(&self) -> Option<Vec<LdtState>> {
        self.states.iter().cloned().collect()
    }
}

/// Deterministic LDT construction over a connected graph, starting in round 0.
pub fn ldt_construct_round(
    graph: &Graph,
    ids: &IdAssignment,
    n_bound: u64,
    config: &RunConfig,
) -> Result<ConstructOutcome, LdtError> {
    ldt_pipeline(graph, ids, n_bound, Goal::Construct, config).map(|trace| ConstructOutcome {
        states: trace
            .outputs()
            .map(|o| match o.output() {
                Some(PipelineOutput::Tree(s)) => Some(s.clone()),
                _ => None,
            })
            .collect(),
        trace,
    })
}

/// Runs the pipeline up to `goal` on every node of `graph`.
pub fn ldt_pipeline(
    graph: &Graph,
    ids: &IdAssignment,
    n_bound: u64,
    goal: Goal,
    config: &RunConfig,
) -> Result<ExecutionTrace<PipelineOutput>, LdtError> {
    let plan = LdtPlan::new(n_bound, ids.bound(), config.bit_budget, 0)?;
    let programs = ids.ids().iter().map(|&id| LdtNode::new(plan, goal, id)).collect();
    Ok(run_simulation(graph, programs, config)?)
}
