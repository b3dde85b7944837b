use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::trace::{ExecutionTrace, NodeTrace, Outcome, Violation};
use super::{ceil_log2, EngineError, Graph, Port};

/// Parameters shared by every node of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Known polynomial upper bound on the number of nodes.
    pub n_bound: u64,
    /// Largest message, in bits, that may cross an edge in one round.
    pub bit_budget: u32,
    pub max_rounds: u64,
    pub seed: u64,
    /// Per-node limit on awake rounds. Nodes that would exceed it are halted as failed.
    pub awake_cap: Option<u32>,
}

impl RunConfig {
    /// Budget of `⌈8 log2 N⌉` bits, no awake cap, effectively unbounded rounds.
    pub fn new(n_bound: u64, seed: u64) -> Self {
        RunConfig {
            n_bound,
            bit_budget: Self::congest_budget(n_bound),
            max_rounds: u64::MAX / 4,
            seed,
            awake_cap: None,
        }
    }

    /// `⌈8 · log2 N⌉`.
    pub fn congest_budget(n_bound: u64) -> u32 {
        (8.0 * (n_bound.max(2) as f64).log2()).ceil() as u32
    }

    pub fn with_awake_cap(mut self, cap: u32) -> Self {
        self.awake_cap = Some(cap);
        self
    }

    pub fn with_max_rounds(mut self, rounds: u64) -> Self {
        self.max_rounds = rounds;
        self
    }

    pub fn validate(&self, node_count: usize) -> Result<(), EngineError> {
        if self.n_bound < node_count as u64 {
            return Err(EngineError::Config(format!(
                "N = {} below node count {node_count}",
                self.n_bound
            )));
        }
        if self.bit_budget == 0 || self.bit_budget < ceil_log2(self.n_bound) {
            return Err(EngineError::Config(format!(
                "bit budget {} below log2 N",
                self.bit_budget
            )));
        }
        if self.max_rounds == 0 {
            return Err(EngineError::Config("max_rounds must be positive".into()));
        }
        if self.awake_cap == Some(0) {
            return Err(EngineError::Config("awake cap must be positive".into()));
        }
        Ok(())
    }

    /// The deterministic random stream of node `index`.
    pub fn node_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// What a node sees while it is awake.
pub struct NodeCtx<'a> {
    pub round: u64,
    pub degree: usize,
    pub rng: &'a mut ChaCha8Rng,
}

/// What a node does after an awake round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Next<O> {
    /// Stay awake for the next round.
    Continue,
    /// Sleep until the given round (strictly later than the current one).
    WakeAt(u64),
    Halt(O),
}

/// A per-node state machine.
///
/// The engine calls `send` and then `receive` in each round in which the node is awake.
/// The node is awake in round 0 and afterwards exactly in the rounds it asks for.
pub trait NodeProgram {
    type Msg: Clone;
    type Output: Clone;

    fn send(&mut self, ctx: &mut NodeCtx<'_>) -> Vec<(Port, Self::Msg)>;

    fn receive(&mut self, ctx: &mut NodeCtx<'_>, inbox: &[(Port, Self::Msg)]) -> Next<Self::Output>;

    /// Length of the serialized message in bits.
    fn message_bits(&self, msg: &Self::Msg) -> u32;
}

/// Runs one execution to completion or to the round cutoff.
pub fn run_simulation<P: NodeProgram>(
    graph: &Graph,
    mut programs: Vec<P>,
    config: &RunConfig,
) -> Result<ExecutionTrace<P::Output>, EngineError> {
    let n = graph.node_count();
    if programs.len() != n {
        return Err(EngineError::ProgramCount { programs: programs.len(), nodes: n });
    }
    config.validate(n)?;

    let mut rngs: Vec<ChaCha8Rng> = (0..n).map(|i| config.node_rng(i)).collect();
    let mut nodes: Vec<NodeTrace<P::Output>> = (0..n).map(|_| NodeTrace::new()).collect();
    let mut violations = Vec::new();
    let mut lost = 0u64;

    let mut agenda: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    agenda.insert(0, (0..n).collect());

    // Round in which each node was last stepped; used to decide delivery.
    let mut stepped_in = vec![u64::MAX; n];
    let mut inboxes: Vec<Vec<(Port, P::Msg)>> = (0..n).map(|_| Vec::new()).collect();
    let mut used_ports: Vec<Vec<u64>> = (0..n).map(|u| vec![u64::MAX; graph.degree(u)]).collect();
    let mut last_round = 0u64;
    let mut complete = true;

    while let Some((&round, _)) = agenda.iter().next() {
        if round >= config.max_rounds {
            complete = false;
            break;
        }
        let mut due = agenda.remove(&round).unwrap_or_default();
        due.sort_unstable();
        last_round = round;

        let mut active = Vec::with_capacity(due.len());
        for u in due {
            if let Some(cap) = config.awake_cap {
                if nodes[u].awake_rounds.len() >= cap as usize {
                    violations.push(Violation::AwakeCap { node: u, round });
                    nodes[u].outcome = Outcome::Failed;
                    continue;
                }
            }
            nodes[u].awake_rounds.push(round);
            stepped_in[u] = round;
            active.push(u);
        }

        // Send half.
        let mut wire: Vec<(usize, Port, P::Msg)> = Vec::new();
        for &u in &active {
            let mut ctx = NodeCtx { round, degree: graph.degree(u), rng: &mut rngs[u] };
            for (port, msg) in programs[u].send(&mut ctx) {
                if port.0 == 0 || port.index() >= graph.degree(u) {
                    violations.push(Violation::UnknownPort { node: u, round, port });
                    continue;
                }
                if used_ports[u][port.index()] == round {
                    violations.push(Violation::DuplicatePort { node: u, round, port });
                    continue;
                }
                used_ports[u][port.index()] = round;
                let bits = programs[u].message_bits(&msg);
                let trace = &mut nodes[u];
                trace.max_message_bits = trace.max_message_bits.max(bits);
                if bits > config.bit_budget {
                    violations.push(Violation::BitBudget { node: u, round, port, bits });
                    continue;
                }
                trace.sent += 1;
                wire.push((u, port, msg));
            }
        }

        // Delivery: only to receivers awake in this round.
        for (u, port, msg) in wire {
            let link = graph.link(u, port);
            if stepped_in[link.node] == round {
                inboxes[link.node].push((link.port, msg));
                nodes[link.node].received += 1;
            } else {
                lost += 1;
            }
        }

        // Receive half.
        for &u in &active {
            let mut inbox = std::mem::take(&mut inboxes[u]);
            inbox.sort_by_key(|(p, _)| *p);
            let mut ctx = NodeCtx { round, degree: graph.degree(u), rng: &mut rngs[u] };
            let next = programs[u].receive(&mut ctx, &inbox);
            inbox.clear();
            inboxes[u] = inbox;
            let wake = match next {
                Next::Halt(out) => {
                    nodes[u].halt_round = Some(round);
                    nodes[u].outcome = Outcome::Output(out);
                    continue;
                }
                Next::Continue => round + 1,
                Next::WakeAt(r) if r > round => r,
                Next::WakeAt(r) => {
                    violations.push(Violation::StaleWake { node: u, round, requested: r });
                    round + 1
                }
            };
            agenda.entry(wake).or_default().push(u);
        }
    }

    if !agenda.is_empty() {
        complete = false;
    }
    Ok(ExecutionTrace {
        nodes,
        total_rounds: last_round + 1,
        complete,
        violations,
        lost_messages: lost,
    })
}
