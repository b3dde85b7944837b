use serde::Serialize;

use super::{EngineError, Port};

/// How a node's execution ended.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<O> {
    Output(O),
    /// Force-halted by the engine after exhausting its awake budget.
    Failed,
    /// Still running when the round cutoff was hit.
    Running,
}

impl<O> Outcome<O> {
    pub fn output(&self) -> Option<&O> {
        match self {
            Outcome::Output(o) => Some(o),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    BitBudget { node: usize, round: u64, port: Port, bits: u32 },
    AwakeCap { node: usize, round: u64 },
    DuplicatePort { node: usize, round: u64, port: Port },
    UnknownPort { node: usize, round: u64, port: Port },
    /// A program asked to wake at or before the current round.
    StaleWake { node: usize, round: u64, requested: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeTrace<O> {
    pub awake_rounds: Vec<u64>,
    pub halt_round: Option<u64>,
    pub outcome: Outcome<O>,
    pub sent: u64,
    pub received: u64,
    pub max_message_bits: u32,
}

impl<O> NodeTrace<O> {
    pub(crate) fn new() -> Self {
        NodeTrace {
            awake_rounds: Vec::new(),
            halt_round: None,
            outcome: Outcome::Running,
            sent: 0,
            received: 0,
            max_message_bits: 0,
        }
    }

    pub fn awake_count(&self) -> usize {
        self.awake_rounds.len()
    }

    /// Awake rounds falling in `[from, to]`.
    pub fn awake_between(&self, from: u64, to: u64) -> usize {
        let lo = self.awake_rounds.partition_point(|&r| r < from);
        let hi = self.awake_rounds.partition_point(|&r| r <= to);
        hi - lo
    }
}

/// Record of one simulation run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExecutionTrace<O> {
    pub nodes: Vec<NodeTrace<O>>,
    /// Rounds elapsed, sleeping and awake, counting round 0.
    pub total_rounds: u64,
    pub complete: bool,
    pub violations: Vec<Violation>,
    /// Messages dropped because the receiver was asleep.
    pub lost_messages: u64,
}

impl<O> ExecutionTrace<O> {
    pub fn max_awake(&self) -> usize {
        self.nodes.iter().map(NodeTrace::awake_count).max().unwrap_or(0)
    }

    pub fn avg_awake(&self) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        self.nodes.iter().map(NodeTrace::awake_count).sum::<usize>() as f64 / self.nodes.len() as f64
    }

    pub fn max_message_bits(&self) -> u32 {
        self.nodes.iter().map(|n| n.max_message_bits).max().unwrap_or(0)
    }

    pub fn budget_violations(&self) -> usize {
        self.violations.iter().filter(|v| matches!(v, Violation::BitBudget { .. })).count()
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Outcome<O>> {
        self.nodes.iter().map(|n| &n.outcome)
    }

    /// Rewrites every node output, keeping the metrics.
    pub fn map_outputs<P>(self, mut f: impl FnMut(usize, O) -> P) -> ExecutionTrace<P> {
        ExecutionTrace {
            nodes: self
                .nodes
                .into_iter()
                .enumerate()
                .map(|(i, n)| NodeTrace {
                    awake_rounds: n.awake_rounds,
                    halt_round: n.halt_round,
                    outcome: match n.outcome {
                        Outcome::Output(o) => Outcome::Output(f(i, o)),
                        Outcome::Failed => Outcome::Failed,
                        Outcome::Running => Outcome::Running,
                    },
                    sent: n.sent,
                    received: n.received,
                    max_message_bits: n.max_message_bits,
                })
                .collect(),
            total_rounds: self.total_rounds,
            complete: self.complete,
            violations: self.violations,
            lost_messages: self.lost_messages,
        }
    }
}

impl<O: Serialize> ExecutionTrace<O> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

/// Worst-case awake complexity: the largest number of awake rounds of any node.
pub fn worst_case_awake<O>(trace: &ExecutionTrace<O>) -> Result<usize, EngineError> {
    if !trace.complete {
        return Err(EngineError::Incomplete);
    }
    Ok(trace.max_awake())
}
