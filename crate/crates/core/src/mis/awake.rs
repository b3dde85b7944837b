use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{ceil_log2, run_simulation, EngineError, ExecutionTrace, Graph, NodeCtx, NodeProgram, Next, Port, RunConfig};
use crate::graphs::{default_id_bound, IdAssignment};
use crate::ldt::{Goal, LdtError, LdtMsg, LdtNode, LdtPlan, PipelineOutput};
use crate::vtree::communication_set;

use super::MisState;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("N must be at least 1")]
    ZeroN,
    #[error("awake constant must be positive, got {0}")]
    AwakeConstant(f64),
    #[error(transparent)]
    Ldt(#[from] LdtError),
}

/// Iterated binary logarithm: how often `log2` is applied before the value drops to 1 or below.
pub fn log_star(x: f64) -> u32 {
    let mut x = x;
    let mut k = 0;
    while x > 1.0 {
        x = x.log2();
        k += 1;
    }
    k
}

/// A node's batch `(i, j)` and its position `g` in lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BatchAssignment {
    pub i: u32,
    pub j: u64,
    pub g: u64,
}

/// Everything the nodes of one Awake-MIS run agree on in advance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AwakeMisParams {
    pub n_bound: u64,
    pub ell: u32,
    pub delta_prime: u64,
    /// `probs[i - 1]` is the probability of picking batch index `i`.
    pub probs: Vec<f64>,
    pub component_bound: u64,
    pub id_bound: u64,
    pub bit_budget: u32,
    /// Rounds per phase: one communication round plus the LDT-MIS window.
    pub phase_len: u64,
    pub awake_constant: f64,
    pub awake_cap: u32,
}

impl AwakeMisParams {
    /// Awake-cap constant, calibrated on the acceptance graph families.
    pub const AWAKE_CONSTANT: f64 = 8.0;

    pub fn new(n_bound: u64) -> Result<Self, ParamsError> {
        Self::with_awake_constant(n_bound, Self::AWAKE_CONSTANT)
    }

    pub fn with_awake_constant(n_bound: u64, awake_constant: f64) -> Result<Self, ParamsError> {
        if n_bound == 0 {
            return Err(ParamsError::ZeroN);
        }
        if awake_constant.is_nan() || awake_constant <= 0.0 {
            return Err(ParamsError::AwakeConstant(awake_constant));
        }
        let nf = n_bound as f64;
        let (ell, probs) = batch_probabilities(n_bound);
        let delta_prime = ((36.0 * nf.ln()).ceil() as u64).max(1);
        let component_bound = ((24.0 * nf.ln()).ceil() as u64).clamp(1, n_bound);
        let id_bound = default_id_bound(n_bound);
        let bit_budget = RunConfig::congest_budget(n_bound);
        let plan = LdtPlan::new(component_bound, id_bound, bit_budget, 0)?;
        let loglog = nf.log2().max(2.0).log2();
        // For tiny N the formula drops below what the communication rounds alone need.
        let phases = 2 * u64::from(ell) * delta_prime;
        let floor = awake_constant * f64::from(ceil_log2(phases));
        let awake_cap = (awake_constant * loglog * f64::from(log_star(nf).max(1))).max(floor).ceil() as u32;
        Ok(AwakeMisParams {
            n_bound,
            ell,
            delta_prime,
            probs,
            component_bound,
            id_bound,
            bit_budget,
            phase_len: 1 + plan.length(),
            awake_constant,
            awake_cap,
        })
    }

    /// Number of phases, `2ℓΔ'`.
    pub fn phases(&self) -> u64 {
        2 * u64::from(self.ell) * self.delta_prime
    }

    /// Communication round of phase `p`.
    pub fn phase_start(&self, p: u64) -> u64 {
        1 + (p - 1) * self.phase_len
    }

    pub fn total_rounds(&self) -> u64 {
        1 + self.phases() * self.phase_len
    }

    /// Timing of the LDT-MIS run of batch `g`.
    pub fn ldt_plan(&self, g: u64) -> LdtPlan {
        LdtPlan::new(self.component_bound, self.id_bound, self.bit_budget, self.phase_start(g) + 1)
            .expect("validated when the parameters were built")
    }

    pub fn batch_of(&self, i: u32, j: u64) -> BatchAssignment {
        BatchAssignment { i, j, g: u64::from(i - 1) * 2 * self.delta_prime + j }
    }

    pub fn sample_batch(&self, rng: &mut ChaCha8Rng) -> BatchAssignment {
        let x: f64 = rng.gen();
        let mut acc = 0.0;
        let mut i = self.ell;
        for (k, p) in self.probs.iter().enumerate() {
            acc += p;
            if x < acc {
                i = k as u32 + 1;
                break;
            }
        }
        let j = rng.gen_range(1..=2 * self.delta_prime);
        self.batch_of(i, j)
    }

    /// Phases whose communication round the holder of batch `g` attends.
    pub fn comm_phases(&self, g: u64) -> Vec<u64> {
        let p = self.phases();
        communication_set(g, p)
            .map(|s| s.into_iter().filter(|&x| x <= p).collect())
            .unwrap_or_default()
    }

    pub fn run_config(&self, seed: u64) -> RunConfig {
        let mut cfg = RunConfig::new(self.n_bound, seed).with_awake_cap(self.awake_cap);
        cfg.bit_budget = self.bit_budget;
        cfg
    }
}

/// Doubling batch probabilities `10 · 2^i · log2 N / N` for `i < ℓ`, with the remaining mass
/// on `ℓ`. `ℓ` is the largest value keeping the doubled part at most one half.
fn batch_probabilities(n_bound: u64) -> (u32, Vec<f64>) {
    let nf = n_bound as f64;
    let unit = 10.0 * nf.log2() / nf;
    if unit <= 0.0 {
        return (1, vec![1.0]);
    }
    let mut probs = Vec::new();
    let mut sum = 0.0;
    loop {
        let next = unit * f64::powi(2.0, probs.len() as i32 + 1);
        if sum + next > 0.5 {
            break;
        }
        sum += next;
        probs.push(next);
    }
    probs.push(1.0 - sum);
    (probs.len() as u32, probs)
}

#[derive(Clone, Debug)]
pub enum AwakeMsg {
    InMis,
    Ldt(LdtMsg),
}

/// Awake-MIS node: samples a batch, listens for earlier batches in the communication rounds
/// of its set, runs LDT-MIS in its own phase if still undecided, and as a member announces
/// itself to later batches.
#[derive(Clone, Debug)]
pub struct AwakeMisNode {
    params: Arc<AwakeMisParams>,
    id: u64,
    batch: Option<BatchAssignment>,
    comm: Vec<u64>,
    state: MisState,
    ldt: Option<LdtNode>,
    ldt_started: bool,
}

impl AwakeMisNode {
    pub fn new(params: Arc<AwakeMisParams>, id: u64) -> Self {
        AwakeMisNode { params, id, batch: None, comm: Vec::new(), state: MisState::Undecided, ldt: None, ldt_started: false }
    }

    fn next(&mut self, now: u64) -> Next<MisState> {
        let g = self.batch.expect("batch sampled in round 0").g;
        let after = |p: &&u64| self.params.phase_start(**p) > now;
        match self.state {
            MisState::Undecided => {
                if let Some(&p) = self.comm.iter().filter(|&&p| p <= g).find(after) {
                    return Next::WakeAt(self.params.phase_start(p));
                }
                let plan = self.params.ldt_plan(g);
                self.ldt = Some(LdtNode::new(plan, Goal::Mis, crate::graphs::NodeId(self.id)));
                self.ldt_started = false;
                Next::WakeAt(plan.start)
            }
            MisState::InMis => match self.comm.iter().filter(|&&p| p > g).find(after) {
                Some(&p) => Next::WakeAt(self.params.phase_start(p)),
                None => Next::Halt(MisState::InMis),
            },
            s => Next::Halt(s),
        }
    }
}

impl NodeProgram for AwakeMisNode {
    type Msg = AwakeMsg;
    type Output = MisState;

    fn send(&mut self, ctx: &mut NodeCtx<'_>) -> Vec<(Port, AwakeMsg)> {
        if let Some(ldt) = self.ldt.as_mut() {
            self.ldt_started = true;
            return ldt.send(ctx).into_iter().map(|(p, m)| (p, AwakeMsg::Ldt(m))).collect();
        }
        if ctx.round > 0 && self.state == MisState::InMis {
            return (0..ctx.degree).map(|i| (Port::from_index(i), AwakeMsg::InMis)).collect();
        }
        Vec::new()
    }

    fn receive(&mut self, ctx: &mut NodeCtx<'_>, inbox: &[(Port, AwakeMsg)]) -> Next<MisState> {
        if ctx.round == 0 {
            let batch = self.params.sample_batch(ctx.rng);
            self.comm = self.params.comm_phases(batch.g);
            self.batch = Some(batch);
            return self.next(0);
        }
        if let Some(ldt) = self.ldt.as_mut().filter(|_| self.ldt_started) {
            let inner: Vec<(Port, LdtMsg)> = inbox
                .iter()
                .filter_map(|(p, m)| match m {
                    AwakeMsg::Ldt(m) => Some((*p, m.clone())),
                    AwakeMsg::InMis => None,
                })
                .collect();
            return match ldt.receive(ctx, &inner) {
                Next::Continue => Next::Continue,
                Next::WakeAt(r) => Next::WakeAt(r),
                Next::Halt(out) => {
                    self.ldt = None;
                    self.state = match out {
                        PipelineOutput::Decided(s) if s.is_decided() => s,
                        _ => MisState::Failed,
                    };
                    self.next(ctx.round)
                }
            };
        }
        if self.state == MisState::Undecided && inbox.iter().any(|(_, m)| matches!(m, AwakeMsg::InMis)) {
            self.state = MisState::NotInMis;
            return Next::Halt(self.state);
        }
        self.next(ctx.round)
    }

    fn message_bits(&self, msg: &AwakeMsg) -> u32 {
        match (msg, &self.ldt) {
            (AwakeMsg::Ldt(m), Some(ldt)) => ldt.message_bits(m),
            (AwakeMsg::Ldt(_), None) => self.params.bit_budget,
            (AwakeMsg::InMis, _) => 1,
        }
    }
}

/// Runs Awake-MIS. Node `u` draws its batch from `config.node_rng(u)` in round 0, so
/// [`awake_mis_batches`] reproduces the assignment.
pub fn awake_mis(
    graph: &Graph,
    ids: &IdAssignment,
    params: &AwakeMisParams,
    seed: u64,
) -> Result<ExecutionTrace<MisState>, EngineError> {
    let shared = Arc::new(params.clone());
    let programs = ids.ids().iter().map(|id| AwakeMisNode::new(Arc::clone(&shared), id.0)).collect();
    run_simulation(graph, programs, &params.run_config(seed))
}

/// The batches drawn in an [`awake_mis`] run with the same seed.
pub fn awake_mis_batches(params: &AwakeMisParams, node_count: usize, seed: u64) -> Vec<BatchAssignment> {
    let cfg = params.run_config(seed);
    (0..node_count).map(|u| params.sample_batch(&mut cfg.node_rng(u))).collect()
}
