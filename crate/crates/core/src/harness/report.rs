use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::check_mis;
use super::HarnessError;
use crate::engine::{ExecutionTrace, Graph, RunConfig, Violation};
use crate::graphs::{assign_random_ids, default_id_bound, gen_gnp, gen_structured, GraphError, Topology};
use crate::mis::{awake_mis, final_states, ldt_mis_round, luby_baseline, vt_mis, AwakeMisParams, MisState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Vt,
    LdtMis,
    AwakeMis,
    Luby,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Vt, Algorithm::LdtMis, Algorithm::AwakeMis, Algorithm::Luby];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Vt => "vt",
            Algorithm::LdtMis => "ldt-mis",
            Algorithm::AwakeMis => "awake-mis",
            Algorithm::Luby => "luby",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| HarnessError::Params(format!("unknown algorithm {s:?}")))
    }
}

/// Graph families used by the CLI and the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// `G(n, p)` with an explicit `p`.
    Gnp,
    /// `G(n, 8/n)`.
    Sparse,
    /// `G(n, 0.5 · log2 n / n)`.
    LogDensity,
    Path,
    Cycle,
    Star,
    Complete,
    Tree,
}

impl GraphKind {
    pub const ALL: [GraphKind; 8] = [
        GraphKind::Gnp,
        GraphKind::Sparse,
        GraphKind::LogDensity,
        GraphKind::Path,
        GraphKind::Cycle,
        GraphKind::Star,
        GraphKind::Complete,
        GraphKind::Tree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Gnp => "gnp",
            GraphKind::Sparse => "sparse",
            GraphKind::LogDensity => "log-density",
            GraphKind::Path => "path",
            GraphKind::Cycle => "cycle",
            GraphKind::Star => "star",
            GraphKind::Complete => "complete",
            GraphKind::Tree => "tree",
        }
    }
}

impl FromStr for GraphKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GraphKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Graph(GraphError::UnknownKind(s.to_string())))
    }
}

/// A graph family instantiated at a size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub n: usize,
    /// Edge probability for [`GraphKind::Gnp`].
    pub p: Option<f64>,
}

impl GraphSpec {
    pub fn new(kind: GraphKind, n: usize, p: Option<f64>) -> Self {
        GraphSpec { kind, n, p }
    }

    /// Edge probability of the random families.
    pub fn edge_probability(&self) -> Option<f64> {
        let n = self.n.max(1) as f64;
        match self.kind {
            GraphKind::Gnp => Some(self.p.unwrap_or(0.1)),
            GraphKind::Sparse => Some((8.0 / n).min(1.0)),
            GraphKind::LogDensity => Some((0.5 * n.log2() / n).clamp(0.0, 1.0)),
            _ => None,
        }
    }

    pub fn build(&self, seed: u64) -> Result<Graph, GraphError> {
        let topology = match self.kind {
            GraphKind::Path => Topology::Path,
            GraphKind::Cycle => Topology::Cycle,
            GraphKind::Star => Topology::Star,
            GraphKind::Complete => Topology::Complete,
            GraphKind::Tree => Topology::BalancedBinaryTree,
            _ => return gen_gnp(self.n, self.edge_probability().unwrap_or(0.0), seed),
        };
        gen_structured(topology, self.n)
    }

    pub fn descriptor(&self) -> String {
        match self.edge_probability() {
            Some(p) => format!("{}(n={},p={p:.6})", self.kind.name(), self.n),
            None => format!("{}(n={})", self.kind.name(), self.n),
        }
    }
}

/// One row per run. CSV columns follow the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub algorithm: Algorithm,
    pub graph: String,
    pub n: usize,
    pub seed: u64,
    pub valid: bool,
    pub failed_count: usize,
    pub max_awake: usize,
    pub avg_awake: f64,
    pub total_rounds: u64,
    pub max_message_bits: u32,
    pub bit_budget: u32,
    pub budget_violations: usize,
    pub awake_cap: Option<u32>,
    pub cap_hits: usize,
}

pub struct RunOutcome {
    pub states: Vec<MisState>,
    pub metrics: RunMetrics,
    pub trace: ExecutionTrace<MisState>,
}

/// Runs `algorithm` on `graph` with random IDs from `[1, N³]`, where `N` is the node count.
pub fn run_algorithm(algorithm: Algorithm, graph: &Graph, descriptor: &str, seed: u64) -> Result<RunOutcome, HarnessError> {
    let n = graph.node_count();
    let n_bound = n.max(2) as u64;
    let ids = assign_random_ids(n, default_id_bound(n_bound), seed)?;
    let cfg = RunConfig::new(n_bound, seed);
    let (trace, bit_budget, cap) = match algorithm {
        Algorithm::Vt => (vt_mis(graph, &ids, &cfg)?, cfg.bit_budget, None),
        Algorithm::LdtMis => (ldt_mis_round(graph, &ids, n_bound, &cfg)?, cfg.bit_budget, None),
        Algorithm::Luby => (luby_baseline(graph, &cfg)?, cfg.bit_budget, None),
        Algorithm::AwakeMis => {
            let params = AwakeMisParams::new(n_bound)?;
            (awake_mis(graph, &ids, &params, seed)?, params.bit_budget, Some(params.awake_cap))
        }
    };
    let states = final_states(&trace);
    let report = check_mis(graph, &states);
    let metrics = RunMetrics {
        algorithm,
        graph: descriptor.to_string(),
        n,
        seed,
        valid: report.valid,
        failed_count: states.iter().filter(|&&s| s == MisState::Failed).count(),
        max_awake: trace.max_awake(),
        avg_awake: trace.avg_awake(),
        total_rounds: trace.total_rounds,
        max_message_bits: trace.max_message_bits(),
        bit_budget,
        budget_violations: trace.budget_violations(),
        awake_cap: cap,
        cap_hits: trace.violations.iter().filter(|v| matches!(v, Violation::AwakeCap { .. })).count(),
    };
    Ok(RunOutcome { states, metrics, trace })
}

/// Aggregate of all runs at one size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub algorithm: Algorithm,
    pub family: String,
    pub n: usize,
    pub runs: usize,
    pub invalid: usize,
    pub median_max_awake: f64,
    pub max_max_awake: usize,
    pub median_total_rounds: f64,
    pub max_total_rounds: u64,
    pub max_message_bits: u32,
    pub budget_violations: usize,
    pub cap_hits: usize,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

/// Every run of a scaling study, sorted by size and seed. Seed `s` builds the graph and
/// drives the algorithm.
pub fn scaling_runs(
    algorithm: Algorithm,
    kind: GraphKind,
    p: Option<f64>,
    sizes: &[usize],
    seeds: &[u64],
) -> Result<Vec<RunMetrics>, HarnessError> {
    if !sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(HarnessError::Params("sizes must be strictly ascending".into()));
    }
    let jobs: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    jobs.into_par_iter()
        .map(|(n, seed)| {
            let spec = GraphSpec::new(kind, n, p);
            let graph = spec.build(seed)?;
            Ok(run_algorithm(algorithm, &graph, &spec.descriptor(), seed)?.metrics)
        })
        .collect()
}

/// Groups runs by size. Invalid runs are counted, not dropped.
pub fn summarize(runs: &[RunMetrics]) -> Vec<ScalingRow> {
    let mut sizes: Vec<usize> = runs.iter().map(|r| r.n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| {
            let group: Vec<&RunMetrics> = runs.iter().filter(|r| r.n == n).collect();
            let mut awake: Vec<f64> = group.iter().map(|r| r.max_awake as f64).collect();
            let mut rounds: Vec<f64> = group.iter().map(|r| r.total_rounds as f64).collect();
            let family = group[0].graph.split('(').next().unwrap_or_default().to_string();
            ScalingRow {
                algorithm: group[0].algorithm,
                family,
                n,
                runs: group.len(),
                invalid: group.iter().filter(|r| !r.valid).count(),
                median_max_awake: median(&mut awake),
                max_max_awake: group.iter().map(|r| r.max_awake).max().unwrap_or(0),
                median_total_rounds: median(&mut rounds),
                max_total_rounds: group.iter().map(|r| r.total_rounds).max().unwrap_or(0),
                max_message_bits: group.iter().map(|r| r.max_message_bits).max().unwrap_or(0),
                budget_violations: group.iter().map(|r| r.budget_violations).sum(),
                cap_hits: group.iter().map(|r| r.cap_hits).sum(),
            }
        })
        .collect()
}

pub fn scaling_study(
    algorithm: Algorithm,
    kind: GraphKind,
    p: Option<f64>,
    sizes: &[usize],
    seeds: &[u64],
) -> Result<Vec<ScalingRow>, HarnessError> {
    Ok(summarize(&scaling_runs(algorithm, kind, p, sizes, seeds)?))
}

/// Writes rows as CSV with a header line.
pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ceil_log2;

    #[test]
    fn one_row_luby_table() {
        let rows = scaling_study(Algorithm::Luby, GraphKind::Path, None, &[4], &[1]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].n, rows[0].runs, rows[0].invalid), (4, 1, 0));
    }

    #[test]
    fn vt_awake_column_hits_the_bound() {
        let sizes: Vec<usize> = (4..=10).map(|e| 1 << e).collect();
        let runs = scaling_runs(Algorithm::Vt, GraphKind::Sparse, None, &sizes, &[1, 2]).unwrap();
        assert!(runs.iter().all(|r| r.valid));
        for row in summarize(&runs) {
            let bound = ceil_log2(default_id_bound(row.n as u64)) as usize + 1;
            assert!(row.max_max_awake <= bound, "n={} awake={} bound={bound}", row.n, row.max_max_awake);
        }
    }

    #[test]
    fn csv_has_header() {
        let g = GraphSpec::new(GraphKind::Cycle, 6, None);
        let run = run_algorithm(Algorithm::Luby, &g.build(0).unwrap(), &g.descriptor(), 0).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &[run.metrics]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("algorithm,graph,n,seed,valid,failed_count,max_awake"));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn kinds_round_trip_through_names() {
        for k in GraphKind::ALL {
            assert_eq!(k.name().parse::<GraphKind>().unwrap(), k);
        }
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
    }
}
