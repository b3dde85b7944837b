use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::oracle::{component_sizes, greedy};
use super::report::GraphSpec;
use super::HarnessError;
use crate::engine::Graph;

/// Pass rate of a per-trial bound check, with everything needed to rerun it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub graph: String,
    pub n: usize,
    pub trials: usize,
    pub passes: usize,
    pub pass_rate: f64,
    pub bound: f64,
    pub max_observed: usize,
    pub seed: u64,
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn report(experiment: &str, graph: String, n: usize, bound: f64, seed: u64, observed: Vec<usize>) -> ExperimentReport {
    let passes = observed.iter().filter(|&&x| x as f64 <= bound).count();
    ExperimentReport {
        experiment: experiment.to_string(),
        graph,
        n,
        trials: observed.len(),
        passes,
        pass_rate: if observed.is_empty() { 0.0 } else { passes as f64 / observed.len() as f64 },
        bound,
        max_observed: observed.into_iter().max().unwrap_or(0),
        seed,
    }
}

/// Max degree of the graph left after greedily processing the first `t` of a uniformly
/// random order, restricted to the first `t_prime` nodes. Each trial draws a fresh graph.
pub fn residual_sparsity_experiment(
    spec: &GraphSpec,
    t: usize,
    t_prime: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport, HarnessError> {
    let n = spec.n;
    if !(1 <= t && t < t_prime && t_prime <= n) {
        return Err(HarnessError::Params(format!("need 1 <= t < t' <= n, got t={t}, t'={t_prime}, n={n}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(HarnessError::Params(format!("eps must lie in (0, 1), got {eps}")));
    }
    let observed = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let graph = spec.build(rng.gen())?;
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            Ok(residual_max_degree(&graph, &order, t, t_prime))
        })
        .collect::<Result<Vec<usize>, HarnessError>>()?;
    let bound = t_prime as f64 / t as f64 * (n as f64 / eps).ln();
    Ok(report("sparsity", spec.descriptor(), n, bound, seed, observed))
}

fn residual_max_degree(graph: &Graph, order: &[usize], t: usize, t_prime: usize) -> usize {
    let members = greedy(graph, &order[..t]);
    let mut removed = vec![false; graph.node_count()];
    for &u in &members {
        removed[u] = true;
        for v in graph.neighbors(u) {
            removed[v] = true;
        }
    }
    let mut keep = vec![false; graph.node_count()];
    for &u in &order[..t_prime] {
        keep[u] = !removed[u];
    }
    (0..graph.node_count())
        .filter(|&u| keep[u])
        .map(|u| graph.neighbors(u).filter(|&v| keep[v]).count())
        .max()
        .unwrap_or(0)
}

/// Largest component among the nodes of one class when every node picks one of `2Δ`
/// classes uniformly. Trials redraw the classes on the same graph.
pub fn shattering_experiment(
    graph: &Graph,
    descriptor: &str,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport, HarnessError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(HarnessError::Params(format!("eps must lie in (0, 1), got {eps}")));
    }
    let n = graph.node_count();
    let classes = 2 * graph.max_degree().max(1);
    let observed: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let chosen: Vec<usize> = (0..n).filter(|_| rng.gen_range(0..classes) == 0).collect();
            component_sizes(graph, &chosen).last().copied().unwrap_or(0)
        })
        .collect();
    let bound = 6.0 * (n as f64 / eps).ln();
    Ok(report("shattering", descriptor.to_string(), n, bound, seed, observed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::GraphKind;

    #[test]
    fn edgeless_graphs_always_pass() {
        let spec = GraphSpec::new(GraphKind::Gnp, 50, Some(0.0));
        let r = residual_sparsity_experiment(&spec, 5, 20, 0.1, 10, 1).unwrap();
        assert_eq!((r.passes, r.max_observed), (10, 0));
        let g = Graph::from_edges(50, &[]).unwrap();
        let r = shattering_experiment(&g, "empty", 0.1, 10, 1).unwrap();
        assert_eq!(r.passes, 10);
        assert!(r.max_observed <= 1);
    }

    #[test]
    fn small_cases() {
        let spec = GraphSpec::new(GraphKind::Complete, 2, None);
        let r = residual_sparsity_experiment(&spec, 1, 2, 0.5, 20, 3).unwrap();
        assert_eq!(r.max_observed, 0);
        let edge = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let r = shattering_experiment(&edge, "edge", 0.5, 50, 3).unwrap();
        assert_eq!(r.passes, 50);
        assert!(r.max_observed <= 2);
    }

    #[test]
    fn parameter_errors() {
        let spec = GraphSpec::new(GraphKind::Path, 10, None);
        assert!(residual_sparsity_experiment(&spec, 3, 3, 0.1, 1, 0).is_err());
        assert!(residual_sparsity_experiment(&spec, 0, 3, 0.1, 1, 0).is_err());
        assert!(residual_sparsity_experiment(&spec, 3, 11, 0.1, 1, 0).is_err());
    }
}
