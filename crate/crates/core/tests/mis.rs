use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use awake_mis::engine::{Graph, RunConfig};
use awake_mis::graphs::{assign_random_ids, gen_gnp, gen_structured, IdAssignment, NodeId, Topology};
use awake_mis::harness::{check_mis, run_algorithm, Algorithm};
use awake_mis::mis::{awake_mis, awake_mis_batches, final_states, vt_mis, AwakeMisParams, MisState};

fn ids(list: &[u64], bound: u64) -> IdAssignment {
    IdAssignment::new(list.iter().copied().map(NodeId).collect(), bound).unwrap()
}

#[test]
fn vt_on_small_examples() {
    use MisState::{InMis as I, NotInMis as O};
    let path = gen_structured(Topology::Path, 5).unwrap();
    let t = vt_mis(&path, &IdAssignment::sequential(5), &RunConfig::new(5, 0)).unwrap();
    assert_eq!(final_states(&t), vec![I, O, I, O, I]);

    // Smallest ID in the middle of a star takes the centre.
    let star = gen_structured(Topology::Star, 4).unwrap();
    let t = vt_mis(&star, &ids(&[1, 5, 9, 3], 9), &RunConfig::new(4, 0)).unwrap();
    assert_eq!(final_states(&t), vec![I, O, O, O]);
    let t = vt_mis(&star, &ids(&[7, 5, 9, 3], 9), &RunConfig::new(4, 0)).unwrap();
    assert_eq!(final_states(&t), vec![O, I, I, I]);
}

fn in_mis(states: &[MisState], u: usize) -> bool {
    states[u] == MisState::InMis
}

/// Members never see a member in an earlier or equal batch; every non-member is dominated by a
/// member whose batch is not later than its own. Nodes of batch `g` finish by the end of phase `g`.
#[test]
fn awake_mis_respects_batch_order() {
    let n = 400;
    let params = AwakeMisParams::new(n as u64).unwrap();
    for seed in 0..6 {
        let g = gen_gnp(n, 8.0 / n as f64, seed).unwrap();
        let id = assign_random_ids(n, params.id_bound, seed).unwrap();
        let trace = awake_mis(&g, &id, &params, seed).unwrap();
        let states = final_states(&trace);
        let batches = awake_mis_batches(&params, n, seed);
        assert!(check_mis(&g, &states).valid, "seed {seed}");
        for u in 0..n {
            let bu = batches[u].g;
            match states[u] {
                MisState::InMis => {
                    assert!(g.neighbors(u).all(|v| !in_mis(&states, v)));
                }
                MisState::NotInMis => {
                    assert!(g.neighbors(u).any(|v| in_mis(&states, v) && batches[v].g <= bu), "node {u}");
                    let halt = trace.nodes[u].halt_round.unwrap();
                    assert!(halt < params.phase_start(bu + 1), "node {u} halted at {halt}");
                }
                s => panic!("node {u} ended {s:?}"),
            }
            // Outside its own phase a node is awake only in communication rounds of its set.
            let own = params.phase_start(bu)..params.phase_start(bu + 1);
            let comm: Vec<u64> = params.comm_phases(bu).iter().map(|&p| params.phase_start(p)).collect();
            for r in &trace.nodes[u].awake_rounds {
                assert!(*r == 0 || own.contains(r) || comm.contains(r), "node {u} awake at {r}");
            }
        }
    }
}

#[test]
fn awake_mis_is_valid_on_sparse_graphs() {
    let n = 1 << 10;
    let mut valid = 0;
    for seed in 0..100 {
        let g = gen_gnp(n, 8.0 / n as f64, seed).unwrap();
        let out = run_algorithm(Algorithm::AwakeMis, &g, "gnp", seed).unwrap();
        valid += usize::from(out.metrics.valid);
        assert_eq!(out.metrics.budget_violations, 0);
        assert_eq!(out.metrics.cap_hits, 0);
    }
    assert!(valid >= 99, "{valid}/100 valid");
}

#[test]
fn luby_finishes_in_logarithmic_rounds() {
    for (n, seed) in [(64usize, 1u64), (512, 2), (2048, 3)] {
        for p in [2.0 / n as f64, 0.05] {
            let g = gen_gnp(n, p, seed).unwrap();
            let out = run_algorithm(Algorithm::Luby, &g, "gnp", seed).unwrap();
            assert!(out.metrics.valid);
            assert!(out.metrics.total_rounds as f64 <= 20.0 * (n as f64).log2(), "n {n}: {}", out.metrics.total_rounds);
        }
    }
}

#[test]
fn ldt_mis_on_complete_graph_has_one_member() {
    let k = gen_structured(Topology::Complete, 9).unwrap();
    for seed in 0..10 {
        let out = run_algorithm(Algorithm::LdtMis, &k, "complete", seed).unwrap();
        assert!(out.metrics.valid);
        assert_eq!(out.states.iter().filter(|s| **s == MisState::InMis).count(), 1);
    }
}

#[test]
fn batch_sampling_matches_its_distribution() {
    let params = AwakeMisParams::new(1 << 16).unwrap();
    let draws = 1_000_000u32;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut by_i: HashMap<u32, u32> = HashMap::new();
    let mut by_j = vec![0u32; 2 * params.delta_prime as usize + 1];
    for _ in 0..draws {
        let b = params.sample_batch(&mut rng);
        *by_i.entry(b.i).or_default() += 1;
        by_j[b.j as usize] += 1;
        assert_eq!(b, params.batch_of(b.i, b.j));
    }
    let p1 = params.probs[0];
    let f1 = f64::from(by_i.get(&1).copied().unwrap_or(0)) / f64::from(draws);
    assert!((f1 - p1).abs() <= 3.0 * (p1 / f64::from(draws)).sqrt(), "Pr[i = 1] {f1} vs {p1}");
    let bins = 2 * params.delta_prime as usize;
    let expect = f64::from(draws) / bins as f64;
    // Goodness of fit: chi-square with bins - 1 degrees of freedom, normal approximation at z = 4.
    let chi2: f64 = by_j[1..].iter().map(|&c| (f64::from(c) - expect).powi(2) / expect).sum();
    let dof = (bins - 1) as f64;
    assert!(chi2 <= dof + 4.0 * (2.0 * dof).sqrt(), "chi-square {chi2} over {dof} dof");
    // Per-value band. Each bin sits about 3.5 standard deviations inside it, so the seed matters.
    for (j, &c) in by_j.iter().enumerate().skip(1) {
        assert!((f64::from(c) - expect).abs() <= 0.1 * expect, "j = {j}: {c} vs {expect}");
    }
}

#[test]
fn isolated_and_tiny_graphs() {
    let single = Graph::from_edges(1, &[]).unwrap();
    for algo in [Algorithm::Vt, Algorithm::LdtMis, Algorithm::AwakeMis, Algorithm::Luby] {
        let out = run_algorithm(algo, &single, "single", 3).unwrap();
        assert_eq!(out.states, vec![MisState::InMis], "{algo:?}");
    }
}
