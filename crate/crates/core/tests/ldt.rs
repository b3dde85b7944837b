use awake_mis::engine::RunConfig;
use awake_mis::graphs::{assign_random_ids, default_id_bound, gen_connected_gnp, gen_structured, Topology};
use awake_mis::ldt::{check_ldt, in_order_ranks, ldt_construct_round, ldt_pipeline, ldt_ranking, Goal, PipelineOutput};

#[test]
fn random_connected_graphs_get_valid_ldts_and_ranks() {
    for seed in 0..60u64 {
        let n = 2 + (seed as usize * 37) % 127;
        let p = [1.5, 3.0, 8.0][seed as usize % 3] / n as f64;
        let g = gen_connected_gnp(n, p.min(1.0), seed).unwrap();
        let n = g.node_count();
        let bound = default_id_bound(n as u64);
        let ids = assign_random_ids(n, bound, seed).unwrap();
        let cfg = RunConfig::new(n as u64, seed);
        let out = ldt_construct_round(&g, &ids, n as u64, &cfg).unwrap();
        let states = out.complete_states().unwrap_or_else(|| panic!("seed {seed}: failed nodes"));
        assert_eq!(check_ldt(&g, &ids, &states), Ok(()), "seed {seed}, n {n}");
        assert_eq!(out.trace.budget_violations(), 0);

        let oracle = in_order_ranks(&ids, &states);
        let ranks = ldt_ranking(&g, &ids, &states, &cfg).unwrap();
        let got: Vec<u64> = ranks.outputs().map(|o| o.output().unwrap().unwrap().rank).collect();
        assert_eq!(got, oracle, "seed {seed}");

        let pipe = ldt_pipeline(&g, &ids, n as u64, Goal::Rank, &cfg).unwrap();
        let piped: Vec<u64> = pipe
            .outputs()
            .map(|o| match o.output() {
                Some(PipelineOutput::Ranked { rank, .. }) => rank.rank,
                other => panic!("seed {seed}: {other:?}"),
            })
            .collect();
        assert_eq!(piped, oracle, "seed {seed}");
    }
}

#[test]
fn loose_size_bound_still_works() {
    let g = gen_structured(Topology::BalancedBinaryTree, 40).unwrap();
    let ids = assign_random_ids(40, 64_000, 5).unwrap();
    let out = ldt_construct_round(&g, &ids, 100, &RunConfig::new(100, 5)).unwrap();
    assert_eq!(check_ldt(&g, &ids, &out.complete_states().unwrap()), Ok(()));
}
