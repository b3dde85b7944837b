//! WebAssembly bindings for the browser demo. Every export takes and returns plain strings
//! so the page needs no generated glue beyond `wasm-bindgen`'s defaults.

use std::collections::HashMap;

use serde_json::json;
use wasm_bindgen::prelude::*;

use awake_mis::engine::{Graph, RunConfig};
use awake_mis::graphs::{assign_random_ids, default_id_bound};
use awake_mis::harness::{run_algorithm, Algorithm, GraphKind, GraphSpec};
use awake_mis::ldt::ldt_construct_round;
use awake_mis::vtree::CommTree;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn parse_graph(edges: &str) -> Result<Graph, JsError> {
    edges.parse().map_err(err)
}

/// Generates a graph from a family name and returns it as an edge list.
#[wasm_bindgen]
pub fn generate(kind: &str, n: usize, p: f64, seed: u64) -> Result<String, JsError> {
    let kind: GraphKind = kind.parse().map_err(err)?;
    let p = (kind == GraphKind::Gnp).then_some(p);
    Ok(GraphSpec::new(kind, n, p).build(seed).map_err(err)?.to_edge_list())
}

/// Runs one MIS algorithm and returns states, per-node awake rounds and run metrics as JSON.
#[wasm_bindgen]
pub fn run_mis(algo: &str, edges: &str, seed: u64) -> Result<String, JsError> {
    let algo: Algorithm = algo.parse().map_err(err)?;
    let graph = parse_graph(edges)?;
    let out = run_algorithm(algo, &graph, "browser", seed).map_err(err)?;
    let awake: Vec<&[u64]> = out.trace.nodes.iter().map(|n| n.awake_rounds.as_slice()).collect();
    Ok(json!({
        "edges": graph.edges(),
        "states": out.states,
        "awake_rounds": awake,
        "metrics": out.metrics,
    })
    .to_string())
}

/// Communication sets `S_k([1, i])` for every `k`.
#[wasm_bindgen]
pub fn sk_table(i: u64) -> Result<String, JsError> {
    if i > 4096 {
        return Err(JsError::new("keep i at most 4096"));
    }
    let tree = CommTree::new(i).map_err(err)?;
    serde_json::to_string(&tree.table()).map_err(err)
}

/// Builds an LDT forest and returns each node's parent index (or null) and depth.
#[wasm_bindgen]
pub fn ldt_forest(edges: &str, seed: u64) -> Result<String, JsError> {
    let graph = parse_graph(edges)?;
    let n = graph.node_count();
    let n_bound = n.max(2) as u64;
    let ids = assign_random_ids(n, default_id_bound(n_bound), seed).map_err(err)?;
    let out = ldt_construct_round(&graph, &ids, n as u64, &RunConfig::new(n_bound, seed)).map_err(err)?;
    let index: HashMap<u64, usize> = ids.ids().iter().enumerate().map(|(u, id)| (id.0, u)).collect();
    let nodes: Vec<_> = out
        .states
        .iter()
        .map(|s| match s {
            Some(s) => json!({
                "parent": s.parent_id.map(|p| index[&p.0]),
                "depth": s.depth,
                "root": index[&s.root_id.0],
            }),
            None => json!(null),
        })
        .collect();
    Ok(json!({
        "edges": graph.edges(),
        "ids": ids.ids(),
        "nodes": nodes,
        "max_awake": out.trace.max_awake(),
        "total_rounds": out.trace.total_rounds,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_produce_json() {
        let edges = generate("cycle", 12, 0.0, 1).unwrap();
        let run: serde_json::Value = serde_json::from_str(&run_mis("vt", &edges, 3).unwrap()).unwrap();
        assert_eq!(run["states"].as_array().unwrap().len(), 12);
        assert_eq!(run["metrics"]["valid"], true);
        let table: Vec<(u64, Vec<u64>)> = serde_json::from_str(&sk_table(6).unwrap()).unwrap();
        assert_eq!(table[2], (3, vec![3, 4, 5]));
        let forest: serde_json::Value = serde_json::from_str(&ldt_forest(&edges, 2).unwrap()).unwrap();
        let roots = forest["nodes"].as_array().unwrap().iter().filter(|v| v["parent"].is_null()).count();
        assert_eq!(roots, 1);
    }
}
