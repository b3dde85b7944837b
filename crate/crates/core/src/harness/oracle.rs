use std::collections::BTreeSet;

use serde::Serialize;

use super::HarnessError;
use crate::engine::Graph;
use crate::graphs::induced_components;
use crate::mis::MisState;

/// Greedy MIS over `ordering`: a node joins iff no earlier member is adjacent.
pub fn sequential_lfmis(graph: &Graph, ordering: &[usize]) -> Result<BTreeSet<usize>, HarnessError> {
    let n = graph.node_count();
    let mut seen = vec![false; n];
    if ordering.len() != n || ordering.iter().any(|&u| u >= n || std::mem::replace(&mut seen[u], true)) {
        return Err(HarnessError::NotPermutation);
    }
    Ok(greedy(graph, ordering))
}

/// Greedy over any node sequence, without checking that it is a permutation.
pub(crate) fn greedy(graph: &Graph, order: &[usize]) -> BTreeSet<usize> {
    let mut blocked = vec![false; graph.node_count()];
    let mut set = BTreeSet::new();
    for &u in order {
        if !blocked[u] {
            set.insert(u);
            blocked[u] = true;
            for v in graph.neighbors(u) {
                blocked[v] = true;
            }
        }
    }
    set
}

/// Outcome of [`check_mis`]; lists every offending node.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MisReport {
    pub valid: bool,
    pub undecided: Vec<usize>,
    pub failed: Vec<usize>,
    /// Adjacent pairs that are both in the set.
    pub adjacent_members: Vec<(usize, usize)>,
    /// Non-members without a member neighbor.
    pub undominated: Vec<usize>,
}

pub fn check_mis(graph: &Graph, states: &[MisState]) -> MisReport {
    let mut r = MisReport::default();
    for (u, s) in states.iter().enumerate() {
        match s {
            MisState::Undecided => r.undecided.push(u),
            MisState::Failed => r.failed.push(u),
            MisState::NotInMis => {
                if !graph.neighbors(u).any(|v| states[v] == MisState::InMis) {
                    r.undominated.push(u);
                }
            }
            MisState::InMis => {}
        }
    }
    for (u, v) in graph.edges() {
        if states[u] == MisState::InMis && states[v] == MisState::InMis {
            r.adjacent_members.push((u, v));
        }
    }
    r.valid = states.len() == graph.node_count()
        && r.undecided.is_empty()
        && r.failed.is_empty()
        && r.adjacent_members.is_empty()
        && r.undominated.is_empty();
    r
}

/// Membership states for a node set.
pub fn states_from_set(n: usize, set: &BTreeSet<usize>) -> Vec<MisState> {
    (0..n).map(|u| if set.contains(&u) { MisState::InMis } else { MisState::NotInMis }).collect()
}

/// Sizes of the connected components of the subgraph induced by `subset`, ascending.
pub fn component_sizes(graph: &Graph, subset: &[usize]) -> Vec<usize> {
    let mut sizes: Vec<usize> = induced_components(graph, subset).iter().map(Vec::len).collect();
    sizes.sort_unstable();
    sizes
}
