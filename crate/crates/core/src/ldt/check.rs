use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::LdtState;
use crate::engine::Graph;
use crate::graphs::{IdAssignment, NodeId};

/// Why a collection of LDT states is not a valid LDT over a connected node set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LdtViolation {
    CountMismatch { states: usize, nodes: usize },
    RootCount { roots: usize },
    RootIdMismatch { node: usize },
    UnknownId { node: usize, id: NodeId },
    NotAnEdge { node: usize, other: usize },
    /// Parent and child records disagree.
    Inconsistent { node: usize },
    ChildOrder { node: usize },
    Depth { node: usize, expected: u64, found: u64 },
    NotSpanning { reached: usize, nodes: usize },
}

/// Checks that `states` describe one rooted spanning tree of `graph`, with correct depths,
/// a shared root ID equal to the root's own ID, and mutually consistent parent/child lists.
pub fn check_ldt(graph: &Graph, ids: &IdAssignment, states: &[LdtState]) -> Result<(), LdtViolation> {
    let n = graph.node_count();
    if states.len() != n || ids.len() != n {
        return Err(LdtViolation::CountMismatch { states: states.len(), nodes: n });
    }
    let index: HashMap<NodeId, usize> = ids.ids().iter().enumerate().map(|(u, &id)| (id, u)).collect();
    let lookup = |node: usize, id: NodeId| index.get(&id).copied().ok_or(LdtViolation::UnknownId { node, id });

    let roots: Vec<usize> = (0..n).filter(|&u| states[u].parent_id.is_none()).collect();
    if roots.len() != 1 {
        return Err(LdtViolation::RootCount { roots: roots.len() });
    }
    let root = roots[0];
    let root_id = ids.id(root);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, s) in states.iter().enumerate() {
        if s.root_id != root_id {
            return Err(LdtViolation::RootIdMismatch { node: u });
        }
        if !s.children_ids.windows(2).all(|w| w[0] < w[1]) {
            return Err(LdtViolation::ChildOrder { node: u });
        }
        for &c in &s.children_ids {
            let v = lookup(u, c)?;
            if !graph.has_edge(u, v) {
                return Err(LdtViolation::NotAnEdge { node: u, other: v });
            }
            if states[v].parent_id != Some(ids.id(u)) {
                return Err(LdtViolation::Inconsistent { node: v });
            }
            children[u].push(v);
        }
        if let Some(p) = s.parent_id {
            let v = lookup(u, p)?;
            if !states[v].children_ids.contains(&ids.id(u)) {
                return Err(LdtViolation::Inconsistent { node: u });
            }
        }
    }
    let mut depth = vec![u64::MAX; n];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut reached = 0;
    while let Some(u) = queue.pop_front() {
        reached += 1;
        if states[u].depth != depth[u] {
            return Err(LdtViolation::Depth { node: u, expected: depth[u], found: states[u].depth });
        }
        for &v in &children[u] {
            if depth[v] != u64::MAX {
                return Err(LdtViolation::Inconsistent { node: v });
            }
            depth[v] = depth[u] + 1;
            queue.push_back(v);
        }
    }
    if reached != n {
        return Err(LdtViolation::NotSpanning { reached, nodes: n });
    }
    Ok(())
}

/// Generalized in-order ranks (leftmost subtree, then the node, then the other subtrees),
/// 1-based, computed centrally from a valid LDT.
pub fn in_order_ranks(ids: &IdAssignment, states: &[LdtState]) -> Vec<u64> {
    let index: HashMap<NodeId, usize> = ids.ids().iter().enumerate().map(|(u, &id)| (id, u)).collect();
    let Some(root) = states.iter().position(|s| s.parent_id.is_none()) else {
        return Vec::new();
    };
    let mut rank = vec![0; states.len()];
    let mut next = 1;
    // (node, next child position to visit, whether the node itself has been ranked)
    let mut stack = vec![(root, 0usize, false)];
    while let Some(top) = stack.last_mut() {
        let (u, pos, done) = *top;
        let kids = &states[u].children_ids;
        if !done && (pos == 1 || kids.is_empty()) {
            rank[u] = next;
            next += 1;
            top.2 = true;
            continue;
        }
        if pos < kids.len() {
            top.1 += 1;
            stack.push((index[&kids[pos]], 0, false));
        } else {
            stack.pop();
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> IdAssignment {
        IdAssignment::sequential(n)
    }

    fn st(root: u64, depth: u64, parent: Option<u64>, children: &[u64]) -> LdtState {
        LdtState {
            root_id: NodeId(root),
            depth,
            parent_id: parent.map(NodeId),
            children_ids: children.iter().map(|&c| NodeId(c)).collect(),
            n_bound: 8,
        }
    }

    #[test]
    fn path_rooted_at_end_is_valid() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = vec![st(1, 0, None, &[2]), st(1, 1, Some(1), &[3]), st(1, 2, Some(2), &[])];
        assert_eq!(check_ldt(&g, &ids(3), &s), Ok(()));
        assert_eq!(in_order_ranks(&ids(3), &s), vec![3, 2, 1]);
    }

    #[test]
    fn violations_are_reported() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let bad_depth = vec![st(1, 0, None, &[2]), st(1, 1, Some(1), &[3]), st(1, 1, Some(2), &[])];
        assert!(matches!(check_ldt(&g, &ids(3), &bad_depth), Err(LdtViolation::Depth { node: 2, .. })));
        let two_roots = vec![st(1, 0, None, &[2]), st(1, 1, Some(1), &[]), st(3, 0, None, &[])];
        assert_eq!(check_ldt(&g, &ids(3), &two_roots), Err(LdtViolation::RootCount { roots: 2 }));
        let non_edge = vec![st(1, 0, None, &[2, 3]), st(1, 1, Some(1), &[]), st(1, 1, Some(1), &[])];
        assert_eq!(
            check_ldt(&g, &ids(3), &non_edge),
            Err(LdtViolation::NotAnEdge { node: 0, other: 2 })
        );
    }

    #[test]
    fn in_order_matches_hand_examples() {
        // r=1 with children a=2, b=3.
        let s = vec![st(1, 0, None, &[2, 3]), st(1, 1, Some(1), &[]), st(1, 1, Some(1), &[])];
        assert_eq!(in_order_ranks(&ids(3), &s), vec![2, 1, 3]);
        // r=1, A=2 leaf, B=3 with children c=4, d=5.
        let s = vec![
            st(1, 0, None, &[2, 3]),
            st(1, 1, Some(1), &[]),
            st(1, 1, Some(1), &[4, 5]),
            st(1, 2, Some(3), &[]),
            st(1, 2, Some(3), &[]),
        ];
        assert_eq!(in_order_ranks(&ids(5), &s), vec![2, 1, 4, 3, 5]);
    }
}
