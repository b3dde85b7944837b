//! Port-numbered undirected graphs.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EngineError;

/// A port number at a node. Ports are numbered `1..=degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Port(pub u32);

impl Port {
    /// Zero-based slot in a node's adjacency list.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        Port(i as u32 + 1)
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Far end of a port: the neighbor and the port number on the neighbor's side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub node: usize,
    pub port: Port,
}

/// Anonymous undirected network. `adjacency[u][a - 1]` is what port `a` of node `u` leads to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<Link>>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Ports at each node are assigned in
    /// ascending neighbor order.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, EngineError> {
        if node_count == 0 {
            return Err(EngineError::EmptyGraph);
        }
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); node_count];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(EngineError::NodeOutOfRange { node: u.max(v), node_count });
            }
            if u == v {
                return Err(EngineError::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(EngineError::DuplicateEdge(u.min(v), u.max(v)));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let adjacency = neighbors
            .iter()
            .enumerate()
            .map(|(u, list)| {
                list.iter()
                    .map(|&v| {
                        let back = neighbors[v].binary_search(&u).expect("symmetric adjacency");
                        Link { node: v, port: Port::from_index(back) }
                    })
                    .collect()
            })
            .collect();
        Ok(Graph { adjacency })
    }

    /// Builds a graph from explicit port tables, checking every structural invariant.
    pub fn from_ports(adjacency: Vec<Vec<Link>>) -> Result<Self, EngineError> {
        let g = Graph { adjacency };
        g.validate()?;
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn link(&self, u: usize, port: Port) -> Link {
        self.adjacency[u][port.index()]
    }

    pub fn ports(&self, u: usize) -> &[Link] {
        &self.adjacency[u]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[u].iter().map(|l| l.node)
    }

    pub fn port_to(&self, u: usize, v: usize) -> Option<Port> {
        self.adjacency[u].iter().position(|l| l.node == v).map(Port::from_index)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.port_to(u, v).is_some()
    }

    /// Each undirected edge once, as `(smaller, larger)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = (0..self.node_count())
            .flat_map(|u| self.neighbors(u).filter(move |&v| u < v).map(move |v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Subgraph induced by `nodes`, renumbered in the given order. Returns the graph and
    /// the original index of each new node.
    pub fn induced(&self, nodes: &[usize]) -> Result<(Graph, Vec<usize>), EngineError> {
        let mut position = vec![usize::MAX; self.node_count()];
        for (i, &u) in nodes.iter().enumerate() {
            position[u] = i;
        }
        let mut edges = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            for v in self.neighbors(u) {
                let j = position[v];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        Ok((Graph::from_edges(nodes.len(), &edges)?, nodes.to_vec()))
    }

    /// Checks the port involution, absence of loops and parallel edges.
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.adjacency.is_empty() {
            return Err(EngineError::EmptyGraph);
        }
        let n = self.node_count();
        for (u, links) in self.adjacency.iter().enumerate() {
            let mut targets = HashSet::with_capacity(links.len());
            for (a, link) in links.iter().enumerate() {
                if link.node >= n {
                    return Err(EngineError::NodeOutOfRange { node: link.node, node_count: n });
                }
                if link.node == u {
                    return Err(EngineError::SelfLoop(u));
                }
                if !targets.insert(link.node) {
                    return Err(EngineError::DuplicateEdge(u.min(link.node), u.max(link.node)));
                }
                let back = self.adjacency[link.node].get(link.port.0.wrapping_sub(1) as usize);
                if back != Some(&Link { node: u, port: Port::from_index(a) }) {
                    return Err(EngineError::BrokenPort { node: u, port: Port::from_index(a) });
                }
            }
        }
        Ok(())
    }

    /// Serializes as the plain-text edge list format (`u v` per line).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# nodes {}\n", self.node_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl FromStr for Graph {
    type Err = EngineError;

    /// Parses an edge list: one `u v` pair per line, 0-indexed, `#` starts a comment.
    /// A `# nodes N` comment fixes the node count so isolated trailing nodes survive.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut declared: Option<usize> = None;
        let mut edges = Vec::new();
        let mut max_node = None::<usize>;
        for (lineno, raw) in text.lines().enumerate() {
            let (body, comment) = match raw.find('#') {
                Some(i) => (&raw[..i], Some(&raw[i + 1..])),
                None => (raw, None),
            };
            if let Some(c) = comment {
                let mut words = c.split_whitespace();
                if words.next() == Some("nodes") {
                    if let Some(Ok(n)) = words.next().map(str::parse::<usize>) {
                        declared = Some(n);
                    }
                }
            }
            let mut fields = body.split_whitespace();
            let Some(a) = fields.next() else { continue };
            let parse = |s: Option<&str>| -> Result<usize, EngineError> {
                s.and_then(|s| s.parse().ok())
                    .ok_or_else(|| EngineError::Parse { line: lineno + 1, text: raw.to_string() })
            };
            let u = parse(Some(a))?;
            let v = parse(fields.next())?;
            if fields.next().is_some() {
                return Err(EngineError::Parse { line: lineno + 1, text: raw.to_string() });
            }
            max_node = Some(max_node.unwrap_or(0).max(u).max(v));
            edges.push((u, v));
        }
        let n = match (declared, max_node) {
            (Some(n), _) => n,
            (None, Some(m)) => m + 1,
            (None, None) => return Err(EngineError::EmptyGraph),
        };
        Graph::from_edges(n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ports_are_consecutive_and_involutive() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (2, 3), (1, 2)]).unwrap();
        g.validate().unwrap();
        assert_eq!(g.degree(2), 3);
        let l = g.link(2, Port(1));
        assert_eq!(l.node, 0);
        assert_eq!(g.link(l.node, l.port).node, 2);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(matches!(Graph::from_edges(2, &[(1, 1)]), Err(EngineError::SelfLoop(1))));
        assert!(matches!(
            Graph::from_edges(2, &[(0, 1), (1, 0)]),
            Err(EngineError::DuplicateEdge(0, 1))
        ));
        assert!(Graph::from_edges(0, &[]).is_err());
    }

    #[test]
    fn from_ports_detects_broken_involution() {
        let bad = vec![
            vec![Link { node: 1, port: Port(1) }],
            vec![Link { node: 0, port: Port(2) }],
        ];
        assert!(matches!(Graph::from_ports(bad), Err(EngineError::BrokenPort { .. })));
    }

    #[test]
    fn edge_list_round_trip_keeps_isolated_nodes() {
        let g = Graph::from_edges(5, &[(0, 3), (1, 3)]).unwrap();
        let parsed: Graph = g.to_edge_list().parse().unwrap();
        assert_eq!(parsed, g);
        let plain: Graph = "0 1 # first\n\n# skip\n1 2\n".parse().unwrap();
        assert_eq!(plain.node_count(), 3);
        assert!("0 x\n".parse::<Graph>().is_err());
    }

    #[test]
    fn induced_subgraph_renumbers() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let (h, map) = g.induced(&[3, 2, 0]).unwrap();
        assert_eq!(map, vec![3, 2, 0]);
        assert_eq!(h.edges(), vec![(0, 1)]);
    }

    proptest::proptest! {
        #[test]
        fn edge_list_round_trip(n in 1usize..30, raw in proptest::collection::vec((0usize..30, 0usize..30), 0..60)) {
            let mut edges: Vec<(usize, usize)> =
                raw.into_iter().map(|(a, b)| (a % n, b % n)).filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
            edges.sort_unstable();
            edges.dedup();
            let g = Graph::from_edges(n, &edges).unwrap();
            g.validate().unwrap();
            let back: Graph = g.to_edge_list().parse().unwrap();
            proptest::prop_assert_eq!(back.edges(), edges);
            proptest::prop_assert_eq!(back, g);
        }
    }
}
