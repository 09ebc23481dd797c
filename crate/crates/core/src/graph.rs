//! Vertices, edges and small graph utilities shared by every strategy.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Board vertex identifier.
pub type Vertex = u32;

/// An undirected edge stored as a sorted pair `(lo, hi)` with `lo < hi`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[Vertex; 2]", into = "[Vertex; 2]")]
pub struct Edge(Vertex, Vertex);

impl Edge {
    /// Builds the edge `uv`. Panics on a loop; use [`Edge::try_new`] for untrusted input.
    pub fn new(u: Vertex, v: Vertex) -> Edge {
        Edge::try_new(u, v).expect("an edge needs two distinct endpoints")
    }

    pub fn try_new(u: Vertex, v: Vertex) -> Option<Edge> {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => Some(Edge(u, v)),
            std::cmp::Ordering::Greater => Some(Edge(v, u)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(self) -> Vertex {
        self.0
    }

    pub fn hi(self) -> Vertex {
        self.1
    }

    pub fn ends(self) -> (Vertex, Vertex) {
        (self.0, self.1)
    }

    pub fn touches(self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint other than `v`, if `v` is an endpoint.
    pub fn other(self, v: Vertex) -> Option<Vertex> {
        if self.0 == v {
            Some(self.1)
        } else if self.1 == v {
            Some(self.0)
        } else {
            None
        }
    }

    /// Position of this edge in the triangular enumeration of pairs.
    pub fn index(self) -> usize {
        let hi = self.1 as usize;
        hi * (hi - 1) / 2 + self.0 as usize
    }

    /// Inverse of [`Edge::index`].
    pub fn from_index(idx: usize) -> Edge {
        let mut hi = (((8 * idx + 1) as f64).sqrt() as usize).div_ceil(2);
        while hi * (hi - 1) / 2 > idx {
            hi -= 1;
        }
        while (hi + 1) * hi / 2 <= idx {
            hi += 1;
        }
        let lo = idx - hi * (hi - 1) / 2;
        Edge(lo as Vertex, hi as Vertex)
    }

    pub fn map(self, f: impl Fn(Vertex) -> Vertex) -> Edge {
        Edge::new(f(self.0), f(self.1))
    }
}

impl TryFrom<[Vertex; 2]> for Edge {
    type Error = String;

    fn try_from(pair: [Vertex; 2]) -> Result<Self, Self::Error> {
        if pair[0] >= pair[1] {
            return Err(format!("edge [{}, {}] is not a sorted pair", pair[0], pair[1]));
        }
        Ok(Edge(pair[0], pair[1]))
    }
}

impl From<Edge> for [Vertex; 2] {
    fn from(e: Edge) -> Self {
        [e.0, e.1]
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

/// Number of unordered pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; returns false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn class_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Adjacency lists for a simple graph on `n` vertices built from an edge list.
pub fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<Vertex>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.lo() as usize].push(e.hi());
        adj[e.hi() as usize].push(e.lo());
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// True if the edges, read as a graph on `0..n`, form a single spanning cycle.
pub fn is_hamilton_cycle_edge_set(n: usize, edges: &[Edge]) -> bool {
    if n < 3 || edges.len() != n {
        return false;
    }
    let adj = adjacency(n, edges);
    if adj.iter().any(|l| l.len() != 2) {
        return false;
    }
    let mut uf = UnionFind::new(n);
    for e in edges {
        uf.union(e.lo() as usize, e.hi() as usize);
    }
    uf.class_size(0) == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_index_roundtrip() {
        for hi in 1..200u32 {
            for lo in 0..hi {
                let e = Edge::new(hi, lo);
                assert_eq!(Edge::from_index(e.index()), e);
            }
        }
        assert_eq!(Edge::new(0, 1).index(), 0);
        assert_eq!(Edge::new(1, 2).index(), 2);
    }

    #[test]
    fn edge_serde_is_sorted_pair() {
        let e = Edge::new(5, 2);
        assert_eq!(serde_json::to_string(&e).unwrap(), "[2,5]");
        assert!(serde_json::from_str::<Edge>("[5,2]").is_err());
        assert!(serde_json::from_str::<Edge>("[3,3]").is_err());
    }

    #[test]
    fn cycle_detection() {
        let c4 = [Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3), Edge::new(3, 0)];
        assert!(is_hamilton_cycle_edge_set(4, &c4));
        let two_triangles = [
            Edge::new(0, 1),
            Edge::new(1, 2),
            Edge::new(0, 2),
            Edge::new(3, 4),
            Edge::new(4, 5),
            Edge::new(3, 5),
        ];
        assert!(!is_hamilton_cycle_edge_set(6, &two_triangles));
    }
}
