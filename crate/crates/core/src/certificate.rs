//! Witnesses for forced structures and their validation against a final position.

use crate::game::GameState;
use crate::graph::{adjacency, Edge, UnionFind, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// A perfect matching of the board.
    Matching { edges: Vec<Edge> },
    /// A Hamilton cycle given as a vertex order.
    HamiltonCycle { order: Vec<Vertex> },
    /// One cycle per length `3..=n`, keyed by length.
    PancyclicFamily {
        #[serde(with = "length_pairs")]
        cycles: BTreeMap<usize, Vec<Vertex>>,
    },
    /// A copy of `tree` with `map[t]` the board vertex hosting tree vertex `t`.
    TreeEmbedding { tree: Vec<Edge>, map: Vec<Vertex> },
    /// Disjoint copies of `tree`; each component lists the host of every tree vertex.
    TreeFactor { tree: Vec<Edge>, components: Vec<Vec<Vertex>> },
    /// Vertex-disjoint triangles covering the board.
    TriangleFactor { triangles: Vec<[Vertex; 3]> },
    /// Vertex-disjoint triangles, not necessarily spanning.
    Triangles { triangles: Vec<[Vertex; 3]> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectCode {
    EdgeNotClient,
    NotSpanning,
    RepeatedVertex,
    VertexOutOfRange,
    LengthGap,
    WrongLength,
    NotATree,
    ShapeMismatch,
}

impl RejectCode {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectCode::EdgeNotClient => "edge not Client",
            RejectCode::NotSpanning => "not spanning",
            RejectCode::RepeatedVertex => "repeated vertex",
            RejectCode::VertexOutOfRange => "vertex out of range",
            RejectCode::LengthGap => "length gap",
            RejectCode::WrongLength => "wrong length",
            RejectCode::NotATree => "not a tree",
            RejectCode::ShapeMismatch => "shape mismatch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub code: RejectCode,
    pub detail: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code.as_str(), self.detail)
    }
}

impl std::error::Error for Rejection {}

fn reject(code: RejectCode, detail: impl Into<String>) -> Rejection {
    Rejection { code, detail: detail.into() }
}

impl Certificate {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Certificate::Matching { .. } => "matching",
            Certificate::HamiltonCycle { .. } => "hamilton-cycle",
            Certificate::PancyclicFamily { .. } => "pancyclic-family",
            Certificate::TreeEmbedding { .. } => "tree-embedding",
            Certificate::TreeFactor { .. } => "tree-factor",
            Certificate::TriangleFactor { .. } => "triangle-factor",
            Certificate::Triangles { .. } => "triangles",
        }
    }

    /// Relabels every vertex through `f`.
    pub fn map_vertices(&self, f: impl Fn(Vertex) -> Vertex) -> Certificate {
        match self {
            Certificate::Matching { edges } => {
                let mut edges: Vec<Edge> = edges.iter().map(|e| e.map(&f)).collect();
                edges.sort_unstable();
                Certificate::Matching { edges }
            }
            Certificate::HamiltonCycle { order } => {
                Certificate::HamiltonCycle { order: order.iter().map(|&v| f(v)).collect() }
            }
            Certificate::PancyclicFamily { cycles } => Certificate::PancyclicFamily {
                cycles: cycles.iter().map(|(&l, c)| (l, c.iter().map(|&v| f(v)).collect())).collect(),
            },
            Certificate::TreeEmbedding { tree, map } => Certificate::TreeEmbedding {
                tree: tree.clone(),
                map: map.iter().map(|&v| f(v)).collect(),
            },
            Certificate::TreeFactor { tree, components } => Certificate::TreeFactor {
                tree: tree.clone(),
                components: components.iter().map(|c| c.iter().map(|&v| f(v)).collect()).collect(),
            },
            Certificate::TriangleFactor { triangles } => Certificate::TriangleFactor {
                triangles: triangles.iter().map(|t| [f(t[0]), f(t[1]), f(t[2])]).collect(),
            },
            Certificate::Triangles { triangles } => Certificate::Triangles {
                triangles: triangles.iter().map(|t| [f(t[0]), f(t[1]), f(t[2])]).collect(),
            },
        }
    }

    /// Checks that every listed edge is Client-owned and that the structural predicate holds.
    pub fn validate(&self, game: &GameState) -> Result<(), Rejection> {
        let n = game.vertex_count();
        match self {
            Certificate::Matching { edges } => {
                let mut seen = vec![false; n];
                for &e in edges {
                    need_client(game, e.lo(), e.hi())?;
                    for v in [e.lo(), e.hi()] {
                        mark(&mut seen, v)?;
                    }
                }
                if seen.iter().any(|s| !s) {
                    return Err(reject(RejectCode::NotSpanning, "matching leaves a vertex uncovered"));
                }
                Ok(())
            }
            Certificate::HamiltonCycle { order } => {
                if order.len() != n {
                    return Err(reject(
                        RejectCode::NotSpanning,
                        format!("cycle visits {} of {n} vertices", order.len()),
                    ));
                }
                check_cycle(game, order)
            }
            Certificate::PancyclicFamily { cycles } => {
                for len in 3..=n {
                    let Some(cycle) = cycles.get(&len) else {
                        return Err(reject(RejectCode::LengthGap, format!("no cycle of length {len}")));
                    };
                    if cycle.len() != len {
                        return Err(reject(
                            RejectCode::WrongLength,
                            format!("entry {len} lists {} vertices", cycle.len()),
                        ));
                    }
                    check_cycle(game, cycle)?;
                }
                Ok(())
            }
            Certificate::TreeEmbedding { tree, map } => {
                if map.len() != n {
                    return Err(reject(RejectCode::NotSpanning, "embedding does not span the board"));
                }
                check_tree_copy(game, tree, map, &mut vec![false; n])
            }
            Certificate::TreeFactor { tree, components } => {
                let k = tree.len() + 1;
                if components.len() * k != n {
                    return Err(reject(RejectCode::NotSpanning, "components do not cover the board"));
                }
                let mut seen = vec![false; n];
                for comp in components {
                    if comp.len() != k {
                        return Err(reject(RejectCode::ShapeMismatch, "component of the wrong order"));
                    }
                    check_tree_copy(game, tree, comp, &mut seen)?;
                }
                Ok(())
            }
            Certificate::TriangleFactor { triangles } => {
                if triangles.len() * 3 != n {
                    return Err(reject(RejectCode::NotSpanning, "triangles do not cover the board"));
                }
                check_triangles(game, triangles)
            }
            Certificate::Triangles { triangles } => check_triangles(game, triangles),
        }
    }

    pub fn is_valid(&self, game: &GameState) -> bool {
        self.validate(game).is_ok()
    }
}

fn mark(seen: &mut [bool], v: Vertex) -> Result<(), Rejection> {
    let slot = seen
        .get_mut(v as usize)
        .ok_or_else(|| reject(RejectCode::VertexOutOfRange, format!("vertex {v}")))?;
    if *slot {
        return Err(reject(RejectCode::RepeatedVertex, format!("vertex {v}")));
    }
    *slot = true;
    Ok(())
}

fn need_client(game: &GameState, u: Vertex, v: Vertex) -> Result<(), Rejection> {
    if game.is_client(u, v) {
        Ok(())
    } else {
        Err(reject(RejectCode::EdgeNotClient, format!("edge {u}-{v} is {:?}", game.owner_of(u, v))))
    }
}

fn check_triangles(game: &GameState, triangles: &[[Vertex; 3]]) -> Result<(), Rejection> {
    let mut seen = vec![false; game.vertex_count()];
    for t in triangles {
        for &v in t {
            mark(&mut seen, v)?;
        }
        need_client(game, t[0], t[1])?;
        need_client(game, t[1], t[2])?;
        need_client(game, t[0], t[2])?;
    }
    Ok(())
}

fn check_cycle(game: &GameState, cycle: &[Vertex]) -> Result<(), Rejection> {
    if cycle.len() < 3 {
        return Err(reject(RejectCode::WrongLength, "a cycle needs three vertices"));
    }
    let mut seen = vec![false; game.vertex_count()];
    for &v in cycle {
        mark(&mut seen, v)?;
    }
    for i in 0..cycle.len() {
        need_client(game, cycle[i], cycle[(i + 1) % cycle.len()])?;
    }
    Ok(())
}

fn check_tree_copy(
    game: &GameState,
    tree: &[Edge],
    map: &[Vertex],
    seen: &mut [bool],
) -> Result<(), Rejection> {
    let k = map.len();
    if tree.len() + 1 != k || tree.iter().any(|e| e.hi() as usize >= k) {
        return Err(reject(RejectCode::NotATree, "tree edge list does not match the map"));
    }
    let mut uf = UnionFind::new(k);
    for e in tree {
        if !uf.union(e.lo() as usize, e.hi() as usize) {
            return Err(reject(RejectCode::NotATree, "tree edge list contains a cycle"));
        }
    }
    for &v in map {
        mark(seen, v)?;
    }
    for e in tree {
        need_client(game, map[e.lo() as usize], map[e.hi() as usize])?;
    }
    Ok(())
}

/// Vertex-disjoint triangles of `adj` covering all vertices, if any exist.
pub fn find_triangle_factor(n: usize, edges: &[Edge]) -> Option<Vec<[Vertex; 3]>> {
    if n % 3 != 0 {
        return None;
    }
    let adj = adjacency(n, edges);
    let has = |u: Vertex, v: Vertex| adj[u as usize].binary_search(&v).is_ok();
    let mut tri_of: Vec<Vec<[Vertex; 3]>> = vec![Vec::new(); n];
    for u in 0..n as Vertex {
        for &v in adj[u as usize].iter().filter(|&&v| v > u) {
            for &w in adj[v as usize].iter().filter(|&&w| w > v) {
                if has(u, w) {
                    for x in [u, v, w] {
                        tri_of[x as usize].push([u, v, w]);
                    }
                }
            }
        }
    }
    if tri_of.iter().any(|t| t.is_empty()) {
        return None;
    }
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n / 3);
    fn search(
        tri_of: &[Vec<[Vertex; 3]>],
        used: &mut [bool],
        out: &mut Vec<[Vertex; 3]>,
    ) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..used.len() {
            if used[v] {
                continue;
            }
            let options = tri_of[v].iter().filter(|t| t.iter().all(|&x| !used[x as usize])).count();
            if options == 0 {
                return false;
            }
            if best.map_or(true, |(_, c)| options < c) {
                best = Some((v, options));
            }
        }
        let Some((v, _)) = best else { return true };
        for t in &tri_of[v] {
            if t.iter().any(|&x| used[x as usize]) {
                continue;
            }
            for &x in t {
                used[x as usize] = true;
            }
            out.push(*t);
            if search(tri_of, used, out) {
                return true;
            }
            out.pop();
            for &x in t {
                used[x as usize] = false;
            }
        }
        false
    }
    search(&tri_of, &mut used, &mut out).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{BoardSpec, Offer};

    fn k4_with_client(client: &[(Vertex, Vertex)], waiter: &[(Vertex, Vertex)]) -> GameState {
        let mut g = GameState::new(BoardSpec::complete(4, 1)).unwrap();
        for (&(a, b), &(c, d)) in client.iter().zip(waiter) {
            g.apply_round(&Offer::pair(Edge::new(a, b), Edge::new(c, d)), 0).unwrap();
        }
        g
    }

    #[test]
    fn matching_on_k4() {
        let g = k4_with_client(&[(0, 1), (2, 3)], &[(0, 2), (1, 3)]);
        let cert = Certificate::Matching { edges: vec![Edge::new(0, 1), Edge::new(2, 3)] };
        assert!(cert.is_valid(&g));
    }

    #[test]
    fn cycle_with_waiter_edge_rejected() {
        let mut g = GameState::new(BoardSpec::complete(4, 2)).unwrap();
        let mut offers = vec![
            (vec![(0, 1), (0, 2), (1, 3)], 0),
            (vec![(1, 2), (0, 3), (2, 3)], 0),
        ];
        for (edges, pick) in offers.drain(..) {
            let offer = Offer::new(edges.into_iter().map(|(a, b)| Edge::new(a, b)).collect());
            g.apply_round(&offer, pick).unwrap();
        }
        let cert = Certificate::HamiltonCycle { order: vec![0, 1, 2, 3] };
        assert_eq!(cert.validate(&g).unwrap_err().code, RejectCode::EdgeNotClient);
    }

    #[test]
    fn pancyclic_gap_reported() {
        let mut g = GameState::new(BoardSpec::complete(8, 1)).unwrap();
        let all: Vec<Edge> = g.free_edges().collect();
        g.seed_client_edges(&all).unwrap();
        let mut cycles = BTreeMap::new();
        for len in 3..=8usize {
            if len != 5 {
                cycles.insert(len, (0..len as Vertex).collect());
            }
        }
        let cert = Certificate::PancyclicFamily { cycles: cycles.clone() };
        assert_eq!(cert.validate(&g).unwrap_err().code, RejectCode::LengthGap);
        cycles.insert(5, (0..5).collect());
        assert!(Certificate::PancyclicFamily { cycles }.is_valid(&g));
    }

    #[test]
    fn triangle_factor_finder() {
        let mut edges = Vec::new();
        for base in [0u32, 3] {
            edges.push(Edge::new(base, base + 1));
            edges.push(Edge::new(base + 1, base + 2));
            edges.push(Edge::new(base, base + 2));
        }
        edges.push(Edge::new(2, 3));
        assert_eq!(find_triangle_factor(6, &edges).unwrap().len(), 2);
        edges.remove(0);
        assert!(find_triangle_factor(6, &edges).is_none());
    }
}

/// Stores the length-keyed cycle map as `[[length, cycle], ...]`.
mod length_pairs {
    use crate::graph::Vertex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(map: &BTreeMap<usize, Vec<Vertex>>, s: S) -> Result<S::Ok, S::Error> {
        map.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, Vec<Vertex>>, D::Error> {
        Ok(Vec::<(usize, Vec<Vertex>)>::deserialize(d)?.into_iter().collect())
    }
}
