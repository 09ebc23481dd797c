//! Trees: structural classification, leaf matchings, random generation and
//! the spanning-tree embedding and tree-factor strategies built on them.

mod embed;
mod factor;

pub use embed::{EmbedCase, TreeEmbedConfig, TreeEmbedStrategy, EPSILON_EMBED, MU};
pub use factor::{path_factor_game, PathFactorStrategy, TreeFactorStrategy};

use crate::graph::{Edge, UnionFind, Vertex};
use rand::Rng;
use std::collections::{BinaryHeap, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("edge list is not a spanning tree on {0} vertices")]
    NotATree(usize),
    #[error("tree has neither a bare path nor enough leaf neighbours (longest bare path {longest}, |N(L)| = {leaf_neighbors})")]
    Unclassifiable { longest: usize, leaf_neighbors: usize },
}

/// An undirected tree on vertices `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<Vertex>>,
}

impl Tree {
    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Tree, TreeError> {
        if n == 0 || edges.len() + 1 != n {
            return Err(TreeError::NotATree(n));
        }
        let mut uf = UnionFind::new(n);
        let mut adj = vec![Vec::new(); n];
        for e in edges {
            if e.hi() as usize >= n || !uf.union(e.lo() as usize, e.hi() as usize) {
                return Err(TreeError::NotATree(n));
            }
            adj[e.lo() as usize].push(e.hi());
            adj[e.hi() as usize].push(e.lo());
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Ok(Tree { adj })
    }

    /// The path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Tree {
        let edges: Vec<Edge> = (1..n as Vertex).map(|i| Edge::new(i - 1, i)).collect();
        Tree::from_edges(n, &edges).expect("a path is a tree")
    }

    /// A path on `n - 4` vertices with two extra leaves at each end. For
    /// `n = 5` the spine is a single vertex and the tree is the star `K_{1,4}`.
    pub fn two_leaf_tipped(n: usize) -> Tree {
        assert!(n >= 5, "the two-leaf-tipped tree needs at least 5 vertices");
        let spine = (n - 4) as Vertex;
        let mut edges: Vec<Edge> = (1..spine).map(|i| Edge::new(i - 1, i)).collect();
        let last = spine - 1;
        edges.push(Edge::new(0, spine));
        edges.push(Edge::new(0, spine + 1));
        edges.push(Edge::new(last, spine + 2));
        edges.push(Edge::new(last, spine + 3));
        Tree::from_edges(n, &edges).expect("construction is a tree")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Maximum degree after deleting `v`.
    pub fn max_degree_without(&self, v: Vertex) -> usize {
        (0..self.n() as Vertex)
            .filter(|&x| x != v)
            .map(|x| self.degree(x) - usize::from(self.adj[x as usize].contains(&v)))
            .max()
            .unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.n().saturating_sub(1));
        for (u, l) in self.adj.iter().enumerate() {
            for &v in l {
                if (u as Vertex) < v {
                    out.push(Edge::new(u as Vertex, v));
                }
            }
        }
        out
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        self.degree(v) == 1
    }

    pub fn leaves(&self) -> Vec<Vertex> {
        (0..self.n() as Vertex).filter(|&v| self.is_leaf(v)).collect()
    }

    /// `N_T(L)`: vertices adjacent to at least one leaf.
    pub fn leaf_neighbors(&self) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = (0..self.n() as Vertex)
            .filter(|&v| !self.is_leaf(v) && self.adj[v as usize].iter().any(|&u| self.is_leaf(u)))
            .collect();
        if self.n() == 2 {
            out = vec![0, 1];
        }
        out
    }

    pub fn is_path(&self) -> bool {
        self.max_degree() <= 2
    }

    pub fn distances_from(&self, root: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[root as usize] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x as usize] {
                if dist[y as usize] == usize::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Maximal bare paths: maximal runs of degree-2 vertices together with
    /// their two outer neighbours, plus edges joining two vertices of other degrees.
    pub fn maximal_bare_paths(&self) -> Vec<Vec<Vertex>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n as Vertex {
            if self.degree(start) != 2 || seen[start as usize] {
                continue;
            }
            let mut run = VecDeque::from([start]);
            seen[start as usize] = true;
            for dir in 0..2 {
                let mut prev = start;
                let mut cur = self.adj[start as usize][dir];
                loop {
                    if dir == 0 {
                        run.push_front(cur);
                    } else {
                        run.push_back(cur);
                    }
                    if self.degree(cur) != 2 || seen[cur as usize] {
                        break;
                    }
                    seen[cur as usize] = true;
                    let next = self.adj[cur as usize].iter().copied().find(|&x| x != prev).unwrap();
                    prev = cur;
                    cur = next;
                }
            }
            out.push(run.into_iter().collect());
        }
        for e in self.edges() {
            if self.degree(e.lo()) != 2 && self.degree(e.hi()) != 2 {
                out.push(vec![e.lo(), e.hi()]);
            }
        }
        out
    }

    /// True if `path` is a path in the tree whose interior vertices have degree 2.
    pub fn is_bare_path(&self, path: &[Vertex]) -> bool {
        path.len() >= 2
            && path.windows(2).all(|w| self.adj[w[0] as usize].binary_search(&w[1]).is_ok())
            && path[1..path.len() - 1].iter().all(|&x| self.degree(x) == 2)
            && {
                let mut s = path.to_vec();
                s.sort_unstable();
                s.windows(2).all(|w| w[0] != w[1])
            }
    }

    /// Canonical string of the unrooted tree: equal strings iff isomorphic trees.
    pub fn canonical_form(&self) -> String {
        let centers = self.centers();
        centers.iter().map(|&c| self.rooted_code(c)).min().unwrap_or_default()
    }

    fn centers(&self) -> Vec<Vertex> {
        let n = self.n();
        if n <= 2 {
            return (0..n as Vertex).collect();
        }
        let mut deg: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut layer: Vec<Vertex> = (0..n as Vertex).filter(|&v| deg[v as usize] == 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                for &u in &self.adj[v as usize] {
                    deg[u as usize] -= 1;
                    if deg[u as usize] == 1 {
                        next.push(u);
                    }
                }
            }
            layer = next;
        }
        layer.sort_unstable();
        layer
    }

    fn rooted_code(&self, root: Vertex) -> String {
        let n = self.n();
        let mut order = Vec::with_capacity(n);
        let mut parent = vec![Vertex::MAX; n];
        parent[root as usize] = root;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &self.adj[x as usize] {
                if parent[y as usize] == Vertex::MAX {
                    parent[y as usize] = x;
                    stack.push(y);
                }
            }
        }
        let mut codes: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut done: Vec<String> = vec![String::new(); n];
        for &x in order.iter().rev() {
            let mut kids = std::mem::take(&mut codes[x as usize]);
            kids.sort_unstable();
            let mut s = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
            s.push('(');
            for k in kids {
                s.push_str(&k);
            }
            s.push(')');
            if x == root {
                done[x as usize] = s;
            } else {
                codes[parent[x as usize] as usize].push(s);
            }
        }
        std::mem::take(&mut done[root as usize])
    }
}

/// Outcome of the bare-path versus leaf-neighbour dichotomy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeClass {
    /// A bare path given as a vertex sequence.
    BarePath(Vec<Vertex>),
    /// `N_T(L)` is large; the set is returned sorted.
    LeafRich(Vec<Vertex>),
}

/// Classifies `tree` with threshold `mu * sqrt(n)`.
pub fn classify_tree(tree: &Tree, mu: f64) -> Result<TreeClass, TreeError> {
    let threshold = mu * (tree.n() as f64).sqrt();
    let nl = tree.leaf_neighbors();
    if nl.len() as f64 >= threshold {
        return Ok(TreeClass::LeafRich(nl));
    }
    let longest = tree
        .maximal_bare_paths()
        .into_iter()
        .max_by_key(|p| p.len())
        .unwrap_or_default();
    if longest.len().saturating_sub(1) as f64 >= threshold {
        Ok(TreeClass::BarePath(longest))
    } else {
        Err(TreeError::Unclassifiable {
            longest: longest.len().saturating_sub(1),
            leaf_neighbors: nl.len(),
        })
    }
}

/// Leaf matching used by the leaf-rich embedding case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafMatching {
    /// `(x, leaf)` pairs: `x` in `N_T(L)`, `leaf` one of its leaves.
    pub pairs: Vec<(Vertex, Vertex)>,
    /// Whether the chosen leaf neighbours sit at odd distance from the pin.
    pub odd: bool,
}

/// Picks one leaf per leaf neighbour, then keeps the distance-parity class
/// (measured from `v`) holding more of them; ties go to the odd class.
pub fn select_leaf_matching(tree: &Tree, v: Vertex) -> LeafMatching {
    let dist = tree.distances_from(v);
    let mut odd = Vec::new();
    let mut even = Vec::new();
    for x in tree.leaf_neighbors() {
        if x == v || tree.is_leaf(x) {
            continue;
        }
        let leaf = tree.neighbors(x).iter().copied().find(|&y| tree.is_leaf(y)).unwrap();
        if dist[x as usize] % 2 == 1 {
            odd.push((x, leaf));
        } else {
            even.push((x, leaf));
        }
    }
    if odd.len() >= even.len() {
        LeafMatching { pairs: odd, odd: true }
    } else {
        LeafMatching { pairs: even, odd: false }
    }
}

/// Decodes a Prüfer sequence over `0..n` into a tree.
pub fn tree_from_prufer(n: usize, seq: &[Vertex]) -> Tree {
    assert!(n >= 2 && seq.len() == n - 2, "a Prüfer sequence has n-2 entries");
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x as usize] += 1;
    }
    let mut leaves: BinaryHeap<std::cmp::Reverse<Vertex>> =
        (0..n as Vertex).filter(|&v| degree[v as usize] == 1).map(std::cmp::Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("a leaf is always available");
        edges.push(Edge::new(leaf, x));
        degree[x as usize] -= 1;
        if degree[x as usize] == 1 {
            leaves.push(std::cmp::Reverse(x));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push(Edge::new(a, b));
    Tree::from_edges(n, &edges).expect("Prüfer decoding yields a tree")
}

const REJECTION_TRIES: usize = 2000;

/// Random labelled tree with maximum degree at most `max_degree`.
///
/// Draws uniform Prüfer sequences and keeps the first one within the cap,
/// which is exactly uniform over the capped trees. When the cap is so tight
/// that acceptance is hopeless it falls back to drawing each entry among the
/// vertices that still have room, which is no longer uniform.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, max_degree: usize) -> Tree {
    assert!(n >= 3 && max_degree >= 2, "needs n >= 3 and a degree cap of at least 2");
    for _ in 0..REJECTION_TRIES {
        let seq: Vec<Vertex> = (0..n - 2).map(|_| rng.gen_range(0..n as Vertex)).collect();
        let mut degree = vec![1usize; n];
        for &x in &seq {
            degree[x as usize] += 1;
        }
        if degree.iter().all(|&d| d <= max_degree) {
            return tree_from_prufer(n, &seq);
        }
    }
    let mut degree = vec![1usize; n];
    let mut open: Vec<Vertex> = (0..n as Vertex).collect();
    let mut seq = Vec::with_capacity(n - 2);
    for _ in 0..n - 2 {
        let i = rng.gen_range(0..open.len());
        let x = open[i];
        seq.push(x);
        degree[x as usize] += 1;
        if degree[x as usize] == max_degree {
            open.swap_remove(i);
        }
    }
    tree_from_prufer(n, &seq)
}

/// Lowest-index vertex eligible as the pinned vertex: not a leaf, not next to a
/// leaf, and of degree at most `n/3`.
pub fn default_pin(tree: &Tree) -> Option<Vertex> {
    let nl = tree.leaf_neighbors();
    (0..tree.n() as Vertex)
        .find(|&v| !tree.is_leaf(v) && !nl.contains(&v) && 3 * tree.degree(v) <= tree.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_is_bare() {
        let t = Tree::path(100);
        match classify_tree(&t, 1.0 / 3.0).unwrap() {
            TreeClass::BarePath(p) => {
                assert!(t.is_bare_path(&p));
                assert_eq!(p.len(), 100);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn star_of_stars_is_leaf_rich() {
        let mut edges = Vec::new();
        let mut next = 1;
        for _ in 0..10 {
            let mid = next;
            edges.push(Edge::new(0, mid));
            next += 1;
            for _ in 0..9 {
                edges.push(Edge::new(mid, next));
                next += 1;
            }
        }
        let t = Tree::from_edges(next as usize, &edges).unwrap();
        assert!(matches!(classify_tree(&t, 1.0 / 3.0).unwrap(), TreeClass::LeafRich(l) if l.len() == 10));
    }

    #[test]
    fn double_star_parity() {
        let mut edges = vec![Edge::new(0, 1), Edge::new(0, 2)];
        edges.extend([Edge::new(1, 3), Edge::new(1, 4), Edge::new(2, 5), Edge::new(2, 6)]);
        edges.extend([Edge::new(3, 7), Edge::new(4, 8)]);
        let t = Tree::from_edges(9, &edges).unwrap();
        let m = select_leaf_matching(&t, 0);
        assert!(!m.odd);
        assert_eq!(m.pairs, vec![(3, 7), (4, 8)]);
        let m = select_leaf_matching(&t, 1);
        assert!(m.odd);
        assert_eq!(m.pairs, vec![(3, 7), (4, 8)]);
    }

    #[test]
    fn prufer_roundtrip_shape() {
        let t = tree_from_prufer(6, &[3, 3, 3, 4]);
        assert_eq!(t.degree(3), 4);
        assert_eq!(t.degree(4), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let t = random_tree(&mut rng, 50, 4);
            assert!(t.max_degree() <= 4);
            assert_eq!(t.edges().len(), 49);
        }
    }

    #[test]
    fn canonical_form_detects_isomorphism() {
        let a = Tree::path(7);
        let relabelled = [3u32, 0, 5, 1, 6, 2, 4];
        let edges: Vec<Edge> = a.edges().iter().map(|e| e.map(|v| relabelled[v as usize])).collect();
        let b = Tree::from_edges(7, &edges).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
        assert_ne!(a.canonical_form(), Tree::two_leaf_tipped(7).canonical_form());
    }

    #[test]
    fn tipped_tree_shape() {
        let t = Tree::two_leaf_tipped(20);
        assert_eq!(t.leaves().len(), 4);
        assert_eq!(t.leaf_neighbors(), vec![0, 15]);
        assert_eq!(default_pin(&t), Some(1));
    }
}
