//! Client policies used as opponents: seeded random play, greedy heuristics,
//! and the last-edge avoider that witnesses the lower bounds.

use crate::game::{GameState, Offer};
use crate::graph::{Edge, UnionFind, Vertex};
use crate::tree::Tree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub trait ClientPolicy {
    fn name(&self) -> String;
    /// Index into `offer.edges` of the edge Client keeps.
    fn choose(&mut self, game: &GameState, offer: &Offer) -> usize;
}

impl<P: ClientPolicy + ?Sized> ClientPolicy for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn choose(&mut self, game: &GameState, offer: &Offer) -> usize {
        (**self).choose(game, offer)
    }
}

/// The structure a Waiter strategy is trying to force.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Target {
    Matching,
    Hamilton,
    Pancyclic,
    /// A spanning copy of the tree with these edges.
    Tree { edges: Vec<Edge> },
    /// A factor of copies of the small tree with these edges.
    TreeFactor { edges: Vec<Edge> },
    TriangleFactor,
}

impl Target {
    /// True if claiming `e` makes Client's graph exactly a minimum-size
    /// winning set, i.e. `e` is the last edge of a structure of the smallest
    /// possible size.
    pub fn completes_minimum(&self, game: &GameState, e: Edge) -> bool {
        let n = game.vertex_count();
        let c = game.client_count() + 1;
        let deg = |v: Vertex| game.d_c(v) + usize::from(e.touches(v));
        match self {
            Target::Matching => {
                2 * c == n && (0..n as Vertex).all(|v| deg(v) == 1)
            }
            Target::Hamilton | Target::Pancyclic => {
                c == n && (0..n as Vertex).all(|v| deg(v) == 2) && components_with(game, e).1 == 1
            }
            Target::TriangleFactor => {
                c == n
                    && (0..n as Vertex).all(|v| deg(v) == 2)
                    && components_with(game, e).0.iter().all(|comp| comp.len() == 3)
            }
            Target::Tree { edges } => {
                if c + 1 != n {
                    return false;
                }
                let mut all = game.client_edges();
                all.push(e);
                match Tree::from_edges(n, &all) {
                    Ok(t) => Tree::from_edges(n, edges).is_ok_and(|target| {
                        t.canonical_form() == target.canonical_form()
                    }),
                    Err(_) => false,
                }
            }
            Target::TreeFactor { edges } => {
                let k = edges.len() + 1;
                if n % k != 0 || c != (k - 1) * n / k {
                    return false;
                }
                let Ok(small) = Tree::from_edges(k, edges) else { return false };
                let want = small.canonical_form();
                let mut all = game.client_edges();
                all.push(e);
                let (comps, _) = components_with(game, e);
                comps.iter().all(|comp| {
                    if comp.len() != k {
                        return false;
                    }
                    let local = |v: Vertex| comp.binary_search(&v).unwrap() as Vertex;
                    let sub: Vec<Edge> = all
                        .iter()
                        .filter(|x| comp.binary_search(&x.lo()).is_ok())
                        .map(|x| Edge::new(local(x.lo()), local(x.hi())))
                        .collect();
                    Tree::from_edges(k, &sub).is_ok_and(|t| t.canonical_form() == want)
                })
            }
        }
    }
}

/// Components (sorted vertex lists) of Client's graph plus `e`, and their count.
fn components_with(game: &GameState, e: Edge) -> (Vec<Vec<Vertex>>, usize) {
    let n = game.vertex_count();
    let mut uf = UnionFind::new(n);
    for v in 0..n as Vertex {
        for &u in game.client_neighbors(v) {
            uf.union(v as usize, u as usize);
        }
    }
    uf.union(e.lo() as usize, e.hi() as usize);
    let mut buckets: std::collections::BTreeMap<usize, Vec<Vertex>> = Default::default();
    for v in 0..n {
        buckets.entry(uf.find(v)).or_default().push(v as Vertex);
    }
    let comps: Vec<Vec<Vertex>> = buckets.into_values().collect();
    let count = comps.len();
    (comps, count)
}

/// Uniformly random choice from a seeded ChaCha stream.
pub struct UniformRandom {
    seed: u64,
    rng: ChaCha8Rng,
}

impl UniformRandom {
    pub fn new(seed: u64) -> Self {
        UniformRandom { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl ClientPolicy for UniformRandom {
    fn name(&self) -> String {
        format!("uniform-random({})", self.seed)
    }

    fn choose(&mut self, _game: &GameState, offer: &Offer) -> usize {
        self.rng.gen_range(0..offer.len())
    }
}

/// Takes the edge whose endpoints carry the fewest Waiter edges.
pub struct MinWaiterDegree;

impl ClientPolicy for MinWaiterDegree {
    fn name(&self) -> String {
        "min-waiter-degree".into()
    }

    fn choose(&mut self, game: &GameState, offer: &Offer) -> usize {
        argbest(offer, |e| -((game.d_w(e.lo()) + game.d_w(e.hi())) as i64))
    }
}

/// Greedy spoiler: prefers edges that collide with Client's existing
/// structure (high Client degree at the endpoints, closing cycles).
pub struct AntiStructure {
    target: Target,
}

impl AntiStructure {
    pub fn new(target: Target) -> Self {
        AntiStructure { target }
    }
}

impl ClientPolicy for AntiStructure {
    fn name(&self) -> String {
        "anti-structure".into()
    }

    fn choose(&mut self, game: &GameState, offer: &Offer) -> usize {
        let cycle_bonus = !matches!(self.target, Target::Matching | Target::TriangleFactor);
        argbest(offer, |e| {
            let mut score = (game.d_c(e.lo()) + game.d_c(e.hi())) as i64;
            if cycle_bonus && client_connected(game, e.lo(), e.hi()) {
                score += 1000;
            }
            if matches!(self.target, Target::TriangleFactor) && closes_triangle(game, e) {
                score -= 1000;
            }
            score
        })
    }
}

/// Never takes an edge that would complete a minimum-size winning set when
/// another option exists; otherwise plays uniformly at random.
pub struct LastEdgeAvoider {
    target: Target,
    rng: UniformRandom,
}

impl LastEdgeAvoider {
    pub fn new(target: Target, seed: u64) -> Self {
        LastEdgeAvoider { target, rng: UniformRandom::new(seed) }
    }
}

impl ClientPolicy for LastEdgeAvoider {
    fn name(&self) -> String {
        "avoider".into()
    }

    fn choose(&mut self, game: &GameState, offer: &Offer) -> usize {
        let safe: Vec<usize> = (0..offer.len())
            .filter(|&i| !self.target.completes_minimum(game, offer.edges[i]))
            .collect();
        if safe.is_empty() || safe.len() == offer.len() {
            return self.rng.choose(game, offer);
        }
        let sub = Offer::new(safe.iter().map(|&i| offer.edges[i]).collect());
        safe[self.rng.choose(game, &sub)]
    }
}

/// Replays a fixed pick sequence; used for exhaustive enumeration and replay.
pub struct ScriptedClient {
    picks: Vec<usize>,
    cursor: usize,
    /// Offer length seen at each consumed position.
    pub widths: Vec<usize>,
}

impl ScriptedClient {
    pub fn new(picks: Vec<usize>) -> Self {
        ScriptedClient { picks, cursor: 0, widths: Vec::new() }
    }
}

impl ClientPolicy for ScriptedClient {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn choose(&mut self, _game: &GameState, offer: &Offer) -> usize {
        let pick = self.picks.get(self.cursor).copied().unwrap_or(0);
        self.cursor += 1;
        self.widths.push(offer.len());
        pick.min(offer.len() - 1)
    }
}

fn argbest(offer: &Offer, score: impl Fn(Edge) -> i64) -> usize {
    let mut best = 0;
    let mut best_score = i64::MIN;
    for (i, &e) in offer.edges.iter().enumerate() {
        let s = score(e);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Whether `u` and `v` already lie in one component of Client's graph.
pub fn client_connected(game: &GameState, u: Vertex, v: Vertex) -> bool {
    let mut seen = std::collections::HashSet::from([u]);
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        if x == v {
            return true;
        }
        for &y in game.client_neighbors(x) {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    false
}

/// Whether Client owning `e` would create a triangle.
pub fn closes_triangle(game: &GameState, e: Edge) -> bool {
    let (a, b) = (game.client_neighbors(e.lo()), game.client_neighbors(e.hi()));
    a.iter().any(|x| b.contains(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::BoardSpec;

    #[test]
    fn uniform_random_reproducible() {
        let g = GameState::new(BoardSpec::complete(4, 1)).unwrap();
        let offer = Offer::pair(Edge::new(0, 1), Edge::new(2, 3));
        let a: Vec<usize> = {
            let mut c = UniformRandom::new(7);
            (0..32).map(|_| c.choose(&g, &offer)).collect()
        };
        let b: Vec<usize> = {
            let mut c = UniformRandom::new(7);
            (0..32).map(|_| c.choose(&g, &offer)).collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|&i| i < 2));
    }

    #[test]
    fn anti_structure_prefers_conflict() {
        let mut g = GameState::new(BoardSpec::bipartite(3, 1)).unwrap();
        g.apply_round(&Offer::pair(Edge::new(1, 3), Edge::new(2, 5)), 0).unwrap();
        let offer = Offer::pair(Edge::new(0, 3), Edge::new(0, 4));
        assert_eq!(AntiStructure::new(Target::Matching).choose(&g, &offer), 0);
    }

    #[test]
    fn avoider_dodges_last_matching_edge() {
        let mut g = GameState::new(BoardSpec::complete(4, 1)).unwrap();
        g.apply_round(&Offer::pair(Edge::new(0, 1), Edge::new(0, 2)), 0).unwrap();
        let offer = Offer::pair(Edge::new(2, 3), Edge::new(1, 3));
        for seed in 0..10 {
            assert_eq!(LastEdgeAvoider::new(Target::Matching, seed).choose(&g, &offer), 1);
        }
    }
}
