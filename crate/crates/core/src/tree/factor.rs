//! Tree factors.
//!
//! [`TreeFactorStrategy`] joins the `n/k` copies through a phantom vertex and
//! runs the embedding strategy on `K_{n+1}`; offers at the phantom become fake
//! rounds. [`PathFactorStrategy`] splits the board into small blocks and plays
//! solver-optimal offers inside each block.

use super::{Tree, TreeEmbedConfig, TreeEmbedStrategy};
use crate::certificate::Certificate;
use crate::game::{BoardKind, BoardSpec, GameState, Offer};
use crate::graph::{adjacency, Edge, Vertex};
use crate::solver::{edge_universe, graph_game, HypergraphGame, SolverWaiter, Solver, Tau};
use crate::strategy::{forfeit, CheckLog, Move, ProbeLevel, StrategyError, SubGame, SubMove, WaiterStrategy};
use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

pub struct TreeFactorStrategy {
    k: usize,
    n: usize,
    small: Tree,
    sub: SubGame<TreeEmbedStrategy>,
}

impl TreeFactorStrategy {
    pub fn new(small: Tree, n: usize, probes: ProbeLevel) -> Result<Self, StrategyError> {
        let k = small.n();
        let pre = |m: String| StrategyError::Precondition(m);
        if k < 3 {
            return Err(pre(format!("a {k}-vertex tree has no inner vertex for the phantom")));
        }
        if n % k != 0 {
            return Err(pre(format!("{k} does not divide {n}")));
        }
        let attach = (0..k as Vertex).find(|&x| !small.is_leaf(x)).unwrap();
        let phantom = n as Vertex;
        let mut edges = Vec::with_capacity(n);
        for copy in 0..(n / k) as Vertex {
            let base = copy * k as Vertex;
            edges.extend(small.edges().into_iter().map(|e| e.map(|x| base + x)));
            edges.push(Edge::new(base + attach, phantom));
        }
        let joined = Tree::from_edges(n + 1, &edges).map_err(|e| pre(e.to_string()))?;
        let config = TreeEmbedConfig {
            pin: Some(phantom),
            board_pin: phantom,
            path_shortcut: false,
            probes,
            ..TreeEmbedConfig::default()
        };
        let inner = TreeEmbedStrategy::new(joined, config)?;
        let local = GameState::new(BoardSpec::complete(n + 1, 1))?;
        let map = (0..n as Vertex).map(Some).chain(std::iter::once(None)).collect();
        Ok(TreeFactorStrategy { k, n, small, sub: SubGame::new(local, map, inner) })
    }

    pub fn embedding(&self) -> &TreeEmbedStrategy {
        self.sub.inner()
    }
}

impl WaiterStrategy for TreeFactorStrategy {
    fn name(&self) -> &'static str {
        "tree-factor"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if game.board().kind != BoardKind::Complete || game.vertex_count() != self.n || game.bias() != 1 {
            return Err(StrategyError::Precondition("needs the unbiased complete board it was built for".into()));
        }
        match self.sub.next_offer()? {
            SubMove::Offer(o) => Ok(Move::Offer(o)),
            SubMove::Fake => Ok(Move::Fake),
            SubMove::Done(Certificate::TreeEmbedding { map, .. }) => {
                let components = map[..self.n].chunks(self.k).map(|c| c.to_vec()).collect();
                Ok(Move::Done(Certificate::TreeFactor { tree: self.small.edges(), components }))
            }
            SubMove::Done(_) => Err(forfeit("tree factor", "unexpected certificate")),
        }
    }

    fn on_pick(&mut self, _game: &GameState, _offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        self.sub.on_pick(pick)
    }

    fn checks(&self) -> CheckLog {
        self.sub.inner().checks()
    }
}

/// The `P_k`-factor game on `K_b` as a hypergraph game over its edges.
pub fn path_factor_game(b: usize, k: usize) -> HypergraphGame {
    assert!(k >= 2 && b % k == 0 && b <= 7);
    let mut sets: BTreeSet<Vec<Edge>> = BTreeSet::new();
    let mut perm: Vec<Vertex> = (0..b as Vertex).collect();
    loop {
        let mut set: Vec<Edge> = perm
            .chunks(k)
            .flat_map(|c| c.windows(2).map(|w| Edge::new(w[0], w[1])))
            .collect();
        set.sort_unstable();
        sets.insert(set);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    graph_game(b, 1, sets.into_iter().collect())
}

fn next_permutation(a: &mut [Vertex]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

const BLOCK_BUDGET: usize = 8_000_000;
const MAX_BLOCK: usize = 6;

type BlockEntry = Result<SolvedBlock, String>;
type BlockCache = Mutex<HashMap<(usize, usize), Arc<BlockEntry>>>;

struct SolvedBlock {
    tau: Tau,
    short_offer_used: bool,
    waiter: SolverWaiter,
}

/// Solved block games, shared by every strategy in the process.
fn block_cache() -> &'static BlockCache {
    static CACHE: OnceLock<BlockCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn solve_block(b: usize, k: usize) -> Result<SolvedBlock, String> {
    let game = path_factor_game(b, k);
    let mut solver = Solver::new(&game, BLOCK_BUDGET).map_err(|e| e.to_string())?;
    let result = solver.solve().map_err(|e| e.to_string())?;
    let waiter = SolverWaiter::from_solver(solver, edge_universe(b)).map_err(|e| e.to_string())?;
    Ok(SolvedBlock { tau: result.tau, short_offer_used: result.short_offer_used, waiter })
}

/// The smallest block that forces `mult (k-1)` rounds per `mult k` vertices.
fn solved_block(n: usize, k: usize) -> Result<(usize, SolverWaiter), StrategyError> {
    let pre = |m: String| StrategyError::Precondition(m);
    for mult in 1.. {
        let b = mult * k;
        if b > MAX_BLOCK {
            break;
        }
        if n % b != 0 {
            continue;
        }
        let entry = {
            let mut cache = block_cache().lock().unwrap_or_else(|e| e.into_inner());
            cache.entry((b, k)).or_insert_with(|| Arc::new(solve_block(b, k))).clone()
        };
        let solved = entry.as_ref().as_ref().map_err(|e| pre(e.clone()))?;
        if solved.tau == Tau::Rounds((mult * (k - 1)) as u32) && !solved.short_offer_used {
            return Ok((b, solved.waiter.clone()));
        }
    }
    Err(pre(format!("no block size up to {MAX_BLOCK} forces P_{k} factors without waste")))
}

/// Forces a `P_k`-factor in exactly `(k-1)n/k` rounds by playing an optimal
/// strategy for the `P_k`-factor game on consecutive blocks of `b` vertices,
/// where `b` is the smallest multiple of `k` whose block game is won without
/// wasted rounds or short offers.
pub struct PathFactorStrategy {
    n: usize,
    k: usize,
    block: usize,
    current: usize,
    waiter: SolverWaiter,
    components: Vec<Vec<Vertex>>,
    log: CheckLog,
    probes: ProbeLevel,
}

impl PathFactorStrategy {
    pub fn new(n: usize, k: usize, probes: ProbeLevel) -> Result<Self, StrategyError> {
        let pre = |m: String| StrategyError::Precondition(m);
        if k < 2 || n % k != 0 {
            return Err(pre(format!("cannot split {n} vertices into paths on {k} vertices")));
        }
        let (block, waiter) = solved_block(n, k)?;
        let mut s = PathFactorStrategy {
            n,
            k,
            block,
            current: 0,
            waiter,
            components: Vec::new(),
            log: CheckLog::new(),
            probes,
        };
        s.retarget()?;
        Ok(s)
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    fn retarget(&mut self) -> Result<(), StrategyError> {
        let base = (self.current * self.block) as Vertex;
        let edges = edge_universe(self.block).into_iter().map(|e| e.map(|x| base + x)).collect();
        self.waiter.retarget(edges).map_err(|e| forfeit("path factor", e.to_string()))
    }

    fn split_paths(&self, edges: &[Edge]) -> Vec<Vec<Vertex>> {
        let base = (self.current * self.block) as Vertex;
        let local: Vec<Edge> = edges.iter().map(|e| e.map(|x| x - base)).collect();
        let adj = adjacency(self.block, &local);
        let mut seen = vec![false; self.block];
        let mut out = Vec::new();
        for start in 0..self.block {
            if seen[start] || adj[start].len() != 1 {
                continue;
            }
            let mut path = vec![start as Vertex];
            seen[start] = true;
            let mut cur = start as Vertex;
            while let Some(&next) = adj[cur as usize].iter().find(|&&y| !seen[y as usize]) {
                seen[next as usize] = true;
                path.push(next);
                cur = next;
            }
            out.push(path.into_iter().map(|x| x + base).collect());
        }
        out
    }
}

impl WaiterStrategy for PathFactorStrategy {
    fn name(&self) -> &'static str {
        "path-factor"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if game.board().kind != BoardKind::Complete || game.vertex_count() != self.n || game.bias() != 1 {
            return Err(StrategyError::Precondition("needs the unbiased complete board it was built for".into()));
        }
        loop {
            if self.current * self.block == self.n {
                return Ok(Move::Done(Certificate::TreeFactor {
                    tree: Tree::path(self.k).edges(),
                    components: self.components.clone(),
                }));
            }
            if let Some(edges) = self.waiter.won(game) {
                let paths = self.split_paths(&edges);
                if self.probes.any() {
                    let expected = self.block / self.k;
                    self.log.record("path-factor.block", game.round(), paths.len() == expected, || {
                        format!("block {} split into {} paths", self.current, paths.len())
                    });
                }
                self.components.extend(paths);
                self.current += 1;
                if self.current * self.block < self.n {
                    self.retarget()?;
                }
                continue;
            }
            let offer = self
                .waiter
                .next_offer(game)
                .map_err(|e| forfeit("path factor", e.to_string()))?
                .ok_or_else(|| forfeit("path factor", "block game is lost"))?;
            if offer.len() != 2 {
                return Err(forfeit("path factor", "block strategy asked for a short offer"));
            }
            return Ok(Move::Offer(offer));
        }
    }

    fn on_pick(&mut self, _game: &GameState, _offer: &Offer, _pick: usize) -> Result<(), StrategyError> {
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        self.log.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::UniformRandom;
    use crate::engine::play;

    #[test]
    fn path_factor_counts() {
        assert_eq!(path_factor_game(3, 3).sets.len(), 3);
        assert_eq!(path_factor_game(4, 2).sets.len(), 3);
        assert_eq!(path_factor_game(5, 5).sets.len(), 60);
    }

    #[test]
    fn path_factor_exact_rounds() {
        for k in [3usize, 5] {
            let mut s = PathFactorStrategy::new(30, k, ProbeLevel::PerRound).unwrap();
            for seed in 0..3 {
                let mut game = GameState::new(BoardSpec::complete(30, 1)).unwrap();
                s = PathFactorStrategy { current: 0, components: Vec::new(), ..s };
                s.retarget().unwrap();
                play(&mut game, &mut s, &mut UniformRandom::new(seed), 100).unwrap();
                assert_eq!(game.real_rounds(), (k - 1) * 30 / k);
            }
        }
    }

    #[test]
    fn phantom_factor_rounds() {
        for (small, n) in [(Tree::path(3), 60), (Tree::two_leaf_tipped(6), 60), (Tree::two_leaf_tipped(5), 60)] {
            let k = small.n();
            let mut s = TreeFactorStrategy::new(small, n, ProbeLevel::PerRound).unwrap();
            let mut game = GameState::new(BoardSpec::complete(n, 1)).unwrap();
            play(&mut game, &mut s, &mut UniformRandom::new(1), 4 * n).unwrap();
            assert_eq!(game.real_rounds(), (k - 1) * n / k + 1);
            assert_eq!(game.fake_rounds(), n / k);
            assert!(s.checks().is_clean(), "{:?}", s.checks().summaries());
        }
    }
}
