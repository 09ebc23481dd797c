//! Triangle factors: the seven-move two-triangle script, the batch strategy
//! built on a Client-owned reservoir clique, the delaying Client, and a pool
//! of simpler Waiter policies used to test the delayer.

use crate::certificate::Certificate;
use crate::client::{closes_triangle, ClientPolicy};
use crate::game::{GameState, Offer};
use crate::graph::{Edge, Vertex};
use crate::solver::{clique_game, edge_universe, SolverWaiter};
use crate::strategy::{forfeit, CheckLog, Move, ProbeLevel, StrategyError, WaiterStrategy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Reservoir clique size used by Stage III.
pub const RESERVOIR: usize = 48;
/// Moves used by the two-triangle script.
pub const SCRIPT_MOVES: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTriangles {
    pub triangles: [[Vertex; 3]; 2],
    /// The six chosen vertices left outside both triangles.
    pub untouched: Vec<Vertex>,
}

/// Forces two disjoint Client triangles through `u` and `v` on twelve chosen
/// vertices without offering `uv` or any edge among the six leftovers.
#[derive(Clone, Debug)]
pub struct TwoTriangleScript {
    vertices: Vec<Vertex>,
    u: Vertex,
    v: Vertex,
    fresh: Vec<Vertex>,
    step: usize,
    /// Cherry leaves: `b[0], b[1]` at `u`, `b[2], b[3]` at `v`.
    b: [Vertex; 4],
    open_is_u: bool,
    w: Vertex,
    first: Option<[Vertex; 3]>,
    offered: Vec<Edge>,
    result: Option<TwoTriangles>,
}

impl TwoTriangleScript {
    pub fn new(vertices: &[Vertex], u: Vertex, v: Vertex) -> Result<Self, StrategyError> {
        let set: BTreeSet<Vertex> = vertices.iter().copied().collect();
        if vertices.len() != 12 || set.len() != 12 || u == v || !set.contains(&u) || !set.contains(&v) {
            return Err(StrategyError::Precondition("needs twelve distinct vertices containing both anchors".into()));
        }
        let fresh = vertices.iter().copied().filter(|&x| x != u && x != v).collect();
        Ok(TwoTriangleScript {
            vertices: vertices.to_vec(),
            u,
            v,
            fresh,
            step: 0,
            b: [0; 4],
            open_is_u: false,
            w: 0,
            first: None,
            offered: Vec::new(),
            result: None,
        })
    }

    pub fn anchors(&self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn moves(&self) -> usize {
        self.step
    }

    pub fn offered(&self) -> &[Edge] {
        &self.offered
    }

    pub fn result(&self) -> Option<&TwoTriangles> {
        self.result.as_ref()
    }

    fn open_anchor(&self) -> (Vertex, [Vertex; 2]) {
        if self.open_is_u {
            (self.u, [self.b[0], self.b[1]])
        } else {
            (self.v, [self.b[2], self.b[3]])
        }
    }

    /// The next offer, or `None` once both triangles exist.
    pub fn next_offer(&self, game: &GameState) -> Result<Option<Offer>, StrategyError> {
        if self.result.is_some() {
            return Ok(None);
        }
        let f = &self.fresh;
        let (a, b) = match self.step {
            0 => ((self.u, f[0]), (self.u, f[1])),
            1 => ((self.u, f[2]), (self.u, f[3])),
            2 => ((self.v, f[4]), (self.v, f[5])),
            3 => ((self.v, f[6]), (self.v, f[7])),
            4 => ((self.b[0], self.b[1]), (self.b[2], self.b[3])),
            5 => {
                let (anchor, _) = self.open_anchor();
                ((anchor, f[8]), (anchor, f[9]))
            }
            6 => {
                let (_, leaves) = self.open_anchor();
                ((self.w, leaves[0]), (self.w, leaves[1]))
            }
            _ => unreachable!(),
        };
        let offer = Offer::pair(Edge::new(a.0, a.1), Edge::new(b.0, b.1));
        if let Some(e) = offer.edges.iter().find(|&&e| !game.is_free(e)) {
            return Err(forfeit("two-triangle script", format!("required edge {e:?} is claimed")));
        }
        Ok(Some(offer))
    }

    pub fn on_pick(&mut self, offer: &Offer, pick: usize) {
        let chosen = offer.edges[pick];
        self.offered.extend(offer.edges.iter().copied());
        match self.step {
            0..=3 => {
                let anchor = if self.step < 2 { self.u } else { self.v };
                self.b[self.step] = chosen.other(anchor).unwrap();
            }
            4 => {
                self.open_is_u = pick == 1;
                self.first = Some(if pick == 0 {
                    [self.u, self.b[0], self.b[1]]
                } else {
                    [self.v, self.b[2], self.b[3]]
                });
            }
            5 => {
                let (anchor, _) = self.open_anchor();
                self.w = chosen.other(anchor).unwrap();
            }
            6 => {
                let (anchor, _) = self.open_anchor();
                let leaf = chosen.other(self.w).unwrap();
                let second = [anchor, self.w, leaf];
                let first = self.first.unwrap();
                let used: BTreeSet<Vertex> = first.iter().chain(&second).copied().collect();
                let untouched = self.vertices.iter().copied().filter(|x| !used.contains(x)).collect();
                let triangles = if self.open_is_u { [second, first] } else { [first, second] };
                self.result = Some(TwoTriangles { triangles, untouched });
            }
            _ => unreachable!(),
        }
        self.step += 1;
    }

    /// Both script guarantees on the current position: anchors covered, and
    /// neither `uv` nor any edge among the leftovers has been offered.
    pub fn properties_hold(&self, game: &GameState) -> bool {
        let Some(r) = &self.result else { return false };
        let covered = |x: Vertex| r.triangles.iter().any(|t| t.contains(&x));
        let uv = Edge::new(self.u, self.v);
        let quiet = r.untouched.iter().enumerate().all(|(i, &x)| {
            r.untouched[i + 1..].iter().all(|&y| !self.offered.contains(&Edge::new(x, y)))
        });
        covered(self.u)
            && covered(self.v)
            && quiet
            && !self.offered.contains(&uv)
            && r.triangles.iter().all(|t| game.is_client(t[0], t[1]) && game.is_client(t[1], t[2]) && game.is_client(t[0], t[2]))
    }
}

/// The script as a stand-alone strategy; reports [`Certificate::Triangles`].
pub struct TwoTriangleStrategy {
    script: TwoTriangleScript,
}

impl TwoTriangleStrategy {
    pub fn new(vertices: &[Vertex], u: Vertex, v: Vertex) -> Result<Self, StrategyError> {
        Ok(TwoTriangleStrategy { script: TwoTriangleScript::new(vertices, u, v)? })
    }

    pub fn script(&self) -> &TwoTriangleScript {
        &self.script
    }
}

impl WaiterStrategy for TwoTriangleStrategy {
    fn name(&self) -> &'static str {
        "two-triangles"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        match self.script.next_offer(game)? {
            Some(o) => Ok(Move::Offer(o)),
            None => Ok(Move::Done(Certificate::Triangles {
                triangles: self.script.result().unwrap().triangles.to_vec(),
            })),
        }
    }

    fn on_pick(&mut self, _game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        self.script.on_pick(offer, pick);
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        CheckLog::new()
    }
}

/// How Stage I's clique is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CliqueOracle {
    /// Grants the clique by seeding Client edges; no rounds are played.
    PreSeeded,
    /// Forces the clique with solver-optimal offers; tiny cliques only.
    ExactSolver,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub clique: Vec<Vertex>,
    pub rounds: usize,
}

impl CliqueOracle {
    /// Produces a Client clique of order `size` inside `w`.
    pub fn establish(
        self,
        game: &mut GameState,
        w: &[Vertex],
        size: usize,
        client: &mut dyn ClientPolicy,
    ) -> Result<OracleOutcome, StrategyError> {
        match self {
            CliqueOracle::PreSeeded => {
                if w.len() < size {
                    return Err(StrategyError::Precondition("reserved set is smaller than the clique".into()));
                }
                let clique: Vec<Vertex> = w[..size].to_vec();
                let mut edges = Vec::new();
                for (i, &a) in clique.iter().enumerate() {
                    for &b in &clique[i + 1..] {
                        edges.push(Edge::new(a, b));
                    }
                }
                game.seed_client_edges(&edges)?;
                Ok(OracleOutcome { clique, rounds: 0 })
            }
            CliqueOracle::ExactSolver => {
                let m = w.len();
                if m > 7 || size > m {
                    return Err(StrategyError::Precondition(format!("exact clique forcing needs |W| <= 7, got {m}")));
                }
                let local = clique_game(m, size, 1);
                let edges: Vec<Edge> = edge_universe(m).into_iter().map(|e| e.map(|x| w[x as usize])).collect();
                let mut waiter = SolverWaiter::new(&local, edges, 20_000_000)
                    .map_err(|e| StrategyError::Precondition(e.to_string()))?;
                let start = game.real_rounds();
                loop {
                    if let Some(set) = waiter.won(game) {
                        let clique: BTreeSet<Vertex> = set.iter().flat_map(|e| [e.lo(), e.hi()]).collect();
                        return Ok(OracleOutcome { clique: clique.into_iter().collect(), rounds: game.real_rounds() - start });
                    }
                    let offer = waiter
                        .next_offer(game)
                        .map_err(|e| forfeit("clique oracle", e.to_string()))?
                        .ok_or_else(|| forfeit("clique oracle", format!("K_{size} cannot be forced on {m} vertices")))?;
                    game.validate_offer(&offer)?;
                    let pick = client.choose(game, &offer);
                    game.apply_round(&offer, pick)?;
                }
            }
        }
    }
}

/// Vertex order used to pick each batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule", content = "seed")]
pub enum BatchRule {
    Lowest,
    Highest,
    Random(u64),
}

enum Phase {
    Start,
    Batch(Box<TwoTriangleScript>),
    StageThree { plan: Vec<(Vertex, [Vertex; 4])>, idx: usize, half: usize, got: Vec<Vertex> },
    Finished,
}

/// Batch strategy on top of a Client-owned reservoir clique `K`.
pub struct TriangleFactorStrategy {
    n: usize,
    k: Vec<Vertex>,
    s: BTreeSet<Vertex>,
    t: BTreeSet<Vertex>,
    rule: BatchRule,
    rng: ChaCha8Rng,
    probes: ProbeLevel,
    log: CheckLog,
    phase: Phase,
    triangles: Vec<[Vertex; 3]>,
    batches: usize,
    stage_three_rounds: usize,
}

impl TriangleFactorStrategy {
    /// `w` is the reserved set and `k` the clique found inside it.
    pub fn new(n: usize, w: &[Vertex], k: &[Vertex], rule: BatchRule, probes: ProbeLevel) -> Result<Self, StrategyError> {
        let pre = |m: String| StrategyError::Precondition(m);
        if n % 3 != 0 {
            return Err(pre(format!("n = {n} is not divisible by 3")));
        }
        if k.len() < RESERVOIR {
            return Err(pre(format!("|K| = {} is below {RESERVOIR}", k.len())));
        }
        let wset: BTreeSet<Vertex> = w.iter().copied().collect();
        if k.iter().any(|x| !wset.contains(x)) || w.iter().any(|&x| x as usize >= n) {
            return Err(pre("K must lie inside W and W inside the board".into()));
        }
        let kset: BTreeSet<Vertex> = k.iter().copied().collect();
        let s = wset.difference(&kset).copied().collect();
        let t = (0..n as Vertex).filter(|x| !wset.contains(x)).collect();
        let seed = if let BatchRule::Random(seed) = rule { seed } else { 0 };
        Ok(TriangleFactorStrategy {
            n,
            k: k.to_vec(),
            s,
            t,
            rule,
            rng: ChaCha8Rng::seed_from_u64(seed),
            probes,
            log: CheckLog::new(),
            phase: Phase::Start,
            triangles: Vec::new(),
            batches: 0,
            stage_three_rounds: 0,
        })
    }

    /// Reservoir on the lowest [`RESERVOIR`] vertices with `W = K`.
    pub fn with_seeded_reservoir(game: &mut GameState, rule: BatchRule, probes: ProbeLevel) -> Result<Self, StrategyError> {
        let w: Vec<Vertex> = (0..RESERVOIR as Vertex).collect();
        let out = CliqueOracle::PreSeeded.establish(game, &w, RESERVOIR, &mut NoClient)?;
        Self::new(game.vertex_count(), &w, &out.clique, rule, probes)
    }

    pub fn batches(&self) -> usize {
        self.batches
    }

    pub fn stage_three_rounds(&self) -> usize {
        self.stage_three_rounds
    }

    /// Upper bound on rounds after the reservoir exists.
    pub fn round_bound(n: usize) -> f64 {
        7.0 * (n - RESERVOIR) as f64 / 6.0 + 30.0
    }

    fn order(&mut self, set: &BTreeSet<Vertex>) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = set.iter().copied().collect();
        match self.rule {
            BatchRule::Lowest => {}
            BatchRule::Highest => v.reverse(),
            BatchRule::Random(_) => v.shuffle(&mut self.rng),
        }
        v
    }

    fn next_phase(&mut self, game: &GameState) -> Result<(), StrategyError> {
        if self.t.len() >= 12 {
            let from_s: Vec<Vertex> = {
                let s = self.s.clone();
                self.order(&s).into_iter().take(2).collect()
            };
            let t = self.t.clone();
            let from_t: Vec<Vertex> = self.order(&t).into_iter().take(12 - from_s.len()).collect();
            let mut chosen = from_s.clone();
            chosen.extend(&from_t);
            let (u, v) = (chosen[0], chosen[1]);
            if self.probes.any() {
                let clean = self.batch_edges_free(game);
                self.log.record("tri.batch-clean", game.round(), clean, || "an edge of E(T, S+T) is claimed".into());
            }
            self.phase = Phase::Batch(Box::new(TwoTriangleScript::new(&chosen, u, v)?));
            return Ok(());
        }
        if !self.s.is_empty() {
            return Err(forfeit("triangle stage III", format!("{} vertices of S remain", self.s.len())));
        }
        let mut plan = Vec::new();
        let mut pool = self.k.iter().copied();
        for &v in &self.t {
            let kv = [pool.next(), pool.next(), pool.next(), pool.next()];
            match kv {
                [Some(a), Some(b), Some(c), Some(d)] => plan.push((v, [a, b, c, d])),
                _ => return Err(forfeit("triangle stage III", "reservoir too small for the leftovers")),
            }
        }
        self.phase = Phase::StageThree { plan, idx: 0, half: 0, got: Vec::new() };
        Ok(())
    }

    fn batch_edges_free(&self, game: &GameState) -> bool {
        let all: Vec<Vertex> = self.s.iter().chain(&self.t).copied().collect();
        self.t.iter().all(|&x| all.iter().all(|&y| x == y || game.is_free_pair(x, y)))
    }

    fn reservoir_intact(&self, game: &GameState) -> bool {
        self.k
            .iter()
            .enumerate()
            .all(|(i, &a)| self.k[i + 1..].iter().all(|&b| game.is_client(a, b)))
    }

    fn finish(&mut self, used: &BTreeSet<Vertex>) {
        let rest: Vec<Vertex> = self.k.iter().copied().filter(|x| !used.contains(x)).collect();
        for c in rest.chunks(3) {
            self.triangles.push([c[0], c[1], c[2]]);
        }
        self.phase = Phase::Finished;
    }
}

struct NoClient;

impl ClientPolicy for NoClient {
    fn name(&self) -> String {
        "none".into()
    }
    fn choose(&mut self, _game: &GameState, _offer: &Offer) -> usize {
        0
    }
}

impl WaiterStrategy for TriangleFactorStrategy {
    fn name(&self) -> &'static str {
        "triangle-factor"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if game.bias() != 1 || game.vertex_count() != self.n {
            return Err(StrategyError::Precondition("needs the unbiased board it was built for".into()));
        }
        loop {
            match &mut self.phase {
                Phase::Start => {
                    if !self.reservoir_intact(game) {
                        return Err(forfeit("triangle stage II", "reservoir contamination"));
                    }
                    self.next_phase(game)?;
                }
                Phase::Batch(script) => match script.next_offer(game)? {
                    Some(o) => return Ok(Move::Offer(o)),
                    None => {
                        let ok = script.properties_hold(game) && script.moves() <= SCRIPT_MOVES;
                        let r = script.result().unwrap().clone();
                        if self.probes.any() {
                            self.log.record("tri.script", game.round(), ok, || "two-triangle properties fail".into());
                        }
                        for tri in r.triangles {
                            for x in tri {
                                self.s.remove(&x);
                                self.t.remove(&x);
                            }
                            self.triangles.push(tri);
                        }
                        self.batches += 1;
                        self.next_phase(game)?;
                    }
                },
                Phase::StageThree { plan, idx, half, got } => {
                    if *idx == plan.len() {
                        let used: BTreeSet<Vertex> = got.iter().copied().collect();
                        self.finish(&used);
                        continue;
                    }
                    let (v, kv) = plan[*idx];
                    let (a, b) = (kv[2 * *half], kv[2 * *half + 1]);
                    let offer = Offer::pair(Edge::new(v, a), Edge::new(v, b));
                    if offer.edges.iter().any(|&e| !game.is_free(e)) {
                        return Err(forfeit("triangle stage III", format!("edge from {v} into K is claimed")));
                    }
                    return Ok(Move::Offer(offer));
                }
                Phase::Finished => {
                    let mut triangles = self.triangles.clone();
                    for t in &mut triangles {
                        t.sort_unstable();
                    }
                    triangles.sort_unstable();
                    return Ok(Move::Done(Certificate::TriangleFactor { triangles }));
                }
            }
        }
    }

    fn on_pick(&mut self, _game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        match &mut self.phase {
            Phase::Batch(script) => script.on_pick(offer, pick),
            Phase::StageThree { plan, idx, half, got } => {
                let (v, _) = plan[*idx];
                got.push(offer.edges[pick].other(v).unwrap());
                self.stage_three_rounds += 1;
                if *half == 1 {
                    let n = got.len();
                    self.triangles.push([v, got[n - 2], got[n - 1]]);
                    *half = 0;
                    *idx += 1;
                } else {
                    *half = 1;
                }
            }
            _ => return Err(StrategyError::Finished),
        }
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        self.log.clone()
    }
}

/// Client that delays triangle factors by marking vertices whose closing
/// edges it refuses.
#[derive(Clone, Debug, Default)]
pub struct Delayer {
    marked: BTreeSet<Vertex>,
    rejected: Vec<(Vertex, Edge)>,
}

impl Delayer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn marked(&self) -> &BTreeSet<Vertex> {
        &self.marked
    }

    /// For every marked vertex, the closing edge refused when it was marked.
    pub fn rejected(&self) -> &[(Vertex, Edge)] {
        &self.rejected
    }

    /// A vertex `z` with `xz, zy` Client edges, preferring unmarked ones.
    fn witness(&self, game: &GameState, e: Edge) -> Option<Vertex> {
        let a = game.client_neighbors(e.lo());
        let b = game.client_neighbors(e.hi());
        let mut common: Vec<Vertex> = a.iter().copied().filter(|z| b.contains(z)).collect();
        common.sort_unstable();
        common.iter().copied().find(|z| !self.marked.contains(z)).or_else(|| common.first().copied())
    }
}

impl ClientPolicy for Delayer {
    fn name(&self) -> String {
        "delayer".into()
    }

    fn choose(&mut self, game: &GameState, offer: &Offer) -> usize {
        if let Some(i) = offer.edges.iter().position(|&e| !closes_triangle(game, e)) {
            return i;
        }
        if offer.len() != 2 {
            return 0;
        }
        let z1 = self.witness(game, offer.edges[0]).unwrap();
        let z2 = self.witness(game, offer.edges[1]).unwrap();
        if !self.marked.contains(&z1) {
            self.marked.insert(z1);
            self.rejected.push((z1, offer.edges[0]));
            1
        } else if !self.marked.contains(&z2) {
            self.marked.insert(z2);
            self.rejected.push((z2, offer.edges[1]));
            0
        } else {
            0
        }
    }
}

/// Recount of the lower-bound argument on a finished game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundVerdict {
    pub n: usize,
    pub client_edges: usize,
    pub marked: usize,
    /// Factor triangles with no marked vertex that Client completed in play.
    pub unmarked_triangles: usize,
    /// Factor triangles made only of seeded edges; no move completed them.
    pub seeded_triangles: usize,
    /// Every marked vertex has Client degree at least 3.
    pub high_degree: bool,
    /// `|M| >= |U|`.
    pub marks_cover: bool,
    /// Which counting branch applies: `6|U| >= n`.
    pub many_unmarked: bool,
    /// Degree-sum lower bound of the applicable branch.
    pub branch_bound: usize,
    /// `12 |E(C)| >= 13 n`.
    pub holds: bool,
}

pub fn count_lower_bound(game: &GameState, triangles: &[[Vertex; 3]], marked: &BTreeSet<Vertex>) -> LowerBoundVerdict {
    let n = game.vertex_count();
    let client_edges = game.client_count();
    let seeds: BTreeSet<Edge> = game.seeded().iter().copied().collect();
    let seeded = |t: &[Vertex; 3]| {
        seeds.contains(&Edge::new(t[0], t[1])) && seeds.contains(&Edge::new(t[1], t[2])) && seeds.contains(&Edge::new(t[0], t[2]))
    };
    let seeded_triangles = triangles.iter().filter(|t| seeded(t)).count();
    let unmarked = triangles
        .iter()
        .filter(|t| !seeded(t) && t.iter().all(|x| !marked.contains(x)))
        .count();
    let high_degree = marked.iter().all(|&m| game.d_c(m) >= 3);
    let many_unmarked = 6 * unmarked >= n;
    let branch_bound = if many_unmarked {
        3 * marked.len() + 2 * (n - marked.len())
    } else {
        6 * unmarked + 7 * (n / 3 - unmarked)
    };
    LowerBoundVerdict {
        n,
        client_edges,
        marked: marked.len(),
        unmarked_triangles: unmarked,
        seeded_triangles,
        high_degree,
        marks_cover: marked.len() >= unmarked,
        many_unmarked,
        branch_bound,
        holds: 12 * client_edges >= 13 * n,
    }
}

type TriangleLookup<'a> = dyn Fn(Vertex, &[bool]) -> Vec<[Vertex; 3]> + 'a;

/// A triangle factor of Client's graph, if one exists (backtracking).
pub fn find_triangle_factor(game: &GameState) -> Option<Vec<[Vertex; 3]>> {
    let n = game.vertex_count();
    if n % 3 != 0 {
        return None;
    }
    let tri_at = |x: Vertex, free: &[bool]| -> Vec<[Vertex; 3]> {
        let nb: Vec<Vertex> = game.client_neighbors(x).iter().copied().filter(|&y| free[y as usize]).collect();
        let mut out = Vec::new();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if game.is_client(a, b) {
                    out.push([x, a, b]);
                }
            }
        }
        out
    };
    let all = vec![true; n];
    if (0..n as Vertex).any(|x| tri_at(x, &all).is_empty()) {
        return None;
    }
    fn go(free: &mut Vec<bool>, acc: &mut Vec<[Vertex; 3]>, tri_at: &TriangleLookup, budget: &mut usize) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let mut best: Option<(Vec<[Vertex; 3]>, usize)> = None;
        for x in (0..free.len() as Vertex).filter(|&x| free[x as usize]) {
            let opts = tri_at(x, free);
            if opts.is_empty() {
                return false;
            }
            if best.as_ref().map_or(true, |(b, _)| opts.len() < b.len()) {
                best = Some((opts, x as usize));
            }
        }
        let Some((opts, _)) = best else { return true };
        for t in opts {
            for &v in &t {
                free[v as usize] = false;
            }
            acc.push(t);
            if go(free, acc, tri_at, budget) {
                return true;
            }
            acc.pop();
            for &v in &t {
                free[v as usize] = true;
            }
        }
        false
    }
    let mut free = vec![true; n];
    let mut acc = Vec::new();
    let mut budget = 200_000;
    go(&mut free, &mut acc, &tri_at, &mut budget).then_some(acc)
}

fn random_free_offer(game: &GameState, rng: &mut ChaCha8Rng) -> Offer {
    let mut free: Vec<Edge> = game.free_edges().collect();
    let want = game.required_offer_len();
    free.shuffle(rng);
    free.truncate(want);
    Offer::new(free)
}

fn detect_or_exhausted(game: &GameState) -> Option<Result<Move, StrategyError>> {
    if let Some(triangles) = find_triangle_factor(game) {
        return Some(Ok(Move::Done(Certificate::TriangleFactor { triangles })));
    }
    if game.free_count() == 0 {
        return Some(Err(forfeit("triangle pool", "board exhausted without a factor")));
    }
    None
}

/// Offers uniformly random free pairs and stops once Client owns a factor.
pub struct RandomOffers {
    rng: ChaCha8Rng,
}

impl RandomOffers {
    pub fn new(seed: u64) -> Self {
        RandomOffers { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl WaiterStrategy for RandomOffers {
    fn name(&self) -> &'static str {
        "random-offers"
    }
    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if let Some(done) = detect_or_exhausted(game) {
            return done;
        }
        Ok(Move::Offer(random_free_offer(game, &mut self.rng)))
    }
    fn on_pick(&mut self, _: &GameState, _: &Offer, _: usize) -> Result<(), StrategyError> {
        Ok(())
    }
    fn checks(&self) -> CheckLog {
        CheckLog::new()
    }
}

/// Offers triangle-closing edges when it can, otherwise grows cherries at
/// the vertex of largest Client degree.
pub struct GreedyCloser {
    rng: ChaCha8Rng,
}

impl GreedyCloser {
    pub fn new(seed: u64) -> Self {
        GreedyCloser { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl WaiterStrategy for GreedyCloser {
    fn name(&self) -> &'static str {
        "greedy-closer"
    }
    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if let Some(done) = detect_or_exhausted(game) {
            return done;
        }
        let want = game.required_offer_len();
        let mut closing: Vec<Edge> = game.free_edges().filter(|&e| closes_triangle(game, e)).collect();
        closing.shuffle(&mut self.rng);
        if closing.len() >= want {
            closing.truncate(want);
            return Ok(Move::Offer(Offer::new(closing)));
        }
        let n = game.vertex_count() as Vertex;
        let hub = (0..n)
            .filter(|&x| (0..n).filter(|&y| y != x && game.is_free_pair(x, y)).count() >= want)
            .max_by_key(|&x| (game.d_c(x), self.rng.gen::<u16>()));
        if let Some(x) = hub {
            let mut out: Vec<Edge> = (0..n).filter(|&y| y != x && game.is_free_pair(x, y)).map(|y| Edge::new(x, y)).collect();
            out.shuffle(&mut self.rng);
            out.truncate(want);
            return Ok(Move::Offer(Offer::new(out)));
        }
        Ok(Move::Offer(random_free_offer(game, &mut self.rng)))
    }
    fn on_pick(&mut self, _: &GameState, _: &Offer, _: usize) -> Result<(), StrategyError> {
        Ok(())
    }
    fn checks(&self) -> CheckLog {
        CheckLog::new()
    }
}

/// Two-triangle batches on an empty board while twelve fresh vertices
/// remain, then random offers until Client owns a factor.
pub struct BatchThenRandom {
    fresh: BTreeSet<Vertex>,
    script: Option<TwoTriangleScript>,
    rng: ChaCha8Rng,
}

impl BatchThenRandom {
    pub fn new(n: usize, seed: u64) -> Self {
        BatchThenRandom { fresh: (0..n as Vertex).collect(), script: None, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl WaiterStrategy for BatchThenRandom {
    fn name(&self) -> &'static str {
        "batch-then-random"
    }
    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if let Some(done) = detect_or_exhausted(game) {
            return done;
        }
        loop {
            if let Some(script) = &self.script {
                if let Some(o) = script.next_offer(game)? {
                    return Ok(Move::Offer(o));
                }
                for t in script.result().unwrap().triangles {
                    for x in t {
                        self.fresh.remove(&x);
                    }
                }
                self.script = None;
            }
            if self.fresh.len() < 12 {
                return Ok(Move::Offer(random_free_offer(game, &mut self.rng)));
            }
            let chosen: Vec<Vertex> = self.fresh.iter().copied().take(12).collect();
            self.script = Some(TwoTriangleScript::new(&chosen, chosen[0], chosen[1])?);
        }
    }
    fn on_pick(&mut self, _: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        if let Some(script) = &mut self.script {
            script.on_pick(offer, pick);
        }
        Ok(())
    }
    fn checks(&self) -> CheckLog {
        CheckLog::new()
    }
}
