//! The unbiased Hamiltonicity strategy: four paths grown by alternating
//! Type A and Type B moves, two connecting rounds, and a rotation endgame
//! that closes a Hamilton cycle in round `n + 1`.

use crate::certificate::Certificate;
use crate::game::{BoardKind, GameState, Offer};
use crate::graph::{Edge, Vertex};
use crate::strategy::{forfeit, CheckLog, Move, ProbeLevel, StrategyError, WaiterStrategy};
use std::collections::BTreeSet;

/// Smallest board the strategy is guaranteed on.
pub const MIN_N: usize = 20;
/// Smallest board the strategy will attempt at all.
pub const MIN_N_RELAXED: usize = 8;

const NO_PATH: u8 = u8::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    One,
    Two,
    Join,
    Rotate,
    Close,
    Finished,
}

#[derive(Clone, Copy, Debug)]
enum Pending {
    TypeA { x: Vertex, paths: [usize; 2] },
    TypeB { path: usize },
    Connect { v: Vertex },
    Join,
    Rotate { i: usize, j: usize },
    Close { i: usize },
}

/// Completion properties of a Hamilton run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HamProperties {
    /// Every Waiter degree is below 10.
    pub low_waiter_degree: bool,
    /// Client's first edge lies on the cycle.
    pub first_edge_on_cycle: bool,
    /// Some recorded Stage I path of length at least `n/5` lies on the cycle
    /// and spans no Waiter edge.
    pub clean_long_path: bool,
}

impl HamProperties {
    pub fn all(self) -> bool {
        self.low_waiter_degree && self.first_edge_on_cycle && self.clean_long_path
    }
}

/// Evaluates the three completion properties against recorded Stage I paths.
pub fn ham_properties(
    game: &GameState,
    cycle: &[Vertex],
    first_edge: Option<Edge>,
    stage_one_paths: &[Vec<Vertex>],
) -> HamProperties {
    let n = game.vertex_count();
    let cycle_edges: BTreeSet<Edge> =
        (0..cycle.len()).map(|i| Edge::new(cycle[i], cycle[(i + 1) % cycle.len()])).collect();
    let low_waiter_degree = (0..n as Vertex).all(|v| game.d_w(v) < 10);
    let first_edge_on_cycle = first_edge.is_some_and(|e| cycle_edges.contains(&e));
    let clean_long_path = stage_one_paths.iter().any(|p| {
        let len = p.len().saturating_sub(1);
        5 * len >= n
            && p.windows(2).all(|w| cycle_edges.contains(&Edge::new(w[0], w[1])))
            && no_waiter_edge_inside(game, p)
    });
    HamProperties { low_waiter_degree, first_edge_on_cycle, clean_long_path }
}

fn no_waiter_edge_inside(game: &GameState, vertices: &[Vertex]) -> bool {
    let set: BTreeSet<Vertex> = vertices.iter().copied().collect();
    vertices.iter().all(|&v| game.waiter_neighbors(v).iter().all(|u| !set.contains(u)))
}

/// The unbiased Hamiltonicity strategy on `K_n`.
pub struct HamStrategy {
    n: usize,
    probes: ProbeLevel,
    log: CheckLog,
    stage: Stage,
    roots: [Vertex; 4],
    paths: [Vec<Vertex>; 4],
    path_of: Vec<u8>,
    r: BTreeSet<Vertex>,
    stage_one_round: usize,
    last_extended: usize,
    pretend: Option<(Vertex, Vertex)>,
    pending: Option<Pending>,
    stage_one_paths: Vec<Vec<Vertex>>,
    merged: Vec<Vec<Vertex>>,
    ham_path: Vec<Vertex>,
    cycle: Vec<Vertex>,
    first_client: Option<Edge>,
    properties: Option<HamProperties>,
}

impl HamStrategy {
    pub fn new(n: usize, probes: ProbeLevel) -> Result<Self, StrategyError> {
        if n < MIN_N {
            return Err(StrategyError::Precondition(format!("n = {n} is below {MIN_N}")));
        }
        Ok(Self::build(n, probes, None))
    }

    /// Accepts boards down to [`MIN_N_RELAXED`]; used to probe the boundary.
    pub fn new_relaxed(n: usize, probes: ProbeLevel) -> Result<Self, StrategyError> {
        if n < MIN_N_RELAXED {
            return Err(StrategyError::Precondition(format!("n = {n} is below {MIN_N_RELAXED}")));
        }
        Ok(Self::build(n, probes, None))
    }

    /// Opens with a pretended round in which Client takes `root x` and Waiter
    /// takes `x` to the second root; `root` becomes the first path root.
    pub fn with_pretended_first_edge(
        n: usize,
        probes: ProbeLevel,
        root: Vertex,
        x: Vertex,
    ) -> Result<Self, StrategyError> {
        if n < MIN_N_RELAXED {
            return Err(StrategyError::Precondition(format!("n = {n} is below {MIN_N_RELAXED}")));
        }
        Ok(Self::build(n, probes, Some((root, x))))
    }

    fn build(n: usize, probes: ProbeLevel, pretend: Option<(Vertex, Vertex)>) -> Self {
        let mut roots = [0, 1, 2, 3];
        if let Some((root, x)) = pretend {
            let others: Vec<Vertex> = (0..n as Vertex).filter(|&v| v != root && v != x).take(3).collect();
            roots = [root, others[0], others[1], others[2]];
        }
        let mut path_of = vec![NO_PATH; n];
        for (i, &a) in roots.iter().enumerate() {
            path_of[a as usize] = i as u8;
        }
        let r = (0..n as Vertex).filter(|v| !roots.contains(v)).collect();
        HamStrategy {
            n,
            probes,
            log: CheckLog::new(),
            stage: Stage::One,
            roots,
            paths: roots.map(|a| vec![a]),
            path_of,
            r,
            stage_one_round: 0,
            last_extended: 0,
            pretend,
            pending: None,
            stage_one_paths: Vec::new(),
            merged: Vec::new(),
            ham_path: Vec::new(),
            cycle: Vec::new(),
            first_client: None,
            properties: None,
        }
    }

    /// The four Stage I paths as they stood when Stage I ended.
    pub fn stage_one_paths(&self) -> &[Vec<Vertex>] {
        &self.stage_one_paths
    }

    /// The Hamilton path formed by the first endgame round, once available.
    pub fn hamilton_path(&self) -> Option<&[Vertex]> {
        (!self.ham_path.is_empty()).then_some(self.ham_path.as_slice())
    }

    /// The Hamilton cycle, once closed.
    pub fn cycle(&self) -> Option<&[Vertex]> {
        (!self.cycle.is_empty()).then_some(self.cycle.as_slice())
    }

    pub fn first_client_edge(&self) -> Option<Edge> {
        self.first_client
    }

    pub fn properties(&self) -> Option<HamProperties> {
        self.properties
    }

    pub fn is_finished(&self) -> bool {
        self.stage == Stage::Finished
    }

    fn end(&self, p: usize) -> Vertex {
        *self.paths[p].last().unwrap()
    }

    fn a2(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = (0..4).map(|p| self.end(p)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn on_paths_degree(&self, game: &GameState, x: Vertex) -> usize {
        game.waiter_neighbors(x).iter().filter(|&&u| self.path_of[u as usize] != NO_PATH).count()
    }

    fn waiter_edges_within(game: &GameState, set: &[Vertex]) -> Vec<Edge> {
        let mut out = Vec::new();
        for &a in set {
            for &b in game.waiter_neighbors(a) {
                if a < b && set.contains(&b) {
                    out.push(Edge::new(a, b));
                }
            }
        }
        out
    }

    fn probe_stage_one_round(&mut self, game: &GameState) {
        let i = self.stage_one_round;
        let a2 = self.a2();
        let inside = Self::waiter_edges_within(game, &a2);
        let bad: Vec<Vertex> =
            self.r.iter().copied().filter(|&x| self.on_paths_degree(game, x) > 0).collect();
        let mut v = Vec::new();
        if i == self.n - 4 {
            if inside.len() > 2 {
                v.push(format!("round {i}: e_W(A_2) = {} > 2", inside.len()));
            }
        } else if i % 2 == 1 {
            let (p, q) = ((i - 1) % 4, i % 4);
            if inside.len() != 1 {
                v.push(format!("round {i}: e_W(A_2) = {} instead of 1", inside.len()));
            } else {
                let e = inside[0];
                let want = Edge::new(self.end(p), self.end(q));
                if e != want {
                    v.push(format!("round {i}: A_2 edge {e:?} does not join the ends of paths {p} and {q}"));
                }
            }
            if !bad.is_empty() {
                v.push(format!("round {i}: {} bad vertices after an odd round", bad.len()));
            }
        } else {
            if !inside.is_empty() {
                v.push(format!("round {i}: e_W(A_2) = {} after an even round", inside.len()));
            }
            if bad.len() != 1 {
                v.push(format!("round {i}: {} bad vertices instead of 1", bad.len()));
            } else {
                let z = bad[0];
                let pair = [(i + 2) % 4, (i + 3) % 4];
                let on_pair = game
                    .waiter_neighbors(z)
                    .iter()
                    .filter(|&&u| pair.contains(&(self.path_of[u as usize] as usize)))
                    .count();
                if self.on_paths_degree(game, z) != 1 || on_pair != 1 {
                    v.push(format!("round {i}: bad vertex {z} is not attached once to paths {pair:?}"));
                }
            }
        }
        self.log.record_all("ham.obs-rounds", game.round(), v);
    }

    fn probe_stage_one_end(&mut self, game: &GameState) {
        let mut v = Vec::new();
        let a1 = self.roots;
        let a2 = self.a2();
        for &a in &a1 {
            for &b in game.waiter_neighbors(a) {
                if a1.contains(&b) || a2.contains(&b) {
                    v.push(format!("Waiter edge {a}-{b} touches A_1 inside A_1 ∪ A_2"));
                }
            }
        }
        let inside = Self::waiter_edges_within(game, &a2).len();
        if inside > 2 {
            v.push(format!("e_W(A_2) = {inside} > 2"));
        }
        for x in 0..self.n as Vertex {
            if game.d_w(x) > 4 {
                v.push(format!("d_W({x}) = {} > 4", game.d_w(x)));
            }
        }
        for (i, p) in self.paths.iter().enumerate() {
            if !no_waiter_edge_inside(game, p) {
                v.push(format!("path {i} spans a Waiter edge"));
            }
        }
        self.log.record_all("ham.obs-stage-end", game.round(), v);
    }

    fn probe_join_entry(&mut self, game: &GameState) {
        let (q1, q2) = (&self.merged[0], &self.merged[1]);
        let ends = [q1[0], *q1.last().unwrap(), q2[0], *q2.last().unwrap()];
        let mut v = Vec::new();
        for &a in &ends[..2] {
            for &b in &ends[2..] {
                if !game.is_free_pair(a, b) {
                    v.push(format!("endpoint edge {a}-{b} is claimed"));
                }
            }
        }
        for x in 0..self.n as Vertex {
            if game.d_w(x) > 6 {
                v.push(format!("d_W({x}) = {} > 6", game.d_w(x)));
            }
        }
        self.log.record_all("ham.endgame-entry", game.round(), v);
    }

    fn type_a(&mut self, game: &GameState, round: usize) -> Result<Move, StrategyError> {
        let paths = [(round - 1) % 4, round % 4];
        let x = match self.pretend {
            Some((_, x)) if round == 1 => x,
            _ => {
                let mut best: Option<(Vertex, usize)> = None;
                for &x in &self.r {
                    let d = self.on_paths_degree(game, x);
                    if best.map_or(true, |(_, bd)| d > bd) {
                        best = Some((x, d));
                    }
                }
                best.ok_or_else(|| forfeit("hamilton stage I", "R is empty"))?.0
            }
        };
        let offer = Offer::pair(Edge::new(x, self.end(paths[0])), Edge::new(x, self.end(paths[1])));
        self.pending = Some(Pending::TypeA { x, paths });
        if self.pretend.is_some() && round == 1 {
            return Ok(Move::Pretend(offer, 0));
        }
        self.checked(game, offer, "hamilton stage I")
    }

    fn type_b(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        let path = self.last_extended ^ 1;
        let mut it = self.r.iter().copied();
        let (x, y) = (it.next().unwrap(), it.next().unwrap());
        let end = self.end(path);
        self.pending = Some(Pending::TypeB { path });
        self.checked(game, Offer::pair(Edge::new(x, end), Edge::new(y, end)), "hamilton stage I")
    }

    fn checked(&self, game: &GameState, offer: Offer, stage: &'static str) -> Result<Move, StrategyError> {
        if let Some(e) = offer.edges.iter().find(|&&e| !game.is_free(e)) {
            return Err(forfeit(stage, format!("required edge {e:?} is claimed")));
        }
        Ok(Move::Offer(offer))
    }

    fn extend(&mut self, path: usize, x: Vertex) {
        self.paths[path].push(x);
        self.path_of[x as usize] = path as u8;
        self.r.remove(&x);
        self.last_extended = path;
    }

    fn connect(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        let a2: Vec<Vertex> = self.merged.iter().map(|p| *p.last().unwrap()).collect();
        let mut best: Option<(Vertex, usize)> = None;
        let mut ordered = a2.clone();
        ordered.sort_unstable();
        for &v in &ordered {
            let d = game.waiter_neighbors(v).iter().filter(|u| a2.contains(u)).count();
            if best.map_or(true, |(_, bd)| d > bd) {
                best = Some((v, d));
            }
        }
        let v = best.unwrap().0;
        let mut starts: Vec<Vertex> =
            self.merged.iter().filter(|p| *p.last().unwrap() != v).map(|p| p[0]).collect();
        starts.sort_unstable();
        self.pending = Some(Pending::Connect { v });
        self.checked(game, Offer::pair(Edge::new(v, starts[0]), Edge::new(v, starts[1])), "hamilton stage II")
    }

    fn choose_rotation(&self, game: &GameState) -> Option<(usize, usize)> {
        let p = &self.ham_path;
        let n = p.len();
        let first = p[0];
        let last = p[n - 1];
        let e1 = self.first_client;
        let ok = |i: usize| {
            Some(Edge::new(p[i], p[i + 1])) != e1
                && game.is_free_pair(first, p[i + 1])
                && game.is_free_pair(p[i], last)
        };
        let excluded = [self.path_of[first as usize], self.path_of[last as usize]];
        let interior = |i: usize| {
            let (a, b) = (self.path_of[p[i] as usize], self.path_of[p[i + 1] as usize]);
            a != NO_PATH && a == b && !excluded.contains(&a)
        };
        let candidates: Vec<usize> = (1..n - 1).filter(|&i| ok(i)).collect();
        for strict in [true, false] {
            for (ai, &i) in candidates.iter().enumerate() {
                if strict && !interior(i) {
                    continue;
                }
                for &j in &candidates[ai + 1..] {
                    if j >= i + 2 && (!strict || interior(j)) {
                        return Some((i, j));
                    }
                }
            }
        }
        None
    }

    fn finish(&mut self, game: &GameState) {
        let props = ham_properties(game, &self.cycle, self.first_client, &self.stage_one_paths);
        self.properties = Some(props);
        if self.probes.any() {
            self.log.record("ham.p1-waiter-degree", game.round(), props.low_waiter_degree, || {
                "some Waiter degree reached 10".into()
            });
            self.log.record("ham.p2-first-edge", game.round(), props.first_edge_on_cycle, || {
                "first Client edge is off the cycle".into()
            });
            self.log.record("ham.p3-clean-path", game.round(), props.clean_long_path, || {
                "no clean Stage I path of length n/5 survives".into()
            });
        }
        self.stage = Stage::Finished;
    }
}

impl WaiterStrategy for HamStrategy {
    fn name(&self) -> &'static str {
        "ham-unbiased"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if game.vertex_count() != self.n || game.board().kind == BoardKind::Bipartite || game.bias() != 1 {
            return Err(StrategyError::Precondition("needs an unbiased complete board of the configured size".into()));
        }
        match self.stage {
            Stage::One => {
                let round = self.stage_one_round + 1;
                if round % 2 == 1 || self.r.len() == 1 {
                    self.type_a(game, round)
                } else {
                    self.type_b(game)
                }
            }
            Stage::Two => self.connect(game),
            Stage::Join => {
                let (q1, q2) = (&self.merged[0], &self.merged[1]);
                let v = *q1.last().unwrap();
                let offer = Offer::pair(Edge::new(v, q2[0]), Edge::new(v, *q2.last().unwrap()));
                self.pending = Some(Pending::Join);
                self.checked(game, offer, "hamilton endgame")
            }
            Stage::Rotate => {
                let (i, j) = self
                    .choose_rotation(game)
                    .ok_or_else(|| forfeit("hamilton endgame", "no admissible rotation pair"))?;
                let p = &self.ham_path;
                let last = p[p.len() - 1];
                let offer = Offer::pair(Edge::new(p[i], last), Edge::new(p[j], last));
                self.pending = Some(Pending::Rotate { i, j });
                self.checked(game, offer, "hamilton endgame")
            }
            Stage::Close => {
                let Some(Pending::Close { i }) = self.pending else { unreachable!() };
                let p = &self.ham_path;
                let offer = Offer::pair(Edge::new(p[0], p[i + 1]), Edge::new(p[0], p[p.len() - 1]));
                self.checked(game, offer, "hamilton endgame")
            }
            Stage::Finished => Ok(Move::Done(Certificate::HamiltonCycle { order: self.cycle.clone() })),
        }
    }

    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        if self.first_client.is_none() {
            self.first_client = Some(offer.edges[pick]);
        }
        let chosen = offer.edges[pick];
        match (self.stage, self.pending.take()) {
            (Stage::One, Some(Pending::TypeA { x, paths })) => {
                self.extend(paths[pick], x);
            }
            (Stage::One, Some(Pending::TypeB { path })) => {
                let x = if chosen.lo() == self.end(path) { chosen.hi() } else { chosen.lo() };
                self.extend(path, x);
            }
            (Stage::Two, Some(Pending::Connect { v })) => {
                let x = chosen.other(v).unwrap();
                let vi = self.merged.iter().position(|p| *p.last().unwrap() == v).unwrap();
                let xi = self.merged.iter().position(|p| p[0] == x).unwrap();
                let tail = self.merged[xi].clone();
                self.merged[vi].extend(tail);
                self.merged.remove(xi);
                if self.merged.len() == 2 {
                    if self.probes.any() {
                        self.probe_join_entry(game);
                    }
                    self.stage = Stage::Join;
                }
                return Ok(());
            }
            (Stage::Join, Some(Pending::Join)) => {
                let mut path = self.merged[0].clone();
                let mut q2 = self.merged[1].clone();
                if pick == 1 {
                    q2.reverse();
                }
                path.extend(q2);
                self.ham_path = path;
                self.stage = Stage::Rotate;
                return Ok(());
            }
            (Stage::Rotate, Some(Pending::Rotate { i, j })) => {
                let i = if pick == 0 { i } else { j };
                self.pending = Some(Pending::Close { i });
                self.stage = Stage::Close;
                return Ok(());
            }
            (Stage::Close, Some(Pending::Close { i })) => {
                let p = &self.ham_path;
                self.cycle = if pick == 1 {
                    p.clone()
                } else {
                    let mut c = p[..=i].to_vec();
                    c.extend(p[i + 1..].iter().rev());
                    c
                };
                self.finish(game);
                return Ok(());
            }
            _ => return Err(StrategyError::Finished),
        }
        self.stage_one_round += 1;
        if self.probes.per_round() {
            self.probe_stage_one_round(game);
        }
        if self.stage_one_round == self.n - 4 {
            if self.probes.any() {
                self.probe_stage_one_end(game);
            }
            self.stage_one_paths = self.paths.to_vec();
            self.merged = self.paths.to_vec();
            self.stage = Stage::Two;
        }
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        self.log.clone()
    }
}
