//! Forcing a spanning tree with a pinned vertex.
//!
//! Two cases. When the tree has a long bare path, Waiter first embeds the
//! forest around it greedily and finishes with a Hamilton path on the
//! reserved vertices. When the tree has many leaf neighbours, Waiter embeds
//! the tree minus a leaf matching and finishes with a bipartite perfect
//! matching. A path tree may instead be forced directly as a Hamilton path.

use super::{classify_tree, select_leaf_matching, Tree, TreeClass};
use crate::certificate::Certificate;
use crate::game::{BoardKind, BoardSpec, GameState, Offer};
use crate::graph::{Edge, Vertex};
use crate::hamilton::{HamStrategy, MIN_N as HAM_MIN_N};
use crate::matching::{PmBipartite, MIN_SIDE};
use crate::strategy::{forfeit, CheckLog, Move, ProbeLevel, StrategyError, SubGame, SubMove, WaiterStrategy};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Classification constant.
pub const MU: f64 = 1.0 / 3.0;
/// Default embedding constant, strictly below `MU / 20`.
pub const EPSILON_EMBED: f64 = MU / 21.0;

#[derive(Clone, Debug)]
pub struct TreeEmbedConfig {
    /// Tree vertex to pin; defaults to [`super::default_pin`].
    pub pin: Option<Vertex>,
    /// Board vertex receiving the pinned tree vertex.
    pub board_pin: Vertex,
    pub epsilon: f64,
    /// Force path trees as Hamilton paths (one round faster, no pin).
    pub path_shortcut: bool,
    pub probes: ProbeLevel,
}

impl Default for TreeEmbedConfig {
    fn default() -> Self {
        TreeEmbedConfig {
            pin: None,
            board_pin: 0,
            epsilon: EPSILON_EMBED,
            path_shortcut: true,
            probes: ProbeLevel::PerRound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedCase {
    BarePath,
    LeafRich,
    PathShortcut,
}

struct BareSplit {
    u1: Vertex,
    w1: Vertex,
    /// Interior of the bare path from `u1` to `w1`.
    interior: Vec<Vertex>,
}

enum Phase {
    Grow,
    Hamilton { sub: Box<SubGame<HamStrategy>>, hosts: Vec<Vertex> },
    Matching { sub: Box<SubGame<PmBipartite>>, hosts: Vec<Vertex> },
    Shortcut { ham: Box<HamStrategy>, order: Vec<Vertex> },
    Finished(Certificate),
}

pub struct TreeEmbedStrategy {
    tree: Tree,
    n: usize,
    v: Vertex,
    p: Vertex,
    case: EmbedCase,
    probes: ProbeLevel,
    log: CheckLog,
    theta: usize,
    reserve: usize,
    in_tp: Vec<bool>,
    tp_deg: Vec<usize>,
    missing: Vec<usize>,
    f: Vec<Option<Vertex>>,
    finv: Vec<Option<Vertex>>,
    in_a: Vec<bool>,
    a_count: usize,
    open: BTreeSet<Vertex>,
    sprime: Vec<bool>,
    excluded: Vec<Vertex>,
    stage_one: Vec<Vertex>,
    stage_one_done: usize,
    pending: Option<[(Vertex, Vertex); 2]>,
    phase: Phase,
    bare: Option<BareSplit>,
    leaf_of: Vec<Option<Vertex>>,
    prev_ew: usize,
    stopping_seen: bool,
}

fn ceil_sqrt_mul(c: f64, n: usize) -> usize {
    (c * (n as f64).sqrt()).ceil() as usize
}

impl TreeEmbedStrategy {
    pub fn new(tree: Tree, config: TreeEmbedConfig) -> Result<Self, StrategyError> {
        let n = tree.n();
        let pre = |m: String| StrategyError::Precondition(m);
        if n < MIN_SIDE * 2 {
            return Err(pre(format!("tree on {n} vertices is too small")));
        }
        let p = config.board_pin;
        if p as usize >= n {
            return Err(pre(format!("board pin {p} is out of range")));
        }
        if config.path_shortcut && tree.is_path() && n >= HAM_MIN_N {
            let end = (0..n as Vertex).find(|&x| tree.degree(x) == 1).unwrap();
            let order = tree_path_order(&tree, end);
            let ham = HamStrategy::new(n, config.probes)?;
            let mut s = Self::blank(tree, 0, p, EmbedCase::PathShortcut, &config);
            s.phase = Phase::Shortcut { ham: Box::new(ham), order };
            return Ok(s);
        }
        let v = match config.pin {
            Some(v) => v,
            None => super::default_pin(&tree).ok_or_else(|| pre("no vertex is eligible as the pin".into()))?,
        };
        if v as usize >= n || tree.is_leaf(v) || tree.leaf_neighbors().contains(&v) || 3 * tree.degree(v) > n {
            return Err(pre(format!("tree vertex {v} cannot be pinned")));
        }
        let class = classify_tree(&tree, MU).map_err(|e| pre(e.to_string()))?;
        let matching = select_leaf_matching(&tree, v);
        if let TreeClass::BarePath(path) = &class {
            if let Some(split) = bare_split(&tree, path, v, n) {
                return Ok(Self::bare_path_case(tree, v, p, split, &config));
            }
        }
        if matching.pairs.len() >= MIN_SIDE {
            return Ok(Self::leaf_rich_case(tree, v, p, matching.pairs, &config));
        }
        Err(pre("tree admits neither a usable bare path nor a large leaf matching".into()))
    }

    fn blank(tree: Tree, v: Vertex, p: Vertex, case: EmbedCase, config: &TreeEmbedConfig) -> Self {
        let n = tree.n();
        let eps_floor = (config.epsilon * (n as f64).sqrt()).floor() as usize;
        let theta = eps_floor.max(tree.max_degree_without(v));
        TreeEmbedStrategy {
            n,
            v,
            p,
            case,
            probes: config.probes,
            log: CheckLog::new(),
            theta,
            reserve: 0,
            in_tp: vec![true; n],
            tp_deg: Vec::new(),
            missing: vec![0; n],
            f: vec![None; n],
            finv: vec![None; n],
            in_a: vec![true; n],
            a_count: n,
            open: BTreeSet::new(),
            sprime: vec![false; n],
            excluded: Vec::new(),
            stage_one: Vec::new(),
            stage_one_done: 0,
            pending: None,
            phase: Phase::Grow,
            bare: None,
            leaf_of: vec![None; n],
            prev_ew: 0,
            stopping_seen: false,
            tree,
        }
    }

    fn finish_setup(&mut self, initial: &[(Vertex, Vertex)]) {
        let n = self.n;
        self.tp_deg = (0..n as Vertex)
            .map(|x| {
                if self.in_tp[x as usize] {
                    self.tree.neighbors(x).iter().filter(|&&y| self.in_tp[y as usize]).count()
                } else {
                    0
                }
            })
            .collect();
        self.missing = self.tp_deg.clone();
        for &(t, a) in initial {
            self.embed(t, a);
        }
        self.stage_one = self
            .tree
            .neighbors(self.v)
            .iter()
            .copied()
            .filter(|&y| self.in_tp[y as usize] && self.f[y as usize].is_none())
            .collect();
    }

    fn bare_path_case(tree: Tree, v: Vertex, p: Vertex, split: (Vec<Vertex>, Vertex, Vertex), config: &TreeEmbedConfig) -> Self {
        let (window, u, w) = split;
        let mut s = Self::blank(tree, v, p, EmbedCase::BarePath, config);
        let interior: Vec<Vertex> = window[1..window.len() - 1].to_vec();
        let (u1, w1) = (interior[0], *interior.last().unwrap());
        for &x in &interior[1..interior.len() - 1] {
            s.in_tp[x as usize] = false;
        }
        let _ = u;
        s.reserve = interior.len() - 2;
        s.excluded = vec![u1, w1];
        s.bare = Some(BareSplit { u1, w1, interior });
        let q = (0..s.n as Vertex).find(|&x| x != p).unwrap();
        s.finish_setup(&[(v, p), (w, q)]);
        s
    }

    fn leaf_rich_case(tree: Tree, v: Vertex, p: Vertex, pairs: Vec<(Vertex, Vertex)>, config: &TreeEmbedConfig) -> Self {
        let mut s = Self::blank(tree, v, p, EmbedCase::LeafRich, config);
        for &(x, leaf) in &pairs {
            s.in_tp[leaf as usize] = false;
            s.sprime[x as usize] = true;
            s.leaf_of[x as usize] = Some(leaf);
        }
        s.reserve = pairs.len();
        s.finish_setup(&[(v, p)]);
        s
    }

    pub fn case(&self) -> EmbedCase {
        self.case
    }

    /// The pinned tree vertex.
    pub fn pin(&self) -> Vertex {
        self.v
    }

    pub fn board_pin(&self) -> Vertex {
        self.p
    }

    /// Degree threshold used by the leaf-rich probes: `max(floor(eps sqrt n), Delta(T - v))`.
    pub fn theta(&self) -> usize {
        self.theta
    }

    fn embed(&mut self, z: Vertex, a: Vertex) {
        self.f[z as usize] = Some(a);
        self.finv[a as usize] = Some(z);
        if self.in_a[a as usize] {
            self.in_a[a as usize] = false;
            self.a_count -= 1;
        }
        let nbrs: Vec<Vertex> = self.tree.neighbors(z).to_vec();
        for y in nbrs {
            if !self.in_tp[y as usize] {
                continue;
            }
            if let Some(fy) = self.f[y as usize] {
                self.missing[y as usize] -= 1;
                self.missing[z as usize] -= 1;
                if self.missing[y as usize] == 0 {
                    self.open.remove(&fy);
                }
            }
        }
        if self.missing[z as usize] > 0 {
            self.open.insert(a);
        }
    }

    fn unembedded_tp_neighbors(&self, t: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.tree
            .neighbors(t)
            .iter()
            .copied()
            .filter(move |&y| self.in_tp[y as usize] && self.f[y as usize].is_none())
    }

    fn dw_sprime(&self, game: &GameState, a: Vertex) -> usize {
        game.waiter_neighbors(a)
            .iter()
            .filter(|&&b| self.finv[b as usize].is_some_and(|t| self.sprime[t as usize]))
            .count()
    }

    fn a_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.n as Vertex).filter(move |&a| self.in_a[a as usize])
    }

    fn offer_two(&mut self, x: Vertex, picks: [(Vertex, Vertex); 2]) -> Move {
        self.pending = Some(picks);
        let e1 = Edge::new(x, picks[0].1);
        let e2 = Edge::new(x, picks[1].1);
        Move::Offer(Offer::pair(e1, e2))
    }

    fn grow(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if self.stage_one_done < self.stage_one.len() {
            let t = self.stage_one[self.stage_one_done];
            let p = self.p;
            let a: Vec<Vertex> = self.a_vertices().filter(|&a| game.is_free_pair(p, a)).take(2).collect();
            if a.len() < 2 {
                return Err(forfeit("tree stage I", "pinned vertex lacks two free edges into A"));
            }
            return Ok(self.offer_two(p, [(t, a[0]), (t, a[1])]));
        }
        if self.case == EmbedCase::BarePath {
            let excluded: Vec<Vertex> = self.excluded.iter().filter_map(|&t| self.f[t as usize]).collect();
            let x = self
                .open
                .iter()
                .copied()
                .find(|x| !excluded.contains(x))
                .ok_or_else(|| forfeit("tree stage II", "no open vertex outside the path anchors"))?;
            let t = self.finv[x as usize].unwrap();
            let z = self.unembedded_tp_neighbors(t).next().unwrap();
            let a: Vec<Vertex> = self.a_vertices().filter(|&a| game.is_free_pair(x, a)).take(2).collect();
            if a.len() < 2 {
                return Err(forfeit("tree stage II", format!("open vertex {x} lacks two free edges into A")));
            }
            return Ok(self.offer_two(x, [(z, a[0]), (z, a[1])]));
        }
        let open: Vec<Vertex> = self.open.iter().copied().take(2).collect();
        match open.len() {
            0 => Err(forfeit("tree stage II", "no open vertex while T' is incomplete")),
            2 => {
                let (u1, u2) = (open[0], open[1]);
                let t1 = self.finv[u1 as usize].unwrap();
                let t2 = self.finv[u2 as usize].unwrap();
                let z1 = self.unembedded_tp_neighbors(t1).next().unwrap();
                let z2 = self.unembedded_tp_neighbors(t2).next().unwrap();
                let candidates: Vec<Vertex> = self
                    .a_vertices()
                    .filter(|&a| game.is_free_pair(a, u1) && game.is_free_pair(a, u2))
                    .collect();
                let a = candidates
                    .iter()
                    .copied()
                    .find(|&a| self.dw_sprime(game, a) >= 1)
                    .or_else(|| candidates.first().copied())
                    .ok_or_else(|| forfeit("tree stage II", "no available vertex free to both open vertices"))?;
                self.pending = Some([(z1, a), (z2, a)]);
                Ok(Move::Offer(Offer::pair(Edge::new(a, u1), Edge::new(a, u2))))
            }
            _ => {
                let u = open[0];
                let t = self.finv[u as usize].unwrap();
                let mut free: Vec<Vertex> = self.a_vertices().filter(|&a| game.is_free_pair(a, u)).collect();
                let z;
                if !self.sprime[t as usize] {
                    z = self.unembedded_tp_neighbors(t).next().unwrap();
                    free.sort_by_key(|&a| (self.dw_sprime(game, a) == 0, a));
                } else {
                    z = self
                        .unembedded_tp_neighbors(t)
                        .max_by_key(|&y| (self.tp_deg[y as usize], std::cmp::Reverse(y)))
                        .unwrap();
                    free.retain(|&a| self.dw_sprime(game, a) == 0);
                }
                if free.len() < 2 {
                    return Err(forfeit("tree stage II", format!("open vertex {u} lacks two suitable available vertices")));
                }
                Ok(self.offer_two(u, [(z, free[0]), (z, free[1])]))
            }
        }
    }

    fn tp_complete(&self) -> bool {
        (0..self.n).all(|x| !self.in_tp[x] || self.f[x].is_some())
    }

    fn probe_grow(&mut self, game: &GameState, offer: &Offer) {
        if !self.probes.per_round() {
            return;
        }
        let round = game.round();
        let at_p = offer.edges.iter().filter(|e| e.touches(self.p)).count();
        self.log.record("tree.pin-pairs", round, at_p == 0 || at_p == 2, || format!("{at_p} offered edges at the pin"));
        self.log.record("tree.reserve", round, self.a_count >= self.reserve, || {
            format!("|A| = {} below reserve {}", self.a_count, self.reserve)
        });
        let mut dirty = Vec::new();
        for a in self.a_vertices() {
            for &b in game.waiter_neighbors(a).iter().chain(game.client_neighbors(a)) {
                if self.in_a[b as usize] && a < b {
                    dirty.push(format!("{a}-{b}"));
                }
            }
        }
        self.log.record_all("tree.a-clean", round, dirty);
        let mut unbalanced = Vec::new();
        for x in 0..self.n as Vertex {
            if self.finv[x as usize].is_some() {
                let dwa = game.waiter_neighbors(x).iter().filter(|&&b| self.in_a[b as usize]).count();
                if dwa > game.d_c(x) {
                    unbalanced.push(format!("d_W({x}, A) = {dwa} > d_C = {}", game.d_c(x)));
                }
            }
        }
        self.log.record_all("tree.w-balance", round, unbalanced);
        if self.case == EmbedCase::LeafRich {
            let degs: Vec<(Vertex, usize)> = self.a_vertices().map(|a| (a, self.dw_sprime(game, a))).collect();
            let bad: Vec<String> = degs.iter().filter(|(_, d)| *d > 1).map(|(a, d)| format!("d_W({a}, f(S')) = {d}")).collect();
            self.log.record_all("tree.b.sprime-degree", round, bad);
            let ew: usize = degs.iter().map(|(_, d)| d).sum();
            if self.open.len() == 1 {
                let u = *self.open.iter().next().unwrap();
                let t = self.finv[u as usize].unwrap();
                if self.unembedded_tp_neighbors(t).all(|y| self.tp_deg[y as usize] == 1) {
                    self.stopping_seen = true;
                }
            }
            if !self.stopping_seen {
                let theta = self.theta;
                let prev = self.prev_ew;
                let ok = ew <= theta + 1 && !(prev == theta + 1 && ew > theta);
                self.log.record("tree.b.recovery", round, ok, || format!("e_W(f(S'), A) = {ew} after {prev} with threshold {theta}"));
            }
            self.prev_ew = ew;
        }
    }

    fn enter_finish(&mut self, game: &GameState) -> Result<(), StrategyError> {
        let round = game.round();
        match self.case {
            EmbedCase::BarePath => {
                let split = self.bare.as_ref().unwrap();
                let (fu1, fw1) = (self.f[split.u1 as usize].unwrap(), self.f[split.w1 as usize].unwrap());
                let mut hosts = vec![fu1, fw1];
                hosts.extend(self.a_vertices());
                if self.probes.any() {
                    let set: BTreeSet<Vertex> = hosts.iter().copied().collect();
                    let dirty = hosts.iter().any(|&x| {
                        game.waiter_neighbors(x).iter().chain(game.client_neighbors(x)).any(|y| set.contains(y))
                    });
                    self.log.record("tree.a.stage3-clean", round, !dirty, || "claimed edge inside A'".into());
                }
                let m = hosts.len();
                if m < HAM_MIN_N {
                    return Err(forfeit("tree stage III", format!("reserved set of {m} vertices is too small")));
                }
                let local = GameState::new(BoardSpec::complete(m, 1))?;
                let inner = HamStrategy::with_pretended_first_edge(m, self.probes, 0, 1)?;
                let map = hosts.iter().map(|&h| Some(h)).collect();
                self.phase = Phase::Hamilton { sub: Box::new(SubGame::new(local, map, inner)), hosts };
            }
            EmbedCase::LeafRich => {
                let b: Vec<Vertex> = (0..self.n as Vertex)
                    .filter(|&x| self.finv[x as usize].is_some_and(|t| self.sprime[t as usize]))
                    .collect();
                let a: Vec<Vertex> = self.a_vertices().collect();
                let m = b.len();
                if a.len() != m {
                    return Err(forfeit("tree stage III", format!("|A| = {} differs from |f(S')| = {m}", a.len())));
                }
                let mut forbidden = Vec::new();
                let mut client_cross = 0;
                for (i, &x) in b.iter().enumerate() {
                    for (j, &y) in a.iter().enumerate() {
                        if game.is_waiter(x, y) {
                            forbidden.push(Edge::new(i as Vertex, (m + j) as Vertex));
                        } else if game.is_client(x, y) {
                            client_cross += 1;
                        }
                    }
                }
                if self.probes.any() {
                    let limit = 2 * self.theta + 1;
                    let ew = forbidden.len();
                    self.log.record("tree.b.stage3-entry", round, ew <= limit && client_cross == 0, || {
                        format!("e_W(A, f(S')) = {ew}, e_C = {client_cross}")
                    });
                }
                let board = BoardSpec::bipartite_minus(m, forbidden, 1);
                let inner = PmBipartite::new(&board, self.probes).map_err(|e| forfeit("tree stage III", e.to_string()))?;
                let local = GameState::new(board)?;
                let mut hosts = b;
                hosts.extend(a);
                let map = hosts.iter().map(|&h| Some(h)).collect();
                self.phase = Phase::Matching { sub: Box::new(SubGame::new(local, map, inner)), hosts };
            }
            EmbedCase::PathShortcut => unreachable!(),
        }
        Ok(())
    }

    fn certificate(&self) -> Certificate {
        Certificate::TreeEmbedding {
            tree: self.tree.edges(),
            map: self.f.iter().map(|x| x.expect("every tree vertex is embedded")).collect(),
        }
    }

    fn complete_from_cycle(&mut self, order: &[Vertex], hosts: &[Vertex]) -> Result<(), StrategyError> {
        let m = order.len();
        let root = order.iter().position(|&x| x == 0).unwrap();
        let step = if order[(root + m - 1) % m] == 1 {
            1
        } else if order[(root + 1) % m] == 1 {
            m - 1
        } else {
            return Err(forfeit("tree stage III", "pretended edge missing from the cycle"));
        };
        let split = self.bare.as_ref().unwrap();
        let interior = split.interior.clone();
        for (k, &t) in interior.iter().enumerate() {
            let local = order[(root + k * step) % m];
            let h = hosts[local as usize];
            self.f[t as usize] = Some(h);
            self.finv[h as usize] = Some(t);
        }
        Ok(())
    }

    fn complete_from_matching(&mut self, edges: &[Edge], hosts: &[Vertex]) {
        for e in edges {
            let (b, a) = (hosts[e.lo() as usize], hosts[e.hi() as usize]);
            let x = self.finv[b as usize].unwrap();
            let leaf = self.leaf_of[x as usize].unwrap();
            self.f[leaf as usize] = Some(a);
            self.finv[a as usize] = Some(leaf);
        }
    }
}

/// Vertex order of a path tree starting at the leaf `end`.
fn tree_path_order(tree: &Tree, end: Vertex) -> Vec<Vertex> {
    let mut order = vec![end];
    let mut prev = end;
    let mut cur = tree.neighbors(end)[0];
    loop {
        order.push(cur);
        match tree.neighbors(cur).iter().find(|&&y| y != prev) {
            Some(&next) => {
                prev = cur;
                cur = next;
            }
            None => break,
        }
    }
    order
}

/// Picks a window of the bare path whose interior avoids `v` and is large
/// enough for the Hamilton finish; orients it so that `v` is on the `u` side.
fn bare_split(tree: &Tree, path: &[Vertex], v: Vertex, n: usize) -> Option<(Vec<Vertex>, Vertex, Vertex)> {
    let len = ceil_sqrt_mul(MU, n).max(HAM_MIN_N + 1);
    if path.len() < len + 1 {
        return None;
    }
    let iv = path.iter().position(|&x| x == v);
    let start = (0..=path.len() - 1 - len).find(|&s| iv.map_or(true, |i| !(s < i && i < s + len)))?;
    let mut window: Vec<Vertex> = path[start..=start + len].to_vec();
    let interior: BTreeSet<Vertex> = window[1..len].iter().copied().collect();
    let side_of_u = component_avoiding(tree, window[0], &interior);
    if !side_of_u.contains(&v) {
        window.reverse();
    }
    let (u, w) = (window[0], window[len]);
    Some((window, u, w))
}

fn component_avoiding(tree: &Tree, root: Vertex, blocked: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(x) = stack.pop() {
        for &y in tree.neighbors(x) {
            if !blocked.contains(&y) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

impl WaiterStrategy for TreeEmbedStrategy {
    fn name(&self) -> &'static str {
        "tree-embed"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if game.board().kind == BoardKind::Bipartite || game.vertex_count() != self.n || game.bias() != 1 {
            return Err(StrategyError::Precondition("needs an unbiased complete board matching the tree".into()));
        }
        loop {
            match &mut self.phase {
                Phase::Finished(c) => return Ok(Move::Done(c.clone())),
                Phase::Shortcut { ham, .. } => return ham.next_offer(game),
                Phase::Grow => {
                    if self.stage_one_done >= self.stage_one.len() && self.tp_complete() {
                        self.enter_finish(game)?;
                        continue;
                    }
                    return self.grow(game);
                }
                Phase::Hamilton { sub, hosts } => match sub.next_offer()? {
                    SubMove::Offer(o) => return Ok(Move::Offer(o)),
                    SubMove::Fake => return Ok(Move::Fake),
                    SubMove::Done(Certificate::HamiltonCycle { order }) => {
                        let hosts = hosts.clone();
                        self.log.merge(&sub.inner().checks());
                        self.complete_from_cycle(&order, &hosts)?;
                        self.phase = Phase::Finished(self.certificate());
                    }
                    SubMove::Done(_) => return Err(forfeit("tree stage III", "unexpected certificate")),
                },
                Phase::Matching { sub, hosts } => match sub.next_offer()? {
                    SubMove::Offer(o) => return Ok(Move::Offer(o)),
                    SubMove::Fake => return Ok(Move::Fake),
                    SubMove::Done(Certificate::Matching { edges }) => {
                        let hosts = hosts.clone();
                        self.log.merge(&sub.inner().checks());
                        self.complete_from_matching(&edges, &hosts);
                        self.phase = Phase::Finished(self.certificate());
                    }
                    SubMove::Done(_) => return Err(forfeit("tree stage III", "unexpected certificate")),
                },
            }
        }
    }

    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        match &mut self.phase {
            Phase::Grow => {
                let picks = self.pending.take().ok_or(StrategyError::Finished)?;
                let (z, a) = picks[pick];
                self.embed(z, a);
                if self.stage_one_done < self.stage_one.len() {
                    self.stage_one_done += 1;
                }
                self.probe_grow(game, offer);
                Ok(())
            }
            Phase::Hamilton { sub, .. } => sub.on_pick(pick),
            Phase::Matching { sub, .. } => sub.on_pick(pick),
            Phase::Shortcut { ham, order } => {
                ham.on_pick(game, offer, pick)?;
                if let Some(path) = ham.hamilton_path() {
                    let path = path.to_vec();
                    let order = order.clone();
                    self.log.merge(&ham.checks());
                    for (t, h) in order.into_iter().zip(path) {
                        self.f[t as usize] = Some(h);
                    }
                    self.phase = Phase::Finished(self.certificate());
                }
                Ok(())
            }
            Phase::Finished(_) => Err(StrategyError::Finished),
        }
    }

    fn checks(&self) -> CheckLog {
        let mut log = self.log.clone();
        match &self.phase {
            Phase::Hamilton { sub, .. } => log.merge(&sub.inner().checks()),
            Phase::Matching { sub, .. } => log.merge(&sub.inner().checks()),
            Phase::Shortcut { ham, .. } => log.merge(&ham.checks()),
            _ => {}
        }
        log
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::{LastEdgeAvoider, Target, UniformRandom};
    use crate::engine::play;
    use crate::tree::random_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(tree: Tree, config: TreeEmbedConfig, seed: u64) -> (GameState, TreeEmbedStrategy, Certificate) {
        let n = tree.n();
        let mut game = GameState::new(BoardSpec::complete(n, 1)).unwrap();
        let mut s = TreeEmbedStrategy::new(tree, config).unwrap();
        let cert = play(&mut game, &mut s, &mut UniformRandom::new(seed), 3 * n).unwrap();
        (game, s, cert)
    }

    #[test]
    fn random_trees_embed_within_n_rounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..6 {
            let tree = random_tree(&mut rng, 400, 5);
            let (game, s, cert) = run(tree, TreeEmbedConfig::default(), seed);
            assert!(game.real_rounds() <= 400);
            assert!(s.checks().is_clean(), "{:?}", s.checks().summaries());
            let Certificate::TreeEmbedding { map, .. } = cert else { panic!() };
            assert_eq!(map[s.pin() as usize], s.board_pin());
        }
    }

    #[test]
    fn path_shortcut_takes_n_minus_one() {
        let (game, s, _) = run(Tree::path(60), TreeEmbedConfig::default(), 3);
        assert_eq!(game.real_rounds(), 59);
        assert_eq!(s.case(), EmbedCase::PathShortcut);
    }

    #[test]
    fn bare_path_case_takes_n() {
        for seed in 0..5 {
            let tree = Tree::two_leaf_tipped(100);
            let edges = tree.edges();
            let mut game = GameState::new(BoardSpec::complete(100, 1)).unwrap();
            let mut s = TreeEmbedStrategy::new(tree, TreeEmbedConfig { board_pin: 7, ..Default::default() }).unwrap();
            assert_eq!(s.case(), EmbedCase::BarePath);
            let mut client = LastEdgeAvoider::new(Target::Tree { edges }, seed);
            let cert = play(&mut game, &mut s, &mut client, 300).unwrap();
            assert_eq!(game.real_rounds(), 100);
            assert!(s.checks().is_clean(), "{:?}", s.checks().summaries());
            let Certificate::TreeEmbedding { map, .. } = cert else { panic!() };
            assert_eq!(map[s.pin() as usize], 7);
        }
    }
}
