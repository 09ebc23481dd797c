//! Biased Hamiltonicity and perfect matching.
//!
//! Stage I grows a long Client path from a fixed start while keeping Waiter
//! degrees outside the path balanced. Stage II forces a Hamilton cycle on the
//! remaining `C_0 b` vertices with a pluggable subroutine. Stage III links
//! the path start to that cycle, Stage IV produces `b + 1` path endpoints by
//! rotations, and Stage V closes the cycle with a single offer. The matching
//! strategy runs Stage I with every second move faked and reads the matching
//! off the path and the remainder cycle.

use crate::certificate::Certificate;
use crate::game::{BoardKind, BoardSpec, GameState, Offer};
use crate::graph::{Edge, Vertex};
use crate::hamilton::{HamStrategy, MIN_N as HAM_MIN_N};
use crate::strategy::{forfeit, CheckLog, Move, ProbeLevel, StrategyError, SubGame, SubMove, WaiterStrategy};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasedConstants {
    pub c0: usize,
    pub delta0: f64,
    pub delta: f64,
    /// Slope of the additive round allowance `C b`.
    pub c: f64,
}

impl BiasedConstants {
    /// Constants computed from the external pancyclicity constants `c`, `n0`.
    pub fn from_external(c: f64, n0: usize) -> Self {
        let c0 = (100.0 * (1.0 / c).max(n0 as f64)).ceil() as usize;
        let delta0 = 0.1 * c;
        let delta = 0.01 * delta0.min(1.0 / c0 as f64);
        BiasedConstants { c0, delta0, delta, c: c0 as f64 / delta }
    }

    /// Small constants for desk-scale boards; correctness rests on the probes.
    pub fn desk() -> Self {
        BiasedConstants { c0: 20, delta0: 0.05, delta: 0.01, c: 2000.0 }
    }

    pub fn remainder(&self, b: u32) -> usize {
        self.c0 * b as usize
    }

    /// `n + C b`.
    pub fn ham_cap(&self, n: usize, b: u32) -> f64 {
        n as f64 + self.c * b as f64
    }

    /// `n/2 + C b`.
    pub fn pm_cap(&self, n: usize, b: u32) -> f64 {
        n as f64 / 2.0 + self.c * b as f64
    }

    fn check(&self, n: usize, b: u32) -> Result<(), StrategyError> {
        let pre = |m: String| StrategyError::Precondition(m);
        if b == 0 {
            return Err(pre("bias must be positive".into()));
        }
        if b as f64 > self.delta * n as f64 {
            return Err(pre(format!("bias {b} exceeds delta n = {}", self.delta * n as f64)));
        }
        if self.remainder(b) + 2 >= n {
            return Err(pre(format!("remainder C_0 b = {} leaves no room for the path", self.remainder(b))));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Paper,
    Desk,
}

impl Profile {
    pub fn constants(self) -> BiasedConstants {
        match self {
            Profile::Paper => BiasedConstants::from_external(0.01, 1),
            Profile::Desk => BiasedConstants::desk(),
        }
    }
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Profile::Paper),
            "desk" => Ok(Profile::Desk),
            other => Err(format!("unknown constants profile {other:?}")),
        }
    }
}

/// Which subroutine forces the remainder cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemainderKind {
    /// The unbiased Hamilton strategy (bias 1 only).
    Unbiased,
    /// Path growth, rotations and one closing offer; not guaranteed.
    Heuristic,
}

/// Picks the remainder subroutine for `m` vertices at bias `b`.
pub fn remainder_strategy(m: usize, b: u32, probes: ProbeLevel) -> Result<(Box<dyn WaiterStrategy>, RemainderKind), StrategyError> {
    if b == 1 && m >= HAM_MIN_N {
        Ok((Box::new(HamStrategy::new(m, probes)?), RemainderKind::Unbiased))
    } else {
        Ok((Box::new(RotationCycle::new(m)), RemainderKind::Heuristic))
    }
}

#[derive(Clone, Debug)]
enum RotPhase {
    Grow,
    /// Rotations towards `target`; `target` is off the path while absorbing
    /// and equal to the path start while closing.
    Rotate { target: Vertex, closing: bool },
    Finished(Vec<Vertex>),
}

/// Heuristic biased Hamilton cycle builder on a fresh complete board.
///
/// Grows a path from vertex 0, always offering the `b + 1` unvisited
/// vertices of least Waiter degree, until `b` vertices remain. Each of those
/// is absorbed by rotating the path at its far end until `b + 1` distinct
/// endpoints have a free edge to it and then offering all of these edges.
/// The cycle is closed the same way with vertex 0 as the target.
pub struct RotationCycle {
    m: usize,
    path: Vec<Vertex>,
    on_path: Vec<bool>,
    /// Rotated copies of the path sharing the start vertex, latest last.
    paths: Vec<Vec<Vertex>>,
    phase: RotPhase,
    rotations: usize,
}

impl RotationCycle {
    pub fn new(m: usize) -> Self {
        let mut on_path = vec![false; m];
        on_path[0] = true;
        RotationCycle { m, path: vec![0], on_path, paths: Vec::new(), phase: RotPhase::Grow, rotations: 0 }
    }

    /// Rotation rounds played so far.
    pub fn rotations(&self) -> usize {
        self.rotations
    }

    fn unvisited(&self) -> Vec<Vertex> {
        (0..self.m as Vertex).filter(|&v| !self.on_path[v as usize]).collect()
    }

    fn start_rotation(&mut self) {
        let rest = self.unvisited();
        self.paths = vec![self.path.clone()];
        self.phase = match rest.first() {
            Some(&z) => RotPhase::Rotate { target: z, closing: false },
            None => RotPhase::Rotate { target: 0, closing: true },
        };
    }

    fn ready(&self, game: &GameState, target: Vertex) -> Vec<Vertex> {
        let mut ends: Vec<Vertex> = self
            .paths
            .iter()
            .map(|p| *p.last().unwrap())
            .filter(|&v| game.is_free_pair(v, target))
            .collect();
        ends.dedup();
        ends
    }
}

impl WaiterStrategy for RotationCycle {
    fn name(&self) -> &'static str {
        "rotation-cycle"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        let want = game.required_offer_len();
        loop {
            match self.phase {
                RotPhase::Finished(ref order) => return Ok(Move::Done(Certificate::HamiltonCycle { order: order.clone() })),
                RotPhase::Grow => {
                    let rest = self.unvisited();
                    if rest.len() < want {
                        self.start_rotation();
                        continue;
                    }
                    let e = *self.path.last().unwrap();
                    let mut ext: Vec<Vertex> = rest.into_iter().filter(|&u| game.is_free_pair(e, u)).collect();
                    ext.sort_by_key(|&u| (game.d_w(u), u));
                    if ext.len() < want {
                        return Err(forfeit("rotation cycle", format!("endpoint {e} has too few free edges")));
                    }
                    return Ok(Move::Offer(Offer::new(ext[..want].iter().map(|&u| Edge::new(e, u)).collect())));
                }
                RotPhase::Rotate { target, closing } => {
                    let ready = self.ready(game, target);
                    if ready.len() >= want {
                        return Ok(Move::Offer(Offer::new(ready[..want].iter().map(|&v| Edge::new(v, target)).collect())));
                    }
                    let p = self.paths.last().unwrap();
                    let v = *p.last().unwrap();
                    let seen: Vec<Vertex> = self.paths.iter().map(|q| *q.last().unwrap()).collect();
                    let start = usize::from(closing);
                    let cands: Vec<Vertex> = (start..p.len() - 2)
                        .filter(|&i| game.is_free_pair(p[i], v))
                        .filter(|&i| !seen.contains(&p[i + 1]) && game.is_free_pair(p[i + 1], target))
                        .map(|i| p[i])
                        .take(want)
                        .collect();
                    if cands.len() < want {
                        return Err(forfeit("rotation cycle", format!("too few rotation candidates at endpoint {v}")));
                    }
                    return Ok(Move::Offer(Offer::new(cands.into_iter().map(|y| Edge::new(y, v)).collect())));
                }
            }
        }
    }

    fn on_pick(&mut self, _game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        let chosen = offer.edges[pick];
        match self.phase {
            RotPhase::Grow => {
                let e = *self.path.last().unwrap();
                let u = chosen.other(e).unwrap();
                self.on_path[u as usize] = true;
                self.path.push(u);
            }
            RotPhase::Rotate { target, closing } => {
                if let Some(v) = chosen.other(target) {
                    let base = self.paths.iter().find(|p| *p.last().unwrap() == v).unwrap().clone();
                    if closing {
                        self.phase = RotPhase::Finished(base);
                    } else {
                        self.path = base;
                        self.path.push(target);
                        self.on_path[target as usize] = true;
                        self.start_rotation();
                    }
                } else {
                    let p = self.paths.last().unwrap();
                    let v = *p.last().unwrap();
                    let y = chosen.other(v).unwrap();
                    let i = p.iter().position(|&z| z == y).unwrap();
                    let mut next = p.clone();
                    next[i + 1..].reverse();
                    self.paths.push(next);
                    self.rotations += 1;
                }
            }
            RotPhase::Finished(_) => return Err(StrategyError::Finished),
        }
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        CheckLog::new()
    }
}

/// Stage I path growth shared by both strategies.
struct Growth {
    n: usize,
    b: u32,
    in_p: Vec<bool>,
    path: Vec<Vertex>,
    target: usize,
    fake_every_second: bool,
    steps: usize,
    pending: Option<Vec<Vertex>>,
}

impl Growth {
    fn new(n: usize, b: u32, target: usize, fake_every_second: bool) -> Self {
        let mut in_p = vec![false; n];
        in_p[0] = true;
        Growth { n, b, in_p, path: vec![0], target, fake_every_second, steps: 0, pending: None }
    }

    fn done(&self) -> bool {
        self.path.len() == self.target
    }

    fn lowest(&self, game: &GameState, count: usize) -> Vec<Vertex> {
        let mut rest: Vec<(usize, Vertex)> = (0..self.n as Vertex)
            .filter(|&v| !self.in_p[v as usize])
            .map(|v| (game.d_w(v), v))
            .collect();
        rest.sort_unstable();
        rest.into_iter().take(count).map(|(_, v)| v).collect()
    }

    fn spread(&self, game: &GameState) -> usize {
        let degs = (0..self.n as Vertex).filter(|&v| !self.in_p[v as usize]).map(|v| game.d_w(v));
        let (lo, hi) = degs.fold((usize::MAX, 0), |(lo, hi), d| (lo.min(d), hi.max(d)));
        hi.saturating_sub(lo)
    }

    /// Offer for the next step, or `None` for a faked step (already applied).
    fn step(&mut self, game: &GameState, log: &mut CheckLog, probes: ProbeLevel) -> Result<Option<Offer>, StrategyError> {
        let a = *self.path.last().unwrap();
        let fake = self.fake_every_second && self.steps % 2 == 1;
        if fake {
            let x = self.lowest(game, 1)[0];
            self.add(x);
            return Ok(None);
        }
        let xs = self.lowest(game, self.b as usize + 1);
        if probes.per_round() {
            let free = (0..self.n as Vertex).filter(|&v| !self.in_p[v as usize]).all(|v| game.is_free_pair(a, v));
            log.record("biased.stage1-free", game.round(), free, || format!("claimed edge from {a} out of the path"));
        }
        if xs.len() < self.b as usize + 1 {
            return Err(forfeit("biased stage I", "too few vertices outside the path"));
        }
        self.pending = Some(xs.clone());
        Ok(Some(Offer::new(xs.into_iter().map(|x| Edge::new(a, x)).collect())))
    }

    fn add(&mut self, x: Vertex) {
        self.in_p[x as usize] = true;
        self.path.push(x);
        self.steps += 1;
    }

    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize, log: &mut CheckLog, probes: ProbeLevel) {
        let a = *self.path.last().unwrap();
        self.pending = None;
        self.add(offer.edges[pick].other(a).unwrap());
        if probes.per_round() {
            let s = self.spread(game);
            log.record("biased.degree-spread", game.round(), s <= 1, || format!("Waiter degree spread {s} outside the path"));
        }
    }

    fn remainder(&self) -> Vec<Vertex> {
        (0..self.n as Vertex).filter(|&v| !self.in_p[v as usize]).collect()
    }
}

struct Remainder {
    sub: SubGame<Box<dyn WaiterStrategy>>,
    hosts: Vec<Vertex>,
    kind: RemainderKind,
    rounds: usize,
}

fn start_remainder(game: &GameState, growth: &Growth, b: u32, probes: ProbeLevel, log: &mut CheckLog) -> Result<Remainder, StrategyError> {
    let hosts = growth.remainder();
    if probes.any() {
        let clean = hosts
            .iter()
            .enumerate()
            .all(|(i, &u)| hosts[i + 1..].iter().all(|&v| game.is_free_pair(u, v)));
        log.record("biased.r-clean", game.round(), clean, || "claimed edge inside R at Stage II entry".into());
    }
    let m = hosts.len();
    let (inner, kind) = remainder_strategy(m, b, probes)?;
    let local = GameState::new(BoardSpec::complete(m, b))?;
    let map = hosts.iter().map(|&h| Some(h)).collect();
    Ok(Remainder { sub: SubGame::new(local, map, inner), hosts, kind, rounds: 0 })
}

/// Advances the remainder; returns the host cycle once it is complete.
fn step_remainder(rem: &mut Remainder, log: &mut CheckLog) -> Result<Result<Move, Vec<Vertex>>, StrategyError> {
    match rem.sub.next_offer()? {
        SubMove::Offer(o) => Ok(Ok(Move::Offer(o))),
        SubMove::Fake => Ok(Ok(Move::Fake)),
        SubMove::Done(Certificate::HamiltonCycle { order }) => {
            log.merge(&rem.sub.inner().checks());
            Ok(Err(order.into_iter().map(|v| rem.hosts[v as usize]).collect()))
        }
        SubMove::Done(_) => Err(forfeit("biased stage II", "unexpected certificate")),
    }
}

fn check_board(game: &GameState, n: usize, b: u32) -> Result<(), StrategyError> {
    if game.board().kind != BoardKind::Complete || game.vertex_count() != n || game.bias() != b {
        return Err(StrategyError::Precondition("needs the complete board and bias it was built for".into()));
    }
    Ok(())
}

#[derive(Debug)]
enum HamStage {
    One,
    Two,
    Three,
    Four,
    Five,
    Finished(Vec<Vertex>),
}

/// Biased Hamilton cycle strategy.
pub struct BiasedHam {
    n: usize,
    b: u32,
    consts: BiasedConstants,
    probes: ProbeLevel,
    log: CheckLog,
    growth: Growth,
    rem: Option<Remainder>,
    h: Vec<Vertex>,
    x_tilde: Vertex,
    x: Vertex,
    paths: Vec<Vec<Vertex>>,
    stage: HamStage,
}

impl BiasedHam {
    pub fn new(n: usize, b: u32, consts: BiasedConstants, probes: ProbeLevel) -> Result<Self, StrategyError> {
        consts.check(n, b)?;
        let target = n - consts.remainder(b);
        Ok(BiasedHam {
            n,
            b,
            consts,
            probes,
            log: CheckLog::new(),
            growth: Growth::new(n, b, target, false),
            rem: None,
            h: Vec::new(),
            x_tilde: 0,
            x: 0,
            paths: Vec::new(),
            stage: HamStage::One,
        })
    }

    pub fn remainder_kind(&self) -> Option<RemainderKind> {
        self.rem.as_ref().map(|r| r.kind)
    }

    /// Real rounds spent on the remainder cycle.
    pub fn stage_two_rounds(&self) -> usize {
        self.rem.as_ref().map_or(0, |r| r.rounds)
    }

    /// Rotation endpoints `v_0, v_1, ...` found so far.
    pub fn endpoints(&self) -> Vec<Vertex> {
        self.paths.iter().map(|p| *p.last().unwrap()).collect()
    }

    fn path_degree(&self, game: &GameState, v: Vertex, in_path: &[bool]) -> usize {
        game.client_neighbors(v)
            .iter()
            .chain(game.waiter_neighbors(v))
            .filter(|&&y| in_path[y as usize])
            .count()
    }

    fn probe_obs(&mut self, game: &GameState) {
        if !self.probes.any() {
            return;
        }
        let in_path = self.growth.in_p.clone();
        let limit = self.consts.delta0 * self.n as f64;
        let bad: Vec<String> = (0..self.n as Vertex)
            .map(|v| (v, self.path_degree(game, v, &in_path)))
            .filter(|&(_, d)| d as f64 >= limit)
            .map(|(v, d)| format!("d(v{v}, P_0) = {d}"))
            .collect();
        self.log.record_all("biased.obs-degree", game.round(), bad);
    }

    fn rotation_sets(&self, game: &GameState) -> (Vec<bool>, [usize; 3], Vec<Vertex>) {
        let p = self.paths.last().unwrap();
        let v = *p.last().unwrap();
        let mut pos = vec![usize::MAX; self.n];
        for (i, &y) in p.iter().enumerate() {
            pos[y as usize] = i;
        }
        let ends = self.endpoints();
        let mut blocked = vec![false; self.n];
        let mut sizes = [0; 3];
        let mut cands = Vec::new();
        for (i, &y) in p.iter().enumerate() {
            if y == v {
                continue;
            }
            let plus = p[i + 1];
            let b1 = game.is_claimed(plus, self.x);
            let b2 = ends.contains(&plus);
            let b3 = game.is_claimed(y, v);
            sizes[0] += b1 as usize;
            sizes[1] += b2 as usize;
            sizes[2] += b3 as usize;
            blocked[y as usize] = b1 || b2 || b3;
            if !blocked[y as usize] {
                cands.push(y);
            }
        }
        (blocked, sizes, cands)
    }

    fn probe_rotation(&mut self, game: &GameState) {
        if !self.probes.per_round() {
            return;
        }
        let i = self.paths.len() - 1;
        let round = game.round();
        let p = self.paths.last().unwrap().clone();
        let v = *p.last().unwrap();
        let ends = self.endpoints();
        let mut sorted = p.clone();
        sorted.sort_unstable();
        let mut base = self.paths[0].clone();
        base.sort_unstable();
        self.log.record("biased.p1", round, sorted == base, || "path vertex set changed".into());
        let fresh = !ends[..i].contains(&v);
        self.log.record("biased.p2", round, p[0] == 0 && fresh, || format!("endpoint {v} repeats"));
        let free = game.is_free_pair(v, self.x);
        self.log.record("biased.p3", round, free, || format!("edge {v}-{} is claimed", self.x));
        let limit = self.consts.delta0 * self.n as f64 + i as f64;
        let in_path = self.growth.in_p.clone();
        let bad: Vec<String> = p
            .iter()
            .copied()
            .filter(|y| !ends[..i].contains(y))
            .map(|y| (y, self.path_degree(game, y, &in_path)))
            .filter(|&(_, d)| d as f64 >= limit)
            .map(|(y, d)| format!("d(v{y}, P_{i}) = {d}"))
            .collect();
        self.log.record_all("biased.q1", round, bad);
    }
}

impl WaiterStrategy for BiasedHam {
    fn name(&self) -> &'static str {
        "ham-biased"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        check_board(game, self.n, self.b)?;
        loop {
            match self.stage {
                HamStage::One => {
                    if self.growth.done() {
                        self.rem = Some(start_remainder(game, &self.growth, self.b, self.probes, &mut self.log)?);
                        self.stage = HamStage::Two;
                        continue;
                    }
                    let offer = self.growth.step(game, &mut self.log, self.probes)?.expect("no faked steps");
                    return Ok(Move::Offer(offer));
                }
                HamStage::Two => {
                    let rem = self.rem.as_mut().unwrap();
                    match step_remainder(rem, &mut self.log)? {
                        Ok(mv) => return Ok(mv),
                        Err(cycle) => {
                            let budget = self.consts.c * self.b as f64;
                            let rounds = rem.rounds;
                            if self.probes.any() {
                                self.log.record("biased.stage2-budget", game.round(), rounds as f64 <= budget, || {
                                    format!("{rounds} remainder rounds exceed C b = {budget}")
                                });
                            }
                            self.h = cycle;
                            self.stage = HamStage::Three;
                        }
                    }
                }
                HamStage::Three => {
                    let xs: Vec<Vertex> = {
                        let mut r = self.h.clone();
                        r.sort_unstable();
                        r.into_iter().filter(|&x| game.is_free_pair(0, x)).take(self.b as usize + 1).collect()
                    };
                    if xs.len() < self.b as usize + 1 {
                        return Err(forfeit("biased stage III", "too few free edges from a_1 into the cycle"));
                    }
                    return Ok(Move::Offer(Offer::new(xs.into_iter().map(|x| Edge::new(0, x)).collect())));
                }
                HamStage::Four => {
                    if self.paths.len() == self.b as usize + 1 {
                        self.stage = HamStage::Five;
                        continue;
                    }
                    let (_, sizes, cands) = self.rotation_sets(game);
                    if self.probes.per_round() {
                        let i = self.paths.len();
                        let d0n = self.consts.delta0 * self.n as f64;
                        let ok = (sizes[0] as f64) < d0n && sizes[1] <= i && (sizes[2] as f64) < d0n + i as f64;
                        self.log.record("biased.b-sets", game.round(), ok, || format!("|B1|, |B2|, |B3| = {sizes:?}"));
                    }
                    let want = self.b as usize + 1;
                    if cands.len() < want {
                        return Err(forfeit("biased stage IV", "candidate set outside B_1, B_2, B_3 is too small"));
                    }
                    let v = *self.paths.last().unwrap().last().unwrap();
                    return Ok(Move::Offer(Offer::new(cands[..want].iter().map(|&y| Edge::new(y, v)).collect())));
                }
                HamStage::Five => {
                    let ends = self.endpoints();
                    if let Some(&v) = ends.iter().find(|&&v| !game.is_free_pair(v, self.x)) {
                        return Err(forfeit("biased stage V", format!("edge {v}-{} is claimed", self.x)));
                    }
                    return Ok(Move::Offer(Offer::new(ends.into_iter().map(|v| Edge::new(v, self.x)).collect())));
                }
                HamStage::Finished(ref order) => {
                    return Ok(Move::Done(Certificate::HamiltonCycle { order: order.clone() }));
                }
            }
        }
    }

    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        let chosen = offer.edges[pick];
        match self.stage {
            HamStage::One => {
                self.growth.on_pick(game, offer, pick, &mut self.log, self.probes);
            }
            HamStage::Two => {
                let rem = self.rem.as_mut().unwrap();
                rem.rounds += 1;
                rem.sub.on_pick(pick)?;
            }
            HamStage::Three => {
                self.x_tilde = chosen.other(0).unwrap();
                let k = self.h.len();
                let i = self.h.iter().position(|&y| y == self.x_tilde).unwrap();
                let (prev, next) = (self.h[(i + k - 1) % k], self.h[(i + 1) % k]);
                self.x = prev.min(next);
                self.paths.push(self.growth.path.clone());
                self.probe_obs(game);
                let v0 = *self.growth.path.last().unwrap();
                if self.probes.any() {
                    let free = game.is_free_pair(v0, self.x);
                    self.log.record("biased.v0-free", game.round(), free, || format!("edge {v0}-{} is claimed", self.x));
                }
                self.stage = HamStage::Four;
            }
            HamStage::Four => {
                let p = self.paths.last().unwrap();
                let v = *p.last().unwrap();
                let y = chosen.other(v).unwrap();
                let i = p.iter().position(|&z| z == y).unwrap();
                let mut next = p.clone();
                next[i + 1..].reverse();
                self.paths.push(next);
                self.probe_rotation(game);
            }
            HamStage::Five => {
                let vj = chosen.other(self.x).unwrap();
                let path = self.paths.iter().find(|p| *p.last().unwrap() == vj).unwrap();
                let k = self.h.len();
                let ix = self.h.iter().position(|&y| y == self.x).unwrap();
                let step = if self.h[(ix + 1) % k] == self.x_tilde { k - 1 } else { 1 };
                let mut order = path.clone();
                order.extend((0..k).map(|t| self.h[(ix + t * step) % k]));
                self.stage = HamStage::Finished(order);
            }
            HamStage::Finished(_) => return Err(StrategyError::Finished),
        }
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        let mut log = self.log.clone();
        if let (Some(rem), HamStage::Two) = (&self.rem, &self.stage) {
            log.merge(&rem.sub.inner().checks());
        }
        log
    }

    fn notes(&self) -> Vec<String> {
        match self.remainder_kind() {
            Some(RemainderKind::Heuristic) => vec!["remainder cycle forced by a heuristic subroutine".into()],
            _ => Vec::new(),
        }
    }
}

/// Biased perfect matching: Stage I with every second move faked, then the
/// remainder cycle.
pub struct BiasedPm {
    n: usize,
    b: u32,
    consts: BiasedConstants,
    probes: ProbeLevel,
    log: CheckLog,
    growth: Growth,
    rem: Option<Remainder>,
    stage_one_real: usize,
    stage_one_fake: usize,
    done: Option<Certificate>,
}

impl BiasedPm {
    pub fn new(n: usize, b: u32, consts: BiasedConstants, probes: ProbeLevel) -> Result<Self, StrategyError> {
        if n % 2 == 1 {
            return Err(StrategyError::Precondition(format!("n = {n} is odd")));
        }
        consts.check(n, b)?;
        if consts.remainder(b) % 2 == 1 {
            return Err(StrategyError::Precondition("remainder size C_0 b is odd".into()));
        }
        let target = n - consts.remainder(b);
        Ok(BiasedPm {
            n,
            b,
            consts,
            probes,
            log: CheckLog::new(),
            growth: Growth::new(n, b, target, true),
            rem: None,
            stage_one_real: 0,
            stage_one_fake: 0,
            done: None,
        })
    }

    pub fn stage_one_rounds(&self) -> (usize, usize) {
        (self.stage_one_real, self.stage_one_fake)
    }

    pub fn remainder_size(&self) -> Option<usize> {
        self.rem.as_ref().map(|r| r.hosts.len())
    }

    pub fn remainder_kind(&self) -> Option<RemainderKind> {
        self.rem.as_ref().map(|r| r.kind)
    }
}

impl WaiterStrategy for BiasedPm {
    fn name(&self) -> &'static str {
        "pm-biased"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        check_board(game, self.n, self.b)?;
        if let Some(c) = &self.done {
            return Ok(Move::Done(c.clone()));
        }
        if !self.growth.done() {
            return match self.growth.step(game, &mut self.log, self.probes)? {
                Some(offer) => Ok(Move::Offer(offer)),
                None => {
                    self.stage_one_fake += 1;
                    Ok(Move::Fake)
                }
            };
        }
        if self.rem.is_none() {
            self.rem = Some(start_remainder(game, &self.growth, self.b, self.probes, &mut self.log)?);
        }
        let rem = self.rem.as_mut().unwrap();
        match step_remainder(rem, &mut self.log)? {
            Ok(mv) => Ok(mv),
            Err(cycle) => {
                let budget = self.consts.c * self.b as f64;
                let rounds = rem.rounds;
                if self.probes.any() {
                    self.log.record("biased.stage2-budget", game.round(), rounds as f64 <= budget, || {
                        format!("{rounds} remainder rounds exceed C b = {budget}")
                    });
                }
                let path = &self.growth.path;
                let mut edges: Vec<Edge> = path.chunks(2).map(|c| Edge::new(c[0], c[1])).collect();
                edges.extend(cycle.chunks(2).map(|c| Edge::new(c[0], c[1])));
                edges.sort_unstable();
                let cert = Certificate::Matching { edges };
                self.done = Some(cert.clone());
                Ok(Move::Done(cert))
            }
        }
    }

    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        if !self.growth.done() {
            self.stage_one_real += 1;
            self.growth.on_pick(game, offer, pick, &mut self.log, self.probes);
        } else {
            let rem = self.rem.as_mut().ok_or(StrategyError::Finished)?;
            rem.rounds += 1;
            rem.sub.on_pick(pick)?;
        }
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        let mut log = self.log.clone();
        if let (Some(rem), None) = (&self.rem, &self.done) {
            log.merge(&rem.sub.inner().checks());
        }
        log
    }

    fn notes(&self) -> Vec<String> {
        match self.remainder_kind() {
            Some(RemainderKind::Heuristic) => vec!["remainder cycle forced by a heuristic subroutine".into()],
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::UniformRandom;
    use crate::engine::play;

    #[test]
    fn external_constants_follow_the_formulas() {
        let k = BiasedConstants::from_external(0.01, 1);
        assert_eq!(k.c0, 10_000);
        assert!((k.delta0 - 0.001).abs() < 1e-12);
        assert!((k.delta - 1e-6).abs() < 1e-15);
        assert!((k.c - 1e10).abs() < 1.0);
    }

    #[test]
    fn rotation_cycle_on_small_boards() {
        for b in [2u32, 3] {
            for seed in 0..10 {
                let m = 20 * b as usize;
                let mut g = GameState::new(BoardSpec::complete(m, b)).unwrap();
                let mut s = RotationCycle::new(m);
                play(&mut g, &mut s, &mut UniformRandom::new(seed), 10 * m).unwrap();
            }
        }
    }

    #[test]
    fn ham_biased_desk() {
        let mut g = GameState::new(BoardSpec::complete(600, 2)).unwrap();
        let mut s = BiasedHam::new(600, 2, BiasedConstants::desk(), ProbeLevel::PerRound).unwrap();
        play(&mut g, &mut s, &mut UniformRandom::new(1), 5000).unwrap();
        assert!(s.checks().is_clean(), "{:?}", s.checks().summaries());
        assert!(g.real_rounds() as f64 <= BiasedConstants::desk().ham_cap(600, 2));
    }

    #[test]
    fn pm_biased_desk() {
        let mut g = GameState::new(BoardSpec::complete(600, 3)).unwrap();
        let mut s = BiasedPm::new(600, 3, BiasedConstants::desk(), ProbeLevel::PerRound).unwrap();
        play(&mut g, &mut s, &mut UniformRandom::new(1), 5000).unwrap();
        assert!(s.checks().is_clean(), "{:?}", s.checks().summaries());
        assert_eq!(s.remainder_size(), Some(60));
        let (real, fake) = s.stage_one_rounds();
        assert_eq!(fake + 1, real);
    }

    #[test]
    fn unbiased_remainder_uses_hamilton_strategy() {
        let mut g = GameState::new(BoardSpec::complete(400, 1)).unwrap();
        let mut s = BiasedHam::new(400, 1, BiasedConstants::desk(), ProbeLevel::PerRound).unwrap();
        play(&mut g, &mut s, &mut UniformRandom::new(3), 2000).unwrap();
        assert_eq!(s.remainder_kind(), Some(RemainderKind::Unbiased));
        assert!(s.checks().is_clean(), "{:?}", s.checks().summaries());
    }
}
