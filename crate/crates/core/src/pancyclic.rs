//! Forcing a spanning pancyclic graph in the unbiased game.
//!
//! The strategy first forces a Hamilton cycle with [`HamStrategy`], relabels
//! it as `w_1..w_n` so that a long head segment spans no claimed chord, and
//! then claims a chord ladder on the head, a chain of doubling chords along
//! the rest of the cycle and (on very large boards) a few extra chords at
//! `w_1`. Every cycle length is witnessed by an explicit vertex sequence.

use crate::certificate::Certificate;
use crate::game::{BoardKind, GameState, Offer};
use crate::graph::{Edge, Vertex};
use crate::hamilton::HamStrategy;
use crate::strategy::{forfeit, CheckLog, Move, ProbeLevel, StrategyError, WaiterStrategy};
use std::collections::BTreeMap;

pub const MIN_N: usize = 512;

/// `log_2` iterated `t` times, in floating point.
pub fn log2_iter(n: usize, t: usize) -> f64 {
    let mut x = n as f64;
    for _ in 0..t {
        x = x.log2();
    }
    x
}

fn guarded_ceil(x: f64) -> usize {
    (x - x.abs() * f64::EPSILON).ceil().max(0.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Depth {
    pub k: usize,
    pub g: usize,
    pub f: usize,
}

/// `k` is the least `t` with `log_2^{(t)} n < 2`; `g = ceil(log_2^{(k)} n)`, `f = g + 100`.
pub fn choose_depth(n: usize) -> Depth {
    let mut k = 0;
    while log2_iter(n, k) >= 2.0 {
        k += 1;
    }
    let g = guarded_ceil(log2_iter(n, k));
    Depth { k, g, f: g + 100 }
}

/// Round budget `n + log_2 n + f + k`, rounded down.
pub fn round_budget(n: usize) -> usize {
    let d = choose_depth(n);
    n + (n as f64).log2().floor() as usize + d.f + d.k
}

/// Writes `x = t + sum_{i in S} gaps[i-1]` with `0 <= t <= f-1`, taking the
/// largest gaps first. Returns `S` as ascending 1-based indices.
pub fn decompose_length(x: usize, f: usize, gaps: &[usize]) -> Option<(usize, Vec<usize>)> {
    let total: usize = gaps.iter().sum::<usize>() + f - 1;
    if x > total || f == 0 {
        return None;
    }
    let mut prefix: Vec<usize> = Vec::with_capacity(gaps.len() + 1);
    prefix.push(0);
    for &a in gaps {
        prefix.push(prefix.last().unwrap() + a);
    }
    let mut rem = x;
    let mut set = Vec::new();
    for j in (1..=gaps.len()).rev() {
        if rem > prefix[j - 1] + f - 1 {
            rem = rem.checked_sub(gaps[j - 1])?;
            set.push(j);
        }
    }
    if rem > f - 1 {
        return None;
    }
    set.reverse();
    Some((rem, set))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Hamilton,
    SplitChord,
    ArcChord,
    Ladder(usize),
    Doubling,
    Extra(usize),
    Finished,
}

/// Waiter's pancyclicity strategy on `K_n`.
pub struct PancyclicStrategy {
    n: usize,
    depth: Depth,
    probes: ProbeLevel,
    log: CheckLog,
    ham: HamStrategy,
    stage: Stage,
    /// Cycle orientation chosen for the head window: `v_j = cycle[(start + dir*(j-1)) mod n]`.
    cycle: Vec<Vertex>,
    start: usize,
    dir: isize,
    /// `w[i]` is `w_{i+1}`.
    w: Vec<Vertex>,
    pos: Vec<usize>,
    p: usize,
    ladder: Vec<usize>,
    t: Vec<usize>,
    /// Per extra move `m >= 1`: the index of the claimed chord `w_1 w_{k_m}`, if any.
    extra: Vec<Option<usize>>,
    pending: Vec<usize>,
    certificate: Option<Certificate>,
}

impl PancyclicStrategy {
    pub fn new(n: usize, probes: ProbeLevel) -> Result<Self, StrategyError> {
        if n < MIN_N {
            return Err(StrategyError::Precondition(format!("n = {n} is below {MIN_N}")));
        }
        Ok(PancyclicStrategy {
            n,
            depth: choose_depth(n),
            probes,
            log: CheckLog::new(),
            ham: HamStrategy::new(n, probes)?,
            stage: Stage::Hamilton,
            cycle: Vec::new(),
            start: 0,
            dir: 1,
            w: Vec::new(),
            pos: Vec::new(),
            p: 0,
            ladder: Vec::new(),
            t: Vec::new(),
            extra: Vec::new(),
            pending: Vec::new(),
            certificate: None,
        })
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    /// The doubling sequence `t_0 < t_1 < ... < t_s`.
    pub fn doubling_indices(&self) -> &[usize] {
        &self.t
    }

    pub fn arc_offset(&self) -> usize {
        self.p
    }

    /// Number of doubling rounds played.
    pub fn doubling_rounds(&self) -> usize {
        self.t.len().saturating_sub(1)
    }

    fn v(&self, j: usize) -> Vertex {
        let n = self.n as isize;
        let idx = (self.start as isize + self.dir * (j as isize - 1)).rem_euclid(n);
        self.cycle[idx as usize]
    }

    /// `w_i` for 1-based `i`.
    fn wv(&self, i: usize) -> Vertex {
        self.w[i - 1]
    }

    fn choose_window(&mut self, game: &GameState) -> Result<(), StrategyError> {
        let n = self.n;
        let len = self.depth.f + 2;
        let mut at = vec![0usize; n];
        for (i, &v) in self.cycle.iter().enumerate() {
            at[v as usize] = i;
        }
        let mut chords: Vec<(usize, usize)> = Vec::new();
        for u in 0..n as Vertex {
            for &x in game.client_neighbors(u).iter().chain(game.waiter_neighbors(u)) {
                if u < x {
                    let (a, b) = (at[u as usize], at[x as usize]);
                    let gap = a.abs_diff(b);
                    if gap != 1 && gap != n - 1 {
                        chords.push((a, b));
                    }
                }
            }
        }
        let mut path_of = vec![usize::MAX; n];
        for (i, p) in self.ham.stage_one_paths().iter().enumerate() {
            for &v in p {
                path_of[v as usize] = i;
            }
        }
        let offset = |start: usize, dir: isize, pos: usize| -> usize {
            if dir > 0 {
                (pos + n - start) % n
            } else {
                (start + n - pos) % n
            }
        };
        let clean = |start: usize, dir: isize| -> bool {
            chords.iter().all(|&(a, b)| {
                let (da, db) = (offset(start, dir, a), offset(start, dir, b));
                !(da < len && db < len)
            })
        };
        let in_one_path = |start: usize, dir: isize| -> bool {
            let first = path_of[self.cycle[start] as usize];
            first != usize::MAX
                && (0..len).all(|j| {
                    let idx = (start as isize + dir * j as isize).rem_euclid(n as isize) as usize;
                    path_of[self.cycle[idx] as usize] == first
                })
        };
        for strict in [true, false] {
            for start in 0..n {
                for dir in [1isize, -1] {
                    if (!strict || in_one_path(start, dir)) && clean(start, dir) {
                        self.start = start;
                        self.dir = dir;
                        self.log.record("pan.head-window", game.round(), true, String::new);
                        return Ok(());
                    }
                }
            }
        }
        Err(forfeit("pancyclic relabelling", format!("no clean window of {len} cycle vertices")))
    }

    fn fix_labels(&mut self, shift: usize) {
        let w: Vec<Vertex> = (1..=self.n).map(|i| self.v(i + shift)).collect();
        let mut pos = vec![0; self.n];
        for (i, &x) in w.iter().enumerate() {
            pos[x as usize] = i + 1;
        }
        self.w = w;
        self.pos = pos;
    }

    fn doubling_window(&self) -> (usize, usize) {
        let i = self.t.len();
        let prev = *self.t.last().unwrap();
        let top = (2 * prev).saturating_sub(2 * i).min(self.n);
        (top.saturating_sub(20), top)
    }

    fn probe_doubling(&mut self, game: &GameState) {
        if !self.probes.per_round() {
            return;
        }
        let n = self.n;
        let t = &self.t;
        let i = t.len() - 1;
        let order = t[0] == self.depth.f + 1 && t.windows(2).all(|p| p[0] < p[1]) && t[i] <= n;
        let edges = t.windows(2).all(|p| game.is_client(self.wv(p[0]), self.wv(p[1])));
        let top = (2 * t[i - 1]).saturating_sub(2 * i).min(n);
        let distance = top.saturating_sub(20) <= t[i] && t[i] <= top;
        let round = game.round();
        self.log.record("pan.w1-order", round, order, || format!("t = {t:?}"));
        self.log.record("pan.w2-client-chords", round, edges, || format!("t = {t:?}"));
        self.log.record("pan.w3-distance", round, distance, || format!("t_{i} = {} outside [{}, {top}]", t[i], top.saturating_sub(20)));
        if t[i] < n - 20 {
            let bound = 2f64.powi(i as i32) + (i * i) as f64 + 50.0;
            self.log.record("pan.eq2-growth", round, t[i] as f64 > bound, || format!("t_{i} = {} <= {bound}", t[i]));
        }
    }

    fn two_free(&self, game: &GameState, from: Vertex, candidates: impl Iterator<Item = usize>) -> Vec<usize> {
        candidates.filter(|&j| game.is_free_pair(from, self.wv(j))).take(2).collect()
    }

    fn offer_to(&mut self, from: Vertex, js: Vec<usize>) -> Move {
        let offer = Offer::pair(Edge::new(from, self.wv(js[0])), Edge::new(from, self.wv(js[1])));
        self.pending = js;
        Move::Offer(offer)
    }

    fn next_extra(&mut self, game: &GameState, m: usize) -> Result<Move, StrategyError> {
        if m >= self.depth.k {
            self.finish(game)?;
            return Ok(Move::Done(self.certificate.clone().unwrap()));
        }
        let l = log2_iter(self.n, m);
        let w1 = self.wv(1);
        let fits = |tj: usize, ell: usize| {
            2.0 * l <= tj as f64 && tj <= ell && ell <= tj + 20 && (tj + 20) as f64 <= 10.0 * l
        };
        let owned = game
            .client_neighbors(w1)
            .iter()
            .map(|&u| self.pos[u as usize])
            .filter(|&ell| self.t.iter().any(|&tj| fits(tj, ell)))
            .min();
        if let Some(ell) = owned {
            self.extra.push(Some(ell));
            self.stage = Stage::Extra(m + 1);
            return Ok(Move::Fake);
        }
        let anchor = self
            .t
            .iter()
            .copied()
            .find(|&tj| 2.0 * l <= tj as f64 && tj as f64 <= 5.0 * l && (tj + 20) as f64 <= 10.0 * l);
        let Some(tj) = anchor else {
            self.extra.push(None);
            self.stage = Stage::Extra(m + 1);
            return Ok(Move::Fake);
        };
        let js = self.two_free(game, w1, (tj..=tj + 20).filter(|&j| j >= 3 && j < self.n));
        if js.len() < 2 {
            return Err(forfeit("pancyclic extra chords", format!("fewer than two free chords near t = {tj}")));
        }
        Ok(self.offer_to(w1, js))
    }

    /// Head path `P_1^t` from `w_1` to `w_{f+1}`, as 1-based indices.
    fn head_path(&self, t: usize) -> Vec<usize> {
        let f = self.depth.f;
        if t == 0 {
            (1..=f + 1).collect()
        } else if t == f - 1 {
            vec![1, f + 1]
        } else if self.ladder[t - 1] == 0 {
            std::iter::once(1).chain(t + 2..=f + 1).collect()
        } else {
            (1..=f - t).chain(std::iter::once(f + 1)).collect()
        }
    }

    fn build_family(&self) -> Result<BTreeMap<usize, Vec<Vertex>>, StrategyError> {
        let (n, f, p) = (self.n, self.depth.f, self.p);
        let mut family: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for t in 0..f {
            let head = self.head_path(t);
            if t <= f - 2 {
                family.entry(head.len()).or_insert_with(|| head.clone());
            }
            let mut c = head.clone();
            c.extend(n - p..=n);
            family.entry(c.len()).or_insert(c);
        }
        let gaps: Vec<usize> = self.t.windows(2).map(|q| q[1] - q[0] - 1).collect();
        let mut anchors = vec![n];
        anchors.extend(self.extra.iter().flatten().copied());
        for &km in &anchors {
            let Some(jm) = self.t.iter().rposition(|&tj| tj <= km && tj + 20 >= km) else {
                continue;
            };
            let reach = self.t[jm] - jm - 2;
            for len in km.saturating_sub(reach).max(3)..=km {
                if family.contains_key(&len) {
                    continue;
                }
                let (t, set) = decompose_length(km - len, f, &gaps[..jm])
                    .ok_or_else(|| forfeit("pancyclic certificates", format!("cannot decompose {}", km - len)))?;
                let mut c = self.head_path(t);
                for seg in 1..=jm {
                    if set.binary_search(&seg).is_ok() {
                        c.push(self.t[seg]);
                    } else {
                        c.extend(self.t[seg - 1] + 1..=self.t[seg]);
                    }
                }
                c.extend(self.t[jm] + 1..=km);
                family.insert(len, c);
            }
        }
        if let Some(gap) = (3..=n).find(|l| !family.contains_key(l)) {
            return Err(forfeit("pancyclic certificates", format!("no construction reaches length {gap}")));
        }
        Ok(family
            .into_iter()
            .filter(|(l, _)| (3..=n).contains(l))
            .map(|(l, c)| (l, c.into_iter().map(|i| self.wv(i)).collect()))
            .collect())
    }

    fn finish(&mut self, game: &GameState) -> Result<(), StrategyError> {
        if self.certificate.is_some() {
            return Ok(());
        }
        let cycles = self.build_family()?;
        if self.probes.any() {
            let budget = (self.n as f64).log2().ceil() as usize;
            let used = self.doubling_rounds();
            self.log.record("pan.doubling-budget", game.round(), used <= budget, || {
                format!("{used} doubling rounds exceed {budget}")
            });
        }
        self.certificate = Some(Certificate::PancyclicFamily { cycles });
        self.stage = Stage::Finished;
        Ok(())
    }
}

impl WaiterStrategy for PancyclicStrategy {
    fn name(&self) -> &'static str {
        "pancyclic"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if game.board().kind == BoardKind::Bipartite || game.vertex_count() != self.n || game.bias() != 1 {
            return Err(StrategyError::Precondition("needs an unbiased complete board of the configured size".into()));
        }
        let f = self.depth.f;
        match self.stage {
            Stage::Hamilton => match self.ham.next_offer(game)? {
                Move::Done(Certificate::HamiltonCycle { order }) => {
                    self.log.merge(&self.ham.checks());
                    if self.probes.any() {
                        let low = (0..self.n as Vertex).all(|v| game.d_w(v) < 10);
                        self.log.record("pan.h1-waiter-degree", game.round(), low, || "d_W >= 10".into());
                    }
                    self.cycle = order;
                    self.choose_window(game)?;
                    self.stage = Stage::SplitChord;
                    self.next_offer(game)
                }
                Move::Done(_) => Err(forfeit("pancyclic hamilton stage", "unexpected certificate")),
                other => Ok(other),
            },
            Stage::SplitChord => {
                let offer = Offer::pair(Edge::new(self.v(1), self.v(f + 1)), Edge::new(self.v(2), self.v(f + 2)));
                Ok(Move::Offer(offer))
            }
            Stage::ArcChord => {
                let n = self.n;
                let from = self.wv(f + 1);
                let js = self.two_free(game, from, n - 60..=n - 50);
                if js.len() < 2 {
                    return Err(forfeit("pancyclic arc chord", "fewer than two free chords into the tail"));
                }
                Ok(self.offer_to(from, js))
            }
            Stage::Ladder(i) => Ok(Move::Offer(Offer::pair(
                Edge::new(self.wv(1), self.wv(i + 2)),
                Edge::new(self.wv(f - i), self.wv(f + 1)),
            ))),
            Stage::Doubling => {
                let (lo, hi) = self.doubling_window();
                let prev = *self.t.last().unwrap();
                let from = self.wv(prev);
                let js = self.two_free(game, from, (lo.max(prev + 2)..=hi).rev());
                if js.len() < 2 {
                    return Err(forfeit("pancyclic doubling", format!("window [{lo}, {hi}] lacks two free chords")));
                }
                Ok(self.offer_to(from, js))
            }
            Stage::Extra(m) => self.next_extra(game, m),
            Stage::Finished => {
                self.finish(game)?;
                Ok(Move::Done(self.certificate.clone().unwrap()))
            }
        }
    }

    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        let f = self.depth.f;
        match self.stage {
            Stage::Hamilton => self.ham.on_pick(game, offer, pick)?,
            Stage::SplitChord => {
                self.fix_labels(pick);
                self.stage = Stage::ArcChord;
            }
            Stage::ArcChord => {
                self.p = self.n - self.pending[pick];
                if self.probes.any() {
                    let p = self.p;
                    self.log.record("pan.arc-offset", game.round(), 50 <= p && p < f, || format!("p = {p}"));
                }
                self.stage = Stage::Ladder(1);
                self.t = vec![f + 1];
            }
            Stage::Ladder(i) => {
                self.ladder.push(pick);
                self.stage = if i < f - 2 { Stage::Ladder(i + 1) } else { Stage::Doubling };
            }
            Stage::Doubling => {
                self.t.push(self.pending[pick]);
                self.probe_doubling(game);
                if *self.t.last().unwrap() >= self.n - 20 {
                    self.stage = Stage::Extra(1);
                }
            }
            Stage::Extra(m) => {
                self.extra.push(Some(self.pending[pick]));
                self.stage = Stage::Extra(m + 1);
            }
            Stage::Finished => return Err(StrategyError::Finished),
        }
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        let mut log = self.log.clone();
        if self.stage == Stage::Hamilton {
            log.merge(&self.ham.checks());
        }
        log
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_examples() {
        assert_eq!(choose_depth(1 << 16), Depth { k: 4, g: 1, f: 101 });
        assert_eq!(choose_depth(256).k, 3);
        assert_eq!(choose_depth(1024), Depth { k: 3, g: 2, f: 102 });
        assert_eq!(round_budget(1024), 1139);
        assert_eq!(choose_depth(4096), Depth { k: 3, g: 2, f: 102 });
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_length(7, 101, &[150, 300]), Some((7, vec![])));
        assert_eq!(decompose_length(400, 101, &[150, 300]), Some((100, vec![2])));
        assert_eq!(decompose_length(551, 101, &[150, 300]), None);
    }

    #[test]
    fn small_board_family_validates() {
        use crate::client::UniformRandom;
        use crate::engine::play;
        use crate::game::BoardSpec;
        for seed in 0..3 {
            let mut game = GameState::new(BoardSpec::complete(512, 1)).unwrap();
            let mut s = PancyclicStrategy::new(512, ProbeLevel::PerRound).unwrap();
            let cert = play(&mut game, &mut s, &mut UniformRandom::new(seed), 2000).unwrap();
            assert!(matches!(cert, Certificate::PancyclicFamily { .. }));
            assert!(game.round() <= round_budget(512), "{} rounds", game.round());
            assert!(s.checks().is_clean(), "{:?}", s.checks().summaries());
        }
    }
}
