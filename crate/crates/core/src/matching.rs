//! Perfect matching strategies for the unbiased game: the bipartite strategy
//! on `K_{n,n}` minus a forbidden set, and its use on `K_n`.

use crate::certificate::Certificate;
use crate::game::{BoardKind, BoardSpec, GameState, Offer};
use crate::graph::{Edge, Vertex};
use crate::strategy::{forfeit, CheckLog, Move, ProbeLevel, StrategyError, SubGame, SubMove, WaiterStrategy};

/// Smallest side length the bipartite strategy accepts.
pub const MIN_SIDE: usize = 4;

/// `e_{W∪H}(R)` for a bipartite board with side `n`, where `in_r` marks `R`.
pub fn blocked_inside(game: &GameState, in_r: &[bool]) -> usize {
    let n = game.board().n;
    (0..n as Vertex)
        .filter(|&u| in_r[u as usize])
        .map(|u| blocked_degree(game, u, in_r))
        .sum()
}

/// `d_{W∪H}(u, B∩R)`.
fn blocked_degree(game: &GameState, u: Vertex, in_r: &[bool]) -> usize {
    game.waiter_neighbors(u)
        .iter()
        .chain(game.forbidden_neighbors(u))
        .filter(|&&b| in_r[b as usize])
        .count()
}

/// The potential inequality `e_{W∪H}(R) <= max{0, (|R| - n)/2}`.
pub fn eqpm_holds(game: &GameState, in_r: &[bool]) -> bool {
    let n = game.board().n;
    let r = in_r.iter().filter(|&&x| x).count();
    2 * blocked_inside(game, in_r) <= r.saturating_sub(n)
}

#[derive(Clone, Debug)]
enum Stage {
    One,
    Two { step: usize, s: [Vertex; 4], t: [Vertex; 4] },
    Finished,
}

/// Waiter strategy forcing a perfect matching of `K_{n,n} - H` in `n + 1` rounds.
pub struct PmBipartite {
    n: usize,
    probes: ProbeLevel,
    log: CheckLog,
    in_r: Vec<bool>,
    stage_one_rounds: usize,
    matching: Vec<Edge>,
    stage: Stage,
}

impl PmBipartite {
    pub fn new(board: &BoardSpec, probes: ProbeLevel) -> Result<Self, StrategyError> {
        if board.kind != BoardKind::Bipartite || board.bias != 1 {
            return Err(StrategyError::Precondition("needs an unbiased bipartite board".into()));
        }
        let n = board.n;
        if n < MIN_SIDE {
            return Err(StrategyError::Precondition(format!("side {n} is below {MIN_SIDE}")));
        }
        if 2 * board.forbidden.len() > n {
            return Err(StrategyError::Precondition(format!(
                "{} forbidden edges exceed n/2",
                board.forbidden.len()
            )));
        }
        Ok(PmBipartite {
            n,
            probes,
            log: CheckLog::new(),
            in_r: vec![true; 2 * n],
            stage_one_rounds: 0,
            matching: Vec::new(),
            stage: Stage::One,
        })
    }

    pub fn remaining(&self) -> &[bool] {
        &self.in_r
    }

    fn probe_eq(&mut self, game: &GameState) {
        if self.probes.any() {
            let ok = eqpm_holds(game, &self.in_r);
            let r = self.in_r.iter().filter(|&&x| x).count();
            self.log.record("pm.eq1", game.round(), ok, || {
                format!("e(W+H, R) = {} with |R| = {r}", blocked_inside(game, &self.in_r))
            });
        }
    }

    fn enter_stage_two(&mut self, game: &GameState) -> Result<(), StrategyError> {
        let n = self.n as Vertex;
        let s: Vec<Vertex> = (0..n).filter(|&v| self.in_r[v as usize]).collect();
        let t: Vec<Vertex> = (n..2 * n).filter(|&v| self.in_r[v as usize]).collect();
        if s.len() != 4 || t.len() != 4 {
            return Err(forfeit("matching stage II", "leftover sides are not quadruples"));
        }
        if self.probes.any() {
            let clean = s.iter().all(|&a| t.iter().all(|&b| game.is_free_pair(a, b)));
            self.log.record("pm.stage2-clean", game.round(), clean, || "S x T contains a claimed edge".into());
        }
        self.stage = Stage::Two { step: 0, s: [s[0], s[1], s[2], s[3]], t: [t[0], t[1], t[2], t[3]] };
        Ok(())
    }
}

impl WaiterStrategy for PmBipartite {
    fn name(&self) -> &'static str {
        "pm-bipartite"
    }

    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        if game.round() == 0 {
            self.probe_eq(game);
        }
        if matches!(self.stage, Stage::One) && self.stage_one_rounds == self.n - 4 {
            self.enter_stage_two(game)?;
        }
        match self.stage {
            Stage::One => {
                let n = self.n as Vertex;
                let mut best: Option<(Vertex, usize)> = None;
                for u in (0..n).filter(|&u| self.in_r[u as usize]) {
                    let d = blocked_degree(game, u, &self.in_r);
                    if best.map_or(true, |(_, bd)| d > bd) {
                        best = Some((u, d));
                    }
                }
                let (u, d) = best.ok_or_else(|| forfeit("matching stage I", "A ∩ R is empty"))?;
                let free: Vec<Vertex> = (n..2 * n)
                    .filter(|&b| self.in_r[b as usize] && game.is_free_pair(u, b))
                    .take(2)
                    .collect();
                if self.probes.per_round() {
                    let r = self.in_r.iter().filter(|&&x| x).count();
                    let side = r / 2;
                    let avail = side.saturating_sub(d);
                    let ok = avail >= (r / 2).min(self.n / 2) && (r / 2).min(self.n / 2) >= 2;
                    self.log.record("pm.availability", game.round(), ok, || {
                        format!("|B∩R| - d = {avail} with |R| = {r}")
                    });
                }
                if free.len() < 2 {
                    return Err(forfeit("matching stage I", format!("vertex {u} lacks two free edges into R")));
                }
                Ok(Move::Offer(Offer::pair(Edge::new(u, free[0]), Edge::new(u, free[1]))))
            }
            Stage::Two { step, s, t } => {
                let e = |a: Vertex, b: Vertex| Edge::new(a, b);
                let offer = match step {
                    0 => Offer::pair(e(s[0], t[0]), e(s[0], t[1])),
                    1 => Offer::pair(e(s[0], t[2]), e(s[0], t[3])),
                    2 => Offer::pair(e(s[1], t[2]), e(s[1], t[3])),
                    3 => Offer::pair(e(s[2], t[3]), e(s[3], t[3])),
                    4 => Offer::pair(e(s[3], t[0]), e(s[3], t[1])),
                    _ => unreachable!(),
                };
                Ok(Move::Offer(offer))
            }
            Stage::Finished => {
                let mut edges = self.matching.clone();
                edges.sort_unstable();
                Ok(Move::Done(Certificate::Matching { edges }))
            }
        }
    }

    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        let chosen = offer.edges[pick];
        match &mut self.stage {
            Stage::One => {
                self.in_r[chosen.lo() as usize] = false;
                self.in_r[chosen.hi() as usize] = false;
                self.matching.push(chosen);
                self.stage_one_rounds += 1;
                if self.probes.per_round() || self.stage_one_rounds == self.n - 4 {
                    self.probe_eq(game);
                }
            }
            Stage::Two { step, s, t } => {
                match *step {
                    0 => {
                        if pick == 1 {
                            t.swap(0, 1);
                        }
                    }
                    1 => {
                        let (kept, other) = if pick == 0 { (t[2], t[3]) } else { (t[3], t[2]) };
                        *t = [t[0], kept, t[1], other];
                    }
                    2 => {
                        if pick == 1 {
                            t.swap(2, 3);
                        }
                    }
                    3 => {
                        if pick == 1 {
                            s.swap(2, 3);
                        }
                    }
                    4 => {
                        let tail = if pick == 0 {
                            [(s[3], t[0]), (s[0], t[1])]
                        } else {
                            [(s[3], t[1]), (s[0], t[0])]
                        };
                        for (a, b) in [tail[0], tail[1], (s[1], t[2]), (s[2], t[3])] {
                            self.matching.push(Edge::new(a, b));
                        }
                        self.stage = Stage::Finished;
                        return Ok(());
                    }
                    _ => unreachable!(),
                }
                *step += 1;
            }
            Stage::Finished => return Err(StrategyError::Finished),
        }
        Ok(())
    }

    fn checks(&self) -> CheckLog {
        self.log.clone()
    }
}

/// Perfect matching on `K_n`: plays the bipartite strategy between the first
/// `n/2` vertices and the rest.
pub struct PmComplete {
    sub: SubGame<PmBipartite>,
}

impl PmComplete {
    pub fn new(board: &BoardSpec, probes: ProbeLevel) -> Result<Self, StrategyError> {
        if board.kind != BoardKind::Complete || board.bias != 1 {
            return Err(StrategyError::Precondition("needs an unbiased complete board".into()));
        }
        if board.n % 2 == 1 {
            return Err(StrategyError::Precondition(format!("n = {} is odd", board.n)));
        }
        let local_board = BoardSpec::bipartite(board.n / 2, 1);
        let inner = PmBipartite::new(&local_board, probes)?;
        let local = GameState::new(local_board)?;
        let map = (0..board.n as Vertex).map(Some).collect();
        Ok(PmComplete { sub: SubGame::new(local, map, inner) })
    }
}

impl WaiterStrategy for PmComplete {
    fn name(&self) -> &'static str {
        "pm-complete"
    }

    fn next_offer(&mut self, _game: &GameState) -> Result<Move, StrategyError> {
        Ok(match self.sub.next_offer()? {
            SubMove::Offer(o) => Move::Offer(o),
            SubMove::Fake => Move::Fake,
            SubMove::Done(c) => Move::Done(self.sub.to_host_certificate(&c)),
        })
    }

    fn on_pick(&mut self, _game: &GameState, _offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        self.sub.on_pick(pick)
    }

    fn checks(&self) -> CheckLog {
        self.sub.inner().checks()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::UniformRandom;
    use crate::engine::play;

    #[test]
    fn first_offer_on_empty_board() {
        let board = BoardSpec::bipartite(10, 1);
        let game = GameState::new(board.clone()).unwrap();
        let mut s = PmBipartite::new(&board, ProbeLevel::PerRound).unwrap();
        match s.next_offer(&game).unwrap() {
            Move::Offer(o) => assert_eq!(o.edges, vec![Edge::new(0, 10), Edge::new(0, 11)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn planted_violation_detected() {
        let mut game = GameState::new(BoardSpec::bipartite(4, 1)).unwrap();
        let all = vec![true; 8];
        assert!(eqpm_holds(&game, &all));
        for (a, b, c) in [(0, 4, 5), (1, 6, 7), (2, 4, 5)] {
            game.apply_round(&Offer::pair(Edge::new(a, b), Edge::new(a, c)), 0).unwrap();
        }
        assert_eq!(blocked_inside(&game, &all), 3);
        assert!(!eqpm_holds(&game, &all));
    }

    #[test]
    fn complete_board_wins_quickly() {
        for seed in 0..20 {
            let board = BoardSpec::complete(24, 1);
            let mut game = GameState::new(board.clone()).unwrap();
            let mut s = PmComplete::new(&board, ProbeLevel::PerRound).unwrap();
            let cert = play(&mut game, &mut s, &mut UniformRandom::new(seed), 100).unwrap();
            assert!(matches!(cert, Certificate::Matching { .. }));
            assert_eq!(game.real_rounds(), 13);
            assert!(s.checks().is_clean());
        }
    }

    #[test]
    fn odd_n_rejected() {
        assert!(PmComplete::new(&BoardSpec::complete(25, 1), ProbeLevel::Off).is_err());
    }
}
