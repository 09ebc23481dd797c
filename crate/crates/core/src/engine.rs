//! The play loop and exhaustive enumeration of Client replies.

use crate::certificate::{Certificate, Rejection};
use crate::client::{ClientPolicy, ScriptedClient};
use crate::game::{GameError, GameState};
use crate::strategy::{Move, StrategyError, WaiterStrategy};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlayError {
    #[error("strategy failed after {rounds} rounds: {source}")]
    Strategy { rounds: usize, source: StrategyError },
    #[error("illegal offer in round {round}: {source}")]
    IllegalOffer { round: usize, source: GameError },
    #[error("round limit {0} reached")]
    RoundLimit(usize),
    #[error("certificate rejected: {0}")]
    BadCertificate(Rejection),
    #[error("pretended round reached the real board")]
    PretendAtTop,
}

/// Plays until the strategy reports a certificate, which is then validated.
pub fn play(
    game: &mut GameState,
    waiter: &mut dyn WaiterStrategy,
    client: &mut dyn ClientPolicy,
    max_rounds: usize,
) -> Result<Certificate, PlayError> {
    loop {
        if game.round() > max_rounds {
            return Err(PlayError::RoundLimit(max_rounds));
        }
        let rounds = game.round();
        let mv = waiter.next_offer(game).map_err(|source| PlayError::Strategy { rounds, source })?;
        match mv {
            Move::Offer(offer) => {
                game.validate_offer(&offer)
                    .map_err(|source| PlayError::IllegalOffer { round: rounds + 1, source })?;
                let pick = client.choose(game, &offer);
                game.apply_round(&offer, pick)
                    .map_err(|source| PlayError::IllegalOffer { round: rounds + 1, source })?;
                waiter
                    .on_pick(game, &offer, pick)
                    .map_err(|source| PlayError::Strategy { rounds: rounds + 1, source })?;
            }
            Move::Fake => game.apply_fake_round(),
            Move::Pretend(..) => return Err(PlayError::PretendAtTop),
            Move::Done(cert) => {
                cert.validate(game).map_err(PlayError::BadCertificate)?;
                return Ok(cert);
            }
        }
    }
}

/// One leaf of an exhaustive enumeration.
pub struct Leaf {
    pub picks: Vec<usize>,
    pub game: GameState,
    pub result: Result<Certificate, PlayError>,
}

/// Visits every sequence of Client replies to a deterministic strategy.
///
/// Each leaf is produced by replaying from scratch with a scripted client, so
/// strategies need no cloning; `build` must return identical fresh starts.
/// Returns the number of leaves visited.
pub fn enumerate_replies<B, S>(
    mut build: B,
    max_rounds: usize,
    mut visit: impl FnMut(&Leaf),
) -> usize
where
    B: FnMut() -> (GameState, S),
    S: WaiterStrategy,
{
    let mut prefix: Vec<usize> = Vec::new();
    let mut leaves = 0;
    loop {
        let (mut game, mut waiter) = build();
        let mut client = ScriptedClient::new(prefix.clone());
        let result = play(&mut game, &mut waiter, &mut client, max_rounds);
        let widths = client.widths.clone();
        let picks: Vec<usize> = (0..widths.len()).map(|i| prefix.get(i).copied().unwrap_or(0)).collect();
        leaves += 1;
        visit(&Leaf { picks: picks.clone(), game, result });
        let mut next = picks;
        loop {
            match next.pop() {
                None => return leaves,
                Some(p) if p + 1 < widths[next.len()] => {
                    next.push(p + 1);
                    break;
                }
                Some(_) => {}
            }
        }
        prefix = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{BoardSpec, Offer};
    use crate::graph::Edge;
    use crate::strategy::CheckLog;

    /// Offers the lowest free pair for a fixed number of rounds.
    struct Greedy {
        rounds: usize,
    }

    impl WaiterStrategy for Greedy {
        fn name(&self) -> &'static str {
            "greedy-test"
        }
        fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
            if game.round() == self.rounds {
                return Ok(Move::Done(Certificate::Matching { edges: vec![] }));
            }
            let edges: Vec<Edge> = game.free_edges().take(2).collect();
            Ok(Move::Offer(Offer::new(edges)))
        }
        fn on_pick(&mut self, _: &GameState, _: &Offer, _: usize) -> Result<(), StrategyError> {
            Ok(())
        }
        fn checks(&self) -> CheckLog {
            CheckLog::new()
        }
    }

    #[test]
    fn enumeration_visits_every_branch() {
        let mut seen = Vec::new();
        let leaves = enumerate_replies(
            || (GameState::new(BoardSpec::complete(6, 1)).unwrap(), Greedy { rounds: 7 }),
            20,
            |leaf| seen.push(leaf.picks.clone()),
        );
        assert_eq!(leaves, 128);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 128);
    }
}
