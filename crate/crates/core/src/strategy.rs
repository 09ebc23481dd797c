//! The Waiter strategy interface, runtime probe bookkeeping, and the
//! sub-board adapter that lets one strategy drive another on a vertex subset.

use crate::certificate::Certificate;
use crate::game::{GameError, GameState, Offer};
use crate::graph::{Edge, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// What a Waiter strategy does next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    Offer(Offer),
    /// A round that is accounted for but not played.
    Fake,
    /// A round played only inside a strategy's private view: the strategy
    /// treats `offer` as if Client had taken `offer.edges[pick]`, while the
    /// real board records a fake round. Only meaningful under [`SubGame`].
    Pretend(Offer, usize),
    /// The structure is forced; the certificate witnesses it.
    Done(Certificate),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("forced forfeit in {stage}: {reason}")]
    Forfeit { stage: &'static str, reason: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("strategy called after it finished")]
    Finished,
}

pub fn forfeit(stage: &'static str, reason: impl Into<String>) -> StrategyError {
    StrategyError::Forfeit { stage, reason: reason.into() }
}

/// How much runtime invariant checking a strategy performs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeLevel {
    Off,
    /// Only stage-boundary and completion checks.
    Final,
    #[default]
    PerRound,
}

impl ProbeLevel {
    pub fn per_round(self) -> bool {
        self == ProbeLevel::PerRound
    }

    pub fn any(self) -> bool {
        self != ProbeLevel::Off
    }
}

impl std::str::FromStr for ProbeLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(ProbeLevel::Off),
            "final" => Ok(ProbeLevel::Final),
            "per-round" => Ok(ProbeLevel::PerRound),
            other => Err(format!("unknown probe level {other:?}")),
        }
    }
}

const KEPT_FAILURES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub round: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub probe: String,
    pub passed: u64,
    pub failed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<CheckFailure>,
}

/// Per-probe pass/fail counters with the first few failure details.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckLog {
    entries: BTreeMap<String, CheckSummary>,
}

impl CheckLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, probe: &str, round: usize, ok: bool, detail: impl FnOnce() -> String) {
        let entry = self
            .entries
            .entry(probe.to_string())
            .or_insert_with(|| CheckSummary { probe: probe.to_string(), ..Default::default() });
        if ok {
            entry.passed += 1;
        } else {
            entry.failed += 1;
            if entry.failures.len() < KEPT_FAILURES {
                entry.failures.push(CheckFailure { round, detail: detail() });
            }
        }
    }

    /// Records every violated clause from `violations`, or one pass if there are none.
    pub fn record_all(&mut self, probe: &str, round: usize, violations: Vec<String>) {
        if violations.is_empty() {
            self.record(probe, round, true, String::new);
        }
        for v in violations {
            self.record(probe, round, false, || v);
        }
    }

    pub fn merge(&mut self, other: &CheckLog) {
        for (name, s) in &other.entries {
            let entry = self
                .entries
                .entry(name.clone())
                .or_insert_with(|| CheckSummary { probe: name.clone(), ..Default::default() });
            entry.passed += s.passed;
            entry.failed += s.failed;
            for f in &s.failures {
                if entry.failures.len() < KEPT_FAILURES {
                    entry.failures.push(f.clone());
                }
            }
        }
    }

    pub fn failed(&self) -> u64 {
        self.entries.values().map(|s| s.failed).sum()
    }

    pub fn passed(&self) -> u64 {
        self.entries.values().map(|s| s.passed).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.failed() == 0
    }

    pub fn get(&self, probe: &str) -> Option<&CheckSummary> {
        self.entries.get(probe)
    }

    pub fn summaries(&self) -> Vec<CheckSummary> {
        self.entries.values().cloned().collect()
    }

    pub fn from_summaries(list: Vec<CheckSummary>) -> Self {
        CheckLog { entries: list.into_iter().map(|s| (s.probe.clone(), s)).collect() }
    }
}

/// A Waiter strategy. The engine calls [`WaiterStrategy::next_offer`] once per
/// round and, for played rounds, [`WaiterStrategy::on_pick`] after the board
/// has been updated with Client's choice.
pub trait WaiterStrategy {
    fn name(&self) -> &'static str;
    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError>;
    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError>;
    fn checks(&self) -> CheckLog;
    /// Free-form remarks carried into transcripts, such as non-guaranteed subroutines.
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

impl<S: WaiterStrategy + ?Sized> WaiterStrategy for Box<S> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn next_offer(&mut self, game: &GameState) -> Result<Move, StrategyError> {
        (**self).next_offer(game)
    }
    fn on_pick(&mut self, game: &GameState, offer: &Offer, pick: usize) -> Result<(), StrategyError> {
        (**self).on_pick(game, offer, pick)
    }
    fn checks(&self) -> CheckLog {
        (**self).checks()
    }
    fn notes(&self) -> Vec<String> {
        (**self).notes()
    }
}

/// Result of advancing a [`SubGame`] by one step, expressed on the host board.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubMove {
    Offer(Offer),
    Fake,
    /// Finished; the certificate is in local coordinates.
    Done(Certificate),
}

/// Runs `inner` on a private local board whose vertices map into the host
/// board. Local vertices without a host image are phantoms: any offer that
/// touches one is pretended (Client is assumed to take the first edge) and
/// the host records a fake round.
pub struct SubGame<S> {
    local: GameState,
    to_host: Vec<Option<Vertex>>,
    inner: S,
    pending: Option<Offer>,
}

impl<S: WaiterStrategy> SubGame<S> {
    pub fn new(local: GameState, to_host: Vec<Option<Vertex>>, inner: S) -> Self {
        assert_eq!(local.vertex_count(), to_host.len(), "vertex map must cover the local board");
        SubGame { local, to_host, inner, pending: None }
    }

    pub fn local(&self) -> &GameState {
        &self.local
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }

    pub fn host_of(&self, v: Vertex) -> Option<Vertex> {
        self.to_host[v as usize]
    }

    fn host_edge(&self, e: Edge) -> Option<Edge> {
        Some(Edge::new(self.host_of(e.lo())?, self.host_of(e.hi())?))
    }

    pub fn next_offer(&mut self) -> Result<SubMove, StrategyError> {
        if self.pending.is_some() {
            return Err(StrategyError::Precondition("sub-board offer still awaiting a pick".into()));
        }
        match self.inner.next_offer(&self.local)? {
            Move::Offer(offer) => {
                let host: Option<Vec<Edge>> = offer.edges.iter().map(|&e| self.host_edge(e)).collect();
                match host {
                    Some(edges) => {
                        self.pending = Some(offer);
                        Ok(SubMove::Offer(Offer::new(edges)))
                    }
                    None => {
                        self.local.apply_round(&offer, 0)?;
                        self.inner.on_pick(&self.local, &offer, 0)?;
                        Ok(SubMove::Fake)
                    }
                }
            }
            Move::Pretend(offer, pick) => {
                self.local.apply_round(&offer, pick)?;
                self.inner.on_pick(&self.local, &offer, pick)?;
                Ok(SubMove::Fake)
            }
            Move::Fake => {
                self.local.apply_fake_round();
                Ok(SubMove::Fake)
            }
            Move::Done(cert) => Ok(SubMove::Done(cert)),
        }
    }

    pub fn on_pick(&mut self, pick: usize) -> Result<(), StrategyError> {
        let offer = self
            .pending
            .take()
            .ok_or_else(|| StrategyError::Precondition("pick without a pending sub-board offer".into()))?;
        self.local.apply_round(&offer, pick)?;
        self.inner.on_pick(&self.local, &offer, pick)
    }

    /// Maps a local certificate to host coordinates; panics on phantom vertices.
    pub fn to_host_certificate(&self, cert: &Certificate) -> Certificate {
        cert.map_vertices(|v| self.to_host[v as usize].expect("certificate uses a phantom vertex"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_log_counts_and_merges() {
        let mut a = CheckLog::new();
        a.record("x", 1, true, String::new);
        a.record("x", 2, false, || "bad".into());
        let mut b = CheckLog::new();
        b.record_all("y", 3, vec![]);
        b.record_all("x", 4, vec!["worse".into()]);
        a.merge(&b);
        assert_eq!(a.failed(), 2);
        assert_eq!(a.passed(), 2);
        assert_eq!(a.get("x").unwrap().failures.len(), 2);
        let round_trip = CheckLog::from_summaries(a.summaries());
        assert_eq!(round_trip, a);
    }
}
