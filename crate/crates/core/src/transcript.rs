//! Self-contained JSON records of finished games.

use crate::biased::Profile;
use crate::certificate::Certificate;
use crate::game::{BoardSpec, GameError, GameState, Offer, RoundRecord};
use crate::graph::Edge;
use crate::strategy::{CheckSummary, ProbeLevel};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FakeMarker {
    Fake,
}

/// One round as stored on disk: `{"offer": [[u, v], ...], "pick": i}` or `"fake"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RoundEntry {
    Played { offer: Vec<Edge>, pick: usize },
    Fake(FakeMarker),
}

impl From<&RoundRecord> for RoundEntry {
    fn from(r: &RoundRecord) -> Self {
        match r {
            RoundRecord::Played { offer, pick } => RoundEntry::Played { offer: offer.edges.clone(), pick: *pick },
            RoundRecord::Fake => RoundEntry::Fake(FakeMarker::Fake),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategies {
    /// Registry id of the Waiter strategy, with parameters.
    pub waiter: String,
    /// Registry id of the Client policy.
    pub client: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema: u32,
    pub board: BoardSpec,
    pub bias: u32,
    pub n: usize,
    pub strategies: Strategies,
    pub seed: u64,
    pub probes: ProbeLevel,
    pub constants: Profile,
    /// Client edges placed before the first round.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeded: Vec<Edge>,
    pub rounds: Vec<RoundEntry>,
    pub real_rounds: usize,
    pub fake_rounds: usize,
    pub certificate: Option<Certificate>,
    pub certificate_valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<CheckSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Transcript {
    pub fn probes_failed(&self) -> u64 {
        self.checks.iter().map(|c| c.failed).sum()
    }

    /// Won with a valid certificate, no error and clean probes.
    pub fn is_clean(&self) -> bool {
        self.error.is_none() && self.certificate_valid && self.probes_failed() == 0
    }

    /// Recorded Client picks of the played rounds, in order.
    pub fn picks(&self) -> Vec<usize> {
        self.rounds
            .iter()
            .filter_map(|r| match r {
                RoundEntry::Played { pick, .. } => Some(*pick),
                RoundEntry::Fake(_) => None,
            })
            .collect()
    }

    /// Rebuilds the final position from the board, the seeded edges and the rounds alone.
    pub fn replay(&self) -> Result<GameState, GameError> {
        let mut game = GameState::new(self.board.clone())?;
        if !self.seeded.is_empty() {
            game.seed_client_edges(&self.seeded)?;
        }
        for r in &self.rounds {
            match r {
                RoundEntry::Played { offer, pick } => {
                    let offer = Offer::new(offer.clone());
                    game.validate_offer(&offer)?;
                    game.apply_round(&offer, *pick)?;
                }
                RoundEntry::Fake(_) => game.apply_fake_round(),
            }
        }
        Ok(game)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
