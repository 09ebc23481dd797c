//! String ids for strategies and Client policies, game setup from an id, and
//! transcript production and verification.
//!
//! Strategy ids take colon-separated parameters, e.g. `tree-embed:random:5`,
//! `tree-factor:tipped:5`, `path-factor:3`, `triangle-factor:highest`.

use crate::biased::{BiasedHam, BiasedPm, Profile};
use crate::certificate::Certificate;
use crate::client::{AntiStructure, ClientPolicy, LastEdgeAvoider, MinWaiterDegree, Target, UniformRandom};
use crate::engine::play;
use crate::game::{BoardSpec, GameState};
use crate::graph::{Edge, Vertex};
use crate::hamilton::HamStrategy;
use crate::matching::{PmBipartite, PmComplete};
use crate::pancyclic::{round_budget, PancyclicStrategy};
use crate::strategy::{CheckLog, Move, ProbeLevel, StrategyError, WaiterStrategy};
use crate::transcript::{RoundEntry, Strategies, Transcript, SCHEMA_VERSION};
use crate::tree::{random_tree, PathFactorStrategy, Tree, TreeEmbedConfig, TreeEmbedStrategy, TreeFactorStrategy};
use crate::triangle::{BatchRule, BatchThenRandom, Delayer, GreedyCloser, RandomOffers, TriangleFactorStrategy, TwoTriangleStrategy};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error("unknown client policy {0:?}")]
    UnknownClient(String),
    #[error("bad parameter in {id:?}: {reason}")]
    BadParam { id: String, reason: String },
    #[error("setup failed: {0}")]
    Setup(#[from] StrategyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeShape {
    Path,
    Tipped,
    Random { max_degree: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmallTree {
    Path,
    Tipped,
}

impl SmallTree {
    pub fn build(self, k: usize) -> Tree {
        match self {
            SmallTree::Path => Tree::path(k),
            SmallTree::Tipped => Tree::two_leaf_tipped(k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategySpec {
    PmComplete,
    /// Bipartite board `K_{n,n}` minus `obstacles` random cross edges (default `n/2`).
    PmBipartite { obstacles: Option<usize> },
    HamUnbiased,
    Pancyclic,
    TreeEmbed { shape: TreeShape },
    TreeFactor { tree: SmallTree, k: usize },
    PathFactor { k: usize },
    TriangleFactor { rule: BatchRule },
    TwoTriangles,
    HamBiased,
    PmBiased,
    RandomOffers,
    GreedyCloser,
    BatchThenRandom,
}

/// Every id accepted by [`StrategySpec::from_str`], with example parameters.
pub const STRATEGY_IDS: &[&str] = &[
    "pm-complete",
    "pm-bipartite[:obstacles]",
    "ham-unbiased",
    "pancyclic",
    "tree-embed[:path|tipped|random[:max-degree]]",
    "tree-factor:path|tipped:k",
    "path-factor:k",
    "triangle-factor[:lowest|highest|random[:seed]]",
    "two-triangles",
    "ham-biased",
    "pm-biased",
    "random-offers",
    "greedy-closer",
    "batch-then-random",
];

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::PmComplete => write!(f, "pm-complete"),
            StrategySpec::PmBipartite { obstacles: None } => write!(f, "pm-bipartite"),
            StrategySpec::PmBipartite { obstacles: Some(h) } => write!(f, "pm-bipartite:{h}"),
            StrategySpec::HamUnbiased => write!(f, "ham-unbiased"),
            StrategySpec::Pancyclic => write!(f, "pancyclic"),
            StrategySpec::TreeEmbed { shape: TreeShape::Path } => write!(f, "tree-embed:path"),
            StrategySpec::TreeEmbed { shape: TreeShape::Tipped } => write!(f, "tree-embed:tipped"),
            StrategySpec::TreeEmbed { shape: TreeShape::Random { max_degree } } => write!(f, "tree-embed:random:{max_degree}"),
            StrategySpec::TreeFactor { tree, k } => {
                let t = if *tree == SmallTree::Path { "path" } else { "tipped" };
                write!(f, "tree-factor:{t}:{k}")
            }
            StrategySpec::PathFactor { k } => write!(f, "path-factor:{k}"),
            StrategySpec::TriangleFactor { rule } => match rule {
                BatchRule::Lowest => write!(f, "triangle-factor:lowest"),
                BatchRule::Highest => write!(f, "triangle-factor:highest"),
                BatchRule::Random(s) => write!(f, "triangle-factor:random:{s}"),
            },
            StrategySpec::TwoTriangles => write!(f, "two-triangles"),
            StrategySpec::HamBiased => write!(f, "ham-biased"),
            StrategySpec::PmBiased => write!(f, "pm-biased"),
            StrategySpec::RandomOffers => write!(f, "random-offers"),
            StrategySpec::GreedyCloser => write!(f, "greedy-closer"),
            StrategySpec::BatchThenRandom => write!(f, "batch-then-random"),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = |reason: &str| RegistryError::BadParam { id: s.to_string(), reason: reason.to_string() };
        let num = |i: usize| -> Result<usize, RegistryError> {
            parts.get(i).ok_or_else(|| bad("missing number"))?.parse().map_err(|_| bad("not a number"))
        };
        let spec = match parts[0] {
            "pm-complete" => StrategySpec::PmComplete,
            "pm-bipartite" => StrategySpec::PmBipartite { obstacles: if parts.len() > 1 { Some(num(1)?) } else { None } },
            "ham-unbiased" => StrategySpec::HamUnbiased,
            "pancyclic" => StrategySpec::Pancyclic,
            "tree-embed" => StrategySpec::TreeEmbed {
                shape: match parts.get(1).copied() {
                    Some("path") => TreeShape::Path,
                    Some("tipped") => TreeShape::Tipped,
                    Some("random") | None => TreeShape::Random { max_degree: if parts.len() > 2 { num(2)? } else { 5 } },
                    Some(_) => return Err(bad("tree shape must be path, tipped or random")),
                },
            },
            "tree-factor" => StrategySpec::TreeFactor {
                tree: match parts.get(1).copied() {
                    Some("path") => SmallTree::Path,
                    Some("tipped") => SmallTree::Tipped,
                    _ => return Err(bad("small tree must be path or tipped")),
                },
                k: num(2)?,
            },
            "path-factor" => StrategySpec::PathFactor { k: num(1)? },
            "triangle-factor" => StrategySpec::TriangleFactor {
                rule: match parts.get(1).copied() {
                    Some("lowest") | None => BatchRule::Lowest,
                    Some("highest") => BatchRule::Highest,
                    Some("random") => BatchRule::Random(if parts.len() > 2 { num(2)? as u64 } else { 0 }),
                    Some(_) => return Err(bad("batch rule must be lowest, highest or random")),
                },
            },
            "two-triangles" => StrategySpec::TwoTriangles,
            "ham-biased" => StrategySpec::HamBiased,
            "pm-biased" => StrategySpec::PmBiased,
            "random-offers" => StrategySpec::RandomOffers,
            "greedy-closer" => StrategySpec::GreedyCloser,
            "batch-then-random" => StrategySpec::BatchThenRandom,
            _ => return Err(RegistryError::UnknownStrategy(s.to_string())),
        };
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClientSpec {
    Random,
    MinWaiterDegree,
    AntiStructure,
    Avoider,
    Delayer,
}

pub const CLIENT_IDS: &[&str] = &["random", "min-waiter-degree", "anti-structure", "avoider", "delayer"];

impl fmt::Display for ClientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClientSpec::Random => "random",
            ClientSpec::MinWaiterDegree => "min-waiter-degree",
            ClientSpec::AntiStructure => "anti-structure",
            ClientSpec::Avoider => "avoider",
            ClientSpec::Delayer => "delayer",
        };
        f.write_str(s)
    }
}

impl FromStr for ClientSpec {
    type Err = RegistryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "random" | "uniform-random" => ClientSpec::Random,
            "min-waiter-degree" => ClientSpec::MinWaiterDegree,
            "anti-structure" => ClientSpec::AntiStructure,
            "avoider" => ClientSpec::Avoider,
            "delayer" => ClientSpec::Delayer,
            _ => return Err(RegistryError::UnknownClient(s.to_string())),
        })
    }
}

impl ClientSpec {
    pub fn build(self, target: &Target, seed: u64) -> Box<dyn ClientPolicy> {
        match self {
            ClientSpec::Random => Box::new(UniformRandom::new(seed)),
            ClientSpec::MinWaiterDegree => Box::new(MinWaiterDegree),
            ClientSpec::AntiStructure => Box::new(AntiStructure::new(target.clone())),
            ClientSpec::Avoider => Box::new(LastEdgeAvoider::new(target.clone(), seed)),
            ClientSpec::Delayer => Box::new(Delayer::new()),
        }
    }
}

/// Everything needed to reproduce one game.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub strategy: StrategySpec,
    pub client: ClientSpec,
    /// Board size; vertices per side for bipartite boards.
    pub n: usize,
    pub bias: u32,
    pub seed: u64,
    pub probes: ProbeLevel,
    pub constants: Profile,
}

impl RunConfig {
    pub fn new(strategy: StrategySpec, client: ClientSpec, n: usize, seed: u64) -> Self {
        RunConfig { strategy, client, n, bias: 1, seed, probes: ProbeLevel::PerRound, constants: Profile::Desk }
    }

    /// Bound on real rounds guaranteed by the strategy, where one is known.
    pub fn round_bound(&self) -> Option<f64> {
        let n = self.n as f64;
        let c = self.constants.constants();
        Some(match self.strategy {
            StrategySpec::PmComplete => n / 2.0 + 1.0,
            StrategySpec::PmBipartite { .. } => n + 1.0,
            StrategySpec::HamUnbiased => n + 1.0,
            StrategySpec::Pancyclic => round_budget(self.n) as f64,
            StrategySpec::TreeEmbed { .. } => n,
            StrategySpec::TreeFactor { k, .. } => ((k - 1) * self.n / k) as f64 + 1.0,
            StrategySpec::PathFactor { k } => ((k - 1) * self.n / k) as f64,
            StrategySpec::TriangleFactor { .. } => TriangleFactorStrategy::round_bound(self.n),
            StrategySpec::TwoTriangles => 7.0,
            StrategySpec::HamBiased => c.ham_cap(self.n, self.bias),
            StrategySpec::PmBiased => c.pm_cap(self.n, self.bias),
            StrategySpec::RandomOffers | StrategySpec::GreedyCloser | StrategySpec::BatchThenRandom => return None,
        })
    }

    /// Cap on total rounds, fake ones included, before a run is abandoned.
    pub fn round_limit(&self) -> usize {
        let pairs = self.n * (self.n + 1) / 2;
        match self.round_bound() {
            Some(b) => (2.0 * b) as usize + 2 * self.n + 100,
            None => pairs,
        }
    }

    pub fn target(&self) -> Target {
        match self.strategy {
            StrategySpec::PmComplete | StrategySpec::PmBipartite { .. } | StrategySpec::PmBiased => Target::Matching,
            StrategySpec::HamUnbiased | StrategySpec::HamBiased => Target::Hamilton,
            StrategySpec::Pancyclic => Target::Pancyclic,
            StrategySpec::TreeEmbed { shape } => Target::Tree { edges: self.embed_tree(shape).edges() },
            StrategySpec::TreeFactor { tree, k } => Target::TreeFactor { edges: tree.build(k).edges() },
            StrategySpec::PathFactor { k } => Target::TreeFactor { edges: Tree::path(k).edges() },
            _ => Target::TriangleFactor,
        }
    }

    fn embed_tree(&self, shape: TreeShape) -> Tree {
        match shape {
            TreeShape::Path => Tree::path(self.n),
            TreeShape::Tipped => Tree::two_leaf_tipped(self.n),
            TreeShape::Random { max_degree } => random_tree(&mut ChaCha8Rng::seed_from_u64(self.seed), self.n, max_degree),
        }
    }

    fn board(&self) -> BoardSpec {
        match self.strategy {
            StrategySpec::PmBipartite { obstacles } => {
                let h = obstacles.unwrap_or(self.n / 2);
                let n = self.n as Vertex;
                let mut cross: Vec<Edge> = (0..n).flat_map(|a| (n..2 * n).map(move |b| Edge::new(a, b))).collect();
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x6f62_7374);
                cross.shuffle(&mut rng);
                cross.truncate(h);
                cross.sort_unstable();
                BoardSpec::bipartite_minus(self.n, cross, self.bias)
            }
            _ => BoardSpec::complete(self.n, self.bias),
        }
    }

    /// Fresh game (with any seeded edges) and the Waiter strategy.
    pub fn setup(&self) -> Result<(GameState, Box<dyn WaiterStrategy>), RegistryError> {
        let mut game = GameState::new(self.board()).map_err(StrategyError::from)?;
        let p = self.probes;
        let n = self.n;
        let waiter: Box<dyn WaiterStrategy> = match self.strategy {
            StrategySpec::PmComplete => Box::new(PmComplete::new(game.board(), p)?),
            StrategySpec::PmBipartite { .. } => Box::new(PmBipartite::new(game.board(), p)?),
            StrategySpec::HamUnbiased => Box::new(HamStrategy::new(n, p)?),
            StrategySpec::Pancyclic => Box::new(PancyclicStrategy::new(n, p)?),
            StrategySpec::TreeEmbed { shape } => {
                let config = TreeEmbedConfig { probes: p, ..TreeEmbedConfig::default() };
                Box::new(TreeEmbedStrategy::new(self.embed_tree(shape), config)?)
            }
            StrategySpec::TreeFactor { tree, k } => Box::new(TreeFactorStrategy::new(tree.build(k), n, p)?),
            StrategySpec::PathFactor { k } => Box::new(PathFactorStrategy::new(n, k, p)?),
            StrategySpec::TriangleFactor { rule } => Box::new(TriangleFactorStrategy::with_seeded_reservoir(&mut game, rule, p)?),
            StrategySpec::TwoTriangles => {
                let vertices: Vec<Vertex> = (0..12).collect();
                Box::new(TwoTriangleStrategy::new(&vertices, 0, 1)?)
            }
            StrategySpec::HamBiased => Box::new(BiasedHam::new(n, self.bias, self.constants.constants(), p)?),
            StrategySpec::PmBiased => Box::new(BiasedPm::new(n, self.bias, self.constants.constants(), p)?),
            StrategySpec::RandomOffers => Box::new(RandomOffers::new(self.seed)),
            StrategySpec::GreedyCloser => Box::new(GreedyCloser::new(self.seed)),
            StrategySpec::BatchThenRandom => Box::new(BatchThenRandom::new(n, self.seed)),
        };
        Ok((game, waiter))
    }

    /// Plays the game and records it; strategy failures end up in `error`.
    pub fn run(&self) -> Result<Transcript, RegistryError> {
        let (mut game, mut waiter) = self.setup()?;
        let seeded = game.seeded().to_vec();
        let mut client = self.client.build(&self.target(), self.seed);
        let outcome = play(&mut game, waiter.as_mut(), client.as_mut(), self.round_limit());
        let (certificate, error) = match outcome {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(Transcript {
            schema: SCHEMA_VERSION,
            board: game.board().clone(),
            bias: self.bias,
            n: self.n,
            strategies: Strategies { waiter: self.strategy.to_string(), client: self.client.to_string() },
            seed: self.seed,
            probes: self.probes,
            constants: self.constants,
            seeded,
            rounds: game.history().iter().map(RoundEntry::from).collect(),
            real_rounds: game.real_rounds(),
            fake_rounds: game.fake_rounds(),
            certificate_valid: certificate.as_ref().is_some_and(|c| c.is_valid(&game)),
            certificate,
            error,
            checks: waiter.checks().summaries(),
            notes: waiter.notes(),
        })
    }

    pub fn from_transcript(t: &Transcript) -> Result<Self, RegistryError> {
        Ok(RunConfig {
            strategy: t.strategies.waiter.parse()?,
            client: t.strategies.client.parse()?,
            n: t.n,
            bias: t.bias,
            seed: t.seed,
            probes: t.probes,
            constants: t.constants,
        })
    }
}

/// Outcome of re-checking a transcript.
#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    /// First point where the re-run strategy disagrees with the recording.
    pub divergence: Option<String>,
    /// Reason the recorded certificate fails on the replayed position.
    pub certificate_error: Option<String>,
    /// Probe results of the re-run strategy.
    pub checks: CheckLog,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.divergence.is_none() && self.certificate_error.is_none() && self.checks.is_clean()
    }
}

/// Replays the recorded rounds, revalidates the certificate against the
/// replayed position and re-runs the strategy with the recorded picks,
/// comparing every move against the recording.
pub fn verify(t: &Transcript) -> Result<VerifyReport, RegistryError> {
    let mut report = VerifyReport::default();
    match t.replay() {
        Ok(state) => match &t.certificate {
            Some(c) => report.certificate_error = c.validate(&state).err().map(|r| r.to_string()),
            None => report.certificate_error = Some(t.error.clone().unwrap_or_else(|| "no certificate recorded".into())),
        },
        Err(e) => report.certificate_error = Some(format!("recorded rounds are illegal: {e}")),
    }
    let cfg = RunConfig::from_transcript(t)?;
    let (mut game, mut waiter) = cfg.setup()?;
    if game.board() != &t.board || game.seeded() != t.seeded.as_slice() {
        report.divergence = Some("board or seeded edges differ from the recording".into());
        return Ok(report);
    }
    let mut final_move = None;
    for (i, entry) in t.rounds.iter().chain(std::iter::once(&RoundEntry::Fake(crate::transcript::FakeMarker::Fake))).enumerate() {
        let at_end = i == t.rounds.len();
        let mv = match waiter.next_offer(&game) {
            Ok(mv) => mv,
            Err(e) => {
                if !(at_end && t.error.is_some()) {
                    report.divergence = Some(format!("round {}: strategy failed on replay: {e}", i + 1));
                }
                break;
            }
        };
        if at_end {
            final_move = Some(mv);
            break;
        }
        match (mv, entry) {
            (Move::Offer(o), RoundEntry::Played { offer, pick }) if &o.edges == offer => {
                if game.apply_round(&o, *pick).is_err() {
                    report.divergence = Some(format!("round {}: recorded pick {pick} is illegal", i + 1));
                    break;
                }
                if let Err(e) = waiter.on_pick(&game, &o, *pick) {
                    report.divergence = Some(format!("round {}: strategy rejected the pick: {e}", i + 1));
                    break;
                }
            }
            (Move::Fake, RoundEntry::Fake(_)) => game.apply_fake_round(),
            (mv, _) => {
                report.divergence = Some(format!("round {}: strategy moved {} but the recording differs", i + 1, describe(&mv)));
                break;
            }
        }
    }
    if report.divergence.is_none() {
        match (final_move, &t.certificate) {
            (Some(Move::Done(c)), Some(rec)) if &c == rec => {}
            (Some(Move::Done(_)), Some(_)) => report.divergence = Some("re-run produced a different certificate".into()),
            (Some(mv), _) if t.error.is_none() => {
                report.divergence = Some(format!("recording ends but the strategy wants to continue with {}", describe(&mv)))
            }
            _ => {}
        }
    }
    report.checks = waiter.checks();
    Ok(report)
}

fn describe(mv: &Move) -> String {
    match mv {
        Move::Offer(o) => format!("an offer of {} edges", o.len()),
        Move::Fake => "a fake round".into(),
        Move::Pretend(..) => "a pretended round".into(),
        Move::Done(c) => format!("a {} certificate", c.kind_name()),
    }
}

/// Certificate kind for display, if any.
pub fn certificate_kind(c: &Option<Certificate>) -> &'static str {
    c.as_ref().map_or("none", |c| c.kind_name())
}
