//! Boards, edge ownership and the turn mechanics of Waiter-Client play.

use crate::graph::{pair_count, Edge, Vertex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoardKind {
    /// `K_n` on vertices `0..n`.
    Complete,
    /// `K_{n,n}` with sides `A = 0..n` and `B = n..2n`.
    Bipartite,
    /// `K_n` minus a forbidden edge set.
    CompleteMinus,
}

/// Static description of a board together with the bias.
///
/// `forbidden` is the edge set removed from the underlying board. It is
/// required to be empty for [`BoardKind::Complete`]; a bipartite board may
/// carry forbidden cross edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoardSpec {
    pub kind: BoardKind,
    pub n: usize,
    pub bias: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forbidden: Vec<Edge>,
}

impl BoardSpec {
    pub fn complete(n: usize, bias: u32) -> Self {
        BoardSpec { kind: BoardKind::Complete, n, bias, forbidden: Vec::new() }
    }

    pub fn bipartite(n: usize, bias: u32) -> Self {
        BoardSpec { kind: BoardKind::Bipartite, n, bias, forbidden: Vec::new() }
    }

    pub fn bipartite_minus(n: usize, forbidden: Vec<Edge>, bias: u32) -> Self {
        BoardSpec { kind: BoardKind::Bipartite, n, bias, forbidden }
    }

    pub fn complete_minus(n: usize, forbidden: Vec<Edge>, bias: u32) -> Self {
        BoardSpec { kind: BoardKind::CompleteMinus, n, bias, forbidden }
    }

    /// Total number of board vertices.
    pub fn vertex_count(&self) -> usize {
        match self.kind {
            BoardKind::Bipartite => 2 * self.n,
            _ => self.n,
        }
    }

    /// Whether `e` belongs to the underlying board before removing `forbidden`.
    pub fn in_underlying(&self, e: Edge) -> bool {
        let v = self.vertex_count() as Vertex;
        if e.hi() >= v {
            return false;
        }
        match self.kind {
            BoardKind::Bipartite => (e.lo() as usize) < self.n && (e.hi() as usize) >= self.n,
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<(), GameError> {
        if self.n < 2 {
            return Err(GameError::InvalidSpec(format!("n = {} is below 2", self.n)));
        }
        if self.bias < 1 {
            return Err(GameError::InvalidSpec("bias must be at least 1".into()));
        }
        if self.kind == BoardKind::Complete && !self.forbidden.is_empty() {
            return Err(GameError::InvalidSpec(
                "a complete board carries no forbidden edges; use complete-minus".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for &e in &self.forbidden {
            if !self.in_underlying(e) {
                return Err(GameError::InvalidSpec(format!("forbidden edge {e:?} is not on the board")));
            }
            if !seen.insert(e) {
                return Err(GameError::InvalidSpec(format!("forbidden edge {e:?} listed twice")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Owner {
    Free,
    Waiter,
    Client,
    /// Not part of the playable board.
    Off,
}

/// The `b+1` (or fewer, at the very end) free edges offered in one round.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Offer {
    pub edges: Vec<Edge>,
}

impl Offer {
    pub fn new(edges: Vec<Edge>) -> Self {
        Offer { edges }
    }

    pub fn pair(a: Edge, b: Edge) -> Self {
        Offer { edges: vec![a, b] }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoundRecord {
    Played { offer: Offer, pick: usize },
    Fake,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("invalid board spec: {0}")]
    InvalidSpec(String),
    #[error("edge {0:?} is not free")]
    EdgeNotFree(Edge),
    #[error("edge {0:?} offered twice")]
    DuplicateEdge(Edge),
    #[error("choice {choice} out of range for an offer of {len} edges")]
    ChoiceOutOfRange { choice: usize, len: usize },
    #[error("offer has {got} edges, the rules require {expected}")]
    OfferSize { expected: usize, got: usize },
    #[error("no free edges remain")]
    BoardExhausted,
}

/// Complete mutable state of one game.
///
/// Ownership is stored densely over all vertex pairs; Client, Waiter and
/// forbidden adjacencies are kept as lists because those graphs stay sparse
/// for every strategy in this crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    board: BoardSpec,
    vertices: usize,
    owner: Vec<Owner>,
    client_adj: Vec<Vec<Vertex>>,
    waiter_adj: Vec<Vec<Vertex>>,
    forbidden_adj: Vec<Vec<Vertex>>,
    free: usize,
    waiter: usize,
    client: usize,
    round: usize,
    fake_rounds: usize,
    short_offers: usize,
    history: Vec<RoundRecord>,
    seeded: Vec<Edge>,
}

impl GameState {
    pub fn new(board: BoardSpec) -> Result<Self, GameError> {
        board.validate()?;
        let vertices = board.vertex_count();
        let mut owner = vec![Owner::Free; pair_count(vertices)];
        let mut free = owner.len();
        if board.kind == BoardKind::Bipartite {
            for (idx, o) in owner.iter_mut().enumerate() {
                if !board.in_underlying(Edge::from_index(idx)) {
                    *o = Owner::Off;
                    free -= 1;
                }
            }
        }
        let mut forbidden_adj = vec![Vec::new(); vertices];
        for &e in &board.forbidden {
            owner[e.index()] = Owner::Off;
            free -= 1;
            forbidden_adj[e.lo() as usize].push(e.hi());
            forbidden_adj[e.hi() as usize].push(e.lo());
        }
        Ok(GameState {
            board,
            vertices,
            owner,
            client_adj: vec![Vec::new(); vertices],
            waiter_adj: vec![Vec::new(); vertices],
            forbidden_adj,
            free,
            waiter: 0,
            client: 0,
            round: 0,
            fake_rounds: 0,
            short_offers: 0,
            history: Vec::new(),
            seeded: Vec::new(),
        })
    }

    pub fn board(&self) -> &BoardSpec {
        &self.board
    }

    pub fn bias(&self) -> u32 {
        self.board.bias
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn owner(&self, e: Edge) -> Owner {
        if e.hi() as usize >= self.vertices {
            Owner::Off
        } else {
            self.owner[e.index()]
        }
    }

    pub fn owner_of(&self, u: Vertex, v: Vertex) -> Owner {
        Edge::try_new(u, v).map_or(Owner::Off, |e| self.owner(e))
    }

    pub fn is_free(&self, e: Edge) -> bool {
        self.owner(e) == Owner::Free
    }

    pub fn is_free_pair(&self, u: Vertex, v: Vertex) -> bool {
        self.owner_of(u, v) == Owner::Free
    }

    pub fn is_client(&self, u: Vertex, v: Vertex) -> bool {
        self.owner_of(u, v) == Owner::Client
    }

    pub fn is_waiter(&self, u: Vertex, v: Vertex) -> bool {
        self.owner_of(u, v) == Owner::Waiter
    }

    /// Claimed by either player.
    pub fn is_claimed(&self, u: Vertex, v: Vertex) -> bool {
        matches!(self.owner_of(u, v), Owner::Client | Owner::Waiter)
    }

    pub fn client_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.client_adj[v as usize]
    }

    pub fn waiter_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.waiter_adj[v as usize]
    }

    pub fn forbidden_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.forbidden_adj[v as usize]
    }

    pub fn d_c(&self, v: Vertex) -> usize {
        self.client_adj[v as usize].len()
    }

    pub fn d_w(&self, v: Vertex) -> usize {
        self.waiter_adj[v as usize].len()
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn waiter_count(&self) -> usize {
        self.waiter
    }

    pub fn client_count(&self) -> usize {
        self.client
    }

    /// Rounds played on the board plus fake rounds.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn real_rounds(&self) -> usize {
        self.round - self.fake_rounds
    }

    pub fn fake_rounds(&self) -> usize {
        self.fake_rounds
    }

    /// Number of rounds in which fewer than `b+1` edges were offered.
    pub fn short_offers(&self) -> usize {
        self.short_offers
    }

    pub fn history(&self) -> &[RoundRecord] {
        &self.history
    }

    /// Client edges granted outside of play (clique oracles).
    pub fn seeded(&self) -> &[Edge] {
        &self.seeded
    }

    /// The first edge Client claimed in a real round.
    pub fn first_client_edge(&self) -> Option<Edge> {
        self.history.iter().find_map(|r| match r {
            RoundRecord::Played { offer, pick } => Some(offer.edges[*pick]),
            RoundRecord::Fake => None,
        })
    }

    pub fn client_edges(&self) -> Vec<Edge> {
        collect_edges(&self.client_adj)
    }

    pub fn waiter_edges(&self) -> Vec<Edge> {
        collect_edges(&self.waiter_adj)
    }

    pub fn free_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.owner
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Owner::Free)
            .map(|(i, _)| Edge::from_index(i))
    }

    /// Offer length demanded by the rules in the current position.
    pub fn required_offer_len(&self) -> usize {
        (self.board.bias as usize + 1).min(self.free)
    }

    pub fn validate_offer(&self, offer: &Offer) -> Result<(), GameError> {
        if self.free == 0 {
            return Err(GameError::BoardExhausted);
        }
        let expected = self.required_offer_len();
        if offer.len() != expected {
            return Err(GameError::OfferSize { expected, got: offer.len() });
        }
        for (i, &e) in offer.edges.iter().enumerate() {
            if !self.is_free(e) {
                return Err(GameError::EdgeNotFree(e));
            }
            if offer.edges[..i].contains(&e) {
                return Err(GameError::DuplicateEdge(e));
            }
        }
        Ok(())
    }

    /// Plays one real round: the chosen edge goes to Client, the rest to Waiter.
    pub fn apply_round(&mut self, offer: &Offer, choice: usize) -> Result<Edge, GameError> {
        self.validate_offer(offer)?;
        if choice >= offer.len() {
            return Err(GameError::ChoiceOutOfRange { choice, len: offer.len() });
        }
        if offer.len() < self.board.bias as usize + 1 {
            self.short_offers += 1;
        }
        for (i, &e) in offer.edges.iter().enumerate() {
            if i == choice {
                self.claim(e, Owner::Client);
            } else {
                self.claim(e, Owner::Waiter);
            }
        }
        self.round += 1;
        self.history.push(RoundRecord::Played { offer: offer.clone(), pick: choice });
        Ok(offer.edges[choice])
    }

    /// Records a round that the strategy accounts for without touching the board.
    pub fn apply_fake_round(&mut self) {
        self.round += 1;
        self.fake_rounds += 1;
        self.history.push(RoundRecord::Fake);
    }

    /// Grants free edges to Client outside of play.
    pub fn seed_client_edges(&mut self, edges: &[Edge]) -> Result<(), GameError> {
        for (i, &e) in edges.iter().enumerate() {
            if !self.is_free(e) {
                return Err(GameError::EdgeNotFree(e));
            }
            if edges[..i].contains(&e) {
                return Err(GameError::DuplicateEdge(e));
            }
        }
        for &e in edges {
            self.claim(e, Owner::Client);
            self.seeded.push(e);
        }
        Ok(())
    }

    fn claim(&mut self, e: Edge, who: Owner) {
        self.owner[e.index()] = who;
        self.free -= 1;
        let (u, v) = (e.lo() as usize, e.hi() as usize);
        match who {
            Owner::Client => {
                self.client += 1;
                self.client_adj[u].push(v as Vertex);
                self.client_adj[v].push(u as Vertex);
            }
            Owner::Waiter => {
                self.waiter += 1;
                self.waiter_adj[u].push(v as Vertex);
                self.waiter_adj[v].push(u as Vertex);
            }
            _ => unreachable!("claims go to a player"),
        }
    }

    /// Recounts ownership and checks the partition and round-accounting invariants.
    pub fn check_accounting(&self) -> Result<(), String> {
        let mut counts = [0usize; 4];
        for o in &self.owner {
            counts[*o as usize] += 1;
        }
        if counts[Owner::Free as usize] != self.free
            || counts[Owner::Waiter as usize] != self.waiter
            || counts[Owner::Client as usize] != self.client
        {
            return Err("ownership counters disagree with the ownership table".into());
        }
        let playable = pair_count(self.vertices) - counts[Owner::Off as usize];
        if self.free + self.waiter + self.client != playable {
            return Err("free, Waiter and Client edges do not partition the board".into());
        }
        if self.client != self.real_rounds() + self.seeded.len() {
            return Err(format!(
                "Client owns {} edges after {} real rounds and {} seeded edges",
                self.client,
                self.real_rounds(),
                self.seeded.len()
            ));
        }
        let b = self.board.bias as usize;
        if self.waiter > b * self.real_rounds() {
            return Err("Waiter owns more than b edges per real round".into());
        }
        if self.short_offers == 0 && self.waiter != b * self.real_rounds() {
            return Err("Waiter is missing edges although every offer had full length".into());
        }
        Ok(())
    }
}

fn collect_edges(adj: &[Vec<Vertex>]) -> Vec<Edge> {
    let mut out = Vec::new();
    for (u, list) in adj.iter().enumerate() {
        for &v in list {
            if (u as Vertex) < v {
                out.push(Edge::new(u as Vertex, v));
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn board_sizes() {
        assert_eq!(GameState::new(BoardSpec::complete(4, 1)).unwrap().free_count(), 6);
        assert_eq!(GameState::new(BoardSpec::bipartite(3, 1)).unwrap().free_count(), 9);
        let g = GameState::new(BoardSpec::complete_minus(4, vec![Edge::new(0, 1)], 1)).unwrap();
        assert_eq!(g.free_count(), 5);
        assert_eq!(g.round(), 0);
        assert!(g.history().is_empty());
    }

    #[test]
    fn invalid_specs() {
        assert!(GameState::new(BoardSpec::complete(1, 1)).is_err());
        assert!(GameState::new(BoardSpec::complete(4, 0)).is_err());
        assert!(GameState::new(BoardSpec::complete_minus(4, vec![Edge::new(0, 7)], 1)).is_err());
        let dup = vec![Edge::new(0, 1), Edge::new(1, 0)];
        assert!(GameState::new(BoardSpec::complete_minus(4, dup, 1)).is_err());
        assert!(GameState::new(BoardSpec::bipartite_minus(3, vec![Edge::new(0, 1)], 1)).is_err());
    }

    #[test]
    fn rounds_assign_ownership() {
        let mut g = GameState::new(BoardSpec::complete(4, 1)).unwrap();
        g.apply_round(&Offer::pair(Edge::new(0, 1), Edge::new(0, 2)), 0).unwrap();
        assert!(g.is_client(0, 1));
        assert!(g.is_waiter(0, 2));
        let mut g = GameState::new(BoardSpec::complete(4, 2)).unwrap();
        let offer = Offer::new(vec![Edge::new(0, 1), Edge::new(0, 2), Edge::new(0, 3)]);
        g.apply_round(&offer, 2).unwrap();
        assert_eq!(g.client_edges(), vec![Edge::new(0, 3)]);
        assert_eq!(g.waiter_edges(), vec![Edge::new(0, 1), Edge::new(0, 2)]);
        g.check_accounting().unwrap();
    }

    #[test]
    fn illegal_offers_rejected() {
        let mut g = GameState::new(BoardSpec::complete(4, 1)).unwrap();
        let e = Edge::new(0, 1);
        assert_eq!(g.apply_round(&Offer::pair(e, e), 0), Err(GameError::DuplicateEdge(e)));
        assert!(matches!(
            g.apply_round(&Offer::new(vec![e]), 0),
            Err(GameError::OfferSize { expected: 2, got: 1 })
        ));
        assert!(matches!(
            g.apply_round(&Offer::pair(e, Edge::new(2, 3)), 2),
            Err(GameError::ChoiceOutOfRange { .. })
        ));
        g.apply_round(&Offer::pair(e, Edge::new(2, 3)), 0).unwrap();
        assert_eq!(g.apply_round(&Offer::pair(e, Edge::new(0, 2)), 0), Err(GameError::EdgeNotFree(e)));
    }

    #[test]
    fn short_offer_on_last_edge() {
        let mut g = GameState::new(BoardSpec::complete(3, 1)).unwrap();
        g.apply_round(&Offer::pair(Edge::new(0, 1), Edge::new(0, 2)), 0).unwrap();
        assert_eq!(g.required_offer_len(), 1);
        g.apply_round(&Offer::new(vec![Edge::new(1, 2)]), 0).unwrap();
        assert_eq!(g.client_count(), 2);
        assert_eq!(g.waiter_count(), 1);
        assert_eq!(g.short_offers(), 1);
        g.check_accounting().unwrap();
    }

    #[test]
    fn fake_rounds_leave_board_untouched() {
        let mut g = GameState::new(BoardSpec::complete(4, 1)).unwrap();
        let before = g.owner.clone();
        g.apply_fake_round();
        assert_eq!(g.fake_rounds(), 1);
        g.apply_fake_round();
        assert_eq!(g.fake_rounds(), 2);
        assert_eq!(g.client_count(), 0);
        assert_eq!(g.owner, before);
        assert_eq!(g.round(), 2);
        assert_eq!(g.real_rounds(), 0);
    }
}
