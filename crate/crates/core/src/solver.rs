//! Exact minimax values of Waiter-Client hypergraph games on tiny universes.
//!
//! A position is the pair of element sets claimed by Waiter and Client. Its
//! value is the number of further rounds Waiter needs to force Client to own
//! a winning set: 0 once Client owns one, otherwise one plus the minimum over
//! offers of the maximum over Client's picks. Positions where Client can
//! avoid every winning set for good are [`Tau::Unwinnable`].

use crate::game::{GameState, Offer, Owner};
use crate::graph::{pair_count, Edge, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

pub const MAX_UNIVERSE: usize = 24;
const INF: u8 = u8::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphGame {
    pub universe: usize,
    pub bias: u32,
    /// Winning sets as element index lists.
    pub sets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("universe of {0} elements exceeds the supported {MAX_UNIVERSE}")]
    UniverseTooLarge(usize),
    #[error("invalid game: {0}")]
    Invalid(String),
    #[error("state budget of {0} positions exceeded")]
    BudgetExceeded(usize),
    #[error("position has not been solved")]
    Unsolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tau {
    Rounds(u32),
    Unwinnable,
}

impl Tau {
    fn from_raw(v: u8) -> Tau {
        if v == INF {
            Tau::Unwinnable
        } else {
            Tau::Rounds(v as u32)
        }
    }
}

impl std::fmt::Display for Tau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tau::Rounds(r) => write!(f, "{r}"),
            Tau::Unwinnable => write!(f, "unwinnable"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PvStep {
    pub offer: Vec<usize>,
    pub pick: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub tau: Tau,
    pub principal_variation: Vec<PvStep>,
    pub states_visited: usize,
    /// The principal variation contains an offer shorter than `b + 1`.
    pub short_offer_used: bool,
}

/// Memoized minimax solver for one game.
#[derive(Clone)]
pub struct Solver {
    sets: Vec<u32>,
    full: u32,
    width: usize,
    memo: HashMap<(u32, u32), u8>,
    budget: usize,
}

impl HypergraphGame {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.universe > MAX_UNIVERSE {
            return Err(SolveError::UniverseTooLarge(self.universe));
        }
        if self.bias < 1 {
            return Err(SolveError::Invalid("bias must be at least 1".into()));
        }
        for s in &self.sets {
            if s.is_empty() || s.iter().any(|&x| x >= self.universe) {
                return Err(SolveError::Invalid(format!("winning set {s:?} is empty or out of range")));
            }
        }
        Ok(())
    }

    fn masks(&self) -> Vec<u32> {
        self.sets.iter().map(|s| s.iter().fold(0u32, |m, &x| m | (1 << x))).collect()
    }

    /// Smallest winning-set size.
    pub fn min_set_size(&self) -> Option<usize> {
        self.masks().iter().map(|m| m.count_ones() as usize).min()
    }
}

impl Solver {
    pub fn new(game: &HypergraphGame, budget: usize) -> Result<Solver, SolveError> {
        game.validate()?;
        let full = if game.universe == 32 { u32::MAX } else { (1u32 << game.universe) - 1 };
        Ok(Solver {
            sets: game.masks(),
            full,
            width: game.bias as usize + 1,
            memo: HashMap::new(),
            budget,
        })
    }

    fn width_of_universe(&self) -> usize {
        self.full.count_ones() as usize
    }

    pub fn states(&self) -> usize {
        self.memo.len()
    }

    fn offers(&self, free: u32) -> Vec<u32> {
        let bits: Vec<u32> = (0..32).filter(|b| free >> b & 1 == 1).collect();
        let k = self.width.min(bits.len());
        let mut out = Vec::new();
        if k == 0 {
            return out;
        }
        let m = bits.len();
        let mut idx: u64 = (1u64 << k) - 1;
        while idx < (1u64 << m) {
            let mut mask = 0u32;
            for (i, &b) in bits.iter().enumerate() {
                if idx >> i & 1 == 1 {
                    mask |= 1 << b;
                }
            }
            out.push(mask);
            let c = idx & idx.wrapping_neg();
            let r = idx + c;
            idx = (((r ^ idx) >> 2) / c) | r;
        }
        out.sort_unstable();
        out
    }

    fn terminal(&self, w: u32, c: u32) -> Option<u8> {
        if self.sets.iter().any(|&s| s & !c == 0) {
            return Some(0);
        }
        if self.sets.iter().all(|&s| s & w != 0) || self.full & !(w | c) == 0 {
            return Some(INF);
        }
        None
    }

    /// Exact value of the position `(waiter, client)`.
    pub fn value(&mut self, w: u32, c: u32) -> Result<u8, SolveError> {
        if let Some(&v) = self.memo.get(&(w, c)) {
            return Ok(v);
        }
        let v = match self.terminal(w, c) {
            Some(v) => v,
            None => {
                let free = self.full & !(w | c);
                let mut best = INF;
                for offer in self.offers(free) {
                    let mut worst = 0u8;
                    let mut rest = offer;
                    while rest != 0 {
                        let e = rest & rest.wrapping_neg();
                        rest &= rest - 1;
                        let child = self.value(w | (offer & !e), c | e)?;
                        worst = worst.max(child);
                        if worst >= best {
                            break;
                        }
                    }
                    best = best.min(worst);
                    if best == 0 {
                        break;
                    }
                }
                if best == INF {
                    INF
                } else {
                    best + 1
                }
            }
        };
        if self.memo.len() >= self.budget {
            return Err(SolveError::BudgetExceeded(self.budget));
        }
        self.memo.insert((w, c), v);
        Ok(v)
    }

    fn children_max(&mut self, w: u32, c: u32, offer: u32) -> Result<(u8, u32), SolveError> {
        let mut worst = 0u8;
        let mut arg = 0u32;
        let mut rest = offer;
        while rest != 0 {
            let e = rest & rest.wrapping_neg();
            rest &= rest - 1;
            let child = self.value(w | (offer & !e), c | e)?;
            if child > worst || arg == 0 {
                worst = worst.max(child);
                arg = e;
            }
        }
        Ok((worst, arg))
    }

    /// Lexicographically first offer attaining the minimax value of a solved position.
    pub fn optimal_offer(&mut self, w: u32, c: u32) -> Result<u32, SolveError> {
        let v = *self.memo.get(&(w, c)).ok_or(SolveError::Unsolved)?;
        if v == 0 {
            return Ok(0);
        }
        let free = self.full & !(w | c);
        let offers = self.offers(free);
        for &offer in &offers {
            let (worst, _) = self.children_max(w, c, offer)?;
            if v == INF || worst == v - 1 {
                return Ok(offer);
            }
        }
        Err(SolveError::Unsolved)
    }

    /// Client's best reply: the pick with the largest child value, lowest element on ties.
    pub fn best_pick(&mut self, w: u32, c: u32, offer: u32) -> Result<u32, SolveError> {
        Ok(self.children_max(w, c, offer)?.1)
    }

    pub fn solve(&mut self) -> Result<SolveResult, SolveError> {
        let root = self.value(0, 0)?;
        let (mut w, mut c) = (0u32, 0u32);
        let mut pv = Vec::new();
        let mut short = false;
        if root != INF {
            while self.value(w, c)? > 0 {
                let offer = self.optimal_offer(w, c)?;
                if (offer.count_ones() as usize) < self.width {
                    short = true;
                }
                let pick = self.best_pick(w, c, offer)?;
                pv.push(PvStep {
                    offer: (0..32).filter(|b| offer >> b & 1 == 1).collect(),
                    pick: pick.trailing_zeros() as usize,
                });
                w |= offer & !pick;
                c |= pick;
            }
        }
        Ok(SolveResult {
            tau: Tau::from_raw(root),
            principal_variation: pv,
            states_visited: self.memo.len(),
            short_offer_used: short,
        })
    }

    /// Re-derives every memoized value from its children without pruning.
    /// Returns the number of nodes checked and the mismatching positions.
    pub fn verify_memo(&mut self) -> Result<(usize, Vec<(u32, u32)>), SolveError> {
        let keys: Vec<((u32, u32), u8)> = self.memo.iter().map(|(&k, &v)| (k, v)).collect();
        let mut bad = Vec::new();
        for &((w, c), v) in &keys {
            let expect = match self.terminal(w, c) {
                Some(t) => t,
                None => {
                    let free = self.full & !(w | c);
                    let mut best = INF;
                    for offer in self.offers(free) {
                        let (worst, _) = self.children_max(w, c, offer)?;
                        best = best.min(worst);
                    }
                    if best == INF {
                        INF
                    } else {
                        best + 1
                    }
                }
            };
            if expect != v {
                bad.push((w, c));
            }
        }
        Ok((keys.len(), bad))
    }
}

/// Solves with a default state budget.
pub fn tau_wc(game: &HypergraphGame) -> Result<SolveResult, SolveError> {
    Solver::new(game, 20_000_000)?.solve()
}

/// The edges of `K_n` in index order; element `i` is `Edge::from_index(i)`.
pub fn edge_universe(n: usize) -> Vec<Edge> {
    (0..pair_count(n)).map(Edge::from_index).collect()
}

/// Games on the edge set of `K_n` whose winning sets are given as edge lists.
pub fn graph_game(n: usize, bias: u32, sets: Vec<Vec<Edge>>) -> HypergraphGame {
    HypergraphGame {
        universe: pair_count(n),
        bias,
        sets: sets.into_iter().map(|s| s.iter().map(|e| e.index()).collect()).collect(),
    }
}

/// Spanning trees of `K_n` as winning sets (minimal connected spanning subgraphs).
pub fn connectivity_game(n: usize, bias: u32) -> HypergraphGame {
    let edges = edge_universe(n);
    let mut sets = Vec::new();
    for mask in 0u32..(1 << edges.len()) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let chosen: Vec<Edge> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
        let mut uf = crate::graph::UnionFind::new(n);
        if chosen.iter().all(|e| uf.union(e.lo() as usize, e.hi() as usize)) {
            sets.push(chosen);
        }
    }
    graph_game(n, bias, sets)
}

/// Perfect matchings of `K_n` as winning sets.
pub fn perfect_matching_game(n: usize, bias: u32) -> HypergraphGame {
    fn rec(left: &mut Vec<Vertex>, cur: &mut Vec<Edge>, out: &mut Vec<Vec<Edge>>) {
        if left.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = left.remove(0);
        for i in 0..left.len() {
            let b = left.remove(i);
            cur.push(Edge::new(a, b));
            rec(left, cur, out);
            cur.pop();
            left.insert(i, b);
        }
        left.insert(0, a);
    }
    let mut out = Vec::new();
    rec(&mut (0..n as Vertex).collect(), &mut Vec::new(), &mut out);
    graph_game(n, bias, out)
}

/// Copies of `K_t` inside `K_m` as winning sets.
pub fn clique_game(m: usize, t: usize, bias: u32) -> HypergraphGame {
    let mut sets = Vec::new();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != t {
            continue;
        }
        let vs: Vec<Vertex> = (0..m as Vertex).filter(|v| mask >> v & 1 == 1).collect();
        let mut s = Vec::new();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                s.push(Edge::new(vs[i], vs[j]));
            }
        }
        sets.push(s);
    }
    graph_game(m, bias, sets)
}

/// Hamilton cycles of `K_m` as winning sets.
pub fn hamilton_game(m: usize, bias: u32) -> HypergraphGame {
    let mut sets = Vec::new();
    let mut perm: Vec<Vertex> = (1..m as Vertex).collect();
    fn permute(k: usize, perm: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if k == perm.len() {
            out.push(perm.clone());
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permute(k + 1, perm, out);
            perm.swap(k, i);
        }
    }
    let mut orders = Vec::new();
    permute(0, &mut perm, &mut orders);
    for o in orders {
        if o.first() > o.last() {
            continue;
        }
        let mut cyc = vec![0];
        cyc.extend(o);
        let mut s: Vec<Edge> = (0..m).map(|i| Edge::new(cyc[i], cyc[(i + 1) % m])).collect();
        s.sort_unstable();
        sets.push(s);
    }
    graph_game(m, bias, sets)
}

/// Plays solver-optimal offers for a graph game whose element `i` is edge
/// `edges[i]` of a host board.
#[derive(Clone)]
pub struct SolverWaiter {
    solver: Solver,
    edges: Vec<Edge>,
    sets: Vec<u32>,
}

impl SolverWaiter {
    pub fn new(game: &HypergraphGame, edges: Vec<Edge>, budget: usize) -> Result<Self, SolveError> {
        if edges.len() != game.universe {
            return Err(SolveError::Invalid("edge map does not match the universe".into()));
        }
        let mut solver = Solver::new(game, budget)?;
        solver.value(0, 0)?;
        Ok(SolverWaiter { sets: game.masks(), solver, edges })
    }

    /// Wraps a solver that has already evaluated the start position.
    pub fn from_solver(solver: Solver, edges: Vec<Edge>) -> Result<Self, SolveError> {
        if edges.len() != solver.width_of_universe() {
            return Err(SolveError::Invalid("edge map does not match the universe".into()));
        }
        Ok(SolverWaiter { sets: solver.sets.clone(), solver, edges })
    }

    /// Points the same solved game at a different set of host edges.
    pub fn retarget(&mut self, edges: Vec<Edge>) -> Result<(), SolveError> {
        if edges.len() != self.edges.len() {
            return Err(SolveError::Invalid("edge map does not match the universe".into()));
        }
        self.edges = edges;
        Ok(())
    }

    fn position(&self, game: &GameState) -> (u32, u32) {
        let (mut w, mut c) = (0, 0);
        for (i, &e) in self.edges.iter().enumerate() {
            match game.owner(e) {
                Owner::Waiter => w |= 1 << i,
                Owner::Client => c |= 1 << i,
                _ => {}
            }
        }
        (w, c)
    }

    /// The winning set Client owns, if any, as host edges.
    pub fn won(&self, game: &GameState) -> Option<Vec<Edge>> {
        let (_, c) = self.position(game);
        self.sets
            .iter()
            .find(|&&s| s & !c == 0)
            .map(|&s| (0..self.edges.len()).filter(|i| s >> i & 1 == 1).map(|i| self.edges[i]).collect())
    }

    /// Next optimal offer, or `None` when the game is won or lost.
    pub fn next_offer(&mut self, game: &GameState) -> Result<Option<Offer>, SolveError> {
        let (w, c) = self.position(game);
        let v = self.solver.value(w, c)?;
        if v == 0 || v == INF {
            return Ok(None);
        }
        let offer = self.solver.optimal_offer(w, c)?;
        Ok(Some(Offer::new(
            (0..self.edges.len()).filter(|i| offer >> i & 1 == 1).map(|i| self.edges[i]).collect(),
        )))
    }

    /// Remaining forced rounds from the current position.
    pub fn remaining(&mut self, game: &GameState) -> Result<Tau, SolveError> {
        let (w, c) = self.position(game);
        Ok(Tau::from_raw(self.solver.value(w, c)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_element() {
        let g = HypergraphGame { universe: 1, bias: 1, sets: vec![vec![0]] };
        let r = tau_wc(&g).unwrap();
        assert_eq!(r.tau, Tau::Rounds(1));
        assert!(r.short_offer_used);
    }

    #[test]
    fn offers_are_lexicographic() {
        let s = Solver::new(&HypergraphGame { universe: 4, bias: 1, sets: vec![vec![0]] }, 100).unwrap();
        assert_eq!(s.offers(0b1111), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(s.offers(0b0100), vec![0b0100]);
    }

    #[test]
    fn optimal_offer_on_terminal_is_empty() {
        let g = HypergraphGame { universe: 2, bias: 1, sets: vec![vec![0]] };
        let mut s = Solver::new(&g, 100).unwrap();
        s.value(0b10, 0b01).unwrap();
        assert_eq!(s.optimal_offer(0b10, 0b01).unwrap(), 0);
        assert_eq!(s.optimal_offer(0, 0), Err(SolveError::Unsolved));
    }

    #[test]
    fn budget_is_enforced() {
        let g = perfect_matching_game(4, 1);
        assert!(matches!(Solver::new(&g, 3).unwrap().solve(), Err(SolveError::BudgetExceeded(3))));
    }
}
