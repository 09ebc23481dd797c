use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use wcg_core::solver::{
    clique_game, connectivity_game, edge_universe, hamilton_game, perfect_matching_game, HypergraphGame, SolveResult, Solver,
};
use wcg_core::Edge;

/// A game read from a file or built from a name such as `matching:4`.
pub struct NamedGame {
    pub game: HypergraphGame,
    /// Board edges behind the element indices, for graph games.
    pub edges: Option<Vec<Edge>>,
}

pub fn load(spec: &str, bias: Option<u32>) -> Result<NamedGame> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        let mut game: HypergraphGame = serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
        if let Some(b) = bias {
            game.bias = b;
        }
        return Ok(NamedGame { game, edges: None });
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| -> Result<usize> {
        parts.get(i).with_context(|| format!("{spec:?} is missing a size"))?.parse().with_context(|| format!("bad size in {spec:?}"))
    };
    let b = bias.unwrap_or(1);
    let (game, m) = match parts[0] {
        "single" => return Ok(NamedGame { game: HypergraphGame { universe: 1, bias: b, sets: vec![vec![0]] }, edges: None }),
        "connectivity" => (connectivity_game(num(1)?, b), num(1)?),
        "matching" => (perfect_matching_game(num(1)?, b), num(1)?),
        "hamilton" => (hamilton_game(num(1)?, b), num(1)?),
        "clique" => (clique_game(num(1)?, num(2)?, b), num(1)?),
        other => bail!("{other:?} is neither a file nor a named game (single, connectivity:n, matching:n, hamilton:n, clique:m:t)"),
    };
    Ok(NamedGame { game, edges: Some(edge_universe(m)) })
}

#[derive(Serialize)]
struct Report<'a> {
    universe: usize,
    bias: u32,
    winning_sets: usize,
    #[serde(flatten)]
    result: &'a SolveResult,
}

pub fn solve(named: &NamedGame, budget: usize, json: bool) -> Result<String> {
    let mut solver = Solver::new(&named.game, budget)?;
    let result = solver.solve()?;
    if json {
        let report = Report { universe: named.game.universe, bias: named.game.bias, winning_sets: named.game.sets.len(), result: &result };
        return Ok(serde_json::to_string_pretty(&report)?);
    }
    let label = |i: usize| match &named.edges {
        Some(edges) => format!("{}-{}", edges[i].lo(), edges[i].hi()),
        None => i.to_string(),
    };
    let mut out = String::new();
    out.push_str(&format!("tau: {}\n", result.tau));
    out.push_str(&format!("states visited: {}\n", result.states_visited));
    if result.short_offer_used {
        out.push_str("principal variation uses a short offer\n");
    }
    out.push_str("principal variation:\n");
    for (i, step) in result.principal_variation.iter().enumerate() {
        let offer: Vec<String> = step.offer.iter().map(|&e| label(e)).collect();
        out.push_str(&format!("  {:>2}: offer [{}] -> {}\n", i + 1, offer.join(", "), label(step.pick)));
    }
    Ok(out)
}
