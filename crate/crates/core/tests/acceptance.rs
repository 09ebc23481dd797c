//! End-to-end acceptance run: one line per criterion, nonzero exit on failure.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test -p wcg-core --test acceptance -- 3 8`.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{brute, Goal};
use wcg_core::biased::Profile;
use wcg_core::client::{AntiStructure, ClientPolicy, LastEdgeAvoider, MinWaiterDegree, ScriptedClient, UniformRandom};
use wcg_core::engine::{enumerate_replies, play};
use wcg_core::graph::{Edge, Vertex};
use wcg_core::matching::PmBipartite;
use wcg_core::pancyclic::round_budget;
use wcg_core::registry::{ClientSpec, RunConfig, StrategySpec};
use wcg_core::solver::{connectivity_game, perfect_matching_game, Solver, Tau};
use wcg_core::transcript::Transcript;
use wcg_core::tree::{random_tree, TreeEmbedConfig, TreeEmbedStrategy};
use wcg_core::triangle::{
    count_lower_bound, BatchRule, BatchThenRandom, Delayer, GreedyCloser, RandomOffers, TriangleFactorStrategy,
    TwoTriangleStrategy, SCRIPT_MOVES,
};
use wcg_core::{BoardSpec, Certificate, GameState, ProbeLevel, Target, WaiterStrategy};

const CLIENTS: [&str; 3] = ["random", "min-waiter-degree", "anti-structure"];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn config(strategy: &str, client: &str, n: usize, seed: u64) -> RunConfig {
    let strategy: StrategySpec = strategy.parse().unwrap();
    let client: ClientSpec = client.parse().unwrap();
    RunConfig::new(strategy, client, n, seed)
}

/// Runs every config and returns the failures, each described in one line.
fn sweep<F>(configs: Vec<RunConfig>, judge: F) -> (usize, Vec<String>)
where
    F: Fn(&RunConfig, &Transcript) -> Option<String> + Sync,
{
    let total = configs.len();
    let mut failures: Vec<String> = configs
        .par_iter()
        .filter_map(|c| {
            let t = match c.run() {
                Ok(t) => t,
                Err(e) => return Some(format!("{} n={} seed={}: setup {e}", c.strategy, c.n, c.seed)),
            };
            judge(c, &t).map(|why| format!("{} vs {} n={} b={} seed={}: {why}", c.strategy, c.client, c.n, c.bias, c.seed))
        })
        .collect();
    failures.sort();
    (total, failures)
}

/// Clean run within the configured bound.
fn clean_within_bound(c: &RunConfig, t: &Transcript) -> Option<String> {
    if !t.is_clean() {
        let failed: Vec<_> = t.checks.iter().filter(|s| s.failed > 0).map(|s| s.probe.clone()).collect();
        return Some(format!("error={:?} valid={} probes={failed:?}", t.error, t.certificate_valid));
    }
    let bound = c.round_bound().unwrap();
    (t.real_rounds as f64 > bound + 1e-9).then(|| format!("{} real rounds > {bound}", t.real_rounds))
}

fn summarize(label: &str, total: usize, failures: &[String], elapsed: Duration) -> Outcome {
    let mut detail = format!("{label}: {}/{total} runs ok in {:.1}s", total - failures.len(), elapsed.as_secs_f64());
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; first failure: {first}"));
    }
    Outcome::new(failures.is_empty(), detail)
}

fn within(mut out: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed > limit {
        out.pass = false;
        out.detail.push_str(&format!("; over the {}s budget", limit.as_secs()));
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let configs: Vec<_> = (24..=200)
        .step_by(2)
        .flat_map(|n| (0..20).flat_map(move |s| CLIENTS.map(|c| config("pm-complete", c, n, s))))
        .collect();
    let (total, failures) = sweep(configs, clean_within_bound);
    let elapsed = start.elapsed();
    let out = summarize("perfect matching on K_n, every even n in [24,200]", total, &failures, elapsed);
    within(out, elapsed, Duration::from_secs(60))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let configs: Vec<_> = (12..=100)
        .flat_map(|n| (0..5).flat_map(move |s| CLIENTS.map(|c| config("pm-bipartite", c, n, s))))
        .collect();
    let (total, mut failures) = sweep(configs, clean_within_bound);

    let n = 12;
    let obstacles: Vec<Edge> = {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut set = BTreeSet::new();
        while set.len() < n / 2 {
            set.insert(Edge::new(rng.gen_range(0..n) as Vertex, (n + rng.gen_range(0..n)) as Vertex));
        }
        set.into_iter().collect()
    };
    let mut bad = 0;
    let leaves = enumerate_replies(
        || {
            let g = GameState::new(BoardSpec::bipartite_minus(n, obstacles.clone(), 1)).unwrap();
            let s = PmBipartite::new(g.board(), ProbeLevel::PerRound).unwrap();
            (g, s)
        },
        n + 2,
        |leaf| {
            let ok = matches!(&leaf.result, Ok(c) if c.is_valid(&leaf.game)) && leaf.game.real_rounds() <= n + 1;
            if !ok {
                bad += 1;
            }
        },
    );
    if bad > 0 {
        failures.push(format!("exhaustive n=12: {bad} of {leaves} reply sequences fail"));
    }
    let mut out = summarize("bipartite perfect matching, every n in [12,100]", total, &failures, start.elapsed());
    out.detail.push_str(&format!("; exhaustive n=12 with e(H)=6: {leaves} leaves, {bad} failures"));
    within(out, start.elapsed(), Duration::from_secs(300))
}

fn ham_sizes() -> Vec<usize> {
    (40..=300).collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let configs: Vec<_> = ham_sizes()
        .into_iter()
        .flat_map(|n| (0..20).flat_map(move |s| CLIENTS.map(|c| config("ham-unbiased", c, n, s))))
        .collect();
    let (total, failures) = sweep(configs, clean_within_bound);
    let out = summarize("Hamilton cycle, every n in [40,300]", total, &failures, start.elapsed());
    within(out, start.elapsed(), Duration::from_secs(120))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let configs: Vec<_> = ham_sizes()
        .into_iter()
        .flat_map(|n| (0..20).map(move |s| config("ham-unbiased", "avoider", n, s)))
        .collect();
    let (total, failures) = sweep(configs, |c, t| {
        clean_within_bound(c, t).or_else(|| (t.real_rounds <= c.n).then(|| format!("finished in {} rounds", t.real_rounds)))
    });
    summarize("last-edge avoider keeps every Hamilton run above n rounds", total, &failures, start.elapsed())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let configs: Vec<_> = [512, 1024, 2048, 4096]
        .into_iter()
        .flat_map(|n| (0..5).map(move |s| config("pancyclic", CLIENTS[s as usize % 3], n, s)))
        .collect();
    let (total, failures) = sweep(configs, |c, t| {
        if !t.is_clean() {
            return Some(format!("error={:?} valid={}", t.error, t.certificate_valid));
        }
        let budget = round_budget(c.n);
        (t.real_rounds + t.fake_rounds > budget).then(|| format!("{}+{} rounds > {budget}", t.real_rounds, t.fake_rounds))
    });
    let out = summarize("pancyclic, n in {512,1024,2048,4096}", total, &failures, start.elapsed());
    within(out, start.elapsed(), Duration::from_secs(180))
}

fn client_by_index(i: u64, target: Target, seed: u64) -> Box<dyn ClientPolicy> {
    match i % 4 {
        0 => Box::new(UniformRandom::new(seed)),
        1 => Box::new(MinWaiterDegree),
        2 => Box::new(AntiStructure::new(target)),
        _ => Box::new(LastEdgeAvoider::new(target, seed)),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut failures: Vec<String> = (0..200u64)
        .into_par_iter()
        .filter_map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(400..=1600);
            let tree = random_tree(&mut rng, n, 5);
            let target = Target::Tree { edges: tree.edges() };
            let config = TreeEmbedConfig { probes: ProbeLevel::PerRound, ..TreeEmbedConfig::default() };
            let mut s = TreeEmbedStrategy::new(tree, config).unwrap();
            let mut game = GameState::new(BoardSpec::complete(n, 1)).unwrap();
            let mut client = client_by_index(seed, target, seed);
            let why = match play(&mut game, &mut s, client.as_mut(), 3 * n) {
                Err(e) => Some(format!("{e}")),
                Ok(Certificate::TreeEmbedding { map, .. }) => {
                    if map[s.pin() as usize] != s.board_pin() {
                        Some("pin not honoured".into())
                    } else if game.real_rounds() > n {
                        Some(format!("{} rounds", game.real_rounds()))
                    } else if !s.checks().is_clean() {
                        Some("probe failure".into())
                    } else {
                        None
                    }
                }
                Ok(other) => Some(format!("unexpected certificate {}", other.kind_name())),
            };
            why.map(|w| format!("random tree seed={seed} n={n}: {w}"))
        })
        .collect();
    let mut total = 200;

    let special: Vec<_> = [400, 800, 1600]
        .into_iter()
        .flat_map(|n| {
            (0..4u64).flat_map(move |s| {
                ["random", "min-waiter-degree", "anti-structure", "avoider"]
                    .map(|c| [config("tree-embed:path", c, n, s), config("tree-embed:tipped", c, n, s)])
            })
        })
        .flatten()
        .collect();
    let (count, more) = sweep(special, |c, t| {
        if !t.is_clean() {
            return Some(format!("error={:?}", t.error));
        }
        let want = match (c.strategy, c.client) {
            (StrategySpec::TreeEmbed { shape: wcg_core::registry::TreeShape::Path }, _) => Some(c.n - 1),
            (_, ClientSpec::Avoider) => Some(c.n),
            _ => None,
        };
        match want {
            Some(w) if t.real_rounds != w => Some(format!("{} rounds, expected exactly {w}", t.real_rounds)),
            None if t.real_rounds > c.n => Some(format!("{} rounds > n", t.real_rounds)),
            _ => None,
        }
    });
    total += count;
    failures.extend(more);
    failures.sort();
    summarize(
        "spanning trees: 200 random (max degree 5), path exactly n-1, tipped exactly n vs avoider",
        total,
        &failures,
        start.elapsed(),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut configs = Vec::new();
    for n in [60, 300] {
        for id in ["tree-factor:path:3", "tree-factor:path:5", "tree-factor:tipped:5", "tree-factor:tipped:6"] {
            for s in 0..5 {
                configs.extend(CLIENTS.map(|c| config(id, c, n, s)));
            }
        }
    }
    let (total, mut failures) = sweep(configs, clean_within_bound);
    let exact: Vec<_> = [60, 300]
        .into_iter()
        .flat_map(|n| ["path-factor:3", "path-factor:5"].map(|id| (0..5).flat_map(move |s| CLIENTS.map(|c| config(id, c, n, s)))))
        .flatten()
        .collect();
    let (count, more) = sweep(exact, |c, t| {
        clean_within_bound(c, t).or_else(|| {
            let StrategySpec::PathFactor { k } = c.strategy else { unreachable!() };
            let want = (k - 1) * c.n / k;
            (t.real_rounds != want).then(|| format!("{} rounds, expected exactly {want}", t.real_rounds))
        })
    });
    failures.extend(more);
    let mut out = summarize("tree factors, n in {60,300}", total + count, &failures, start.elapsed());
    out.detail.push_str("; tipped tree at k=3 not applicable (needs k >= 5), run at k in {5,6}");
    out
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let vertices: Vec<Vertex> = (0..12).collect();
    let build = || {
        let g = GameState::new(BoardSpec::complete(12, 1)).unwrap();
        (g, TwoTriangleStrategy::new(&vertices, 0, 1).unwrap())
    };
    let mut sequences = Vec::new();
    let mut failures = Vec::new();
    let leaves = enumerate_replies(build, SCRIPT_MOVES + 1, |leaf| {
        if leaf.result.is_err() || leaf.game.real_rounds() > SCRIPT_MOVES {
            failures.push(format!("picks {:?}: {:?}", leaf.picks, leaf.result.as_ref().err()));
        }
        sequences.push(leaf.picks.clone());
    });
    for picks in &sequences {
        let (mut g, mut s) = build();
        let ok = play(&mut g, &mut s, &mut ScriptedClient::new(picks.clone()), SCRIPT_MOVES + 1).is_ok()
            && s.script().properties_hold(&g);
        if !ok {
            failures.push(format!("picks {picks:?}: properties fail on replay"));
        }
    }
    let elapsed = start.elapsed();
    let out = summarize("two triangles on K_12, every reply sequence", leaves, &failures, elapsed);
    within(out, elapsed, Duration::from_secs(1))
}

fn triangles_of(c: &Certificate) -> Option<Vec<[Vertex; 3]>> {
    match c {
        Certificate::TriangleFactor { triangles } => Some(triangles.clone()),
        _ => None,
    }
}

/// Plays `waiter` against a fresh delayer and judges the counting argument.
fn delayer_run(mut game: GameState, waiter: &mut dyn WaiterStrategy, limit: usize) -> Result<Option<String>, String> {
    let mut delayer = Delayer::new();
    let cert = match play(&mut game, waiter, &mut delayer, limit) {
        Ok(c) => c,
        Err(_) => return Ok(None),
    };
    let triangles = triangles_of(&cert).ok_or("not a triangle factor")?;
    let v = count_lower_bound(&game, &triangles, delayer.marked());
    if v.holds && v.high_degree && v.marks_cover {
        Ok(Some(format!("{}", game.real_rounds())))
    } else {
        Err(format!("{v:?}"))
    }
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let rules = ["lowest", "highest", "random:1"];
    let configs: Vec<_> = [150, 300]
        .into_iter()
        .flat_map(|n| {
            rules.map(|r| {
                (0..3).flat_map(move |s| ["random", "min-waiter-degree", "delayer"].map(|c| config(&format!("triangle-factor:{r}"), c, n, s)))
            })
        })
        .flatten()
        .collect();
    let (total, mut failures) = sweep(configs, clean_within_bound);

    #[derive(Clone, Copy)]
    enum Pool {
        Factor(BatchRule),
        Random,
        Greedy,
        Batch,
    }
    let mut pool_runs = Vec::new();
    for rule in [BatchRule::Lowest, BatchRule::Highest, BatchRule::Random(3)] {
        for n in [150, 300] {
            pool_runs.push((Pool::Factor(rule), n, 0u64));
        }
    }
    for p in [Pool::Random, Pool::Greedy, Pool::Batch] {
        for n in [18, 24, 30] {
            for s in 0..10 {
                pool_runs.push((p, n, s));
            }
        }
    }
    let results: Vec<(usize, Result<Option<String>, String>)> = pool_runs
        .par_iter()
        .map(|&(p, n, seed)| {
            let mut game = GameState::new(BoardSpec::complete(n, 1)).unwrap();
            let limit = n * n;
            let r = match p {
                Pool::Factor(rule) => {
                    let mut s = TriangleFactorStrategy::with_seeded_reservoir(&mut game, rule, ProbeLevel::Final).unwrap();
                    delayer_run(game, &mut s, limit)
                }
                Pool::Random => delayer_run(game, &mut RandomOffers::new(seed), limit),
                Pool::Greedy => delayer_run(game, &mut GreedyCloser::new(seed), limit),
                Pool::Batch => delayer_run(game, &mut BatchThenRandom::new(n, seed), limit),
            };
            (n, r)
        })
        .collect();
    let completions = results.iter().filter(|(_, r)| matches!(r, Ok(Some(_)))).count();
    for (n, r) in &results {
        if let Err(e) = r {
            failures.push(format!("delayer counting fails at n={n}: {e}"));
        }
    }
    let mut out = summarize("triangle factor, seeded runs at n in {150,300}", total, &failures, start.elapsed());
    out.detail.push_str(&format!(
        "; delayer vs 6 Waiter policies: {completions} of {} games completed, all satisfy the counting bound",
        results.len()
    ));
    if completions == 0 {
        out.pass = false;
    }
    out
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut configs = Vec::new();
    for b in [2, 3, 5] {
        for id in ["ham-biased", "pm-biased"] {
            for (i, c) in ["random", "min-waiter-degree", "anti-structure", "avoider"].into_iter().enumerate() {
                let mut cfg = config(id, c, 3000, i as u64);
                cfg.bias = b;
                cfg.constants = Profile::Desk;
                configs.push(cfg);
            }
        }
    }
    let (total, failures) = sweep(configs, clean_within_bound);
    summarize("biased games at n=3000, b in {2,3,5}, desk constants", total, &failures, start.elapsed())
}

fn criterion_11() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let mut solve = |name: &str, game, expected: Tau| {
        let mut s = Solver::new(&game, 10_000_000).unwrap();
        let tau = s.solve().unwrap().tau;
        let (checked, bad) = s.verify_memo().unwrap();
        let ok = tau == expected && bad.is_empty();
        pass &= ok;
        notes.push(format!("{name} tau={tau:?} memo {checked} checked {} bad", bad.len()));
    };
    let k3 = brute(Goal::Connected, 3, 1);
    let k4 = brute(Goal::PerfectMatching, 4, 1);
    solve("K_3 connectivity", connectivity_game(3, 1), k3);
    solve("K_4 perfect matching", perfect_matching_game(4, 1), k4);
    let at_least_three = match k4 {
        Tau::Rounds(r) => r >= 3,
        Tau::Unwinnable => true,
    };
    pass &= k3 == Tau::Rounds(2) && at_least_three;
    Outcome::new(pass, format!("exact solver vs brute force: {}", notes.join(", ")))
}

fn main() -> ExitCode {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(usize, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let out = run();
        println!("criterion {id:>2}: {} {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
