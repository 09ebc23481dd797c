use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wcg_core::biased::Profile;
use wcg_core::registry::RunConfig;
use wcg_core::solver::{connectivity_game, perfect_matching_game, Solver};
use wcg_core::ProbeLevel;

fn config(strategy: &str, n: usize, bias: u32, probes: ProbeLevel) -> RunConfig {
    let mut c = RunConfig::new(strategy.parse().unwrap(), "random".parse().unwrap(), n, 7);
    c.bias = bias;
    c.probes = probes;
    c.constants = Profile::Desk;
    c
}

fn full_games(c: &mut Criterion) {
    let mut group = c.benchmark_group("game");
    group.sample_size(10);
    let cases = [
        ("pm-complete", 200, 1),
        ("pm-bipartite", 100, 1),
        ("ham-unbiased", 300, 1),
        ("pancyclic", 1024, 1),
        ("tree-embed:random:5", 800, 1),
        ("tree-factor:path:3", 300, 1),
        ("triangle-factor", 300, 1),
        ("ham-biased", 1000, 2),
        ("pm-biased", 1000, 2),
    ];
    for (id, n, b) in cases {
        for probes in [ProbeLevel::Off, ProbeLevel::PerRound] {
            let cfg = config(id, n, b, probes);
            let label = format!("{id}/{probes:?}");
            group.bench_with_input(BenchmarkId::new(label, n), &cfg, |bench, cfg| bench.iter(|| cfg.run().unwrap()));
        }
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver");
    for (name, game) in [
        ("connectivity-k4", connectivity_game(4, 1)),
        ("connectivity-k5", connectivity_game(5, 1)),
        ("matching-k6", perfect_matching_game(6, 1)),
    ] {
        group.sample_size(10);
        group.bench_function(name, |bench| bench.iter(|| Solver::new(&game, 50_000_000).unwrap().solve().unwrap()));
    }
    group.finish();
}

criterion_group!(benches, full_games, solver);
criterion_main!(benches);
