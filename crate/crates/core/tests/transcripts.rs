use wcg_core::registry::{verify, ClientSpec, RunConfig, StrategySpec};
use wcg_core::transcript::{RoundEntry, Transcript};
use wcg_core::Certificate;

fn cfg(id: &str, client: &str, n: usize, bias: u32, seed: u64) -> RunConfig {
    let mut c = RunConfig::new(id.parse().unwrap(), client.parse().unwrap(), n, seed);
    c.bias = bias;
    c
}

fn small_runs() -> Vec<RunConfig> {
    vec![
        cfg("pm-complete", "random", 24, 1, 1),
        cfg("pm-bipartite", "anti-structure", 16, 1, 2),
        cfg("ham-unbiased", "min-waiter-degree", 40, 1, 3),
        cfg("pancyclic", "random", 512, 1, 4),
        cfg("tree-embed:random:4", "random", 120, 1, 5),
        cfg("tree-embed:path", "avoider", 60, 1, 6),
        cfg("tree-factor:tipped:5", "random", 60, 1, 7),
        cfg("path-factor:3", "random", 30, 1, 8),
        cfg("triangle-factor:highest", "delayer", 90, 1, 9),
        cfg("two-triangles", "random", 12, 1, 10),
        cfg("ham-biased", "random", 600, 2, 11),
        cfg("pm-biased", "anti-structure", 600, 3, 12),
    ]
}

#[test]
fn ids_round_trip() {
    for id in [
        "pm-complete",
        "pm-bipartite:7",
        "tree-embed:random:3",
        "tree-embed:tipped",
        "tree-factor:path:3",
        "path-factor:5",
        "triangle-factor:random:4",
        "batch-then-random",
    ] {
        let spec: StrategySpec = id.parse().unwrap();
        assert_eq!(spec.to_string(), id);
    }
    assert!("no-such-strategy".parse::<StrategySpec>().is_err());
    assert!("tree-factor:path".parse::<StrategySpec>().is_err());
    assert!("oracle".parse::<ClientSpec>().is_err());
}

#[test]
fn fresh_transcripts_verify_clean() {
    for c in small_runs() {
        let t = c.run().unwrap();
        assert!(t.is_clean(), "{}: {:?} {:?}", t.strategies.waiter, t.error, t.checks);
        let back = Transcript::from_json(&t.to_json()).map_err(|e| format!("{}: {e}", t.strategies.waiter)).unwrap();
        assert_eq!(back, t);
        let report = verify(&back).unwrap();
        assert!(report.is_clean(), "{}: {report:?}", t.strategies.waiter);
        assert_eq!(back.replay().unwrap().real_rounds(), t.real_rounds);
    }
}

#[test]
fn runs_are_byte_identical_per_seed() {
    for c in small_runs().into_iter().take(6) {
        assert_eq!(c.run().unwrap().to_json(), c.run().unwrap().to_json());
    }
}

#[test]
fn fake_rounds_serialize_as_a_string() {
    let t = cfg("tree-factor:path:3", "random", 30, 1, 1).run().unwrap();
    assert!(t.fake_rounds > 0);
    assert!(t.to_json().contains("\"fake\""));
}

#[test]
fn flipped_pick_is_reported_as_divergence() {
    let mut t = cfg("ham-unbiased", "random", 40, 1, 3).run().unwrap();
    let RoundEntry::Played { pick, .. } = &mut t.rounds[5] else { panic!() };
    *pick = 1 - *pick;
    let report = verify(&t).unwrap();
    assert!(report.divergence.is_some());
    assert!(!report.is_clean());
}

#[test]
fn certificate_edge_given_to_waiter_is_rejected() {
    let mut t = cfg("pm-complete", "random", 24, 1, 1).run().unwrap();
    let Some(Certificate::Matching { edges }) = &t.certificate else { panic!() };
    let target = edges[0];
    let entry = t
        .rounds
        .iter_mut()
        .find(|r| matches!(r, RoundEntry::Played { offer, pick } if offer[*pick] == target))
        .unwrap();
    let RoundEntry::Played { pick, .. } = entry else { unreachable!() };
    *pick = 1 - *pick;
    let report = verify(&t).unwrap();
    assert!(report.certificate_error.is_some());
}

#[test]
fn failed_runs_record_the_error_and_still_verify() {
    let t = cfg("random-offers", "random", 12, 1, 0).run().unwrap();
    if t.error.is_some() {
        let report = verify(&t).unwrap();
        assert!(report.divergence.is_none(), "{report:?}");
        assert!(report.certificate_error.is_some());
    }
}
