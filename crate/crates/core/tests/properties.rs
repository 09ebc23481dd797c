use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wcg_core::client::UniformRandom;
use wcg_core::engine::play;
use wcg_core::graph::{pair_count, Edge, Vertex};
use wcg_core::registry::{verify, RunConfig};
use wcg_core::tree::random_tree;
use wcg_core::{BoardSpec, Certificate, GameError, GameState, Offer, Owner};

fn random_offer(game: &GameState, rng_pick: &[usize]) -> Offer {
    let free: Vec<Edge> = game.free_edges().collect();
    let want = game.required_offer_len();
    let mut chosen = Vec::new();
    for &r in rng_pick {
        let e = free[r % free.len()];
        if !chosen.contains(&e) {
            chosen.push(e);
        }
        if chosen.len() == want {
            break;
        }
    }
    for &e in &free {
        if chosen.len() == want {
            break;
        }
        if !chosen.contains(&e) {
            chosen.push(e);
        }
    }
    Offer::new(chosen)
}

fn config(id: &str, n: usize, seed: u64) -> RunConfig {
    RunConfig::new(id.parse().unwrap(), "random".parse().unwrap(), n, seed)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn edge_index_is_a_bijection(hi in 1u32..500, lo_frac in 0.0f64..1.0) {
        let lo = ((hi as f64) * lo_frac) as Vertex;
        let e = Edge::new(lo, hi);
        prop_assert_eq!(Edge::from_index(e.index()), e);
        prop_assert!(e.index() < pair_count(hi as usize + 1));
    }

    #[test]
    fn random_play_keeps_the_partition(n in 3usize..12, bias in 1u32..4, picks in prop::collection::vec(0usize..1000, 1..400)) {
        let mut game = GameState::new(BoardSpec::complete(n, bias)).unwrap();
        let total = pair_count(n);
        let mut chunks = picks.chunks(bias as usize + 2);
        while game.free_count() > 0 {
            let Some(chunk) = chunks.next() else { break };
            let offer = random_offer(&game, chunk);
            let choice = chunk[0] % offer.len();
            game.apply_round(&offer, choice).unwrap();
            prop_assert!(game.check_accounting().is_ok());
            prop_assert_eq!(game.free_count() + game.waiter_count() + game.client_count(), total);
            prop_assert_eq!(game.client_count(), game.real_rounds());
            prop_assert!(game.waiter_count() <= bias as usize * game.real_rounds());
            if game.short_offers() == 0 {
                prop_assert_eq!(game.waiter_count(), bias as usize * game.real_rounds());
            }
        }
    }

    #[test]
    fn fake_rounds_only_touch_the_counter(n in 3usize..10, fakes in 0usize..5) {
        let mut game = GameState::new(BoardSpec::complete(n, 1)).unwrap();
        let before = game.clone();
        for _ in 0..fakes {
            game.apply_fake_round();
        }
        prop_assert_eq!(game.fake_rounds(), fakes);
        prop_assert_eq!(game.round(), fakes);
        prop_assert_eq!(game.client_count(), before.client_count());
        prop_assert_eq!(game.free_count(), before.free_count());
    }

    #[test]
    fn claimed_and_duplicate_edges_are_rejected(n in 4usize..10, a in 0usize..1000, b in 0usize..1000) {
        let mut game = GameState::new(BoardSpec::complete(n, 1)).unwrap();
        let free: Vec<Edge> = game.free_edges().collect();
        let e = free[a % free.len()];
        let f = free[(a + 1 + b % (free.len() - 1)) % free.len()];
        prop_assert!(matches!(game.validate_offer(&Offer::pair(e, e)), Err(GameError::DuplicateEdge(_))));
        game.apply_round(&Offer::pair(e, f), 0).unwrap();
        prop_assert_eq!(game.owner(e), Owner::Client);
        prop_assert_eq!(game.owner(f), Owner::Waiter);
        let g = game.free_edges().next().unwrap();
        prop_assert!(matches!(game.validate_offer(&Offer::pair(e, g)), Err(GameError::EdgeNotFree(_))));
    }

    #[test]
    fn prufer_trees_respect_the_degree_cap(n in 3usize..300, cap in 2usize..6, seed in any::<u64>()) {
        let t = random_tree(&mut ChaCha8Rng::seed_from_u64(seed), n, cap);
        prop_assert_eq!(t.n(), n);
        prop_assert_eq!(t.edges().len(), n - 1);
        prop_assert!(t.max_degree() <= cap);
    }

    #[test]
    fn perfect_matching_within_half_n_plus_one(half in 12usize..60, seed in any::<u64>()) {
        let n = 2 * half;
        let mut game = GameState::new(BoardSpec::complete(n, 1)).unwrap();
        let mut s = wcg_core::matching::PmComplete::new(game.board(), wcg_core::ProbeLevel::PerRound).unwrap();
        play(&mut game, &mut s, &mut UniformRandom::new(seed), n).unwrap();
        prop_assert!(game.real_rounds() <= half + 1);
        prop_assert!(wcg_core::WaiterStrategy::checks(&s).is_clean());
    }

    #[test]
    fn transcripts_replay_to_the_same_state(n in 40usize..80, seed in any::<u64>()) {
        let t = config("ham-unbiased", n, seed).run().unwrap();
        prop_assert!(t.is_clean());
        prop_assert!(t.real_rounds <= n + 1);
        let state = t.replay().unwrap();
        prop_assert_eq!(state.client_edges().len(), t.real_rounds);
        prop_assert!(t.certificate.as_ref().unwrap().is_valid(&state));
        prop_assert!(verify(&t).unwrap().is_clean());
    }

    #[test]
    fn random_trees_embed_within_n_rounds(n in 60usize..200, seed in any::<u64>()) {
        let t = config("tree-embed:random:5", n, seed).run().unwrap();
        prop_assert!(t.is_clean(), "{:?}", t.error);
        prop_assert!(t.real_rounds <= n);
    }

    #[test]
    fn tampered_matching_is_rejected(half in 2usize..20, swap in 0usize..100) {
        let n = 2 * half;
        let mut game = GameState::new(BoardSpec::complete(n, 1)).unwrap();
        let pairs: Vec<Edge> = (0..half as Vertex).map(|i| Edge::new(2 * i, 2 * i + 1)).collect();
        for (i, &e) in pairs.iter().enumerate() {
            let other = Edge::new((2 * i as Vertex + 2) % n as Vertex, 2 * i as Vertex);
            let other = if other == e || !game.is_free(other) { game.free_edges().find(|&f| f != e).unwrap() } else { other };
            game.apply_round(&Offer::pair(e, other), 0).unwrap();
        }
        let cert = Certificate::Matching { edges: pairs.clone() };
        prop_assert!(cert.is_valid(&game));
        let waiter = game.waiter_edges();
        let mut bad = pairs;
        bad[swap % half] = waiter[swap % waiter.len()];
        let tampered = Certificate::Matching { edges: bad };
        prop_assert!(!tampered.is_valid(&game));
    }
}
