//! The exact solver against the independent brute-force oracle.

mod common;

use common::{brute, Goal};
use wcg_core::solver::{connectivity_game, perfect_matching_game, HypergraphGame, Solver, Tau};

fn solve(game: &HypergraphGame) -> (Tau, Solver) {
    let mut s = Solver::new(game, 10_000_000).unwrap();
    let tau = s.solve().unwrap().tau;
    (tau, s)
}

#[test]
fn oracle_values_are_frozen() {
    assert_eq!(brute(Goal::Connected, 3, 1), Tau::Rounds(2));
    assert_eq!(brute(Goal::Connected, 4, 1), Tau::Rounds(3));
    assert_eq!(brute(Goal::Connected, 5, 1), Tau::Rounds(4));
    assert_eq!(brute(Goal::Connected, 4, 2), Tau::Unwinnable);
    assert_eq!(brute(Goal::PerfectMatching, 4, 1), Tau::Unwinnable);
    assert_eq!(brute(Goal::PerfectMatching, 4, 2), Tau::Unwinnable);
}

#[test]
fn solver_matches_oracle() {
    for (goal, n, bias) in [
        (Goal::Connected, 3, 1),
        (Goal::Connected, 4, 1),
        (Goal::Connected, 4, 2),
        (Goal::PerfectMatching, 4, 1),
        (Goal::PerfectMatching, 4, 2),
    ] {
        let game = match goal {
            Goal::Connected => connectivity_game(n, bias as u32),
            Goal::PerfectMatching => perfect_matching_game(n, bias as u32),
        };
        assert_eq!(solve(&game).0, brute(goal, n, bias), "n={n} b={bias}");
    }
}

#[test]
fn matching_on_k6_takes_half_n_plus_one() {
    assert_eq!(solve(&perfect_matching_game(6, 1)).0, Tau::Rounds(4));
}

#[test]
fn single_element_game_takes_one_round() {
    let game = HypergraphGame { universe: 1, bias: 1, sets: vec![vec![0]] };
    assert_eq!(solve(&game).0, Tau::Rounds(1));
}

#[test]
fn memo_is_self_consistent() {
    for game in [connectivity_game(3, 1), connectivity_game(4, 1), perfect_matching_game(4, 1)] {
        let (_, mut s) = solve(&game);
        let (checked, bad) = s.verify_memo().unwrap();
        assert!(checked > 0);
        assert!(bad.is_empty(), "{bad:?}");
    }
}
