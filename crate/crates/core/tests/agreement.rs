//! The increment classifier never consults the thresholds, the sign
//! classifier evaluates them exactly. They must agree everywhere.

mod common;

use common::{arb_tuple_up_to, random_tuple};
use prodgame::candidates::{
    census, classify_by_increment, classify_by_sign, enumerate_candidates, Method,
};
use prodgame::combinatorics::{lower_bound, maximal_equilibria_on_faces, to_u64};
use prodgame::game::{maximal_game, product_game};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn maximal_games_up_to_six() {
    for m in 1..=6 {
        let r = census(&maximal_game(m), Method::Both);
        assert!(r.disagreements.is_empty(), "m = {m}: {:?}", r.disagreements);
        assert_eq!(r.total_equilibria, to_u64(&lower_bound(m)));
        assert!(r.matches_expected);
        let binding: Vec<u64> = (0..=m)
            .map(|l| to_u64(&maximal_equilibria_on_faces(m, l)))
            .collect();
        assert_eq!(r.equilibria_by_face(), binding, "m = {m}");
    }
}

#[test]
fn two_hundred_random_tuples_per_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for m in 1..=5 {
        for _ in 0..200 {
            let t = random_tuple(m, &mut rng);
            let r = census(&product_game(t.clone()), Method::Both);
            assert!(r.disagreements.is_empty(), "{t:?}: {:?}", r.disagreements);
            assert!(r.total_equilibria <= to_u64(&lower_bound(m)), "{t:?}");
        }
    }
}

proptest! {
    #[test]
    fn candidatewise(t in arb_tuple_up_to(5)) {
        let g = product_game(t);
        for c in enumerate_candidates(&g) {
            prop_assert_eq!(classify_by_increment(&g, &c), classify_by_sign(&g, &c), "{}", c);
        }
    }
}
