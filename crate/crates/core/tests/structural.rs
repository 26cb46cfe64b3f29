//! Structure of the candidate sets and increment maps, checked exhaustively
//! per game on random characteristic tuples.

mod common;

use std::collections::BTreeMap;

use common::{arb_tuple, arb_tuple_up_to, random_tuple};
use prodgame::candidates::{
    candidates_for, census, classify_by_increment, enumerate_candidates, increment,
    verify_crossing_tables, Method,
};
use prodgame::combinatorics::{
    candidates_on_faces, enumerate_permutations, to_u64, upper_bound, Permutation,
};
use prodgame::game::{maximal_game, product_game, CharacteristicTuple, ProductTwoActionGame};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn increment_map(
    game: &ProductTwoActionGame,
    cand: &prodgame::candidates::EquilibriumCandidate,
) -> Vec<u8> {
    cand.pi()
        .fixed_points()
        .into_iter()
        .map(|i| increment(game, cand, i).unwrap())
        .collect()
}

/// Parity, dichotomy and the single-fixed-point rule for every bucket.
fn check_buckets(game: &ProductTwoActionGame) -> Result<(), TestCaseError> {
    let m = game.players();
    for pi in enumerate_permutations(m) {
        let fixed = pi.fixed_points().len();
        let cands = candidates_for(game, &pi);
        prop_assert_eq!(cands.len(), 1 << fixed);
        let eq = cands
            .iter()
            .filter(|c| classify_by_increment(game, c).is_equilibrium())
            .count();
        if fixed == 0 {
            prop_assert_eq!(eq, 1);
            continue;
        }
        let base = increment_map(game, &cands[0]);
        let flipped: Vec<u8> = base.iter().map(|x| 1 - x).collect();
        for c in &cands {
            let expected = if c.zero_count() % 2 == 0 {
                &base
            } else {
                &flipped
            };
            prop_assert_eq!(&increment_map(game, c), expected, "pi = {}", pi);
        }
        prop_assert!(
            eq == 0 || eq == 1 << (fixed - 1),
            "pi = {} has {} equilibria",
            pi,
            eq
        );
        if fixed == 1 {
            prop_assert_eq!(eq, 1);
        }
    }
    Ok(())
}

fn identity_bucket(game: &ProductTwoActionGame) -> usize {
    let m = game.players();
    candidates_for(game, &Permutation::identity(m))
        .iter()
        .filter(|c| classify_by_increment(game, c).is_equilibrium())
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bucket_structure(t in arb_tuple_up_to(5)) {
        check_buckets(&product_game(t))?;
    }

    #[test]
    fn identity_bucket_follows_sign_vector(t in arb_tuple_up_to(5)) {
        let m = t.players();
        let uniform = t.signs().iter().all(|&v| v == t.v(1));
        let g = product_game(t);
        let expected = if uniform { 1 << (m - 1) } else { 0 };
        prop_assert_eq!(identity_bucket(&g), expected);
    }

    #[test]
    fn no_candidates_one_step_from_the_vertices(t in (2usize..=5).prop_flat_map(arb_tuple)) {
        let m = t.players();
        let g = product_game(t);
        prop_assert!(enumerate_candidates(&g).all(|c| c.face_class() != m - 1));
    }

    #[test]
    fn candidate_coordinates_sit_on_walls(t in arb_tuple_up_to(5)) {
        let g = product_game(t);
        for c in enumerate_candidates(&g) {
            for j in c.pi().moved_points() {
                prop_assert_eq!(&c.gamma()[j - 1], g.coefficients().get(c.pi().image(j), j));
            }
            prop_assert_eq!(c.profile().boundary(), c.pi().fixed_points());
        }
    }
}

#[test]
fn bucket_structure_of_maximal_games() {
    for m in 1..=5 {
        check_buckets(&maximal_game(m)).unwrap();
    }
}

#[test]
fn uniform_sign_vectors_fill_the_identity_bucket() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 1..=5 {
        for v in [0u8, 1] {
            let t = random_tuple(m, &mut rng);
            let t = CharacteristicTuple::new(vec![v; m], t.sigmas().to_vec()).unwrap();
            assert_eq!(identity_bucket(&product_game(t)), 1 << (m - 1));
        }
    }
}

#[test]
fn candidate_count_is_upper_bound() {
    for m in 1..=7 {
        let g = maximal_game(m);
        let mut per_l: BTreeMap<usize, u64> = BTreeMap::new();
        for c in enumerate_candidates(&g) {
            *per_l.entry(c.face_class()).or_default() += 1;
        }
        assert_eq!(
            per_l.values().sum::<u64>(),
            to_u64(&upper_bound(m)),
            "m = {m}"
        );
        for l in 0..=m {
            assert_eq!(
                per_l.get(&l).copied().unwrap_or(0),
                to_u64(&candidates_on_faces(m, l)),
                "m = {m}, l = {l}"
            );
        }
    }
}

#[test]
fn census_counts_candidates_by_face() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 1..=6 {
        let r = census(&product_game(random_tuple(m, &mut rng)), Method::Increment);
        assert_eq!(r.total_candidates, to_u64(&upper_bound(m)));
        for f in &r.per_l {
            assert_eq!(f.candidates, to_u64(&candidates_on_faces(m, f.l)));
        }
    }
}

#[test]
fn crossing_tables_exhaustive() {
    for m in 1..=7 {
        assert_eq!(verify_crossing_tables(m), Ok(()), "m = {m}");
    }
}
