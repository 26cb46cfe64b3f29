#![allow(dead_code)]

use prodgame::combinatorics::Permutation;
use prodgame::game::CharacteristicTuple;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Uniform random characteristic tuple: each `σ^j` fixes `j` and permutes
/// the remaining indices uniformly.
pub fn random_tuple<R: Rng>(m: usize, rng: &mut R) -> CharacteristicTuple {
    let v = (0..m).map(|_| rng.gen_range(0..=1u8)).collect();
    let sigma = (1..=m)
        .map(|j| {
            let mut others: Vec<usize> = (1..=m).filter(|&r| r != j).collect();
            others.shuffle(rng);
            let mut it = others.into_iter();
            let images = (1..=m)
                .map(|i| if i == j { j } else { it.next().unwrap() })
                .collect();
            Permutation::new(images).unwrap()
        })
        .collect();
    CharacteristicTuple::new(v, sigma).unwrap()
}

pub fn arb_tuple(m: usize) -> impl Strategy<Value = CharacteristicTuple> {
    any::<u64>().prop_map(move |seed| {
        use rand::SeedableRng;
        random_tuple(m, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    })
}

pub fn arb_tuple_up_to(max_m: usize) -> impl Strategy<Value = CharacteristicTuple> {
    (1..=max_m).prop_flat_map(arb_tuple)
}
