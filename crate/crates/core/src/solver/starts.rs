//! Low-discrepancy start points for the Newton solver.
//!
//! Additive recurrence `x_n = frac(s + n·α)` with `α_k = φ_d^{-k}`, where
//! `φ_d` is the unique positive root of `x^{d+1} = x + 1`. The shift `s` is
//! drawn from a seeded generator so independent runs use rotated lattices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Positive root of `x^{d+1} = x + 1`.
fn harmonious(d: usize) -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

#[derive(Debug, Clone)]
pub struct KroneckerSequence {
    alpha: Vec<f64>,
    shift: Vec<f64>,
    n: u64,
}

impl KroneckerSequence {
    pub fn new(dim: usize, seed: u64) -> Self {
        let phi = harmonious(dim);
        let alpha = (1..=dim).map(|k| phi.powi(-(k as i32)).fract()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.gen::<f64>()).collect();
        Self { alpha, shift, n: 0 }
    }
}

impl Iterator for KroneckerSequence {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        self.n += 1;
        let n = self.n as f64;
        Some(
            self.alpha
                .iter()
                .zip(&self.shift)
                .map(|(a, s)| (s + n * a).fract().clamp(1e-6, 1.0 - 1e-6))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_in_one_dimension() {
        assert!((harmonious(1) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn points_fill_the_cube() {
        let pts: Vec<Vec<f64>> = KroneckerSequence::new(2, 3).take(400).collect();
        // Every cell of a 5×5 grid receives a point.
        let mut hit = [[false; 5]; 5];
        for p in &pts {
            assert!(p.iter().all(|&x| x > 0.0 && x < 1.0));
            hit[(p[0] * 5.0) as usize][(p[1] * 5.0) as usize] = true;
        }
        assert!(hit.iter().flatten().all(|&h| h));
    }

    #[test]
    fn deterministic_per_seed() {
        let a: Vec<_> = KroneckerSequence::new(3, 9).take(5).collect();
        let b: Vec<_> = KroneckerSequence::new(3, 9).take(5).collect();
        assert_eq!(a, b);
    }
}
