//! Damped Newton iteration on the indifference system of one support.

use nalgebra::{DMatrix, DVector};

use crate::game::TwoActionGame;

/// The square system `{λ^i(γ^{-i}) = 0 : i free}` with the boundary players
/// pinned at 0 or 1.
pub(crate) struct IndifferenceSystem {
    m: usize,
    free: Vec<usize>,
    base: Vec<f64>,
    /// Difference tables of every player, indexed `player − 1`.
    diffs: Vec<Vec<f64>>,
}

pub(crate) enum Outcome {
    Converged { x: Vec<f64>, residual: f64 },
    Failed,
}

impl IndifferenceSystem {
    pub fn new(
        game: &TwoActionGame<f64>,
        diffs: &[Vec<f64>],
        free: Vec<usize>,
        base: Vec<f64>,
    ) -> Self {
        Self {
            m: game.players(),
            free,
            base,
            diffs: diffs.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    fn point(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.base.clone();
        for (&i, &xi) in self.free.iter().zip(x) {
            g[i - 1] = xi;
        }
        g
    }

    /// `λ^i` and its gradient with respect to every coordinate at the full
    /// profile `g`; the gradient entry for `i` itself is zero.
    pub fn lambda_and_gradient(&self, i: usize, g: &[f64]) -> (f64, Vec<f64>) {
        let d = &self.diffs[i - 1];
        let others: Vec<usize> = (1..=self.m).filter(|&k| k != i).collect();
        let n = others.len();
        let mut value = 0.0;
        let mut grad_others = vec![0.0; n];
        for (s, &ds) in d.iter().enumerate() {
            if ds == 0.0 {
                continue;
            }
            // Bit of the t-th other player, most significant first.
            let weight = |t: usize| {
                let gk = g[others[t] - 1];
                if (s >> (n - 1 - t)) & 1 == 1 {
                    gk
                } else {
                    1.0 - gk
                }
            };
            let mut prod = 1.0;
            for t in 0..n {
                prod *= weight(t);
            }
            value += ds * prod;
            for (t, gt) in grad_others.iter_mut().enumerate() {
                let mut p = 1.0;
                for u in (0..n).filter(|&u| u != t) {
                    p *= weight(u);
                }
                let sign = if (s >> (n - 1 - t)) & 1 == 1 {
                    1.0
                } else {
                    -1.0
                };
                *gt += ds * sign * p;
            }
        }
        let mut grad = vec![0.0; self.m];
        for (t, &k) in others.iter().enumerate() {
            grad[k - 1] = grad_others[t];
        }
        (value, grad)
    }

    fn residual_and_jacobian(&self, x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let g = self.point(x);
        let k = self.dim();
        let mut f = DVector::zeros(k);
        let mut jac = DMatrix::zeros(k, k);
        for (r, &i) in self.free.iter().enumerate() {
            let (v, grad) = self.lambda_and_gradient(i, &g);
            f[r] = v;
            for (c, &j) in self.free.iter().enumerate() {
                jac[(r, c)] = grad[j - 1];
            }
        }
        (f, jac)
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let g = self.point(x);
        self.free
            .iter()
            .map(|&i| self.lambda_and_gradient(i, &g).0)
            .collect()
    }

    /// Newton with fraction-to-boundary damping, so iterates stay inside the
    /// open cube, and backtracking on the Euclidean residual norm.
    pub fn solve(&self, start: &[f64], tol: f64, max_iterations: usize) -> Outcome {
        let mut x = start.to_vec();
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let maxabs = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let mut polishing = 0;
        let mut best: Option<(Vec<f64>, f64)> = None;
        for _ in 0..max_iterations {
            let (f, jac) = self.residual_and_jacobian(&x);
            let res = maxabs(f.as_slice());
            if !res.is_finite() {
                return Outcome::Failed;
            }
            if res <= tol {
                if best.as_ref().is_none_or(|(_, r)| res < *r) {
                    best = Some((x.clone(), res));
                }
                polishing += 1;
                if polishing > 2 || res == 0.0 {
                    break;
                }
            } else if best.is_some() {
                break;
            }
            let step = match jac.lu().solve(&(-&f)) {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => break,
            };
            let mut alpha: f64 = 1.0;
            for (xi, di) in x.iter().zip(step.iter()) {
                if *di < 0.0 {
                    alpha = alpha.min(0.995 * xi / -di);
                } else if *di > 0.0 {
                    alpha = alpha.min(0.995 * (1.0 - xi) / di);
                }
            }
            let f_norm = norm(f.as_slice());
            let mut accepted = false;
            while alpha > 1e-12 {
                let trial: Vec<f64> = x
                    .iter()
                    .zip(step.iter())
                    .map(|(a, d)| a + alpha * d)
                    .collect();
                let r = self.residual(&trial);
                if norm(&r) <= (1.0 - 1e-4 * alpha) * f_norm
                    || (best.is_some() && maxabs(&r) <= tol)
                {
                    x = trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        match best {
            Some((x, residual)) => Outcome::Converged { x, residual },
            None => {
                let r = self.residual(&x);
                let res = maxabs(&r);
                if res <= tol {
                    Outcome::Converged { x, residual: res }
                } else {
                    Outcome::Failed
                }
            }
        }
    }
}
