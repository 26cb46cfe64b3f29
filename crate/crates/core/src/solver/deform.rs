//! Stability of product-game equilibria under small random deformations.

use serde::{Deserialize, Serialize};

use super::{derive_seed, max_dist, solve_all_seeded, SolverConfig, SupportProfile};
use crate::candidates::{equilibria, Method};
use crate::game::{perturb, ProductTwoActionGame};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationConfig {
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    /// Largest max-norm distance at which a perturbed equilibrium still counts
    /// as the continuation of an unperturbed one.
    pub track_radius: f64,
    pub solver: SolverConfig,
}

impl DeformationConfig {
    pub fn new(epsilon: f64, trials: usize, seed: u64) -> Self {
        Self {
            epsilon,
            trials,
            seed,
            track_radius: 0.05,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub count: u64,
    pub face_census: Vec<u64>,
    /// Unperturbed equilibria with no continuation of the same support type.
    pub untracked: usize,
    pub max_drift: f64,
    /// Smallest signed best-reply margin over the boundary players of the
    /// tracked equilibria; positive means the strict inequalities survived.
    pub min_boundary_margin: Option<f64>,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationReport {
    pub m: usize,
    pub config: DeformationConfig,
    pub expected_count: u64,
    pub expected_census: Vec<u64>,
    pub trials: Vec<TrialOutcome>,
    pub stable_trials: usize,
    pub stability_rate: f64,
    pub max_drift: f64,
    pub tracking_failures: Vec<usize>,
    pub strict_inequalities_hold: bool,
    pub passed: bool,
}

pub fn verify_deformation(
    game: &ProductTwoActionGame,
    config: &DeformationConfig,
) -> DeformationReport {
    let m = game.players();
    let exact: Vec<Vec<f64>> = equilibria(game, Method::Sign)
        .iter()
        .map(|c| c.gamma_f64())
        .collect();
    let mut expected_census = vec![0u64; m + 1];
    for e in &exact {
        expected_census[SupportProfile::of_point(e, 0.0).face_class()] += 1;
    }
    let expected_count = exact.len() as u64;

    let trials: Vec<TrialOutcome> = (0..config.trials)
        .map(|t| {
            let seed = derive_seed(config.seed, t as u64);
            let perturbed =
                perturb(game.tensor(), config.epsilon, seed).expect("epsilon validated");
            let solver = SolverConfig {
                seed,
                ..config.solver.clone()
            };
            let report = solve_all_seeded(&perturbed, &solver, &exact);
            let mut untracked = 0;
            let mut max_drift = 0.0f64;
            let mut min_margin: Option<f64> = None;
            for e in &exact {
                let support = SupportProfile::of_point(e, 0.0);
                let nearest = report
                    .equilibria
                    .iter()
                    .filter(|s| s.support == support)
                    .map(|s| (max_dist(&s.gamma, e), s))
                    .min_by(|a, b| a.0.total_cmp(&b.0));
                match nearest {
                    Some((d, s)) if d <= config.track_radius => {
                        max_drift = max_drift.max(d);
                        if let Some(mg) = s.margin {
                            min_margin = Some(min_margin.map_or(mg, |x: f64| x.min(mg)));
                        }
                    }
                    _ => untracked += 1,
                }
            }
            let stable = report.total == expected_count
                && report.face_census == expected_census
                && untracked == 0;
            TrialOutcome {
                trial: t,
                seed,
                count: report.total,
                face_census: report.face_census,
                untracked,
                max_drift,
                min_boundary_margin: min_margin,
                stable,
            }
        })
        .collect();

    let stable_trials = trials.iter().filter(|t| t.stable).count();
    let tracking_failures: Vec<usize> = trials
        .iter()
        .filter(|t| t.untracked > 0)
        .map(|t| t.trial)
        .collect();
    let strict_inequalities_hold = trials
        .iter()
        .all(|t| t.min_boundary_margin.is_none_or(|mg| mg > 0.0));
    DeformationReport {
        m,
        config: config.clone(),
        expected_count,
        expected_census,
        stable_trials,
        stability_rate: if trials.is_empty() {
            1.0
        } else {
            stable_trials as f64 / trials.len() as f64
        },
        max_drift: trials.iter().fold(0.0, |a, t| a.max(t.max_drift)),
        passed: stable_trials == trials.len() && strict_inequalities_hold,
        tracking_failures,
        strict_inequalities_hold,
        trials,
    }
}
