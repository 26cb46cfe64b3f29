//! A general two-action Nash solver, independent of the product-game
//! calculus.
//!
//! Each of the `3^m` support profiles pins its boundary players at 0 or 1 and
//! solves the indifference equations of the free players by multi-start
//! Newton. A root is kept when it is strictly interior in the free
//! coordinates and every boundary player's payoff difference has the sign
//! required for a best reply.

mod deform;
mod inequalities;
mod newton;
mod starts;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::TwoActionGame;
use newton::{IndifferenceSystem, Outcome};

pub use deform::{verify_deformation, DeformationConfig, DeformationReport, TrialOutcome};
pub use inequalities::{
    adjacent_vertex_pairs, check_inequalities, cumulative_face_bound, is_degenerate, scan,
    BoundRow, InequalityCheck, ScanConfig, ScanReport, ScanViolation,
};
pub use starts::KroneckerSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Newton starts per support; `None` uses `50·2^k` for `k` free players.
    pub starts: Option<usize>,
    pub residual_tol: f64,
    pub dedup_tol: f64,
    pub margin_tol: f64,
    /// Margins below this are flagged as near-degenerate.
    pub near_degenerate_tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            starts: None,
            residual_tol: 1e-10,
            dedup_tol: 1e-6,
            margin_tol: 1e-12,
            near_degenerate_tol: 1e-8,
            max_iterations: 100,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn starts_for(&self, free: usize) -> usize {
        self.starts.unwrap_or(50 << free)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    OnlyZero,
    OnlyOne,
    Full,
}

/// Per-player support choice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportProfile(pub Vec<Support>);

impl SupportProfile {
    /// All `3^m` profiles, player 1 most significant, `OnlyZero < OnlyOne < Full`.
    pub fn all(m: usize) -> Vec<SupportProfile> {
        let total = 3usize.pow(m as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![Support::OnlyZero; m];
                for slot in v.iter_mut().rev() {
                    *slot = match code % 3 {
                        0 => Support::OnlyZero,
                        1 => Support::OnlyOne,
                        _ => Support::Full,
                    };
                    code /= 3;
                }
                SupportProfile(v)
            })
            .collect()
    }

    /// Support pattern of a profile, treating values within `tol` of 0 or 1
    /// as boundary.
    pub fn of_point(gamma: &[f64], tol: f64) -> Self {
        SupportProfile(
            gamma
                .iter()
                .map(|&g| {
                    if g.abs() <= tol {
                        Support::OnlyZero
                    } else if (1.0 - g).abs() <= tol {
                        Support::OnlyOne
                    } else {
                        Support::Full
                    }
                })
                .collect(),
        )
    }

    pub fn players(&self) -> usize {
        self.0.len()
    }

    /// Players with full support, 1-based.
    pub fn free(&self) -> Vec<usize> {
        (1..=self.0.len())
            .filter(|&i| self.0[i - 1] == Support::Full)
            .collect()
    }

    /// Face class `l = m − |free|`.
    pub fn face_class(&self) -> usize {
        self.0.len() - self.free().len()
    }

    /// Profile with boundary players at their pinned value and free players at 0.
    fn base_point(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|s| if *s == Support::OnlyOne { 1.0 } else { 0.0 })
            .collect()
    }
}

impl fmt::Display for SupportProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Support::OnlyZero => "0",
                Support::OnlyOne => "1",
                Support::Full => "*",
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverEquilibrium {
    pub gamma: Vec<f64>,
    pub support: SupportProfile,
    pub face_class: usize,
    /// Largest `|λ^i|` over free players.
    pub residual: f64,
    /// Smallest signed margin over boundary players (`λ^i` when `γ^i = 1`,
    /// `−λ^i` when `γ^i = 0`); absent in the interior.
    pub margin: Option<f64>,
    pub near_degenerate: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceStats {
    pub supports: usize,
    pub starts: usize,
    pub converged: usize,
    pub failed: usize,
    pub rejected_outside: usize,
    pub rejected_sign: usize,
    pub duplicates: usize,
}

impl ConvergenceStats {
    fn merge(&mut self, o: &ConvergenceStats) {
        self.supports += o.supports;
        self.starts += o.starts;
        self.converged += o.converged;
        self.failed += o.failed;
        self.rejected_outside += o.rejected_outside;
        self.rejected_sign += o.rejected_sign;
        self.duplicates += o.duplicates;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSolution {
    pub equilibria: Vec<SolverEquilibrium>,
    pub stats: ConvergenceStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub config: SolverConfig,
    pub m: usize,
    pub equilibria: Vec<SolverEquilibrium>,
    /// `|N ∩ C_l|` for `l = 0..=m`.
    pub face_census: Vec<u64>,
    pub total: u64,
    pub stats: ConvergenceStats,
}

pub(crate) fn difference_tables(game: &TwoActionGame<f64>) -> Vec<Vec<f64>> {
    (1..=game.players())
        .map(|i| game.difference_table(i).expect("player in range"))
        .collect()
}

/// Independent per-index seed split off a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    use rand::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Signed best-reply margins of the boundary players at `g`.
fn boundary_margins(sys: &IndifferenceSystem, support: &SupportProfile, g: &[f64]) -> Option<f64> {
    support
        .0
        .iter()
        .enumerate()
        .filter(|(_, s)| **s != Support::Full)
        .map(|(k, s)| {
            let lam = sys.lambda_and_gradient(k + 1, g).0;
            if *s == Support::OnlyOne {
                lam
            } else {
                -lam
            }
        })
        .reduce(f64::min)
}

fn seed_for_support(seed: u64, support: &SupportProfile) -> u64 {
    let code = support.0.iter().fold(0u64, |acc, s| acc * 3 + *s as u64);
    seed ^ code.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Equilibria with the given support. `seeds` are full profiles tried before
/// the quasi-random starts; only those matching the support pattern are used.
pub fn solve_support(
    game: &TwoActionGame<f64>,
    support: &SupportProfile,
    config: &SolverConfig,
    seeds: &[Vec<f64>],
) -> SupportSolution {
    solve_support_with(game, &difference_tables(game), support, config, seeds)
}

fn solve_support_with(
    game: &TwoActionGame<f64>,
    diffs: &[Vec<f64>],
    support: &SupportProfile,
    config: &SolverConfig,
    seeds: &[Vec<f64>],
) -> SupportSolution {
    let free = support.free();
    let base = support.base_point();
    let sys = IndifferenceSystem::new(game, diffs, free.clone(), base.clone());
    let mut stats = ConvergenceStats {
        supports: 1,
        ..Default::default()
    };
    let margin_ok = |margin: Option<f64>| margin.is_none_or(|mg| mg >= config.margin_tol);

    if free.is_empty() {
        stats.starts = 1;
        stats.converged = 1;
        let margin = boundary_margins(&sys, support, &base);
        if !margin_ok(margin) {
            stats.rejected_sign = 1;
            return SupportSolution {
                equilibria: vec![],
                stats,
            };
        }
        return SupportSolution {
            equilibria: vec![SolverEquilibrium {
                face_class: support.face_class(),
                support: support.clone(),
                residual: 0.0,
                near_degenerate: margin.is_some_and(|mg| mg < config.near_degenerate_tol),
                margin,
                gamma: base,
            }],
            stats,
        };
    }

    let pattern_matches = |s: &Vec<f64>| SupportProfile::of_point(s, 1e-12) == *support;
    let seeded = seeds
        .iter()
        .filter(|s| s.len() == base.len() && pattern_matches(s))
        .map(|s| free.iter().map(|&i| s[i - 1]).collect::<Vec<f64>>());
    let quasi = KroneckerSequence::new(free.len(), seed_for_support(config.seed, support))
        .take(config.starts_for(free.len()));

    let mut found: Vec<SolverEquilibrium> = Vec::new();
    for start in seeded.chain(quasi) {
        stats.starts += 1;
        let (x, residual) = match sys.solve(&start, config.residual_tol, config.max_iterations) {
            Outcome::Converged { x, residual } => (x, residual),
            Outcome::Failed => {
                stats.failed += 1;
                continue;
            }
        };
        stats.converged += 1;
        if x.iter()
            .any(|&v| v <= config.dedup_tol || v >= 1.0 - config.dedup_tol)
        {
            stats.rejected_outside += 1;
            continue;
        }
        let mut gamma = base.clone();
        for (&i, &v) in free.iter().zip(&x) {
            gamma[i - 1] = v;
        }
        let margin = boundary_margins(&sys, support, &gamma);
        if !margin_ok(margin) {
            stats.rejected_sign += 1;
            continue;
        }
        if found
            .iter()
            .any(|e| max_dist(&e.gamma, &gamma) < config.dedup_tol)
        {
            stats.duplicates += 1;
            continue;
        }
        found.push(SolverEquilibrium {
            gamma,
            face_class: support.face_class(),
            support: support.clone(),
            residual,
            near_degenerate: margin.is_some_and(|mg| mg < config.near_degenerate_tol),
            margin,
        });
    }
    found.sort_by(|a, b| a.gamma.partial_cmp(&b.gamma).expect("finite coordinates"));
    SupportSolution {
        equilibria: found,
        stats,
    }
}

/// Solves every support profile and merges the results.
pub fn solve_all(game: &TwoActionGame<f64>, config: &SolverConfig) -> SolverReport {
    solve_all_seeded(game, config, &[])
}

/// [`solve_all`] with extra Newton seeds (full profiles).
pub fn solve_all_seeded(
    game: &TwoActionGame<f64>,
    config: &SolverConfig,
    seeds: &[Vec<f64>],
) -> SolverReport {
    let m = game.players();
    let diffs = difference_tables(game);
    let per_support: Vec<SupportSolution> = SupportProfile::all(m)
        .par_iter()
        .map(|s| solve_support_with(game, &diffs, s, config, seeds))
        .collect();
    let mut stats = ConvergenceStats::default();
    let mut equilibria: Vec<SolverEquilibrium> = Vec::new();
    for sol in per_support {
        stats.merge(&sol.stats);
        for e in sol.equilibria {
            if equilibria
                .iter()
                .any(|f| max_dist(&f.gamma, &e.gamma) < config.dedup_tol)
            {
                stats.duplicates += 1;
            } else {
                equilibria.push(e);
            }
        }
    }
    let mut face_census = vec![0u64; m + 1];
    for e in &equilibria {
        face_census[e.face_class] += 1;
    }
    SolverReport {
        config: config.clone(),
        m,
        total: equilibria.len() as u64,
        equilibria,
        face_census,
        stats,
    }
}

/// Greedy one-to-one matching of two point sets under the max-norm. Returns
/// the largest matched distance, or `None` when the sets cannot be matched
/// within `tol`.
pub fn match_points(found: &[Vec<f64>], expected: &[Vec<f64>], tol: f64) -> Option<f64> {
    if found.len() != expected.len() {
        return None;
    }
    let mut used = vec![false; found.len()];
    let mut worst = 0.0f64;
    for e in expected {
        let (k, d) = found
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, f)| (k, max_dist(f, e)))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if d > tol {
            return None;
        }
        used[k] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
