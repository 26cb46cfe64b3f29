//! Face-class bounds for generic games and a randomized scanner for them.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, solve_all, SolverConfig, SolverEquilibrium};
use crate::combinatorics::{maximal_equilibria_on_faces, subfactorial, to_u64};
use crate::game::{random_game, TwoActionGame};

/// `!m + Σ_{l=1}^{d} C(m,l)·2^{l−1}·!(m−l)`.
pub fn cumulative_face_bound(m: usize, d: usize) -> u64 {
    (0..=d.min(m))
        .map(|l| to_u64(&maximal_equilibria_on_faces(m, l)))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub d: usize,
    /// `Σ_{l≤d} |N ∩ C_l|`.
    pub lhs: u64,
    pub bound: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub m: usize,
    pub rows: Vec<BoundRow>,
    /// `|N ∩ C_0| ≤ !m`.
    pub interior_bound: bool,
    /// `|N ∩ C_{m−1}| = 0`.
    pub codim_one_empty: bool,
    /// `|N ∩ C_m| ≤ 2^{m−1}`.
    pub vertex_bound: bool,
}

impl InequalityCheck {
    pub fn failed_rows(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| !r.holds).map(|r| r.d).collect()
    }

    /// The three face bounds that hold for every generic game.
    pub fn face_bounds_hold(&self) -> bool {
        self.interior_bound && self.codim_one_empty && self.vertex_bound
    }

    pub fn all_hold(&self) -> bool {
        self.face_bounds_hold() && self.rows.iter().all(|r| r.holds)
    }
}

/// Evaluates the cumulative face bounds for a census `|N ∩ C_l|`, `l = 0..=m`.
pub fn check_inequalities(census: &[u64], m: usize) -> InequalityCheck {
    assert_eq!(census.len(), m + 1, "census must have m + 1 face classes");
    let mut lhs = 0;
    let rows = (0..=m)
        .map(|d| {
            lhs += census[d];
            let bound = cumulative_face_bound(m, d);
            BoundRow {
                d,
                lhs,
                bound,
                holds: lhs <= bound,
            }
        })
        .collect();
    InequalityCheck {
        m,
        rows,
        interior_bound: census[0] <= to_u64(&subfactorial(m)),
        codim_one_empty: m == 0 || census[m - 1] == 0,
        vertex_bound: m == 0 || census[m] <= 1u64 << (m - 1),
    }
}

/// True when some pure-profile payoff difference is within `tol` of zero.
pub fn is_degenerate(game: &TwoActionGame<f64>, tol: f64) -> bool {
    (1..=game.players()).any(|i| {
        game.difference_table(i)
            .expect("player in range")
            .iter()
            .any(|d| d.abs() < tol)
    })
}

/// Pairs of equilibrium vertices that differ in exactly one coordinate.
pub fn adjacent_vertex_pairs(equilibria: &[SolverEquilibrium]) -> usize {
    let vertices: Vec<&Vec<f64>> = equilibria
        .iter()
        .filter(|e| e.support.free().is_empty())
        .map(|e| &e.gamma)
        .collect();
    let mut pairs = 0;
    for (k, a) in vertices.iter().enumerate() {
        for b in &vertices[k + 1..] {
            let diff = a.iter().zip(b.iter()).filter(|(x, y)| x != y).count();
            if diff == 1 {
                pairs += 1;
            }
        }
    }
    pairs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    /// Fresh games drawn for one trial after an even equilibrium count.
    pub max_regenerations: usize,
    pub degeneracy_tol: f64,
    pub solver: SolverConfig,
}

impl ScanConfig {
    pub fn new(m: usize, trials: usize, seed: u64) -> Self {
        Self {
            m,
            trials,
            seed,
            max_regenerations: 3,
            degeneracy_tol: 1e-8,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanViolation {
    pub trial: usize,
    pub census: Vec<u64>,
    pub failed_d: Vec<usize>,
    pub face_bounds_hold: bool,
    /// Proven bound (every violation for `m ≤ 3`, face bounds for any `m`)
    /// rather than an open conjectural one.
    pub proven: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: ScanConfig,
    pub bounds: Vec<u64>,
    pub games_solved: usize,
    pub degenerate_regenerations: usize,
    pub even_regenerations: usize,
    /// Trials whose equilibrium count stayed even after every regeneration.
    pub even_failures: Vec<usize>,
    pub violations: Vec<ScanViolation>,
    /// Face census `l = 0..=m`, joined by commas, to number of games.
    pub census_histogram: BTreeMap<String, u64>,
    pub max_total: u64,
    pub passed: bool,
}

struct TrialResult {
    solved: usize,
    degenerate: usize,
    even: usize,
    census: Option<Vec<u64>>,
}

fn run_trial(config: &ScanConfig, trial: usize) -> TrialResult {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, trial as u64));
    let mut out = TrialResult {
        solved: 0,
        degenerate: 0,
        even: 0,
        census: None,
    };
    let solver = SolverConfig {
        seed: derive_seed(config.seed ^ 0x5bd1_e995, trial as u64),
        ..config.solver.clone()
    };
    while out.even <= config.max_regenerations {
        let game = random_game(config.m, &mut rng);
        if is_degenerate(&game, config.degeneracy_tol) {
            out.degenerate += 1;
            continue;
        }
        let report = solve_all(&game, &solver);
        out.solved += 1;
        if report.total.is_multiple_of(2) {
            out.even += 1;
            continue;
        }
        out.census = Some(report.face_census);
        break;
    }
    out
}

/// Solves `trials` random generic games and checks the face bounds on each.
pub fn scan(config: &ScanConfig) -> ScanReport {
    let m = config.m;
    let results: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect();
    let mut report = ScanReport {
        config: config.clone(),
        bounds: (0..=m).map(|d| cumulative_face_bound(m, d)).collect(),
        games_solved: 0,
        degenerate_regenerations: 0,
        even_regenerations: 0,
        even_failures: vec![],
        violations: vec![],
        census_histogram: BTreeMap::new(),
        max_total: 0,
        passed: true,
    };
    for (trial, r) in results.into_iter().enumerate() {
        report.games_solved += r.solved;
        report.degenerate_regenerations += r.degenerate;
        report.even_regenerations += r.even;
        let Some(census) = r.census else {
            report.even_failures.push(trial);
            continue;
        };
        let key = census
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        *report.census_histogram.entry(key).or_default() += 1;
        report.max_total = report.max_total.max(census.iter().sum());
        let check = check_inequalities(&census, m);
        if !check.all_hold() {
            report.violations.push(ScanViolation {
                trial,
                failed_d: check.failed_rows(),
                face_bounds_hold: check.face_bounds_hold(),
                proven: m <= 3 || !check.face_bounds_hold(),
                census,
            });
        }
    }
    report.passed = report.even_failures.is_empty() && report.violations.iter().all(|v| !v.proven);
    report
}
