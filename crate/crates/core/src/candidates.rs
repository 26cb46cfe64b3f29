//! Equilibrium candidates of product two-action games and their
//! classification.
//!
//! Every candidate is indexed by a permutation `π` together with a choice of
//! `0` or `1` for each fixed point of `π`; moved coordinates sit at
//! `γ^j = a^{π(j)}_j`. Two classifiers decide which candidates are Nash
//! equilibria:
//!
//! * [`classify_by_increment`] evaluates the increment map, a parity
//!   computation over `(v, σ, π)` that never looks at the coefficients;
//! * [`classify_by_sign`] evaluates the sign of every boundary player's
//!   payoff difference in exact rational arithmetic.
//!
//! [`census`] runs either or both over the whole candidate set.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    chi, delta_permutation, enumerate_permutations, lower_bound, to_u64, Permutation,
};
use crate::error::{Error, Result};
use crate::game::{MixedProfile, ProductTwoActionGame};

/// A point of `EC(π)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumCandidate {
    pi: Permutation,
    /// `(i, γ^i)` for each fixed point `i` of `π`, in increasing `i`.
    boundary: Vec<(usize, u8)>,
    gamma: Vec<BigRational>,
}

impl EquilibriumCandidate {
    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn boundary(&self) -> &[(usize, u8)] {
        &self.boundary
    }

    pub fn gamma(&self) -> &[BigRational] {
        &self.gamma
    }

    pub fn profile(&self) -> MixedProfile<BigRational> {
        MixedProfile::new(self.gamma.clone()).expect("candidate coordinates lie in [0,1]")
    }

    pub fn gamma_f64(&self) -> Vec<f64> {
        use crate::game::Scalar;
        self.gamma.iter().map(Scalar::as_f64).collect()
    }

    /// Face class `l = |F(π)|`.
    pub fn face_class(&self) -> usize {
        self.boundary.len()
    }

    /// Value of the boundary coordinate `i`, if `i` is a fixed point.
    pub fn boundary_value(&self, i: usize) -> Option<u8> {
        self.boundary
            .iter()
            .find(|&&(k, _)| k == i)
            .map(|&(_, b)| b)
    }

    /// `|L_0(g)|`.
    pub fn zero_count(&self) -> usize {
        self.boundary.iter().filter(|&&(_, b)| b == 0).count()
    }
}

impl fmt::Display for EquilibriumCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "π={} γ=(", self.pi)?;
        for (k, g) in self.gamma.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

/// The `2^{|F(π)|}` candidates of one permutation. The first element is
/// `g(π)`, the candidate with every fixed point at 1; bit `t` of the
/// enumeration index sends the `t`-th fixed point to 0.
pub fn candidates_for(game: &ProductTwoActionGame, pi: &Permutation) -> Vec<EquilibriumCandidate> {
    let m = game.players();
    assert_eq!(pi.len(), m);
    let fixed = pi.fixed_points();
    let a = game.coefficients();
    let interior: Vec<Option<BigRational>> = (1..=m)
        .map(|j| (!pi.is_fixed(j)).then(|| a.get(pi.image(j), j).clone()))
        .collect();
    (0..1usize << fixed.len())
        .map(|mask| {
            let boundary: Vec<(usize, u8)> = fixed
                .iter()
                .enumerate()
                .map(|(t, &i)| (i, u8::from(mask >> t & 1 == 0)))
                .collect();
            let mut gamma: Vec<BigRational> = interior
                .iter()
                .map(|x| x.clone().unwrap_or_else(BigRational::zero))
                .collect();
            for &(i, b) in &boundary {
                gamma[i - 1] = BigRational::from_integer(BigInt::from(b));
            }
            EquilibriumCandidate {
                pi: pi.clone(),
                boundary,
                gamma,
            }
        })
        .collect()
}

/// All `V(m)` candidates, permutation by permutation in lexicographic order.
pub fn enumerate_candidates(
    game: &ProductTwoActionGame,
) -> impl Iterator<Item = EquilibriumCandidate> + '_ {
    enumerate_permutations(game.players()).flat_map(move |pi| candidates_for(game, &pi))
}

/// `Inc(g, i) ∈ {0,1}` for a fixed point `i` of the candidate's permutation.
pub fn increment(game: &ProductTwoActionGame, cand: &EquilibriumCandidate, i: usize) -> Result<u8> {
    let gamma_i = cand.boundary_value(i).ok_or(Error::NotAFixedPoint { i })?;
    let tuple = game.tuple();
    let zeros_without_i = cand.zero_count() - usize::from(gamma_i == 0);
    let pi = &cand.pi;
    let crossings: usize = pi
        .moved_points()
        .into_iter()
        .map(|j| {
            let sigma = tuple.sigma(j);
            chi(sigma.image(pi.image(j)), sigma.image(i)) as usize
        })
        .sum();
    let total = 1 + gamma_i as usize + tuple.v(i) as usize + zeros_without_i + crossings;
    Ok((total % 2) as u8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equilibrium,
    NotEquilibrium,
}

impl Verdict {
    pub fn is_equilibrium(self) -> bool {
        self == Verdict::Equilibrium
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Equilibrium
        } else {
            Verdict::NotEquilibrium
        }
    }
}

/// Equilibrium iff `F(π) = ∅` or every increment vanishes.
pub fn classify_by_increment(game: &ProductTwoActionGame, cand: &EquilibriumCandidate) -> Verdict {
    Verdict::from_bool(
        cand.boundary.iter().all(|&(i, _)| {
            increment(game, cand, i).expect("boundary players are fixed points") == 0
        }),
    )
}

/// Equilibrium iff every boundary player's `λ^i` is positive when `γ^i = 1`
/// and negative when `γ^i = 0`, evaluated exactly.
pub fn classify_by_sign(game: &ProductTwoActionGame, cand: &EquilibriumCandidate) -> Verdict {
    debug_assert!(cand
        .pi
        .moved_points()
        .into_iter()
        .all(|i| game.factored_lambda(i, &cand.gamma).is_zero()));
    Verdict::from_bool(cand.boundary.iter().all(|&(i, b)| {
        let lambda = game.factored_lambda(i, &cand.gamma);
        if b == 1 {
            lambda.is_positive()
        } else {
            lambda.is_negative()
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Increment,
    Sign,
    /// Runs both classifiers and records every disagreement.
    Both,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Increment => "increment",
            Method::Sign => "sign",
            Method::Both => "both",
        })
    }
}

/// Result of classifying one candidate with a given method.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    /// Set under [`Method::Both`] when the classifiers differ; `verdict` is
    /// then the increment verdict.
    pub disagreement: Option<(Verdict, Verdict)>,
}

pub fn classify(
    game: &ProductTwoActionGame,
    cand: &EquilibriumCandidate,
    method: Method,
) -> Classification {
    match method {
        Method::Increment => Classification {
            verdict: classify_by_increment(game, cand),
            disagreement: None,
        },
        Method::Sign => Classification {
            verdict: classify_by_sign(game, cand),
            disagreement: None,
        },
        Method::Both => {
            let inc = classify_by_increment(game, cand);
            let sign = classify_by_sign(game, cand);
            Classification {
                verdict: inc,
                disagreement: (inc != sign).then_some((inc, sign)),
            }
        }
    }
}

/// Equilibria of a product game, in candidate enumeration order.
pub fn equilibria(game: &ProductTwoActionGame, method: Method) -> Vec<EquilibriumCandidate> {
    enumerate_candidates(game)
        .filter(|c| classify(game, c, method).verdict.is_equilibrium())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceCount {
    pub l: usize,
    pub candidates: u64,
    pub equilibria: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub pi: Vec<usize>,
    pub gamma: Vec<String>,
    pub by_increment: Verdict,
    pub by_sign: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub m: usize,
    pub method: Method,
    pub per_l: Vec<FaceCount>,
    pub total_candidates: u64,
    pub total_equilibria: u64,
    pub expected_lower_bound: u64,
    pub matches_expected: bool,
    pub disagreements: Vec<Disagreement>,
}

impl CensusReport {
    pub fn equilibria_by_face(&self) -> Vec<u64> {
        self.per_l.iter().map(|f| f.equilibria).collect()
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    candidates: Vec<u64>,
    equilibria: Vec<u64>,
    disagreements: Vec<Disagreement>,
}

impl Tally {
    fn new(m: usize) -> Self {
        Self {
            candidates: vec![0; m + 1],
            equilibria: vec![0; m + 1],
            disagreements: Vec::new(),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.candidates.iter_mut().zip(other.candidates) {
            *a += b;
        }
        for (a, b) in self.equilibria.iter_mut().zip(other.equilibria) {
            *a += b;
        }
        self.disagreements.extend(other.disagreements);
        self
    }
}

/// Counts candidates and equilibria per face class. Permutations are streamed
/// and classified in parallel; only per-class counters are kept.
pub fn census(game: &ProductTwoActionGame, method: Method) -> CensusReport {
    let m = game.players();
    let mut tally = enumerate_permutations(m)
        .par_bridge()
        .map(|pi| {
            let mut t = Tally::new(m);
            for cand in candidates_for(game, &pi) {
                let l = cand.face_class();
                let c = classify(game, &cand, method);
                t.candidates[l] += 1;
                if c.verdict.is_equilibrium() {
                    t.equilibria[l] += 1;
                }
                if let Some((by_increment, by_sign)) = c.disagreement {
                    t.disagreements.push(Disagreement {
                        pi: cand.pi.images().to_vec(),
                        gamma: cand.gamma.iter().map(ToString::to_string).collect(),
                        by_increment,
                        by_sign,
                    });
                }
            }
            t
        })
        .reduce(|| Tally::new(m), Tally::merge);
    tally
        .disagreements
        .sort_by(|a, b| (&a.pi, &a.gamma).cmp(&(&b.pi, &b.gamma)));
    let per_l: Vec<FaceCount> = (0..=m)
        .map(|l| FaceCount {
            l,
            candidates: tally.candidates[l],
            equilibria: tally.equilibria[l],
        })
        .collect();
    let total_candidates = tally.candidates.iter().sum();
    let total_equilibria = tally.equilibria.iter().sum();
    let expected = to_u64(&lower_bound(m));
    CensusReport {
        m,
        method,
        per_l,
        total_candidates,
        total_equilibria,
        expected_lower_bound: expected,
        matches_expected: total_equilibria == expected,
        disagreements: tally.disagreements,
    }
}

/// A counterexample to the crossing tables used for the δ-permutations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossingViolation {
    /// `χ(δ^j(π(j)), δ^j(i))` differs from the four-case table.
    Crossing {
        pi: Vec<usize>,
        i: usize,
        j: usize,
        expected: u8,
        found: u8,
    },
    /// The pair `(χ[i1], χ[i2])` differs from the nine-case table.
    Pair {
        pi: Vec<usize>,
        i1: usize,
        i2: usize,
        j: usize,
        expected: (u8, u8),
        found: (u8, u8),
    },
}

/// Four-case table for `χ(δ^j(π(j)), δ^j(i))`, `i` fixed and `j` moved.
fn crossing_table(i: usize, j: usize, pj: usize) -> u8 {
    if j < i {
        u8::from(pj < j || pj > i)
    } else {
        u8::from(i < pj && pj < j)
    }
}

/// Nine-case table for `(χ[i1], χ[i2])` with fixed `i1 < i2` and moved `j`.
fn pair_table(i1: usize, i2: usize, j: usize, pj: usize) -> (u8, u8) {
    if j < i1 {
        if pj < j || pj > i2 {
            (1, 1)
        } else if pj < i1 {
            (0, 0)
        } else {
            (1, 0)
        }
    } else if j > i2 {
        if pj < i1 || pj > j {
            (0, 0)
        } else if pj > i2 {
            (1, 1)
        } else {
            (1, 0)
        }
    } else if pj < i1 || pj > i2 {
        (0, 1)
    } else if pj < j {
        (1, 1)
    } else {
        (0, 0)
    }
}

/// Checks both crossing tables exhaustively over every non-derangement of
/// `S_m`, returning the first violation found.
pub fn verify_crossing_tables(m: usize) -> std::result::Result<(), CrossingViolation> {
    let deltas: Vec<Permutation> = (1..=m)
        .map(|j| delta_permutation(m, j).expect("index in range"))
        .collect();
    let crossing = |pi: &Permutation, i: usize, j: usize| {
        let d = &deltas[j - 1];
        chi(d.image(pi.image(j)), d.image(i))
    };
    for pi in enumerate_permutations(m).filter(|p| !p.is_derangement()) {
        let fixed = pi.fixed_points();
        let moved = pi.moved_points();
        for &i in &fixed {
            for &j in &moved {
                let expected = crossing_table(i, j, pi.image(j));
                let found = crossing(&pi, i, j);
                if expected != found {
                    return Err(CrossingViolation::Crossing {
                        pi: pi.images().to_vec(),
                        i,
                        j,
                        expected,
                        found,
                    });
                }
            }
        }
        for (k, &i1) in fixed.iter().enumerate() {
            for &i2 in &fixed[k + 1..] {
                for &j in &moved {
                    let expected = pair_table(i1, i2, j, pi.image(j));
                    let found = (crossing(&pi, i1, j), crossing(&pi, i2, j));
                    if expected != found {
                        return Err(CrossingViolation::Pair {
                            pi: pi.images().to_vec(),
                            i1,
                            i2,
                            j,
                            expected,
                            found,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}
