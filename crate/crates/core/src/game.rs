//! Two-action games as payoff tensors, and the product games built from a
//! characteristic tuple.
//!
//! Pure profiles `(j_1, …, j_m) ∈ {0,1}^m` are indexed lexicographically with
//! player 1 as the most significant bit, so player `k` sits at bit `m − k`.
//! A mixed profile is the vector `γ` of probabilities of playing action 1.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{delta_permutation, Permutation};
use crate::error::{Error, Result};

/// Field elements a game can be evaluated over.
pub trait Scalar:
    Clone + Num + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const MODE: Mode;
    fn as_f64(&self) -> f64;
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::Exact;
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Arithmetic mode of a game or profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Bit of player `k` (1-based) in a profile index over `m` players.
#[inline]
pub fn action_of(profile: usize, m: usize, k: usize) -> usize {
    (profile >> (m - k)) & 1
}

/// Evaluates the multilinear extension of `table` (indexed over `{0,1}^n`,
/// first coordinate most significant) at `point`.
pub fn contract<T: Scalar>(table: &[T], point: &[T]) -> T {
    debug_assert_eq!(table.len(), 1 << point.len());
    let mut cur: Vec<T> = table.to_vec();
    for g in point {
        let half = cur.len() / 2;
        let one_minus = T::one() - g.clone();
        let next = (0..half)
            .map(|t| one_minus.clone() * cur[t].clone() + g.clone() * cur[half + t].clone())
            .collect();
        cur = next;
    }
    cur.pop().expect("non-empty table")
}

/// A game in which each of `m` players has actions 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoActionGame<T> {
    m: usize,
    utilities: Vec<Vec<T>>,
}

impl<T: Scalar> TwoActionGame<T> {
    pub fn new(utilities: Vec<Vec<T>>) -> Result<Self> {
        let m = utilities.len();
        let expected = 1usize << m;
        for (k, table) in utilities.iter().enumerate() {
            if table.len() != expected {
                return Err(Error::TableSize {
                    player: k + 1,
                    expected,
                    actual: table.len(),
                });
            }
        }
        Ok(Self { m, utilities })
    }

    pub fn players(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> Mode {
        T::MODE
    }

    /// Utility table `U^i` in lexicographic profile order.
    pub fn utilities(&self, i: usize) -> &[T] {
        &self.utilities[i - 1]
    }

    pub fn all_utilities(&self) -> &[Vec<T>] {
        &self.utilities
    }

    fn check_player(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.m {
            Err(Error::PlayerOutOfRange {
                index: i,
                m: self.m,
            })
        } else {
            Ok(())
        }
    }

    /// Expected utility `V^i(g)` of player `i` at the mixed profile `g`.
    pub fn payoff(&self, i: usize, g: &[T]) -> Result<T> {
        self.check_player(i)?;
        if g.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: g.len(),
            });
        }
        Ok(contract(self.utilities(i), g))
    }

    /// Table of `U^i(1, s^{-i}) − U^i(0, s^{-i})` over the `2^(m−1)` profiles
    /// of the other players.
    pub fn difference_table(&self, i: usize) -> Result<Vec<T>> {
        self.check_player(i)?;
        let m = self.m;
        let shift = m - i;
        let low_mask = (1usize << shift) - 1;
        let u = self.utilities(i);
        Ok((0..1usize << (m - 1))
            .map(|rest| {
                let base = ((rest >> shift) << (shift + 1)) | (rest & low_mask);
                u[base | (1 << shift)].clone() - u[base].clone()
            })
            .collect())
    }

    /// `λ^i(g^{-i}) = V^i(s^i_1, g^{-i}) − V^i(s^i_0, g^{-i})`, with
    /// `g_minus_i` listing the other players' coordinates in player order.
    pub fn lambda(&self, i: usize, g_minus_i: &[T]) -> Result<T> {
        self.check_player(i)?;
        if g_minus_i.len() + 1 != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m - 1,
                actual: g_minus_i.len(),
            });
        }
        Ok(contract(&self.difference_table(i)?, g_minus_i))
    }

    /// `λ^i` at a full profile, ignoring coordinate `i`.
    pub fn lambda_at(&self, i: usize, g: &[T]) -> Result<T> {
        if g.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: g.len(),
            });
        }
        self.lambda(i, &drop_coordinate(g, i))
    }

    pub fn to_float(&self) -> TwoActionGame<f64> {
        TwoActionGame {
            m: self.m,
            utilities: self
                .utilities
                .iter()
                .map(|t| t.iter().map(Scalar::as_f64).collect())
                .collect(),
        }
    }
}

/// Copy of `g` without the 1-based coordinate `i`.
pub fn drop_coordinate<T: Clone>(g: &[T], i: usize) -> Vec<T> {
    g.iter()
        .enumerate()
        .filter(|&(k, _)| k + 1 != i)
        .map(|(_, x)| x.clone())
        .collect()
}

/// A point of `[0,1]^m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedProfile<T> {
    gamma: Vec<T>,
}

impl<T: Scalar> MixedProfile<T> {
    pub fn new(gamma: Vec<T>) -> Result<Self> {
        for (k, g) in gamma.iter().enumerate() {
            if *g < T::zero() || *g > T::one() {
                return Err(Error::ProbabilityOutOfRange {
                    index: k + 1,
                    value: g.to_string(),
                });
            }
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> &[T] {
        &self.gamma
    }

    pub fn into_inner(self) -> Vec<T> {
        self.gamma
    }

    pub fn coordinate(&self, i: usize) -> &T {
        &self.gamma[i - 1]
    }

    pub fn mode(&self) -> Mode {
        T::MODE
    }

    /// Players playing action 0 with certainty.
    pub fn zeros(&self) -> Vec<usize> {
        self.players_where(|g| g.is_zero())
    }

    /// Players playing action 1 with certainty.
    pub fn ones(&self) -> Vec<usize> {
        self.players_where(|g| g.is_one())
    }

    /// Players on the boundary `{0,1}`.
    pub fn boundary(&self) -> Vec<usize> {
        self.players_where(|g| g.is_zero() || g.is_one())
    }

    /// Number of boundary coordinates, i.e. the face class `l`.
    pub fn face_class(&self) -> usize {
        self.boundary().len()
    }

    fn players_where(&self, pred: impl Fn(&T) -> bool) -> Vec<usize> {
        (1..=self.gamma.len())
            .filter(|&i| pred(&self.gamma[i - 1]))
            .collect()
    }

    pub fn to_float(&self) -> MixedProfile<f64> {
        MixedProfile {
            gamma: self.gamma.iter().map(Scalar::as_f64).collect(),
        }
    }
}

/// `(v, σ)`: the sign vector and the associated permutations of a product
/// two-action game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicTuple {
    v: Vec<u8>,
    sigma: Vec<Permutation>,
}

impl CharacteristicTuple {
    pub fn new(v: Vec<u8>, sigma: Vec<Permutation>) -> Result<Self> {
        let m = v.len();
        if sigma.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: sigma.len(),
            });
        }
        for (k, &x) in v.iter().enumerate() {
            if x > 1 {
                return Err(Error::BadSign {
                    index: k + 1,
                    value: x,
                });
            }
        }
        for (k, s) in sigma.iter().enumerate() {
            let j = k + 1;
            if s.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: s.len(),
                });
            }
            if s.image(j) != j {
                return Err(Error::SigmaMovesOwnIndex {
                    j,
                    image: s.image(j),
                });
            }
        }
        Ok(Self { v, sigma })
    }

    /// `((0,…,0), (δ^1,…,δ^m))`.
    pub fn maximal(m: usize) -> Self {
        let sigma = (1..=m)
            .map(|i| delta_permutation(m, i).expect("index in range"))
            .collect();
        Self {
            v: vec![0; m],
            sigma,
        }
    }

    pub fn players(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self, i: usize) -> u8 {
        self.v[i - 1]
    }

    pub fn signs(&self) -> &[u8] {
        &self.v
    }

    /// `σ^j`.
    pub fn sigma(&self, j: usize) -> &Permutation {
        &self.sigma[j - 1]
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.sigma
    }
}

/// Thresholds `a^i_j ∈ (0,1)` for ordered pairs `i ≠ j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMatrix {
    m: usize,
    entries: Vec<Option<BigRational>>,
}

impl CoefficientMatrix {
    /// Builds the matrix from `(i, j, a^i_j)` triples, checking that every
    /// off-diagonal entry is present, strictly inside `(0,1)`, and that each
    /// column `j` has pairwise distinct entries.
    pub fn new(
        m: usize,
        triples: impl IntoIterator<Item = (usize, usize, BigRational)>,
    ) -> Result<Self> {
        let mut entries = vec![None; m * m];
        for (i, j, a) in triples {
            for x in [i, j] {
                if x == 0 || x > m {
                    return Err(Error::PlayerOutOfRange { index: x, m });
                }
            }
            if i == j {
                return Err(Error::Format(format!(
                    "diagonal coefficient a^{i}_{j} given"
                )));
            }
            if !a.is_positive() || a >= BigRational::one() {
                return Err(Error::CoefficientOutOfRange {
                    i,
                    j,
                    value: a.to_string(),
                });
            }
            entries[(i - 1) * m + (j - 1)] = Some(a);
        }
        let coeffs = Self { m, entries };
        for j in 1..=m {
            for i1 in 1..=m {
                if i1 == j {
                    continue;
                }
                let a1 = coeffs.entries[(i1 - 1) * m + (j - 1)]
                    .as_ref()
                    .ok_or(Error::MissingCoefficient { i: i1, j })?;
                for i2 in (i1 + 1)..=m {
                    if i2 == j {
                        continue;
                    }
                    if coeffs.entries[(i2 - 1) * m + (j - 1)].as_ref() == Some(a1) {
                        return Err(Error::CoefficientCollision { i1, i2, j });
                    }
                }
            }
        }
        Ok(coeffs)
    }

    pub fn players(&self) -> usize {
        self.m
    }

    /// `a^i_j`. Panics on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        self.entries[(i - 1) * self.m + (j - 1)]
            .as_ref()
            .expect("no coefficient on the diagonal")
    }

    /// Recovers `σ^j` by ranking `{a^i_j : i ≠ j}` in descending order,
    /// skipping rank `j`.
    pub fn associated_permutation(&self, j: usize) -> Permutation {
        let m = self.m;
        let mut others: Vec<usize> = (1..=m).filter(|&i| i != j).collect();
        others.sort_by(|&x, &y| self.get(y, j).cmp(self.get(x, j)));
        let mut images = vec![0; m];
        images[j - 1] = j;
        let ranks = (1..=m).filter(|&r| r != j);
        for (i, r) in others.into_iter().zip(ranks) {
            images[i - 1] = r;
        }
        Permutation::new(images).expect("ranking is a bijection")
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> + '_ {
        let m = self.m;
        self.entries
            .iter()
            .enumerate()
            .filter_map(move |(k, a)| a.as_ref().map(|a| (k / m + 1, k % m + 1, a)))
    }
}

/// Equally spaced thresholds `a^i_j = (m + 1 − σ^j(i)) / (m + 1)`.
pub fn default_coefficients(tuple: &CharacteristicTuple) -> CoefficientMatrix {
    let m = tuple.players();
    let den = (m + 1) as i64;
    let triples = (1..=m).flat_map(|i| {
        (1..=m)
            .filter(move |&j| j != i)
            .map(move |j| (i, j, rational(den - tuple.sigma(j).image(i) as i64, den)))
    });
    CoefficientMatrix::new(m, triples).expect("equally spaced coefficients are valid")
}

/// A product two-action game together with the data that defines it.
#[derive(Debug, Clone)]
pub struct ProductTwoActionGame {
    tuple: CharacteristicTuple,
    coeffs: CoefficientMatrix,
    tensor: TwoActionGame<BigRational>,
}

/// Materializes the tensor `U^i(s) = [j_i = 1]·(−1)^{v_i}·∏_{j≠i}(j_j − a^i_j)`.
pub fn build_product_game(
    tuple: CharacteristicTuple,
    coeffs: CoefficientMatrix,
) -> Result<ProductTwoActionGame> {
    let m = tuple.players();
    if coeffs.players() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: coeffs.players(),
        });
    }
    for j in 1..=m {
        let found = coeffs.associated_permutation(j);
        if &found != tuple.sigma(j) {
            return Err(Error::CoefficientOrder {
                j,
                expected: tuple.sigma(j).images().to_vec(),
                found: found.images().to_vec(),
            });
        }
    }
    let utilities = (1..=m)
        .map(|i| {
            (0..1usize << m)
                .map(|s| {
                    if action_of(s, m, i) == 0 {
                        return BigRational::zero();
                    }
                    let mut u = BigRational::one();
                    for j in (1..=m).filter(|&j| j != i) {
                        let x = BigRational::from_integer(BigInt::from(action_of(s, m, j)));
                        u *= x - coeffs.get(i, j);
                    }
                    if tuple.v(i) == 1 {
                        -u
                    } else {
                        u
                    }
                })
                .collect()
        })
        .collect();
    let tensor = TwoActionGame::new(utilities)?;
    Ok(ProductTwoActionGame {
        tuple,
        coeffs,
        tensor,
    })
}

/// The game with tuple `((0,…,0), (δ^1,…,δ^m))` and default coefficients.
pub fn maximal_game(m: usize) -> ProductTwoActionGame {
    let tuple = CharacteristicTuple::maximal(m);
    let coeffs = default_coefficients(&tuple);
    build_product_game(tuple, coeffs).expect("default coefficients realize the tuple")
}

/// Product game with default coefficients for an arbitrary tuple.
pub fn product_game(tuple: CharacteristicTuple) -> ProductTwoActionGame {
    let coeffs = default_coefficients(&tuple);
    build_product_game(tuple, coeffs).expect("default coefficients realize the tuple")
}

impl ProductTwoActionGame {
    pub fn players(&self) -> usize {
        self.tuple.players()
    }

    pub fn tuple(&self) -> &CharacteristicTuple {
        &self.tuple
    }

    pub fn coefficients(&self) -> &CoefficientMatrix {
        &self.coeffs
    }

    pub fn tensor(&self) -> &TwoActionGame<BigRational> {
        &self.tensor
    }

    /// `(−1)^{v_i} ∏_{j≠i} (γ^j − a^i_j)` at a full profile.
    pub fn factored_lambda(&self, i: usize, g: &[BigRational]) -> BigRational {
        let mut prod = BigRational::one();
        for j in (1..=self.players()).filter(|&j| j != i) {
            prod *= &g[j - 1] - self.coeffs.get(i, j);
        }
        if self.tuple.v(i) == 1 {
            -prod
        } else {
            prod
        }
    }
}

/// Adds independent uniform noise from `[−ε, ε]` to every utility entry.
pub fn perturb<T: Scalar>(
    game: &TwoActionGame<T>,
    epsilon: f64,
    seed: u64,
) -> Result<TwoActionGame<f64>> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::BadEpsilon(epsilon));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = game.to_float();
    if epsilon > 0.0 {
        for table in &mut out.utilities {
            for u in table.iter_mut() {
                *u += rng.gen_range(-epsilon..=epsilon);
            }
        }
    }
    Ok(out)
}

/// I.i.d. uniform `[−1, 1]` utilities.
pub fn random_game<R: Rng>(m: usize, rng: &mut R) -> TwoActionGame<f64> {
    let utilities = (0..m)
        .map(|_| {
            (0..1usize << m)
                .map(|_| rng.gen_range(-1.0..=1.0))
                .collect()
        })
        .collect();
    TwoActionGame { m, utilities }
}
