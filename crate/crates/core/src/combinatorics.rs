//! Permutations, derangements and the counting functions used throughout
//! the crate.
//!
//! Players are numbered `1..=m`. A [`Permutation`] is stored as its dense
//! image sequence, so `p.image(i)` is the image of player `i`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `{1..m}` stored as its image sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m + 1];
        for &x in &images {
            if x == 0 || x > m || seen[x] {
                return Err(Error::NotAPermutation { m, images });
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            images: (1..=m).collect(),
        }
    }

    /// Builds the transposition swapping `a` and `b` in `S_m`.
    pub fn transposition(m: usize, a: usize, b: usize) -> Result<Self> {
        for x in [a, b] {
            if x == 0 || x > m {
                return Err(Error::PlayerOutOfRange { index: x, m });
            }
        }
        let mut images: Vec<usize> = (1..=m).collect();
        images.swap(a - 1, b - 1);
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of the 1-based point `i`. Panics if `i` is out of range.
    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (k, &x) in self.images.iter().enumerate() {
            inv[x - 1] = k + 1;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(
            self.len(),
            other.len(),
            "composing permutations of different degree"
        );
        Self {
            images: other.images.iter().map(|&x| self.image(x)).collect(),
        }
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.image(i) == i
    }

    /// Fixed points in increasing order.
    pub fn fixed_points(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| self.is_fixed(i)).collect()
    }

    /// Points moved by the permutation, in increasing order.
    pub fn moved_points(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| !self.is_fixed(i)).collect()
    }

    pub fn is_derangement(&self) -> bool {
        (1..=self.len()).all(|i| !self.is_fixed(i))
    }

    pub fn is_identity(&self) -> bool {
        (1..=self.len()).all(|i| self.is_fixed(i))
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Self::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// All of `S_m` in lexicographic order of image sequences.
pub fn enumerate_permutations(m: usize) -> Permutations {
    Permutations {
        next: Some((1..=m).collect()),
    }
}

/// The derangements of `{1..m}` in lexicographic order of image sequences.
pub fn enumerate_derangements(m: usize) -> impl Iterator<Item = Permutation> {
    enumerate_permutations(m).filter(Permutation::is_derangement)
}

pub struct Permutations {
    next: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { images: current })
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut k = v.len() - 1;
    while k > 0 && v[k - 1] >= v[k] {
        k -= 1;
    }
    if k == 0 {
        return false;
    }
    let mut l = v.len() - 1;
    while v[l] <= v[k - 1] {
        l -= 1;
    }
    v.swap(k - 1, l);
    v[k..].reverse();
    true
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the division is exact.
    (0..k).fold(BigUint::one(), |acc, t| acc * (n - t) / (t + 1))
}

/// `!n`, the number of derangements of an `n`-element set.
pub fn subfactorial(n: usize) -> BigUint {
    subfactorial_by_pair_recursion(n)
}

/// `!n = n·!(n−1) + (−1)^n`, `!0 = 1`.
pub fn subfactorial_by_sign_recursion(n: usize) -> BigUint {
    let mut d = BigInt::one();
    for k in 1..=n {
        d = d * k + if k % 2 == 0 { 1 } else { -1 };
    }
    d.to_biguint().expect("subfactorial is non-negative")
}

/// `!n = (n−1)(!(n−1) + !(n−2))`, `!0 = 1`, `!1 = 0`.
pub fn subfactorial_by_pair_recursion(n: usize) -> BigUint {
    let (mut prev, mut cur) = (BigUint::one(), BigUint::zero());
    if n == 0 {
        return prev;
    }
    for k in 2..=n {
        let next = (k - 1) * (&cur + &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `!n = n! · Σ_{j=0}^{n} (−1)^j / j!`, evaluated in exact rationals.
pub fn subfactorial_by_alternating_sum(n: usize) -> BigUint {
    let mut sum = BigRational::zero();
    let mut inv_fact = BigRational::one();
    for j in 0..=n {
        if j > 0 {
            inv_fact /= BigInt::from(j);
        }
        if j % 2 == 0 {
            sum += &inv_fact;
        } else {
            sum -= &inv_fact;
        }
    }
    let total = sum * BigRational::from_integer(BigInt::from(factorial(n)));
    assert!(total.is_integer() && !total.is_negative());
    total.to_integer().to_biguint().unwrap()
}

/// `V(m) = Σ_{l=0}^{m} m!/l!`, the number of equilibrium candidates of a
/// product two-action game with `m` players.
pub fn upper_bound(m: usize) -> BigUint {
    // m!/l! = (l+1)(l+2)...m, accumulated from l = m downwards.
    let mut total = BigUint::zero();
    let mut term = BigUint::one();
    for l in (0..=m).rev() {
        total += &term;
        term *= l.max(1);
    }
    total
}

/// `Σ_{l=0}^{m} C(m,l)·2^l·!(m−l)`: the same number counted face by face.
pub fn upper_bound_by_faces(m: usize) -> BigUint {
    (0..=m).map(|l| candidates_on_faces(m, l)).sum()
}

/// Number of candidates on faces with exactly `l` boundary coordinates,
/// `C(m,l)·2^l·!(m−l)`.
pub fn candidates_on_faces(m: usize, l: usize) -> BigUint {
    binomial(m, l) * (BigUint::one() << l) * subfactorial(m - l)
}

/// Equilibria of a maximal product game on faces with `l` boundary
/// coordinates: `!m` for `l = 0`, `C(m,l)·2^(l−1)·!(m−l)` otherwise.
pub fn maximal_equilibria_on_faces(m: usize, l: usize) -> BigUint {
    if l == 0 {
        subfactorial(m)
    } else {
        binomial(m, l) * (BigUint::one() << (l - 1)) * subfactorial(m - l)
    }
}

/// `(V(m) + !m) / 2`.
pub fn lower_bound(m: usize) -> BigUint {
    let sum = upper_bound(m) + subfactorial(m);
    assert!(!sum.bit(0), "V({m}) + !{m} must be even");
    sum >> 1
}

/// `u64` convenience wrapper for counts known to be small.
pub fn to_u64(x: &BigUint) -> u64 {
    x.to_u64().expect("count exceeds u64")
}

/// 1 iff `a ≥ b`.
#[inline]
pub fn chi<T: PartialOrd>(a: T, b: T) -> u8 {
    u8::from(a >= b)
}

fn check_index(m: usize, i: usize) -> Result<()> {
    if i == 0 || i > m {
        Err(Error::PlayerOutOfRange { index: i, m })
    } else {
        Ok(())
    }
}

/// The cycle `(m m−1 … i+1 i)`: fixes `1..i−1`, sends `i ↦ m` and shifts the
/// tail down by one.
pub fn alpha_permutation(m: usize, i: usize) -> Result<Permutation> {
    check_index(m, i)?;
    let images = (1..=m)
        .map(|j| match j.cmp(&i) {
            std::cmp::Ordering::Less => j,
            std::cmp::Ordering::Equal => m,
            std::cmp::Ordering::Greater => j - 1,
        })
        .collect();
    Ok(Permutation { images })
}

/// Rotation fixing `m`: `j ↦ m−i+j` below `i`, `j ↦ j−i+1` on `i..m−1`.
pub fn beta_permutation(m: usize, i: usize) -> Result<Permutation> {
    check_index(m, i)?;
    let images = (1..=m)
        .map(|j| {
            if j == m {
                m
            } else if j < i {
                m - i + j
            } else {
                j - i + 1
            }
        })
        .collect();
    Ok(Permutation { images })
}

/// `δ^i`, the unique permutation fixing `i` that inverts exactly the pairs
/// `j1 < i < j2`, evaluated from its closed piecewise form.
pub fn delta_permutation(m: usize, i: usize) -> Result<Permutation> {
    check_index(m, i)?;
    let images = (1..=m)
        .map(|j| {
            if j < i {
                let t = m - i + j;
                t + chi(t, i) as usize
            } else if j == i {
                i
            } else {
                let t = j - i;
                t + chi(t, i) as usize
            }
        })
        .collect();
    Ok(Permutation { images })
}

/// `δ^i` as the conjugate `(α^i)^{-1} ∘ β^i ∘ α^i`.
pub fn delta_by_conjugation(m: usize, i: usize) -> Result<Permutation> {
    let alpha = alpha_permutation(m, i)?;
    let beta = beta_permutation(m, i)?;
    Ok(alpha.inverse().compose(&beta).compose(&alpha))
}
