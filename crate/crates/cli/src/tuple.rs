//! Parsing of sign vectors and permutation lists from the command line.

use anyhow::{bail, Context, Result};
use prodgame::combinatorics::Permutation;
use prodgame::game::CharacteristicTuple;

/// A bit string such as `0101`, one bit per player.
pub fn parse_v(s: &str, m: usize) -> Result<Vec<u8>> {
    let bits: Vec<u8> = s
        .trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => bail!("--v: {c:?} is not a bit"),
        })
        .collect::<Result<_>>()?;
    if bits.len() != m {
        bail!("--v has {} bits but --m is {m}", bits.len());
    }
    Ok(bits)
}

fn numbers(s: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .with_context(|| format!("{t:?} is not a player index"))
        })
        .collect()
}

/// One permutation of `1..=m`: `id`, an image list (`1,3,2` or `[1 3 2]`),
/// or cycle notation (`(1 3)(2 4)`).
pub fn parse_permutation(s: &str, m: usize) -> Result<Permutation> {
    let s = s.trim();
    if s.is_empty() || s == "id" || s == "()" {
        return Ok(Permutation::identity(m));
    }
    if s.starts_with('(') {
        let mut images: Vec<usize> = (1..=m).collect();
        let mut seen = vec![false; m + 1];
        for chunk in s.split(')').map(str::trim).filter(|c| !c.is_empty()) {
            let Some(body) = chunk.strip_prefix('(') else {
                bail!("malformed cycle {chunk:?}");
            };
            let cycle = numbers(body)?;
            for &x in &cycle {
                if x == 0 || x > m {
                    bail!("{x} is outside 1..={m}");
                }
                if std::mem::replace(&mut seen[x], true) {
                    bail!("{x} appears in more than one place");
                }
            }
            for (k, &x) in cycle.iter().enumerate() {
                images[x - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        return Ok(Permutation::new(images)?);
    }
    let images = numbers(s.trim_start_matches('[').trim_end_matches(']'))?;
    if images.len() != m {
        bail!("{} images given, expected {m}", images.len());
    }
    Ok(Permutation::new(images)?)
}

/// `delta`, `id`, or `m` permutations separated by `;`.
pub fn parse_sigma(s: &str, m: usize) -> Result<Vec<Permutation>> {
    match s.trim() {
        "delta" => return Ok(CharacteristicTuple::maximal(m).sigmas().to_vec()),
        "id" => return Ok(vec![Permutation::identity(m); m]),
        _ => {}
    }
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != m {
        bail!(
            "--sigma lists {} permutations, expected {m} separated by ';'",
            parts.len()
        );
    }
    parts
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let j = k + 1;
            let perm =
                parse_permutation(p, m).with_context(|| format!("sigma^{j} = {:?}", p.trim()))?;
            if perm.image(j) != j {
                bail!("sigma^{j} must fix {j}, but sends it to {}", perm.image(j));
            }
            Ok(perm)
        })
        .collect()
}

pub fn parse_tuple(m: usize, v: Option<&str>, sigma: &str) -> Result<CharacteristicTuple> {
    if m == 0 {
        bail!("--m must be at least 1");
    }
    let v = match v {
        Some(s) => parse_v(s, m)?,
        None => vec![0; m],
    };
    Ok(CharacteristicTuple::new(v, parse_sigma(sigma, m)?)?)
}
