//! Game files.
//!
//! ```json
//! {
//!   "m": 2,
//!   "mode": "exact",
//!   "utilities": [["0/1", "0/1", "-2/3", "1/3"], ["0/1", "-1/3", "0/1", "2/3"]],
//!   "product": { "v": [0, 0], "sigma": [[1, 2], [1, 2]], "a": {"1,2": "2/3", "2,1": "1/3"} }
//! }
//! ```
//!
//! Utilities are listed per player in lexicographic profile order, player 1
//! most significant. Exact values are `"p/q"` strings, float values are JSON
//! numbers. The optional `product` block carries the characteristic tuple and
//! thresholds; when present the utilities must equal the tensor they define.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::combinatorics::Permutation;
use crate::error::{Error, Result};
use crate::game::{
    build_product_game, CharacteristicTuple, CoefficientMatrix, Mode, ProductTwoActionGame,
    TwoActionGame,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    m: usize,
    mode: Mode,
    utilities: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    product: Option<RawProduct>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProduct {
    v: Vec<u8>,
    sigma: Vec<Vec<usize>>,
    a: BTreeMap<String, String>,
}

/// Contents of a game file.
#[derive(Debug, Clone)]
pub enum GameFile {
    Product(ProductTwoActionGame),
    Exact(TwoActionGame<BigRational>),
    Float(TwoActionGame<f64>),
}

impl GameFile {
    pub fn players(&self) -> usize {
        match self {
            GameFile::Product(g) => g.players(),
            GameFile::Exact(g) => g.players(),
            GameFile::Float(g) => g.players(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            GameFile::Float(_) => Mode::Float,
            _ => Mode::Exact,
        }
    }

    pub fn product(&self) -> Option<&ProductTwoActionGame> {
        match self {
            GameFile::Product(g) => Some(g),
            _ => None,
        }
    }

    pub fn to_float(&self) -> TwoActionGame<f64> {
        match self {
            GameFile::Product(g) => g.tensor().to_float(),
            GameFile::Exact(g) => g.to_float(),
            GameFile::Float(g) => g.clone(),
        }
    }
}

/// Always `p/q`, even for integers.
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Format(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

fn exact_value(v: &Value, player: usize, k: usize) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => {
            Ok(BigRational::from_integer(BigInt::from(n.as_i64().unwrap())))
        }
        _ => Err(Error::Format(format!(
            "utility {k} of player {player}: exact mode expects a \"p/q\" string, found {v}"
        ))),
    }
}

fn float_value(v: &Value, player: usize, k: usize) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
    .filter(|x: &f64| x.is_finite())
    .ok_or_else(|| {
        Error::Format(format!(
            "utility {k} of player {player}: expected a finite number, found {v}"
        ))
    })
}

fn parse_tables<T>(
    raw: &[Vec<Value>],
    f: impl Fn(&Value, usize, usize) -> Result<T>,
) -> Result<Vec<Vec<T>>> {
    raw.iter()
        .enumerate()
        .map(|(p, row)| {
            row.iter()
                .enumerate()
                .map(|(k, v)| f(v, p + 1, k))
                .collect()
        })
        .collect()
}

fn parse_product(raw: &RawProduct, m: usize) -> Result<ProductTwoActionGame> {
    let sigma = raw
        .sigma
        .iter()
        .map(|images| Permutation::new(images.clone()))
        .collect::<Result<Vec<_>>>()?;
    let tuple = CharacteristicTuple::new(raw.v.clone(), sigma)?;
    if tuple.players() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: tuple.players(),
        });
    }
    let triples = raw
        .a
        .iter()
        .map(|(key, val)| {
            let (i, j) = key
                .split_once(',')
                .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)))
                .ok_or_else(|| Error::Format(format!("coefficient key {key:?} is not \"i,j\"")))?;
            Ok((i, j, parse_rational(val)?))
        })
        .collect::<Result<Vec<(usize, usize, BigRational)>>>()?;
    build_product_game(tuple, CoefficientMatrix::new(m, triples)?)
}

/// Parses a game file. Syntax errors report line and column.
pub fn parse_game(text: &str) -> Result<GameFile> {
    let raw: RawGame = serde_json::from_str(text)
        .map_err(|e| Error::Format(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    if raw.utilities.len() != raw.m {
        return Err(Error::Format(format!(
            "\"m\" is {} but {} utility tables are given",
            raw.m,
            raw.utilities.len()
        )));
    }
    match raw.mode {
        Mode::Float => {
            if raw.product.is_some() {
                return Err(Error::Format(
                    "a \"product\" block requires exact mode".into(),
                ));
            }
            Ok(GameFile::Float(TwoActionGame::new(parse_tables(
                &raw.utilities,
                float_value,
            )?)?))
        }
        Mode::Exact => {
            let tensor = TwoActionGame::new(parse_tables(&raw.utilities, exact_value)?)?;
            let Some(p) = &raw.product else {
                return Ok(GameFile::Exact(tensor));
            };
            let game = parse_product(p, raw.m)?;
            for i in 1..=raw.m {
                if let Some(s) = (0..1usize << raw.m)
                    .find(|&s| tensor.utilities(i)[s] != game.tensor().utilities(i)[s])
                {
                    return Err(Error::Format(format!(
                        "utility {s} of player {i} disagrees with the product data"
                    )));
                }
            }
            Ok(GameFile::Product(game))
        }
    }
}

fn to_text(raw: &RawGame) -> String {
    let mut s = serde_json::to_string_pretty(raw).expect("game file serializes");
    s.push('\n');
    s
}

fn exact_rows(game: &TwoActionGame<BigRational>) -> Vec<Vec<Value>> {
    game.all_utilities()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| Value::String(format_rational(x)))
                .collect()
        })
        .collect()
}

pub fn write_game(file: &GameFile) -> String {
    let raw = match file {
        GameFile::Product(g) => RawGame {
            m: g.players(),
            mode: Mode::Exact,
            utilities: exact_rows(g.tensor()),
            product: Some(RawProduct {
                v: g.tuple().signs().to_vec(),
                sigma: g
                    .tuple()
                    .sigmas()
                    .iter()
                    .map(|s| s.images().to_vec())
                    .collect(),
                a: g.coefficients()
                    .triples()
                    .map(|(i, j, a)| (format!("{i},{j}"), format_rational(a)))
                    .collect(),
            }),
        },
        GameFile::Exact(g) => RawGame {
            m: g.players(),
            mode: Mode::Exact,
            utilities: exact_rows(g),
            product: None,
        },
        GameFile::Float(g) => RawGame {
            m: g.players(),
            mode: Mode::Float,
            utilities: g
                .all_utilities()
                .iter()
                .map(|row| row.iter().map(|&x| Value::from(x)).collect())
                .collect(),
            product: None,
        },
    };
    to_text(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{maximal_game, product_game, rational};
    use proptest::prelude::*;

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&rational(3, 1)), "3/1");
        assert_eq!(format_rational(&rational(-2, 6)), "-1/3");
        assert_eq!(parse_rational(" 4/8 ").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), rational(-7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn maximal_round_trip() {
        let g = maximal_game(4);
        let text = write_game(&GameFile::Product(g.clone()));
        let back = parse_game(&text).unwrap();
        let p = back.product().expect("product block survives");
        assert_eq!(p.tuple(), g.tuple());
        assert_eq!(p.coefficients(), g.coefficients());
        assert_eq!(p.tensor(), g.tensor());
    }

    #[test]
    fn syntax_error_names_line() {
        let err = parse_game(
            "{\n  \"m\": 1,\n  \"mode\": \"exact\",\n  \"utilities\": [[\"0/1\" \"1/1\"]]\n}",
        )
        .unwrap_err();
        let Error::Format(msg) = err else { panic!() };
        assert!(msg.starts_with("line 4,"), "{msg}");
    }

    #[test]
    fn semantic_errors() {
        let bad_len = r#"{"m": 2, "mode": "float", "utilities": [[0, 1, 2], [0, 1, 2, 3]]}"#;
        assert!(matches!(
            parse_game(bad_len),
            Err(Error::TableSize { player: 1, .. })
        ));
        let bad_m = r#"{"m": 3, "mode": "float", "utilities": [[0, 1]]}"#;
        assert!(parse_game(bad_m).is_err());
        let float_in_exact = r#"{"m": 1, "mode": "exact", "utilities": [[0.5, 1]]}"#;
        assert!(parse_game(float_in_exact).is_err());
        let unknown = r#"{"m": 1, "mode": "float", "utilities": [[0, 1]], "extra": 1}"#;
        assert!(parse_game(unknown).is_err());
    }

    #[test]
    fn tampered_utilities_rejected() {
        let text = write_game(&GameFile::Product(maximal_game(2)));
        let mut raw: Value = serde_json::from_str(&text).unwrap();
        raw["utilities"][0][3] = Value::String("5/1".into());
        let err = parse_game(&raw.to_string()).unwrap_err();
        assert!(err.to_string().contains("disagrees"), "{err}");
    }

    #[test]
    fn sigma_moving_own_index_rejected() {
        let text = write_game(&GameFile::Product(maximal_game(3)));
        let mut raw: Value = serde_json::from_str(&text).unwrap();
        raw["product"]["sigma"][1] = serde_json::json!([2, 1, 3]);
        assert!(matches!(
            parse_game(&raw.to_string()),
            Err(Error::SigmaMovesOwnIndex { j: 2, .. })
        ));
    }

    fn arb_tuple(m: usize) -> impl Strategy<Value = CharacteristicTuple> {
        let v = proptest::collection::vec(0u8..=1, m);
        let sig = proptest::collection::vec(Just((1..m).collect::<Vec<usize>>()).prop_shuffle(), m);
        (v, sig).prop_map(move |(v, ranks)| {
            let sigma = ranks
                .into_iter()
                .enumerate()
                .map(|(k, r)| {
                    let j = k + 1;
                    let mut images = Vec::with_capacity(m);
                    let mut it = r.into_iter().map(|x| if x >= j { x + 1 } else { x });
                    for i in 1..=m {
                        images.push(if i == j { j } else { it.next().unwrap() });
                    }
                    Permutation::new(images).unwrap()
                })
                .collect();
            CharacteristicTuple::new(v, sigma).unwrap()
        })
    }

    proptest! {
        #[test]
        fn product_round_trip(t in (1usize..=5).prop_flat_map(arb_tuple)) {
            let g = product_game(t);
            let back = parse_game(&write_game(&GameFile::Product(g.clone()))).unwrap();
            let p = back.product().unwrap();
            prop_assert_eq!(p.tuple(), g.tuple());
            prop_assert_eq!(p.tensor(), g.tensor());
        }

        #[test]
        fn float_round_trip(m in 1usize..=4, seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = crate::game::random_game(m, &mut rng);
            let back = parse_game(&write_game(&GameFile::Float(g.clone()))).unwrap();
            let GameFile::Float(h) = back else { panic!("mode lost") };
            prop_assert_eq!(h, g);
        }
    }
}
