//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Runs without the libtest harness so the
//! lines appear in order and unbuffered.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use prodgame::candidates::{
    candidates_for, census, classify_by_increment, equilibria, increment, verify_crossing_tables,
    Method,
};
use prodgame::combinatorics::{
    binomial, enumerate_permutations, subfactorial, subfactorial_by_alternating_sum,
    subfactorial_by_pair_recursion, subfactorial_by_sign_recursion, to_u64, upper_bound,
    upper_bound_by_faces, Permutation,
};
use prodgame::game::{maximal_game, product_game, CharacteristicTuple, ProductTwoActionGame};
use prodgame::solver::{
    match_points, scan, solve_all, verify_deformation, DeformationConfig, ScanConfig, SolverConfig,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// `(V(m) + !m) / 2` straight from the two counts.
fn half_sum(m: usize) -> u64 {
    (to_u64(&upper_bound(m)) + to_u64(&subfactorial(m))) / 2
}

fn binding_census(m: usize) -> Vec<u64> {
    (0..=m)
        .map(|l| {
            let d = to_u64(&subfactorial(m - l));
            if l == 0 {
                d
            } else {
                to_u64(&binomial(m, l)) * (1 << (l - 1)) * d
            }
        })
        .collect()
}

fn random_tuple<R: Rng>(m: usize, rng: &mut R) -> CharacteristicTuple {
    let v = (0..m).map(|_| rng.gen_range(0..=1u8)).collect();
    let sigma = (1..=m)
        .map(|j| {
            let mut others: Vec<usize> = (1..=m).filter(|&r| r != j).collect();
            others.shuffle(rng);
            let mut it = others.into_iter();
            Permutation::new(
                (1..=m)
                    .map(|i| if i == j { j } else { it.next().unwrap() })
                    .collect(),
            )
            .unwrap()
        })
        .collect();
    CharacteristicTuple::new(v, sigma).unwrap()
}

/// Every characteristic tuple on `m` players.
fn all_tuples(m: usize) -> Vec<CharacteristicTuple> {
    let per_j: Vec<Vec<Permutation>> = (1..=m)
        .map(|j| {
            enumerate_permutations(m)
                .filter(|p| p.image(j) == j)
                .collect()
        })
        .collect();
    let mut sigmas: Vec<Vec<Permutation>> = vec![vec![]];
    for choices in &per_j {
        sigmas = sigmas
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c.clone());
                    next
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for mask in 0..1u32 << m {
        let v: Vec<u8> = (0..m).map(|k| (mask >> k & 1) as u8).collect();
        for s in &sigmas {
            out.push(CharacteristicTuple::new(v.clone(), s.clone()).unwrap());
        }
    }
    out
}

fn counting_identities() -> Outcome {
    let start = Instant::now();
    for m in 1..=10 {
        let routes = [
            subfactorial(m),
            subfactorial_by_sign_recursion(m),
            subfactorial_by_pair_recursion(m),
            subfactorial_by_alternating_sum(m),
        ];
        if routes.iter().any(|r| *r != routes[0]) {
            return outcome(
                false,
                format!("subfactorial routes disagree at m = {m}: {routes:?}"),
            );
        }
        if upper_bound(m) != upper_bound_by_faces(m) {
            return outcome(false, format!("candidate count identity fails at m = {m}"));
        }
    }
    let published = [(2, 5, 3), (3, 16, 9), (4, 65, 37), (5, 326, 187)];
    let mut mismatches = Vec::new();
    for (m, v, half) in published {
        let got = (to_u64(&upper_bound(m)), half_sum(m));
        if got != (v, half) {
            mismatches.push(format!("m={m}: computed {got:?}, table {:?}", (v, half)));
        }
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(1);
    let pass = mismatches.is_empty() && fast;
    let detail = if mismatches.is_empty() {
        format!("three subfactorial routes and both candidate counts agree for m=1..10; table reproduced ({elapsed:.2?})")
    } else {
        format!(
            "identities hold for m=1..10 but the table differs: {} ({elapsed:.2?})",
            mismatches.join("; ")
        )
    };
    outcome(pass, detail)
}

fn maximal_census() -> Outcome {
    let mut timings = Vec::new();
    for m in 1..=6 {
        let start = Instant::now();
        let r = census(&maximal_game(m), Method::Increment);
        let elapsed = start.elapsed();
        timings.push(format!("m={m} {elapsed:.2?}"));
        if r.total_equilibria != half_sum(m) || r.equilibria_by_face() != binding_census(m) {
            return outcome(
                false,
                format!(
                    "m={m}: total {} per face {:?}, expected {} / {:?}",
                    r.total_equilibria,
                    r.equilibria_by_face(),
                    half_sum(m),
                    binding_census(m)
                ),
            );
        }
        if m == 6 && elapsed >= Duration::from_secs(10) {
            return outcome(false, format!("m=6 census took {elapsed:.2?}"));
        }
    }
    outcome(
        true,
        format!(
            "totals 1,3,9,37,185,1111 with binding face counts; {}",
            timings.join(", ")
        ),
    )
}

fn method_agreement() -> Outcome {
    let mut checked = 0u64;
    for m in 1..=6 {
        let r = census(&maximal_game(m), Method::Both);
        checked += r.total_candidates;
        if !r.disagreements.is_empty() {
            return outcome(false, format!("maximal m={m}: {:?}", r.disagreements));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut tuples = 0;
    for m in 1..=5 {
        for _ in 0..200 {
            let t = random_tuple(m, &mut rng);
            let r = census(&product_game(t.clone()), Method::Both);
            checked += r.total_candidates;
            tuples += 1;
            if !r.disagreements.is_empty() {
                return outcome(false, format!("tuple {t:?}: {:?}", r.disagreements));
            }
        }
    }
    outcome(
        true,
        format!(
            "0 disagreements over {checked} candidates (maximal m<=6, {tuples} random tuples m<=5)"
        ),
    )
}

fn example_reproduction() -> Outcome {
    let id = Permutation::identity(3);
    let swap = Permutation::new(vec![3, 2, 1]).unwrap();
    let tuple = CharacteristicTuple::new(vec![0, 0, 0], vec![id.clone(), swap, id]).unwrap();
    let g = product_game(tuple);
    let a = |i: usize, j: usize| g.coefficients().get(i, j).clone();
    let orderings = a(2, 1) > a(3, 1) && a(3, 2) > a(1, 2) && a(1, 3) > a(2, 3);
    let (z, o) = (BigRational::zero, BigRational::one);
    let listed: Vec<(&str, Vec<BigRational>)> = vec![
        ("g1", vec![o(), z(), z()]),
        ("g2", vec![z(), o(), z()]),
        ("g3", vec![z(), z(), o()]),
        ("g4", vec![o(), o(), o()]),
        ("g5", vec![a(2, 1), a(1, 2), o()]),
        ("g6", vec![a(3, 1), z(), a(1, 3)]),
        ("g7", vec![z(), a(3, 2), a(2, 3)]),
        ("g8", vec![a(2, 1), a(3, 2), a(1, 3)]),
        ("g9", vec![a(3, 1), a(1, 2), a(2, 3)]),
    ];
    let found: Vec<Vec<BigRational>> = equilibria(&g, Method::Both)
        .iter()
        .map(|c| c.gamma().to_vec())
        .collect();
    let missing: Vec<&str> = listed
        .iter()
        .filter(|(_, p)| !found.contains(p))
        .map(|(n, _)| *n)
        .collect();
    let extra: Vec<String> = found
        .iter()
        .filter(|p| !listed.iter().any(|(_, q)| q == *p))
        .map(|p| {
            format!(
                "({})",
                p.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    let pass = orderings && found.len() == 9 && missing.is_empty() && extra.is_empty();
    let detail = if pass {
        "all nine listed equilibria reproduced exactly".to_string()
    } else {
        format!(
            "{} equilibria found; listed but not equilibria: {:?}; found but not listed: {:?}; orderings {}",
            found.len(),
            missing,
            extra,
            if orderings { "ok" } else { "violated" }
        )
    };
    outcome(pass, detail)
}

fn oracle_equivalence() -> Outcome {
    let mut parts = Vec::new();
    for (m, total) in [(2usize, 3u64), (3, 9), (4, 37)] {
        let g = maximal_game(m);
        let expected: Vec<Vec<f64>> = equilibria(&g, Method::Sign)
            .iter()
            .map(|c| c.gamma_f64())
            .collect();
        let start = Instant::now();
        let r = solve_all(&g.tensor().to_float(), &SolverConfig::default());
        let elapsed = start.elapsed();
        let found: Vec<Vec<f64>> = r.equilibria.iter().map(|e| e.gamma.clone()).collect();
        let worst = match_points(&found, &expected, 1e-8);
        if r.total != total || worst.is_none() {
            return outcome(
                false,
                format!(
                    "m={m}: solver {} equilibria {:?}, engine {}",
                    r.total,
                    r.face_census,
                    expected.len()
                ),
            );
        }
        if m == 4 && elapsed >= Duration::from_secs(60) {
            return outcome(false, format!("m=4 solve took {elapsed:.2?}"));
        }
        parts.push(format!(
            "m={m}: {} matched, max dist {:.1e}, {elapsed:.2?}",
            r.total,
            worst.unwrap()
        ));
    }
    outcome(true, parts.join("; "))
}

/// Parity, dichotomy, single fixed point, identity bucket and empty
/// codimension-one faces for one game.
fn structural_violation(g: &ProductTwoActionGame) -> Option<String> {
    let m = g.players();
    let uniform = g.tuple().signs().iter().all(|&v| v == g.tuple().v(1));
    for pi in enumerate_permutations(m) {
        let f = pi.fixed_points();
        if m >= 2 && f.len() == m - 1 {
            return Some(format!("{pi} has m-1 fixed points"));
        }
        if f.is_empty() {
            continue;
        }
        let cands = candidates_for(g, &pi);
        let map = |c| {
            f.iter()
                .map(|&i| increment(g, c, i).unwrap())
                .collect::<Vec<u8>>()
        };
        let base = map(&cands[0]);
        for c in &cands {
            let want: Vec<u8> = base
                .iter()
                .map(|x| x ^ (c.zero_count() % 2) as u8)
                .collect();
            if map(c) != want {
                return Some(format!("parity fails at {c}"));
            }
        }
        let eq = cands
            .iter()
            .filter(|c| classify_by_increment(g, c).is_equilibrium())
            .count();
        if eq != 0 && eq != 1 << (f.len() - 1) {
            return Some(format!(
                "{pi}: {eq} of {} candidates are equilibria",
                cands.len()
            ));
        }
        if f.len() == 1 && eq != 1 {
            return Some(format!("{pi}: single fixed point with {eq} equilibria"));
        }
        if pi.is_identity() && eq != if uniform { 1 << (m - 1) } else { 0 } {
            return Some(format!(
                "identity bucket has {eq} equilibria for v = {:?}",
                g.tuple().signs()
            ));
        }
    }
    None
}

fn structural_invariants() -> Outcome {
    let mut games = 0;
    let mut check = |t: CharacteristicTuple| -> Option<String> {
        games += 1;
        structural_violation(&product_game(t.clone())).map(|e| format!("{t:?}: {e}"))
    };
    for m in 1..=4 {
        for t in all_tuples(m) {
            if let Some(e) = check(t) {
                return outcome(false, e);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        if let Some(e) = check(random_tuple(5, &mut rng)) {
            return outcome(false, e);
        }
    }
    if let Some(e) = check(CharacteristicTuple::maximal(5)) {
        return outcome(false, e);
    }
    for m in 1..=5 {
        if let Err(v) = verify_crossing_tables(m) {
            return outcome(false, format!("crossing table: {v:?}"));
        }
    }
    outcome(true, format!("{games} games (every tuple for m<=4, 501 for m=5); crossing tables exhaustive for m<=5"))
}

fn deformation_stability() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (m, eps, trials) in [(3usize, 1e-3, 100usize), (4, 1e-4, 25)] {
        let r = verify_deformation(
            &maximal_game(m),
            &DeformationConfig::new(eps, trials, 1000 + m as u64),
        );
        let ok = r.passed && r.trials.iter().all(|t| t.count == half_sum(m));
        pass &= ok;
        parts.push(format!(
            "m={m} eps={eps:e}: count {} in {}/{} trials, tracking failures {:?}, max drift {:.1e}",
            r.expected_count, r.stable_trials, trials, r.tracking_failures, r.max_drift
        ));
    }
    outcome(pass, parts.join("; "))
}

fn inequality_scan() -> Outcome {
    let r = scan(&ScanConfig::new(3, 1000, 7));
    let pass = r.passed && r.violations.is_empty() && r.even_failures.is_empty();
    outcome(
        pass,
        format!(
            "{} games, {} violations, {} even counts regenerated, {} persistent, {} degenerate regenerated, max total {}",
            r.games_solved,
            r.violations.len(),
            r.even_regenerations,
            r.even_failures.len(),
            r.degenerate_regenerations,
            r.max_total
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("counting identities", counting_identities),
        ("maximal-game census", maximal_census),
        ("method agreement", method_agreement),
        ("three-player example", example_reproduction),
        ("oracle equivalence", oracle_equivalence),
        ("structural invariants", structural_invariants),
        ("deformation stability", deformation_stability),
        ("inequality scan", inequality_scan),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {}. {name}: {} [{:.2?}]",
            k + 1,
            o.detail,
            start.elapsed()
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
