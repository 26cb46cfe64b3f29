use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use prodgame::candidates::{self, census, enumerate_candidates, equilibria, increment, Method};
use prodgame::combinatorics::{
    lower_bound, maximal_equilibria_on_faces, subfactorial, to_u64, upper_bound,
};
use prodgame::game::{product_game, ProductTwoActionGame};
use prodgame::io::{parse_game, write_game, GameFile};
use prodgame::solver::{
    adjacent_vertex_pairs, check_inequalities, match_points, scan as run_scan, solve_all,
    verify_deformation, DeformationConfig, ScanConfig, SolverConfig,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{check_lines, config_header, csv, json, CheckFailure, Format, OutputArgs};
use crate::tuple::parse_tuple;
use crate::{GameArgs, Status, TupleArgs};

/// Max-norm tolerance when matching solver output against the exact engine.
const MATCH_TOL: f64 = 1e-8;

struct Rendered {
    config: Value,
    body: Value,
    csv: String,
    text: String,
    failures: Vec<CheckFailure>,
}

fn finish(output: &OutputArgs, r: Rendered) -> Result<Status> {
    let passed = r.failures.is_empty();
    let text = match output.format {
        Format::Text => format!(
            "{}{}{}",
            config_header(&r.config),
            r.text,
            check_lines(&r.failures)
        ),
        Format::Csv => r.csv,
        Format::Json => {
            let mut body = r.body;
            let obj = body.as_object_mut().expect("report is an object");
            obj.insert("config".into(), r.config);
            obj.insert("failures".into(), serde_json::to_value(&r.failures)?);
            obj.insert("passed".into(), Value::Bool(passed));
            json(&body)
        }
    };
    output.emit(&text)?;
    if passed {
        Ok(Status::Pass)
    } else {
        eprintln!(
            "{}",
            serde_json::to_string(&json!({ "failures": r.failures }))?
        );
        Ok(Status::CheckFailed)
    }
}

fn load(args: &GameArgs) -> Result<(GameFile, Value)> {
    if let Some(path) = &args.file {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let game = parse_game(&text).with_context(|| format!("{}", path.display()))?;
        return Ok((game, json!({ "file": path.display().to_string() })));
    }
    let Some(m) = args.m else {
        bail!("give a game file or --m");
    };
    let sigma = args.sigma.as_deref().unwrap_or("delta");
    let tuple = parse_tuple(m, args.v.as_deref(), sigma)?;
    let source = json!({ "m": m, "v": tuple.signs(), "sigma": sigma });
    Ok((GameFile::Product(product_game(tuple)), source))
}

fn require_product(file: &GameFile) -> Result<&ProductTwoActionGame> {
    file.product().context(
        "this command needs a product game: a file with a \"product\" block, or --m/--v/--sigma",
    )
}

fn binding_census(m: usize) -> Vec<u64> {
    (0..=m)
        .map(|l| to_u64(&maximal_equilibria_on_faces(m, l)))
        .collect()
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

#[derive(Serialize)]
struct TableRow {
    m: usize,
    derangements: u64,
    candidates: u64,
    equilibria_maximal: u64,
}

pub fn table(m_max: usize, output: &OutputArgs) -> Result<Status> {
    if !(1..=20).contains(&m_max) {
        bail!("--m must be between 1 and 20");
    }
    let rows: Vec<TableRow> = (1..=m_max)
        .map(|m| TableRow {
            m,
            derangements: to_u64(&subfactorial(m)),
            candidates: to_u64(&upper_bound(m)),
            equilibria_maximal: to_u64(&lower_bound(m)),
        })
        .collect();
    let mut text = format!(
        "{:>3} {:>20} {:>20} {:>20}\n",
        "m", "!m", "V(m)", "(V(m)+!m)/2"
    );
    for r in &rows {
        let _ = writeln!(
            text,
            "{:>3} {:>20} {:>20} {:>20}",
            r.m, r.derangements, r.candidates, r.equilibria_maximal
        );
    }
    finish(
        output,
        Rendered {
            config: json!({ "command": "table", "m_max": m_max, "format": output.format }),
            body: json!({ "rows": rows }),
            csv: csv(&rows)?,
            text,
            failures: vec![],
        },
    )
}

pub fn construct(args: &TupleArgs, out: Option<&Path>) -> Result<Status> {
    let tuple = parse_tuple(args.m, args.v.as_deref(), &args.sigma)?;
    let text = write_game(&GameFile::Product(product_game(tuple)));
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(Status::Pass)
}

#[derive(Serialize)]
struct CandidateRow {
    pi: String,
    l: usize,
    gamma: String,
    increments: String,
    equilibrium: bool,
    disagreement: bool,
}

pub fn candidates(args: &GameArgs, method: Method, output: &OutputArgs) -> Result<Status> {
    let (file, source) = load(args)?;
    let game = require_product(&file)?;
    let mut failures = Vec::new();
    let rows: Vec<CandidateRow> = enumerate_candidates(game)
        .map(|c| {
            let cl = candidates::classify(game, &c, method);
            if let Some((by_increment, by_sign)) = cl.disagreement {
                failures.push(CheckFailure::new(
                    &format!("method_agreement at {c}"),
                    by_sign,
                    by_increment,
                ));
            }
            let inc = c
                .pi()
                .fixed_points()
                .into_iter()
                .map(|i| format!("{i}:{}", increment(game, &c, i).expect("fixed point")));
            CandidateRow {
                pi: c.pi().to_string(),
                l: c.face_class(),
                gamma: join(c.gamma(), " "),
                increments: join(inc, " "),
                equilibrium: cl.verdict.is_equilibrium(),
                disagreement: cl.disagreement.is_some(),
            }
        })
        .collect();
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(
            text,
            "{:<16} l={} ({}) inc[{}] {}",
            r.pi,
            r.l,
            r.gamma,
            r.increments,
            if r.equilibrium { "equilibrium" } else { "-" }
        );
    }
    let _ = writeln!(
        text,
        "{} candidates, {} equilibria",
        rows.len(),
        rows.iter().filter(|r| r.equilibrium).count()
    );
    finish(
        output,
        Rendered {
            config: json!({ "command": "candidates", "source": source, "method": method.to_string(), "format": output.format }),
            body: json!({ "candidates": rows }),
            csv: csv(&rows)?,
            text,
            failures,
        },
    )
}

pub fn classify_cmd(
    args: &GameArgs,
    method: Method,
    expect_maximal: bool,
    output: &OutputArgs,
) -> Result<Status> {
    let (file, source) = load(args)?;
    let game = require_product(&file)?;
    let m = game.players();
    let report = census(game, method);
    let mut failures = Vec::new();
    if !report.disagreements.is_empty() {
        failures.push(CheckFailure::new(
            "method_agreement",
            Vec::<()>::new(),
            &report.disagreements,
        ));
    }
    if expect_maximal {
        let want = json!({ "total": to_u64(&lower_bound(m)), "per_face": binding_census(m) });
        let got =
            json!({ "total": report.total_equilibria, "per_face": report.equilibria_by_face() });
        if want != got {
            failures.push(CheckFailure::new("maximal_counts", want, got));
        }
    }
    let mut text = format!("{:>3} {:>12} {:>12}\n", "l", "candidates", "equilibria");
    for f in &report.per_l {
        let _ = writeln!(text, "{:>3} {:>12} {:>12}", f.l, f.candidates, f.equilibria);
    }
    let _ = writeln!(
        text,
        "total: {} candidates, {} equilibria (maximal games have {})",
        report.total_candidates, report.total_equilibria, report.expected_lower_bound
    );
    let _ = writeln!(text, "disagreements: {}", report.disagreements.len());
    finish(
        output,
        Rendered {
            config: json!({
                "command": "classify",
                "source": source,
                "method": method.to_string(),
                "expect_maximal": expect_maximal,
                "format": output.format,
            }),
            csv: csv(&report.per_l)?,
            body: json!({ "census": report }),
            text,
            failures,
        },
    )
}

#[derive(Serialize)]
struct EquilibriumRow {
    support: String,
    l: usize,
    gamma: String,
    residual: f64,
    margin: Option<f64>,
    near_degenerate: bool,
}

pub fn solve(
    args: &GameArgs,
    config: &SolverConfig,
    expect_maximal: bool,
    output: &OutputArgs,
) -> Result<Status> {
    let (file, source) = load(args)?;
    let m = file.players();
    let report = solve_all(&file.to_float(), config);
    let inequalities = check_inequalities(&report.face_census, m);
    let adjacent = adjacent_vertex_pairs(&report.equilibria);
    let mut failures = Vec::new();
    let mut exact = Value::Null;
    if let Some(game) = file.product() {
        let points: Vec<Vec<f64>> = equilibria(game, Method::Sign)
            .iter()
            .map(|c| c.gamma_f64())
            .collect();
        let mut per_face = vec![0u64; m + 1];
        for p in &points {
            per_face[p.iter().filter(|&&x| x == 0.0 || x == 1.0).count()] += 1;
        }
        let found: Vec<Vec<f64>> = report.equilibria.iter().map(|e| e.gamma.clone()).collect();
        let worst = match_points(&found, &points, MATCH_TOL);
        exact = json!({ "total": points.len(), "per_face": per_face, "max_distance": worst });
        if worst.is_none() {
            failures.push(CheckFailure::new(
                "exact_engine_match",
                json!({ "total": points.len(), "per_face": per_face }),
                json!({ "total": report.total, "per_face": report.face_census }),
            ));
        }
    }
    if expect_maximal && report.total != to_u64(&lower_bound(m)) {
        failures.push(CheckFailure::new(
            "maximal_total",
            to_u64(&lower_bound(m)),
            report.total,
        ));
    }
    let rows: Vec<EquilibriumRow> = report
        .equilibria
        .iter()
        .map(|e| EquilibriumRow {
            support: e.support.to_string(),
            l: e.face_class,
            gamma: join(e.gamma.iter().map(|x| format!("{x:.12}")), " "),
            residual: e.residual,
            margin: e.margin,
            near_degenerate: e.near_degenerate,
        })
        .collect();
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(
            text,
            "{} l={} ({}) residual {:.1e}{}",
            r.support,
            r.l,
            r.gamma,
            r.residual,
            if r.near_degenerate {
                " near-degenerate"
            } else {
                ""
            }
        );
    }
    let _ = writeln!(
        text,
        "total: {} equilibria, per face {:?}",
        report.total, report.face_census
    );
    for row in &inequalities.rows {
        let _ = writeln!(
            text,
            "bound d={}: {} <= {} {}",
            row.d,
            row.lhs,
            row.bound,
            if row.holds { "ok" } else { "VIOLATED" }
        );
    }
    let _ = writeln!(text, "adjacent equilibrium vertices: {adjacent}");
    let s = &report.stats;
    let _ = writeln!(
        text,
        "newton: {} starts, {} converged, {} failed, {} outside, {} wrong sign, {} duplicates",
        s.starts, s.converged, s.failed, s.rejected_outside, s.rejected_sign, s.duplicates
    );
    if !exact.is_null() {
        let _ = writeln!(text, "exact engine: {}", exact);
    }
    finish(
        output,
        Rendered {
            config: json!({
                "command": "solve",
                "source": source,
                "solver": config,
                "match_tol": MATCH_TOL,
                "expect_maximal": expect_maximal,
                "format": output.format,
            }),
            csv: csv(&rows)?,
            body: json!({
                "solver": report,
                "inequalities": inequalities,
                "adjacent_vertex_pairs": adjacent,
                "exact_engine": exact,
            }),
            text,
            failures,
        },
    )
}

#[derive(Serialize)]
struct TrialRow {
    trial: usize,
    seed: u64,
    count: u64,
    face_census: String,
    untracked: usize,
    max_drift: f64,
    min_boundary_margin: Option<f64>,
    stable: bool,
}

pub fn deform(
    args: &GameArgs,
    solver: &SolverConfig,
    epsilon: f64,
    trials: usize,
    track_radius: f64,
    output: &OutputArgs,
) -> Result<Status> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        bail!("--epsilon must be a non-negative number");
    }
    let (file, source) = load(args)?;
    let game = require_product(&file)?;
    let config = DeformationConfig {
        epsilon,
        trials,
        seed: solver.seed,
        track_radius,
        solver: solver.clone(),
    };
    let report = verify_deformation(game, &config);
    let mut failures = Vec::new();
    if !report.passed {
        failures.push(CheckFailure::new(
            "deformation_stability",
            json!({ "count": report.expected_count, "face_census": report.expected_census, "stable_trials": trials }),
            json!({
                "stable_trials": report.stable_trials,
                "unstable": report.trials.iter().filter(|t| !t.stable).map(|t| t.trial).collect::<Vec<_>>(),
                "tracking_failures": report.tracking_failures,
                "strict_inequalities_hold": report.strict_inequalities_hold,
            }),
        ));
    }
    let rows: Vec<TrialRow> = report
        .trials
        .iter()
        .map(|t| TrialRow {
            trial: t.trial,
            seed: t.seed,
            count: t.count,
            face_census: join(&t.face_census, " "),
            untracked: t.untracked,
            max_drift: t.max_drift,
            min_boundary_margin: t.min_boundary_margin,
            stable: t.stable,
        })
        .collect();
    let mut text = format!(
        "unperturbed: {} equilibria, per face {:?}\nstable in {}/{} trials, max drift {:.3e}\n",
        report.expected_count,
        report.expected_census,
        report.stable_trials,
        trials,
        report.max_drift
    );
    for t in report.trials.iter().filter(|t| !t.stable) {
        let _ = writeln!(
            text,
            "trial {} (seed {}): count {}, untracked {}",
            t.trial, t.seed, t.count, t.untracked
        );
    }
    finish(
        output,
        Rendered {
            config: json!({ "command": "deform", "source": source, "deformation": config, "format": output.format }),
            csv: csv(&rows)?,
            body: json!({ "report": report }),
            text,
            failures,
        },
    )
}

#[derive(Serialize)]
struct HistogramRow<'a> {
    face_census: &'a str,
    games: u64,
}

pub fn scan(
    m: usize,
    trials: usize,
    max_regenerations: usize,
    solver: &SolverConfig,
    output: &OutputArgs,
) -> Result<Status> {
    if !(1..=6).contains(&m) {
        bail!("--m must be between 1 and 6");
    }
    let config = ScanConfig {
        max_regenerations,
        solver: solver.clone(),
        ..ScanConfig::new(m, trials, solver.seed)
    };
    let report = run_scan(&config);
    let mut failures = Vec::new();
    if !report.even_failures.is_empty() {
        failures.push(CheckFailure::new(
            "odd_equilibrium_count",
            Vec::<usize>::new(),
            &report.even_failures,
        ));
    }
    let proven: Vec<_> = report.violations.iter().filter(|v| v.proven).collect();
    if !proven.is_empty() {
        failures.push(CheckFailure::new("face_bounds", Vec::<()>::new(), &proven));
    }
    for v in report.violations.iter().filter(|v| !v.proven) {
        eprintln!(
            "counterexample candidate: trial {} census {:?} exceeds d = {:?}",
            v.trial, v.census, v.failed_d
        );
    }
    let rows: Vec<HistogramRow> = report
        .census_histogram
        .iter()
        .map(|(k, &games)| HistogramRow {
            face_census: k,
            games,
        })
        .collect();
    let mut text = format!(
        "bounds per d: {:?}\n{} games solved, {} degenerate and {} even-count regenerations\n",
        report.bounds,
        report.games_solved,
        report.degenerate_regenerations,
        report.even_regenerations
    );
    for r in &rows {
        let _ = writeln!(text, "census {:<16} {:>6} games", r.face_census, r.games);
    }
    let _ = writeln!(
        text,
        "violations: {}, max total {}",
        report.violations.len(),
        report.max_total
    );
    finish(
        output,
        Rendered {
            config: json!({ "command": "scan", "scan": config, "format": output.format }),
            csv: csv(&rows)?,
            body: json!({ "report": report }),
            text,
            failures,
        },
    )
}
