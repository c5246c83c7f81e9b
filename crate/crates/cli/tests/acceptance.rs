//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Shipped configs are run in-process once and shared.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use kmrate::config::SpaceSpec;
use kmrate::{output, parse_config, ExperimentConfig, ExperimentReport, TableParams, Validity};
use kmrate_core::convexity::{eta_cat0, Modulus};
use kmrate_core::iteration::{witness_theta, LambdaSchedule};
use kmrate_core::rates::*;
use kmrate_core::Check;
use num_bigint::BigUint;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Shipped {
    path: PathBuf,
    cfg: ExperimentConfig,
    report: ExperimentReport,
}

fn shipped() -> Vec<Shipped> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let cfg = parse_config(&std::fs::read_to_string(&path).unwrap()).unwrap();
            let report = kmrate::run_experiment(&cfg, None).unwrap();
            Shipped { path, cfg, report }
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn big(n: u128) -> BigUint {
    BigUint::from(n)
}

fn ceil_div(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

fn value(b: Result<RateBound, kmrate_core::Error>) -> BigUint {
    b.unwrap().value.unwrap()
}

/// Bound formulas against integer arithmetic on ε = p/q, d = dn/dd, λ = a/c.
fn exact_formulas() -> Outcome {
    let mut n = 0;
    let epsilons = [(1u128, 1u128), (1, 2), (1, 10), (1, 100), (3, 4)];
    let diameters = [(1u128, 1u128), (2, 1), (5, 2)];
    let lambdas = [(1u128, 2u128), (1, 4), (1, 10), (9, 10)];
    for &(p, q) in &epsilons {
        let eps = p as f64 / q as f64;
        for &(dn, dd) in &diameters {
            let d = dn as f64 / dd as f64;
            // (d+1) = (dn+dd)/dd.
            let d1 = dn + dd;
            if p * dd >= 2 * dn * q {
                ensure(value(cat0_bound(eps, d, &ThetaFn::Linear(1))) == big(0), || {
                    format!("cat0 not 0 at eps={eps} d={d}")
                })?;
                continue;
            }
            // ⌈8(d+1)²/ε²⌉ = ⌈8·d1²·q² / (dd²·p²)⌉.
            let inner8 = ceil_div(8 * d1 * d1 * q * q, dd * dd * p * p);
            let inner4 = ceil_div(4 * d1 * d1 * q * q, dd * dd * p * p);
            ensure(value(cat0_bound(eps, d, &ThetaFn::Linear(3))) == big(3 * inner8), || {
                format!("cat0 at eps={eps} d={d}")
            })?;
            ensure(value(cat0_bound_derived(eps, d, &ThetaFn::Linear(1))) == big(inner4), || {
                format!("cat0-derived at eps={eps} d={d}")
            })?;
            // With η = ε²/8 the inner count is ⌈8(d+1)³/ε³⌉; with η̃ = ε/8 it is
            // ⌈4(d+1)²/ε²⌉ (the extra 2 in the denominator) or ⌈8(d+1)²/ε²⌉.
            let cube = ceil_div(8 * d1 * d1 * d1 * q * q * q, dd * dd * dd * p * p * p);
            let groetsch_tilde = ceil_div(4 * d1 * d1 * q * q, dd * dd * p * p);
            ensure(value(groetsch_bound(eps, d, &ThetaFn::Linear(1), &eta_cat0())) == big(cube), || {
                format!("groetsch at eps={eps} b={d}")
            })?;
            ensure(
                value(groetsch_bound_tilde(eps, d, &ThetaFn::Linear(1), &eta_cat0())) == big(groetsch_tilde),
                || format!("groetsch-tilde at eps={eps} b={d}"),
            )?;
            for &(a, c) in &lambdas {
                let lambda = a as f64 / c as f64;
                // x / (λ(1−λ)) = x·c² / (a(c−a)).
                let w = |x: u128| ceil_div(x * c * c, a * (c - a));
                ensure(value(cat0_constant_bound(eps, d, lambda)) == big(w(inner8)), || {
                    format!("cat0-constant at eps={eps} d={d} lambda={lambda}")
                })?;
                ensure(value(constant_lambda_bound(eps, d, lambda, &eta_cat0())) == big(w(cube)), || {
                    format!("constant-lambda at eps={eps} d={d} lambda={lambda}")
                })?;
                ensure(value(constant_lambda_bound_tilde(eps, d, lambda, &eta_cat0())) == big(w(inner8)), || {
                    format!("constant-lambda-tilde at eps={eps} d={d} lambda={lambda}")
                })?;
                n += 3;
            }
            n += 4;
        }
    }
    // η and η̃ for CAT(0).
    for e in [2.0, 1.0, 0.5, 0.125] {
        ensure(eta_cat0().value(3.0, e) == e * e / 8.0 && eta_cat0().eta_tilde_value(3.0, e) == Some(e / 8.0), || {
            format!("eta at {e}")
        })?;
    }
    // Exponential bound: M = ⌈(1+2d)/ε⌉, h = K·M·⌈2d·e^{K(M+1)}⌉; e^8 = 2980.958, e^{12} = 162754.79, e^6 = 403.43.
    ensure(value(ishikawa_bound(1.0, 1.0, 2)) == big(35772), || "ishikawa(1, 1, 2)".into())?;
    ensure(value(ishikawa_bound(1.0, 1.0, 3)) == big(3 * 3 * 325510), || "ishikawa(1, 1, 3)".into())?;
    ensure(value(ishikawa_bound(1.0, 0.5, 2)) == big(2 * 2 * 404), || "ishikawa(1, 0.5, 2)".into())?;
    Ok(format!("{n} bound values match integer arithmetic"))
}

fn axiom_suites(runs: &[Shipped]) -> Outcome {
    let needed = [
        Check::W1,
        Check::W2,
        Check::W3,
        Check::W4,
        Check::Cn,
        Check::SegmentIdentities,
        Check::MidpointUniqueness,
        Check::UniformConvexity,
        Check::UniformConvexityLambda,
    ];
    let mut spaces = [false; 3];
    for s in runs {
        let (slot, max_tol) = match s.cfg.space {
            SpaceSpec::Euclidean(_) => (0, 1e-9),
            SpaceSpec::Hyperboloid(_) => (1, 1e-7),
            SpaceSpec::StarTree(_) => (2, 1e-9),
        };
        let mut complete = true;
        for c in needed {
            let Some(a) = s.report.checks.iter().find(|a| a.check == c) else {
                complete = false;
                continue;
            };
            ensure(a.passed(), || format!("{} {}: {} violations", s.report.name, c.name(), a.violations))?;
            ensure(a.tolerance <= max_tol, || format!("{} {}: tolerance {}", s.report.name, c.name(), a.tolerance))?;
            complete &= a.samples >= 10_000;
        }
        spaces[slot] |= complete;
    }
    ensure(spaces.iter().all(|&x| x), || format!("spaces with a complete 1e4-sample suite: {spaces:?}"))?;
    Ok("W1-W4, CN, segments, midpoints and both convexity forms hold in all three spaces".into())
}

fn descent(runs: &[Shipped]) -> Outcome {
    let suites = [Check::MainLemma, Check::EtaTildeStep, Check::SummedDescent, Check::SummedDescentTilde];
    let mut spaces = [false; 3];
    let mut traces = 0;
    for s in runs {
        let mut covered = true;
        for c in suites {
            match s.report.checks.iter().find(|a| a.check == c) {
                Some(a) => {
                    ensure(a.passed(), || format!("{} {}: {} violations", s.report.name, c.name(), a.violations))?;
                    covered &= a.samples > 0;
                }
                None => covered = false,
            }
        }
        if covered && s.report.steps >= 200 {
            traces += 1;
            spaces[match s.cfg.space {
                SpaceSpec::Euclidean(_) => 0,
                SpaceSpec::Hyperboloid(_) => 1,
                SpaceSpec::StarTree(_) => 2,
            }] = true;
        }
    }
    ensure(traces >= 3 && spaces.iter().all(|&x| x), || format!("{traces} traces of 200+ steps, spaces {spaces:?}"))?;
    Ok(format!("per-step and summed descent hold on {traces} traces of 200+ steps"))
}

fn monotone(runs: &[Shipped]) -> Outcome {
    let mut varying = 0;
    for s in runs {
        let a = s
            .report
            .checks
            .iter()
            .find(|a| a.check == Check::ResidualMonotone)
            .ok_or_else(|| format!("{}: no monotonicity check", s.report.name))?;
        ensure(a.passed() && a.samples > 0, || format!("{}: {} increases", s.report.name, a.violations))?;
        if !matches!(s.cfg.schedule, LambdaSchedule::Constant(_)) {
            varying += 1;
        }
    }
    ensure(varying > 0, || "no shipped trace with a varying schedule".into())?;
    Ok(format!("{} traces nonincreasing, {varying} with varying weights", runs.len()))
}

fn validity(runs: &[Shipped]) -> Outcome {
    let mut rows = 0;
    for s in runs {
        for row in &s.report.rows {
            for b in &row.bounds {
                ensure(b.validity == Validity::Valid, || {
                    format!(
                        "{} eps={} {}: {} with n*={:?}",
                        s.report.name,
                        row.eps,
                        b.bound.kind,
                        b.validity.label(),
                        row.n_star
                    )
                })?;
                rows += 1;
            }
        }
    }
    let qt = runs.iter().find(|s| s.report.name == "quarter-turn").ok_or("quarter-turn missing")?;
    let row = qt.report.rows.iter().find(|r| r.eps == 0.5).ok_or("quarter-turn has no eps 0.5")?;
    ensure(row.n_star == Some(3), || format!("quarter-turn n*(0.5) = {:?}", row.n_star))?;
    let c = row.bounds.iter().find(|b| b.bound.kind == BoundKind::Cat0Constant).ok_or("no cat0-constant")?;
    ensure(c.bound.value == Some(big(1152)), || format!("cat0-constant(0.5) = {:?}", c.bound.value))?;
    Ok(format!("{rows} bounds hold; quarter-turn n*(0.5) = 3 <= 1152"))
}

fn witnesses() -> Outcome {
    let half = LambdaSchedule::constant(0.5).unwrap();
    for n in 1..=1000u64 {
        let w = witness_theta(&half, n).map_err(|e| e.to_string())?;
        ensure(w == 4 * n - 1, || format!("witness({n}) = {w}"))?;
    }
    for (a, c) in [(1u128, 10u128), (1, 4), (1, 2), (9, 10)] {
        let lambda = a as f64 / c as f64;
        let schedule = LambdaSchedule::constant(lambda).unwrap();
        for n in 1..=1000u128 {
            let closed = ThetaFn::ConstantLambda(lambda).apply(&big(n)).map_err(|e| e.to_string())?;
            let expected = ceil_div(n * c * c, a * (c - a));
            ensure(closed == big(expected), || format!("closed form at lambda={lambda} n={n}"))?;
            // Closed form is a witness: (θ+1)·λ(1−λ) ≥ n.
            ensure((expected + 1) * a * (c - a) >= n * c * c, || format!("not a witness at lambda={lambda} n={n}"))?;
            let least = witness_theta(&schedule, n as u64).map_err(|e| e.to_string())? as u128;
            ensure(least <= expected, || format!("least witness {least} above closed form {expected}"))?;
        }
    }
    Ok("least witness 4n-1 for n <= 1000; closed form exact for four weights".into())
}

fn table_gaps() -> Outcome {
    let params = TableParams {
        eps: vec![1.0, 0.1, 0.01],
        d: 1.0,
        k: 2,
        lambda: 0.5,
        theta: ThetaFn::ConstantLambda(0.5),
        derived: false,
    };
    let rows = kmrate::comparison_table(&params).map_err(|e| e.to_string())?;
    let mut gaps = Vec::new();
    for (row, min) in rows.iter().zip([2.0, 20.0, 250.0]) {
        let gap = row.log10_gap();
        ensure(gap >= min, || format!("eps={}: log10 gap {gap:.1} < {min}", row.eps))?;
        gaps.push(format!("{gap:.1}"));
    }
    Ok(format!("log10 gaps {}", gaps.join(", ")))
}

fn binary(args: &[&str], cwd: &Path) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_kmrate")).args(args).current_dir(cwd).output().map_err(|e| e.to_string())
}

/// The binary's output against the in-process runs, and `check` against itself.
fn determinism(runs: &[Shipped]) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let paths: Vec<String> = runs.iter().map(|s| s.path.display().to_string()).collect();
    let mut args = vec!["run", "--format", "csv", "--out", "traces"];
    args.extend(paths.iter().map(String::as_str));
    let out = binary(&args, dir.path())?;
    ensure(out.status.code() == Some(0), || format!("run exited {:?}", out.status.code()))?;
    let expected: Vec<String> = runs.iter().map(|s| output::experiment_csv(&s.report)).collect();
    ensure(String::from_utf8_lossy(&out.stdout) == expected.join("\n"), || {
        "run stdout differs from the in-process reports".into()
    })?;
    for s in runs {
        let cfg = &s.cfg;
        let again = tempfile::tempdir().map_err(|e| e.to_string())?;
        kmrate::run_experiment(cfg, Some(again.path())).map_err(|e| e.to_string())?;
        let name = format!("{}.csv", cfg.name);
        let a = std::fs::read(dir.path().join("traces").join(&name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(again.path().join(&name)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name} differs between runs"))?;
    }
    let mut args = vec!["check", "--format", "csv"];
    let few: Vec<&str> = paths.iter().take(2).map(String::as_str).collect();
    args.extend(&few);
    let first = binary(&args, dir.path())?;
    let second = binary(&args, dir.path())?;
    ensure(first.status.code() == Some(0) && first.stdout == second.stdout, || "check output differs".into())?;
    Ok(format!("{} run reports, traces and check output byte-identical", runs.len()))
}

fn main() -> ExitCode {
    let runs = shipped();
    let criteria: [Criterion; 8] = [
        ("exact bound formulas", Box::new(exact_formulas)),
        ("axiom suites", Box::new(|| axiom_suites(&runs))),
        ("descent along traces", Box::new(|| descent(&runs))),
        ("residual monotonicity", Box::new(|| monotone(&runs))),
        ("bound validity", Box::new(|| validity(&runs))),
        ("witness functions", Box::new(witnesses)),
        ("table gaps", Box::new(table_gaps)),
        ("determinism", Box::new(|| determinism(&runs))),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
