use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::{fs, thread};

use clap::{Parser, Subcommand, ValueEnum};
use kmrate::config::{parse_theta, ThetaSpec};
use kmrate::{output, table, ConfigError, ExperimentConfig, HarnessError};
use kmrate_core::iteration::LambdaSchedule;
use kmrate_core::rates::ThetaFn;

#[derive(Parser)]
#[command(name = "kmrate", version, about = "Krasnoselski-Mann iteration experiments and rate certificates")]
struct Cli {
    /// Overrides the seed of every experiment.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the check tolerance of every experiment.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for trace files (default: current directory) and tables.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiments: trace, bounds per epsilon, and all checks.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Run the sampled property suites only.
    Check {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Print the exponential and quadratic bounds side by side.
    Table {
        /// Comma-separated; empty for an empty table.
        #[arg(long, default_value = "1,0.1,0.01")]
        eps: String,
        #[arg(long, default_value_t = 1.0)]
        d: f64,
        #[arg(long = "K", default_value_t = 2)]
        k: u64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// closed-form, witness or linear:s.
        #[arg(long, default_value = "closed-form")]
        theta: String,
        /// Add the 4(d+1)²/ε² column.
        #[arg(long)]
        derived: bool,
    },
}

/// Output of one experiment, or the exit code and message of its failure.
type Outcome = Result<(String, bool), (u8, String)>;

fn load(path: &Path, cli: &Cli) -> Result<ExperimentConfig, (u8, String)> {
    let text = fs::read_to_string(path).map_err(|e| (2, format!("{}: {e}", path.display())))?;
    let mut cfg = kmrate::parse_config(&text).map_err(|e| (2, located(path, &e)))?;
    if let Some(s) = cli.seed {
        cfg.checks.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.checks.tolerance = Some(t);
    }
    Ok(cfg)
}

fn located(path: &Path, e: &ConfigError) -> String {
    let lines: Vec<String> = e
        .errors
        .iter()
        .map(|s| {
            let key = if s.key.is_empty() { String::new() } else { format!("{}: ", s.key) };
            format!("{}:{}:{}: {key}{}", path.display(), s.line, s.column, s.message)
        })
        .collect();
    lines.join("\n")
}

fn failure(path: &Path, e: HarnessError) -> (u8, String) {
    let msg = match &e {
        HarnessError::Config(c) => located(path, c),
        other => format!("{}: {other}", path.display()),
    };
    (e.exit_code(), msg)
}

fn run_one(path: &Path, cli: &Cli, out: &Path) -> Outcome {
    let cfg = load(path, cli)?;
    let report = kmrate::run_experiment(&cfg, Some(out)).map_err(|e| failure(path, e))?;
    let text = match cli.format {
        Format::Text => output::experiment_text(&report),
        Format::Csv => output::experiment_csv(&report),
    };
    Ok((text, report.passed()))
}

fn check_one(path: &Path, cli: &Cli) -> Outcome {
    let cfg = load(path, cli)?;
    let report = kmrate::run_checks(&cfg).map_err(|e| failure(path, e))?;
    let text = match cli.format {
        Format::Text => output::checks_text(&report),
        Format::Csv => output::checks_csv_string(&report),
    };
    Ok((text, report.passed()))
}

/// Runs every config on its own thread and prints results in argument order.
fn each(configs: &[PathBuf], f: impl Fn(&Path) -> Outcome + Sync) -> u8 {
    let outcomes: Vec<Outcome> = thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|p| s.spawn(|| f(p))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err((1, "experiment panicked".into())))).collect()
    });
    let mut code = 0;
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok((text, passed)) => {
                if i > 0 {
                    println!();
                }
                print!("{text}");
                if !passed {
                    code = code.max(1);
                }
            }
            Err((c, msg)) => {
                eprintln!("{msg}");
                code = code.max(c);
            }
        }
    }
    code
}

fn parse_eps(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| match p.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            _ => Err(format!("--eps: `{p}` is not a positive number")),
        })
        .collect()
}

fn table_cmd(cli: &Cli, eps: &str, d: f64, k: u64, lambda: f64, theta: &str, derived: bool) -> u8 {
    let eps = match parse_eps(eps) {
        Ok(e) => e,
        Err(m) => {
            eprintln!("{m}");
            return 2;
        }
    };
    let theta = match parse_theta(theta) {
        Ok(ThetaSpec::Linear(s)) => ThetaFn::Linear(s),
        Ok(ThetaSpec::ClosedForm) => ThetaFn::ConstantLambda(lambda),
        Ok(ThetaSpec::Witness) => match LambdaSchedule::constant(lambda) {
            Ok(s) => ThetaFn::Schedule(s),
            Err(e) => {
                eprintln!("--lambda: {e}");
                return 2;
            }
        },
        Err(m) => {
            eprintln!("--theta: {m}");
            return 2;
        }
    };
    let params = table::TableParams { eps, d, k, lambda, theta, derived };
    let rows = match table::comparison_table(&params) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let (text, file) = match cli.format {
        Format::Text => (table::render_text(&rows, derived), "comparison.txt"),
        Format::Csv => (table::render_csv(&rows, derived), "comparison.csv"),
    };
    print!("{text}");
    if let Some(dir) = &cli.out {
        let path = dir.join(file);
        if let Err(e) = fs::create_dir_all(dir).and_then(|_| fs::write(&path, &text)) {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    }
    0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run { configs } => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            // Each experiment owns `<out>/<name>.csv`, so names must differ.
            let mut names = BTreeSet::new();
            let mut clash = None;
            for p in configs {
                if let Ok(cfg) = load(p, &cli) {
                    if !names.insert(cfg.name.clone()) {
                        clash = Some(cfg.name);
                    }
                }
            }
            match clash {
                Some(name) => {
                    eprintln!("two experiments are named `{name}`; their traces would collide");
                    2
                }
                None => each(configs, |p| run_one(p, &cli, &out)),
            }
        }
        Command::Check { configs } => each(configs, |p| check_one(p, &cli)),
        Command::Table { eps, d, k, lambda, theta, derived } => table_cmd(&cli, eps, *d, *k, *lambda, theta, *derived),
    };
    ExitCode::from(code)
}
