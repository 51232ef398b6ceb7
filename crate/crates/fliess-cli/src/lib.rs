//! Command dispatch for the `fliess` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse/validation error,
//! 3 numerical divergence.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use fliess::format::{
    parse_affine_pair_file, parse_series_file, parse_tangent_pair_file, serialize_affine_pair,
    serialize_series, serialize_tangent_pair, SignalSpec,
};
use fliess::pair::{affine_feedback, lie_bracket, residual_loop, AffinePair, TangentPair};
use fliess::series::TruncatedSeries;
use fliess::sim::{
    crosscheck_homomorphisms, evaluate_series, max_relative_deviation, simulate_closed_loop,
    Grid, SimConfig, Signal,
};
use fliess::verify::{verify_group_laws, VerifyConfig};
use fliess::words::DEFAULT_DEGREE_CAP;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Parser)]
#[command(
    name = "fliess",
    about = "Truncated Chen-Fliess series calculus: shuffle algebra, feedback groups, and loop simulation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Truncation degree (mandatory: answers depend on it)
    #[arg(long)]
    degree: usize,
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Simulation horizon in seconds
    #[arg(long, default_value_t = 0.5)]
    tmax: f64,
    /// Number of grid intervals
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    /// Input signal: const:<a>, sin:<amp>:<freq_hz>, or csv:<path>
    #[arg(long)]
    input: String,
}

#[derive(Subcommand)]
enum Command {
    /// Shuffle product of two series
    Shuffle {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
    },
    /// Shuffle inverse of a series with nonzero constant term
    Shinv {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
    },
    /// Composition product of two series
    Compose {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
    },
    /// Mixed composition of a series with an affine pair
    Mixedcompose {
        #[command(flatten)]
        common: Common,
        series: PathBuf,
        pair: PathBuf,
    },
    /// Semidirect group product of two pairs
    Odot {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
    },
    /// Semidirect group inverse of a pair
    Odotinv {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
    },
    /// Affine feedback group product of two pairs
    Star {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
    },
    /// Affine feedback group inverse of a pair
    Starinv {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
    },
    /// Closed-loop series of a plant under an affine feedback pair
    Feedback {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        controller: PathBuf,
    },
    /// Group commutator of two pairs in the semidirect group
    Commutator {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
    },
    /// Lie bracket of two tangent pairs
    Bracket {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
    },
    /// Four-loop residual: wrap in additive and multiplicative loops, undo
    /// both, and report the surviving net additive controller
    Residual {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        d1: PathBuf,
        #[arg(long)]
        d2: PathBuf,
    },
    /// Run the seeded algebraic identity suite
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        instances: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Picard-simulate a closed loop and compare with the algebraic series
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        controller: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Picard convergence tolerance (sup-norm update)
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Numerically check the shuffle/composition/mixed homomorphisms
    Crosscheck {
        #[command(flatten)]
        common: Common,
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
}

enum CliError {
    Usage(String),
    Verification(String),
    Diverged(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFY_FAIL,
            CliError::Diverged(_) => EXIT_DIVERGED,
        }
    }
}

fn usage(err: impl std::fmt::Display) -> CliError {
    CliError::Usage(err.to_string())
}

/// Parse arguments and execute; returns the process exit code.
pub fn run(
    args: impl IntoIterator<Item = String>,
    stdout: &mut impl Write,
    stderr: &mut impl Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Verification(msg) | CliError::Diverged(msg)) =
                &e;
            let _ = writeln!(stderr, "error: {msg}");
            e.exit_code()
        }
    }
}

fn check_degree(degree: usize) -> Result<(), CliError> {
    if degree > DEFAULT_DEGREE_CAP {
        return Err(CliError::Usage(format!(
            "--degree {degree} exceeds the degree cap {DEFAULT_DEGREE_CAP}"
        )));
    }
    Ok(())
}

fn load_series(path: &Path, degree: usize) -> Result<TruncatedSeries, CliError> {
    let series = parse_series_file(path).map_err(usage)?;
    if series.degree() < degree {
        return Err(CliError::Usage(format!(
            "{}: file degree {} is below the requested degree {degree}",
            path.display(),
            series.degree()
        )));
    }
    Ok(series.truncate(degree))
}

fn load_pair(path: &Path, degree: usize) -> Result<AffinePair, CliError> {
    let pair = parse_affine_pair_file(path).map_err(usage)?;
    if pair.degree() < degree {
        return Err(CliError::Usage(format!(
            "{}: file degree {} is below the requested degree {degree}",
            path.display(),
            pair.degree()
        )));
    }
    Ok(pair.truncate(degree))
}

fn load_tangent(path: &Path, degree: usize) -> Result<TangentPair, CliError> {
    let pair = parse_tangent_pair_file(path).map_err(usage)?;
    if pair.degree() < degree {
        return Err(CliError::Usage(format!(
            "{}: file degree {} is below the requested degree {degree}",
            path.display(),
            pair.degree()
        )));
    }
    Ok(TangentPair::new(
        pair.first().truncate(degree),
        pair.second().truncate(degree),
    )
    .expect("truncation preserves properness"))
}

fn emit(common: &Common, text: &str, stdout: &mut impl Write) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Usage(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            stdout.write_all(text.as_bytes()).map_err(usage)
        }
    }
}

fn build_grid(grid: &GridArgs) -> Result<(Grid, Signal), CliError> {
    if !(grid.tmax > 0.0 && grid.tmax.is_finite()) {
        return Err(CliError::Usage("--tmax must be positive".into()));
    }
    if grid.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    let g = Grid::new(grid.tmax, grid.steps);
    let spec: SignalSpec = grid.input.parse().map_err(|e| {
        CliError::Usage(format!("--input {}: {e}", grid.input))
    })?;
    let signal = spec.realize(g).map_err(usage)?;
    Ok((g, signal))
}

fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn star_inverse_or_fail(pair: &AffinePair) -> Result<AffinePair, CliError> {
    pair.star_inverse()
        .map_err(|e| CliError::Verification(e.to_string()))
}

fn dispatch(
    command: Command,
    stdout: &mut impl Write,
    stderr: &mut impl Write,
) -> Result<(), CliError> {
    match command {
        Command::Shuffle { common, a, b } => {
            check_degree(common.degree)?;
            let a = load_series(&a, common.degree)?;
            let b = load_series(&b, common.degree)?;
            emit(&common, &serialize_series(&a.shuffle(&b)), stdout)
        }
        Command::Shinv { common, a } => {
            check_degree(common.degree)?;
            let a = load_series(&a, common.degree)?;
            let inv = a.shuffle_inverse().map_err(usage)?;
            emit(&common, &serialize_series(&inv), stdout)
        }
        Command::Compose { common, a, b } => {
            check_degree(common.degree)?;
            let a = load_series(&a, common.degree)?;
            let b = load_series(&b, common.degree)?;
            emit(&common, &serialize_series(&a.compose(&b)), stdout)
        }
        Command::Mixedcompose {
            common,
            series,
            pair,
        } => {
            check_degree(common.degree)?;
            let series = load_series(&series, common.degree)?;
            let pair = load_pair(&pair, common.degree)?;
            emit(&common, &serialize_series(&series.mixed_compose(&pair)), stdout)
        }
        Command::Odot { common, a, b } => {
            check_degree(common.degree)?;
            let a = load_pair(&a, common.degree)?;
            let b = load_pair(&b, common.degree)?;
            emit(&common, &serialize_affine_pair(&a.odot(&b)), stdout)
        }
        Command::Odotinv { common, a } => {
            check_degree(common.degree)?;
            let a = load_pair(&a, common.degree)?;
            emit(&common, &serialize_affine_pair(&a.odot_inverse()), stdout)
        }
        Command::Star { common, a, b } => {
            check_degree(common.degree)?;
            let a = load_pair(&a, common.degree)?;
            let b = load_pair(&b, common.degree)?;
            emit(&common, &serialize_affine_pair(&a.star(&b)), stdout)
        }
        Command::Starinv { common, a } => {
            check_degree(common.degree)?;
            let a = load_pair(&a, common.degree)?;
            let inv = star_inverse_or_fail(&a)?;
            emit(&common, &serialize_affine_pair(&inv), stdout)
        }
        Command::Feedback {
            common,
            plant,
            controller,
        } => {
            check_degree(common.degree)?;
            let plant = load_series(&plant, common.degree)?;
            let controller = load_pair(&controller, common.degree)?;
            let closed = affine_feedback(&plant, &controller)
                .map_err(|e| CliError::Verification(e.to_string()))?;
            emit(&common, &serialize_series(&closed), stdout)
        }
        Command::Commutator { common, a, b } => {
            check_degree(common.degree)?;
            let a = load_pair(&a, common.degree)?;
            let b = load_pair(&b, common.degree)?;
            emit(&common, &serialize_affine_pair(&a.commutator_odot(&b)), stdout)
        }
        Command::Bracket { common, a, b } => {
            check_degree(common.degree)?;
            let a = load_tangent(&a, common.degree)?;
            let b = load_tangent(&b, common.degree)?;
            emit(
                &common,
                &serialize_tangent_pair(&lie_bracket(&a, &b)),
                stdout,
            )
        }
        Command::Residual {
            common,
            plant,
            d1,
            d2,
        } => {
            check_degree(common.degree)?;
            let plant = load_series(&plant, common.degree)?;
            let d1 = load_series(&d1, common.degree)?;
            let d2 = load_series(&d2, common.degree)?;
            let (omega, net) = residual_loop(&plant, &d1, &d2).map_err(|e| match e {
                fliess::pair::ResidualLoopError::Group(g) => CliError::Usage(g.to_string()),
                fliess::pair::ResidualLoopError::Star(s) => {
                    CliError::Verification(s.to_string())
                }
            })?;
            let text = format!(
                "# closed-loop series omega\n{}# net additive controller\n{}",
                serialize_series(&omega),
                serialize_affine_pair(&net)
            );
            emit(&common, &text, stdout)
        }
        Command::Verify {
            common,
            instances,
            seed,
        } => {
            check_degree(common.degree)?;
            let mut report = verify_group_laws(&VerifyConfig {
                degree: common.degree,
                instances,
                seed,
            });
            // persist counterexamples next to the report
            let dir = common
                .out
                .as_ref()
                .and_then(|p| p.parent().map(Path::to_path_buf))
                .unwrap_or_default();
            for check in &mut report.checks {
                if let Some(description) = &check.counterexample {
                    let file = dir.join(format!("counterexample_{}.txt", check.name));
                    if std::fs::write(&file, description).is_ok() {
                        check.counterexample_file = Some(file.display().to_string());
                    }
                }
            }
            emit(&common, &report.render(), stdout)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::Verification("identity suite reported failures".into()))
            }
        }
        Command::Simulate {
            common,
            plant,
            controller,
            grid,
            tol,
        } => {
            check_degree(common.degree)?;
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            let plant = load_series(&plant, common.degree)?;
            let controller = load_pair(&controller, common.degree)?;
            let (g, v) = build_grid(&grid)?;
            let config = SimConfig {
                degree: common.degree,
                picard_tol: tol,
                ..SimConfig::default()
            };
            let (u, y) = simulate_closed_loop(&plant, &controller, &v, &config)
                .map_err(|e| CliError::Diverged(e.to_string()))?;
            let closed = affine_feedback(&plant, &controller)
                .map_err(|e| CliError::Verification(e.to_string()))?;
            let y_alg = evaluate_series(&closed, &v);
            let mut csv = String::from("t,v,u,y,y_alg,abs_err\n");
            for (k, t) in g.times().enumerate() {
                let err = (y.values()[k] - y_alg.values()[k]).abs();
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    format_float(t),
                    format_float(v.values()[k]),
                    format_float(u.values()[k]),
                    format_float(y.values()[k]),
                    format_float(y_alg.values()[k]),
                    format_float(err)
                ));
            }
            let _ = writeln!(
                stderr,
                "simulate: max |y - y_alg| = {:.3e}",
                max_relative_deviation(&y, &y_alg)
            );
            emit(&common, &csv, stdout)
        }
        Command::Crosscheck { common, a, b, grid } => {
            check_degree(common.degree)?;
            let a = load_series(&a, common.degree)?;
            let b = load_series(&b, common.degree)?;
            let (g, u) = build_grid(&grid)?;
            let report = crosscheck_homomorphisms(&a, &b, &u);
            let mut csv = String::from(
                "t,lhs_shuffle,rhs_shuffle,lhs_compose,rhs_compose,lhs_mixed,rhs_mixed\n",
            );
            for (k, t) in g.times().enumerate() {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    format_float(t),
                    format_float(report.shuffle_lhs.values()[k]),
                    format_float(report.shuffle_rhs.values()[k]),
                    format_float(report.compose_lhs.values()[k]),
                    format_float(report.compose_rhs.values()[k]),
                    format_float(report.mixed_lhs.values()[k]),
                    format_float(report.mixed_rhs.values()[k]),
                ));
            }
            let _ = writeln!(
                stderr,
                "crosscheck shuffle max_rel_dev={:.3e}\ncrosscheck compose max_rel_dev={:.3e}\ncrosscheck mixed max_rel_dev={:.3e}",
                report.shuffle_dev, report.compose_dev, report.mixed_dev
            );
            emit(&common, &csv, stdout)
        }
    }
}
