//! The `weaklevy` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::charfn::Method;
use crate::error::{Error, Result};
use crate::levy_core::IndexSet;
use crate::levy_measure::vggc_levy_density;
use crate::simulate::{
    params_hash, read_binary, sample_strong, sample_superposition, sample_weak_marked, TimeGrid, CSV_FORMAT,
};
use crate::spec_doc::Model;
use crate::validate::{ecf_test, joint_grid, moment_test, ECFReport, MomentTestReport, DEFAULT_THRESHOLD};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SPEC: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_STATISTICAL: i32 = 4;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "WEAKLEVY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "weaklevy", version, about = "Weakly subordinated Lévy processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Superposition,
    Marked,
    Strong,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Quadrature,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Characteristic exponents on a grid of frequencies.
    Charfn {
        #[arg(long)]
        model: PathBuf,
        /// JSON array of frequency vectors.
        #[arg(long)]
        theta_grid: PathBuf,
        /// Evaluate the exponent of (T, Y); vectors then have length 2n.
        #[arg(long)]
        joint: bool,
        #[arg(long, value_enum, default_value = "closed")]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lévy density of Y at the given points.
    Density {
        #[arg(long)]
        model: PathBuf,
        /// JSON array of points.
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Means and covariances per unit time.
    Moments {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate paths of (T, Y).
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "superposition")]
        scheme: SchemeArg,
        /// Jump cutoff of the marked scheme; chosen per ray when omitted.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Output file; `.bin` selects the binary format with a `.bin.json` sidecar.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check simulated paths against the model's law.
    Validate {
        #[arg(long)]
        model: PathBuf,
        /// Binary path file written by `simulate`.
        #[arg(long)]
        paths: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Path-variation class of the model.
    Classify {
        #[arg(long)]
        model: PathBuf,
    },
}

enum Failure {
    Spec(Error),
    Numerical(Error),
    Statistical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e)
        } else {
            Failure::Spec(e)
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => EXIT_OK,
        Err(Failure::Spec(e)) => {
            eprintln!("error: {e}");
            EXIT_SPEC
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            EXIT_NUMERICAL
        }
        Err(Failure::Statistical(msg)) => {
            eprintln!("statistical test failed: {msg}");
            EXIT_STATISTICAL
        }
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err(format!("{THREADS_ENV} must be positive"));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

fn load_model(path: &Path) -> Result<Model> {
    Model::from_json(&fs::read_to_string(path)?)
}

fn load_vectors(path: &Path, width: usize) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Document(e.to_string()))?;
    if let Some(r) = rows.iter().find(|r| r.len() != width) {
        return Err(Error::Dimension { expected: width, got: r.len() });
    }
    Ok(rows)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    emit(out, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn run(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Charfn { model, theta_grid, joint, method, out } => {
            let model = load_model(&model)?;
            let n = model.dim();
            let width = if joint { 2 * n } else { n };
            let grid = load_vectors(&theta_grid, width)?;
            let method = match method {
                MethodArg::Closed => Method::Closed,
                MethodArg::Quadrature => Method::Quadrature,
            };
            let mut text = format!("# {CSV_FORMAT}\n");
            text.push_str(&(1..=width).map(|k| format!("theta{k}")).collect::<Vec<_>>().join(","));
            text.push_str(",re,im\n");
            for th in &grid {
                let psi = if joint {
                    model.joint_exponent(th, method)?
                } else if matches!(method, Method::Quadrature) {
                    model.joint_exponent(&[vec![0.0; n], th.clone()].concat(), method)?
                } else {
                    model.exponent(th)?
                };
                for v in th {
                    text.push_str(&format!("{v},"));
                }
                // adding 0.0 turns −0 into 0
                text.push_str(&format!("{},{}\n", psi.re + 0.0, psi.im + 0.0));
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Density { model, points, out } => {
            let model = load_model(&model)?;
            let n = model.dim();
            let pts = load_vectors(&points, n)?;
            let (_, thorin) = model
                .thorin()
                .ok_or_else(|| Error::invalid("densities need a subordinator without jump atoms"))?;
            let mut text = format!("# {CSV_FORMAT}\n");
            text.push_str(&(1..=n).map(|k| format!("y{k}")).collect::<Vec<_>>().join(","));
            text.push_str(",face,density\n");
            for y in &pts {
                let support: Vec<usize> = (0..n).filter(|&k| y[k] != 0.0).collect();
                let face = IndexSet::new(support, n)?;
                let d = vggc_levy_density(y, &face, model.brownian(), &thorin)?;
                for v in y {
                    text.push_str(&format!("{v},"));
                }
                let label = face.indices().iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join("|");
                text.push_str(&format!("{label},{d}\n"));
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Moments { model, out } => {
            let model = load_model(&model)?;
            emit_json(out.as_deref(), &model.moments()?)?;
        }
        Command::Simulate { model, t_max, steps, paths, seed, scheme, epsilon, out } => {
            let model = load_model(&model)?;
            let grid = TimeGrid::uniform(t_max, steps)?;
            let sub = model.subordinator();
            let bm = model.brownian();
            if epsilon.is_some() && !matches!(scheme, SchemeArg::Marked) {
                return Err(Error::invalid("--epsilon applies to the marked scheme only").into());
            }
            let sample = match scheme {
                SchemeArg::Superposition => sample_superposition(&sub, bm, &grid, paths, seed)?,
                SchemeArg::Marked => sample_weak_marked(&sub, bm, &grid, paths, epsilon, seed)?,
                SchemeArg::Strong => sample_strong(&sub, bm, &grid, paths, seed)?,
            };
            if out.extension().is_some_and(|e| e == "bin") {
                sample.write_binary(&out, &params_hash(&sub, bm))?;
            } else {
                sample.write_csv(fs::File::create(&out).map_err(Error::from)?)?;
            }
        }
        Command::Validate { model, paths, threshold, out } => {
            let model = load_model(&model)?;
            let (sample, header) = read_binary(&paths)?;
            let sub = model.subordinator();
            if header.params_hash != params_hash(&sub, model.brownian()) {
                return Err(Error::Document("path file was simulated from different parameters".into()).into());
            }
            let t = *sample.time_grid.last().expect("grid has at least two points");
            let joint = sample.terminal_joint();
            let ecf = ecf_test(
                &joint,
                |th| model.joint_exponent(th, Method::Closed),
                t,
                &joint_grid(model.dim()),
                threshold,
            )?;
            let moments = moment_test(&joint, &model.moments()?, t, threshold)?;
            let report = ValidationReport { pass: ecf.pass && moments.pass, scheme: header.scheme, time: t, ecf, moments };
            emit_json(out.as_deref(), &report)?;
            if !report.pass {
                return Err(Failure::Statistical(format!(
                    "max studentized ECF deviation {:.3}, moments {:.3}, threshold {threshold}",
                    report.ecf.max_studentized, report.moments.max_studentized
                )));
            }
        }
        Command::Classify { model } => {
            let model = load_model(&model)?;
            emit(None, &format!("{}\n", model.classify().label()))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ValidationReport {
    pass: bool,
    scheme: String,
    time: f64,
    ecf: ECFReport,
    moments: MomentTestReport,
}
