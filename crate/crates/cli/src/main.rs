// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use rankone::io::{parse_model, FormatError, GridFile, LoadedModel, SampleSetFile, StateFile};
use rankone::jacobi::{convergence_study, JacobiParams};
use rankone::oscillator::{osc_f_integral, osc_f_series};
use rankone::sampling::{kramer_reconstruct, reconstruct_grid, sample};
use rankone::verify::verify;
use rankone::{node_weights, perturbed_spectrum, Coupling, Error, Exec};

/// Sampling and reconstruction on the spectra of rank-one perturbations.
#[derive(Parser)]
#[command(name = "rankone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum of A + h⟨μ,·⟩μ and its point masses, as JSON.
    Spectrum {
        #[arg(long)]
        model: PathBuf,
        /// Decimal coupling or "inf".
        #[arg(long, allow_hyphen_values = true)]
        coupling: String,
    },
    /// Values of Φ_μ φ on the spectrum of A_h, as a sample-set JSON.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        coupling: String,
    },
    /// Evaluate the interpolation series on a grid, as CSV.
    Reconstruct {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        /// Model that generated the samples; adds Kramer-series columns.
        #[arg(long)]
        cross_check: Option<PathBuf>,
    },
    /// Run the seeded invariant suite against a model.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Jacobi convergence study and oscillator series/integral comparison, as CSV.
    Demo {
        #[arg(long, value_enum, default_value_t = Part::All)]
        part: Part,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Part {
    All,
    Jacobi,
    Oscillator,
}

/// Exit statuses.
mod status {
    pub const FAILED_CHECK: u8 = 1;
    pub const BAD_INPUT: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const INFINITE_COUPLING: u8 = 4;
}

/// Largest tolerated gap between the Lagrange and Kramer columns.
const CROSS_CHECK_TOL: f64 = 1e-8;

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

fn classify(e: &Error) -> u8 {
    match e {
        Error::UnsortedEigenvalues { .. }
        | Error::NonPositiveWeight { .. }
        | Error::DimensionMismatch { .. }
        | Error::TooSmall(_)
        | Error::NonFinite
        | Error::NonPositiveOffDiagonal { .. }
        | Error::InsufficientCoefficients { .. }
        | Error::NormalizationRequired(_)
        | Error::PoleMismatch { .. }
        | Error::InconsistentNodes { .. } => status::BAD_INPUT,
        Error::InfiniteCoupling => status::INFINITE_COUPLING,
        _ => status::NUMERICAL,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(classify(&e), e)
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        let code = match &e {
            FormatError::Invalid(inner) => classify(inner),
            FormatError::Json(_) => status::BAD_INPUT,
        };
        Failure::new(code, e)
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(|e| Failure::new(status::BAD_INPUT, e))
}

fn load_model(path: &Path) -> Result<LoadedModel, Failure> {
    let text = read(path)?;
    parse_model(&text).map_err(|e| {
        let f = Failure::from(e);
        Failure::new(f.code, f.error.context(format!("model {}", path.display())))
    })
}

fn parse_coupling(text: &str) -> Result<Coupling, Failure> {
    text.parse::<Coupling>()
        .map_err(|e| Failure::new(status::BAD_INPUT, anyhow!("coupling {text:?}: {e}")))
}

/// Shortest decimal form of `x` at 17 significant digits, plain notation
/// for moderate exponents.
fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        let m = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{m}e{exp}")
    }
}

fn emit(text: &str) -> CmdResult {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::new(status::NUMERICAL, anyhow!("writing output: {e}")))
}

fn cmd_spectrum(model: &Path, coupling: &str) -> CmdResult {
    let loaded = load_model(model)?;
    let coupling = parse_coupling(coupling)?;
    let nodes = perturbed_spectrum(&loaded.model, coupling)?;
    let value = match coupling {
        Coupling::Finite(h) => {
            let weights = node_weights(&loaded.model, h, &nodes)?;
            json!({ "nodes": nodes, "weights": weights })
        }
        Coupling::Infinite => json!({ "nodes": nodes }),
    };
    emit(&format!("{value}\n"))
}

fn cmd_sample(model: &Path, state: &Path, coupling: &str) -> CmdResult {
    let loaded = load_model(model)?;
    let phi = StateFile::parse(&read(state)?)?;
    let coupling = parse_coupling(coupling)?;
    let samples = sample(&loaded.model, &phi, coupling)?;
    emit(&format!("{}\n", SampleSetFile::to_json(&samples)))
}

fn cmd_reconstruct(samples: &Path, grid: &Path, cross_check: Option<&Path>) -> CmdResult {
    let samples = SampleSetFile::parse(&read(samples)?)?;
    let points = GridFile::parse(&read(grid)?)?;
    let model = cross_check.map(load_model).transpose()?;
    let values = reconstruct_grid(&samples, &points, Exec::default());

    let mut csv = String::from("z_re,z_im,f_re,f_im");
    if model.is_some() {
        csv.push_str(",kramer_re,kramer_im");
    }
    csv.push('\n');
    let mut disagreement: Option<(usize, f64)> = None;
    for (index, (z, value)) in points.iter().zip(values).enumerate() {
        let f = value.map_err(|e| {
            let code = classify(&e);
            Failure::new(
                code,
                anyhow!("grid point {index} ({}, {}): {e}", z.re, z.im),
            )
        })?;
        write!(
            csv,
            "{},{},{},{}",
            fmt17(z.re),
            fmt17(z.im),
            fmt17(f.re),
            fmt17(f.im)
        )
        .unwrap();
        if let Some(loaded) = &model {
            let k = kramer_reconstruct(&loaded.model, &samples, *z).map_err(|e| {
                let code = classify(&e);
                Failure::new(
                    code,
                    anyhow!("grid point {index} ({}, {}): {e}", z.re, z.im),
                )
            })?;
            write!(csv, ",{},{}", fmt17(k.re), fmt17(k.im)).unwrap();
            let gap = (k - f).norm() / f.norm().max(1.0);
            if !(gap <= CROSS_CHECK_TOL) && disagreement.is_none_or(|(_, g)| gap > g) {
                disagreement = Some((index, gap));
            }
        }
        csv.push('\n');
    }
    emit(&csv)?;
    match disagreement {
        Some((index, gap)) => Err(Failure::new(
            status::FAILED_CHECK,
            anyhow!("Kramer and Lagrange forms disagree by {gap:.3e} at grid point {index}"),
        )),
        None => Ok(()),
    }
}

fn cmd_verify(model: &Path, seed: u64) -> CmdResult {
    let loaded = load_model(model)?;
    let report = verify(&loaded.model, loaded.jacobi.as_ref(), seed);
    emit(&report.to_string())?;
    if report.all_passed() {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(Failure::new(
            status::FAILED_CHECK,
            anyhow!("{failed} invariant group(s) failed"),
        ))
    }
}

fn jacobi_demo() -> Result<String, Failure> {
    const SIZE: usize = 12;
    let q = (0..SIZE)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let params = JacobiParams::new(q, vec![0.5; SIZE])?;
    let grid: Vec<Complex64> = [0.5, 1.5, 2.5]
        .iter()
        .flat_map(|&a| [0.5, 1.0].map(move |b| Complex64::new(a, b)))
        .collect();
    let rows = convergence_study(
        &params,
        SIZE,
        0.7,
        &[1.0, 0.5, 0.25],
        &grid,
        &[2, 4, 6, 8, 10, SIZE],
    )?;
    let mut csv = String::from("n,discrepancy\n");
    for r in rows {
        writeln!(csv, "{},{}", r.n, fmt17(r.discrepancy)).unwrap();
    }
    Ok(csv)
}

fn oscillator_demo() -> Result<String, Failure> {
    let mut csv =
        String::from("z_re,z_im,series_re,series_im,integral_re,integral_im,abs_diff,tail_bound\n");
    for i in 0..5 {
        for j in 0..5 {
            let z = Complex64::new(2.0 * i as f64, 0.5 + 0.375 * j as f64);
            let s = osc_f_series(z, 40)?;
            let q = osc_f_integral(z, 1024)?;
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                fmt17(z.re),
                fmt17(z.im),
                fmt17(s.value.re),
                fmt17(s.value.im),
                fmt17(q.re),
                fmt17(q.im),
                fmt17((s.value - q).norm()),
                fmt17(s.tail_bound)
            )
            .unwrap();
        }
    }
    Ok(csv)
}

fn cmd_demo(part: Part) -> CmdResult {
    let mut out = String::new();
    if part != Part::Oscillator {
        out.push_str(&jacobi_demo()?);
    }
    if part == Part::All {
        out.push('\n');
    }
    if part != Part::Jacobi {
        out.push_str(&oscillator_demo()?);
    }
    emit(&out)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Spectrum { model, coupling } => cmd_spectrum(&model, &coupling),
        Command::Sample {
            model,
            state,
            coupling,
        } => cmd_sample(&model, &state, &coupling),
        Command::Reconstruct {
            samples,
            grid,
            cross_check,
        } => cmd_reconstruct(&samples, &grid, cross_check.as_deref()),
        Command::Verify { model, seed } => cmd_verify(&model, seed),
        Command::Demo { part } => cmd_demo(part),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(status::BAD_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fmt17;

    #[test]
    fn number_format() {
        assert_eq!(fmt17(0.0), "0");
        assert_eq!(fmt17(1.0), "1");
        assert_eq!(fmt17(-2.5), "-2.5");
        assert_eq!(fmt17(0.1), "0.10000000000000001");
        assert_eq!(fmt17(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt17(1.5e20), "1.5e20");
        for x in [
            std::f64::consts::PI,
            1.0 / 3.0,
            -123456.789,
            6.02e23,
            1e-300,
        ] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }
}
