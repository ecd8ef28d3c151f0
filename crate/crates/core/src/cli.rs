//! The `tripsqrt` command line: `sqrt`, `gen`, `compare`, `check`.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure. Every
//! failure prints one line `ERROR <code> <message>` on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiment::{dump_errors, run_alg, run_experiment, write_csv, Alg};
use crate::io::{self, MatrixInput};
use crate::numeric::{inf_norm, mat_mul, DenseMatrix};
use crate::sqrt::{SqrtOptions, SqrtResult, Status, StopRule};
use crate::testgen::{Family, TestSpec};
use crate::triplet::{frobenius_form, TripletRep};

#[derive(Parser, Debug)]
#[command(name = "tripsqrt", version, about = "Square roots of M-matrices from triplet representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the principal square root of a matrix.
    Sqrt(SqrtArgs),
    /// Write a generated test matrix as a triplet file.
    Gen(GenArgs),
    /// Measure solver errors against the double-word reference (CSV report).
    Compare(CompareArgs),
    /// Validate a triplet file and describe its block structure.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct IterArgs {
    /// Scaling factor gamma >= 1; the iteration runs on A / (gamma max a_ii).
    #[arg(long, default_value_t = 4.0)]
    gamma: f64,
    /// Stopping tolerance on |W| / |Z|.
    #[arg(long, default_value_t = f64::EPSILON / 2.0)]
    tol: f64,
    #[arg(long, default_value_t = 120)]
    max_iter: usize,
    /// componentwise or normwise.
    #[arg(long, default_value = "componentwise")]
    stop: StopRule,
}

impl IterArgs {
    fn options(&self) -> SqrtOptions {
        SqrtOptions { gamma: self.gamma, tol: self.tol, max_iter: self.max_iter, stop: self.stop }
    }
}

#[derive(Args, Debug)]
struct SqrtArgs {
    /// cr, cr-shifted, in or cr-std.
    #[arg(long, default_value = "cr")]
    alg: Alg,
    /// Triplet file, or a Matrix Market array (then `--u` is required
    /// except for cr-std).
    #[arg(long)]
    input: PathBuf,
    /// Positive vector with A u >= 0, for dense input.
    #[arg(long)]
    u: Option<PathBuf>,
    /// Where to write X as a Matrix Market array.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the triplet of X; defaults to `--out` with extension `.trip`.
    #[arg(long)]
    triplet_out: Option<PathBuf>,
    #[command(flatten)]
    iter: IterArgs,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// 1, 2, 3 or random.
    #[arg(long = "test")]
    family: Family,
    #[arg(long)]
    n: usize,
    /// min(u) / max(u) for test 2.
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random family: generate with v = 0.
    #[arg(long)]
    singular: bool,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Comma-separated families.
    #[arg(long = "test", value_delimiter = ',', default_value = "1")]
    families: Vec<Family>,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,20,50,100")]
    n: Vec<usize>,
    /// Comma-separated eps values, used by test 2 only.
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-8,1e-14")]
    eps: Vec<f64>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_value = "cr,in,cr-shifted,cr-std")]
    alg: Vec<Alg>,
    /// Seed for the random family.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random family: generate with v = 0.
    #[arg(long)]
    singular: bool,
    /// CSV output; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-case error matrices.
    #[arg(long)]
    dump_errors: Option<PathBuf>,
    /// Leave the time column empty for byte-identical reports.
    #[arg(long)]
    no_time: bool,
    #[command(flatten)]
    iter: IterArgs,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    input: PathBuf,
}

/// Runs the CLI on `args` (including the program name) with the process
/// streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").trim();
            let _ = writeln!(err, "ERROR usage {first}");
            return 1;
        }
    };
    let res = match cli.command {
        Command::Sqrt(a) => cmd_sqrt(a, out, err),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Check(a) => cmd_check(a, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => report(err, &e),
    }
}

fn report(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "ERROR {} {}", e.code(), e.to_string().replace('\n', " "));
    if e.is_numerical() {
        2
    } else {
        1
    }
}

/// `||X^2 - A|| / ||A||` in the infinity norm.
fn residual(x: &DenseMatrix, a: &DenseMatrix) -> Result<f64> {
    let x2 = mat_mul(x, x)?;
    Ok(inf_norm(&x2.sub(a)?) / inf_norm(a))
}

fn load_input(a: &SqrtArgs) -> Result<(DenseMatrix, Option<TripletRep>)> {
    match io::read_input_file(&a.input)? {
        MatrixInput::Triplet(t) => Ok((t.reconstruct(), Some(t))),
        MatrixInput::Dense(m) => {
            if !m.is_square() {
                return Err(Error::InvalidParameter(format!("matrix must be square, got {}x{}", m.n_rows(), m.n_cols())));
            }
            match &a.u {
                Some(path) => {
                    let u = io::read_vector_file(path)?;
                    let t = TripletRep::from_full(&m, &u)?;
                    Ok((m, Some(t)))
                }
                None if a.alg == Alg::CrStd => Ok((m, None)),
                None => Err(Error::InvalidParameter(format!(
                    "--u is required for dense input with --alg {}",
                    a.alg
                ))),
            }
        }
    }
}

fn cmd_sqrt(a: SqrtArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let opts = a.iter.options();
    opts.validate()?;
    let (matrix, triplet) = load_input(&a)?;

    let mut alg = a.alg;
    let res = match (&triplet, alg) {
        (_, Alg::CrStd) => crate::baseline::cr_sqrt_standard(&matrix, &opts),
        (Some(t), Alg::CrShifted) => match run_alg(alg, t, &opts) {
            Err(Error::NoShiftColumn) => {
                writeln!(err, "warning: no all-positive column for the shift; falling back to cr")?;
                alg = Alg::Cr;
                run_alg(alg, t, &opts)
            }
            r => r,
        },
        (Some(t), _) => run_alg(alg, t, &opts),
        (None, _) => unreachable!("load_input requires u unless cr-std"),
    };
    let r: SqrtResult = res?;

    let res_norm = residual(&r.x, &matrix)?;
    let mut line = format!("alg {alg} iterations {} status {} residual {res_norm:.3e}", r.iterations, r.status);
    if r.status == Status::StagnatedLinear {
        line.push_str(" warning: linear convergence phase (singular input?), try --alg cr-shifted");
    }
    writeln!(out, "{line}")?;

    if let Some(path) = &a.out {
        io::write_matrix_market_file(path, &r.x)?;
    }
    let trip_path = a.triplet_out.clone().or_else(|| a.out.as_ref().map(|p| p.with_extension("trip")));
    if let (Some(path), Some(t)) = (trip_path, &r.triplet) {
        io::write_triplet_file(path, t)?;
    }
    Ok(0)
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = TestSpec { family: a.family, n: a.n, eps: a.eps, seed: a.seed, singular: a.singular };
    let t = spec.generate()?;
    match &a.out {
        Some(path) => io::write_triplet_file(path, &t)?,
        None => io::write_triplet(&mut *out, &t)?,
    }
    Ok(0)
}

fn compare_specs(a: &CompareArgs) -> Vec<TestSpec> {
    let mut specs = Vec::new();
    for &family in &a.families {
        for &n in &a.n {
            let base = TestSpec { family, n, eps: 1.0, seed: a.seed, singular: a.singular };
            if family == Family::Test2 {
                specs.extend(a.eps.iter().map(|&eps| TestSpec { eps, ..base }));
            } else {
                specs.push(base);
            }
        }
    }
    specs
}

fn cmd_compare(a: CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let specs = compare_specs(&a);
    for s in &specs {
        s.validate()?;
    }
    let outcomes = run_experiment(&specs, &a.alg, &a.iter.options())?;
    let rows: Vec<_> = outcomes.iter().map(|o| o.row.clone()).collect();
    match &a.out {
        Some(path) => write_csv(std::fs::File::create(path)?, &rows, !a.no_time)?,
        None => write_csv(&mut *out, &rows, !a.no_time)?,
    }
    if let Some(dir) = &a.dump_errors {
        dump_errors(Path::new(dir), &outcomes)?;
    }
    Ok(0)
}

fn cmd_check(a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let t = io::read_triplet_file(&a.input)?;
    let ff = frobenius_form(&t.reconstruct())?;
    let singular = ff.block_singular.iter().filter(|&&s| s).count();
    writeln!(
        out,
        "ok n {} nnz {} kernel_rep {} blocks {} singular_blocks {}",
        t.n(),
        t.nnz(),
        t.is_kernel_rep(),
        ff.n_blocks(),
        singular
    )?;
    Ok(0)
}
