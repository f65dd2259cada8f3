//! The `blockdet` command line.
//!
//! Exit statuses: 0 success, 1 parse or dimension error, 2 singular pivot block
//! (without `--fallback dense`), 3 a numeric check exceeded its tolerance.

use std::ffi::OsString;
use std::hint::black_box;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::block::{flatten, partition, BlockMatrix};
use crate::dense::{DenseMatrix, C64};
use crate::engine::block_det;
use crate::error::{BlockDetError, Result};
use crate::format::{
    parse_block_json, parse_dense_text, write_block_json, write_dense_text, MatrixFile,
    MatrixFormat,
};
use crate::lu::det_dense;
use crate::njl::{verify_njl, NjlParams};
use crate::random::{MatrixRng, DEFAULT_SEED};
use crate::scaled::ScaledDet;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SINGULAR_PIVOT: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

/// Printed and re-parsed determinants must agree to this relative error.
pub const PARSE_CHECK_TOL: f64 = 1e-11;

#[derive(Debug, Parser)]
#[command(
    name = "blockdet",
    version,
    about = "Determinants of partitioned complex block matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the determinant of a matrix file
    Det(DetArgs),
    /// Compare the block determinant with the dense LU determinant
    Compare(CompareArgs),
    /// Time both methods on seeded random matrices and print CSV
    Bench(BenchArgs),
    /// Verify the 48x48 NJL determinant against its closed form
    Njl(NjlArgs),
    /// Check that printed determinants and written files read back unchanged
    ParseCheck(InputArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fallback {
    Dense,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Matrix file in dense-text or block-json format
    path: PathBuf,
    /// Input format; detected from the extension or contents when omitted
    #[arg(long, value_enum)]
    format: Option<MatrixFormat>,
    /// Block partition as N,n (N blocks per side of size n)
    #[arg(long, value_parser = parse_partition, value_name = "N,n")]
    partition: Option<(usize, usize)>,
    /// Use dense LU when a pivot block is singular
    #[arg(long, value_enum)]
    fallback: Option<Fallback>,
}

#[derive(Debug, Args)]
struct DetArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Re-parse the printed value and fail if it does not match
    #[arg(long)]
    parse_check: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Maximum accepted relative error
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also time each method over this many repetitions
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Largest block count N (sweeps 2..=N)
    #[arg(long, default_value_t = 4)]
    max_blocks: usize,
    /// Largest block size n (sweeps 1..=n)
    #[arg(long, default_value_t = 8)]
    max_block_size: usize,
    /// Timing repetitions per configuration
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct NjlArgs {
    /// Constituent quark mass M
    #[arg(long, default_value_t = NjlParams::default().mass)]
    mass: f64,
    /// Quark chemical potential mu
    #[arg(long, default_value_t = NjlParams::default().chemical_potential)]
    mu: f64,
    #[arg(long, default_value_t = NjlParams::default().gap.re)]
    delta_re: f64,
    #[arg(long, default_value_t = NjlParams::default().gap.im)]
    delta_im: f64,
    #[arg(long, default_value_t = NjlParams::default().momentum[0])]
    kx: f64,
    #[arg(long, default_value_t = NjlParams::default().momentum[1])]
    ky: f64,
    #[arg(long, default_value_t = NjlParams::default().momentum[2])]
    kz: f64,
    /// Real part of the probe energy E
    #[arg(long, default_value_t = NjlParams::default().probe_energy.re)]
    e_re: f64,
    #[arg(long, default_value_t = NjlParams::default().probe_energy.im)]
    e_im: f64,
}

impl NjlArgs {
    fn params(&self) -> NjlParams {
        NjlParams {
            mass: self.mass,
            chemical_potential: self.mu,
            gap: C64::new(self.delta_re, self.delta_im),
            momentum: [self.kx, self.ky, self.kz],
            probe_energy: C64::new(self.e_re, self.e_im),
        }
    }
}

fn parse_partition(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected N,n but got '{s}'"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad block count '{a}'"))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| format!("bad block size '{b}'"))?;
    if a == 0 || b == 0 {
        return Err("N and n must be positive".into());
    }
    Ok((a, b))
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_INPUT
                }
            };
        }
    };
    let mut ctx = Ctx { out, err };
    let outcome = match &cli.command {
        Command::Det(a) => ctx.det(a),
        Command::Compare(a) => ctx.compare(a),
        Command::Bench(a) => ctx.bench(a),
        Command::Njl(a) => ctx.njl(a),
        Command::ParseCheck(a) => ctx.parse_check(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            if matches!(e, BlockDetError::SingularPivotBlock { .. }) {
                let _ = writeln!(
                    ctx.err,
                    "hint: rerun with --fallback dense to use the LU determinant"
                );
                EXIT_SINGULAR_PIVOT
            } else {
                EXIT_INPUT
            }
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// The input as it will be evaluated: a block matrix when a partition is
/// known, otherwise the dense matrix.
enum Operand {
    Blocks(BlockMatrix),
    Dense(DenseMatrix),
}

impl Operand {
    fn load(input: &InputArgs) -> Result<(MatrixFile, Operand)> {
        let file = MatrixFile::read(&input.path, input.format)?;
        let operand = match (input.partition, &file) {
            (Some((nb, n)), _) => {
                if nb * n != file.dim() {
                    return Err(BlockDetError::DimensionMismatch(format!(
                        "partition {nb},{n} does not cover a {0}x{0} matrix",
                        file.dim()
                    )));
                }
                Operand::Blocks(partition(&file.to_dense(), nb, n)?)
            }
            (None, MatrixFile::Blocks(b)) => Operand::Blocks(b.clone()),
            (None, MatrixFile::Dense(m)) => Operand::Dense(m.clone()),
        };
        Ok((file, operand))
    }
}

fn median_ns(trials: usize, mut f: impl FnMut()) -> u128 {
    let mut times: Vec<u128> = (0..trials.max(1))
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_nanos()
        })
        .collect();
    times.sort_unstable();
    times[times.len() / 2]
}

impl Ctx<'_> {
    fn io(&mut self, r: std::io::Result<()>) -> Result<()> {
        r.map_err(|e| BlockDetError::Parse(format!("cannot write output: {e}")))
    }

    /// Block determinant, falling back to LU on a singular pivot when allowed.
    fn block_value(&mut self, bm: &BlockMatrix, fallback: Option<Fallback>) -> Result<ScaledDet> {
        match block_det(bm) {
            Ok(r) => Ok(r.value),
            Err(e @ BlockDetError::SingularPivotBlock { .. }) if fallback.is_some() => {
                let r = writeln!(self.err, "note: {e}; using dense LU");
                self.io(r)?;
                det_dense(&flatten(bm))
            }
            Err(e) => Err(e),
        }
    }

    fn evaluate(&mut self, input: &InputArgs) -> Result<(MatrixFile, ScaledDet)> {
        let (file, operand) = Operand::load(input)?;
        let value = match &operand {
            Operand::Blocks(bm) => self.block_value(bm, input.fallback)?,
            Operand::Dense(m) => det_dense(m)?,
        };
        Ok((file, value))
    }

    fn det(&mut self, args: &DetArgs) -> Result<i32> {
        let (_, value) = self.evaluate(&args.input)?;
        let printed = value.to_string();
        let r = writeln!(self.out, "{printed}");
        self.io(r)?;
        if args.parse_check {
            let back: ScaledDet = printed.parse()?;
            let diff = value.relative_difference(&back);
            if diff >= PARSE_CHECK_TOL {
                let r = writeln!(self.err, "parse check failed: relative difference {diff:e}");
                self.io(r)?;
                return Ok(EXIT_TOLERANCE);
            }
        }
        Ok(EXIT_OK)
    }

    fn compare(&mut self, args: &CompareArgs) -> Result<i32> {
        if !(args.tol.is_finite() && args.tol >= 0.0) {
            return Err(BlockDetError::Parse(format!(
                "invalid tolerance {}",
                args.tol
            )));
        }
        let (_, operand) = Operand::load(&args.input)?;
        let Operand::Blocks(bm) = operand else {
            return Err(BlockDetError::DimensionMismatch(
                "compare needs a partition: pass --partition N,n or a block-json file".into(),
            ));
        };
        let dense_matrix = flatten(&bm);
        let dense = det_dense(&dense_matrix)?;
        let block = match self.block_value(&bm, args.input.fallback) {
            Ok(v) => v,
            Err(e @ BlockDetError::SingularPivotBlock { .. }) => {
                let r = writeln!(self.out, "block = singular ({e})\ndense = {dense}");
                self.io(r)?;
                return Err(e);
            }
            Err(e) => return Err(e),
        };
        let rel = block.relative_difference(&dense);
        let r = writeln!(
            self.out,
            "block = {block}\ndense = {dense}\nrelative_error = {rel:.3e}\ntolerance = {:.3e}",
            args.tol
        );
        self.io(r)?;
        if let Some(trials) = args.trials {
            let block_ns = median_ns(trials, || {
                let _ = black_box(block_det(black_box(&bm)));
            });
            let dense_ns = median_ns(trials, || {
                let _ = black_box(det_dense(black_box(&dense_matrix)));
            });
            let r = writeln!(
                self.out,
                "block_median_ns = {block_ns}\ndense_median_ns = {dense_ns}\ntrials = {trials}"
            );
            self.io(r)?;
        }
        // NaN never passes
        Ok(if rel <= args.tol {
            EXIT_OK
        } else {
            EXIT_TOLERANCE
        })
    }

    fn bench(&mut self, args: &BenchArgs) -> Result<i32> {
        if args.max_blocks < 2 || args.max_block_size == 0 || args.trials == 0 {
            return Err(BlockDetError::Parse(
                "bench needs --max-blocks >= 2, --max-block-size >= 1 and --trials >= 1".into(),
            ));
        }
        let mut rng = MatrixRng::new(args.seed);
        let r = writeln!(self.out, "N,n,method,median_ns,relative_error");
        self.io(r)?;
        for nb in 2..=args.max_blocks {
            for n in 1..=args.max_block_size {
                let bm = rng.block_matrix(nb, n);
                let dense_matrix = flatten(&bm);
                let dense = det_dense(&dense_matrix)?;
                // an independent pivot sequence gives the dense method's own error
                let dense_err = det_dense(&dense_matrix.transpose())?.relative_difference(&dense);
                let block_err = match block_det(&bm) {
                    Ok(rep) => rep.value.relative_difference(&dense),
                    Err(_) => f64::NAN,
                };
                let block_ns = median_ns(args.trials, || {
                    let _ = black_box(block_det(black_box(&bm)));
                });
                let dense_ns = median_ns(args.trials, || {
                    let _ = black_box(det_dense(black_box(&dense_matrix)));
                });
                let r = writeln!(
                    self.out,
                    "{nb},{n},block,{block_ns},{block_err:.6e}\n{nb},{n},dense,{dense_ns},{dense_err:.6e}"
                );
                self.io(r)?;
            }
        }
        Ok(EXIT_OK)
    }

    fn njl(&mut self, args: &NjlArgs) -> Result<i32> {
        let report = verify_njl(&args.params())?;
        let r = writeln!(self.out, "{report}");
        self.io(r)?;
        Ok(if report.passed() {
            EXIT_OK
        } else {
            EXIT_TOLERANCE
        })
    }

    fn parse_check(&mut self, args: &InputArgs) -> Result<i32> {
        let (file, value) = self.evaluate(args)?;
        let printed = value.to_string();
        let back: ScaledDet = printed.parse()?;
        let diff = value.relative_difference(&back);
        let value_ok = diff < PARSE_CHECK_TOL;

        let bitwise = |a: &DenseMatrix, b: &DenseMatrix| {
            a.rows() == b.rows()
                && a.cols() == b.cols()
                && a.entries().iter().zip(b.entries()).all(|(x, y)| {
                    x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
                })
        };
        let file_ok = match &file {
            MatrixFile::Dense(m) => bitwise(m, &parse_dense_text(&write_dense_text(m))?),
            MatrixFile::Blocks(b) => {
                let back = parse_block_json(&write_block_json(b))?;
                back.block_count() == b.block_count() && bitwise(&flatten(b), &flatten(&back))
            }
        };
        let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let r = writeln!(
            self.out,
            "value = {printed}\n[{}] reparsed value relative difference {diff:.3e} (threshold {PARSE_CHECK_TOL:.0e})\n[{}] {} rewrite and re-read is bitwise identical",
            verdict(value_ok),
            verdict(file_ok),
            match file.format() {
                MatrixFormat::DenseText => "dense-text",
                MatrixFormat::BlockJson => "block-json",
            }
        );
        self.io(r)?;
        Ok(if value_ok && file_ok {
            EXIT_OK
        } else {
            EXIT_TOLERANCE
        })
    }
}
