//! The `mumsep` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 failed
//! verification or positivity violation, 4 numeric integrity failure,
//! 5 a separable state crossed a bound.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::criteria::{
    k_nonsep_check, mub_criterion, theorem1, theorem2, theorem3, theorem45_with_budget,
    CriterionReport, MubPairing, Strategy, Theorem, DEFAULT_BUDGET, DETECT_TOL,
};
use crate::error::{Error, Result};
use crate::io::{load_mums, load_state, save_mums, save_state, write_json};
use crate::mum::{build_mums, mub_prime, transpose_mums, verify_mums, MumSet, VERIFY_TOL};
use crate::states::{self, DensityMatrix, PartitionSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_SOUNDNESS: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "mumsep",
    version,
    about = "Mutually unbiased measurements and separability witnesses"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build, verify and transpose measurement sets.
    #[command(subcommand)]
    Mums(MumsCommand),
    /// Generate density matrices.
    #[command(subcommand)]
    State(StateCommand),
    /// Evaluate a witness on a state.
    #[command(subcommand)]
    Crit(CritCommand),
    /// Scan a one-parameter state family.
    #[command(subcommand)]
    Scan(ScanCommand),
    /// Check the witnesses on many random separable states.
    #[command(subcommand)]
    Sweep(SweepCommand),
}

#[derive(Debug, Subcommand)]
enum MumsCommand {
    /// Build the complete set of d + 1 MUMs.
    Build {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        d: u64,
        /// Defaults to the largest value keeping every element positive.
        #[arg(long)]
        t: Option<f64>,
        /// Defaults to `mums_d<d>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every defining property of a stored set.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = VERIFY_TOL)]
        tol: f64,
    },
    /// Write the elementwise transpose of a stored set.
    Transpose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKind {
    Mixed,
    Isotropic,
    Ghz,
    NoisyGhz,
    Random,
    RandomPure,
    RandomProduct,
    RandomSeparable,
}

#[derive(Debug, Subcommand)]
enum StateCommand {
    Gen {
        #[arg(long, value_enum)]
        kind: StateKind,
        /// Subsystem dimensions, e.g. `2,3`.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        /// Local dimension for isotropic and GHZ states.
        #[arg(long)]
        d: Option<usize>,
        /// Number of parties for GHZ states.
        #[arg(long)]
        m: Option<usize>,
        /// Mixing parameter.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairingArg {
    Same,
    Conjugate,
}

impl From<PairingArg> for MubPairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Same => MubPairing::Same,
            PairingArg::Conjugate => MubPairing::Conjugate,
        }
    }
}

#[derive(Debug, Args)]
struct WitnessArgs {
    /// T1, T2, T3, T4, T5 or MUB.
    #[arg(long)]
    theorem: Theorem,
    /// exact, greedy or diagonal.
    #[arg(long, default_value = "exact")]
    strategy: Strategy,
}

#[derive(Debug, Subcommand)]
enum CritCommand {
    Eval {
        #[command(flatten)]
        witness: WitnessArgs,
        #[arg(long)]
        state: PathBuf,
        /// One set per party (or block); a single set is reused for all.
        #[arg(long, num_args = 1..)]
        sets: Vec<PathBuf>,
        /// Party blocks such as `1,2|3`.
        #[arg(long)]
        partition: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Basis pairing for the MUB index.
        #[arg(long, value_enum, default_value_t = PairingArg::Same)]
        pairing: PairingArg,
    },
}

#[derive(Debug, Subcommand)]
enum ScanCommand {
    /// Isotropic states with P on the first party and its transpose on the second.
    Isotropic {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        d: u64,
        #[command(flatten)]
        witness: WitnessArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Noisy GHZ states with the same set on every party.
    Ghz {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        d: u64,
        /// Number of parties.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[command(flatten)]
        witness: WitnessArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    #[arg(long, default_value_t = 1.0)]
    stop: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// CSV output path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum SweepCommand {
    Separable {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        witness: WitnessArgs,
        #[arg(long, default_value_t = 3)]
        terms: usize,
        #[arg(long)]
        partition: Option<String>,
    },
}

/// Runs the CLI on the process arguments and returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit status for an error that escaped a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PositivityViolation { .. } | Error::NotPositive(_) => EXIT_VERIFY,
        Error::NumericIntegrity { .. } | Error::NoConvergence { .. } => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Mums(c) => mums(c),
        Command::State(StateCommand::Gen {
            kind,
            dims,
            d,
            m,
            p,
            seed,
            terms,
            out,
        }) => {
            let rho = generate_state(kind, &dims, d, m, p, seed, terms)?;
            save_state(&rho, &out)?;
            println!(
                "wrote state with dims {:?} to {}",
                rho.dims(),
                out.display()
            );
            Ok(EXIT_OK)
        }
        Command::Crit(CritCommand::Eval {
            witness,
            state,
            sets,
            partition,
            budget,
            pairing,
        }) => {
            let rho = load_state(&state)?;
            let sets = sets
                .iter()
                .map(|p| load_mums(p))
                .collect::<Result<Vec<_>>>()?;
            let report = evaluate(
                &witness,
                &rho,
                &sets,
                partition.as_deref(),
                budget,
                pairing.into(),
            )?;
            let stdout = std::io::stdout();
            write_json(&report, stdout.lock())?;
            Ok(EXIT_OK)
        }
        Command::Scan(ScanCommand::Isotropic { d, witness, grid }) => {
            scan_isotropic(d as usize, &witness, &grid)
        }
        Command::Scan(ScanCommand::Ghz {
            d,
            m,
            witness,
            grid,
        }) => scan_ghz(d as usize, m as usize, &witness, &grid),
        Command::Sweep(SweepCommand::Separable {
            dims,
            count,
            seed,
            witness,
            terms,
            partition,
        }) => sweep_separable(&dims, count, seed, &witness, terms, partition.as_deref()),
    }
}

fn mums(cmd: MumsCommand) -> Result<i32> {
    match cmd {
        MumsCommand::Build { d, t, out } => {
            let d = d as usize;
            let set = build_mums(d, t)?;
            let out = out.unwrap_or_else(|| PathBuf::from(format!("mums_d{d}.json")));
            save_mums(&set, &out)?;
            println!(
                "d={} M={} t={:.16e} kappa={:.16e} -> {}",
                set.d(),
                set.m(),
                set.t(),
                set.kappa(),
                out.display()
            );
            Ok(EXIT_OK)
        }
        MumsCommand::Verify { input, tol } => {
            let set = load_mums(&input)?;
            let v = verify_mums(&set, tol);
            let stdout = std::io::stdout();
            write_json(&v, stdout.lock())?;
            Ok(if v.passed { EXIT_OK } else { EXIT_VERIFY })
        }
        MumsCommand::Transpose { input, out } => {
            let set = load_mums(&input)?;
            save_mums(&transpose_mums(&set), &out)?;
            println!("wrote transposed set to {}", out.display());
            Ok(EXIT_OK)
        }
    }
}

fn require<T>(v: Option<T>, flag: &str, kind: StateKind) -> Result<T> {
    v.ok_or_else(|| Error::Configuration(format!("--{flag} is required for {kind:?} states")))
}

fn generate_state(
    kind: StateKind,
    dims: &[usize],
    d: Option<usize>,
    m: Option<usize>,
    p: Option<f64>,
    seed: u64,
    terms: usize,
) -> Result<DensityMatrix> {
    let need_dims = || {
        if dims.is_empty() {
            Err(Error::Configuration(format!(
                "--dims is required for {kind:?} states"
            )))
        } else {
            Ok(dims)
        }
    };
    match kind {
        StateKind::Mixed => states::maximally_mixed(need_dims()?),
        StateKind::Isotropic => states::isotropic(require(d, "d", kind)?, require(p, "p", kind)?),
        StateKind::Ghz => states::ghz(require(d, "d", kind)?, require(m, "m", kind)?),
        StateKind::NoisyGhz => states::noisy_ghz(
            require(d, "d", kind)?,
            require(m, "m", kind)?,
            require(p, "p", kind)?,
        ),
        StateKind::Random => states::random_density(need_dims()?, seed),
        StateKind::RandomPure => states::random_pure(need_dims()?, seed),
        StateKind::RandomProduct => states::random_product(need_dims()?, seed),
        StateKind::RandomSeparable => states::random_separable(need_dims()?, terms, seed),
    }
}

fn check_budget(budget: u64) -> Result<()> {
    if budget == 0 {
        return Err(Error::Configuration("--budget must be positive".into()));
    }
    Ok(())
}

/// Dispatches one witness. `sets` holds one set per party, or per block when a
/// partition is given; a single set stands for every party.
fn evaluate(
    witness: &WitnessArgs,
    rho: &DensityMatrix,
    sets: &[MumSet],
    partition: Option<&str>,
    budget: u64,
    pairing: MubPairing,
) -> Result<CriterionReport> {
    check_budget(budget)?;
    if witness.theorem == Theorem::Mub {
        if partition.is_some() {
            return Err(Error::Configuration(
                "the MUB index takes no partition".into(),
            ));
        }
        let d = rho.dims()[0];
        return mub_criterion(&mub_prime(d)?, rho, pairing);
    }
    if sets.is_empty() {
        return Err(Error::Configuration(
            "--sets is required for this witness".into(),
        ));
    }
    let partition = partition
        .map(|text| PartitionSpec::parse(text, rho.dims().len()))
        .transpose()?;
    let parties = partition.as_ref().map_or(rho.dims().len(), |p| p.k());
    let refs: Vec<&MumSet> = match sets.len() {
        1 => vec![&sets[0]; parties],
        n if n == parties => sets.iter().collect(),
        n => {
            return Err(Error::Configuration(format!(
                "{n} measurement sets given for {parties} parties"
            )))
        }
    };
    match (witness.theorem, partition) {
        (Theorem::T4 | Theorem::T5, Some(part)) => {
            k_nonsep_check(rho, &part, &refs, witness.strategy)?.with_primary(witness.theorem)
        }
        (_, Some(_)) => Err(Error::Configuration(
            "a partition is only accepted by T4 and T5".into(),
        )),
        (Theorem::T1, None) => theorem1(&refs, rho),
        (Theorem::T2 | Theorem::T3, None) => {
            if refs.len() != 2 {
                return Err(Error::Configuration(format!(
                    "{} needs a bipartite state, got {} parties",
                    witness.theorem,
                    refs.len()
                )));
            }
            if witness.theorem == Theorem::T2 {
                theorem2(refs[0], refs[1], rho, witness.strategy)
            } else {
                theorem3(refs[0], refs[1], rho, witness.strategy)
            }
        }
        (Theorem::T4 | Theorem::T5, None) => {
            theorem45_with_budget(&refs, rho, witness.strategy, budget)?
                .with_primary(witness.theorem)
        }
        (Theorem::Mub, None) => unreachable!("handled above"),
    }
}

fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Grid points `start + i·step` up to `stop` (inclusive within rounding).
fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::Configuration(format!(
            "need start <= stop and step > 0, got start={start}, stop={stop}, step={step}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn scan_isotropic(d: usize, witness: &WitnessArgs, g: &GridArgs) -> Result<i32> {
    let ps = grid(g.start, g.stop, g.step)?;
    let p = build_mums(d, None)?;
    let q = transpose_mums(&p);
    let mubs = if witness.theorem == Theorem::Mub {
        Some(mub_prime(d)?)
    } else {
        None
    };
    let eval = |prob: f64| -> Result<CriterionReport> {
        let rho = states::isotropic(d, prob)?;
        match witness.theorem {
            Theorem::T1 => theorem1(&[&p, &q], &rho),
            Theorem::T2 => theorem2(&p, &q, &rho, witness.strategy),
            Theorem::T3 => theorem3(&p, &q, &rho, witness.strategy),
            Theorem::T4 | Theorem::T5 => {
                theorem45_with_budget(&[&p, &q], &rho, witness.strategy, DEFAULT_BUDGET)?
                    .with_primary(witness.theorem)
            }
            Theorem::Mub => mub_criterion(
                mubs.as_ref().expect("built above"),
                &rho,
                MubPairing::Conjugate,
            ),
        }
    };
    let reports = ps
        .par_iter()
        .map(|&x| eval(x))
        .collect::<Result<Vec<_>>>()?;
    write_scan(&ps, &reports, &g.out)
}

fn scan_ghz(d: usize, m: usize, witness: &WitnessArgs, g: &GridArgs) -> Result<i32> {
    let ps = grid(g.start, g.stop, g.step)?;
    let set = [build_mums(d, None)?];
    let reports = ps
        .par_iter()
        .map(|&x| {
            let rho = states::noisy_ghz(d, m, x)?;
            evaluate(witness, &rho, &set, None, DEFAULT_BUDGET, MubPairing::Same)
        })
        .collect::<Result<Vec<_>>>()?;
    write_scan(&ps, &reports, &g.out)
}

/// Writes the scan CSV in grid order and prints the first detected point.
fn write_scan(ps: &[f64], reports: &[CriterionReport], out: &Path) -> Result<i32> {
    let mut w = csv::Writer::from_path(out).map_err(csv_error)?;
    w.write_record(["p", "J", "bound", "margin", "detected"])
        .map_err(csv_error)?;
    for (x, r) in ps.iter().zip(reports) {
        w.write_record([
            format_float(*x),
            format_float(r.j),
            format_float(r.bound),
            format_float(r.margin),
            r.detected.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;

    match ps.iter().zip(reports).find(|(_, r)| r.detected) {
        Some((x, _)) => println!("threshold p={}", format_float(*x)),
        None => println!("threshold none"),
    }
    Ok(EXIT_OK)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

fn sweep_separable(
    dims: &[usize],
    count: usize,
    seed: u64,
    witness: &WitnessArgs,
    terms: usize,
    partition: Option<&str>,
) -> Result<i32> {
    if count == 0 {
        return Err(Error::Configuration("--count must be at least 1".into()));
    }
    let part = partition
        .map(|t| PartitionSpec::parse(t, dims.len()))
        .transpose()?;
    let set_dims = match &part {
        Some(p) => p.block_dims(dims)?,
        None => dims.to_vec(),
    };
    let mut built: Vec<(usize, MumSet)> = Vec::new();
    for &d in &set_dims {
        if !built.iter().any(|(k, _)| *k == d) {
            built.push((d, build_mums(d, None)?));
        }
    }
    let sets: Vec<MumSet> = set_dims
        .iter()
        .map(|d| built.iter().find(|(k, _)| k == d).expect("built").1.clone())
        .collect();

    let margins = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let rho = states::random_separable(dims, terms, seed.wrapping_add(k))?;
            let r = evaluate(
                witness,
                &rho,
                &sets,
                partition,
                DEFAULT_BUDGET,
                MubPairing::Same,
            )?;
            Ok(r.margin)
        })
        .collect::<Result<Vec<f64>>>()?;

    let (worst, max_margin) =
        margins
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &m)| if m > acc.1 { (i, m) } else { acc },
            );
    let detected = margins.iter().filter(|&&m| m > DETECT_TOL).count();
    let mut out = std::io::stdout().lock();
    writeln!(out, "states={count} detected={detected}")?;
    writeln!(
        out,
        "max margin={} (seed {})",
        format_float(max_margin),
        seed.wrapping_add(worst as u64)
    )?;
    Ok(if max_margin > DETECT_TOL {
        EXIT_SOUNDNESS
    } else {
        EXIT_OK
    })
}
