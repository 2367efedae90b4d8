//! Command-line interface. [`run`] returns the process exit code.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vibronic_core::broaden::{broaden, trapezoid, BroadeningKernel, EnergyGrid, Shape};
use vibronic_core::convergence::convergence_against;
use vibronic_core::fc::CutoffRule;
use vibronic_core::fidelity::{fidelity, FidelityNorm};
use vibronic_core::model::{
    hr_from_gradient, prune_modes, validate_molecule, GradientInput, Molecule,
    DEFAULT_PRUNE_THRESHOLD,
};
use vibronic_core::sampler::{
    sample_spectrum_parallel, DetectorModel, SamplerConfig, Thinning, DEFAULT_CHUNK_SIZE,
};
use vibronic_core::sos::{build_reference, SosConfig, DEFAULT_ENUMERATION_BUDGET};
use vibronic_core::spectrum::Normalization;

use crate::molecule_file::load_molecule;
use crate::spectrum_csv::{read_spectrum, write_spectrum};
use crate::{svg, IoError};

pub const SEED_ENV: &str = "VIBRONIC_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_GRID: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "vibronic", version, about = "Vibronic spectra by exact enumeration and Poisson sampling")]
pub struct Cli {
    /// Random seed. Without it a fresh seed is drawn and written to the output.
    #[arg(long, global = true, env = SEED_ENV)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact stick spectrum by enumerating every configuration up to K quanta.
    Sos(SosArgs),
    /// Stick spectrum from independent Poisson draws per mode.
    Sample(SampleArgs),
    /// Fidelity between two spectrum files.
    Fidelity(FidelityArgs),
    /// Convolve a stick spectrum with a line shape on an energy grid.
    Broaden(BroadenArgs),
    /// Mean and spread of sampled fidelity against the exact spectrum.
    Converge(ConvergeArgs),
    /// Huang-Rhys factor from a frequency and a gradient (atomic units).
    Hr(HrArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CutoffArg {
    Truncate,
    Cap,
}

impl From<CutoffArg> for CutoffRule {
    fn from(c: CutoffArg) -> Self {
        match c {
            CutoffArg::Truncate => CutoffRule::Truncate,
            CutoffArg::Cap => CutoffRule::Cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Lorentzian,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L2,
    Bhattacharyya,
}

impl From<NormArg> for FidelityNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L2 => FidelityNorm::L2,
            NormArg::Bhattacharyya => FidelityNorm::Bhattacharyya,
        }
    }
}

#[derive(Debug, Args)]
pub struct SosArgs {
    pub molecule: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub max_quanta: u32,
    /// Drop modes with S at or below this.
    #[arg(long, default_value_t = DEFAULT_PRUNE_THRESHOLD)]
    pub prune_s: f64,
    /// Skip configurations whose partial Franck-Condon product falls below this.
    #[arg(long)]
    pub fc_prune: Option<f64>,
    #[arg(long, default_value = "unit-l1")]
    pub normalize: Normalization,
    /// What happens to quanta above K.
    #[arg(long, value_enum, default_value_t = CutoffArg::Truncate)]
    pub cutoff: CutoffArg,
    /// Largest number of configurations to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    #[arg(long, default_value_t = 1.0)]
    pub efficiency: f64,
    /// Mean dark counts per mode and event.
    #[arg(long, default_value_t = 0.0)]
    pub dark: f64,
    /// Click detector: any nonzero count records as 1.
    #[arg(long)]
    pub threshold: bool,
    /// Thin photon by photon instead of drawing Poisson(ηS) directly.
    #[arg(long)]
    pub per_photon: bool,
}

impl DetectorArgs {
    fn model(&self) -> DetectorModel {
        DetectorModel {
            efficiency: self.efficiency,
            dark_mean: self.dark,
            threshold: self.threshold,
            thinning: if self.per_photon {
                Thinning::PerPhoton
            } else {
                Thinning::Direct
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub molecule: PathBuf,
    #[arg(long)]
    pub events: u64,
    /// Cap recorded quanta per mode; unbounded when omitted.
    #[arg(long)]
    pub max_quanta: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_PRUNE_THRESHOLD)]
    pub prune_s: f64,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[arg(long, default_value = "unit-l1")]
    pub normalize: Normalization,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
    pub chunk_size: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, value_enum, default_value_t = NormArg::L2)]
    pub norm: NormArg,
}

#[derive(Debug, Args)]
pub struct BroadenArgs {
    pub spectrum: PathBuf,
    #[arg(long, value_enum, default_value_t = ShapeArg::Lorentzian)]
    pub shape: ShapeArg,
    /// Full width at half maximum, cm⁻¹.
    #[arg(long)]
    pub fwhm: f64,
    /// `start:stop:step` in cm⁻¹. Defaults to step FWHM/20 and 10 FWHM of margin.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    pub molecule: PathBuf,
    /// Comma-separated event counts, e.g. `100,1000,10000`.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
    pub events_list: Vec<u64>,
    #[arg(long, default_value_t = 30)]
    pub runs: usize,
    /// Cutoff K of the reference, also applied to the samples.
    #[arg(long, default_value_t = 1)]
    pub max_quanta: u32,
    #[arg(long, value_enum, default_value_t = CutoffArg::Truncate)]
    pub cutoff: CutoffArg,
    #[arg(long, default_value_t = DEFAULT_PRUNE_THRESHOLD)]
    pub prune_s: f64,
    #[arg(long, value_enum, default_value_t = NormArg::L2)]
    pub norm: NormArg,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HrArgs {
    /// Harmonic frequency ω.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    /// Energy gradient G along the mode.
    #[arg(long, allow_hyphen_values = true)]
    pub gradient: f64,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        use vibronic_core::Error;
        let code = match &e {
            IoError::Io { .. } => EXIT_IO,
            IoError::Core(Error::EnumerationBudget { .. }) => EXIT_BUDGET,
            IoError::Core(Error::Grid(_)) => EXIT_GRID,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<vibronic_core::Error> for Failure {
    fn from(e: vibronic_core::Error) -> Self {
        IoError::from(e).into()
    }
}

type CliResult = std::result::Result<(), Failure>;

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

/// Parses `argv` and runs the command. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(cli: Cli) -> CliResult {
    let seed = cli.seed;
    match cli.command {
        Command::Sos(a) => sos(a, seed),
        Command::Sample(a) => sample(a, seed),
        Command::Fidelity(a) => fidelity_cmd(a),
        Command::Broaden(a) => broaden_cmd(a),
        Command::Converge(a) => converge(a, seed),
        Command::Hr(a) => hr(a),
    }
}

fn entropy_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or_default(),
    );
    h.write_u32(std::process::id());
    h.finish()
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| IoError::io(path, e).into()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| IoError::io("<stdout>", e).into())
        }
    }
}

/// Loads the molecule, reports modes at or below the pruning threshold and
/// drops them.
fn load_pruned(path: &Path, prune_s: f64) -> Result<Molecule, Failure> {
    if prune_s.is_nan() || prune_s < 0.0 {
        return Err(invalid(format!("--prune-s must be >= 0, got {prune_s}")));
    }
    let molecule = load_molecule(path)?;
    let warnings = validate_molecule(&molecule, prune_s)?;
    let pruned = prune_modes(&molecule, prune_s);
    if !warnings.is_empty() {
        eprintln!(
            "note: {} of {} modes have S <= {prune_s} and are skipped",
            molecule.mode_count() - pruned.mode_count(),
            molecule.mode_count()
        );
    }
    Ok(pruned)
}

fn pool(threads: Option<usize>) -> usize {
    threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn sos(a: SosArgs, seed: Option<u64>) -> CliResult {
    let m = load_pruned(&a.molecule, a.prune_s)?;
    let mut cfg = SosConfig::new(a.max_quanta)
        .with_cutoff(a.cutoff.into())
        .with_normalization(a.normalize);
    cfg.budget = a.budget;
    cfg.fc_prune = a.fc_prune;

    let start = Instant::now();
    let reference = build_reference(&m, &cfg)?;
    let elapsed = start.elapsed();

    let mut spec = reference.spectrum;
    if let Some(s) = seed {
        spec.provenance.push("seed", s);
    }
    spec.provenance.push("prune_s", a.prune_s);
    emit(a.out.as_deref(), &write_spectrum(&spec))?;
    eprintln!("state count: {}", reference.state_count);
    if reference.visited != reference.state_count {
        eprintln!("visited: {}", reference.visited);
    }
    eprintln!("captured intensity: {}", reference.captured);
    eprintln!("sticks: {}", spec.len());
    eprintln!("wall time: {:.3} s", elapsed.as_secs_f64());
    Ok(())
}

fn sample(a: SampleArgs, seed: Option<u64>) -> CliResult {
    let m = load_pruned(&a.molecule, a.prune_s)?;
    let seed = seed.unwrap_or_else(entropy_seed);
    let cfg = SamplerConfig {
        events: a.events,
        seed,
        max_quanta: a.max_quanta,
        chunk_size: a.chunk_size,
    };
    let d = a.detector.model();

    let start = Instant::now();
    let sampled = sample_spectrum_parallel(&m, &cfg, &d, pool(a.threads))?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut spec = sampled.normalize(a.normalize)?;
    spec.provenance.push("prune_s", a.prune_s);
    emit(a.out.as_deref(), &write_spectrum(&spec))?;
    let draws = a.events as f64 * m.mode_count() as f64;
    eprintln!("events: {}", sampled.total_events);
    eprintln!("seed: {seed}");
    eprintln!("distinct lines: {}", spec.len());
    eprintln!("wall time: {elapsed:.3} s");
    if elapsed > 0.0 {
        eprintln!("throughput: {:.3e} mode draws/s", draws / elapsed);
    }
    Ok(())
}

/// `x` with seven significant digits; values in `[0.1, 1)` get seven decimals.
pub fn seven_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.6}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (6 - magnitude).max(0) as usize;
    let text = format!("{x:.decimals$}");
    // Rounding can carry into the next decade (0.99999996 -> 1.0000000).
    let rounded: f64 = text.parse().unwrap_or(x);
    if rounded.abs().log10().floor() as i32 != magnitude {
        let decimals = decimals.saturating_sub(1);
        return format!("{x:.decimals$}");
    }
    text
}

fn fidelity_cmd(a: FidelityArgs) -> CliResult {
    let p = read_spectrum(&a.a)?;
    let q = read_spectrum(&a.b)?;
    let f = fidelity(&p, &q, a.norm.into())?;
    println!("{}", seven_significant(f));
    Ok(())
}

fn parse_grid(text: &str) -> Result<EnergyGrid, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(invalid(format!("--grid expects start:stop:step, got '{text}'")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| invalid(format!("--grid: '{s}' is not a number")))
    };
    Ok(EnergyGrid::new(num(start)?, num(stop)?, num(step)?)?)
}

fn broaden_cmd(a: BroadenArgs) -> CliResult {
    let spec = read_spectrum(&a.spectrum)?;
    if spec.is_empty() {
        return Err(invalid(format!("{}: spectrum has no sticks", a.spectrum.display())));
    }
    let shape = match a.shape {
        ShapeArg::Lorentzian => Shape::Lorentzian,
        ShapeArg::Gaussian => Shape::Gaussian,
    };
    let kernel = BroadeningKernel::new(shape, a.fwhm)?;
    let grid = match &a.grid {
        Some(g) => parse_grid(g)?,
        None => EnergyGrid::covering(&spec, &kernel)?,
    };
    if !grid.has_margin(&spec, &kernel) {
        eprintln!("warning: grid ends less than 5 FWHM from the outermost sticks; area will be lost");
    }
    let out = broaden(&spec, &kernel, &grid);
    emit(a.out.as_deref(), &write_spectrum(&out))?;
    eprintln!("grid points: {}", out.len());
    eprintln!("area: {} (stick total {})", trapezoid(&out), spec.total_intensity());
    if let Some(path) = &a.svg {
        let points: Vec<(f64, f64)> = out.sticks.iter().map(|s| (s.energy, s.intensity)).collect();
        let plot = svg::line_plot(&points, "energy (cm⁻¹)", "intensity");
        std::fs::write(path, plot).map_err(|e| IoError::io(path, e))?;
    }
    Ok(())
}

fn converge(a: ConvergeArgs, seed: Option<u64>) -> CliResult {
    if a.events_list.is_empty() {
        return Err(invalid("--events-list is empty"));
    }
    let m = load_pruned(&a.molecule, a.prune_s)?;
    let seed = seed.unwrap_or_else(entropy_seed);
    let sos = SosConfig::new(a.max_quanta).with_cutoff(a.cutoff.into());
    let reference = build_reference(&m, &sos)?.spectrum;
    let base = SamplerConfig::new(1, seed).with_max_quanta(a.max_quanta);
    let d = a.detector.model();

    let threads = pool(a.threads);
    let thread_pool = rayon_pool(threads)?;
    let start = Instant::now();
    let report = thread_pool.install(|| {
        convergence_against(&m, &base, &d, &a.events_list, a.runs, &reference, a.norm.into())
    })?;

    let mut text = String::new();
    let _ = writeln!(text, "# source: convergence");
    let _ = writeln!(text, "# molecule: {}", m.name);
    let _ = writeln!(text, "# modes: {}", m.mode_count());
    let _ = writeln!(text, "# seed: {seed}");
    let _ = writeln!(text, "# runs: {}", a.runs);
    let _ = writeln!(text, "# max_quanta: {}", a.max_quanta);
    let _ = writeln!(text, "# cutoff: {}", value_name(a.cutoff));
    let _ = writeln!(text, "# norm: {}", value_name(a.norm));
    text.push_str("events,mean_fidelity,std_fidelity\n");
    for i in 0..report.event_counts.len() {
        let _ = writeln!(
            text,
            "{},{},{}",
            report.event_counts[i], report.mean_fidelity[i], report.std_fidelity[i]
        );
    }
    emit(a.out.as_deref(), &text)?;
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn rayon_pool(threads: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))
}

fn hr(a: HrArgs) -> CliResult {
    let s = hr_from_gradient(GradientInput {
        omega: a.omega,
        gradient: a.gradient,
    })?;
    println!("{s:?}");
    Ok(())
}

fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}
