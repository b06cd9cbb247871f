//! The `xeblab` command line.
//!
//! Exit codes: 0 success or pass, 1 a statistical test failed, 2 usage,
//! 3 I/O or malformed input, 4 resource limit.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xeblab_core::analysis;
use xeblab_core::circuit::{sample_circuit, CircuitDistribution, Topology};
use xeblab_core::estimators::{
    run_mse_benchmark, FeynmanPathEstimator, PathProbability, ProbabilityEstimator, ReductionEstimator, TopKSolver,
    TrivialEstimator, UniformSolver,
};
use xeblab_core::samplers::{sample_depolarizing_from, sample_ideal_from, sample_uniform, top_k_from, NoiseModel};
use xeblab_core::simulator::{Simulator, DEFAULT_MAX_QUBITS};
use xeblab_core::xeb::{self, KConvention};
use xeblab_core::Error as CoreError;

use crate::error::FileError;
use crate::format;
use crate::report::{self, Fields, Format, TrialRow};

#[derive(Debug, Parser)]
#[command(name = "xeblab", version, about = "Random circuit sampling, linear XEB and spoofing experiments")]
pub struct Cli {
    /// Worker threads for Monte Carlo loops.
    #[arg(long, global = true, env = "XEBLAB_THREADS")]
    pub threads: Option<usize>,
    /// Largest qubit count a full statevector may use.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_QUBITS)]
    pub max_qubits: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random circuit and write it in text form.
    Gen(GenArgs),
    /// Simulate a circuit; optionally dump its output distribution.
    Simulate(SimulateArgs),
    /// Draw a sample set from a circuit or a spoofing strategy.
    Sample(SampleArgs),
    /// Score samples with linear XEB and check XHOG. Exits 1 on failure.
    Xeb(XebArgs),
    /// Benchmark a probability estimator against the trivial guess.
    Reduce(ReduceArgs),
    /// Statistical analyses and the sample-size formulas.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TopologyKind {
    Chain,
    Grid,
}

/// The circuit ensemble.
#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub n: usize,
    /// Cycles of one single-qubit layer and one CZ layer.
    #[arg(long)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = TopologyKind::Grid)]
    pub topology: TopologyKind,
    /// Grid rows; by default the most square factorization of n.
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Omit the final random NOT mask.
    #[arg(long)]
    pub no_mask: bool,
}

impl EnsembleArgs {
    fn distribution(&self) -> Result<CircuitDistribution, CliError> {
        if self.n == 0 {
            return Err(CliError::Usage("--n must be at least 1".into()));
        }
        let topology = match self.topology {
            TopologyKind::Chain => Topology::Chain1D,
            TopologyKind::Grid => {
                let (rows, cols) = match (self.rows, self.cols) {
                    (Some(r), Some(c)) => (r, c),
                    (Some(r), None) if r > 0 => (r, self.n / r),
                    (None, Some(c)) if c > 0 => (self.n / c, c),
                    _ => {
                        let rows = (1..=self.n).take_while(|r| r * r <= self.n).filter(|r| self.n % r == 0).last();
                        (rows.unwrap_or(1), self.n / rows.unwrap_or(1))
                    }
                };
                Topology::Grid2D { rows, cols }
            }
        };
        let dist = CircuitDistribution { n: self.n, depth: self.depth, topology, final_not_mask_layer: !self.no_mask };
        dist.validate()?;
        Ok(dist)
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// Binary dump of the output distribution.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerKind {
    Ideal,
    Uniform,
    Depolarizing,
    Topk,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = SamplerKind::Ideal)]
    pub sampler: SamplerKind,
    /// Circuit file; required by every sampler except `uniform`.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Qubit count for `uniform` without a circuit.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub fidelity: f64,
    /// Reject and redraw repeated strings.
    #[arg(long)]
    pub distinct: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct XebArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long)]
    pub b: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorKind {
    Trivial,
    Paths,
    ReductionTopk,
    ReductionUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathModeKind {
    Shrunk,
    Corrected,
    Raw,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum)]
    pub estimator: EstimatorKind,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// XHOG level used by the reduction estimators.
    #[arg(long, default_value_t = 1.5)]
    pub b: f64,
    /// Solver sample count; defaults to the theorem's count for `--s`.
    #[arg(long)]
    pub k: Option<usize>,
    /// Solver success rate assumed when choosing `k`.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 16)]
    pub paths: usize,
    #[arg(long, value_enum, default_value_t = PathModeKind::Shrunk)]
    pub path_mode: PathModeKind,
    /// Per-trial CSV (`seed,p0,p,X`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Kolmogorov–Smirnov fit of pooled `2^n p` to Exp(1). Exits 1 on failure.
    Pt(PtArgs),
    /// Mean and variance of `P(z)` under depolarizing samples.
    Moments(MomentArgs),
    /// KL divergence between uniform and XHOG-level samples, with Pinsker.
    Kl(KlArgs),
    /// Monte Carlo likelihood-ratio test between uniform and XHOG-level samples.
    Distinguish(DistinguishArgs),
    /// Sample count needed for level `b` and success rate `s`.
    RequiredK(RequiredKArgs),
    /// Chebyshev lower bound on the XHOG success probability.
    Chebyshev(ChebyshevArgs),
}

#[derive(Debug, Args)]
pub struct PtArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 200)]
    pub circuits: usize,
    #[arg(long, default_value_t = analysis::DEFAULT_KS_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the pooled rescaled probabilities, one per line.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long)]
    pub fidelity: f64,
    #[arg(long, default_value_t = 200)]
    pub circuits: usize,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KlArgs {
    #[arg(long)]
    pub b: f64,
    /// Sample count for the Pinsker bound; defaults to `ceil((b - 1)^-2)`.
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistinguishArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RequiredKArgs {
    #[arg(long)]
    pub b: f64,
    /// Success probability; defaults to `3/4 + 1/(4b)`.
    #[arg(long)]
    pub s: Option<f64>,
    /// Use the `4 / (b - 1)^2` convention.
    #[arg(long)]
    pub appendix: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChebyshevArgs {
    #[arg(long)]
    pub b: f64,
    /// Defaults to `ceil(4 / (b - 1)^2)`.
    #[arg(long)]
    pub k: Option<u64>,
    /// `2^n E[Y]`; defaults to `2b - 1`.
    #[arg(long)]
    pub fidelity_mean: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    File(#[from] FileError),
    #[error("{0}")]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::File(_) => 3,
            CliError::Core(CoreError::Resource { .. }) => 4,
            CliError::Core(_) => 2,
        }
    }
}

/// Whether the command's statistical test passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => format::write_file(path, text.as_bytes())?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| FileError::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn check_dimensions(circuit_n: usize, samples_n: usize) -> Result<(), CliError> {
    if circuit_n != samples_n {
        return Err(CliError::Usage(format!("circuit has {circuit_n} qubits but samples have {samples_n}")));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let sim = Simulator::with_max_qubits(cli.max_qubits);
    match &cli.command {
        Command::Gen(args) => {
            let c = sample_circuit(&args.ensemble.distribution()?, args.seed)?;
            emit(args.output.as_deref(), &format::serialize_circuit(&c))?;
        }
        Command::Simulate(args) => {
            let c = format::load_circuit(&args.circuit)?;
            let dist = sim.full_distribution(&c)?;
            let amp = sim.amplitude(&c, 0)?;
            let collision: f64 = dist.probs().iter().map(|p| p * p).sum();
            let mut f = Fields::default();
            f.push("n", c.n())
                .push("layers", c.layers().len())
                .push("gates", c.gate_count())
                .real("amplitude0_re", amp.re)
                .real("amplitude0_im", amp.im)
                .real("p0", dist.prob(0))
                .real("b_ideal", collision * dist.probs().len() as f64)
                .push("support", dist.support_size());
            if let Some(path) = &args.output {
                let mut bytes = Vec::new();
                format::write_distribution(&dist, &mut bytes).map_err(|e| FileError::io(path, e))?;
                format::write_file(path, &bytes)?;
            }
            emit(None, &f.render(args.format))?;
        }
        Command::Sample(args) => {
            let circuit = args.circuit.as_deref().map(format::load_circuit).transpose()?;
            let needs_circuit = || CliError::Usage("this sampler needs --circuit".into());
            let samples = match args.sampler {
                SamplerKind::Uniform => {
                    let n = match (&circuit, args.n) {
                        (Some(c), None) => c.n(),
                        (None, Some(n)) => n,
                        (Some(c), Some(n)) => {
                            check_dimensions(c.n(), n)?;
                            n
                        }
                        (None, None) => return Err(CliError::Usage("uniform sampling needs --n or --circuit".into())),
                    };
                    sample_uniform(n, args.k, args.seed, args.distinct)?
                }
                kind => {
                    let dist = sim.full_distribution(circuit.as_ref().ok_or_else(needs_circuit)?)?;
                    match kind {
                        SamplerKind::Ideal => sample_ideal_from(&dist, args.k, args.seed, args.distinct)?,
                        SamplerKind::Depolarizing => {
                            sample_depolarizing_from(&dist, NoiseModel::new(args.fidelity)?, args.k, args.seed, args.distinct)?
                        }
                        _ => top_k_from(&dist, args.k)?,
                    }
                }
            };
            emit(args.output.as_deref(), &format::serialize_samples(&samples))?;
        }
        Command::Xeb(args) => {
            let c = format::load_circuit(&args.circuit)?;
            let s = format::load_samples(&args.samples)?;
            check_dimensions(c.n(), s.n())?;
            let report = xeb::check_xhog_from(&sim.full_distribution(&c)?, &s, args.b, c.seed())?;
            emit(args.output.as_deref(), &report::xeb_fields(&report).render(args.format))?;
            return Ok(Outcome::from_pass(report.xhog_pass));
        }
        Command::Reduce(args) => reduce(args, &sim)?,
        Command::Analyze(command) => return analyze(command, &sim),
    }
    Ok(Outcome::Pass)
}

fn reduce(args: &ReduceArgs, sim: &Simulator) -> Result<(), CliError> {
    let dist = args.ensemble.distribution()?;
    sim.check_size(dist.n)?;
    let k = match args.k {
        Some(k) => k,
        None if matches!(args.estimator, EstimatorKind::ReductionTopk | EstimatorKind::ReductionUniform) => {
            xeb::required_k(args.b, args.s, KConvention::Theorem)? as usize
        }
        None => 0,
    };
    let mode = match args.path_mode {
        PathModeKind::Shrunk => PathProbability::Shrunk,
        PathModeKind::Corrected => PathProbability::BiasCorrected,
        PathModeKind::Raw => PathProbability::Raw,
    };
    let estimator: Box<dyn ProbabilityEstimator + Send> = match args.estimator {
        EstimatorKind::Trivial => Box::new(TrivialEstimator),
        EstimatorKind::Paths => {
            if args.paths == 0 {
                return Err(CliError::Usage("--paths must be at least 1".into()));
            }
            Box::new(FeynmanPathEstimator::new(args.paths).with_mode(mode))
        }
        EstimatorKind::ReductionTopk => Box::new(ReductionEstimator::new(TopKSolver { k }, args.b)),
        EstimatorKind::ReductionUniform => Box::new(ReductionEstimator::new(UniformSolver { k }, args.b)),
    };
    let started = Instant::now();
    let bench = run_mse_benchmark(&dist, &*estimator, args.trials, args.seed)?;
    eprintln!("reduce: {} trials in {:.2?}", args.trials, started.elapsed());
    if let Some(path) = &args.output {
        format::write_file(path, report::trials_csv(bench.trials.iter().map(TrialRow::from)).as_bytes())?;
    }
    let name = args.estimator.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut summary = report::benchmark_fields(&name, &bench);
    if k > 0 {
        summary.push("k", k).real("b", args.b);
    }
    emit(None, &summary.render(args.format))
}

fn analyze(command: &AnalyzeCommand, sim: &Simulator) -> Result<Outcome, CliError> {
    match command {
        AnalyzeCommand::Pt(args) => {
            let dist = args.ensemble.distribution()?;
            sim.check_size(dist.n)?;
            let started = Instant::now();
            let xs = analysis::pooled_rescaled_probabilities(&dist, args.circuits, args.seed)?;
            if let Some(path) = &args.dump {
                let text = xs.iter().map(|&x| report::real(x) + "\n").collect::<String>();
                format::write_file(path, text.as_bytes())?;
            }
            let fit = analysis::fit_exp1(xs, args.threshold);
            eprintln!("pt: {} circuits in {:.2?}", args.circuits, started.elapsed());
            emit(args.output.as_deref(), &report::fit_fields(&fit).render(args.format))?;
            Ok(Outcome::from_pass(fit.pass))
        }
        AnalyzeCommand::Moments(args) => {
            let dist = args.ensemble.distribution()?;
            sim.check_size(dist.n)?;
            let r = analysis::xeb_moment_check(&dist, args.fidelity, args.circuits, args.samples, args.seed)?;
            emit(args.output.as_deref(), &report::moment_fields(&r).render(args.format))?;
            Ok(Outcome::Pass)
        }
        AnalyzeCommand::Kl(args) => {
            let k = match args.k {
                Some(k) => k,
                None if args.b > 1.0 => (1.0 / ((args.b - 1.0) * (args.b - 1.0))).ceil().min(u64::MAX as f64) as u64,
                None => 1,
            };
            let r = analysis::kl_uniform_vs_xhog(args.b, k)?;
            emit(args.output.as_deref(), &report::divergence_fields(&r).render(args.format))?;
            Ok(Outcome::Pass)
        }
        AnalyzeCommand::Distinguish(args) => {
            let dist = args.ensemble.distribution()?;
            sim.check_size(dist.n)?;
            let r = analysis::empirical_distinguishability(&dist, args.b, args.k, args.trials, args.seed)?;
            emit(args.output.as_deref(), &report::distinguishability_fields(&r).render(args.format))?;
            Ok(Outcome::Pass)
        }
        AnalyzeCommand::RequiredK(args) => {
            let s = args.s.unwrap_or_else(|| xeb::canonical_success(args.b));
            let convention = if args.appendix { KConvention::Appendix } else { KConvention::Theorem };
            let k = xeb::required_k(args.b, s, convention)?;
            let mut f = Fields::default();
            f.real("b", args.b)
                .real("s", s)
                .push("convention", if args.appendix { "appendix" } else { "theorem" })
                .push("k", k);
            emit(args.output.as_deref(), &f.render(args.format))?;
            Ok(Outcome::Pass)
        }
        AnalyzeCommand::Chebyshev(args) => {
            let default_k = || xeb::required_k(args.b, 1.0, KConvention::Appendix);
            let k = args.k.map_or_else(default_k, Ok)?;
            let mean = args.fidelity_mean.unwrap_or(2.0 * args.b - 1.0);
            let mut f = Fields::default();
            f.real("b", args.b)
                .push("k", k)
                .real("fidelity_mean", mean)
                .real("success_bound", xeb::chebyshev_success_bound(args.b, k, mean)?)
                .real("success_bound_variance", xeb::chebyshev_success_bound_variance(args.b, k, mean)?)
                .real("canonical_success", xeb::canonical_success(args.b));
            emit(args.output.as_deref(), &f.render(args.format))?;
            Ok(Outcome::Pass)
        }
    }
}

/// Parses arguments, configures the thread pool and runs the command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // fails only if a pool already exists, in which case it is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
