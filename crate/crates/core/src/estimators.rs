//! Estimators of `p0 = Pr[C outputs 0^n]` and their mean-squared-error
//! benchmark against the constant guess `2^-n`.
//!
//! The figure of merit of an estimate `p` is the per-trial gain
//! `X = (p0 - 2^-n)^2 - (p0 - p)^2`; its mean over circuits and internal
//! randomness is reported in units of `2^-3n` as the scaled gain.
//!
//! Three estimators are provided besides the trivial one:
//!
//! * [`FeynmanPathEstimator`] averages randomly sampled computational-basis
//!   paths that end at `0^n`.
//! * [`ReductionEstimator`] turns any [`XhogSolver`] into an estimator: hide
//!   the target string behind a uniformly random NOT mask, run the solver on
//!   the masked circuit, and guess `b / 2^n` if the solver's output contains
//!   the hidden string, `2^-n` otherwise.
//! * [`ExactEstimator`] returns `p0` itself, the ceiling for any estimator.

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::RngCore;

use crate::circuit::{append_not_mask, sample_circuit, Circuit, CircuitDistribution, Gate};
use crate::error::{domain, Result};
use crate::math::{inv_pow2, mean_and_se, pow2, KahanSum, ZERO};
use crate::parallel::map_indexed;
use crate::rng::{self, StreamRng};
use crate::samplers::{sample_uniform, top_k_from, NoiseModel, SampleSet};
use crate::simulator::Simulator;
use crate::xeb::check_xhog_from;

/// `(p0 - 2^-n)^2 - (p0 - p)^2`.
pub fn gain(p0: f64, p: f64, n: usize) -> f64 {
    let t = inv_pow2(n);
    (p0 - t) * (p0 - t) - (p0 - p) * (p0 - p)
}

/// One circuit's outcome in an MSE benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorTrial {
    /// Seed the trial's circuit was drawn with.
    pub seed: u64,
    pub p0: f64,
    pub p: f64,
    pub gain: f64,
    /// Reduction only: whether the hidden string was among the solver's outputs.
    pub hit: Option<bool>,
    /// Reduction only: whether the solver's output passed XHOG on the masked circuit.
    pub solver_success: Option<bool>,
}

impl EstimatorTrial {
    pub fn new(seed: u64, n: usize, p0: f64, estimate: &Estimate) -> Self {
        Self {
            seed,
            p0,
            p: estimate.p,
            gain: gain(p0, estimate.p, n),
            hit: estimate.hit,
            solver_success: estimate.solver_success,
        }
    }
}

/// An estimate of `p0` plus reduction diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p: f64,
    pub hit: Option<bool>,
    pub solver_success: Option<bool>,
}

impl Estimate {
    pub fn plain(p: f64) -> Self {
        Self { p, hit: None, solver_success: None }
    }
}

/// Anything that guesses `Pr[C outputs 0^n]` from the circuit description.
pub trait ProbabilityEstimator: Sync {
    fn name(&self) -> &str;
    fn estimate(&self, c: &Circuit, rng: &mut StreamRng) -> Result<Estimate>;
}

impl<T: ProbabilityEstimator + ?Sized + Send> ProbabilityEstimator for Box<T> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn estimate(&self, c: &Circuit, rng: &mut StreamRng) -> Result<Estimate> {
        (**self).estimate(c, rng)
    }
}

/// Always `2^-n`.
pub fn trivial_estimator(c: &Circuit) -> f64 {
    inv_pow2(c.n())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TrivialEstimator;

impl ProbabilityEstimator for TrivialEstimator {
    fn name(&self) -> &str {
        "trivial"
    }

    fn estimate(&self, c: &Circuit, _rng: &mut StreamRng) -> Result<Estimate> {
        Ok(Estimate::plain(trivial_estimator(c)))
    }
}

/// Returns the true `p0` by full simulation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactEstimator;

impl ProbabilityEstimator for ExactEstimator {
    fn name(&self) -> &str {
        "exact"
    }

    fn estimate(&self, c: &Circuit, _rng: &mut StreamRng) -> Result<Estimate> {
        Ok(Estimate::plain(Simulator::default().output_probability(c, 0)?))
    }
}

// ---------------------------------------------------------------------------
// Feynman paths
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum PathOp {
    /// Output bit drawn uniformly; weight `2 * U[out][in]`.
    Branch { qubit: usize, matrix: [Complex64; 4] },
    /// Output bit fixed by the target; weight `U[out][in]`.
    Forced { qubit: usize, matrix: [Complex64; 4], out: u64 },
    Flip(usize),
    Phase(u64),
}

/// Gate-level transition program for paths ending at a fixed string.
///
/// The last single-qubit unitary on each qubit is forced so that the path
/// reaches the target; every earlier one branches uniformly. X and CZ act
/// deterministically on basis states.
#[derive(Debug, Clone)]
pub struct PathPlan {
    ops: Vec<PathOp>,
    target: u64,
    branches: usize,
    forced: usize,
}

impl PathPlan {
    pub fn new(c: &Circuit, target: u64) -> Self {
        let n = c.n();
        let gates: Vec<&Gate> = c.layers().iter().flat_map(|l| l.gates()).collect();
        // walk backwards tracking how later X gates relabel the target bits
        let mut required = target;
        let mut forced_seen = 0u64;
        let mut ops = Vec::with_capacity(gates.len());
        let (mut branches, mut forced) = (0, 0);
        for gate in gates.iter().rev() {
            let op = match **gate {
                Gate::X(q) => {
                    required ^= 1 << q;
                    PathOp::Flip(q)
                }
                Gate::Cz(a, b) => PathOp::Phase((1 << a) | (1 << b)),
                Gate::Unitary { qubit, matrix } => {
                    if forced_seen >> qubit & 1 == 0 {
                        forced_seen |= 1 << qubit;
                        forced += 1;
                        PathOp::Forced { qubit, matrix, out: required >> qubit & 1 }
                    } else {
                        branches += 1;
                        PathOp::Branch { qubit, matrix }
                    }
                }
            };
            ops.push(op);
        }
        ops.reverse();
        debug_assert!(forced <= n);
        Self { ops, target, branches, forced }
    }

    /// Number of uniformly branched gates; there are `2^branches` paths.
    pub fn branches(&self) -> usize {
        self.branches
    }

    /// Contribution of the path selected by the branch bits in `choices`
    /// (bit `j` is the output of the `j`-th branching gate).
    pub fn contribution(&self, mut choices: impl FnMut() -> u64) -> Complex64 {
        let mut state = 0u64;
        let mut weight = Complex64::new(1.0, 0.0);
        for op in &self.ops {
            match *op {
                PathOp::Branch { qubit, ref matrix } => {
                    let input = state >> qubit & 1;
                    let out = choices() & 1;
                    weight *= matrix[(out * 2 + input) as usize] * 2.0;
                    state = (state & !(1 << qubit)) | (out << qubit);
                }
                PathOp::Forced { qubit, ref matrix, out } => {
                    let input = state >> qubit & 1;
                    weight *= matrix[(out * 2 + input) as usize];
                    state = (state & !(1 << qubit)) | (out << qubit);
                }
                PathOp::Flip(q) => state ^= 1 << q,
                PathOp::Phase(mask) => {
                    if state & mask == mask {
                        weight = -weight;
                    }
                }
            }
        }
        if state == self.target {
            weight
        } else {
            ZERO
        }
    }

    /// Ensemble-average path variance `E|c|^2 - E|a|^2` for Haar single-qubit
    /// gates (`E|U_ij|^2 = 1/2`), assuming `E|a|^2 = 2^-n`. Zero when there
    /// is a single path.
    pub fn haar_path_variance(&self, n: usize) -> f64 {
        if self.branches == 0 {
            return 0.0;
        }
        let second_moment = pow2(self.branches as i32 - self.forced as i32);
        (second_moment - inv_pow2(n)).max(0.0)
    }
}

/// Mean and spread of sampled path contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAmplitude {
    /// Unbiased estimate of `<target|C|0^n>`.
    pub mean: Complex64,
    /// Unbiased sample variance `sum |c_j - mean|^2 / (paths - 1)`; zero for one path.
    pub sample_variance: f64,
    pub paths: usize,
}

/// Average of `paths` uniformly sampled paths from `0^n` to `target`.
pub fn feynman_path_amplitude(c: &Circuit, target: u64, paths: usize, rng: &mut StreamRng) -> PathAmplitude {
    let plan = PathPlan::new(c, target);
    sample_paths(&plan, paths, rng)
}

fn sample_paths(plan: &PathPlan, paths: usize, rng: &mut StreamRng) -> PathAmplitude {
    let paths = paths.max(1);
    let mut contributions = Vec::with_capacity(paths);
    for _ in 0..paths {
        let mut bits = 0u64;
        let mut left = 0u32;
        let c = plan.contribution(|| {
            if left == 0 {
                bits = rng.next_u64();
                left = 64;
            }
            let b = bits & 1;
            bits >>= 1;
            left -= 1;
            b
        });
        contributions.push(c);
    }
    let (re, im): (KahanSum, KahanSum) =
        (contributions.iter().map(|c| c.re).collect(), contributions.iter().map(|c| c.im).collect());
    let mean = Complex64::new(re.total(), im.total()) / paths as f64;
    let sample_variance = if paths > 1 {
        contributions.iter().map(|c| (c - mean).norm_sqr()).collect::<KahanSum>().total() / (paths - 1) as f64
    } else {
        0.0
    };
    PathAmplitude { mean, sample_variance, paths }
}

/// How a sampled amplitude becomes a probability estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathProbability {
    /// `|a|^2`; biased upward by the path variance over `paths`.
    Raw,
    /// `|a|^2 - s^2 / paths`; unbiased for `p0`.
    BiasCorrected,
    /// `2^-n + lambda (q - 2^-n)` with `q` the bias-corrected value and
    /// `lambda = v0 / (v0 + V)`, where `v0 = 4^-n` is the Porter–Thomas
    /// variance of `p0` and `V` the Haar-ensemble variance of `q`. This is the
    /// MSE-optimal linear shrinkage towards the trivial guess.
    #[default]
    Shrunk,
}

#[derive(Debug, Clone, Copy)]
pub struct FeynmanPathEstimator {
    pub paths: usize,
    pub mode: PathProbability,
}

impl FeynmanPathEstimator {
    pub fn new(paths: usize) -> Self {
        Self { paths, mode: PathProbability::default() }
    }

    pub fn with_mode(mut self, mode: PathProbability) -> Self {
        self.mode = mode;
        self
    }

    fn probability(&self, plan: &PathPlan, n: usize, amp: &PathAmplitude) -> f64 {
        let raw = amp.mean.norm_sqr();
        let corrected = raw - amp.sample_variance / amp.paths as f64;
        match self.mode {
            PathProbability::Raw => raw,
            PathProbability::BiasCorrected => corrected,
            PathProbability::Shrunk => {
                let t = inv_pow2(n);
                let v0 = t * t;
                let per_mean = plan.haar_path_variance(n) / amp.paths as f64;
                let noise = 2.0 * t * per_mean + per_mean * per_mean;
                let lambda = v0 / (v0 + noise);
                t + lambda * (corrected - t)
            }
        }
    }
}

impl ProbabilityEstimator for FeynmanPathEstimator {
    fn name(&self) -> &str {
        "paths"
    }

    fn estimate(&self, c: &Circuit, rng: &mut StreamRng) -> Result<Estimate> {
        if self.paths == 0 {
            return Err(domain!("path count must be at least 1"));
        }
        let plan = PathPlan::new(c, 0);
        let amp = sample_paths(&plan, self.paths, rng);
        Ok(Estimate::plain(self.probability(&plan, c.n(), &amp)))
    }
}

/// Probability estimate for `0^n` from `paths` random Feynman paths, using
/// the default [`PathProbability`] conversion.
pub fn feynman_path_estimator(c: &Circuit, paths: usize, seed: u64) -> Result<f64> {
    let mut rng = rng::seeded(seed);
    Ok(FeynmanPathEstimator::new(paths).estimate(c, &mut rng)?.p)
}

// ---------------------------------------------------------------------------
// Reduction from XHOG
// ---------------------------------------------------------------------------

/// A (claimed) XHOG solver: `k` distinct strings for a circuit.
pub trait XhogSolver: Sync {
    fn name(&self) -> &str;
    fn k(&self) -> usize;
    fn solve(&self, c: &Circuit, rng: &mut StreamRng) -> Result<SampleSet>;
}

/// Outputs the `k` most likely strings, computed by full simulation.
#[derive(Debug, Clone, Copy)]
pub struct TopKSolver {
    pub k: usize,
}

impl XhogSolver for TopKSolver {
    fn name(&self) -> &str {
        "topk"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn solve(&self, c: &Circuit, _rng: &mut StreamRng) -> Result<SampleSet> {
        top_k_from(&Simulator::default().full_distribution(c)?, self.k)
    }
}

/// `k` distinct uniformly random strings, ignoring the circuit.
#[derive(Debug, Clone, Copy)]
pub struct UniformSolver {
    pub k: usize,
}

impl XhogSolver for UniformSolver {
    fn name(&self) -> &str {
        "uniform"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn solve(&self, c: &Circuit, rng: &mut StreamRng) -> Result<SampleSet> {
        sample_uniform(c.n(), self.k, rng.next_u64(), true)
    }
}

/// `k` distinct samples from the depolarizing mixture.
#[derive(Debug, Clone, Copy)]
pub struct DepolarizingSolver {
    pub k: usize,
    pub noise: NoiseModel,
}

impl XhogSolver for DepolarizingSolver {
    fn name(&self) -> &str {
        "depolarizing"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn solve(&self, c: &Circuit, rng: &mut StreamRng) -> Result<SampleSet> {
        let dist = Simulator::default().full_distribution(c)?;
        crate::samplers::sample_depolarizing_from(&dist, self.noise, self.k, rng.next_u64(), true)
    }
}

/// Everything one run of the reduction produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionOutcome {
    /// The estimate: `b 2^-n` on a hit, `2^-n` otherwise.
    pub p: f64,
    /// Hidden string; the solver saw `C' = C` followed by X on the bits of `z`.
    pub z: u64,
    /// `None` when the solver returned an error.
    pub samples: Option<SampleSet>,
    pub hit: bool,
    /// XHOG verdict on `C'` at level `b`; `None` when not checked.
    pub solver_success: Option<bool>,
}

fn run_reduction<S: XhogSolver + ?Sized>(
    c: &Circuit,
    solver: &S,
    b: f64,
    rng: &mut StreamRng,
    check_success: bool,
) -> Result<ReductionOutcome> {
    let n = c.n();
    let z = rng::uniform_bits(rng, n);
    let primed = append_not_mask(c, z)?;
    let t = inv_pow2(n);
    let samples = solver.solve(&primed, rng).ok().filter(|s| s.n() == n);
    let Some(samples) = samples else {
        return Ok(ReductionOutcome { p: t, z, samples: None, hit: false, solver_success: Some(false) });
    };
    let hit = samples.contains(z);
    let solver_success = if check_success {
        // P_{C'}(y) = P_C(y ^ z), so score the unmasked samples against C.
        let dist = Simulator::default().full_distribution(c)?;
        Some(check_xhog_from(&dist, &samples.xor_all(z), b, c.seed())?.xhog_pass)
    } else {
        None
    };
    let p = if hit { b * t } else { t };
    Ok(ReductionOutcome { p, z, samples: Some(samples), hit, solver_success })
}

/// One run of the reduction on `c` with randomness from `seed`.
pub fn reduction_estimator<S: XhogSolver + ?Sized>(c: &Circuit, solver: &S, b: f64, seed: u64) -> Result<ReductionOutcome> {
    let mut rng = rng::seeded(seed);
    run_reduction(c, solver, b, &mut rng, true)
}

/// [`ProbabilityEstimator`] wrapper around the reduction.
pub struct ReductionEstimator<S> {
    pub solver: S,
    pub b: f64,
    /// Score the solver's output against XHOG for diagnostics (one extra simulation).
    pub check_success: bool,
}

impl<S: XhogSolver> ReductionEstimator<S> {
    pub fn new(solver: S, b: f64) -> Self {
        Self { solver, b, check_success: true }
    }
}

impl<S: XhogSolver> ProbabilityEstimator for ReductionEstimator<S> {
    fn name(&self) -> &str {
        "reduction"
    }

    fn estimate(&self, c: &Circuit, rng: &mut StreamRng) -> Result<Estimate> {
        let outcome = run_reduction(c, &self.solver, self.b, rng, self.check_success)?;
        Ok(Estimate { p: outcome.p, hit: Some(outcome.hit), solver_success: outcome.solver_success })
    }
}

// ---------------------------------------------------------------------------
// Benchmark
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct MseBenchmark {
    pub n: usize,
    pub trials: Vec<EstimatorTrial>,
    pub mean_gain: f64,
    /// Standard error of `mean_gain`.
    pub standard_error: f64,
    /// `mean_gain * 2^3n`.
    pub scaled_gain: f64,
    pub scaled_standard_error: f64,
}

impl MseBenchmark {
    pub fn from_trials(n: usize, trials: Vec<EstimatorTrial>) -> Self {
        let gains: Vec<f64> = trials.iter().map(|t| t.gain).collect();
        let (mean_gain, standard_error) = mean_and_se(&gains);
        let scale = pow2(3 * n as i32);
        Self {
            n,
            trials,
            mean_gain,
            standard_error,
            scaled_gain: mean_gain * scale,
            scaled_standard_error: standard_error * scale,
        }
    }

    /// `E[(p0 - p)^2]`.
    pub fn mse_estimator(&self) -> f64 {
        let sum: KahanSum = self.trials.iter().map(|t| (t.p0 - t.p) * (t.p0 - t.p)).collect();
        sum.total() / self.trials.len() as f64
    }

    /// `E[(p0 - 2^-n)^2]` over the same circuits.
    pub fn mse_trivial(&self) -> f64 {
        let t = inv_pow2(self.n);
        let sum: KahanSum = self.trials.iter().map(|tr| (tr.p0 - t) * (tr.p0 - t)).collect();
        sum.total() / self.trials.len() as f64
    }

    /// Fraction of trials whose hidden string was hit (reduction only).
    pub fn hit_rate(&self) -> Option<f64> {
        rate(self.trials.iter().map(|t| t.hit))
    }

    /// Measured XHOG success probability `s` of the solver (reduction only).
    pub fn success_rate(&self) -> Option<f64> {
        rate(self.trials.iter().map(|t| t.solver_success))
    }

    /// Mean and standard error of `X * 4^n` over trials selected by `keep`.
    pub fn conditional_gain_4n(&self, keep: impl Fn(&EstimatorTrial) -> bool) -> Option<(f64, f64, usize)> {
        let scale = pow2(2 * self.n as i32);
        let xs: Vec<f64> = self.trials.iter().filter(|t| keep(t)).map(|t| t.gain * scale).collect();
        if xs.is_empty() {
            return None;
        }
        let (m, se) = mean_and_se(&xs);
        Some((m, se, xs.len()))
    }
}

fn rate(flags: impl Iterator<Item = Option<bool>>) -> Option<f64> {
    let (mut yes, mut total) = (0usize, 0usize);
    for flag in flags {
        let flag = flag?;
        total += 1;
        yes += flag as usize;
    }
    (total > 0).then(|| yes as f64 / total as f64)
}

fn run_trial<E: ProbabilityEstimator + ?Sized>(
    dist: &CircuitDistribution,
    estimator: &E,
    seed: u64,
    index: u64,
) -> Result<EstimatorTrial> {
    let mut rng = rng::stream(seed, index);
    let circuit_seed = rng.next_u64();
    let c = sample_circuit(dist, circuit_seed)?;
    let p0 = Simulator::default().output_probability(&c, 0)?;
    let estimate = estimator.estimate(&c, &mut rng)?;
    Ok(EstimatorTrial::new(circuit_seed, dist.n, p0, &estimate))
}

/// Runs `trials` independent circuits from `dist` through `estimator`.
///
/// Trial `i` uses stream `i` of `seed`, so the result does not depend on how
/// trials are scheduled across threads.
pub fn run_mse_benchmark<E: ProbabilityEstimator + ?Sized>(
    dist: &CircuitDistribution,
    estimator: &E,
    trials: usize,
    seed: u64,
) -> Result<MseBenchmark> {
    dist.validate()?;
    if trials < 2 {
        return Err(domain!("a benchmark needs at least 2 trials, got {trials}"));
    }
    let records = map_indexed(trials as u64, |i| run_trial(dist, estimator, seed, i))?;
    Ok(MseBenchmark::from_trials(dist.n, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Layer, Topology};
    use crate::simulator::simulate;

    /// Sum over every branch assignment; independent of the random sampler.
    fn enumerate_paths(c: &Circuit, target: u64) -> Complex64 {
        let plan = PathPlan::new(c, target);
        let count = 1u64 << plan.branches();
        let mut total = ZERO;
        for assignment in 0..count {
            let mut bits = assignment;
            let weight = plan.contribution(|| {
                let b = bits & 1;
                bits >>= 1;
                b
            });
            total += weight / count as f64;
        }
        total
    }

    #[test]
    fn trivial_estimate_and_zero_gain() {
        let c = Circuit::identity(5).unwrap();
        assert_eq!(trivial_estimator(&c), 1.0 / 32.0);
        for p0 in [0.0, 0.01, 0.5, 1.0] {
            assert_eq!(gain(p0, 1.0 / 32.0, 5), 0.0);
        }
    }

    #[test]
    fn single_path_on_identity_is_exact() {
        let c = Circuit::identity(3).unwrap();
        let mut rng = rng::seeded(0);
        let amp = feynman_path_amplitude(&c, 0, 1, &mut rng);
        assert_eq!(amp.mean, Complex64::new(1.0, 0.0));
        assert_eq!(feynman_path_estimator(&c, 1, 0).unwrap(), 1.0);
    }

    #[test]
    fn one_layer_circuit_has_a_single_exact_path() {
        let c = sample_circuit(&CircuitDistribution::chain(2, 1).without_mask(), 3).unwrap();
        let plan = PathPlan::new(&c, 0);
        assert_eq!(plan.branches(), 0);
        let mut rng = rng::seeded(1);
        let amp = feynman_path_amplitude(&c, 0, 1, &mut rng);
        assert!((amp.mean - simulate(&c).unwrap().amplitude(0)).norm() < 1e-14);
    }

    #[test]
    fn exhaustive_paths_equal_simulated_amplitudes() {
        for (n, depth) in [(2, 3), (2, 5), (3, 5), (4, 3)] {
            for seed in 0..5 {
                let c = sample_circuit(&CircuitDistribution::chain(n, depth), seed).unwrap();
                let state = simulate(&c).unwrap();
                for target in 0..(1u64 << n) {
                    let got = enumerate_paths(&c, target);
                    assert!((got - state.amplitude(target)).norm() < 1e-12, "n={n} d={depth} z={target}");
                }
            }
        }
    }

    #[test]
    fn qubits_without_unitaries_are_deterministic() {
        // X on qubit 1 only: amplitude at 0b10 is 1, at 0 is 0.
        let layers = alloc::vec![Layer::new(alloc::vec![Gate::X(1)])];
        let c = Circuit::new(2, 0, layers).unwrap();
        assert_eq!(enumerate_paths(&c, 0b10), Complex64::new(1.0, 0.0));
        assert_eq!(enumerate_paths(&c, 0), ZERO);
    }

    #[test]
    fn path_estimator_is_unbiased() {
        let c = sample_circuit(&CircuitDistribution::chain(4, 3), 21).unwrap();
        let exact = simulate(&c).unwrap().amplitude(0);
        let mut rng = rng::seeded(77);
        let amp = feynman_path_amplitude(&c, 0, 1_000_000, &mut rng);
        assert!((amp.mean - exact).norm() < 1e-2, "{} vs {}", amp.mean, exact);
    }

    #[test]
    fn reduction_misses_give_the_trivial_estimate() {
        let dist = CircuitDistribution::chain(6, 6);
        let solver = UniformSolver { k: 3 };
        for seed in 0..200 {
            let c = sample_circuit(&dist, seed).unwrap();
            let outcome = reduction_estimator(&c, &solver, 1.5, seed).unwrap();
            let t = inv_pow2(6);
            if outcome.hit {
                assert_eq!(outcome.p, 1.5 * t);
            } else {
                assert_eq!(outcome.p, t);
                assert_eq!(gain(0.3, outcome.p, 6), 0.0);
            }
            assert_eq!(outcome.samples.as_ref().unwrap().k(), 3);
        }
    }

    #[test]
    fn masked_circuit_hides_p0_at_z() {
        let c = sample_circuit(&CircuitDistribution::chain(5, 6), 4).unwrap();
        let outcome = reduction_estimator(&c, &TopKSolver { k: 2 }, 1.5, 9).unwrap();
        let primed = append_not_mask(&c, outcome.z).unwrap();
        let a = simulate(&primed).unwrap().amplitude(outcome.z);
        assert!((a - simulate(&c).unwrap().amplitude(0)).norm() < 1e-13);
    }

    #[test]
    fn failing_solver_is_scored_as_failure() {
        struct Broken;
        impl XhogSolver for Broken {
            fn name(&self) -> &str {
                "broken"
            }
            fn k(&self) -> usize {
                1
            }
            fn solve(&self, _c: &Circuit, _rng: &mut StreamRng) -> Result<SampleSet> {
                Err(domain!("no output"))
            }
        }
        let c = Circuit::identity(3).unwrap();
        let outcome = reduction_estimator(&c, &Broken, 1.5, 0).unwrap();
        assert_eq!(outcome.p, 1.0 / 8.0);
        assert_eq!(outcome.solver_success, Some(false));
        assert!(!outcome.hit);
    }

    #[test]
    fn trivial_benchmark_has_exactly_zero_gain() {
        let dist = CircuitDistribution::chain(5, 6);
        let bench = run_mse_benchmark(&dist, &TrivialEstimator, 50, 1).unwrap();
        assert_eq!(bench.mean_gain, 0.0);
        assert_eq!(bench.scaled_gain, 0.0);
        assert!(bench.trials.iter().all(|t| t.gain == 0.0));
    }

    #[test]
    fn benchmark_is_deterministic_and_consistent() {
        let dist = CircuitDistribution::chain(4, 5);
        let est = FeynmanPathEstimator::new(8);
        let a = run_mse_benchmark(&dist, &est, 64, 3).unwrap();
        let b = run_mse_benchmark(&dist, &est, 64, 3).unwrap();
        assert_eq!(a, b);
        let identity = a.mse_trivial() - a.mean_gain;
        assert!((identity - a.mse_estimator()).abs() <= 1e-12 * a.mse_trivial().max(a.mse_estimator()));
        for t in &a.trials {
            assert_eq!(t.gain, gain(t.p0, t.p, 4));
        }
    }

    #[test]
    fn exact_estimator_gains_the_trivial_mse() {
        let dist = CircuitDistribution { n: 6, depth: 12, topology: Topology::Grid2D { rows: 2, cols: 3 }, final_not_mask_layer: true };
        let bench = run_mse_benchmark(&dist, &ExactEstimator, 400, 5).unwrap();
        assert!(bench.mse_estimator() == 0.0);
        assert!((bench.mean_gain - bench.mse_trivial()).abs() < 1e-18);
        // Porter–Thomas: E[(p0 - 2^-n)^2] ~ 4^-n, so scaled_gain ~ 2^n
        let ratio = bench.scaled_gain / 64.0;
        assert!(ratio > 0.7 && ratio < 1.3, "ratio {ratio}");
    }

    #[test]
    fn too_few_trials_is_rejected() {
        assert!(run_mse_benchmark(&CircuitDistribution::chain(3, 2), &TrivialEstimator, 1, 0).is_err());
    }
}
