//! Statistical checks of the distributional claims behind Linear XEB.
//!
//! * Porter–Thomas: rescaled output probabilities `x = 2^n P(z)` of deep
//!   random circuits should look Exp(1); measured with a KS distance.
//! * Depolarizing moments: with fidelity `phi`, `E[Y] 2^n = 1 + phi` and
//!   `Var(Y) 4^n = 1 + 2 phi - phi^2`.
//! * Uniform vs XHOG-level samples: the single-sample KL divergence
//!   `int_0^inf e^-x g(x) ln g(x) dx`, `g(x) = b (x - 1) - x + 2`, its
//!   `(b - 1)^2 / 2` expansion, the Pinsker bound `sqrt(k (b - 1)^2 / 4)` and
//!   a Monte Carlo likelihood-ratio distinguisher to compare against it.
//!
//! `g(x) e^-x` is the density of `x` when samples come from a depolarizing
//! device with fidelity `b - 1`; `e^-x` is the density for uniform samples.
//! The integral is therefore the divergence of the XHOG-level law from the
//! uniform one.

pub mod ks;
pub mod quadrature;

use alloc::vec::Vec;

use rand::RngCore;

use crate::circuit::{sample_circuit, CircuitDistribution};
use crate::error::{domain, Result};
use crate::math::{mean_and_se, pow2};
use crate::parallel::map_indexed;
use crate::rng;
use crate::samplers::{sample_depolarizing_from, InverseCdf, NoiseModel};
use crate::simulator::Simulator;

pub use ks::{ks_statistic, ks_statistic_exp1};
pub use quadrature::{integrate, Quadrature};

/// KS threshold for the Porter–Thomas fit. A convention, sized for about
/// 10^5 pooled values where sampling noise in the distance is ~0.003.
pub const DEFAULT_KS_THRESHOLD: f64 = 0.01;

/// Upper limit of the KL integral; the integrand is below 1e-18 beyond it.
pub const KL_UPPER_LIMIT: f64 = 50.0;
pub const KL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// KS distance of the pooled rescaled probabilities from Exp(1).
    pub statistic: f64,
    pub sample_count: usize,
    pub threshold: f64,
    pub pass: bool,
}

/// `2^n P(z)` for every `z` of `circuits` circuits drawn from `dist`.
pub fn pooled_rescaled_probabilities(dist: &CircuitDistribution, circuits: usize, seed: u64) -> Result<Vec<f64>> {
    dist.validate()?;
    let sim = Simulator::default();
    sim.check_size(dist.n)?;
    let scale = pow2(dist.n as i32);
    let per_circuit = map_indexed(circuits as u64, |i| {
        let circuit_seed = rng::stream(seed, i).next_u64();
        let probs = sim.full_distribution(&sample_circuit(dist, circuit_seed)?)?;
        Ok(probs.into_probs().into_iter().map(|p| p * scale).collect::<Vec<_>>())
    })?;
    Ok(per_circuit.concat())
}

/// Pass/fail of an Exp(1) fit with the given KS threshold.
pub fn fit_exp1(mut xs: Vec<f64>, threshold: f64) -> FitReport {
    let statistic = if xs.is_empty() { 1.0 } else { ks_statistic_exp1(&mut xs) };
    FitReport { statistic, sample_count: xs.len(), threshold, pass: statistic < threshold }
}

pub fn porter_thomas_fit(dist: &CircuitDistribution, circuits: usize, seed: u64) -> Result<FitReport> {
    porter_thomas_fit_with(dist, circuits, seed, DEFAULT_KS_THRESHOLD)
}

pub fn porter_thomas_fit_with(dist: &CircuitDistribution, circuits: usize, seed: u64, threshold: f64) -> Result<FitReport> {
    Ok(fit_exp1(pooled_rescaled_probabilities(dist, circuits, seed)?, threshold))
}

/// Porter–Thomas fit at each depth, other parameters taken from `dist`.
pub fn porter_thomas_depth_sweep(
    dist: &CircuitDistribution,
    depths: &[usize],
    circuits: usize,
    seed: u64,
) -> Result<Vec<(usize, FitReport)>> {
    depths
        .iter()
        .map(|&depth| {
            let at_depth = CircuitDistribution { depth, ..*dist };
            Ok((depth, porter_thomas_fit(&at_depth, circuits, seed)?))
        })
        .collect()
}

/// Moments of `Y = P(z)` for depolarizing samples, in units of `2^-n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub fidelity: f64,
    pub circuits: usize,
    pub samples_per_circuit: usize,
    /// `E[Y] 2^n` and its standard error (circuits as independent clusters).
    pub mean: f64,
    pub mean_se: f64,
    /// `Var(Y) 4^n` and its delta-method standard error.
    pub variance: f64,
    pub variance_se: f64,
    /// `1 + phi`.
    pub expected_mean: f64,
    /// `1 + 2 phi - phi^2`.
    pub expected_variance: f64,
}

impl MomentReport {
    pub fn mean_z(&self) -> f64 {
        (self.mean - self.expected_mean) / self.mean_se
    }

    pub fn variance_z(&self) -> f64 {
        (self.variance - self.expected_variance) / self.variance_se
    }
}

/// Estimates `E[Y]` and `Var(Y)` over circuits and depolarizing samples.
pub fn xeb_moment_check(
    dist: &CircuitDistribution,
    fidelity: f64,
    circuits: usize,
    samples_per_circuit: usize,
    seed: u64,
) -> Result<MomentReport> {
    let noise = NoiseModel::new(fidelity)?;
    dist.validate()?;
    if circuits < 2 || samples_per_circuit == 0 {
        return Err(domain!("need at least 2 circuits and 1 sample per circuit"));
    }
    let sim = Simulator::default();
    let scale = pow2(dist.n as i32);
    let per_circuit = map_indexed(circuits as u64, |i| {
        let mut stream = rng::stream(seed, i);
        let c = sample_circuit(dist, stream.next_u64())?;
        let probs = sim.full_distribution(&c)?;
        let s = sample_depolarizing_from(&probs, noise, samples_per_circuit, stream.next_u64(), false)?;
        let (mut m1, mut m2) = (0.0, 0.0);
        for &z in s.samples() {
            let y = probs.prob(z) * scale;
            m1 += y;
            m2 += y * y;
        }
        let k = samples_per_circuit as f64;
        Ok((m1 / k, m2 / k))
    })?;
    let firsts: Vec<f64> = per_circuit.iter().map(|m| m.0).collect();
    let seconds: Vec<f64> = per_circuit.iter().map(|m| m.1).collect();
    let (mean, mean_se) = mean_and_se(&firsts);
    let (second, _) = mean_and_se(&seconds);
    // d Var = d m2 - 2 m1 d m1
    let linearized: Vec<f64> = per_circuit.iter().map(|&(a, b)| b - 2.0 * mean * a).collect();
    let (_, variance_se) = mean_and_se(&linearized);
    Ok(MomentReport {
        fidelity,
        circuits,
        samples_per_circuit,
        mean,
        mean_se,
        variance: second - mean * mean,
        variance_se,
        expected_mean: 1.0 + fidelity,
        expected_variance: 1.0 + 2.0 * fidelity - fidelity * fidelity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub b: f64,
    /// Single-sample KL divergence in nats.
    pub kl: f64,
    pub quadrature_error: f64,
    /// `(b - 1)^2 / 2`.
    pub taylor_approx: f64,
    pub k: u64,
    /// Pinsker bound on total variation for `k` samples, `sqrt(k (b - 1)^2 / 4)`.
    pub tv_bound: f64,
}

fn xhog_density_ratio(b: f64, x: f64) -> f64 {
    b * (x - 1.0) - x + 2.0
}

/// The KL integrand `e^-x g ln g`, with `0 ln 0 = 0`.
pub fn kl_integrand(b: f64, x: f64) -> f64 {
    let g = xhog_density_ratio(b, x);
    if g <= 0.0 {
        0.0
    } else {
        libm::exp(-x) * g * libm::log(g)
    }
}

/// Pinsker bound on total variation after `k` samples.
pub fn pinsker_tv_bound(b: f64, k: u64) -> f64 {
    libm::sqrt(k as f64 * (b - 1.0) * (b - 1.0) / 4.0)
}

/// KL divergence between XHOG-level and uniform sample values, `1 <= b <= 2`.
pub fn kl_uniform_vs_xhog(b: f64, k: u64) -> Result<DivergenceReport> {
    if !(1.0..=2.0).contains(&b) {
        return Err(domain!("b must lie in [1, 2] for the log argument to stay positive, got {b}"));
    }
    let q = integrate(|x| kl_integrand(b, x), 0.0, KL_UPPER_LIMIT, KL_TOLERANCE);
    Ok(DivergenceReport {
        b,
        kl: q.value.max(0.0),
        quadrature_error: q.error,
        taylor_approx: (b - 1.0) * (b - 1.0) / 2.0,
        k,
        tv_bound: pinsker_tv_bound(b, k),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishabilityReport {
    pub b: f64,
    pub k: usize,
    pub trials: usize,
    /// `Pr[accept | XHOG-level] - Pr[accept | uniform]` of the likelihood-ratio test.
    pub advantage: f64,
    pub standard_error: f64,
    pub tv_bound: f64,
}

/// Monte Carlo advantage of the Porter–Thomas likelihood-ratio test at
/// telling `k` uniform samples from `k` samples of a device at XHOG level `b`
/// (a depolarizing mixture with fidelity `b - 1`), seeing only `2^n P(z_i)`.
///
/// Both sample sets in a trial share the circuit and the uniform draws; the
/// XHOG-level set replaces each uniform draw by an ideal one with probability
/// `b - 1`. The coupling leaves each marginal law intact and removes most of
/// the between-arm noise from the advantage estimate.
pub fn empirical_distinguishability(
    dist: &CircuitDistribution,
    b: f64,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<DistinguishabilityReport> {
    if !(1.0..=2.0).contains(&b) {
        return Err(domain!("b must lie in [1, 2], got {b}"));
    }
    if k == 0 || trials < 2 {
        return Err(domain!("need k >= 1 and at least 2 trials"));
    }
    dist.validate()?;
    let sim = Simulator::default();
    let n = dist.n;
    let scale = pow2(n as i32);
    let phi = b - 1.0;
    let log_ratio = |x: f64| libm::log(xhog_density_ratio(b, x).max(f64::MIN_POSITIVE));
    let outcomes = map_indexed(trials as u64, |i| {
        let mut stream = rng::stream(seed, i);
        let probs = sim.full_distribution(&sample_circuit(dist, stream.next_u64())?)?;
        let table = InverseCdf::new(&probs);
        let (mut llr_uniform, mut llr_xhog) = (0.0, 0.0);
        for _ in 0..k {
            let u = rng::uniform_bits(&mut stream, n);
            let coin = rng::unit_f64(&mut stream);
            let x_uniform = probs.prob(u) * scale;
            llr_uniform += log_ratio(x_uniform);
            llr_xhog += if coin < phi { log_ratio(probs.prob(table.draw(&mut stream)) * scale) } else { log_ratio(x_uniform) };
        }
        Ok((llr_xhog > 0.0) as i32 as f64 - (llr_uniform > 0.0) as i32 as f64)
    })?;
    let (advantage, standard_error) = mean_and_se(&outcomes);
    Ok(DistinguishabilityReport { b, k, trials, advantage, standard_error, tv_bound: pinsker_tv_bound(b, k as u64) })
}
