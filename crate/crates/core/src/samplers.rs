//! Device models and spoofers that produce [`SampleSet`]s.
//!
//! All samplers read the exact output distribution; they generate ground
//! truth for experiments and make no attempt to be classically cheap.
//! Distinct sets are produced by rejecting and redrawing duplicates.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::circuit::Circuit;
use crate::error::{argument, Result};
use crate::rng::{self, StreamRng};
use crate::simulator::{OutputDistribution, Simulator};

/// `k >= 1` bitstrings over `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    n: usize,
    samples: Vec<u64>,
    distinct: bool,
}

impl SampleSet {
    /// When `distinct` is set, the strings must be pairwise different.
    pub fn new(n: usize, samples: Vec<u64>, distinct: bool) -> Result<Self> {
        if samples.is_empty() {
            return Err(argument!("a sample set needs at least one sample"));
        }
        if n == 0 || n > 63 {
            return Err(argument!("qubit count must be in 1..=63, got {n}"));
        }
        if let Some(z) = samples.iter().find(|&&z| z >> n != 0) {
            return Err(argument!("sample {z:#b} has more than {n} bits"));
        }
        if distinct && !all_distinct(&samples) {
            return Err(argument!("sample set is flagged distinct but contains duplicates"));
        }
        Ok(Self { n, samples, distinct })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[u64] {
        &self.samples
    }

    /// Whether deduplication was enforced when the set was drawn.
    pub fn distinct(&self) -> bool {
        self.distinct
    }

    /// Whether the strings are pairwise different, regardless of the flag.
    pub fn is_pairwise_distinct(&self) -> bool {
        self.distinct || all_distinct(&self.samples)
    }

    pub fn contains(&self, z: u64) -> bool {
        self.samples.contains(&z)
    }

    /// Every sample XORed with `z`.
    pub fn xor_all(&self, z: u64) -> Self {
        Self { n: self.n, samples: self.samples.iter().map(|s| s ^ z).collect(), distinct: self.distinct }
    }
}

fn all_distinct(samples: &[u64]) -> bool {
    let mut seen = BTreeSet::new();
    samples.iter().all(|z| seen.insert(*z))
}

/// Depolarizing mixture: ideal with probability `fidelity`, uniform otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    fidelity: f64,
}

impl NoiseModel {
    pub fn new(fidelity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(argument!("fidelity must lie in [0, 1], got {fidelity}"));
        }
        Ok(Self { fidelity })
    }

    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }
}

/// Inverse-CDF lookup over a dense distribution.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    cumulative: Vec<f64>,
    last_nonzero: usize,
}

impl InverseCdf {
    pub fn new(dist: &OutputDistribution) -> Self {
        let mut acc = 0.0;
        let cumulative = dist
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_nonzero = dist.probs().iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Self { cumulative, last_nonzero }
    }

    pub fn draw(&self, rng: &mut StreamRng) -> u64 {
        let total = self.cumulative[self.cumulative.len() - 1];
        let u = rng::unit_f64(rng) * total;
        let index = self.cumulative.partition_point(|&c| c <= u);
        index.min(self.last_nonzero) as u64
    }
}

fn collect_samples(
    n: usize,
    k: usize,
    distinct: bool,
    mut draw: impl FnMut() -> u64,
) -> Result<SampleSet> {
    let mut samples = Vec::with_capacity(k);
    if distinct {
        let mut seen = BTreeSet::new();
        while samples.len() < k {
            let z = draw();
            if seen.insert(z) {
                samples.push(z);
            }
        }
    } else {
        samples.extend((0..k).map(|_| draw()));
    }
    SampleSet::new(n, samples, distinct)
}

fn check_k(k: usize, available: usize, distinct: bool) -> Result<()> {
    if k == 0 {
        return Err(argument!("k must be at least 1"));
    }
    if distinct && k > available {
        return Err(argument!("cannot draw {k} distinct samples from {available} reachable strings"));
    }
    Ok(())
}

/// `k` draws from the exact output distribution of `c`.
pub fn sample_ideal(c: &Circuit, k: usize, seed: u64, distinct: bool) -> Result<SampleSet> {
    let dist = Simulator::default().full_distribution(c)?;
    sample_ideal_from(&dist, k, seed, distinct)
}

pub fn sample_ideal_from(dist: &OutputDistribution, k: usize, seed: u64, distinct: bool) -> Result<SampleSet> {
    check_k(k, dist.support_size(), distinct)?;
    let table = InverseCdf::new(dist);
    let mut rng = rng::seeded(seed);
    collect_samples(dist.n(), k, distinct, || table.draw(&mut rng))
}

/// `k` uniformly random `n`-bit strings.
pub fn sample_uniform(n: usize, k: usize, seed: u64, distinct: bool) -> Result<SampleSet> {
    if n == 0 || n > 63 {
        return Err(argument!("qubit count must be in 1..=63, got {n}"));
    }
    check_k(k, 1usize.checked_shl(n as u32).unwrap_or(usize::MAX), distinct)?;
    let mut rng = rng::seeded(seed);
    collect_samples(n, k, distinct, || rng::uniform_bits(&mut rng, n))
}

/// Each sample is ideal with probability `noise.fidelity()`, else uniform.
///
/// With fidelity exactly 1 (or 0) no mixing coin is drawn, so the output is
/// identical to [`sample_ideal`] (or [`sample_uniform`]) for the same seed.
pub fn sample_depolarizing(c: &Circuit, noise: NoiseModel, k: usize, seed: u64, distinct: bool) -> Result<SampleSet> {
    let dist = Simulator::default().full_distribution(c)?;
    sample_depolarizing_from(&dist, noise, k, seed, distinct)
}

pub fn sample_depolarizing_from(
    dist: &OutputDistribution,
    noise: NoiseModel,
    k: usize,
    seed: u64,
    distinct: bool,
) -> Result<SampleSet> {
    let n = dist.n();
    let phi = noise.fidelity();
    let reachable = if phi < 1.0 { 1usize << n } else { dist.support_size() };
    check_k(k, reachable, distinct)?;
    let table = InverseCdf::new(dist);
    let mut rng = rng::seeded(seed);
    collect_samples(n, k, distinct, || {
        let ideal = if phi >= 1.0 {
            true
        } else if phi <= 0.0 {
            false
        } else {
            rng::unit_f64(&mut rng) < phi
        };
        if ideal {
            table.draw(&mut rng)
        } else {
            rng::uniform_bits(&mut rng, n)
        }
    })
}

/// The `k` most likely strings of `c`, most likely first, ties by index.
pub fn sample_top_k(c: &Circuit, k: usize) -> Result<SampleSet> {
    let dist = Simulator::default().full_distribution(c)?;
    top_k_from(&dist, k)
}

pub fn top_k_from(dist: &OutputDistribution, k: usize) -> Result<SampleSet> {
    let probs = dist.probs();
    check_k(k, probs.len(), true)?;
    let by_weight = |a: &u64, b: &u64| probs[*b as usize].total_cmp(&probs[*a as usize]).then(a.cmp(b));
    let mut order: Vec<u64> = (0..probs.len() as u64).collect();
    if k < order.len() {
        order.select_nth_unstable_by(k - 1, by_weight);
        order.truncate(k);
    }
    order.sort_unstable_by(by_weight);
    SampleSet::new(dist.n(), order, true)
}
