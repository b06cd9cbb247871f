//! Dense statevector simulation.
//!
//! Amplitude `i` is the coefficient of basis state `|i>`, qubit 0 being the
//! least significant bit. Gates are applied in place: a single-qubit gate on
//! qubit `q` visits every pair `(i, i | 2^q)` once, CZ flips signs and X swaps
//! pairs. With the `std` feature, large states are split into contiguous
//! chunks whose length is a multiple of `2^(q+1)` and processed in parallel.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, Layer};
use crate::error::{argument, Error, Result};
use crate::math::{KahanSum, ONE, ZERO};

pub const DEFAULT_MAX_QUBITS: usize = 22;

#[cfg(feature = "std")]
const PARALLEL_MIN_QUBITS: usize = 14;
#[cfg(feature = "std")]
const PARALLEL_CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0^n>`.
    pub fn zero_state(n: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Self { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, z: u64) -> Complex64 {
        self.amps[z as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).collect::<KahanSum>().total()
    }

    pub fn probabilities(&self) -> OutputDistribution {
        OutputDistribution { n: self.n, probs: self.amps.iter().map(|a| a.norm_sqr()).collect() }
    }

    /// The state with amplitude `i` moved to index `i ^ z`.
    pub fn permuted_xor(&self, z: u64) -> Self {
        let z = z as usize;
        let amps = (0..self.amps.len()).map(|i| self.amps[i ^ z]).collect();
        Self { n: self.n, amps }
    }

    pub fn apply_layer(&mut self, layer: &Layer) {
        for gate in layer.gates() {
            self.apply_gate(gate);
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        match *gate {
            Gate::Unitary { qubit, ref matrix } => {
                let m = *matrix;
                self.for_each_pair(qubit, move |lo, hi| {
                    let (a, b) = (*lo, *hi);
                    *lo = m[0] * a + m[1] * b;
                    *hi = m[2] * a + m[3] * b;
                });
            }
            Gate::X(qubit) => self.for_each_pair(qubit, |lo, hi| core::mem::swap(lo, hi)),
            Gate::Cz(a, b) => {
                let mask = (1usize << a) | (1usize << b);
                self.for_each_chunk(mask.max(1) << 1, move |offset, chunk| {
                    for (i, amp) in chunk.iter_mut().enumerate() {
                        if (offset + i) & mask == mask {
                            *amp = -*amp;
                        }
                    }
                });
            }
        }
    }

    /// Calls `f(lo, hi)` for every amplitude pair differing only in `qubit`.
    fn for_each_pair<F>(&mut self, qubit: usize, f: F)
    where
        F: Fn(&mut Complex64, &mut Complex64) + Send + Sync,
    {
        let stride = 1usize << qubit;
        self.for_each_chunk(stride << 1, |_, chunk| {
            for block in chunk.chunks_exact_mut(stride << 1) {
                let (lo, hi) = block.split_at_mut(stride);
                lo.iter_mut().zip(hi.iter_mut()).for_each(|(l, h)| f(l, h));
            }
        });
    }

    /// Runs `f(offset, chunk)` over contiguous chunks whose length is a
    /// multiple of `granule` (a power of two).
    fn for_each_chunk<F>(&mut self, granule: usize, f: F)
    where
        F: Fn(usize, &mut [Complex64]) + Send + Sync,
    {
        #[cfg(feature = "std")]
        if self.n >= PARALLEL_MIN_QUBITS {
            use rayon::prelude::*;
            let size = granule.max(PARALLEL_CHUNK).min(self.amps.len());
            self.amps
                .par_chunks_mut(size)
                .enumerate()
                .for_each(|(index, chunk)| f(index * size, chunk));
            return;
        }
        let _ = granule;
        f(0, &mut self.amps);
    }
}

/// Output probabilities `P(z) = |<z|C|0^n>|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl OutputDistribution {
    /// Wraps raw probabilities; `probs.len()` must be `2^n` and the entries
    /// must sum to one within 1e-9.
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n > 63 || probs.len() != 1usize << n {
            return Err(argument!("expected 2^{n} probabilities, got {}", probs.len()));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(argument!("probabilities must be nonnegative"));
        }
        let total = probs.iter().copied().collect::<KahanSum>().total();
        if libm::fabs(total - 1.0) > 1e-9 {
            return Err(argument!("probabilities sum to {total}, not 1"));
        }
        Ok(Self { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, z: u64) -> f64 {
        self.probs[z as usize]
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// Number of strings with nonzero probability.
    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }
}

/// Statevector simulator with a configurable qubit cap.
#[derive(Debug, Clone, Copy)]
pub struct Simulator {
    max_qubits: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Self { max_qubits: DEFAULT_MAX_QUBITS }
    }
}

impl Simulator {
    pub fn with_max_qubits(max_qubits: usize) -> Self {
        Self { max_qubits: max_qubits.min(40) }
    }

    pub fn max_qubits(&self) -> usize {
        self.max_qubits
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        if n > self.max_qubits {
            return Err(Error::Resource {
                qubits: n,
                max_qubits: self.max_qubits,
                bytes: 16u128 << n.min(120),
            });
        }
        Ok(())
    }

    /// `C|0^n>`.
    pub fn simulate(&self, c: &Circuit) -> Result<StateVector> {
        self.check_size(c.n())?;
        let mut state = StateVector::zero_state(c.n());
        for layer in c.layers() {
            state.apply_layer(layer);
        }
        Ok(state)
    }

    /// `<z|C|0^n>`.
    pub fn amplitude(&self, c: &Circuit, z: u64) -> Result<Complex64> {
        check_string(c.n(), z)?;
        Ok(self.simulate(c)?.amplitude(z))
    }

    pub fn output_probability(&self, c: &Circuit, z: u64) -> Result<f64> {
        Ok(self.amplitude(c, z)?.norm_sqr())
    }

    pub fn full_distribution(&self, c: &Circuit) -> Result<OutputDistribution> {
        Ok(self.simulate(c)?.probabilities())
    }
}

pub(crate) fn check_string(n: usize, z: u64) -> Result<()> {
    if n < 64 && z >> n != 0 {
        return Err(argument!("string {z:#b} has more than {n} bits"));
    }
    Ok(())
}

/// [`Simulator::simulate`] with the default qubit cap.
pub fn simulate(c: &Circuit) -> Result<StateVector> {
    Simulator::default().simulate(c)
}

pub fn amplitude(c: &Circuit, z: u64) -> Result<Complex64> {
    Simulator::default().amplitude(c, z)
}

pub fn output_probability(c: &Circuit, z: u64) -> Result<f64> {
    Simulator::default().output_probability(c, z)
}

pub fn full_distribution(c: &Circuit) -> Result<OutputDistribution> {
    Simulator::default().full_distribution(c)
}
