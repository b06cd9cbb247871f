//! Circuits, the random circuit ensemble and NOT-mask closure.
//!
//! A [`Circuit`] is an ordered list of layers acting on `n` qubits, qubit 0
//! being the least significant bit of a basis index. [`sample_circuit`] draws
//! from a [`CircuitDistribution`]: alternating layers of Haar-random
//! single-qubit unitaries and CZ gates on a rotating edge pattern, optionally
//! closed off by a uniformly random layer of X gates. Because that final mask
//! is uniform and [`append_not_mask`] folds a new mask into it by XOR, the
//! ensemble is exactly invariant under appending NOT gates.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{argument, Error, Result};
use crate::math::unitarity_defect;
use crate::rng::{self, StreamRng};

/// Tolerance on `U^dagger U - I` accepted for single-qubit gates.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Row-major 2x2 matrix `[u00, u01, u10, u11]` acting on `qubit`.
    Unitary { qubit: usize, matrix: [Complex64; 4] },
    Cz(usize, usize),
    X(usize),
}

impl Gate {
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Gate::Unitary { qubit, .. } | Gate::X(qubit) => (qubit, None),
            Gate::Cz(a, b) => (a, Some(b)),
        };
        core::iter::once(a).chain(b)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Some(q) = self.qubits().find(|&q| q >= n) {
            return Err(argument!("gate touches qubit {q} but the circuit has {n} qubits"));
        }
        match self {
            Gate::Cz(a, b) if a == b => Err(argument!("CZ needs two distinct qubits, got {a} twice")),
            Gate::Unitary { qubit, matrix } => {
                let defect = unitarity_defect(matrix);
                if defect > UNITARY_TOLERANCE {
                    Err(argument!("gate on qubit {qubit} is not unitary (defect {defect:e})"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Gates with pairwise disjoint support, applied simultaneously.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layer {
    gates: Vec<Gate>,
}

impl Layer {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self { gates }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Bitmask of the qubits flipped, if the layer consists only of X gates.
    pub fn as_not_mask(&self) -> Option<u64> {
        if self.gates.is_empty() {
            return None;
        }
        self.gates.iter().try_fold(0u64, |mask, g| match g {
            Gate::X(q) => Some(mask | 1 << q),
            _ => None,
        })
    }

    fn not_mask(mask: u64, n: usize) -> Self {
        Self::new((0..n).filter(|q| mask >> q & 1 == 1).map(Gate::X).collect())
    }
}

/// A quantum circuit on `n` qubits. Immutable once built.
///
/// Empty layers are dropped on construction, so layer positions are exactly
/// the indices written by the text format.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    seed: u64,
    layers: Vec<Layer>,
}

impl Circuit {
    /// Validates qubit ranges, per-layer disjointness and unitarity.
    pub fn new(n: usize, seed: u64, layers: Vec<Layer>) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(argument!("qubit count must be in 1..=63, got {n}"));
        }
        for (index, layer) in layers.iter().enumerate() {
            let mut seen = 0u64;
            for gate in &layer.gates {
                gate.validate(n)?;
                for q in gate.qubits() {
                    if seen >> q & 1 == 1 {
                        return Err(argument!("qubit {q} appears twice in layer {index}"));
                    }
                    seen |= 1 << q;
                }
            }
        }
        let layers = layers.into_iter().filter(|l| !l.is_empty()).collect();
        Ok(Self { n, seed, layers })
    }

    /// The circuit with no gates.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len()).sum()
    }

    /// The mask of the trailing all-X layer, if there is one.
    pub fn final_not_mask(&self) -> Option<u64> {
        self.layers.last().and_then(Layer::as_not_mask)
    }

    pub fn dimension(&self) -> usize {
        1usize << self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Chain1D,
    /// Row-major grid; qubit `r * cols + c` sits at `(r, c)`.
    Grid2D { rows: usize, cols: usize },
}

/// The circuit ensemble `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitDistribution {
    pub n: usize,
    /// Number of cycles, each a single-qubit layer followed by a CZ layer.
    /// The final NOT mask is not counted.
    pub depth: usize,
    pub topology: Topology,
    pub final_not_mask_layer: bool,
}

impl CircuitDistribution {
    pub fn chain(n: usize, depth: usize) -> Self {
        Self { n, depth, topology: Topology::Chain1D, final_not_mask_layer: true }
    }

    pub fn grid(rows: usize, cols: usize, depth: usize) -> Self {
        Self {
            n: rows * cols,
            depth,
            topology: Topology::Grid2D { rows, cols },
            final_not_mask_layer: true,
        }
    }

    pub fn without_mask(mut self) -> Self {
        self.final_not_mask_layer = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > 63 {
            return Err(Error::Config("qubit count must be in 1..=63"));
        }
        if let Topology::Grid2D { rows, cols } = self.topology {
            if rows == 0 || cols == 0 || rows.checked_mul(cols) != Some(self.n) {
                return Err(Error::Config("grid rows * cols must equal the qubit count"));
            }
        }
        Ok(())
    }

    /// Non-empty CZ edge classes, in the order they are cycled through.
    ///
    /// A chain has two classes (edges starting on even / odd sites). A grid
    /// has four: horizontal-even, vertical-even, horizontal-odd, vertical-odd.
    pub fn edge_classes(&self) -> Vec<Vec<(usize, usize)>> {
        let classes = match self.topology {
            Topology::Chain1D => {
                let class = |parity: usize| {
                    (0..self.n.saturating_sub(1))
                        .filter(|i| i % 2 == parity)
                        .map(|i| (i, i + 1))
                        .collect::<Vec<_>>()
                };
                vec![class(0), class(1)]
            }
            Topology::Grid2D { rows, cols } => {
                let at = |r: usize, c: usize| r * cols + c;
                let horizontal = |parity: usize| {
                    let mut edges = Vec::new();
                    for r in 0..rows {
                        for c in (0..cols.saturating_sub(1)).filter(|c| c % 2 == parity) {
                            edges.push((at(r, c), at(r, c + 1)));
                        }
                    }
                    edges
                };
                let vertical = |parity: usize| {
                    let mut edges = Vec::new();
                    for r in (0..rows.saturating_sub(1)).filter(|r| r % 2 == parity) {
                        for c in 0..cols {
                            edges.push((at(r, c), at(r + 1, c)));
                        }
                    }
                    edges
                };
                vec![horizontal(0), vertical(0), horizontal(1), vertical(1)]
            }
        };
        classes.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

/// Haar-random 2x2 unitary: Gram–Schmidt on two columns of complex Gaussians.
pub fn haar_unitary(rng: &mut StreamRng) -> [Complex64; 4] {
    let mut gaussian = || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    };
    let (a0, a1) = (gaussian(), gaussian());
    let (b0, b1) = (gaussian(), gaussian());
    let norm_a = libm::sqrt(a0.norm_sqr() + a1.norm_sqr());
    let (u0, u1) = (a0 / norm_a, a1 / norm_a);
    let overlap = u0.conj() * b0 + u1.conj() * b1;
    let (w0, w1) = (b0 - overlap * u0, b1 - overlap * u1);
    let norm_w = libm::sqrt(w0.norm_sqr() + w1.norm_sqr());
    let (v0, v1) = (w0 / norm_w, w1 / norm_w);
    // columns (u0, u1) and (v0, v1), stored row-major
    [u0, v0, u1, v1]
}

/// Draw a circuit from `dist`. A pure function of `(dist, seed)`.
///
/// Cycle `j` is a layer of Haar unitaries on every qubit followed by CZ
/// gates on edge class `j mod classes`, so layer `l` is single-qubit when
/// `l` is even. CZ layers are dropped when the topology has no edges; an
/// all-zero NOT mask produces no layer.
pub fn sample_circuit(dist: &CircuitDistribution, seed: u64) -> Result<Circuit> {
    dist.validate()?;
    let mut rng = rng::seeded(seed);
    let classes = dist.edge_classes();
    let mut layers = Vec::with_capacity(2 * dist.depth + 1);
    for cycle in 0..dist.depth {
        let gates = (0..dist.n)
            .map(|qubit| Gate::Unitary { qubit, matrix: haar_unitary(&mut rng) })
            .collect();
        layers.push(Layer::new(gates));
        if !classes.is_empty() {
            let class = &classes[cycle % classes.len()];
            layers.push(Layer::new(class.iter().map(|&(a, b)| Gate::Cz(a, b)).collect()));
        }
    }
    if dist.final_not_mask_layer {
        let mask = rng::uniform_bits(&mut rng, dist.n);
        layers.push(Layer::not_mask(mask, dist.n));
    }
    Circuit::new(dist.n, seed, layers)
}

/// Append X gates on the set bits of `z`, merging with a trailing mask layer.
///
/// `z` must be an `n`-bit string (no bits at or above `c.n()`).
pub fn append_not_mask(c: &Circuit, z: u64) -> Result<Circuit> {
    if c.n < 64 && z >> c.n != 0 {
        return Err(argument!("mask {z:#b} is longer than the {} qubits of the circuit", c.n));
    }
    if z == 0 {
        return Ok(c.clone());
    }
    let mut layers = c.layers.clone();
    let mask = match c.final_not_mask() {
        Some(existing) => {
            layers.pop();
            existing ^ z
        }
        None => z,
    };
    layers.push(Layer::not_mask(mask, c.n));
    Circuit::new(c.n, c.seed, layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_without_mask_is_empty() {
        let c = sample_circuit(&CircuitDistribution::chain(4, 0).without_mask(), 1).unwrap();
        assert!(c.layers().is_empty());
        assert_eq!(c.gate_count(), 0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let dist = CircuitDistribution::grid(3, 3, 20);
        assert_eq!(sample_circuit(&dist, 99).unwrap(), sample_circuit(&dist, 99).unwrap());
        assert_ne!(sample_circuit(&dist, 99).unwrap(), sample_circuit(&dist, 100).unwrap());
    }

    #[test]
    fn grid_layers_alternate() {
        let dist = CircuitDistribution::grid(3, 3, 20).without_mask();
        let c = sample_circuit(&dist, 5).unwrap();
        assert_eq!(c.layers().len(), 40);
        let classes = dist.edge_classes();
        assert_eq!(classes.len(), 4);
        for (l, layer) in c.layers().iter().enumerate() {
            if l % 2 == 0 {
                assert_eq!(layer.gates().len(), 9);
                assert!(layer.gates().iter().all(|g| matches!(g, Gate::Unitary { .. })));
            } else {
                let expected: Vec<Gate> =
                    classes[(l / 2) % 4].iter().map(|&(a, b)| Gate::Cz(a, b)).collect();
                assert_eq!(layer.gates(), expected.as_slice());
            }
        }
    }

    #[test]
    fn grid_edge_classes_cover_every_edge_once() {
        let dist = CircuitDistribution::grid(3, 4, 1);
        let mut all: Vec<_> = dist.edge_classes().concat();
        all.sort();
        // 3 rows * 3 horizontal + 2 * 4 vertical
        assert_eq!(all.len(), 17);
        all.dedup();
        assert_eq!(all.len(), 17);
    }

    #[test]
    fn invalid_grid_is_a_config_error() {
        let dist = CircuitDistribution {
            n: 8,
            depth: 2,
            topology: Topology::Grid2D { rows: 3, cols: 3 },
            final_not_mask_layer: true,
        };
        assert!(matches!(sample_circuit(&dist, 0), Err(Error::Config(_))));
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = rng::seeded(11);
        for _ in 0..1000 {
            assert!(unitarity_defect(&haar_unitary(&mut rng)) < 1e-13);
        }
    }

    #[test]
    fn rejects_overlapping_gates() {
        let layer = Layer::new(vec![Gate::X(0), Gate::Cz(0, 1)]);
        assert!(Circuit::new(2, 0, vec![layer]).is_err());
        assert!(Circuit::new(2, 0, vec![Layer::new(vec![Gate::Cz(1, 1)])]).is_err());
        assert!(Circuit::new(2, 0, vec![Layer::new(vec![Gate::X(2)])]).is_err());
        let bad = [Complex64::new(2.0, 0.0), Complex64::default(), Complex64::default(), Complex64::new(1.0, 0.0)];
        assert!(Circuit::new(2, 0, vec![Layer::new(vec![Gate::Unitary { qubit: 0, matrix: bad }])]).is_err());
    }

    #[test]
    fn empty_mask_leaves_circuit_unchanged() {
        let c = sample_circuit(&CircuitDistribution::chain(5, 6), 3).unwrap();
        assert_eq!(append_not_mask(&c, 0).unwrap(), c);
    }

    #[test]
    fn mask_too_long_is_rejected() {
        let c = Circuit::identity(3).unwrap();
        assert!(matches!(append_not_mask(&c, 0b1000), Err(Error::Argument(_))));
    }

    #[test]
    fn masks_merge_by_xor() {
        let c = sample_circuit(&CircuitDistribution::chain(6, 4).without_mask(), 8).unwrap();
        let once = append_not_mask(&c, 0b101100).unwrap();
        assert_eq!(once.final_not_mask(), Some(0b101100));
        assert_eq!(once.layers().len(), c.layers().len() + 1);
        let twice = append_not_mask(&once, 0b000110).unwrap();
        assert_eq!(twice.final_not_mask(), Some(0b101010));
        assert_eq!(twice.layers().len(), once.layers().len());
        let cancelled = append_not_mask(&twice, 0b101010).unwrap();
        assert_eq!(cancelled, c);
    }

    #[test]
    fn canonical_mask_is_uniform_after_append() {
        // With a uniform seed mask, mask XOR z is uniform for any fixed z.
        let dist = CircuitDistribution::chain(3, 2);
        let z = 0b110;
        let mut counts = [0usize; 8];
        let trials = 8000;
        for seed in 0..trials {
            let c = append_not_mask(&sample_circuit(&dist, seed).unwrap(), z).unwrap();
            counts[c.final_not_mask().unwrap_or(0) as usize] += 1;
        }
        let expected = trials as f64 / 8.0;
        let chi2: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // chi-square with 7 dof, 99.9th percentile is 24.3
        assert!(chi2 < 24.3, "chi2 = {chi2}, counts = {counts:?}");
    }
}
