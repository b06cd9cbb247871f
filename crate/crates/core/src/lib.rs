//! Exact random-circuit experiments for Linear cross-entropy benchmarking.
//!
//! This crate holds the algorithmic side of `xeblab`: a random circuit
//! ensemble that is closed under appending NOT masks, an exact statevector
//! simulator, device-model and spoofing samplers, Linear XEB / XHOG scoring,
//! probability estimators benchmarked against the constant `2^-n` guess, and
//! the statistics used to check Porter–Thomas behaviour and sample-size
//! bounds.
//!
//! The crate is `no_std` (it needs `alloc`). The default `std` feature only
//! turns on data-parallel kernels and trial-level parallelism through rayon;
//! results are bit-identical either way.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod estimators;
pub mod math;
mod parallel;
pub mod rng;
pub mod samplers;
pub mod simulator;
pub mod xeb;

pub use circuit::{Circuit, CircuitDistribution, Gate, Layer, Topology};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use samplers::{NoiseModel, SampleSet};
pub use simulator::{OutputDistribution, Simulator, StateVector};
pub use xeb::XebReport;
