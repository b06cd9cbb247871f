//! Linear XEB scoring, XHOG verification and the sample-size bounds.
//!
//! The Linear XEB score of samples `z_1..z_k` is the mean ideal probability
//! `E_i[P(z_i)]`; XHOG at level `b` asks for `k` distinct samples scoring at
//! least `b / 2^n`. Under the depolarizing mixture `E[Y] = (1 + phi) / 2^n`,
//! so `score * 2^n - 1` estimates the fidelity `phi`.
//!
//! Two conventions for the number of samples coexist: the reduction needs
//! `k >= 1 / (((2s - 1) b - 1)(b - 1))`, while the Chebyshev success argument
//! works with `k = 4 / (b - 1)^2`.
//!
//! About the Chebyshev bound: the variance of a single rescaled sample under
//! the mixture is `1 + 2 phi - phi^2 <= 2`, so the mean of `k` samples has
//! standard deviation at most `sqrt(2 / k)`, not `sqrt(2) / k`. The failure
//! bound `2 / ((b - 1)^2 k^2)` that follows from the second form is kept in
//! [`chebyshev_success_bound`] because it is the published one;
//! [`chebyshev_success_bound_variance`] carries the `2 / ((b - 1)^2 k)` form.

use crate::circuit::Circuit;
use crate::error::{domain, argument, Result};
use crate::math::{inv_pow2, pow2, tolerant_ceil, KahanSum};
use crate::samplers::SampleSet;
use crate::simulator::{OutputDistribution, Simulator};

#[derive(Debug, Clone, PartialEq)]
pub struct XebReport {
    pub n: usize,
    pub k: usize,
    /// `E_i[P(z_i)]`, duplicates counted with multiplicity.
    pub score: f64,
    /// `score * 2^n`.
    pub b_implied: f64,
    pub threshold_b: f64,
    /// `score >= threshold_b / 2^n` and the samples are pairwise distinct.
    pub xhog_pass: bool,
    /// `b_implied - 1`.
    pub fidelity_estimate: f64,
    /// Provenance seed of the circuit that was scored.
    pub seed: u64,
}

fn check_dims(dist: &OutputDistribution, s: &SampleSet) -> Result<()> {
    if dist.n() != s.n() {
        return Err(argument!("circuit has {} qubits but samples have {}", dist.n(), s.n()));
    }
    Ok(())
}

/// Linear XEB score of `s` against the ideal distribution of `c`.
pub fn xeb_score(c: &Circuit, s: &SampleSet) -> Result<f64> {
    if c.n() != s.n() {
        return Err(argument!("circuit has {} qubits but samples have {}", c.n(), s.n()));
    }
    xeb_score_from(&Simulator::default().full_distribution(c)?, s)
}

pub fn xeb_score_from(dist: &OutputDistribution, s: &SampleSet) -> Result<f64> {
    check_dims(dist, s)?;
    let total = s.samples().iter().map(|&z| dist.prob(z)).collect::<KahanSum>().total();
    Ok(total / s.k() as f64)
}

pub fn check_xhog(c: &Circuit, s: &SampleSet, b: f64) -> Result<XebReport> {
    if c.n() != s.n() {
        return Err(argument!("circuit has {} qubits but samples have {}", c.n(), s.n()));
    }
    check_xhog_from(&Simulator::default().full_distribution(c)?, s, b, c.seed())
}

pub fn check_xhog_from(dist: &OutputDistribution, s: &SampleSet, b: f64, seed: u64) -> Result<XebReport> {
    if !b.is_finite() {
        return Err(domain!("threshold b must be finite, got {b}"));
    }
    let score = xeb_score_from(dist, s)?;
    let n = dist.n();
    let b_implied = score * pow2(n as i32);
    let xhog_pass = score >= b * inv_pow2(n) && s.is_pairwise_distinct();
    Ok(XebReport {
        n,
        k: s.k(),
        score,
        b_implied,
        threshold_b: b,
        xhog_pass,
        fidelity_estimate: b_implied - 1.0,
        seed,
    })
}

/// Which sample-count convention [`required_k`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KConvention {
    /// `1 / (((2s - 1) b - 1)(b - 1))`, the reduction's requirement.
    #[default]
    Theorem,
    /// `4 / (b - 1)^2`, used with `s = 3/4 + 1/(4b)` in the Chebyshev argument.
    Appendix,
}

/// Success probability paired with `b` in the worked instance: `3/4 + 1/(4b)`.
pub fn canonical_success(b: f64) -> f64 {
    0.75 + 0.25 / b
}

/// Smallest admissible sample count for XHOG level `b` and success rate `s`.
///
/// Requires `b > 1` and `1/2 + 1/(2b) < s <= 1`.
pub fn required_k(b: f64, s: f64, convention: KConvention) -> Result<u64> {
    if !(b > 1.0) || !b.is_finite() {
        return Err(domain!("b must exceed 1, got {b}"));
    }
    if !(s <= 1.0) || !(s > 0.5 + 0.5 / b) {
        return Err(domain!("s must lie in (1/2 + 1/(2b), 1] = ({}, 1], got {s}", 0.5 + 0.5 / b));
    }
    let bound = match convention {
        KConvention::Theorem => 1.0 / (((2.0 * s - 1.0) * b - 1.0) * (b - 1.0)),
        KConvention::Appendix => 4.0 / ((b - 1.0) * (b - 1.0)),
    };
    let k = tolerant_ceil(bound);
    if !(k < 1.8e19) {
        return Err(domain!("sample count {bound} does not fit in 64 bits"));
    }
    Ok(k.max(1.0) as u64)
}

fn check_chebyshev_premise(b: f64, k: u64, fidelity_mean: f64) -> Result<()> {
    if !(b > 1.0) || !b.is_finite() {
        return Err(domain!("b must exceed 1, got {b}"));
    }
    if !(fidelity_mean >= 2.0 * b - 1.0 - 1e-12) {
        return Err(domain!("rescaled mean {fidelity_mean} is below 2b - 1 = {}", 2.0 * b - 1.0));
    }
    let min_k = tolerant_ceil(4.0 / ((b - 1.0) * (b - 1.0)));
    if (k as f64) < min_k {
        return Err(domain!("k = {k} is below 4 / (b - 1)^2 = {min_k}"));
    }
    Ok(())
}

/// Lower bound on the XHOG success probability, `1 - 2 / ((b - 1)^2 k^2)`.
///
/// `fidelity_mean` is `E[Y] * 2^n` and must be at least `2b - 1`; `k` must be
/// at least `4 / (b - 1)^2`. See the module docs for the `k^2`.
pub fn chebyshev_success_bound(b: f64, k: u64, fidelity_mean: f64) -> Result<f64> {
    check_chebyshev_premise(b, k, fidelity_mean)?;
    let k = k as f64;
    Ok((1.0 - 2.0 / ((b - 1.0) * (b - 1.0) * k * k)).max(0.0))
}

/// The same bound with the variance of the mean taken as `2 / (k 4^n)`:
/// `1 - 2 / ((b - 1)^2 k)`.
pub fn chebyshev_success_bound_variance(b: f64, k: u64, fidelity_mean: f64) -> Result<f64> {
    check_chebyshev_premise(b, k, fidelity_mean)?;
    Ok((1.0 - 2.0 / ((b - 1.0) * (b - 1.0) * k as f64)).max(0.0))
}

/// Theorem bound on the scaled gain, `k ((2s - 1) b - 1)(b - 1)`.
pub fn theorem_gain_bound(k: usize, s: f64, b: f64) -> f64 {
    k as f64 * ((2.0 * s - 1.0) * b - 1.0) * (b - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{append_not_mask, sample_circuit, CircuitDistribution};
    use crate::samplers::{sample_ideal, sample_uniform};
    use crate::simulator::full_distribution;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn identity_circuit_scores_one() {
        let c = Circuit::identity(3).unwrap();
        let s = SampleSet::new(3, vec![0; 5], false).unwrap();
        assert_eq!(xeb_score(&c, &s).unwrap(), 1.0);
        let report = check_xhog(&c, &SampleSet::new(3, vec![0], true).unwrap(), 1.5).unwrap();
        assert!(report.xhog_pass);
        assert_eq!(report.b_implied, 8.0);
        assert_eq!(report.fidelity_estimate, 7.0);
    }

    #[test]
    fn duplicates_never_pass() {
        let c = Circuit::identity(3).unwrap();
        let s = SampleSet::new(3, vec![0, 0], false).unwrap();
        let report = check_xhog(&c, &s, 1.5).unwrap();
        assert_eq!(report.score, 1.0);
        assert!(!report.xhog_pass);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let c = Circuit::identity(3).unwrap();
        let s = SampleSet::new(4, vec![0], false).unwrap();
        assert!(xeb_score(&c, &s).is_err());
        assert!(check_xhog(&c, &s, 1.0).is_err());
    }

    #[test]
    fn required_k_matches_worked_instances() {
        for b in [1.001, 1.01, 1.1, 1.5, 2.0, 3.0] {
            let expected = tolerant_ceil(2.0 / ((b - 1.0) * (b - 1.0)));
            assert_eq!(required_k(b, canonical_success(b), KConvention::Theorem).unwrap() as f64, expected);
            let with_certainty = tolerant_ceil(1.0 / ((b - 1.0) * (b - 1.0)));
            assert_eq!(required_k(b, 1.0, KConvention::Theorem).unwrap() as f64, with_certainty);
        }
        assert_eq!(required_k(1.001, canonical_success(1.001), KConvention::Appendix).unwrap(), 4_000_000);
        assert_eq!(required_k(1.5, 1.0, KConvention::Theorem).unwrap(), 4);
    }

    #[test]
    fn required_k_domain_errors() {
        assert!(required_k(1.0, 1.0, KConvention::Theorem).is_err());
        assert!(required_k(1.5, 0.8, KConvention::Theorem).is_err()); // 1/2 + 1/3 = 0.833
        assert!(required_k(1.5, 1.1, KConvention::Theorem).is_err());
        assert!(required_k(f64::NAN, 1.0, KConvention::Appendix).is_err());
    }

    #[test]
    fn chebyshev_bound_values() {
        let b = 1.001;
        let k = 4_000_000;
        let bound = chebyshev_success_bound(b, k, 2.0 * b - 1.0).unwrap();
        assert!(bound >= 1.0 - (b - 1.0) / 8.0);
        for b in [1.01, 1.1, 1.3, 1.7, 2.0] {
            let k = required_k(b, canonical_success(b), KConvention::Appendix).unwrap();
            let bound = chebyshev_success_bound(b, k, 2.0 * b - 1.0).unwrap();
            assert!(bound >= 1.0 - (b - 1.0) / 8.0 - 1e-15);
            assert!(bound >= canonical_success(b));
        }
        // variance form at k = 4 / (b - 1)^2 is exactly 1/2
        let v = chebyshev_success_bound_variance(1.1, 400, 1.2).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_premise_is_enforced() {
        assert!(chebyshev_success_bound(1.1, 400, 1.1).is_err());
        assert!(chebyshev_success_bound(1.1, 399, 1.2).is_err());
        assert!(chebyshev_success_bound(1.0, 400, 1.2).is_err());
    }

    #[test]
    fn score_is_invariant_under_mask_relabelling() {
        let c = sample_circuit(&CircuitDistribution::chain(6, 8), 12).unwrap();
        let s = sample_ideal(&c, 40, 3, false).unwrap();
        let z = 0b110101;
        let primed = append_not_mask(&c, z).unwrap();
        let a = xeb_score(&c, &s).unwrap();
        let b = xeb_score(&primed, &s.xor_all(z)).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn score_is_order_invariant_and_linear_in_unions(
            seed in 0u64..1000,
            split in 1usize..39,
            rotation in 0usize..40,
        ) {
            let c = sample_circuit(&CircuitDistribution::chain(5, 6), seed).unwrap();
            let dist = full_distribution(&c).unwrap();
            let s = sample_uniform(5, 40, seed, false).unwrap();
            let whole = xeb_score_from(&dist, &s).unwrap();
            let mut rotated = s.samples().to_vec();
            rotated.rotate_left(rotation);
            let r = SampleSet::new(5, rotated, false).unwrap();
            prop_assert!((xeb_score_from(&dist, &r).unwrap() - whole).abs() < 1e-15);
            let a = SampleSet::new(5, s.samples()[..split].to_vec(), false).unwrap();
            let b = SampleSet::new(5, s.samples()[split..].to_vec(), false).unwrap();
            let combined = (a.k() as f64 * xeb_score_from(&dist, &a).unwrap()
                + b.k() as f64 * xeb_score_from(&dist, &b).unwrap()) / 40.0;
            prop_assert!((combined - whole).abs() < 1e-15);
        }
    }
}
