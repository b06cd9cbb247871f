//! Small numeric helpers shared across modules.

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `2^-n` as an exact double.
pub fn inv_pow2(n: usize) -> f64 {
    libm::ldexp(1.0, -(n as i32))
}

/// `2^e` as an exact double.
pub fn pow2(e: i32) -> f64 {
    libm::ldexp(1.0, e)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl core::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Mean and standard error of the mean (sample standard deviation / sqrt(len)).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let len = xs.len();
    if len == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().copied().collect::<KahanSum>().total() / len as f64;
    if len < 2 {
        return (mean, f64::NAN);
    }
    let ss = xs
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .collect::<KahanSum>()
        .total();
    let var = ss / (len - 1) as f64;
    (mean, libm::sqrt(var / len as f64))
}

/// Ceiling that treats values within a relative 1e-9 of an integer as that
/// integer, so `4 / (1.001 - 1)^2` rounds to 4_000_000 rather than 4_000_001.
pub fn tolerant_ceil(x: f64) -> f64 {
    let r = libm::round(x);
    if libm::fabs(x - r) <= 1e-9 * libm::fabs(x).max(1.0) {
        r
    } else {
        libm::ceil(x)
    }
}

/// Max-entry norm of `U^dagger U - I` for a row-major 2x2 matrix.
pub fn unitarity_defect(m: &[Complex64; 4]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = ZERO;
            for r in 0..2 {
                acc += m[r * 2 + i].conj() * m[r * 2 + j];
            }
            if i == j {
                acc -= ONE;
            }
            worst = worst.max(libm::sqrt(acc.norm_sqr()));
        }
    }
    worst
}
