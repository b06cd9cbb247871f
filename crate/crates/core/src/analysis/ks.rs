//! One-sample Kolmogorov–Smirnov distance against Exp(1).

/// `sup_x |F_n(x) - (1 - e^-x)|` over the sample. Sorts `xs` in place.
pub fn ks_statistic_exp1(xs: &mut [f64]) -> f64 {
    ks_statistic(xs, |x| if x <= 0.0 { 0.0 } else { -libm::expm1(-x) })
}

/// KS distance of `xs` from a continuous CDF. Sorts `xs` in place.
pub fn ks_statistic(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let len = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |worst: f64, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / len - f;
        let below = f - i as f64 / len;
        worst.max(above).max(below)
    })
}
