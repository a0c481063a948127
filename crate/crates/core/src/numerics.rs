//! Shared numerical machinery: Q-function, log-gamma helpers, adaptive
//! Gauss–Kronrod quadrature, pairwise summation, and the Kolmogorov–Smirnov
//! statistic.
//!
//! Special functions (erfc, log-gamma, regularized incomplete gamma) are
//! backed by `statrs`; everything here is pure and reentrant.

use thiserror::Error;

/// Gaussian tail function Q(x) = P(N(0,1) > x).
///
/// libm's erfc (FDLIBM) is good to a couple of ulps; statrs's tops out
/// around 5e-11 relative, which is too coarse for the 1e-10 cross-route
/// checks.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Conditional BPSK bit error probability at effective SNR `gamma`,
/// Q(sqrt(2*gamma)) = erfc(sqrt(gamma))/2.
pub fn ber_bpsk(gamma: f64) -> f64 {
    0.5 * libm::erfc(gamma.sqrt())
}

/// Chernoff surrogate for Q(sqrt(2*gamma)): B(gamma) = exp(-gamma)/2.
///
/// The 1/2 prefactor does not change any argmin; it is fixed for determinism.
pub fn chernoff_ber_bound(gamma: f64) -> f64 {
    0.5 * (-gamma).exp()
}

/// Natural log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Natural log of the binomial coefficient C(n, k).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
pub fn regularized_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    statrs::function::gamma::gamma_lr(a, x)
}

/// Pairwise (cascade) summation. Bounds accumulated rounding to
/// O(log n) ulps independent of summation order upstream.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Two-sample-free Kolmogorov–Smirnov statistic of `samples` against the
/// continuous CDF `cdf`: sup_x |F_emp(x) - F(x)|. Sorts a copy of the input.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Quadrature failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand produced a non-finite value")]
    NonFinite,
}

// 15-point Kronrod abscissae/weights on [-1, 1] and the embedded 7-point
// Gauss weights (QUADPACK dqk15 constants).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv = [0.0f64; 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[j + 7] = f2;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[j + 7] - mean).abs());
    }
    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).abs();
    let resasc = asc * half.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0f64.min((200.0 * err / resasc).powf(1.5));
    }
    (value, err)
}

/// Adaptive Gauss–Kronrod integration of `f` over the finite interval
/// `[a, b]`. Subdivides the worst interval until the summed error bound
/// drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64, QuadError> {
    const MAX_SUBDIVISIONS: usize = 4000;
    let (v, e) = gk15(&f, a, b);
    if !v.is_finite() {
        return Err(QuadError::NonFinite);
    }
    // (error, a, b, value); plain vec scan keeps this dependency-free and the
    // interval counts stay small.
    let mut intervals: Vec<(f64, f64, f64, f64)> = vec![(e, a, b, v)];
    for _ in 0..MAX_SUBDIVISIONS {
        let total: f64 = pairwise_sum(&intervals.iter().map(|i| i.3).collect::<Vec<_>>());
        let total_err: f64 = intervals.iter().map(|i| i.0).sum();
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (worst_idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .0.partial_cmp(&y.1 .0).unwrap())
            .unwrap();
        let (_, ia, ib, _) = intervals.swap_remove(worst_idx);
        let mid = 0.5 * (ia + ib);
        if mid <= ia || mid >= ib {
            // interval no longer splittable at f64 resolution
            intervals.push((0.0, ia, ib, gk15(&f, ia, ib).0));
            continue;
        }
        for (lo, hi) in [(ia, mid), (mid, ib)] {
            let (v, e) = gk15(&f, lo, hi);
            if !v.is_finite() {
                return Err(QuadError::NonFinite);
            }
            intervals.push((e, lo, hi, v));
        }
    }
    let total: f64 = pairwise_sum(&intervals.iter().map(|i| i.3).collect::<Vec<_>>());
    let total_err: f64 = intervals.iter().map(|i| i.0).sum();
    if total_err <= abs_tol.max(rel_tol * total.abs()) {
        Ok(total)
    } else {
        Err(QuadError::NonConvergence {
            estimate: total,
            error: total_err,
            subdivisions: MAX_SUBDIVISIONS,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_function_reference_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        // Q(1) = 0.158655253931457051...
        assert!((q_function(1.0) - 0.15865525393145705).abs() < 1e-15);
        // deep tail: Q(6) = 9.865876450376946e-10
        assert!((q_function(6.0) / 9.865876450376946e-10 - 1.0).abs() < 1e-13);
        // erfc backend stays within a few ulps
        assert!((0.5 * libm::erfc(5.0) / (0.5 * 1.537459794428035e-12) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ber_bpsk_matches_q_of_sqrt_2gamma() {
        for &g in &[0.01, 0.5, 1.0, 4.0, 25.0] {
            let a = ber_bpsk(g);
            let b = q_function((2.0 * g).sqrt());
            assert!((a / b - 1.0).abs() < 1e-12, "gamma={g}: {a} vs {b}");
        }
    }

    #[test]
    fn ln_binomial_small_cases() {
        assert!((ln_binomial(4, 2).exp() - 6.0).abs() < 1e-12);
        assert!((ln_binomial(10, 0).exp() - 1.0).abs() < 1e-12);
        assert!((ln_binomial(16, 8).exp() - 12870.0).abs() < 1e-8);
    }

    #[test]
    fn regularized_gamma_edges() {
        assert_eq!(regularized_lower_gamma(3.0, 0.0), 0.0);
        assert!((regularized_lower_gamma(1.0, 1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert!(regularized_lower_gamma(2.0, 1e6) > 1.0 - 1e-12);
    }

    #[test]
    fn integrate_polynomial_exact() {
        // GK15 is exact for polynomials of degree <= 22
        let v = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-14, 1e-14).unwrap();
        assert!((v - 16.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn integrate_gaussian_tail() {
        // int_0^inf exp(-x^2) dx = sqrt(pi)/2, truncated at 10
        let v = integrate(|x| (-x * x).exp(), 0.0, 10.0, 1e-300, 1e-13).unwrap();
        assert!((v / (std::f64::consts::PI.sqrt() / 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_relative_accuracy_on_tiny_values() {
        // int_0^14 x^8 exp(-x^2) dx * 1e-30 stays relatively accurate
        let exact = 1e-30 * 0.5 * ln_gamma(4.5).exp();
        let v = integrate(
            |x| 1e-30 * x.powi(8) * (-x * x).exp(),
            0.0,
            14.0,
            1e-300,
            1e-12,
        )
        .unwrap();
        assert!((v / exact - 1.0).abs() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn integrate_zero_integrand() {
        assert_eq!(integrate(|_| 0.0, 0.0, 5.0, 1e-12, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_small() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-9);
    }

    #[test]
    fn ks_statistic_on_exact_grid() {
        // samples at the exact quantiles of U(0,1) give D = 1/(2n)
        let n = 100;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&samples, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }
}
