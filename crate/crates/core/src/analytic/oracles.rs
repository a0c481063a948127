//! Independent numerical routes for the closed-form BER expressions.
//!
//! Each scheme's oracle integrates `Q(...)` directly against the selected
//! SNR's probability density (or, for the distinct-relay part of D-RS-NC,
//! applies Craig's formula to the spacings MGF). None of these touch the
//! alternating sums or the CDF-integral fallbacks they check.

use super::{mgf_z, AnalyticError};
use crate::numerics::{integrate, ln_gamma, q_function};
use std::f64::consts::{FRAC_PI_2, PI};

fn validate(n: u32, gamma_rd: f64) -> Result<(), AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::InvalidRelayCount);
    }
    if !(gamma_rd > 0.0 && gamma_rd.is_finite()) {
        return Err(AnalyticError::InvalidGamma(gamma_rd));
    }
    Ok(())
}

/// `int_0^inf Q(sqrt(b x)) f(x) dx` via x = t^2. The Q-factor truncates the
/// tail regardless of where the density mass sits.
fn expected_q_pdf<F: Fn(f64) -> f64>(b: f64, n_hint: u32, pdf: F) -> Result<f64, AnalyticError> {
    let t_max = (2.0 * (170.0 + 4.0 * n_hint as f64) / b).sqrt();
    Ok(integrate(
        |t| q_function(b.sqrt() * t) * pdf(t * t) * 2.0 * t,
        0.0,
        t_max,
        1e-300,
        1e-12,
    )?)
}

/// S-RS-NC oracle: `1/2 E[Q(sqrt(2 Z))]` against the max-of-min density
/// `N (2/g) exp(-2x/g) (1 - exp(-2x/g))^(N-1)`.
pub fn s_rs_nc(n: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    let g = gamma_rd;
    let v = expected_q_pdf(2.0, n, |x| {
        n as f64 * (2.0 / g) * (-2.0 * x / g).exp() * (-(-2.0 * x / g).exp_m1()).powi(n as i32 - 1)
    })?;
    Ok(0.5 * v)
}

/// D-RS-NC oracle: best-relay density integration for the coincidence term
/// plus MGF-Craig for each distinct-order term.
pub fn d_rs_nc(n: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    let g = gamma_rd;
    // (1/N) E[Q(sqrt(2 gamma_(N)))] with the max density
    let l1 = expected_q_pdf(2.0, n, |x| {
        n as f64 * (1.0 / g) * (-x / g).exp() * (-(-x / g).exp_m1()).powi(n as i32 - 1)
    })? / n as f64;
    let mut l2 = 0.0;
    for q in 1..n {
        let v = integrate(
            |theta| {
                let s2 = theta.sin().powi(2);
                if s2 == 0.0 {
                    return 0.0;
                }
                mgf_z(-0.5 / s2, n, q, g).unwrap_or(0.0)
            },
            0.0,
            FRAC_PI_2,
            1e-300,
            1e-12,
        )?;
        l2 += v / PI;
    }
    Ok(l1 + l2 / n as f64)
}

/// NC-No-RS oracle: expectation against the Gamma(N, g/N) density of the
/// MRC output SNR.
pub fn nc_no_rs(n: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    let g = gamma_rd;
    let nf = n as f64;
    let ln_norm = nf * (nf / g).ln() - ln_gamma(nf);
    expected_q_pdf(2.0, n, |x| {
        if x == 0.0 {
            return if n == 1 { (ln_norm).exp() } else { 0.0 };
        }
        (ln_norm + (nf - 1.0) * x.ln() - nf * x / g).exp()
    })
}

/// RS-No-NC oracle: `E[Q(sqrt(Z))]` against the best-link density.
pub fn rs_no_nc(n: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    let g = gamma_rd;
    expected_q_pdf(1.0, n, |x| {
        n as f64 * (1.0 / g) * (-x / g).exp() * (-(-x / g).exp_m1()).powi(n as i32 - 1)
    })
}
