//! Closed-form exact and asymptotic average sum BER for the four schemes,
//! gain ratios, and the auxiliary expectation/MGF machinery behind them.
//!
//! Every exact formula has two evaluation routes:
//!
//! * a closed alternating/binomial sum, evaluated in log space with sign
//!   tracking while measuring how many decimal digits cancel; and
//! * a sign-definite integral representation (CDF integral or MGF-Craig
//!   form), used automatically when the measured cancellation exceeds
//!   [`GUARD_LOSS_DIGITS`].
//!
//! Independent numerical oracles (PDF-quadrature and MGF-Craig expectations)
//! live in [`oracles`] and stay off the closed-form code paths.

pub mod oracles;

use crate::numerics::{self, integrate, ln_binomial, ln_gamma, QuadError};
use crate::selection::StrategyKind;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("relay count must be >= 1")]
    InvalidRelayCount,
    #[error("gamma_rd must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("psi0 requires positive inputs, got c1={c1}, c2={c2}")]
    NonPositivePsiInput { c1: f64, c2: f64 },
    #[error("MGF order indices out of range: n={n}, q={q} (need 1 <= q <= n-1)")]
    InvalidMgfOrder { n: u32, q: u32 },
    #[error("MGF argument s={s} at or beyond the smallest pole {pole}")]
    PoleProximity { s: f64, pole: f64 },
    #[error("dual-sum indices out of range: n={n}, q={q}, k={k}, p={p}")]
    InvalidDualSumIndices { n: u32, q: u32, k: u32, p: u32 },
    #[error("no tabulated gain for scheme {0}")]
    UnsupportedScheme(StrategyKind),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// How an [`AnalyticResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMethod {
    AlternatingSum,
    Quadrature,
    Asymptotic,
}

impl EvalMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EvalMethod::AlternatingSum => "alternating_sum",
            EvalMethod::Quadrature => "quadrature",
            EvalMethod::Asymptotic => "asymptotic",
        }
    }
}

/// A closed-form BER value together with the evaluation route and the
/// decimal digits lost to cancellation in the (attempted) sum route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticResult {
    pub value: f64,
    pub method: EvalMethod,
    pub est_cancellation_loss: f64,
}

impl AnalyticResult {
    fn new(value: f64, method: EvalMethod, loss: f64) -> Self {
        AnalyticResult {
            value: value.clamp(0.0, 0.5),
            method,
            est_cancellation_loss: loss.max(0.0),
        }
    }
}

/// Measured cancellation (decimal digits) above which the alternating-sum
/// routes switch to their integral representations.
///
/// f64 carries ~15.9 digits and the term-count rounding factor reaches ~8x,
/// so a sum that loses 5 digits can err near 1e-9 relative; that keeps a
/// full order of magnitude inside the 1e-8 oracle-equivalence budget.
pub const GUARD_LOSS_DIGITS: f64 = 5.0;

fn validate(n: u32, gamma_rd: f64) -> Result<(), AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::InvalidRelayCount);
    }
    if !(gamma_rd > 0.0 && gamma_rd.is_finite()) {
        return Err(AnalyticError::InvalidGamma(gamma_rd));
    }
    Ok(())
}

/// Running alternating sum with the condition estimate
/// loss = log10(sum |t| / |sum t|).
struct GuardedSum {
    sum: f64,
    sum_abs: f64,
}

impl GuardedSum {
    fn new() -> Self {
        GuardedSum {
            sum: 0.0,
            sum_abs: 0.0,
        }
    }

    fn add(&mut self, term: f64) {
        self.sum += term;
        self.sum_abs += term.abs();
    }

    fn loss_digits(&self) -> f64 {
        if !self.sum.is_finite() || self.sum <= 0.0 {
            return f64::INFINITY;
        }
        (self.sum_abs / self.sum).log10().max(0.0)
    }
}

/// E[Q(sqrt(b X))] from the CDF of X via the integration-by-parts identity,
/// with the substitution x = t^2 removing the 1/sqrt(x) endpoint
/// singularity:
///
/// ```text
/// E[Q(sqrt(bX))] = sqrt(b)/sqrt(2 pi) * int_0^inf exp(-b t^2 / 2) F(t^2) dt
/// ```
///
/// `n_hint` widens the truncation for CDFs rising like x^n near 0.
fn expected_q_scaled<F: Fn(f64) -> f64>(b: f64, n_hint: u32, cdf: F) -> Result<f64, QuadError> {
    let t_max = ((340.0 + 8.0 * n_hint as f64) / b).sqrt();
    let pref = b.sqrt() / (2.0 * PI).sqrt();
    let v = integrate(
        |t| (-0.5 * b * t * t).exp() * cdf(t * t),
        0.0,
        t_max,
        1e-300,
        1e-12,
    )?;
    Ok(pref * v)
}

/// Public form of the CDF-integral expectation (the integration-by-parts
/// identity). `cdf` must be a CDF vanishing at 0; `b > 0`. Absolute
/// tolerance 1e-12, relative 1e-12.
pub fn expected_q_cdf_integral<F: Fn(f64) -> f64>(cdf: F, b: f64) -> Result<f64, AnalyticError> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(AnalyticError::InvalidGamma(b));
    }
    Ok(expected_q_scaled(b, 0, cdf)?)
}

// ---------------------------------------------------------------------------
// S-RS-NC (Min-Max single relay selection with network coding)
// ---------------------------------------------------------------------------

/// Worst-user approximation of the S-RS-NC average sum BER:
/// `1/4 sum_p C(N,p) (-1)^p (1 + 2p/gamma)^(-1/2)`.
pub fn ber_s_rs_nc_exact(n: u32, gamma_rd: f64) -> Result<AnalyticResult, AnalyticError> {
    validate(n, gamma_rd)?;
    let mut acc = GuardedSum::new();
    for p in 0..=n {
        let ln_mag = ln_binomial(n as u64, p as u64) - 0.5 * (1.0 + 2.0 * p as f64 / gamma_rd).ln();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * ln_mag.exp());
    }
    let loss = acc.loss_digits();
    if loss <= GUARD_LOSS_DIGITS {
        Ok(AnalyticResult::new(
            0.25 * acc.sum,
            EvalMethod::AlternatingSum,
            loss,
        ))
    } else {
        let v = ber_s_rs_nc_integral(n, gamma_rd)?;
        Ok(AnalyticResult::new(v, EvalMethod::Quadrature, loss))
    }
}

/// Stable CDF-integral route for S-RS-NC:
/// `1/2 E[Q(sqrt(2X))]` with `F(x) = (1 - exp(-2x/gamma))^N`.
pub fn ber_s_rs_nc_integral(n: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    let v = expected_q_scaled(2.0, n, |x| (-(-2.0 * x / gamma_rd).exp_m1()).powi(n as i32))?;
    Ok(0.5 * v)
}

/// High-SNR leading term `2^(N-2) Gamma(N + 1/2) / sqrt(pi) * gamma^(-N)`,
/// evaluated in log space (no overflow through n = 64 and beyond).
pub fn ber_s_rs_nc_asymptotic(n: u32, gamma_rd: f64) -> f64 {
    assert!(n >= 1 && gamma_rd > 0.0);
    ((n as f64 - 2.0) * std::f64::consts::LN_2 + ln_gamma(n as f64 + 0.5)
        - 0.5 * PI.ln()
        - n as f64 * gamma_rd.ln())
    .exp()
}

// ---------------------------------------------------------------------------
// D-RS-NC (Double-Max dual relay selection with network coding)
// ---------------------------------------------------------------------------

/// The piecewise closed form of
/// `(1/pi) int_0^{pi/2} sin^4(t) / ((c1 + sin^2 t)(c2 + sin^2 t)) dt`.
///
/// Near-equal inputs (within 1e-6 relative) evaluate the equal-argument
/// branch at the midpoint, which carries the first-order correction in
/// `c2 - c1` and avoids the 1/(c2 - c1) blow-up.
pub fn psi0(c1: f64, c2: f64) -> Result<f64, AnalyticError> {
    if !(c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
        return Err(AnalyticError::NonPositivePsiInput { c1, c2 });
    }
    if (c1 - c2).abs() < 1e-6 * c1.max(c2) {
        let c = 0.5 * (c1 + c2);
        let r = (c / (1.0 + c)).sqrt();
        Ok(0.5 * (1.0 - r * (1.0 + 0.5 / (1.0 + c))))
    } else {
        let r1 = (c1 / (1.0 + c1)).sqrt();
        let r2 = (c2 / (1.0 + c2)).sqrt();
        Ok(0.5 * (1.0 + (r1 * c1 - r2 * c2) / (c2 - c1)))
    }
}

/// One (q, k, p) term of the D-RS-NC double-order-statistics sum: the SNR
/// scale pair (c1, c2), the integral value psi0, and the integer product
/// sigma0 dividing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSumTerms {
    pub n: u32,
    pub q: u32,
    pub k: u32,
    pub p: u32,
    pub c1: f64,
    pub c2: f64,
    pub psi0: f64,
    pub sigma0: f64,
}

impl DualSumTerms {
    pub fn new(n: u32, q: u32, k: u32, p: u32, gamma_rd: f64) -> Result<Self, AnalyticError> {
        validate(n, gamma_rd)?;
        if !(1 <= q && q < n && 1 <= k && k <= q && q < p && p <= n) {
            return Err(AnalyticError::InvalidDualSumIndices { n, q, k, p });
        }
        let c1 = gamma_rd / (n - k + 1) as f64;
        let c2 = gamma_rd / (2 * (n - p + 1)) as f64;
        let mut sigma0 = ((n - p + 1) as f64) * ((n - k + 1) as f64);
        for j in 1..=q {
            if j != k {
                sigma0 *= j as f64 - k as f64;
            }
        }
        for m in (q + 1)..=n {
            if m != p {
                sigma0 *= m as f64 - p as f64;
            }
        }
        Ok(DualSumTerms {
            n,
            q,
            k,
            p,
            c1,
            c2,
            psi0: psi0(c1, c2)?,
            sigma0,
        })
    }

    /// `psi0 / sigma0`, the term value without the common `(N-1)! (-1)^N`
    /// prefactor.
    pub fn contribution(&self) -> f64 {
        self.psi0 / self.sigma0
    }
}

fn d_rs_nc_l1_sum(n: u32, gamma_rd: f64, acc: &mut GuardedSum) {
    let pref = gamma_rd.sqrt() / (2.0 * n as f64);
    for p in 0..=n {
        let ln_mag = ln_binomial(n as u64, p as u64) - 0.5 * (gamma_rd + p as f64).ln();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(pref * sign * ln_mag.exp());
    }
}

/// Exact D-RS-NC average sum BER: the single-relay coincidence term plus the
/// double-order-statistics sum over (q, k, p).
pub fn ber_d_rs_nc_exact(n: u32, gamma_rd: f64) -> Result<AnalyticResult, AnalyticError> {
    validate(n, gamma_rd)?;
    let mut acc = GuardedSum::new();
    d_rs_nc_l1_sum(n, gamma_rd, &mut acc);
    let ln_fact = ln_gamma(n as f64); // (N-1)!
    let l2_sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    for q in 1..n {
        for k in 1..=q {
            for p in (q + 1)..=n {
                let term = DualSumTerms::new(n, q, k, p, gamma_rd)?;
                acc.add(l2_sign * ln_fact.exp() * term.contribution());
            }
        }
    }
    let loss = acc.loss_digits();
    if loss <= GUARD_LOSS_DIGITS {
        Ok(AnalyticResult::new(
            acc.sum,
            EvalMethod::AlternatingSum,
            loss,
        ))
    } else {
        let v = ber_d_rs_nc_integral(n, gamma_rd)?;
        Ok(AnalyticResult::new(v, EvalMethod::Quadrature, loss))
    }
}

/// Stable route for D-RS-NC: CDF integral for the coincidence term, MGF-Craig
/// quadrature for the distinct-relay sum.
pub fn ber_d_rs_nc_integral(n: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    let l1 = expected_q_scaled(2.0, n, |x| (-(-x / gamma_rd).exp_m1()).powi(n as i32))? / n as f64;
    Ok(l1 + l2_mgf_craig(n, gamma_rd)?)
}

/// `1/N sum_{q=1}^{N-1} E[Q(sqrt(gamma_(N) + gamma_(q)))]` by Craig's
/// formula on the product-form MGF (sign-definite integrand).
fn l2_mgf_craig(n: u32, gamma_rd: f64) -> Result<f64, QuadError> {
    let mut total = 0.0;
    for q in 1..n {
        let v = integrate(
            |theta| {
                let s2 = theta.sin().powi(2);
                if s2 == 0.0 {
                    return 0.0;
                }
                mgf_product(n, q, gamma_rd, -0.5 / s2)
            },
            0.0,
            FRAC_PI_2,
            1e-300,
            1e-12,
        )?;
        total += v / PI;
    }
    Ok(total / n as f64)
}

/// High-SNR leading term
/// `(2^N - 1) Gamma(N + 1/2) / (2 N sqrt(pi)) * gamma^(-N)`.
pub fn ber_d_rs_nc_asymptotic(n: u32, gamma_rd: f64) -> f64 {
    assert!(n >= 1 && gamma_rd > 0.0);
    let ln_2n_m1 = n as f64 * std::f64::consts::LN_2 + (-(2f64).powi(-(n as i32))).ln_1p();
    (ln_2n_m1 + ln_gamma(n as f64 + 0.5)
        - (2.0 * n as f64).ln()
        - 0.5 * PI.ln()
        - n as f64 * gamma_rd.ln())
    .exp()
}

// ---------------------------------------------------------------------------
// NC-No-RS (all relays, orthogonal transmission, MRC)
// ---------------------------------------------------------------------------

/// Exact NC-No-RS average sum BER:
/// `1/2 - 1/(2 sqrt(pi)) sum_{p=0}^{N-1} (N/g)^p Gamma(p+1/2) /
///  (p! (1 + N/g)^(p+1/2))`.
pub fn ber_nc_no_rs_exact(n: u32, gamma_rd: f64) -> Result<AnalyticResult, AnalyticError> {
    validate(n, gamma_rd)?;
    let ratio = n as f64 / gamma_rd;
    let mut sum = 0.0f64;
    for p in 0..n {
        sum += (p as f64 * ratio.ln() + ln_gamma(p as f64 + 0.5)
            - ln_gamma(p as f64 + 1.0)
            - (p as f64 + 0.5) * ratio.ln_1p())
        .exp();
    }
    let value = 0.5 - sum / (2.0 * PI.sqrt());
    // cancellation here is between the two positive halves
    let loss = if value > 0.0 {
        (0.5 / value).log10().max(0.0)
    } else {
        f64::INFINITY
    };
    if loss <= GUARD_LOSS_DIGITS {
        Ok(AnalyticResult::new(value, EvalMethod::AlternatingSum, loss))
    } else {
        let v = ber_nc_no_rs_integral(n, gamma_rd)?;
        Ok(AnalyticResult::new(v, EvalMethod::Quadrature, loss))
    }
}

/// Stable route for NC-No-RS: CDF integral with the regularized lower
/// incomplete gamma CDF of the MRC output SNR.
pub fn ber_nc_no_rs_integral(n: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    Ok(expected_q_scaled(2.0, n, |x| {
        numerics::regularized_lower_gamma(n as f64, n as f64 * x / gamma_rd)
    })?)
}

/// High-SNR leading term
/// `N^N Gamma(N + 1/2) / (2 sqrt(pi) Gamma(N+1)) * gamma^(-N)`.
pub fn ber_nc_no_rs_asymptotic(n: u32, gamma_rd: f64) -> f64 {
    assert!(n >= 1 && gamma_rd > 0.0);
    (n as f64 * (n as f64).ln() + ln_gamma(n as f64 + 0.5)
        - std::f64::consts::LN_2
        - 0.5 * PI.ln()
        - ln_gamma(n as f64 + 1.0)
        - n as f64 * gamma_rd.ln())
    .exp()
}

// ---------------------------------------------------------------------------
// RS-No-NC (conventional per-user relay selection, no network coding)
// ---------------------------------------------------------------------------

/// Exact RS-No-NC average BER:
/// `1/(2 sqrt 2) sum_p C(N,p) (-1)^p (1/2 + p/gamma)^(-1/2)`.
pub fn ber_rs_no_nc_exact(n: u32, gamma_rd: f64) -> Result<AnalyticResult, AnalyticError> {
    validate(n, gamma_rd)?;
    let mut acc = GuardedSum::new();
    for p in 0..=n {
        let ln_mag = ln_binomial(n as u64, p as u64) - 0.5 * (0.5 + p as f64 / gamma_rd).ln();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * ln_mag.exp());
    }
    let loss = acc.loss_digits();
    if loss <= GUARD_LOSS_DIGITS {
        Ok(AnalyticResult::new(
            acc.sum / (2.0 * 2f64.sqrt()),
            EvalMethod::AlternatingSum,
            loss,
        ))
    } else {
        let v = ber_rs_no_nc_integral(n, gamma_rd)?;
        Ok(AnalyticResult::new(v, EvalMethod::Quadrature, loss))
    }
}

/// Stable route for RS-No-NC: `E[Q(sqrt(X))]` with the best-link CDF
/// `(1 - exp(-x/gamma))^N`.
pub fn ber_rs_no_nc_integral(n: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    Ok(expected_q_scaled(1.0, n, |x| {
        (-(-x / gamma_rd).exp_m1()).powi(n as i32)
    })?)
}

/// High-SNR leading term `2^(N-1) Gamma(N + 1/2) / sqrt(pi) * gamma^(-N)`.
pub fn ber_rs_no_nc_asymptotic(n: u32, gamma_rd: f64) -> f64 {
    assert!(n >= 1 && gamma_rd > 0.0);
    ((n as f64 - 1.0) * std::f64::consts::LN_2 + ln_gamma(n as f64 + 0.5)
        - 0.5 * PI.ln()
        - n as f64 * gamma_rd.ln())
    .exp()
}

// ---------------------------------------------------------------------------
// Gains and asymptotic helpers
// ---------------------------------------------------------------------------

/// Asymptotic BER reduction of a selection scheme relative to NC-No-RS
/// (the coefficient ratio of the two leading terms), computed in log space:
///
/// * S-RS-NC: `N! 2^(N-1) / N^N`
/// * D-RS-NC: `(N-1)! (2^N - 1) / N^N`
/// * RS-No-NC: `N! 2^N / N^N`
pub fn table1_gain(scheme: StrategyKind, n: u32) -> Result<f64, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::InvalidRelayCount);
    }
    let nf = n as f64;
    let ln = match scheme {
        StrategyKind::MinMaxSingle => {
            ln_gamma(nf + 1.0) + (nf - 1.0) * std::f64::consts::LN_2 - nf * nf.ln()
        }
        StrategyKind::DoubleMax => {
            let ln_2n_m1 = nf * std::f64::consts::LN_2 + (-(2f64).powi(-(n as i32))).ln_1p();
            ln_gamma(nf) + ln_2n_m1 - nf * nf.ln()
        }
        StrategyKind::DoubleMaxNoNc => {
            ln_gamma(nf + 1.0) + nf * std::f64::consts::LN_2 - nf * nf.ln()
        }
        other => return Err(AnalyticError::UnsupportedScheme(other)),
    };
    Ok(ln.exp())
}

/// Leading-order expectation from a PDF first-order expansion
/// `f_X(x) = a x^N / gamma^(N+1) + o(x^(N+eps))`:
///
/// `E[Q(sqrt(bX))] ~ 2^N a Gamma(N + 3/2) / (sqrt(pi) (N+1)) (b gamma)^-(N+1)`
pub fn asymptotic_from_pdf_expansion(a: f64, n_order: u32, b: f64, gamma: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0 && gamma > 0.0);
    let nf = n_order as f64;
    (nf * std::f64::consts::LN_2 + a.ln() + ln_gamma(nf + 1.5)
        - 0.5 * PI.ln()
        - (nf + 1.0).ln()
        - (nf + 1.0) * (b.ln() + gamma.ln()))
    .exp()
}

// ---------------------------------------------------------------------------
// MGF of Z = gamma_(N) + gamma_(q)
// ---------------------------------------------------------------------------

fn mgf_product(n: u32, q: u32, gamma_rd: f64, s: f64) -> f64 {
    let mut out = 1.0;
    for k in 1..=n {
        let lam = (n - k + 1) as f64 / gamma_rd;
        let shift = if k <= q { 2.0 * s } else { s };
        out *= lam / (lam - shift);
    }
    out
}

fn mgf_smallest_pole(n: u32, q: u32, gamma_rd: f64) -> f64 {
    // first spacing group poles at (N-k+1)/(2 gamma) for k <= q, second at
    // (N-k+1)/gamma for k > q
    let first = (n - q + 1) as f64 / (2.0 * gamma_rd);
    let second = 1.0 / gamma_rd;
    first.min(second)
}

/// Product-form MGF of `Z = gamma_(N) + gamma_(q)` (sum of the largest and
/// the q-th largest of N i.i.d. mean-`gamma_rd` exponentials), via the
/// independent-spacings representation `Z = 2 sum_{k<=q} w_k +
/// sum_{k>q} w_k` with `w_l ~ Exp((N-l+1)/gamma_rd)`.
pub fn mgf_z(s: f64, n: u32, q: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    if q < 1 || q > n.saturating_sub(1) {
        return Err(AnalyticError::InvalidMgfOrder { n, q });
    }
    let pole = mgf_smallest_pole(n, q, gamma_rd);
    if s >= pole * (1.0 - 1e-9) {
        return Err(AnalyticError::PoleProximity { s, pole });
    }
    Ok(mgf_product(n, q, gamma_rd, s))
}

/// Partial-fraction form of [`mgf_z`] (the expanded double sum). Exposed for
/// the dual-evaluation check; the product form is the stable one.
pub fn mgf_z_partial_fraction(s: f64, n: u32, q: u32, gamma_rd: f64) -> Result<f64, AnalyticError> {
    validate(n, gamma_rd)?;
    if q < 1 || q > n.saturating_sub(1) {
        return Err(AnalyticError::InvalidMgfOrder { n, q });
    }
    let pole = mgf_smallest_pole(n, q, gamma_rd);
    if s >= pole * (1.0 - 1e-9) {
        return Err(AnalyticError::PoleProximity { s, pole });
    }
    let g = gamma_rd;
    let mut total = 0.0;
    for k in 1..=q {
        for p in (q + 1)..=n {
            let mut den = 1.0f64;
            for j in 1..=q {
                if j != k {
                    den *= j as f64 - k as f64;
                }
            }
            for m in (q + 1)..=n {
                if m != p {
                    den *= m as f64 - p as f64;
                }
            }
            let a_k = (n - k + 1) as f64 / (2.0 * g);
            let b_p = (n - p + 1) as f64 / g;
            total += 1.0 / (den * (s - a_k) * (s - b_p));
        }
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * (ln_gamma(n as f64 + 1.0)).exp() / (2.0 * g * g) * total)
}
