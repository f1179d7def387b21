//! Closed-form and quadrature ground truth for the particle system's moments.
//!
//! Everything here is independent of the simulation path: first and second
//! moments of the number of particles above a level, the population growth
//! curve and its derivative, the second-moment constant C = 2(1 + √2), the
//! Paley–Zygmund/Markov sandwich for the rightmost particle, and the plug-in
//! mixture-of-Gumbel CDF.

use crate::quad::{integrate, integrate_to_inf, QuadError};
use crate::special::normal_cdf;
use crate::types::ModelParams;
use std::f64::consts::PI;
use thiserror::Error;

/// A number together with a bound on its numerical error. Closed forms report
/// `abs_error = 0`; quadratures report the accumulated panel estimate plus any
/// truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub abs_error: f64,
}

impl OracleValue {
    fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error: 0.0,
        }
    }
}

/// A level query: offset `y` relative to the front βt/2, with the absolute
/// level λ = βt/2 + y kept alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelQuery {
    pub t: f64,
    pub y: f64,
    pub lambda: f64,
}

impl LevelQuery {
    pub fn new(params: &ModelParams, y: f64) -> Self {
        Self {
            t: params.t,
            y,
            lambda: params.front() + y,
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),
    #[error("time argument must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("level must be nonnegative, got {0}")]
    NegativeLevel(f64),
    #[error("level βt/2 + y = {lambda} must be positive (t > -2y/β required)")]
    LevelBelowZero { lambda: f64 },
    #[error("martingale sample set is empty")]
    EmptySample,
    #[error("martingale samples must be positive, got {0}")]
    NonPositiveSample(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Expected number of particles at or above level λ ≥ 0 at time t, started at
/// the origin: E|N_t^λ| = Φ(β√t − λ/√t)·e^{β²t/2 − βλ}.
pub fn expected_count(params: &ModelParams, lambda: f64) -> Result<OracleValue, OracleError> {
    if !(params.t > 0.0) {
        return Err(OracleError::NonPositiveHorizon(params.t));
    }
    if lambda < 0.0 {
        return Err(OracleError::NegativeLevel(lambda));
    }
    Ok(OracleValue::exact(first_moment_at(
        params.beta,
        params.t,
        lambda,
    )))
}

/// Same first moment at level λ = βt/2 + y, in the front-centred form
/// Φ(β√t/2 − y/√t)·e^{−βy} which stays finite for large t.
pub fn expected_count_front(params: &ModelParams, y: f64) -> Result<OracleValue, OracleError> {
    if !(params.t > 0.0) {
        return Err(OracleError::NonPositiveHorizon(params.t));
    }
    let lambda = params.front() + y;
    if lambda < 0.0 {
        return Err(OracleError::LevelBelowZero { lambda });
    }
    Ok(OracleValue::exact(first_moment_front(
        params.beta,
        params.t,
        y,
    )))
}

fn first_moment_at(beta: f64, t: f64, lambda: f64) -> f64 {
    let rt = t.sqrt();
    normal_cdf(beta * rt - lambda / rt) * (0.5 * beta * beta * t - beta * lambda).exp()
}

// E|N_τ^{βτ/2 + y}| = Φ(β√τ/2 − y/√τ)·e^{−βy}; exponent never grows with τ.
fn first_moment_front(beta: f64, tau: f64, y: f64) -> f64 {
    let rt = tau.sqrt();
    normal_cdf(0.5 * beta * rt - y / rt) * (-beta * y).exp()
}

/// Expected total population E|N_t| = 2Φ(β√t)·e^{β²t/2}.
pub fn expected_population(params: &ModelParams) -> OracleValue {
    let t = params.t;
    if t == 0.0 {
        return OracleValue::exact(1.0);
    }
    OracleValue::exact(
        2.0 * normal_cdf(params.beta * t.sqrt()) * (0.5 * params.beta * params.beta * t).exp(),
    )
}

/// Derivative of the population growth curve,
/// d/ds [2Φ(β√s)e^{β²s/2}] = β/√(2πs) + β²Φ(β√s)e^{β²s/2}.
pub fn growth_derivative(beta: f64, s: f64) -> Result<OracleValue, OracleError> {
    if !(s > 0.0) {
        return Err(OracleError::NonPositiveTime(s));
    }
    let v = beta / (2.0 * PI * s).sqrt()
        + beta * beta * normal_cdf(beta * s.sqrt()) * (0.5 * beta * beta * s).exp();
    Ok(OracleValue::exact(v))
}

/// Quadrature tolerance for the moment integrals.
const QUAD_TOL: f64 = 1e-9;

/// Second moment E[|N_t^{βt/2+y}|²] via the two-spine reduction:
/// m₁(t) + 2∫₀ᵗ m₁(t−s)²·(growth derivative)(s) ds, with the level βt/2 + y
/// held fixed. The substitution s = u² removes the 1/√s endpoint singularity.
pub fn second_moment_count(params: &ModelParams, y: f64) -> Result<OracleValue, OracleError> {
    if !(params.t > 0.0) {
        return Err(OracleError::NonPositiveHorizon(params.t));
    }
    let level = LevelQuery::new(params, y);
    if level.lambda <= 0.0 {
        return Err(OracleError::LevelBelowZero {
            lambda: level.lambda,
        });
    }
    let beta = params.beta;
    let t = params.t;
    // m₁ at time t−s and fixed level λ: front-centred with offset βs/2 + y.
    let m1_shifted = move |s: f64| first_moment_front(beta, t - s, 0.5 * beta * s + y);
    let integrand = move |u: f64| {
        let s = u * u;
        if s >= t {
            return 0.0;
        }
        let m1 = m1_shifted(s);
        // g'(u²)·2u with the 1/√s factor cancelled analytically.
        let gd = 2.0 * beta / (2.0 * PI).sqrt()
            + 2.0 * u * beta * beta * normal_cdf(beta * u) * (0.5 * beta * beta * s).exp();
        m1 * m1 * gd
    };
    let q = integrate(&integrand, 0.0, t.sqrt(), QUAD_TOL)?;
    let m1_t = first_moment_front(beta, t, y);
    Ok(OracleValue {
        value: m1_t + 2.0 * q.value,
        abs_error: 2.0 * q.abs_err,
    })
}

/// Generic two-spine second moment for weights f, g with first-moment curves
/// supplied as callbacks:
/// E[(Σf)(Σg)](t) = S_fg(t) + 2∫₀ᵗ S_f(t−s)·S_g(t−s)·(growth derivative)(s) ds.
pub fn second_moment_generic(
    beta: f64,
    t: f64,
    s_f: impl Fn(f64) -> f64,
    s_g: impl Fn(f64) -> f64,
    s_fg_at_t: f64,
) -> Result<OracleValue, OracleError> {
    if !(t > 0.0) {
        return Err(OracleError::NonPositiveHorizon(t));
    }
    let integrand = move |u: f64| {
        let s = u * u;
        if s >= t {
            return 0.0;
        }
        let gd = 2.0 * beta / (2.0 * PI).sqrt()
            + 2.0 * u * beta * beta * normal_cdf(beta * u) * (0.5 * beta * beta * s).exp();
        s_f(t - s) * s_g(t - s) * gd
    };
    let q = integrate(&integrand, 0.0, t.sqrt(), QUAD_TOL)?;
    Ok(OracleValue {
        value: s_fg_at_t + 2.0 * q.value,
        abs_error: 2.0 * q.abs_err,
    })
}

/// Second moment of the additive martingale, E[M_t²], through the generic
/// two-spine form with f = g = e^{−β|·|}. Finite for all t and tending to
/// C = 2(1 + √2) as t → ∞.
///
/// The e^{−β²t} normalisation is folded into the callbacks so the integrand
/// stays of order one at large horizons.
pub fn martingale_second_moment(beta: f64, t: f64) -> Result<OracleValue, OracleError> {
    if t == 0.0 {
        return Ok(OracleValue::exact(1.0));
    }
    let b2 = beta * beta;
    // First-moment curve of M: E[M_τ] = 1, so e^{−β²t/2}·S_f(τ) = e^{β²(τ−t)/2}.
    let s_f = move |tau: f64| (0.5 * b2 * (tau - t)).exp();
    // e^{−β²t}·S_{f²} with f² = e^{−2β|·|}, integrated in closed form against
    // the joint (position, local time) density:
    // (2/3)·[e^{−β²t/2}Φ(β√t) + 2e^{β²t}(1 − Φ(2β√t))].
    let rt = t.sqrt();
    let far_tail = if 2.0 * beta * rt > 38.0 {
        // The survival factor underflows before the exponential overflows;
        // the product is ≤ e^{−β²t} and irrelevant here.
        0.0
    } else {
        2.0 * (b2 * t).exp() * crate::special::normal_sf(2.0 * beta * rt)
    };
    let s_ff_scaled = 2.0 / 3.0 * ((-0.5 * b2 * t).exp() * normal_cdf(beta * rt) + far_tail);
    second_moment_generic(beta, t, s_f, s_f, s_ff_scaled)
}

/// The constant C = 2∫₀^∞ e^{−β²s}·(growth derivative)(s) ds bounding the
/// second moment. Equals 2(1 + √2) for every β.
pub fn constant_c(beta: f64) -> Result<OracleValue, OracleError> {
    if !(beta > 0.0) {
        return Err(OracleError::NonPositiveTime(beta));
    }
    // s = u² substitution, fully expanded:
    // 4β/√(2π)·e^{−β²u²} + 4β²u·Φ(βu)·e^{−β²u²/2}
    let integrand = move |u: f64| {
        4.0 * beta / (2.0 * PI).sqrt() * (-beta * beta * u * u).exp()
            + 4.0 * beta * beta * u * normal_cdf(beta * u) * (-0.5 * beta * beta * u * u).exp()
    };
    let q = integrate_to_inf(&integrand, 0.0, QUAD_TOL)?;
    Ok(OracleValue {
        value: q.value,
        abs_error: q.abs_err,
    })
}

/// Paley–Zygmund lower and Markov upper bound on P(R_t > βt/2 + y):
/// lower = e^{−βy}(1 − C·e^{−βy})·Φ(β√t/2 − y/√t)², upper = e^{−βy}.
/// A negative lower bound is vacuous but reported as-is.
pub fn rightmost_bounds(
    params: &ModelParams,
    y: f64,
) -> Result<(OracleValue, OracleValue), OracleError> {
    if !(params.t > 0.0) {
        return Err(OracleError::NonPositiveHorizon(params.t));
    }
    let level = LevelQuery::new(params, y);
    if level.lambda <= 0.0 {
        return Err(OracleError::LevelBelowZero {
            lambda: level.lambda,
        });
    }
    let c = constant_c(params.beta)?;
    let ey = (-params.beta * y).exp();
    let rt = params.t.sqrt();
    let phi2 = normal_cdf(0.5 * params.beta * rt - y / rt).powi(2);
    let lower = ey * (1.0 - c.value * ey) * phi2;
    Ok((
        OracleValue {
            value: lower,
            abs_error: c.abs_error * ey * ey * phi2,
        },
        OracleValue::exact(ey),
    ))
}

/// Asymptotic value of P^{x₀}(R_t ≤ βt/2 + z): 1 − e^{−β|x₀| − βz}.
pub fn prop6_estimate(beta: f64, x0: f64, z: f64) -> f64 {
    1.0 - (-beta * x0.abs() - beta * z).exp()
}

/// Plug-in mixture-of-Gumbel CDF from martingale samples:
/// Ĝ(y) = (1/n)·Σᵢ exp(−mᵢ·e^{−βy}).
pub fn gumbel_mixture_cdf(beta: f64, y: f64, m_samples: &[f64]) -> Result<f64, OracleError> {
    if m_samples.is_empty() {
        return Err(OracleError::EmptySample);
    }
    let w = (-beta * y).exp();
    let mut sum = 0.0;
    for &m in m_samples {
        if !(m > 0.0) {
            return Err(OracleError::NonPositiveSample(m));
        }
        sum += (-m * w).exp();
    }
    Ok(sum / m_samples.len() as f64)
}
