//! Exact samplers for every law the engine needs.
//!
//! None of these kernels discretise time. Each one is an inverse-CDF or
//! rejection construction from a closed-form density, so each admits a
//! goodness-of-fit test against that same closed form:
//!
//! * first passage of the origin:        τ = x₀²/Z²
//! * inverse local time at level l:      σ(l) = l²/Z²
//! * branch budget:                      Exp(β) in local time
//! * (position, local time) given alive: two-stage inverse CDF from the joint
//!   density (|x|+l)/√(2πΔ³)·exp(−(|x|+l)²/(2Δ))
//! * position given the origin was never hit: rejection with the reflection
//!   weight 1 − e^{−2|x₀||w|/Δ}

use crate::rng::RunRng;
use crate::special::{normal_cdf, normal_quantile};
use thiserror::Error;

/// Joint draw of position and local time for one particle age.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointPositionLocalTime {
    pub x: f64,
    pub l: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("truncation horizon must be positive, got {0}")]
    NonPositiveTmax(f64),
    #[error("local-time level must be nonnegative, got {0}")]
    NegativeLevel(f64),
    #[error("rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("age delta must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("local-time budget must be positive, got {0}")]
    NonPositiveBudget(f64),
    #[error("start position must be nonzero for this kernel")]
    ZeroStart,
}

/// CDF of the first passage time of the origin from x₀: P(τ ≤ s) = 2Φ(−|x₀|/√s).
pub fn first_passage_cdf(x0: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if x0 == 0.0 {
        return 1.0;
    }
    2.0 * normal_cdf(-x0.abs() / s.sqrt())
}

/// CDF of the inverse local time σ(l); identical to the first-passage CDF with
/// the level in place of the start position.
pub fn inverse_local_time_cdf(l: f64, s: f64) -> f64 {
    first_passage_cdf(l, s)
}

/// First hitting time of the origin from `x0`, sampled exactly as τ = x₀²/Z².
pub fn sample_first_passage(x0: f64, rng: &mut RunRng) -> f64 {
    if x0 == 0.0 {
        return 0.0;
    }
    let z = rng.standard_normal();
    (x0 / z).powi(2)
}

/// First passage from `x0` conditioned on τ ≤ `t_max`, by inverse CDF.
pub fn sample_first_passage_truncated(
    x0: f64,
    t_max: f64,
    rng: &mut RunRng,
) -> Result<f64, SampleError> {
    if !(t_max > 0.0) {
        return Err(SampleError::NonPositiveTmax(t_max));
    }
    if x0 == 0.0 {
        return Err(SampleError::ZeroStart);
    }
    Ok(first_passage_from_cdf_window(
        x0,
        0.0,
        first_passage_cdf(x0, t_max),
        rng,
    ))
}

/// Inverse-CDF draw of τ restricted to the window (F⁻¹(f_lo), F⁻¹(f_hi)].
///
/// The engine refines the root's hit time interval by interval, so it needs
/// both endpoints; the public truncated sampler is the f_lo = 0 case.
pub(crate) fn first_passage_from_cdf_window(
    x0: f64,
    f_lo: f64,
    f_hi: f64,
    rng: &mut RunRng,
) -> f64 {
    debug_assert!((0.0..=1.0).contains(&f_lo) && f_lo <= f_hi && f_hi <= 1.0);
    let u = f_lo + rng.uniform_open() * (f_hi - f_lo);
    let q = normal_quantile(1.0 - 0.5 * u);
    (x0 / q).powi(2)
}

/// First time the local time at the origin reaches level `l`: σ(l) = l²/Z².
pub fn sample_inverse_local_time(l: f64, rng: &mut RunRng) -> Result<f64, SampleError> {
    if l < 0.0 {
        return Err(SampleError::NegativeLevel(l));
    }
    if l == 0.0 {
        return Ok(0.0);
    }
    let z = rng.standard_normal();
    Ok((l / z).powi(2))
}

/// Local-time budget at which a particle branches: Exp(β).
pub fn sample_branch_budget(beta: f64, rng: &mut RunRng) -> Result<f64, SampleError> {
    if !(beta > 0.0) {
        return Err(SampleError::NonPositiveRate(beta));
    }
    Ok(rng.exponential(beta))
}

/// Joint (position, local time) of a Brownian path from the origin at age
/// `delta`, conditioned on not having exhausted its local-time `budget`.
///
/// Stage (i) draws L from its |N(0, Δ)| marginal truncated to [0, budget) by
/// inverse CDF; stage (ii) draws U = |X| + L from its Rayleigh(√Δ) law
/// truncated to [L, ∞); the sign of the position is an independent fair coin.
pub fn sample_position_given_alive(
    delta: f64,
    budget: f64,
    rng: &mut RunRng,
) -> Result<JointPositionLocalTime, SampleError> {
    if !(delta > 0.0) {
        return Err(SampleError::NonPositiveDelta(delta));
    }
    if !(budget > 0.0) {
        return Err(SampleError::NonPositiveBudget(budget));
    }
    let sqrt_delta = delta.sqrt();
    let u = rng.uniform_open();
    let l = sqrt_delta
        * normal_quantile(0.5 * (1.0 + u * (2.0 * normal_cdf(budget / sqrt_delta) - 1.0)));
    let v = rng.uniform_open();
    let reach = truncated_rayleigh(l, delta, v);
    let x = rng.sign() * (reach - l);
    Ok(JointPositionLocalTime { x, l })
}

/// Inverse CDF of U = |X| + L given L = l: Rayleigh(√Δ) truncated to [l, ∞).
fn truncated_rayleigh(l: f64, delta: f64, v: f64) -> f64 {
    (l * l - 2.0 * delta * v.ln()).sqrt()
}

/// CDF of the position marginal of [`sample_position_given_alive`]:
/// P(X_Δ ≤ x | L_Δ < budget), integrated in closed form from the joint
/// density. For x ≥ 0, P(X > x, L < b) = Φ((x+b)/√Δ) − Φ(x/√Δ).
pub fn position_given_alive_cdf(delta: f64, budget: f64, x: f64) -> f64 {
    let sd = delta.sqrt();
    let norm = 2.0 * normal_cdf(budget / sd) - 1.0;
    if x >= 0.0 {
        1.0 - (normal_cdf((x + budget) / sd) - normal_cdf(x / sd)) / norm
    } else {
        (normal_cdf((budget - x) / sd) - normal_cdf(-x / sd)) / norm
    }
}

/// CDF of [`sample_position_no_hit`]: the reflection-principle law
/// (φ_Δ(w−x₀) − φ_Δ(w+x₀)) / P(τ₀ > Δ) integrated over sign(x₀)·w > 0.
pub fn position_no_hit_cdf(x0: f64, delta: f64, w: f64) -> f64 {
    let sd = delta.sqrt();
    let a = x0.abs();
    let norm = 2.0 * normal_cdf(a / sd) - 1.0;
    if x0 > 0.0 {
        if w <= 0.0 {
            return 0.0;
        }
        (normal_cdf((w - a) / sd) - normal_cdf(-a / sd) - normal_cdf((w + a) / sd)
            + normal_cdf(a / sd))
            / norm
    } else {
        1.0 - position_no_hit_cdf(-x0, delta, -w)
    }
}

/// Position at age `delta` of a Brownian path from `x0` ≠ 0 conditioned on
/// never having hit the origin, by rejection from the free proposal.
///
/// The acceptance rate equals P(τ₀ > Δ), which degrades for |x₀| ≪ √Δ; the
/// engine only routes the root through this kernel.
pub fn sample_position_no_hit(x0: f64, delta: f64, rng: &mut RunRng) -> Result<f64, SampleError> {
    if x0 == 0.0 {
        return Err(SampleError::ZeroStart);
    }
    if !(delta > 0.0) {
        return Err(SampleError::NonPositiveDelta(delta));
    }
    let sqrt_delta = delta.sqrt();
    loop {
        let w = x0 + sqrt_delta * rng.standard_normal();
        if (w > 0.0) != (x0 > 0.0) || w == 0.0 {
            continue;
        }
        let accept = 1.0 - (-2.0 * x0.abs() * w.abs() / delta).exp();
        if rng.uniform_open() < accept {
            return Ok(w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_passage_from_origin_is_zero() {
        let mut rng = RngStream::new(1, 0).rng();
        assert_eq!(sample_first_passage(0.0, &mut rng), 0.0);
    }

    #[test]
    fn inverse_local_time_zero_level() {
        let mut rng = RngStream::new(1, 0).rng();
        assert_eq!(sample_inverse_local_time(0.0, &mut rng).unwrap(), 0.0);
        assert!(sample_inverse_local_time(-0.1, &mut rng).is_err());
    }

    #[test]
    fn budget_rejects_bad_rate() {
        let mut rng = RngStream::new(1, 0).rng();
        assert!(sample_branch_budget(0.0, &mut rng).is_err());
        assert!(sample_branch_budget(-2.0, &mut rng).is_err());
        assert!(sample_branch_budget(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn truncated_first_passage_respects_support() {
        let mut rng = RngStream::new(2, 0).rng();
        for _ in 0..20_000 {
            let tau = sample_first_passage_truncated(1.5, 0.75, &mut rng).unwrap();
            assert!(tau > 0.0 && tau <= 0.75);
        }
        assert!(sample_first_passage_truncated(1.0, 0.0, &mut rng).is_err());
        assert!(sample_first_passage_truncated(0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn rayleigh_boundary_uniform_gives_zero_displacement() {
        // v = 1 is the truncation boundary: U = l exactly, so x = 0.
        assert_eq!(truncated_rayleigh(0.7, 1.3, 1.0), 0.7);
    }

    #[test]
    fn position_given_alive_respects_budget_and_errors() {
        let mut rng = RngStream::new(3, 0).rng();
        for _ in 0..20_000 {
            let j = sample_position_given_alive(1.0, 0.5, &mut rng).unwrap();
            assert!(j.l >= 0.0 && j.l < 0.5, "local time {} outside budget", j.l);
            assert!(j.x.is_finite());
        }
        assert!(sample_position_given_alive(0.0, 1.0, &mut rng).is_err());
        assert!(sample_position_given_alive(1.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn no_hit_keeps_the_sign() {
        let mut rng = RngStream::new(4, 0).rng();
        for _ in 0..5_000 {
            assert!(sample_position_no_hit(1.0, 1.0, &mut rng).unwrap() > 0.0);
            assert!(sample_position_no_hit(-1.0, 1.0, &mut rng).unwrap() < 0.0);
        }
        assert!(sample_position_no_hit(0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn cdf_helpers_match_known_points() {
        // P(τ ≤ 1 | x₀ = 1) = 2(1 − Φ(1))
        assert_abs_diff_eq!(
            first_passage_cdf(1.0, 1.0),
            0.3173105078629141028295349087359241550442,
            epsilon = 1e-13
        );
        assert_eq!(first_passage_cdf(1.0, 0.0), 0.0);
        assert_eq!(first_passage_cdf(0.0, 0.5), 1.0);
        assert_eq!(
            inverse_local_time_cdf(1.0, 1.0),
            first_passage_cdf(-1.0, 1.0)
        );
    }

    #[test]
    fn identical_streams_give_identical_draws() {
        let mut a = RngStream::new(9, 5).rng();
        let mut b = RngStream::new(9, 5).rng();
        for _ in 0..200 {
            assert_eq!(
                sample_first_passage(2.0, &mut a).to_bits(),
                sample_first_passage(2.0, &mut b).to_bits()
            );
            let ja = sample_position_given_alive(0.7, 1.3, &mut a).unwrap();
            let jb = sample_position_given_alive(0.7, 1.3, &mut b).unwrap();
            assert_eq!(ja, jb);
        }
    }
}
