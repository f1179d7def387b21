//! Post-processing of run ensembles into the statistics under test: empirical
//! CDFs, Kolmogorov–Smirnov distances, the limit-law comparison between the
//! centred maximum and the plug-in Gumbel mixture, the first-passage estimate
//! check, and the martingale convergence report.

use crate::engine::{run_ensemble, run_ensemble_map, EngineError, EnsembleConfig};
use crate::oracles::{gumbel_mixture_cdf, prop6_estimate, OracleError};
use crate::types::ModelParams;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("sample set is empty")]
    EmptySample,
    #[error("samples contain a non-finite value")]
    NonFiniteSample,
    #[error("y grid must be nonempty and sorted")]
    BadGrid,
    #[error("intermediate time {s} must lie strictly inside (0, t = {t})")]
    BadIntermediate { s: f64, t: f64 },
    #[error("checkpoints must be sorted and strictly below the horizon")]
    BadCheckpoints,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Empirical CDF over a sorted sample; evaluation is right-continuous.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self, EstimatorError> {
        if samples.is_empty() {
            return Err(EstimatorError::EmptySample);
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(EstimatorError::NonFiniteSample);
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// F̂(y) = #{samples ≤ y} / n.
    pub fn eval(&self, y: f64) -> f64 {
        let k = self.sorted.partition_point(|&v| v <= y);
        k as f64 / self.sorted.len() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

/// Sup-norm distance between two CDF evaluations over the pooled sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n_effective: f64,
}

/// One-sample KS distance against a reference CDF: the sup of |F̂ − G| with
/// both functions evaluated (right-continuously) at the sample points.
pub fn ks_distance<F: Fn(f64) -> f64>(ecdf: &Ecdf, cdf: F) -> KsResult {
    let n = ecdf.n() as f64;
    let samples = ecdf.samples();
    let mut d = 0.0f64;
    let mut i = 0;
    while i < samples.len() {
        let x = samples[i];
        let mut j = i + 1;
        while j < samples.len() && samples[j] == x {
            j += 1;
        }
        d = d.max((cdf(x) - j as f64 / n).abs());
        i = j;
    }
    KsResult {
        statistic: d,
        n_effective: n,
    }
}

/// KS distance restricted to the window `[lo, hi]`: the sup over the sample
/// points inside the window plus the window endpoints.
pub fn ks_distance_window<F: Fn(f64) -> f64>(ecdf: &Ecdf, cdf: F, lo: f64, hi: f64) -> KsResult {
    let n = ecdf.n() as f64;
    let samples = ecdf.samples();
    let mut d = (cdf(lo) - ecdf.eval(lo))
        .abs()
        .max((cdf(hi) - ecdf.eval(hi)).abs());
    let mut i = samples.partition_point(|&v| v < lo);
    while i < samples.len() && samples[i] <= hi {
        let x = samples[i];
        let mut j = i + 1;
        while j < samples.len() && samples[j] == x {
            j += 1;
        }
        d = d.max((cdf(x) - j as f64 / n).abs());
        i = j;
    }
    KsResult {
        statistic: d,
        n_effective: n,
    }
}

/// Two-sample KS distance, with the usual effective size nm/(n+m).
pub fn ks_two_sample(a: &Ecdf, b: &Ecdf) -> KsResult {
    let mut d = 0.0f64;
    for &x in a.samples() {
        d = d.max((a.eval(x) - b.eval(x)).abs());
    }
    for &x in b.samples() {
        d = d.max((a.eval(x) - b.eval(x)).abs());
    }
    let (n, m) = (a.n() as f64, b.n() as f64);
    KsResult {
        statistic: d,
        n_effective: n * m / (n + m),
    }
}

/// Asymptotic KS critical value at level `alpha` for effective size `n_eff`:
/// c(α)·√(1/n_eff) with c from the Kolmogorov distribution.
pub fn ks_critical_value(alpha: f64, n_eff: f64) -> f64 {
    // c(α) = sqrt(-ln(α/2)/2); c(0.01) ≈ 1.6276.
    ((-(alpha / 2.0).ln()) / 2.0).sqrt() / n_eff.sqrt()
}

/// One row of the limit-law table: the empirical CDF of the centred maximum
/// and the plug-in mixture CDF evaluated at the same offset.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theorem1Row {
    pub y: f64,
    pub ecdf_value: f64,
    pub mixture_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub rows: Vec<Theorem1Row>,
    /// KS distance over the window spanned by the y grid.
    pub ks: KsResult,
    pub n_runs: u64,
    pub s_intermediate: f64,
}

/// Runs an ensemble and compares the empirical law of R_t − βt/2 with the
/// mixture CDF built from the same runs' intermediate-time martingale values.
#[allow(clippy::too_many_arguments)]
pub fn theorem1_test(
    params: &ModelParams,
    n_runs: u64,
    s_intermediate: f64,
    y_grid: &[f64],
    base_seed: u64,
    parallelism: usize,
    population_cap: u64,
) -> Result<Theorem1Report, EstimatorError> {
    if !(s_intermediate > 0.0 && s_intermediate < params.t) {
        return Err(EstimatorError::BadIntermediate {
            s: s_intermediate,
            t: params.t,
        });
    }
    if y_grid.is_empty() || y_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(EstimatorError::BadGrid);
    }
    let cfg = EnsembleConfig {
        params: *params,
        n_runs,
        base_seed,
        parallelism,
        population_cap,
        s_intermediate: Some(s_intermediate),
    };
    let summaries = run_ensemble(&cfg)?.into_complete()?;
    let m_samples: Vec<f64> = summaries
        .iter()
        .map(|r| r.m_s.expect("requested"))
        .collect();
    let centred: Vec<f64> = summaries.iter().map(|r| r.r_centered).collect();
    let ecdf = Ecdf::new(centred)?;
    let beta = params.beta;
    let mixture =
        |y: f64| gumbel_mixture_cdf(beta, y, &m_samples).expect("samples checked positive");
    let rows = y_grid
        .iter()
        .map(|&y| Theorem1Row {
            y,
            ecdf_value: ecdf.eval(y),
            mixture_value: mixture(y),
        })
        .collect();
    let ks = ks_distance_window(&ecdf, mixture, y_grid[0], *y_grid.last().expect("nonempty"));
    Ok(Theorem1Report {
        rows,
        ks,
        n_runs,
        s_intermediate,
    })
}

/// Empirical vs predicted P^{x₀}(R_t ≤ βt/2 + z), with a binomial z-score
/// computed under the predicted probability.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Prop6Result {
    pub z: f64,
    pub empirical: f64,
    pub predicted: f64,
    pub z_score: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn prop6_test(
    beta: f64,
    x0: f64,
    z: f64,
    t: f64,
    n_runs: u64,
    base_seed: u64,
    parallelism: usize,
    population_cap: u64,
) -> Result<Prop6Result, EstimatorError> {
    let params = ModelParams::new(beta, x0, t).map_err(EngineError::from)?;
    let cfg = EnsembleConfig {
        params,
        n_runs,
        base_seed,
        parallelism,
        population_cap,
        s_intermediate: None,
    };
    let summaries = run_ensemble(&cfg)?.into_complete()?;
    let hits = summaries.iter().filter(|r| r.r_centered <= z).count();
    let empirical = hits as f64 / n_runs as f64;
    let predicted = prop6_estimate(beta, x0, z);
    let se = (predicted * (1.0 - predicted) / n_runs as f64).sqrt();
    let z_score = if se > 0.0 {
        (empirical - predicted) / se
    } else {
        f64::INFINITY
    };
    Ok(Prop6Result {
        z,
        empirical,
        predicted,
        z_score,
    })
}

/// Martingale statistics at one checkpoint.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MartingaleCheckpoint {
    pub s: f64,
    pub mean_m: f64,
    pub var_m: f64,
    /// Mean of |M_s − M_t|; must shrink as s approaches t.
    pub mean_abs_gap: f64,
}

/// Per-checkpoint martingale report over an ensemble. Checkpoints must be
/// sorted and strictly below the horizon.
pub fn martingale_convergence_report(
    params: &ModelParams,
    checkpoints: &[f64],
    n_runs: u64,
    base_seed: u64,
    parallelism: usize,
    population_cap: u64,
) -> Result<Vec<MartingaleCheckpoint>, EstimatorError> {
    if checkpoints.is_empty()
        || checkpoints.windows(2).any(|w| w[0] > w[1])
        || checkpoints.iter().any(|&s| !(s >= 0.0) || s >= params.t)
    {
        return Err(EstimatorError::BadCheckpoints);
    }
    let mut snapshot_times = checkpoints.to_vec();
    snapshot_times.push(params.t);
    let per_run = run_ensemble_map(
        params,
        n_runs,
        &snapshot_times,
        base_seed,
        parallelism,
        population_cap,
        |_, run, _| {
            run.snapshots
                .iter()
                .map(|s| s.martingale)
                .collect::<Vec<f64>>()
        },
    )
    .into_complete()?;
    let n = per_run.len() as f64;
    let mut report = Vec::with_capacity(checkpoints.len());
    for (i, &s) in checkpoints.iter().enumerate() {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut gap = 0.0;
        for ms in &per_run {
            let m_s = ms[i];
            let m_t = *ms.last().expect("horizon snapshot");
            sum += m_s;
            sum_sq += m_s * m_s;
            gap += (m_s - m_t).abs();
        }
        let mean_m = sum / n;
        report.push(MartingaleCheckpoint {
            s,
            mean_m,
            var_m: (sum_sq / n - mean_m * mean_m).max(0.0),
            mean_abs_gap: gap / n,
        });
    }
    Ok(report)
}
