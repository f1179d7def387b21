//! Event-driven, exactly-sampled simulation of the catalytic branching
//! particle system.
//!
//! Branch times are generated by the two-stage mechanism — an Exp(β)
//! local-time budget followed by the inverse local time σ(l*) = l*²/Z² — so
//! the genealogy carries no time-step bias. Positions of particles alive at a
//! snapshot are drawn from the joint (position, local time) law conditioned
//! only on the event {still alive}; no death time is pre-drawn for particles
//! whose branch would fall beyond the horizon and no bridge sampling is ever
//! needed. Every snapshot is exact in law at its own time; joint path
//! consistency across snapshots for a single lifetime is deliberately not
//! preserved (the genealogy itself, including all branch times, is jointly
//! exact).

use crate::rng::{RngStream, RunRng};
use crate::sampling::{
    first_passage_cdf, first_passage_from_cdf_window, sample_position_given_alive,
    sample_position_no_hit, SampleError,
};
use crate::types::{ModelParams, ParamError};
use rayon::prelude::*;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;
use thiserror::Error;

/// Default per-run cap on the number of lifetimes, guarding against the
/// e^{β²t/2} population blowup from careless parameters.
pub const DEFAULT_POPULATION_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("population cap of {cap} lifetimes exceeded")]
    PopulationCap { cap: u64 },
    #[error("snapshot times must be finite, nonnegative, sorted, and ≤ the horizon")]
    InvalidSnapshotTimes,
    #[error("intermediate time {s} must lie in [0, t] for horizon {t}")]
    BadIntermediate { s: f64, t: f64 },
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// What became of a lifetime within the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fate {
    /// Replaced by two children at the given time (≤ horizon).
    BranchedAt(f64),
    /// Still alive when the horizon was reached.
    AliveAtHorizon,
}

/// One lifetime in the genealogy.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub birth_time: f64,
    /// 0 for every non-root particle: branching happens only at the origin.
    pub birth_position: f64,
    /// Exp(β) local-time budget. `None` only for a root started off the
    /// origin that never reached it within the horizon.
    pub budget: Option<f64>,
    /// Time from which the lifetime accumulates local time at the origin:
    /// the birth time for origin-born particles, the first-passage time for
    /// a root started elsewhere. `None` while the root has not hit.
    pub origin_time: Option<f64>,
    pub fate: Fate,
}

impl Particle {
    /// Branch time if the particle branched within the horizon.
    pub fn branch_time(&self) -> Option<f64> {
        match self.fate {
            Fate::BranchedAt(d) => Some(d),
            Fate::AliveAtHorizon => None,
        }
    }

    fn alive_at(&self, s: f64) -> bool {
        self.birth_time <= s
            && match self.fate {
                Fate::BranchedAt(d) => d > s,
                Fate::AliveAtHorizon => true,
            }
    }
}

/// The population at one observation time: freshly drawn positions for every
/// particle alive, with the derived statistics the estimators need.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub positions: Vec<f64>,
    /// max of `positions` (the population is never empty).
    pub rightmost: f64,
    /// e^{−β²t/2}·Σ_u e^{−β|x_u|}, always positive.
    pub martingale: f64,
}

impl Snapshot {
    fn new(time: f64, beta: f64, positions: Vec<f64>) -> Self {
        debug_assert!(!positions.is_empty());
        let rightmost = positions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weight: f64 = positions.iter().map(|&x| (-beta * x.abs()).exp()).sum();
        let martingale = (-0.5 * beta * beta * time).exp() * weight;
        Self {
            time,
            positions,
            rightmost,
            martingale,
        }
    }

    /// Number of particles at or above the level λ.
    pub fn count_above(&self, lambda: f64) -> usize {
        self.positions.iter().filter(|&&x| x >= lambda).count()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Result of one run: the requested snapshots plus the full genealogy.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub genealogy: Vec<Particle>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct BranchEvent {
    time: f64,
    id: u64,
}

// Heap key (time, id): exact-time ties are measure-zero but must still pop in
// a fixed order.
impl Eq for BranchEvent {}

impl Ord for BranchEvent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for BranchEvent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

struct Sim<'a> {
    params: &'a ModelParams,
    cap: u64,
    particles: Vec<Particle>,
    heap: BinaryHeap<Reverse<BranchEvent>>,
}

impl<'a> Sim<'a> {
    /// Draws the budget and candidate branch time for a lifetime that starts
    /// accumulating local time at `origin_time`, and schedules the branch if
    /// it lands within the horizon.
    fn activate(&mut self, id: u64, origin_time: f64, rng: &mut RunRng) {
        let beta = self.params.beta;
        let budget = rng.exponential(beta);
        let z = rng.standard_normal();
        let sigma = (budget / z) * (budget / z);
        let candidate = origin_time + sigma;
        let p = &mut self.particles[id as usize];
        p.budget = Some(budget);
        p.origin_time = Some(origin_time);
        if candidate <= self.params.t {
            // Subnormal σ can round the sum back onto origin_time; keep branch
            // times strictly increasing along ancestral lines.
            let branch_at = if candidate > origin_time {
                candidate
            } else {
                f64::next_up(origin_time)
            };
            p.fate = Fate::BranchedAt(branch_at);
            self.heap.push(Reverse(BranchEvent {
                time: branch_at,
                id,
            }));
        } else {
            p.fate = Fate::AliveAtHorizon;
        }
    }

    fn spawn_child(&mut self, parent: u64, time: f64, rng: &mut RunRng) -> Result<(), EngineError> {
        if self.particles.len() as u64 >= self.cap {
            return Err(EngineError::PopulationCap { cap: self.cap });
        }
        let id = self.particles.len() as u64;
        self.particles.push(Particle {
            id,
            parent_id: Some(parent),
            birth_time: time,
            birth_position: 0.0,
            budget: None,
            origin_time: None,
            fate: Fate::AliveAtHorizon,
        });
        self.activate(id, time, rng);
        Ok(())
    }

    /// Processes every scheduled branch with time ≤ `s` in (time, id) order.
    fn drain_until(&mut self, s: f64, rng: &mut RunRng) -> Result<(), EngineError> {
        while let Some(&Reverse(ev)) = self.heap.peek() {
            if ev.time > s {
                break;
            }
            self.heap.pop();
            self.spawn_child(ev.id, ev.time, rng)?;
            self.spawn_child(ev.id, ev.time, rng)?;
        }
        Ok(())
    }

    /// Draws the population at time `s`. Particles are visited in id order so
    /// the draw sequence is reproducible.
    fn take_snapshot(
        &self,
        s: f64,
        root_pre_hit: bool,
        rng: &mut RunRng,
    ) -> Result<Snapshot, EngineError> {
        let mut positions = Vec::new();
        if root_pre_hit {
            let x0 = self.params.x0;
            let x = if s == 0.0 {
                x0
            } else {
                sample_position_no_hit(x0, s, rng)?
            };
            positions.push(x);
        }
        for p in &self.particles {
            let Some(origin) = p.origin_time else {
                continue;
            };
            if !p.alive_at(s) {
                continue;
            }
            let age = s - origin;
            let budget = p.budget.expect("activated particle has a budget");
            let x = if age <= 0.0 {
                // Exactly at the origin: just born there or just hit it.
                0.0
            } else {
                sample_position_given_alive(age, budget, rng)?.x
            };
            positions.push(x);
        }
        Ok(Snapshot::new(s, self.params.beta, positions))
    }
}

/// Simulates one run to the horizon, producing an exact-law snapshot at each
/// requested time (sorted, all ≤ t) plus the genealogy.
///
/// A root off the origin is resolved boundary by boundary: before each
/// snapshot (and the horizon) a hit-vs-no-hit indicator is drawn from the
/// first-passage CDF restricted to the pending interval, and on a hit the
/// passage time comes from the matching doubly-truncated inverse CDF. Only
/// indicators and exact genealogy times are ever conditioned on.
pub fn simulate_run(
    params: &ModelParams,
    snapshot_times: &[f64],
    population_cap: u64,
    rng: &mut RunRng,
) -> Result<RunOutput, EngineError> {
    let sorted = snapshot_times.windows(2).all(|w| w[0] <= w[1]);
    let in_range = snapshot_times
        .iter()
        .all(|&s| s.is_finite() && s >= 0.0 && s <= params.t);
    if !sorted || !in_range {
        return Err(EngineError::InvalidSnapshotTimes);
    }

    let mut sim = Sim {
        params,
        cap: population_cap.max(1),
        particles: Vec::new(),
        heap: BinaryHeap::new(),
    };
    sim.particles.push(Particle {
        id: 0,
        parent_id: None,
        birth_time: 0.0,
        birth_position: params.x0,
        budget: None,
        origin_time: None,
        fate: Fate::AliveAtHorizon,
    });

    let mut root_hit = params.x0 == 0.0;
    if root_hit {
        sim.activate(0, 0.0, rng);
    }
    let mut fp_cdf_prev = 0.0;

    let mut snapshots = Vec::with_capacity(snapshot_times.len());
    let mut boundaries: Vec<(f64, bool)> = snapshot_times.iter().map(|&s| (s, true)).collect();
    if snapshot_times.last().copied() != Some(params.t) {
        boundaries.push((params.t, false));
    }

    for (s, is_snapshot) in boundaries {
        if !root_hit && s > 0.0 {
            let fp_cdf_here = first_passage_cdf(params.x0, s);
            let p_hit = (fp_cdf_here - fp_cdf_prev) / (1.0 - fp_cdf_prev);
            if rng.uniform_open() < p_hit {
                let tau =
                    first_passage_from_cdf_window(params.x0, fp_cdf_prev, fp_cdf_here, rng).min(s);
                root_hit = true;
                sim.activate(0, tau, rng);
            } else {
                fp_cdf_prev = fp_cdf_here;
            }
        }
        sim.drain_until(s, rng)?;
        if is_snapshot {
            let snap = sim.take_snapshot(s, !root_hit, rng)?;
            snapshots.push(snap);
        }
    }

    Ok(RunOutput {
        snapshots,
        genealogy: sim.particles,
    })
}

/// Per-run statistics fed to the estimators.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunSummary {
    pub run_id: u64,
    /// |N_t| at the horizon.
    pub n_particles: u64,
    /// R_t − βt/2.
    pub r_centered: f64,
    /// Martingale at the intermediate time, when one was requested.
    pub m_s: Option<f64>,
    /// Martingale at the horizon.
    pub m_t: f64,
    /// Seconds spent in this run; excluded from all determinism contracts.
    #[serde(skip)]
    pub wall_time: f64,
}

/// A run that was aborted (population cap or invalid draw), reported with its
/// run id rather than silently dropped.
#[derive(Debug)]
pub struct AbortedRun {
    pub run_id: u64,
    pub error: EngineError,
}

/// Ensemble result: per-run values in run-id order plus any aborted runs.
#[derive(Debug)]
pub struct EnsembleOutcome<T> {
    pub results: Vec<T>,
    pub aborted: Vec<AbortedRun>,
}

impl<T> EnsembleOutcome<T> {
    pub fn into_complete(self) -> Result<Vec<T>, EngineError> {
        match self.aborted.into_iter().next() {
            None => Ok(self.results),
            Some(a) => Err(a.error),
        }
    }
}

/// Ensemble execution plan. `parallelism = 0` uses the ambient thread pool.
#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub params: ModelParams,
    pub n_runs: u64,
    pub base_seed: u64,
    pub parallelism: usize,
    pub population_cap: u64,
    /// Intermediate observation time for the martingale, strictly inside (0, t).
    pub s_intermediate: Option<f64>,
}

fn with_pool<R: Send>(parallelism: usize, f: impl FnOnce() -> R + Send) -> R {
    if parallelism == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .expect("thread pool construction cannot fail for positive sizes")
            .install(f)
    }
}

/// Runs `n_runs` independent runs on substreams `base_seed × run_id` and maps
/// each finished run through `f`. Output order is run-id order regardless of
/// scheduling; failed runs are collected, never dropped.
pub fn run_ensemble_map<T, F>(
    params: &ModelParams,
    n_runs: u64,
    snapshot_times: &[f64],
    base_seed: u64,
    parallelism: usize,
    population_cap: u64,
    f: F,
) -> EnsembleOutcome<T>
where
    T: Send,
    F: Fn(u64, &RunOutput, f64) -> T + Sync,
{
    let raw: Vec<(u64, Result<T, EngineError>)> = with_pool(parallelism, || {
        (0..n_runs)
            .into_par_iter()
            .map(|run_id| {
                let mut rng = RngStream::new(base_seed, run_id).rng();
                let started = Instant::now();
                let out = simulate_run(params, snapshot_times, population_cap, &mut rng)
                    .map(|run| f(run_id, &run, started.elapsed().as_secs_f64()));
                (run_id, out)
            })
            .collect()
    });
    let mut results = Vec::with_capacity(raw.len());
    let mut aborted = Vec::new();
    for (run_id, r) in raw {
        match r {
            Ok(v) => results.push(v),
            Err(error) => aborted.push(AbortedRun { run_id, error }),
        }
    }
    EnsembleOutcome { results, aborted }
}

/// Standard ensemble: per-run summaries (|N_t|, centred maximum, martingale
/// at the intermediate time and the horizon).
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleOutcome<RunSummary>, EngineError> {
    let t = cfg.params.t;
    let mut snapshot_times = Vec::new();
    if let Some(s) = cfg.s_intermediate {
        if !(s >= 0.0 && s <= t) {
            return Err(EngineError::BadIntermediate { s, t });
        }
        snapshot_times.push(s);
    }
    snapshot_times.push(t);
    let front = cfg.params.front();
    let has_intermediate = cfg.s_intermediate.is_some();
    Ok(run_ensemble_map(
        &cfg.params,
        cfg.n_runs,
        &snapshot_times,
        cfg.base_seed,
        cfg.parallelism,
        cfg.population_cap,
        move |run_id, run, wall_time| {
            let horizon = run
                .snapshots
                .last()
                .expect("horizon snapshot always present");
            let m_s = has_intermediate.then(|| run.snapshots[0].martingale);
            RunSummary {
                run_id,
                n_particles: horizon.len() as u64,
                r_centered: horizon.rightmost - front,
                m_s,
                m_t: horizon.martingale,
                wall_time,
            }
        },
    ))
}
