//! The five subcommands. Each validates its config up front, runs, and writes
//! its table plus meta.json into the output directory.

use crate::config::{CommandKind, Config, ConfigError, OutputFormat};
use crate::output::{self, fmt_f64, fmt_opt, Meta, OutputError};
use catbbm_core::verify::{self, VerifyOptions, VerifyReport};
use catbbm_core::{
    constant_c, expected_count_front, prop6_test, rightmost_bounds, run_ensemble_map,
    second_moment_count, theorem1_test, ModelParams, Particle,
};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("simulation failed: {0}")]
    Engine(#[from] catbbm_core::EngineError),
    #[error("estimation failed: {0}")]
    Estimator(#[from] catbbm_core::EstimatorError),
    #[error("oracle evaluation failed: {0}")]
    Oracle(#[from] catbbm_core::OracleError),
}

/// Outcome handed back to main: files written, plus whether verification
/// failed (drives the exit status).
#[derive(Debug, Default)]
pub struct CommandOutcome {
    pub files: Vec<PathBuf>,
    pub verify_failed: bool,
    pub summary: String,
}

pub fn run(config: &Config) -> Result<CommandOutcome, CliError> {
    config.validate()?;
    match config.command {
        CommandKind::Simulate => cmd_simulate(config),
        CommandKind::Oracle => cmd_oracle(config),
        CommandKind::Verify => cmd_verify(config),
        CommandKind::Theorem1 => cmd_theorem1(config),
        CommandKind::Prop6 => cmd_prop6(config),
    }
}

fn model(config: &Config) -> ModelParams {
    ModelParams::new(config.beta, config.x0, config.t).expect("validated")
}

#[derive(Serialize)]
struct RunRow {
    run_id: u64,
    n_particles: u64,
    r_centered: f64,
    m_s: f64,
    m_t: f64,
}

fn cmd_simulate(config: &Config) -> Result<CommandOutcome, CliError> {
    let started = Instant::now();
    let params = model(config);
    let s = config.resolved_s_intermediate();
    let want_genealogy = config.genealogy;

    let mut snapshot_times = config.snapshot_times.clone();
    if snapshot_times.is_empty() {
        snapshot_times.push(s.min(params.t));
        snapshot_times.push(params.t);
        snapshot_times.sort_by(f64::total_cmp);
        snapshot_times.dedup();
    } else if !snapshot_times.contains(&s) || !snapshot_times.contains(&params.t) {
        snapshot_times.push(s);
        snapshot_times.push(params.t);
        snapshot_times.sort_by(f64::total_cmp);
        snapshot_times.dedup();
    }
    let s_index = snapshot_times
        .iter()
        .position(|&x| x == s)
        .expect("s inserted above");
    let front = params.front();

    let outcome = run_ensemble_map(
        &params,
        config.n_runs,
        &snapshot_times,
        config.seed,
        config.parallelism,
        config.population_cap,
        move |run_id, run, _| {
            let horizon = run.snapshots.last().expect("horizon snapshot");
            let row = RunRow {
                run_id,
                n_particles: horizon.len() as u64,
                r_centered: horizon.rightmost - front,
                m_s: run.snapshots[s_index].martingale,
                m_t: horizon.martingale,
            };
            let genealogy = want_genealogy.then(|| run.genealogy.clone());
            (row, genealogy)
        },
    );
    let aborted: Vec<u64> = outcome.aborted.iter().map(|a| a.run_id).collect();
    let rows = outcome.results;

    let dir = &config.output_path;
    let mut files = Vec::new();
    match config.output_format {
        OutputFormat::Csv => {
            files.push(output::write_csv(
                dir,
                "runs.csv",
                "run_id,n_particles,r_centered,m_s,m_t",
                rows.iter().map(|(r, _)| {
                    format!(
                        "{},{},{},{},{}",
                        r.run_id,
                        r.n_particles,
                        fmt_f64(r.r_centered),
                        fmt_f64(r.m_s),
                        fmt_f64(r.m_t)
                    )
                }),
            )?);
        }
        OutputFormat::Json => {
            let table: Vec<&RunRow> = rows.iter().map(|(r, _)| r).collect();
            files.push(output::write_json(dir, "runs.json", &table)?);
        }
    }
    if config.genealogy {
        files.push(output::write_csv(
            dir,
            "genealogy.csv",
            "run_id,particle_id,parent_id,birth_time,birth_position,origin_time,budget,branch_time",
            rows.iter().flat_map(|(r, g)| {
                g.as_deref()
                    .unwrap_or(&[])
                    .iter()
                    .map(move |p: &Particle| {
                        format!(
                            "{},{},{},{},{},{},{},{}",
                            r.run_id,
                            p.id,
                            p.parent_id.map(|v| v.to_string()).unwrap_or_default(),
                            fmt_f64(p.birth_time),
                            fmt_f64(p.birth_position),
                            fmt_opt(p.origin_time),
                            fmt_opt(p.budget),
                            fmt_opt(p.branch_time())
                        )
                    })
                    .collect::<Vec<_>>()
            }),
        )?);
    }
    let meta = Meta::new(config, started.elapsed().as_secs_f64(), aborted.clone());
    files.push(output::write_meta(dir, &meta)?);
    let summary = format!(
        "simulate: {} runs ({} aborted), horizon t = {}, wrote {}",
        rows.len(),
        aborted.len(),
        config.t,
        dir.display()
    );
    Ok(CommandOutcome {
        files,
        verify_failed: false,
        summary,
    })
}

#[derive(Serialize)]
struct OracleRow {
    beta: f64,
    t: f64,
    y: f64,
    m1: f64,
    m2: Option<f64>,
    m2_abs_err: Option<f64>,
    lower: f64,
    upper: f64,
    c: f64,
    status: String,
}

fn cmd_oracle(config: &Config) -> Result<CommandOutcome, CliError> {
    let started = Instant::now();
    let params = model(config);
    let c = constant_c(config.beta)?;
    let mut rows = Vec::new();
    for &y in &config.y_grid {
        let m1 = expected_count_front(&params, y)?.value;
        let (lower, upper) = rightmost_bounds(&params, y)?;
        // A quadrature failure marks the row and the run continues.
        let (m2, m2_abs_err, status) = match second_moment_count(&params, y) {
            Ok(v) => (Some(v.value), Some(v.abs_error), "ok".to_string()),
            Err(e) => (None, None, format!("error: {e}")),
        };
        rows.push(OracleRow {
            beta: config.beta,
            t: config.t,
            y,
            m1,
            m2,
            m2_abs_err,
            lower: lower.value,
            upper: upper.value,
            c: c.value,
            status,
        });
    }
    let dir = &config.output_path;
    let mut files = Vec::new();
    match config.output_format {
        OutputFormat::Csv => {
            files.push(output::write_csv(
                dir,
                "oracle.csv",
                "beta,t,y,m1,m2,m2_abs_err,lower,upper,C,status",
                rows.iter().map(|r| {
                    format!(
                        "{},{},{},{},{},{},{},{},{},{}",
                        fmt_f64(r.beta),
                        fmt_f64(r.t),
                        fmt_f64(r.y),
                        fmt_f64(r.m1),
                        fmt_opt(r.m2),
                        fmt_opt(r.m2_abs_err),
                        fmt_f64(r.lower),
                        fmt_f64(r.upper),
                        fmt_f64(r.c),
                        r.status
                    )
                }),
            )?);
        }
        OutputFormat::Json => files.push(output::write_json(dir, "oracle.json", &rows)?),
    }
    files.push(output::write_meta(
        dir,
        &Meta::new(config, started.elapsed().as_secs_f64(), vec![]),
    )?);
    let n_err = rows.iter().filter(|r| r.status != "ok").count();
    Ok(CommandOutcome {
        files,
        verify_failed: false,
        summary: format!("oracle: {} rows ({n_err} with errors)", rows.len()),
    })
}

/// report.json carries the execution-neutral config hash so it is
/// byte-identical across parallelism settings; the full config (including
/// execution details) lives in the meta.json written alongside.
#[derive(Serialize)]
struct ReportFile {
    config_sha256: String,
    report: VerifyReport,
}

fn cmd_verify(config: &Config) -> Result<CommandOutcome, CliError> {
    let started = Instant::now();
    let opts = VerifyOptions {
        seed: config.seed,
        parallelism: config.parallelism,
        tolerance_scale: config.tolerance_scale,
        quick: config.quick,
        population_cap: config.population_cap,
        include_limit_laws: !config.skip_limit_laws,
    };
    let report = verify::run_all(&opts);
    let mut lines = String::new();
    for c in &report.criteria {
        let status = if c.passed { "PASS" } else { "FAIL" };
        lines.push_str(&format!("{} {}: {}\n", status, c.id, c.name));
        if let Some(err) = &c.infrastructure_error {
            lines.push_str(&format!("       infrastructure error: {err}\n"));
        }
        for ch in c.checks.iter().filter(|ch| !ch.passed) {
            lines.push_str(&format!(
                "       failed: {} = {} outside [{}, {}]\n",
                ch.name, ch.measured, ch.lo, ch.hi
            ));
        }
    }
    let failed = !report.passed;
    let dir = &config.output_path;
    let file = ReportFile {
        config_sha256: output::semantic_config_hash(config),
        report,
    };
    let mut files = vec![output::write_json(dir, "report.json", &file)?];
    files.push(output::write_meta(
        dir,
        &Meta::new(config, started.elapsed().as_secs_f64(), vec![]),
    )?);
    Ok(CommandOutcome {
        files,
        verify_failed: failed,
        summary: format!(
            "{lines}verify: {}",
            if failed { "FAILED" } else { "passed" }
        ),
    })
}

fn cmd_theorem1(config: &Config) -> Result<CommandOutcome, CliError> {
    let started = Instant::now();
    let params = model(config);
    let report = theorem1_test(
        &params,
        config.n_runs,
        config.resolved_s_intermediate(),
        &config.y_grid,
        config.seed,
        config.parallelism,
        config.population_cap,
    )?;
    let dir = &config.output_path;
    let mut files = Vec::new();
    match config.output_format {
        OutputFormat::Csv => {
            let ks = report.ks.statistic;
            files.push(output::write_csv(
                dir,
                "theorem1.csv",
                "y,ecdf,mixture,ks_statistic",
                report.rows.iter().map(move |r| {
                    format!(
                        "{},{},{},{}",
                        fmt_f64(r.y),
                        fmt_f64(r.ecdf_value),
                        fmt_f64(r.mixture_value),
                        fmt_f64(ks)
                    )
                }),
            )?);
        }
        OutputFormat::Json => files.push(output::write_json(dir, "theorem1.json", &report)?),
    }
    files.push(output::write_meta(
        dir,
        &Meta::new(config, started.elapsed().as_secs_f64(), vec![]),
    )?);
    Ok(CommandOutcome {
        files,
        verify_failed: false,
        summary: format!(
            "theorem1: KS distance {} over y in [{}, {}] ({} runs)",
            fmt_f64(report.ks.statistic),
            fmt_f64(config.y_grid[0]),
            fmt_f64(*config.y_grid.last().expect("nonempty")),
            config.n_runs
        ),
    })
}

fn cmd_prop6(config: &Config) -> Result<CommandOutcome, CliError> {
    let started = Instant::now();
    let mut rows = Vec::new();
    for &z in &config.y_grid {
        rows.push(prop6_test(
            config.beta,
            config.x0,
            z,
            config.t,
            config.n_runs,
            config.seed,
            config.parallelism,
            config.population_cap,
        )?);
    }
    let dir = &config.output_path;
    let mut files = Vec::new();
    match config.output_format {
        OutputFormat::Csv => {
            files.push(output::write_csv(
                dir,
                "prop6.csv",
                "z,empirical,predicted,z_score",
                rows.iter().map(|r| {
                    format!(
                        "{},{},{},{}",
                        fmt_f64(r.z),
                        fmt_f64(r.empirical),
                        fmt_f64(r.predicted),
                        fmt_f64(r.z_score)
                    )
                }),
            )?);
        }
        OutputFormat::Json => files.push(output::write_json(dir, "prop6.json", &rows)?),
    }
    files.push(output::write_meta(
        dir,
        &Meta::new(config, started.elapsed().as_secs_f64(), vec![]),
    )?);
    let worst = rows.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max);
    Ok(CommandOutcome {
        files,
        verify_failed: false,
        summary: format!(
            "prop6: {} thresholds, worst |z-score| = {}",
            rows.len(),
            fmt_f64(worst)
        ),
    })
}
