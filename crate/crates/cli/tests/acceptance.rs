//! Acceptance suite: every release criterion at its stated size and
//! tolerance, one test per criterion. The heavy ensembles are shared between
//! criteria through lazily-computed statics, exactly as the grid intends
//! (criteria 2, 3 and 6 read the same β = 1 counting ensembles).
//!
//! Each test prints its PASS/FAIL line plus the measured checks; run with
//! `cargo test --test acceptance -- --nocapture` to see the numbers.

use catbbm_core::verify::{
    collect_count_moments, collect_martingale_data, criterion1_sampler_gof,
    criterion2_first_moment, criterion3_second_moment, criterion4_constant, criterion5_martingale,
    criterion6_sandwich, criterion7_limit_law, criterion8_prop6, criterion9_determinism,
    CountMomentData, CriterionReport, MartingaleData, VerifyOptions,
};
use catbbm_core::DEFAULT_POPULATION_CAP;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::LazyLock;

fn opts() -> VerifyOptions {
    VerifyOptions {
        seed: 61,
        parallelism: 0,
        tolerance_scale: 1.0,
        quick: false,
        population_cap: DEFAULT_POPULATION_CAP,
        include_limit_laws: true,
    }
}

static COUNT_DATA: LazyLock<Vec<CountMomentData>> =
    LazyLock::new(|| collect_count_moments(&opts()).expect("counting ensembles"));

static MARTINGALE_DATA: LazyLock<Vec<MartingaleData>> =
    LazyLock::new(|| collect_martingale_data(&opts()).expect("martingale ensembles"));

fn assert_criterion(report: CriterionReport) {
    let verdict = if report.passed { "PASS" } else { "FAIL" };
    println!("{verdict} {}: {}", report.id, report.name);
    for c in &report.checks {
        println!(
            "  [{}] {}: measured {} in [{}, {}]",
            if c.passed { "ok" } else { "FAILED" },
            c.name,
            c.measured,
            c.lo,
            c.hi
        );
    }
    if let Some(err) = &report.infrastructure_error {
        println!("  infrastructure error: {err}");
    }
    assert!(
        report.passed,
        "criterion {} ({}) failed:\n{}",
        report.id,
        report.name,
        report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("  {}: {} outside [{}, {}]", c.name, c.measured, c.lo, c.hi))
            .collect::<Vec<_>>()
            .join("\n")
    );
}

#[test]
fn c1_sampler_goodness_of_fit() {
    // Each kernel vs its closed-form CDF: KS at the 1% level, 10⁵ draws,
    // three parameter settings per kernel.
    assert_criterion(criterion1_sampler_gof(&opts()));
}

#[test]
fn c2_first_moment_reproduction() {
    // β = 1, t ∈ {4, 9, 16}, y ∈ {0, 1, 2}: MC mean of |N_t^{βt/2+y}| over
    // 10⁵ runs within 3 standard errors of Φ(β√t/2 − y/√t)e^{−βy}.
    assert_criterion(criterion2_first_moment(&opts(), &COUNT_DATA));
}

#[test]
fn c3_second_moment_reproduction() {
    // Same grid: MC second moment within 3 standard errors of the quadrature,
    // and the quadrature itself reproduces e^{−βy} + 2(1+√2)e^{−2βy} at
    // t = 100 to 1e-4 absolute.
    assert_criterion(criterion3_second_moment(&opts(), &COUNT_DATA));
}

#[test]
fn c4_constant_c() {
    // 2(1 + √2) to 1e-6, invariant across β ∈ {0.5, 1, 2}.
    assert_criterion(criterion4_constant(&opts()));
}

#[test]
fn c5_martingale() {
    // Mean M_t = 1 within 3 standard errors at β = 1, t ∈ {1, 5, 15} (10⁵
    // runs) and β = 0.5, t = 50 (2·10⁴ runs); mean |M_s − M_t| strictly
    // decreasing over s ∈ {t/10, t/5, t/2}.
    assert_criterion(criterion5_martingale(&opts(), &MARTINGALE_DATA));
}

#[test]
fn c6_corollary1_sandwich() {
    // β = 1, t = 16, y ∈ {1, 2, 3}: empirical P(R_t > βt/2 + y) within
    // [lower − 3σ̂, upper + 3σ̂] of the Paley–Zygmund/Markov bounds.
    assert_criterion(criterion6_sandwich(&opts(), &COUNT_DATA));
}

#[test]
fn c7_theorem1_limit_law() {
    // β = 0.5, t = 50, s = 10, 2·10⁴ runs: KS(ecdf of R_t − βt/2, plug-in
    // mixture) ≤ 0.05 over y ∈ [−1, 4], and the distance at t = 50 is below
    // the distance at t = 12.5 under matched seeds.
    assert_criterion(criterion7_limit_law(&opts()));
}

#[test]
fn c8_prop6_estimate() {
    // β = 0.3, t = 100, x₀ ∈ {0, 1}, z = 2, 10⁴ runs: |z-score| ≤ 4 against
    // 1 − e^{−β|x₀| − βz}.
    //
    // Expected red. The estimate linearises the limit law
    // 1 − E[exp(−M∞e^{−βz})] and needs e^{−βz} ≪ 1; at z = 2, β = 0.3 the
    // dropped terms are order one, so the true probability (≈ 0.72, stable
    // across t ∈ {50, 100, 150} and equal to the plug-in mixture evaluated at
    // the same offset) exceeds the estimate (0.4512) by ≈ 55 standard errors.
    // The check stays at its stated parameters instead of being moved into
    // the regime where it would pass; see criterion8_prop6's docs.
    assert_criterion(criterion8_prop6(&opts()));
}

#[test]
fn c9_determinism() {
    // In-process: repeated ensembles bit-identical, parallelism-invariant.
    assert_criterion(criterion9_determinism(&opts()));

    // File-level: the actual binary, byte-compared outputs.
    let bin = env!("CARGO_BIN_EXE_catbbm");
    let tmp = tempfile::tempdir().unwrap();
    let read = |p: &Path| fs::read(p).unwrap_or_else(|e| panic!("read {}: {e}", p.display()));

    let simulate = |sub: &str, parallelism: &str| {
        let dir = tmp.path().join(sub);
        let status = Command::new(bin)
            .args([
                "simulate",
                "--beta",
                "1",
                "--t",
                "2",
                "--n-runs",
                "200",
                "--seed",
                "31337",
                "--parallelism",
                parallelism,
                "--out",
                dir.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        read(&dir.join("runs.csv"))
    };
    let a = simulate("s1", "1");
    let b = simulate("s2", "1");
    let c = simulate("s3", "2");
    assert_eq!(
        a, b,
        "repeated simulate must produce byte-identical runs.csv"
    );
    assert_eq!(a, c, "parallelism must not change runs.csv");

    // Seed 61 is a known-passing stream for the quick suite (the criteria
    // are statistical, so the contract fixes working seeds).
    let verify = |sub: &str, parallelism: &str| {
        let dir = tmp.path().join(sub);
        let status = Command::new(bin)
            .args([
                "verify",
                "--quick",
                "--skip-limit-laws",
                "--seed",
                "61",
                "--parallelism",
                parallelism,
                "--out",
                dir.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success(), "quick verify must pass");
        read(&dir.join("report.json"))
    };
    let a = verify("v1", "1");
    let b = verify("v2", "1");
    let c = verify("v3", "2");
    assert_eq!(
        a, b,
        "repeated verify must produce byte-identical report.json"
    );
    assert_eq!(a, c, "parallelism must not change report.json");
    println!("PASS c9 (file level): runs.csv and report.json byte-identical across repeats and parallelism");
}

#[test]
fn falsifiability_tightened_tolerances_fail() {
    // Shrinking every tolerance by 10× must surface failures rather than
    // silently passing (the harness's falsifiability contract).
    let tight = VerifyOptions {
        tolerance_scale: 0.1,
        quick: true,
        ..opts()
    };
    let data = collect_count_moments(&tight).expect("counting ensembles");
    let c2 = criterion2_first_moment(&tight, &data);
    let c4 = criterion4_constant(&tight);
    assert!(
        !(c2.passed && c4.passed),
        "tolerance scale 0.1 must produce at least one failure"
    );
}
