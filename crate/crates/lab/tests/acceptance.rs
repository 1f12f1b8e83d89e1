//! Acceptance suite. Runs every criterion, prints one verdict line each and
//! exits non-zero when a criterion fails that is not listed in
//! `EXPECTED_FAILURES`. An expected failure that starts passing also fails the
//! run, so the list cannot go stale silently.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use peano_core::geometry::geodesic;
use peano_core::{
    angle_continuity_sweep, closed_form_radius, integrate_ode, polar_ode_solve, FieldChoice, UniformGrid,
};
use peano_lab::{run, Experiment, ExperimentConfig, ExperimentReport, Outcome};

/// Criteria whose thresholds are not reachable as stated, with the reason.
/// The numbers are still computed against the unmodified thresholds.
const EXPECTED_FAILURES: &[(u32, &str)] = &[(
    8,
    "P(tau_0.05 > 0.1) tends to 1, not 0, as eps -> 0: the zero-noise path needs 2*sqrt(0.05) = 0.447 > 0.1 to reach radius 0.05",
)];

struct Verdict {
    passed: bool,
    detail: String,
}

/// Accumulates named clauses of one criterion.
#[derive(Default)]
struct Clauses {
    parts: Vec<String>,
    failed: Vec<String>,
}

impl Clauses {
    fn check(&mut self, name: &str, ok: bool, shown: String) {
        let tag = if ok { "ok" } else { "FAILED" };
        self.parts.push(format!("{name} {shown} [{tag}]"));
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    fn verdict(self) -> Verdict {
        let mut detail = self.parts.join("; ");
        if !self.failed.is_empty() {
            detail.push_str(&format!(" | failing: {}", self.failed.join(", ")));
        }
        Verdict { passed: self.failed.is_empty(), detail }
    }
}

fn run_cfg(cfg: &ExperimentConfig) -> Outcome {
    run(cfg).unwrap_or_else(|e| panic!("{} failed to run: {e}", cfg.experiment.name()))
}

fn metric(report: &ExperimentReport, name: &str) -> f64 {
    report.metric(name).unwrap_or_else(|| panic!("{}: metric '{name}' missing", report.experiment)).value
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn noise_selftest() -> Verdict {
    let cfg = ExperimentConfig::defaults(Experiment::NoiseSelftest);
    let start = Instant::now();
    let out = run_cfg(&cfg);
    let took = start.elapsed();
    let band = 4.0 / (cfg.samples as f64).sqrt();
    let errs: Vec<f64> =
        out.report.metrics.iter().filter(|m| m.name.starts_with("cf_error")).map(|m| m.value).collect();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    let mut c = Clauses::default();
    c.check("checks", errs.len() == 15, format!("{}", errs.len()));
    c.check("max cf error", worst < band, format!("{worst:.5} < {band:.5}"));
    c.check("runtime", took < Duration::from_secs(30), format!("{} < 30s", secs(took)));
    c.verdict()
}

fn closed_form_integration() -> Verdict {
    let field = FieldChoice::Model { a_bar: 1.0 }.build::<f64>(0.5, 2, None).expect("model field");
    let th: f64 = 0.7;
    let x0 = [th.cos(), th.sin()];
    let tr = integrate_ode(&field, &x0, &UniformGrid::new(1e-3, 1.0).expect("grid")).expect("ode");
    let end = tr.final_state();
    let r = (end[0] * end[0] + end[1] * end[1]).sqrt();
    let exact = (1.0f64 + 0.5).powi(2);
    let rel = (r - exact).abs() / exact;
    let drift = geodesic(&[end[0] / r, end[1] / r], &x0);
    let mut c = Clauses::default();
    c.check("relative error", rel < 1e-8, format!("{rel:.2e} < 1e-8"));
    c.check("angle drift", drift < 1e-10, format!("{drift:.2e} < 1e-10"));
    c.verdict()
}

fn scaling_identity() -> Verdict {
    let mut c = Clauses::default();
    let start = Instant::now();
    for (alpha, beta, d, bound) in [(2.0, 0.5, 1, 0.04), (2.0, 0.5, 2, 0.04), (1.5, 0.7, 1, 0.05)] {
        let cfg = ExperimentConfig {
            alpha,
            beta,
            d,
            eps_list: vec![0.5],
            t_points: vec![1.0],
            ..ExperimentConfig::defaults(Experiment::Scaling)
        };
        assert_eq!(cfg.samples, 5000);
        let ks = metric(&run_cfg(&cfg).report, "max_ks[eps=0.5]");
        c.check(&format!("KS(alpha={alpha}, beta={beta}, d={d})"), ks < bound, format!("{ks:.4} < {bound}"));
    }
    let took = start.elapsed();
    c.check("runtime", took < Duration::from_secs(300), format!("{} < 300s", secs(took)));
    c.verdict()
}

/// Criteria 4, 5 and 6 share one run of the long-horizon experiment.
fn large_time() -> (Verdict, Verdict, Verdict) {
    let cfg = ExperimentConfig::defaults(Experiment::LargeTime);
    assert_eq!((cfg.horizon, cfg.forced_radius, cfg.n, cfg.beta, cfg.runs), (1e4, 10.0, 2.0, 0.5, 10));
    let out = run_cfg(&cfg);

    let mut forced = Clauses::default();
    let a = metric(&out.report, "forced_a_bar_hat");
    let diag = metric(&out.report, "forced_cauchy_diag");
    forced.check("a_hat", (0.98..=1.02).contains(&a), format!("{a:.6} in [0.98, 1.02]"));
    forced.check("angular diagnostic", diag < 0.05, format!("{diag:.2e} < 0.05"));

    let mut counter = Clauses::default();
    let sup = metric(&out.report, "counterexample_sup_radius");
    counter.check("sup |Z|", sup <= 4.0, format!("{sup:.6} <= 4"));

    let mut stochastic = Clauses::default();
    let settled = metric(&out.report, "stochastic_runs_settled");
    stochastic.check("settled runs", settled >= 8.0, format!("{settled} of 10 >= 8"));

    (forced.verdict(), counter.verdict(), stochastic.verdict())
}

fn exit_angle_law() -> Verdict {
    let base = ExperimentConfig::defaults(Experiment::ExitDist);
    assert_eq!((base.samples, base.radius, base.alpha), (10_000, 50.0, 2.0));
    let mut c = Clauses::default();

    let symmetric = ExperimentConfig { field: "model".into(), d: 1, r_stability: false, ..base.clone() };
    let p = metric(&run_cfg(&symmetric).report, "p_plus");
    c.check("1D symmetric P(+1)", (0.485..=0.515).contains(&p), format!("{p:.4} in [0.485, 0.515]"));

    let isotropic = ExperimentConfig { field: "model".into(), d: 2, r_stability: false, ..base.clone() };
    let ks = metric(&run_cfg(&isotropic).report, "ks_uniform");
    c.check("2D uniformity KS", ks < 0.03, format!("{ks:.4} < 0.03"));

    let asymmetric = ExperimentConfig {
        field: "sign1d".into(),
        a_plus: 2.0,
        a_minus: 1.0,
        d: 1,
        r_stability: false,
        ..base.clone()
    };
    let gap = metric(&run_cfg(&asymmetric).report, "oracle_gap");
    c.check("1D asymmetric oracle gap", gap < 0.03, format!("{gap:.4} < 0.03"));

    let anisotropic = ExperimentConfig {
        field: "angular-cosine".into(),
        amplitude: 0.3,
        d: 2,
        r_stability: true,
        ..base
    };
    let ks = metric(&run_cfg(&anisotropic).report, "ks_r_vs_2r");
    c.check("R-stability KS(50 vs 100)", ks < 0.04, format!("{ks:.4} < 0.04"));
    c.verdict()
}

#[derive(serde::Deserialize)]
struct EpsRow {
    median_radius: f64,
}

fn convergence() -> Verdict {
    let cfg = ExperimentConfig::defaults(Experiment::Convergence);
    assert_eq!((cfg.samples, cfg.eps_list.as_slice(), cfg.delta, cfg.mu), (2000, &[0.5, 0.1, 0.02][..], 0.05, 0.1));
    let start = Instant::now();
    let out = run_cfg(&cfg);
    let took = start.elapsed();
    let r = &out.report;
    let mut c = Clauses::default();

    let factor = metric(r, "w1_reduction_factor");
    c.check("distance reduction 0.5 -> 0.02", factor >= 2.0, format!("{factor:.2} >= 2"));

    let split = metric(r, "fraction_positive");
    c.check("split", (0.47..=0.53).contains(&split), format!("{split:.4} in [0.47, 0.53]"));

    // concentration at ±0.25: the median radius approaches the reference
    // radius monotonically along the decreasing eps list
    let rows: Vec<EpsRow> = serde_json::from_value(r.details["rows"].clone()).expect("rows");
    let gaps: Vec<f64> = rows.iter().map(|row| (row.median_radius - 0.25).abs()).collect();
    let shown: Vec<String> = gaps.iter().map(|g| format!("{g:.3}")).collect();
    c.check(
        "|median radius - 0.25| decreasing",
        gaps.windows(2).all(|w| w[1] < w[0]),
        format!("[{}]", shown.join(", ")),
    );

    let p = metric(r, "p_tau_above_mu");
    c.check("P(tau_0.05 > 0.1) at eps=0.02", p < 0.1, format!("{p:.3} < 0.1"));
    c.check("runtime", took < Duration::from_secs(600), format!("{} < 600s", secs(took)));
    c.verdict()
}

fn polar_solver() -> Verdict {
    let mut c = Clauses::default();
    let zero_b = |_: f64, _: &[f64], out: &mut [f64]| out.fill(0.0);

    let mut worst: f64 = 0.0;
    for (r0, t0) in [(0.0, 0.0), (1.0, -2.0)] {
        let sol = polar_ode_solve(|_, _: &[f64]| 1.0, zero_b, 0.5, 0.5, r0, &[0.6, 0.8], 3.0, 4000).expect("polar");
        for (k, &t) in sol.times.iter().enumerate().skip(1) {
            let exact = closed_form_radius(1.0, 0.5, t - t0);
            worst = worst.max((sol.radii[k] - exact).abs() / exact);
        }
        worst = worst.max(geodesic(&sol.terminal().1, &[0.6, 0.8]));
    }
    c.check("closed form, b = 0", worst < 1e-6, format!("{worst:.2e} < 1e-6"));

    let wobbly = |r: f64, phi: &[f64]| 1.0 + 0.3 * (r + 3.0 * phi[0]).sin();
    let swirl = |_: f64, phi: &[f64], out: &mut [f64]| {
        out[0] = -0.5 * phi[1];
        out[1] = 0.5 * phi[0];
    };
    let mut bounds_ok = true;
    for j in 0..16 {
        let th = TAU * j as f64 / 16.0;
        let sol = polar_ode_solve(wobbly, swirl, 0.5, 0.5, 0.0, &[th.cos(), th.sin()], 3.0, 4000).expect("polar");
        for (k, &t) in sol.times.iter().enumerate().skip(1) {
            let r = sol.radii[k];
            bounds_ok &= r >= closed_form_radius(0.7, 0.5, t) * (1.0 - 1e-9);
            bounds_ok &= r <= closed_form_radius(1.3, 0.5, t) * (1.0 + 1e-9);
        }
    }
    c.check("comparison bounds on 16 paths", bounds_ok, String::new());

    let sweep = angle_continuity_sweep(wobbly, swirl, 0.5, 0.5, 1.0, 500, &[8, 32, 128, 512]).expect("sweep");
    let sups: Vec<f64> = sweep.iter().map(|s| s.1).collect();
    let shown: Vec<String> = sups.iter().map(|s| format!("{s:.2e}")).collect();
    c.check(
        "continuity sweep decreasing",
        sups.windows(2).all(|w| w[1] < w[0]) && sups[3] < sups[0] / 16.0,
        format!("[{}]", shown.join(", ")),
    );
    c.verdict()
}

/// Reduced configurations that still exercise every code path.
fn small_configs() -> Vec<ExperimentConfig> {
    use Experiment::*;
    vec![
        ExperimentConfig { samples: 200, eps_list: vec![0.5, 0.1], radius: 10.0, ..ExperimentConfig::defaults(Convergence) },
        ExperimentConfig { samples: 300, d: 2, ..ExperimentConfig::defaults(Scaling) },
        ExperimentConfig {
            horizon: 200.0,
            runs: 3,
            counterexample_horizon: 100.0,
            thinning: 10,
            ..ExperimentConfig::defaults(LargeTime)
        },
        ExperimentConfig {
            samples: 300,
            radius: 10.0,
            d: 2,
            field: "angular-cosine".into(),
            ..ExperimentConfig::defaults(ExitDist)
        },
        ExperimentConfig { samples: 100, ..ExperimentConfig::defaults(Modulus) },
        ExperimentConfig { samples: 5000, ..ExperimentConfig::defaults(NoiseSelftest) },
    ]
}

fn snapshot(cfg: &ExperimentConfig, threads: usize) -> Vec<(String, String)> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
    let out = pool.install(|| run_cfg(cfg));
    let mut files = vec![("report.json".to_string(), out.report.to_json())];
    files.extend(out.artifacts.into_iter().map(|a| (a.file, a.contents)));
    files
}

fn determinism() -> Verdict {
    let mut c = Clauses::default();
    for cfg in small_configs() {
        let serial = snapshot(&cfg, 1);
        let parallel = snapshot(&cfg, 4);
        let again = snapshot(&cfg, 4);
        let same = serial == parallel && parallel == again;
        c.check(cfg.experiment.name(), same, format!("{} files", serial.len()));
    }
    c.verdict()
}

fn main() {
    let start = Instant::now();
    let (forced, counter, stochastic) = large_time();
    let criteria: Vec<(u32, &str, Verdict)> = vec![
        (1, "noise self-test", noise_selftest()),
        (2, "closed-form integration", closed_form_integration()),
        (3, "scaling identity", scaling_identity()),
        (4, "forced deterministic growth", forced),
        (5, "bounded counterexample", counter),
        (6, "stochastic growth and settled angle", stochastic),
        (7, "exit-angle law", exit_angle_law()),
        (8, "zero-noise convergence", convergence()),
        (9, "polar solver", polar_solver()),
        (10, "determinism", determinism()),
    ];

    let mut unexpected = 0;
    let mut expected_failures = 0;
    for (id, name, v) in &criteria {
        let expected = EXPECTED_FAILURES.iter().find(|e| e.0 == *id);
        let status = match (v.passed, expected) {
            (true, None) => "PASS".to_string(),
            (false, Some((_, why))) => {
                expected_failures += 1;
                format!("FAIL (expected: {why})")
            }
            (true, Some(_)) => {
                unexpected += 1;
                "PASS (listed as expected failure; update the list)".to_string()
            }
            (false, None) => {
                unexpected += 1;
                "FAIL".to_string()
            }
        };
        println!("criterion {id:>2} {name}: {status}\n             {}", v.detail);
    }
    let passed = criteria.iter().filter(|c| c.2.passed).count();
    println!(
        "acceptance: {passed} of {} criteria pass, {expected_failures} expected failure(s), {unexpected} unexpected outcome(s) in {}",
        criteria.len(),
        secs(start.elapsed())
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
