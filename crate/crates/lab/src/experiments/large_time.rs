//! Long-horizon behaviour: a boundedly forced deterministic run, seeded
//! `ε = 1` stochastic runs, and the bounded counterexample orbit.

use peano_core::sde::FnForcing;
use peano_core::{
    counterexample_pair, integrate_sde, integrate_with_forcing, limit_angle, radial_fit, Trajectory, UniformGrid,
};
use serde_json::json;

use super::{ensemble, LabResult, Outcome};
use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{csv, Artifact, ExperimentReport, Metric, Threshold, METRIC_NOTE};

/// Angular diameter above which a tail is flagged as not settling.
pub const NON_CONVERGENT_DIAMETER: f64 = 1.0;

pub fn run(cfg: &ExperimentConfig) -> LabResult<Outcome> {
    if cfg.d != 2 {
        return Err(ConfigError::Invalid("large-time experiments are planar (d = 2)".into()).into());
    }
    let beta = cfg.beta;
    let field = cfg.build_model_field()?;
    let noise = cfg.noise()?;
    let t_end = cfg.horizon;
    let window = (t_end * (1.0 - cfg.tail_fraction), t_end);
    let grid = UniformGrid::new(cfg.h, t_end)?.with_thinning(cfg.thinning);
    let mut metrics = Vec::new();
    let mut artifacts = Vec::new();

    // bounded forcing ξ(t) = (sin t, cos t) − (0, 1)
    let xi = FnForcing::new(2, |t: f64, out: &mut [f64]| {
        out[0] = t.sin();
        out[1] = t.cos() - 1.0;
    });
    let forced = integrate_with_forcing(&field, &xi, &[cfg.forced_radius, 0.0], &grid)?;
    let la = limit_angle(&forced, cfg.tail_fraction)?;
    let fit = radial_fit(&forced, beta, window)?;
    let a_lim = field.a_bar_at(&la.phi_hat);
    metrics.push(
        Metric::info("forced_a_bar_hat", fit.a_bar_hat, 1, 0, (0, 0))
            .gated(Threshold::Within { lo: 0.98 * a_lim, hi: 1.02 * a_lim })
            .with_note(format!("fit window [{}, {}], a_bar at the limit angle {a_lim}", window.0, window.1)),
    );
    metrics.push(Metric::info("forced_cauchy_diag", la.cauchy_diag, 1, 0, (0, 0)).gated(Threshold::Below { value: 0.05 }));
    artifacts.push(Artifact { file: "forced.csv".into(), contents: forced.to_csv() });

    // ε = 1 stable noise from the origin
    let runs = ensemble(cfg.runs, |s| {
        let tr = integrate_sde(&field, 1.0, &noise, &[0.0, 0.0], &grid, cfg.seed, s)?;
        let la = limit_angle(&tr, cfg.tail_fraction)?;
        let r = tr.radius(tr.len() - 1);
        let ratio = r.powf(1.0 - beta) / ((1.0 - beta) * t_end * field.a_bar_at(&la.phi_hat));
        Ok((ratio, la.cauchy_diag))
    })?;
    let good = runs.iter().filter(|(ratio, diag)| (0.9..=1.1).contains(ratio) && *diag < 0.1).count();
    let need = (0.8 * cfg.runs as f64).ceil();
    metrics.push(
        Metric::info("stochastic_runs_settled", good as f64, cfg.runs, cfg.seed, (0, cfg.runs as u64))
            .gated(Threshold::AtLeast { value: need })
            .with_note("runs with growth ratio in [0.9, 1.1] and tail angular diameter < 0.1"),
    );
    artifacts.push(Artifact {
        file: "stochastic_runs.csv".into(),
        contents: csv(
            &["stream", "growth_ratio", "cauchy_diag"],
            runs.iter().enumerate().map(|(i, (r, d))| vec![i as f64, *r, *d]),
        ),
    });

    // bounded orbit under alternating forcing
    let (ce_field, ce_xi) = counterexample_pair(cfg.n, beta, cfg.r_rad)?;
    let ce_grid = UniformGrid::new(cfg.h, cfg.counterexample_horizon)?;
    let z = integrate_with_forcing(&ce_field, &ce_xi, &[cfg.n, 0.0], &ce_grid)?;
    let sup = z.radii().into_iter().fold(0.0, f64::max);
    let ce_angle = limit_angle(&z, cfg.tail_fraction)?;
    metrics.push(
        Metric::info("counterexample_sup_radius", sup, 1, 0, (0, 0)).gated(Threshold::Within { lo: 0.0, hi: cfg.n + 2.0 }),
    );
    metrics.push(
        Metric::info("counterexample_cauchy_diag", ce_angle.cauchy_diag, 1, 0, (0, 0))
            .gated(Threshold::AtLeast { value: NON_CONVERGENT_DIAMETER })
            .with_note("the angle must not settle: non-convergence flag"),
    );
    let stride = (z.len() / 5000).max(1);
    let ce_thin = Trajectory {
        times: z.times.iter().step_by(stride).copied().collect(),
        states: (0..z.len()).step_by(stride).flat_map(|k| z.state(k).to_vec()).collect(),
        ..z.clone()
    };
    artifacts.push(Artifact { file: "counterexample.csv".into(), contents: ce_thin.to_csv() });

    let details = json!({
        "forced": { "fit": fit, "limit_angle": la, "final_radius": forced.radius(forced.len() - 1) },
        "stochastic": runs.iter().map(|(r, d)| json!({ "growth_ratio": r, "cauchy_diag": d })).collect::<Vec<_>>(),
        "counterexample": {
            "sigma": ce_xi.sigma(),
            "sup_radius": sup,
            "cauchy_diag": ce_angle.cauchy_diag,
            "non_convergent": ce_angle.cauchy_diag >= NON_CONVERGENT_DIAMETER,
        },
    });
    let report = ExperimentReport::new(cfg, metrics, details, vec![METRIC_NOTE.to_string()]);
    Ok(Outcome { report, artifacts })
}
