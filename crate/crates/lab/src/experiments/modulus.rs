//! Modulus-of-continuity diagnostic over the `ε`-ensemble.

use peano_core::geometry::norm;
use peano_core::{integrate_sde, Trajectory, UniformGrid};
use serde_json::json;

use super::{ensemble, LabResult, Outcome};
use crate::config::ExperimentConfig;
use crate::report::{csv, Artifact, ExperimentReport, Metric, Threshold, METRIC_NOTE};

/// Whether two stored samples at most `window` apart in time differ by at
/// least `mu`.
pub fn oscillates(traj: &Trajectory, window: f64, mu: f64) -> bool {
    let n = traj.len();
    for k in 0..n {
        let xk = traj.state(k);
        for j in k + 1..n {
            if traj.times[j] - traj.times[k] > window {
                break;
            }
            let d: Vec<f64> = traj.state(j).iter().zip(xk).map(|(a, b)| a - b).collect();
            if norm(&d) >= mu {
                return true;
            }
        }
    }
    false
}

pub fn run(cfg: &ExperimentConfig) -> LabResult<Outcome> {
    let field = cfg.build_field()?;
    let noise = cfg.noise()?;
    let grid = UniformGrid::new(cfg.h, cfg.horizon)?;
    let x0 = vec![0.0; cfg.d];
    let n = cfg.samples;
    let mut probs = Vec::new();
    let mut metrics = Vec::new();
    for (j, &eps) in cfg.eps_list.iter().enumerate() {
        let first = (j * n) as u64;
        let hits = ensemble(n, |i| {
            let tr = integrate_sde(&field, eps, &noise, &x0, &grid, cfg.seed, first + i)?;
            Ok(oscillates(&tr, cfg.modulus_delta, cfg.modulus_mu))
        })?;
        let p = hits.iter().filter(|&&h| h).count() as f64 / n as f64;
        metrics.push(Metric::info(format!("p_oscillation[eps={eps}]"), p, n, cfg.seed, (first, first + n as u64)));
        probs.push(p);
    }
    let trend = probs.last().unwrap() - probs.first().unwrap();
    metrics.push(
        Metric::info("trend_smallest_minus_largest_eps", trend, n * probs.len(), cfg.seed, (0, (n * probs.len()) as u64))
            .gated(Threshold::Within { lo: -1.0, hi: 0.0 })
            .with_note("oscillation probability must not grow as eps decreases"),
    );
    let details = json!({ "window": cfg.modulus_delta, "mu": cfg.modulus_mu, "probabilities": probs });
    let artifacts = vec![Artifact {
        file: "modulus.csv".into(),
        contents: csv(&["eps", "p_oscillation"], cfg.eps_list.iter().zip(&probs).map(|(&e, &p)| vec![e, p])),
    }];
    let report = ExperimentReport::new(cfg, metrics, details, vec![METRIC_NOTE.to_string()]);
    Ok(Outcome { report, artifacts })
}
