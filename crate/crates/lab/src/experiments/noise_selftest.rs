//! Empirical characteristic function of single increments against
//! `exp(−c|z|^α dt)`.

use peano_core::noise::IncrementSampler;
use peano_core::stats::empirical_cf;
use peano_core::{rng, StableParams};
use serde_json::json;

use super::{ensemble, LabResult, Outcome};
use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{csv, ExperimentReport, Metric, Threshold, METRIC_NOTE};

const BLOCK: usize = 1000;

pub fn run(cfg: &ExperimentConfig) -> LabResult<Outcome> {
    let d = cfg.d;
    let n = cfg.samples;
    let dt = cfg.horizon;
    let blocks = n.div_ceil(BLOCK);
    // probe direction off the coordinate axes
    let dir: Vec<f64> = (0..d).map(|_| 1.0 / (d as f64).sqrt()).collect();
    let tol = 4.0 / (n as f64).sqrt();
    let mut metrics = Vec::new();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (j, &[alpha, c]) in cfg.selftest_params.iter().enumerate() {
        let params = StableParams::new(alpha, c, d).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let sampler = IncrementSampler::new(&params, dt)?;
        let first = (j * blocks) as u64;
        let chunks = ensemble(blocks, |b| {
            let mut r = rng::stream(cfg.seed, first + b);
            let len = BLOCK.min(n - b as usize * BLOCK);
            let mut out = vec![0.0; len * d];
            for row in out.chunks_exact_mut(d) {
                sampler.fill(&mut r, row);
            }
            Ok(out)
        })?;
        let draws: Vec<f64> = chunks.concat();
        for &zs in &cfg.frequencies {
            let z: Vec<f64> = dir.iter().map(|v| v * zs).collect();
            let (re, im) = empirical_cf(&draws, d, &z);
            let target = (-c * zs.abs().powf(alpha) * dt).exp();
            let err = ((re - target).powi(2) + im * im).sqrt();
            worst = worst.max(err);
            rows.push(vec![alpha, c, zs, re, im, target, err]);
            metrics.push(
                Metric::info(format!("cf_error[alpha={alpha},c={c},z={zs}]"), err, n, cfg.seed, (first, first + blocks as u64))
                    .gated(Threshold::Below { value: tol }),
            );
        }
    }
    let details = json!({ "dt": dt, "dim": d, "tolerance": tol, "max_error": worst, "block_size": BLOCK });
    let report = ExperimentReport::new(cfg, metrics, details, vec![METRIC_NOTE.to_string()]);
    let artifacts = vec![crate::report::Artifact {
        file: "characteristic_function.csv".into(),
        contents: csv(&["alpha", "c", "z", "re", "im", "target", "error"], rows),
    }];
    Ok(Outcome { report, artifacts })
}
