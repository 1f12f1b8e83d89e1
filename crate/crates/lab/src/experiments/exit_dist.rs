//! Exit-angle law of the `ε = 1` model equation at radius `R` (and `2R`).

use peano_core::fields::angle_grid;
use peano_core::stats::{ks_one_sample, ks_two_sample};
use peano_core::{exit_angle_distribution, scale_function_oracle_1d, AngleSample, ExitConfig, FieldSpec};
use serde_json::json;

use super::{LabResult, Outcome};
use crate::config::ExperimentConfig;
use crate::report::{Artifact, ExperimentReport, Metric, Threshold, METRIC_NOTE};

/// Two-sample KS between exit laws: on `{±1}` in 1D, on the polar angle in
/// 2D, and the largest per-coordinate distance otherwise.
pub fn angle_law_distance(a: &AngleSample, b: &AngleSample) -> f64 {
    match a.meta.dim {
        2 => ks_two_sample(&a.planar_angles(), &b.planar_angles()),
        d => (0..d)
            .map(|i| {
                let ca: Vec<f64> = a.samples.iter().map(|s| s[i]).collect();
                let cb: Vec<f64> = b.samples.iter().map(|s| s[i]).collect();
                ks_two_sample(&ca, &cb)
            })
            .fold(0.0, f64::max),
    }
}

fn profile_is_constant(field: &FieldSpec) -> bool {
    let vals: Vec<f64> = angle_grid::<f64>(field.dim(), 256).iter().map(|p| field.a_bar_at(p)).collect();
    vals.iter().all(|&v| v == vals[0])
}

pub fn run(cfg: &ExperimentConfig) -> LabResult<Outcome> {
    let field = cfg.build_model_field()?;
    let noise = cfg.noise()?;
    let n = cfg.samples;
    let base = ExitConfig::new(cfg.radius, n, cfg.h, cfg.seed);
    let sample = exit_angle_distribution(&field, &noise, &base)?;
    let streams = sample.meta.streams;
    let mut metrics = vec![Metric::info("non_exits", sample.meta.non_exits as f64, n, cfg.seed, streams)];
    let mut details = serde_json::Map::new();
    details.insert("meta".into(), serde_json::to_value(&sample.meta).expect("serializable"));

    if cfg.d == 1 {
        let p = sample.fraction_positive();
        let (ap, am) = (field.a_bar_at(&[1.0]), field.a_bar_at(&[-1.0]));
        let mut m = Metric::info("p_plus", p, sample.len(), cfg.seed, streams);
        if ap == am {
            let band = 3.0 * 0.5 / (sample.len() as f64).sqrt();
            m = m.gated(Threshold::Within { lo: 0.5 - band, hi: 0.5 + band }).with_note("symmetric profile");
        }
        metrics.push(m);
        if cfg.alpha == 2.0 && cfg.beta > 0.0 && cfg.beta < 1.0 {
            let oracle = scale_function_oracle_1d(ap, am, cfg.beta, cfg.radius, cfg.c)?;
            details.insert("oracle_p_plus".into(), json!(oracle));
            metrics.push(
                Metric::info("oracle_gap", (p - oracle).abs(), sample.len(), cfg.seed, streams)
                    .gated(Threshold::Below { value: 0.03 })
                    .with_note(format!("scale-function oracle p_plus = {oracle}")),
            );
        }
    } else if cfg.d == 2 && profile_is_constant(&field) {
        let ks = ks_one_sample(&sample.planar_angles(), |t| t / std::f64::consts::TAU);
        metrics.push(
            Metric::info("ks_uniform", ks, sample.len(), cfg.seed, streams)
                .gated(Threshold::Below { value: 0.03 })
                .with_note("rotation-invariant field and noise"),
        );
    }

    let mut artifacts = vec![Artifact { file: "angles_R.csv".into(), contents: sample.to_csv() }];
    if cfg.r_stability {
        let far = ExitConfig { radius: 2.0 * cfg.radius, first_stream: n as u64, ..base };
        let outer = exit_angle_distribution(&field, &noise, &far)?;
        let ks = angle_law_distance(&sample, &outer);
        metrics.push(
            Metric::info("ks_r_vs_2r", ks, n, cfg.seed, (0, 2 * n as u64))
                .gated(Threshold::Below { value: 0.04 })
                .with_note(format!("exit laws at R = {} and {}", cfg.radius, 2.0 * cfg.radius)),
        );
        details.insert("meta_2r".into(), serde_json::to_value(&outer.meta).expect("serializable"));
        artifacts.push(Artifact { file: "angles_2R.csv".into(), contents: outer.to_csv() });
    }
    let report = ExperimentReport::new(cfg, metrics, serde_json::Value::Object(details), vec![METRIC_NOTE.to_string()]);
    Ok(Outcome { report, artifacts })
}
