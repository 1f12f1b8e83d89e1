//! Self-similarity check of the model equation for each configured `ε`.

use peano_core::scaling::ScalingTestConfig;
use peano_core::scaling_identity_test;

use super::{LabResult, Outcome};
use crate::config::ExperimentConfig;
use crate::report::{csv, Artifact, ExperimentReport, Metric, Threshold, METRIC_NOTE};

pub fn run(cfg: &ExperimentConfig) -> LabResult<Outcome> {
    let field = cfg.build_field()?;
    let noise = cfg.noise()?;
    let threshold = if cfg.ks_threshold > 0.0 {
        cfg.ks_threshold
    } else if cfg.alpha == 2.0 {
        0.04
    } else {
        0.05
    };
    let mut metrics = Vec::new();
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for &eps in &cfg.eps_list {
        let tc = ScalingTestConfig { eps, t_points: cfg.t_points.clone(), n: cfg.samples, h: cfg.h, seed: cfg.seed };
        let rep = scaling_identity_test(&field, &noise, &tc)?;
        let mut m = Metric::info(format!("max_ks[eps={eps}]"), rep.max_ks, rep.samples_per_ensemble, cfg.seed, (0, rep.streams_unit.1));
        m = if rep.model_field {
            m.gated(Threshold::Below { value: threshold })
        } else {
            m.with_note("not a model field: reported only")
        };
        metrics.push(m);
        for p in &rep.points {
            let mut row = vec![eps, p.t];
            row.extend(&p.ks_coordinates);
            row.push(p.ks_radius);
            rows.push(row);
        }
        reports.push(rep);
    }
    let mut header: Vec<String> = vec!["eps".into(), "t".into()];
    header.extend((1..=cfg.d).map(|i| format!("ks_x{i}")));
    header.push("ks_radius".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let notes = reports.iter().flat_map(|r| r.warnings.clone()).chain([METRIC_NOTE.to_string()]).collect();
    let report = ExperimentReport::new(cfg, metrics, serde_json::to_value(&reports).expect("serializable"), notes);
    Ok(Outcome { report, artifacts: vec![Artifact { file: "scaling_ks.csv".into(), contents: csv(&header, rows) }] })
}
