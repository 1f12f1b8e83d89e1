//! Flat key–value experiment configuration (TOML), layered over
//! per-experiment defaults.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use peano_core::{FieldChoice, FieldSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Convergence,
    Scaling,
    LargeTime,
    ExitDist,
    Modulus,
    NoiseSelftest,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Convergence => "convergence",
            Experiment::Scaling => "scaling",
            Experiment::LargeTime => "large-time",
            Experiment::ExitDist => "exit-dist",
            Experiment::Modulus => "modulus",
            Experiment::NoiseSelftest => "noise-selftest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,

    /// Library name: model, sign1d, angular-cosine, counterexample, custom-table.
    pub field: String,
    pub a_bar: f64,
    pub a_plus: f64,
    pub a_minus: f64,
    pub amplitude: f64,
    pub phase: f64,
    /// Counterexample index and outer radius of its steering annulus.
    pub n: f64,
    pub r_rad: f64,
    /// Angular table for `custom-table`.
    pub table: Vec<f64>,
    /// Radius beyond which radial fields continue linearly; 0 disables.
    pub truncate: f64,

    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub d: usize,
    pub eps_list: Vec<f64>,
    pub delta: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub h: f64,
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
    /// Where results go; not part of the run's identity or hash.
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
    pub thinning: usize,

    /// Exit-time level in the convergence experiment (`P(τ_δ > μ) < μ`).
    pub mu: f64,
    /// Comparison times of the scaling check.
    pub t_points: Vec<f64>,
    /// KS threshold of the scaling check; 0 selects 0.04 for α = 2, else 0.05.
    pub ks_threshold: f64,
    /// Whether exit-dist also samples at 2R.
    pub r_stability: bool,
    /// Number of seeded long runs in the stochastic large-time experiment.
    pub runs: usize,
    /// Horizon of the counterexample run.
    pub counterexample_horizon: f64,
    /// Initial radius of the forced large-time run.
    pub forced_radius: f64,
    /// Fraction of the time span used for limit-angle diagnostics.
    pub tail_fraction: f64,
    /// Window length and jump size of the modulus diagnostic.
    pub modulus_delta: f64,
    pub modulus_mu: f64,
    /// `(α, c)` pairs of the noise self-test.
    pub selftest_params: Vec<[f64; 2]>,
    pub frequencies: Vec<f64>,
}

impl ExperimentConfig {
    /// Defaults reproducing the desk-scale version of each experiment.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            field: "model".into(),
            a_bar: 1.0,
            a_plus: 1.0,
            a_minus: 1.0,
            amplitude: 0.3,
            phase: 0.0,
            n: 2.0,
            r_rad: 10.0,
            table: Vec::new(),
            truncate: 0.0,
            alpha: 2.0,
            beta: 0.5,
            c: 1.0,
            d: 1,
            eps_list: vec![0.5],
            delta: 0.05,
            radius: 50.0,
            horizon: 1.0,
            h: 1e-3,
            samples: 2000,
            seed: 1,
            output_dir: PathBuf::from("out"),
            thinning: 1,
            mu: 0.1,
            t_points: vec![1.0],
            ks_threshold: 0.0,
            r_stability: true,
            runs: 10,
            counterexample_horizon: 1e3,
            forced_radius: 10.0,
            tail_fraction: 0.5,
            modulus_delta: 0.01,
            modulus_mu: 0.2,
            selftest_params: vec![[2.0, 1.0], [1.5, 1.0], [1.8, 0.5]],
            frequencies: vec![0.25, 0.5, 1.0, 2.0, 4.0],
        };
        match experiment {
            Experiment::Convergence => Self {
                field: "sign1d".into(),
                truncate: 1.0,
                eps_list: vec![0.5, 0.1, 0.02],
                ..base
            },
            Experiment::Scaling => Self { samples: 5000, ..base },
            Experiment::LargeTime => Self { alpha: 1.5, d: 2, horizon: 1e4, thinning: 1000, ..base },
            Experiment::ExitDist => Self { samples: 10_000, ..base },
            Experiment::Modulus => Self {
                field: "sign1d".into(),
                truncate: 1.0,
                eps_list: vec![0.5, 0.1, 0.02],
                samples: 1000,
                ..base
            },
            Experiment::NoiseSelftest => Self { samples: 100_000, ..base },
        }
    }

    /// Defaults for `experiment` overlaid with the keys of a TOML document.
    pub fn from_toml(experiment: Experiment, text: &str) -> Result<Self, ConfigError> {
        let overlay: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        if let Some(v) = overlay.get("experiment") {
            if v.as_str() != Some(experiment.name()) {
                return invalid(format!(
                    "config declares experiment {v} but the '{}' subcommand was invoked",
                    experiment.name()
                ));
            }
        }
        let defaults = Self::defaults(experiment);
        let mut table = toml::Table::try_from(&defaults).map_err(|e| ConfigError::Parse(e.to_string()))?;
        // not serialized, so restore it for the overlay
        table.insert("output_dir".into(), defaults.output_dir.to_string_lossy().into_owned().into());
        for (k, v) in overlay {
            if !table.contains_key(&k) {
                return Err(ConfigError::Parse(format!("unknown key '{k}'")));
            }
            table.insert(k, v);
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(experiment: Experiment, path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(experiment, &text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return invalid(format!("alpha = {} must lie in (1, 2]", self.alpha));
        }
        if !(self.beta.abs() < 1.0) {
            return invalid(format!("beta = {} must satisfy |beta| < 1", self.beta));
        }
        if !(self.alpha + self.beta > 1.0) {
            return invalid(format!(
                "alpha + beta = {} must exceed 1; otherwise uniqueness and other nice properties of the perturbed equation are lost",
                self.alpha + self.beta
            ));
        }
        if !(self.c > 0.0) || self.d == 0 {
            return invalid("c must be positive and d at least 1");
        }
        if !(self.h > 0.0) || !(self.horizon > 0.0) || !(self.radius > 0.0) || !(self.delta > 0.0) {
            return invalid("h, T, R and delta must be positive");
        }
        if self.samples == 0 || self.thinning == 0 {
            return invalid("N and thinning must be positive");
        }
        if self.eps_list.is_empty() || self.eps_list.iter().any(|&e| !(e > 0.0)) {
            return invalid("eps_list must contain positive amplitudes");
        }
        if matches!(self.experiment, Experiment::Convergence | Experiment::Modulus)
            && self.eps_list.windows(2).any(|w| !(w[1] < w[0]))
        {
            return invalid(format!("eps_list {:?} must be strictly decreasing", self.eps_list));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction < 1.0) {
            return invalid("tail_fraction must lie in (0, 1)");
        }
        if self.t_points.iter().any(|&t| !(t > 0.0)) {
            return invalid("t_points must be positive");
        }
        if !(self.truncate >= 0.0) {
            return invalid("truncate must be nonnegative");
        }
        self.field_choice()?;
        Ok(())
    }

    pub fn field_choice(&self) -> Result<FieldChoice, ConfigError> {
        Ok(match self.field.as_str() {
            "model" => FieldChoice::Model { a_bar: self.a_bar },
            "sign1d" => FieldChoice::Sign1d { a_plus: self.a_plus, a_minus: self.a_minus },
            "angular-cosine" => FieldChoice::AngularCosine { amplitude: self.amplitude, phase: self.phase },
            "counterexample" => FieldChoice::Counterexample { n: self.n, r_rad: self.r_rad },
            "custom-table" => FieldChoice::CustomTable { values: self.table.clone() },
            other => return invalid(format!("unknown field '{other}'")),
        })
    }

    /// The configured field, truncated if `truncate > 0`.
    pub fn build_field(&self) -> Result<FieldSpec, ConfigError> {
        let truncate = (self.truncate > 0.0).then_some(self.truncate);
        self.field_choice()?
            .build(self.beta, self.d, truncate)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// The same angular profile without truncation: the model equation.
    pub fn build_model_field(&self) -> Result<FieldSpec, ConfigError> {
        self.field_choice()?
            .build(self.beta, self.d, None)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn noise(&self) -> Result<peano_core::StableParams, ConfigError> {
        peano_core::StableParams::new(self.alpha, self.c, self.d).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Canonical JSON used for hashing and echoing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
