//! Time–space rescaling `X̃(t) = ε^{-p} X(ε^q t)` and a Monte Carlo check of
//! the self-similarity `X_ε(t) =ᵈ ε^p X_1(ε^{-q} t)` for model fields, where
//! `p = α/(α+β−1)` and `q = α(1−β)/(α+β−1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fields::{Asymptotics, FieldSpec};
use crate::noise::StableParams;
use crate::scalar::Scalar;
use crate::sde::{integrate_sde, Trajectory, UniformGrid};
use crate::stats::ks_two_sample;

/// Sample size below which the identity report carries a warning.
pub const MIN_MEANINGFUL_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingExponents<T> {
    pub space_exp: T,
    pub time_exp: T,
}

/// Exponents of the rescaling; requires `α ∈ (1, 2]`, `|β| < 1`, `α + β > 1`.
pub fn exponents<T: Scalar>(alpha: T, beta: T) -> Result<ScalingExponents<T>> {
    if !(alpha > T::one() && alpha <= T::lit(2.0)) {
        return domain(format!("alpha = {alpha} must lie in (1, 2]"));
    }
    if !(beta.abs() < T::one()) {
        return domain(format!("beta = {beta} must satisfy |beta| < 1"));
    }
    let denom = alpha + beta - T::one();
    if !(denom > T::zero()) {
        return domain(format!(
            "alpha + beta = {} must exceed 1: below it the perturbed equation loses uniqueness and the rescaling degenerates",
            alpha + beta
        ));
    }
    Ok(ScalingExponents { space_exp: alpha / denom, time_exp: alpha * (T::one() - beta) / denom })
}

/// `X̃(s) = ε^{-p} X(ε^q s)` sampled at `s_k = t_k ε^{-q}`. Rescaling by
/// `1/ε` inverts rescaling by `ε`.
pub fn rescale<T: Scalar>(traj: &Trajectory<T>, eps: T, exps: &ScalingExponents<T>) -> Result<Trajectory<T>> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return domain(format!("rescaling factor eps = {eps} must be positive"));
    }
    let space = eps.powf(-exps.space_exp);
    let time = eps.powf(-exps.time_exp);
    Ok(Trajectory {
        field: traj.field.clone(),
        dim: traj.dim,
        times: traj.times.iter().map(|&t| t * time).collect(),
        states: traj.states.iter().map(|&x| x * space).collect(),
        // noise amplitude transforms as ε^{-p+q/α} = 1/ε
        epsilon: traj.epsilon / eps,
        noise: traj.noise,
        seed: traj.seed,
        stream: traj.stream,
        h: traj.h * time,
    })
}

/// Settings of [`scaling_identity_test`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingTestConfig<T> {
    pub eps: T,
    pub t_points: Vec<T>,
    pub n: usize,
    /// Step of the amplitude-`ε` ensemble; the amplitude-1 ensemble uses
    /// `h ε^{-q}` so that its rescaled grid coincides with this one.
    pub h: T,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub t: f64,
    pub ks_coordinates: Vec<f64>,
    pub ks_radius: f64,
    pub max_ks: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub field: String,
    pub model_field: bool,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub dim: usize,
    pub eps: f64,
    pub space_exp: f64,
    pub time_exp: f64,
    pub h_eps: f64,
    pub h_unit: f64,
    pub samples_per_ensemble: usize,
    pub seed: u64,
    /// Streams `[0, n)` drive the amplitude-`ε` ensemble, `[n, 2n)` the other.
    pub streams_eps: (u64, u64),
    pub streams_unit: (u64, u64),
    pub points: Vec<ScalingPoint>,
    pub max_ks: f64,
    pub warnings: Vec<String>,
}

/// Simulates `n` paths from 0 at amplitude `ε` and `n` at amplitude 1,
/// rescales the latter by `1/ε` and compares the marginals at each
/// `t`-point by two-sample KS per coordinate and on the radius.
pub fn scaling_identity_test<T: Scalar>(
    field: &FieldSpec<T>,
    noise: &StableParams<T>,
    cfg: &ScalingTestConfig<T>,
) -> Result<ScalingReport> {
    noise.validate()?;
    let exps = exponents(noise.alpha, field.beta())?;
    if !(cfg.eps > T::zero()) {
        return domain(format!("eps = {} must be positive", cfg.eps));
    }
    if cfg.n == 0 {
        return domain("sample size must be positive");
    }
    if cfg.t_points.is_empty() || cfg.t_points.iter().any(|&t| !(t > T::zero())) {
        return domain("comparison times must be positive");
    }
    let mut warnings = Vec::new();
    if cfg.n < MIN_MEANINGFUL_SAMPLES {
        warnings.push(format!(
            "N = {} is below {MIN_MEANINGFUL_SAMPLES}; KS distances are statistically meaningless",
            cfg.n
        ));
    }
    let model_field = field.asymptotics() == Asymptotics::Both;
    if !model_field {
        warnings.push(format!(
            "field '{}' is not a model field; the identity is not exact and distances are reported only",
            field.name()
        ));
    }
    let d = field.dim();
    let t_max = cfg.t_points.iter().copied().fold(T::zero(), T::max);
    let grid_eps = UniformGrid::new(cfg.h, t_max)?;
    let stretch = cfg.eps.powf(-exps.time_exp);
    let grid_unit = UniformGrid::with_steps(grid_eps.h * stretch, grid_eps.steps)?;
    let x0 = vec![T::zero(); d];
    let n = cfg.n as u64;
    let samples = |eps: T, grid: &UniformGrid<T>, offset: u64, inverse: Option<T>| -> Result<Vec<Vec<Vec<f64>>>> {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let tr = integrate_sde(field, eps, noise, &x0, grid, cfg.seed, offset + i)?;
                let tr = match inverse {
                    Some(f) => rescale(&tr, f, &exps)?,
                    None => tr,
                };
                Ok(cfg.t_points.iter().map(|&t| tr.state_at(t).iter().map(|v| v.as_f64()).collect()).collect())
            })
            .collect()
    };
    let at_eps = samples(cfg.eps, &grid_eps, 0, None)?;
    let at_unit = samples(T::one(), &grid_unit, n, Some(T::one() / cfg.eps))?;
    let points: Vec<ScalingPoint> = cfg
        .t_points
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let column = |set: &[Vec<Vec<f64>>], f: &dyn Fn(&[f64]) -> f64| -> Vec<f64> {
                set.iter().map(|row| f(&row[j])).collect()
            };
            let ks_coordinates: Vec<f64> = (0..d)
                .map(|i| ks_two_sample(&column(&at_eps, &|x| x[i]), &column(&at_unit, &|x| x[i])))
                .collect();
            let radius = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ks_radius = ks_two_sample(&column(&at_eps, &radius), &column(&at_unit, &radius));
            let max_ks = ks_coordinates.iter().copied().fold(ks_radius, f64::max);
            ScalingPoint { t: t.as_f64(), ks_coordinates, ks_radius, max_ks }
        })
        .collect();
    let max_ks = points.iter().map(|p| p.max_ks).fold(0.0, f64::max);
    Ok(ScalingReport {
        field: field.name().to_string(),
        model_field,
        alpha: noise.alpha.as_f64(),
        beta: field.beta().as_f64(),
        c: noise.c.as_f64(),
        dim: d,
        eps: cfg.eps.as_f64(),
        space_exp: exps.space_exp.as_f64(),
        time_exp: exps.time_exp.as_f64(),
        h_eps: grid_eps.h.as_f64(),
        h_unit: grid_unit.h.as_f64(),
        samples_per_ensemble: cfg.n,
        seed: cfg.seed,
        streams_eps: (0, n),
        streams_unit: (n, 2 * n),
        points,
        max_ks,
        warnings,
    })
}
