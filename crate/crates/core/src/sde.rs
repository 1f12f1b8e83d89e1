//! Fixed-step integrators for the perturbed SDE, the unperturbed ODE and the
//! deterministically forced equation, plus first-passage detection.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fields::FieldSpec;
use crate::geometry::{norm, unit};
use crate::noise::{IncrementSampler, StableParams};
use crate::rng;
use crate::scalar::{from_usize, Scalar};

/// Default time step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// For `β < 0` the drift is evaluated no closer to the origin than this
/// radius; it is a numerical guard against overflow, not a model change.
pub const MIN_DRIFT_RADIUS: f64 = 1e-8;

/// Radius below which a deterministic solution is treated as having reached
/// the origin. Inward motion that gets within one step of the origin is also
/// treated as a singularity.
pub const SINGULARITY_RADIUS: f64 = 1e-12;

/// Uniform grid `t_k = k·h`, `k = 0..=steps`, stored every `thinning` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid<T> {
    pub h: T,
    pub steps: usize,
    pub thinning: usize,
}

impl<T: Scalar> UniformGrid<T> {
    /// Grid on `[0, t_end]` with step close to `h` (the step is adjusted so
    /// that an integer number of steps lands on `t_end`).
    pub fn new(h: T, t_end: T) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return domain(format!("time step h = {h} must be positive"));
        }
        if !(t_end >= T::zero()) || !t_end.is_finite() {
            return domain(format!("horizon {t_end} must be nonnegative"));
        }
        let steps = (t_end / h).round().to_usize().unwrap_or(0);
        let h = if steps > 0 { t_end / from_usize(steps) } else { h };
        Ok(Self { h, steps, thinning: 1 })
    }

    /// Exactly `steps` steps of size `h`.
    pub fn with_steps(h: T, steps: usize) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return domain(format!("time step h = {h} must be positive"));
        }
        Ok(Self { h, steps, thinning: 1 })
    }

    pub fn with_thinning(mut self, thinning: usize) -> Self {
        self.thinning = thinning.max(1);
        self
    }

    #[inline]
    pub fn time(&self, k: usize) -> T {
        from_usize::<T>(k) * self.h
    }

    pub fn t_end(&self) -> T {
        self.time(self.steps)
    }

    fn records(&self, k: usize) -> bool {
        k.is_multiple_of(self.thinning) || k == self.steps
    }
}

/// Sampled solution: times and row-major states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub field: String,
    pub dim: usize,
    pub times: Vec<T>,
    pub states: Vec<T>,
    pub epsilon: T,
    pub noise: Option<StableParams<T>>,
    pub seed: Option<u64>,
    pub stream: Option<u64>,
    pub h: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, k: usize) -> &[T] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn radius(&self, k: usize) -> T {
        norm(self.state(k))
    }

    pub fn radii(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.radius(k)).collect()
    }

    /// Angle `X/|X|` (first basis vector at the origin).
    pub fn angle(&self, k: usize) -> Vec<T> {
        unit(self.state(k))
    }

    pub fn final_state(&self) -> &[T] {
        self.state(self.len() - 1)
    }

    pub fn t_end(&self) -> T {
        *self.times.last().expect("non-empty trajectory")
    }

    /// Linear interpolation of the state at time `t` (clamped to the span).
    pub fn state_at(&self, t: T) -> Vec<T> {
        let n = self.len();
        if t <= self.times[0] {
            return self.state(0).to_vec();
        }
        if t >= self.times[n - 1] {
            return self.state(n - 1).to_vec();
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        self.state(k)
            .iter()
            .zip(self.state(k + 1))
            .map(|(&a, &b)| a + (b - a) * w)
            .collect()
    }

    /// CSV with header `t,x1,...,xd`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for i in 1..=self.dim {
            let _ = write!(s, ",x{i}");
        }
        s.push('\n');
        for k in 0..self.len() {
            let _ = write!(s, "{}", self.times[k]);
            for v in self.state(k) {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }
}

impl<T: Scalar + Serialize> Trajectory<T> {
    /// JSON with a metadata block followed by the samples.
    pub fn to_json(&self) -> serde_json::Value {
        let states: Vec<&[T]> = (0..self.len()).map(|k| self.state(k)).collect();
        serde_json::json!({
            "metadata": {
                "field": self.field,
                "dim": self.dim,
                "epsilon": self.epsilon,
                "alpha": self.noise.map(|p| p.alpha),
                "c": self.noise.map(|p| p.c),
                "seed": self.seed,
                "stream": self.stream,
                "h": self.h,
            },
            "times": self.times,
            "states": states,
        })
    }
}

/// First passage of `|X|` through `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitRecord<T> {
    pub tau: T,
    pub state_at_exit: Vec<T>,
    pub angle_at_exit: Vec<T>,
    pub radius_at_exit: T,
    /// `radius_at_exit − δ ≥ 0`.
    pub overshoot: T,
}

impl<T: Scalar> ExitRecord<T> {
    fn new(tau: T, state: &[T], delta: T) -> Self {
        let r = norm(state);
        Self {
            tau,
            state_at_exit: state.to_vec(),
            angle_at_exit: unit(state),
            radius_at_exit: r,
            overshoot: r - delta,
        }
    }
}

/// Deterministic forcing `ξ` for `dZ = A(Z)dt + dξ`.
pub trait Forcing<T>: Sync {
    fn dim(&self) -> usize;
    fn value(&self, t: T, out: &mut [T]);
}

/// `ξ = 0` on `[2kσ, (2k+1)σ)` and `ξ = jump` on `[(2k+1)σ, (2k+2)σ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternatingForcing<T> {
    sigma: T,
    jump: Vec<T>,
}

impl<T: Scalar> AlternatingForcing<T> {
    pub fn new(sigma: T, jump: Vec<T>) -> Result<Self> {
        if !(sigma > T::zero()) {
            return domain(format!("block length sigma = {sigma} must be positive"));
        }
        Ok(Self { sigma, jump })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn jump(&self) -> &[T] {
        &self.jump
    }
}

impl<T: Scalar> Forcing<T> for AlternatingForcing<T> {
    fn dim(&self) -> usize {
        self.jump.len()
    }

    fn value(&self, t: T, out: &mut [T]) {
        let block = (t / self.sigma).floor().to_u64().unwrap_or(0);
        if block % 2 == 1 {
            out.copy_from_slice(&self.jump);
        } else {
            out.iter_mut().for_each(|o| *o = T::zero());
        }
    }
}

/// Forcing given by a closure `t ↦ ξ(t)`.
pub struct FnForcing<F> {
    dim: usize,
    f: F,
}

impl<F> FnForcing<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T: Scalar, F: Fn(T, &mut [T]) + Sync> Forcing<T> for FnForcing<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, t: T, out: &mut [T]) {
        (self.f)(t, out)
    }
}

/// Drift evaluation with the `β < 0` radius guard.
#[inline]
fn drift<T: Scalar>(field: &FieldSpec<T>, x: &[T], out: &mut [T], guard: bool) {
    if guard {
        let r = norm(x);
        let r_min = T::lit(MIN_DRIFT_RADIUS);
        if r > T::zero() && r < r_min {
            let s = r_min / r;
            let lifted: Vec<T> = x.iter().map(|&v| v * s).collect();
            field.eval(&lifted, out);
            return;
        }
    }
    field.eval(x, out);
}

fn check_start<T: Scalar>(field: &FieldSpec<T>, x0: &[T]) -> Result<()> {
    if x0.len() != field.dim() {
        return domain(format!(
            "initial state has dimension {} but the field has dimension {}",
            x0.len(),
            field.dim()
        ));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return domain("initial state must be finite");
    }
    Ok(())
}

fn non_finite<T: Scalar>(t: T) -> Error {
    Error::Integration { time: t.as_f64(), reason: "state became non-finite".into() }
}

/// Euler–Maruyama for `dX = A(X)dt + ε dB_α`, returning the trajectory and,
/// when `exit_radius` is given, the first passage through it detected on
/// every step (independent of thinning).
#[allow(clippy::too_many_arguments)]
pub fn integrate_sde_observed<T: Scalar>(
    field: &FieldSpec<T>,
    eps: T,
    noise: &StableParams<T>,
    x0: &[T],
    grid: &UniformGrid<T>,
    seed: u64,
    stream: u64,
    exit_radius: Option<T>,
) -> Result<(Trajectory<T>, Option<ExitRecord<T>>)> {
    check_start(field, x0)?;
    if !(eps >= T::zero()) {
        return domain(format!("noise amplitude eps = {eps} must be nonnegative"));
    }
    if noise.dim != field.dim() {
        return domain("noise and field dimensions differ");
    }
    if let Some(delta) = exit_radius {
        if !(delta > T::zero()) {
            return domain("exit radius must be positive");
        }
    }
    let sampler = IncrementSampler::new(noise, grid.h)?;
    let mut rng = rng::stream(seed, stream);
    let d = field.dim();
    let guard = field.beta() < T::zero();
    let cap = grid.steps / grid.thinning + 2;
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap * d);
    let mut x = x0.to_vec();
    let mut a = vec![T::zero(); d];
    times.push(T::zero());
    states.extend_from_slice(&x);
    let mut exit = exit_radius.and_then(|delta| (norm(&x) >= delta).then(|| ExitRecord::new(T::zero(), &x, delta)));
    let noisy = eps > T::zero();
    for k in 1..=grid.steps {
        drift(field, &x, &mut a, guard);
        for (xi, &ai) in x.iter_mut().zip(&a) {
            *xi = *xi + ai * grid.h;
        }
        if noisy {
            sampler.add_scaled(&mut rng, eps, &mut x);
        }
        let t = grid.time(k);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(non_finite(t));
        }
        if exit.is_none() {
            if let Some(delta) = exit_radius {
                if norm(&x) >= delta {
                    exit = Some(ExitRecord::new(t, &x, delta));
                }
            }
        }
        if grid.records(k) {
            times.push(t);
            states.extend_from_slice(&x);
        }
    }
    let traj = Trajectory {
        field: field.name().to_string(),
        dim: d,
        times,
        states,
        epsilon: eps,
        noise: Some(*noise),
        seed: Some(seed),
        stream: Some(stream),
        h: grid.h,
    };
    Ok((traj, exit))
}

/// Euler–Maruyama for `dX = A(X)dt + ε dB_α` on a uniform grid.
pub fn integrate_sde<T: Scalar>(
    field: &FieldSpec<T>,
    eps: T,
    noise: &StableParams<T>,
    x0: &[T],
    grid: &UniformGrid<T>,
    seed: u64,
    stream: u64,
) -> Result<Trajectory<T>> {
    integrate_sde_observed(field, eps, noise, x0, grid, seed, stream, None).map(|(t, _)| t)
}

/// Steps `dX = A(X)dt + ε dB_α` from `x0` until `|X| ≥ δ` or `max_time`,
/// without storing the path. `None` means no exit within the horizon.
#[allow(clippy::too_many_arguments)]
pub fn first_exit_online<T: Scalar>(
    field: &FieldSpec<T>,
    eps: T,
    noise: &StableParams<T>,
    x0: &[T],
    h: T,
    delta: T,
    max_time: T,
    seed: u64,
    stream: u64,
) -> Result<Option<ExitRecord<T>>> {
    check_start(field, x0)?;
    if !(delta > T::zero()) {
        return domain(format!("exit radius delta = {delta} must be positive"));
    }
    if noise.dim != field.dim() {
        return domain("noise and field dimensions differ");
    }
    if norm(x0) >= delta {
        return Ok(Some(ExitRecord::new(T::zero(), x0, delta)));
    }
    let sampler = IncrementSampler::new(noise, h)?;
    let mut rng = rng::stream(seed, stream);
    let d = field.dim();
    let guard = field.beta() < T::zero();
    let mut x = x0.to_vec();
    let mut a = vec![T::zero(); d];
    let steps = (max_time / h).ceil().to_usize().unwrap_or(0);
    let delta2 = delta * delta;
    for k in 1..=steps {
        drift(field, &x, &mut a, guard);
        for (xi, &ai) in x.iter_mut().zip(&a) {
            *xi = *xi + ai * h;
        }
        sampler.add_scaled(&mut rng, eps, &mut x);
        let r2 = x.iter().fold(T::zero(), |s, &v| s + v * v);
        let t = from_usize::<T>(k) * h;
        if !r2.is_finite() {
            return Err(non_finite(t));
        }
        if r2 >= delta2 {
            return Ok(Some(ExitRecord::new(t, &x, delta)));
        }
    }
    Ok(None)
}

/// Classical RK4 for `dX = A(X)dt` from `x0 ≠ 0`.
pub fn integrate_ode<T: Scalar>(field: &FieldSpec<T>, x0: &[T], grid: &UniformGrid<T>) -> Result<Trajectory<T>> {
    check_start(field, x0)?;
    if norm(x0) <= T::lit(SINGULARITY_RADIUS) {
        return domain("ODE start must be away from the origin");
    }
    let d = field.dim();
    let h = grid.h;
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let mut x = x0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![T::zero(); d], vec![T::zero(); d], vec![T::zero(); d], vec![T::zero(); d]);
    let mut tmp = vec![T::zero(); d];
    let cap = grid.steps / grid.thinning + 2;
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap * d);
    times.push(T::zero());
    states.extend_from_slice(&x);
    let two = T::lit(2.0);
    for k in 1..=grid.steps {
        let prev = x.clone();
        field.eval(&x, &mut k1);
        for i in 0..d {
            tmp[i] = x[i] + half * k1[i];
        }
        field.eval(&tmp, &mut k2);
        for i in 0..d {
            tmp[i] = x[i] + half * k2[i];
        }
        field.eval(&tmp, &mut k3);
        for i in 0..d {
            tmp[i] = x[i] + h * k3[i];
        }
        field.eval(&tmp, &mut k4);
        for i in 0..d {
            x[i] = x[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        let t = grid.time(k);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(non_finite(t));
        }
        // inward motion whose next step would reach the origin
        let r = norm(&x);
        field.eval(&x, &mut k1);
        let within_step = r < norm(&prev) && r <= norm(&k1) * h;
        if within_step || r <= T::lit(SINGULARITY_RADIUS) {
            return Err(Error::Singularity { time: t.as_f64() });
        }
        if grid.records(k) {
            times.push(t);
            states.extend_from_slice(&x);
        }
    }
    Ok(Trajectory {
        field: field.name().to_string(),
        dim: d,
        times,
        states,
        epsilon: T::zero(),
        noise: None,
        seed: None,
        stream: None,
        h,
    })
}

/// Euler scheme for `dZ = A(Z)dt + dξ`: `Z[k+1] = Z[k] + A(Z[k])h + ξ(t_{k+1}) − ξ(t_k)`.
pub fn integrate_with_forcing<T: Scalar>(
    field: &FieldSpec<T>,
    xi: &dyn Forcing<T>,
    x0: &[T],
    grid: &UniformGrid<T>,
) -> Result<Trajectory<T>> {
    check_start(field, x0)?;
    let d = field.dim();
    if xi.dim() != d {
        return domain("forcing and field dimensions differ");
    }
    let mut prev = vec![T::zero(); d];
    xi.value(T::zero(), &mut prev);
    if prev.iter().any(|&v| v != T::zero()) {
        return domain("forcing must vanish at t = 0");
    }
    let guard = field.beta() < T::zero();
    let mut next = vec![T::zero(); d];
    let mut a = vec![T::zero(); d];
    let mut x = x0.to_vec();
    let cap = grid.steps / grid.thinning + 2;
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap * d);
    times.push(T::zero());
    states.extend_from_slice(&x);
    for k in 1..=grid.steps {
        let t = grid.time(k);
        drift(field, &x, &mut a, guard);
        xi.value(t, &mut next);
        for i in 0..d {
            x[i] = x[i] + a[i] * grid.h + (next[i] - prev[i]);
        }
        std::mem::swap(&mut prev, &mut next);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(non_finite(t));
        }
        if grid.records(k) {
            times.push(t);
            states.extend_from_slice(&x);
        }
    }
    Ok(Trajectory {
        field: field.name().to_string(),
        dim: d,
        times,
        states,
        epsilon: T::zero(),
        noise: None,
        seed: None,
        stream: None,
        h: grid.h,
    })
}

/// First stored sample with `|X| ≥ δ`; `None` if the trajectory never exits.
pub fn first_exit<T: Scalar>(traj: &Trajectory<T>, delta: T) -> Result<Option<ExitRecord<T>>> {
    if !(delta > T::zero()) {
        return domain(format!("exit radius delta = {delta} must be positive"));
    }
    Ok((0..traj.len())
        .find(|&k| traj.radius(k) >= delta)
        .map(|k| ExitRecord::new(traj.times[k], traj.state(k), delta)))
}
