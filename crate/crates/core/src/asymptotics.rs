//! Limit objects: the closed-form solution leaving the origin, the limit
//! angle and radial growth constant of long runs, the exit-angle law of the
//! model equation, a 1D exit-probability oracle, and a polar ODE solver for
//! solutions started at the origin.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fields::{angle_grid, FieldSpec};
use crate::geometry::{dot, geodesic, norm, unit};
use crate::noise::StableParams;
use crate::scalar::{from_usize, Scalar};
use crate::sde::{first_exit_online, Trajectory};

/// `(ā(1−β)(t−t₀))^{1/(1−β)} φ` for `t ≥ t₀`, zero before.
pub fn closed_form_solution<T: Scalar>(a_bar: T, beta: T, t0: T, phi: &[T], t: T) -> Vec<T> {
    let r = closed_form_radius(a_bar, beta, t - t0);
    phi.iter().map(|&p| p * r).collect()
}

/// Radius `(ā(1−β)s)^{1/(1−β)}` of the closed form after time `s` (0 for `s ≤ 0`).
pub fn closed_form_radius<T: Scalar>(a_bar: T, beta: T, s: T) -> T {
    if s <= T::zero() {
        return T::zero();
    }
    let one_m = T::one() - beta;
    (a_bar * one_m * s).powf(T::one() / one_m)
}

/// Time for the closed form to reach radius `r`.
pub fn closed_form_time_to_radius<T: Scalar>(a_bar: T, beta: T, r: T) -> T {
    let one_m = T::one() - beta;
    r.powf(one_m) / (one_m * a_bar)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitAngle<T> {
    pub phi_hat: Vec<T>,
    /// Geodesic diameter of the angles in the tail window.
    pub cauchy_diag: T,
    pub window: (T, T),
    pub samples: usize,
}

/// Final angle and the angular diameter over the last `tail_fraction` of the
/// time span.
pub fn limit_angle<T: Scalar>(traj: &Trajectory<T>, tail_fraction: T) -> Result<LimitAngle<T>> {
    if !(tail_fraction > T::zero() && tail_fraction < T::one()) {
        return domain(format!("tail fraction {tail_fraction} must lie in (0, 1)"));
    }
    if traj.is_empty() {
        return domain("empty trajectory");
    }
    let t0 = traj.times[0];
    let t1 = traj.t_end();
    let lo = t1 - tail_fraction * (t1 - t0);
    let start = traj.times.partition_point(|&t| t < lo);
    let mut angles = Vec::with_capacity(traj.len() - start);
    for k in start..traj.len() {
        let r = traj.radius(k);
        if !(r > T::zero()) {
            return domain(format!("radius vanishes at t = {} inside the tail window", traj.times[k]));
        }
        angles.push(traj.state(k).iter().map(|&v| v / r).collect::<Vec<T>>());
    }
    Ok(LimitAngle {
        phi_hat: unit(traj.final_state()),
        cauchy_diag: angular_diameter(&angles, traj.dim),
        window: (lo, t1),
        samples: angles.len(),
    })
}

/// Largest pairwise geodesic distance. Exact for `d ≤ 2`; for `d ≥ 3` at
/// most 2048 evenly strided points are compared.
pub fn angular_diameter<T: Scalar>(angles: &[Vec<T>], dim: usize) -> T {
    if angles.len() < 2 {
        return T::zero();
    }
    match dim {
        1 => {
            let pos = angles.iter().any(|a| a[0] > T::zero());
            let neg = angles.iter().any(|a| a[0] < T::zero());
            if pos && neg {
                T::PI()
            } else {
                T::zero()
            }
        }
        2 => {
            let mut th: Vec<T> = angles.iter().map(|a| crate::geometry::angle2(a)).collect();
            th.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let tau = T::TAU();
            let circ = |d: T| {
                let d = d.abs() % tau;
                d.min(tau - d)
            };
            let mut best = T::zero();
            for &u in &th {
                // the farthest point is the one nearest to the antipode
                let anti = (u + T::PI()) % tau;
                let i = th.partition_point(|&v| v < anti);
                let n = th.len();
                for j in [i % n, (i + n - 1) % n] {
                    best = best.max(circ(th[j] - u));
                }
            }
            best
        }
        _ => {
            let stride = angles.len().div_ceil(2048);
            let pts: Vec<&Vec<T>> = angles.iter().step_by(stride).chain(angles.last()).collect();
            let mut best = T::zero();
            for (i, u) in pts.iter().enumerate() {
                for v in &pts[i + 1..] {
                    best = best.max(geodesic(u, v));
                }
            }
            best
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialFit<T> {
    pub a_bar_hat: T,
    pub window: (T, T),
    /// Largest relative deviation of `r^{1−β}` from the fitted line.
    pub residual: T,
    pub samples: usize,
}

/// Least-squares slope of `r(t)^{1−β}` on `[t_lo, t_hi]`, divided by `1−β`.
pub fn radial_fit<T: Scalar>(traj: &Trajectory<T>, beta: T, window: (T, T)) -> Result<RadialFit<T>> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return domain("fit window must satisfy t_lo < t_hi");
    }
    if lo < traj.times[0] || hi > traj.t_end() {
        return domain("fit window must lie inside the trajectory");
    }
    let one_m = T::one() - beta;
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for k in 0..traj.len() {
        let t = traj.times[k];
        if t < lo || t > hi {
            continue;
        }
        let r = traj.radius(k);
        if !(r > T::zero()) {
            return domain(format!("radius vanishes at t = {t} inside the fit window"));
        }
        ts.push(t);
        ys.push(r.powf(one_m));
    }
    if ts.len() < 2 {
        return domain("fit window contains fewer than two samples");
    }
    let n = from_usize::<T>(ts.len());
    let tm = ts.iter().copied().sum::<T>() / n;
    let ym = ys.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&t, &y) in ts.iter().zip(&ys) {
        sxy = sxy + (t - tm) * (y - ym);
        sxx = sxx + (t - tm) * (t - tm);
    }
    let slope = sxy / sxx;
    let icpt = ym - slope * tm;
    let residual = ts
        .iter()
        .zip(&ys)
        .map(|(&t, &y)| {
            let fit = icpt + slope * t;
            ((y - fit) / fit).abs()
        })
        .fold(T::zero(), T::max);
    let a_bar_hat = slope / one_m;
    if !(a_bar_hat > T::zero()) || !residual.is_finite() {
        return Err(Error::Domain(format!("radial fit degenerate: slope {slope}, residual {residual}")));
    }
    Ok(RadialFit { a_bar_hat, window, residual, samples: ts.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleMeta {
    pub field: String,
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub radius: f64,
    pub h: f64,
    pub max_horizon: f64,
    pub requested: usize,
    pub non_exits: usize,
    pub seed: u64,
    pub streams: (u64, u64),
}

/// Empirical exit-angle law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSample<T> {
    pub samples: Vec<Vec<T>>,
    pub meta: AngleMeta,
}

impl<T: Scalar> AngleSample<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Fraction of samples with positive first coordinate (the `+1` mass in 1D).
    pub fn fraction_positive(&self) -> f64 {
        let k = self.samples.iter().filter(|s| s[0] > T::zero()).count();
        k as f64 / self.samples.len().max(1) as f64
    }

    /// Polar angles in `[0, 2π)` (`d = 2`).
    pub fn planar_angles(&self) -> Vec<f64> {
        self.samples.iter().map(|s| crate::geometry::angle2(s).as_f64()).collect()
    }

    /// Pools two samples; the result is sorted, so pooling is order-independent.
    pub fn merge(mut self, other: AngleSample<T>) -> Result<Self> {
        if self.meta.dim != other.meta.dim {
            return domain("cannot merge angle samples of different dimensions");
        }
        self.samples.extend(other.samples);
        self.samples.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.partial_cmp(y).unwrap())
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        self.meta.requested += other.meta.requested;
        self.meta.non_exits += other.meta.non_exits;
        Ok(self)
    }

    /// CSV with header `phi1,...,phid`.
    pub fn to_csv(&self) -> String {
        let header: Vec<String> = (1..=self.meta.dim).map(|i| format!("phi{i}")).collect();
        let mut s = header.join(",");
        s.push('\n');
        for row in &self.samples {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn meta_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.meta).expect("metadata serializes")
    }
}

/// Settings of [`exit_angle_distribution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitConfig<T> {
    pub radius: T,
    pub n: usize,
    pub h: T,
    pub seed: u64,
    /// Stream of the first trajectory; trajectory `i` uses `first_stream + i`.
    pub first_stream: u64,
    /// Horizon as a multiple of the closed-form time to `radius` at `min ā`.
    pub horizon_factor: T,
}

impl<T: Scalar> ExitConfig<T> {
    pub fn new(radius: T, n: usize, h: T, seed: u64) -> Self {
        Self { radius, n, h, seed, first_stream: 0, horizon_factor: T::lit(10.0) }
    }
}

/// Smallest admissible ensemble for an exit-angle law.
pub const MIN_EXIT_SAMPLES: usize = 100;
/// Largest tolerated fraction of paths that never reach the radius.
pub const MAX_NON_EXIT_FRACTION: f64 = 0.01;

/// Runs the `ε = 1` equation from 0 until `|X| = R` for `n` independent
/// paths and records the exit angles.
pub fn exit_angle_distribution<T: Scalar>(
    field: &FieldSpec<T>,
    noise: &StableParams<T>,
    cfg: &ExitConfig<T>,
) -> Result<AngleSample<T>> {
    noise.validate()?;
    if !(cfg.radius > T::zero()) {
        return domain("exit radius must be positive");
    }
    if cfg.n < MIN_EXIT_SAMPLES {
        return domain(format!("exit-angle law needs at least {MIN_EXIT_SAMPLES} paths, got {}", cfg.n));
    }
    let horizon =
        cfg.horizon_factor * closed_form_time_to_radius(field.a_bar_min(), field.beta(), cfg.radius);
    let x0 = vec![T::zero(); field.dim()];
    let records: Vec<Option<Vec<T>>> = (0..cfg.n as u64)
        .into_par_iter()
        .map(|i| {
            first_exit_online(field, T::one(), noise, &x0, cfg.h, cfg.radius, horizon, cfg.seed, cfg.first_stream + i)
                .map(|r| r.map(|e| e.angle_at_exit))
        })
        .collect::<Result<_>>()?;
    let non_exits = records.iter().filter(|r| r.is_none()).count();
    if non_exits as f64 > MAX_NON_EXIT_FRACTION * cfg.n as f64 {
        return Err(Error::ExitHorizon {
            non_exits,
            total: cfg.n,
            radius: cfg.radius.as_f64(),
            horizon: horizon.as_f64(),
        });
    }
    Ok(AngleSample {
        samples: records.into_iter().flatten().collect(),
        meta: AngleMeta {
            field: field.name().to_string(),
            dim: field.dim(),
            alpha: noise.alpha.as_f64(),
            beta: field.beta().as_f64(),
            c: noise.c.as_f64(),
            radius: cfg.radius.as_f64(),
            h: cfg.h.as_f64(),
            max_horizon: horizon.as_f64(),
            requested: cfg.n,
            non_exits,
            seed: cfg.seed,
            streams: (cfg.first_stream, cfg.first_stream + cfg.n as u64),
        },
    })
}

/// Quadrature tolerance of [`scale_function_oracle_1d`].
pub const ORACLE_TOLERANCE: f64 = 1e-8;

/// Probability that the 1D diffusion `dX = a_± |X|^β sign(X) dt + √(2c) dW`
/// started at 0 leaves `(−R, R)` through `+R`: `I₋/(I₊ + I₋)` with
/// `I_± = ∫₀^R exp(−a_± y^{1+β}/(c(1+β))) dy`.
pub fn scale_function_oracle_1d(a_plus: f64, a_minus: f64, beta: f64, radius: f64, c: f64) -> Result<f64> {
    if !(a_plus > 0.0 && a_minus > 0.0) {
        return domain("oracle needs positive drift coefficients");
    }
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("oracle needs beta in (0, 1), got {beta}"));
    }
    if !(radius > 0.0 && c > 0.0) {
        return domain("oracle needs positive radius and noise intensity");
    }
    let i_plus = scale_integral(a_plus, beta, radius, c)?;
    let i_minus = scale_integral(a_minus, beta, radius, c)?;
    Ok(i_minus / (i_plus + i_minus))
}

fn scale_integral(a: f64, beta: f64, radius: f64, c: f64) -> Result<f64> {
    let k = a / (c * (1.0 + beta));
    let f = |y: f64| (-k * y.powf(1.0 + beta)).exp();
    // dyadic breakpoints keep the decay region resolved for large R
    let mut cuts = vec![0.0];
    let mut x = 0.125;
    while x < radius {
        cuts.push(x);
        x *= 2.0;
    }
    cuts.push(radius);
    let (mut total, mut err) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let out = quadrature::double_exponential::integrate(f, w[0], w[1], 1e-12);
        total += out.integral;
        err += out.error_estimate;
    }
    if !total.is_finite() || !(err <= ORACLE_TOLERANCE * total) {
        return Err(Error::Quadrature(format!(
            "scale integral on [0, {radius}] did not converge: estimate {total} with error {err}"
        )));
    }
    Ok(total)
}

/// Solution of `dR = a R^β dt`, `dΦ = b R^{β+δ−1} dt` sampled at the
/// solver's nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarSolution<T> {
    pub dim: usize,
    pub times: Vec<T>,
    pub radii: Vec<T>,
    /// Row-major unit vectors.
    pub angles: Vec<T>,
    /// Largest `| |Φ| − 1 |` removed by renormalization over one step.
    pub renorm_drift: T,
}

impl<T: Scalar> PolarSolution<T> {
    pub fn angle(&self, k: usize) -> &[T] {
        &self.angles[k * self.dim..(k + 1) * self.dim]
    }

    /// Linear interpolation in `t` (angle renormalized), clamped to the span.
    pub fn at(&self, t: T) -> (T, Vec<T>) {
        let n = self.times.len();
        if t <= self.times[0] {
            return (self.radii[0], self.angle(0).to_vec());
        }
        if t >= self.times[n - 1] {
            return (self.radii[n - 1], self.angle(n - 1).to_vec());
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        let r = self.radii[k] + (self.radii[k + 1] - self.radii[k]) * w;
        let phi: Vec<T> = self
            .angle(k)
            .iter()
            .zip(self.angle(k + 1))
            .map(|(&a, &b)| a + (b - a) * w)
            .collect();
        (r, unit(&phi))
    }

    pub fn cartesian(&self, k: usize) -> Vec<T> {
        self.angle(k).iter().map(|&p| p * self.radii[k]).collect()
    }

    pub fn terminal(&self) -> (T, Vec<T>) {
        let n = self.times.len() - 1;
        (self.radii[n], self.angle(n).to_vec())
    }
}

/// Solves `dR = a(R,Φ) R^β dt`, `dΦ = b(R,Φ) R^{β+δ−1} dt` on `[0, t_end]`.
///
/// `R` is strictly increasing, so it serves as the independent variable;
/// with `R = w^k`, `k = 1/min(δ, 1−β)`, the system
/// `dΦ/dw = (b/a) k w^{kδ−1}`, `dt/dw = k w^{k(1−β)−1}/a` has no singular
/// coefficient at `w = 0` and is integrated by RK4 in `w` with about
/// `steps` steps. From `r0 = 0` this yields the solution with `R > 0` for
/// `t > 0`.
#[allow(clippy::too_many_arguments)]
pub fn polar_ode_solve<T, A, B>(
    a: A,
    b: B,
    beta: T,
    delta: T,
    r0: T,
    phi0: &[T],
    t_end: T,
    steps: usize,
) -> Result<PolarSolution<T>>
where
    T: Scalar,
    A: Fn(T, &[T]) -> T,
    B: Fn(T, &[T], &mut [T]),
{
    let d = phi0.len();
    if d == 0 {
        return domain("initial angle is empty");
    }
    if !(beta > T::zero() && beta < T::one()) || !(delta > T::zero() && delta < T::one()) {
        return domain(format!("beta = {beta} and delta = {delta} must lie in (0, 1)"));
    }
    if !(r0 >= T::zero()) || !(t_end > T::zero()) || steps == 0 {
        return domain("need r0 >= 0, t_end > 0 and at least one step");
    }
    if (norm(phi0) - T::one()).abs() > T::lit(1e-10) {
        return domain("initial angle must be a unit vector");
    }
    // a must be positive and bounded on a probe grid
    let (mut a_min, mut a_max) = (T::infinity(), T::zero());
    for i in 0..=24 {
        let r = T::lit(10.0).powf(T::lit(-6.0 + 0.5 * i as f64));
        for phi in angle_grid::<T>(d, 64) {
            let v = a(r, &phi);
            if !(v > T::zero()) || !v.is_finite() {
                return domain(format!("radial coefficient a is not positive at r = {r}, phi = {phi:?}: {v}"));
            }
            a_min = a_min.min(v);
            a_max = a_max.max(v);
        }
    }
    let one_m = T::one() - beta;
    let k = T::one() / delta.min(one_m);
    let r_hi = (r0.powf(one_m) + one_m * a_max * t_end).powf(T::one() / one_m);
    let w0 = r0.powf(T::one() / k);
    let dw = (r_hi.powf(T::one() / k) - w0) / from_usize(steps);
    let ex_phi = k * delta - T::one();
    let ex_t = k * one_m - T::one();

    // state: Φ (d entries) followed by t
    let rhs = |w: T, s: &[T], out: &mut [T]| {
        let r = w.powf(k);
        let phi = &s[..d];
        let av = a(r, phi);
        let mut bv = vec![T::zero(); d];
        b(r, phi, &mut bv);
        let wphi = k * w.powf(ex_phi) / av;
        for i in 0..d {
            out[i] = bv[i] * wphi;
        }
        out[d] = k * w.powf(ex_t) / av;
    };

    let mut s = phi0.to_vec();
    s.push(T::zero());
    let mut w = w0;
    let mut times = vec![T::zero()];
    let mut radii = vec![r0];
    let mut angles = phi0.to_vec();
    let mut drift = T::zero();
    let m = d + 1;
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m]);
    let half = dw / T::lit(2.0);
    let two = T::lit(2.0);
    let max_steps = 100 * steps;
    for _ in 0..max_steps {
        rhs(w, &s, &mut k1);
        (0..m).for_each(|i| tmp[i] = s[i] + half * k1[i]);
        rhs(w + half, &tmp, &mut k2);
        (0..m).for_each(|i| tmp[i] = s[i] + half * k2[i]);
        rhs(w + half, &tmp, &mut k3);
        (0..m).for_each(|i| tmp[i] = s[i] + dw * k3[i]);
        rhs(w + dw, &tmp, &mut k4);
        let prev_t = s[d];
        let prev_r = w.powf(k);
        let prev_phi = s[..d].to_vec();
        (0..m).for_each(|i| s[i] = s[i] + dw / T::lit(6.0) * (k1[i] + two * k2[i] + two * k3[i] + k4[i]));
        w = w + dw;
        let len = norm(&s[..d]);
        drift = drift.max((len - T::one()).abs());
        (0..d).for_each(|i| s[i] = s[i] / len);
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration { time: prev_t.as_f64(), reason: "polar solver diverged".into() });
        }
        let r = w.powf(k);
        if s[d] >= t_end {
            // land on t_end by linear interpolation inside the last step
            let f = (t_end - prev_t) / (s[d] - prev_t);
            let phi: Vec<T> = prev_phi.iter().zip(&s[..d]).map(|(&p, &q)| p + (q - p) * f).collect();
            times.push(t_end);
            radii.push(prev_r + (r - prev_r) * f);
            angles.extend(unit(&phi));
            return Ok(PolarSolution { dim: d, times, radii, angles, renorm_drift: drift });
        }
        times.push(s[d]);
        radii.push(r);
        angles.extend_from_slice(&s[..d]);
    }
    Err(Error::Integration {
        time: s[d].as_f64(),
        reason: format!("time {t_end} not reached within {max_steps} steps"),
    })
}

/// Solution `X₀(t_end, φ)` of `dX = A(X)dt` leaving the origin in direction
/// `φ`, via [`polar_ode_solve`] with `a = ⟨A(rφ), φ⟩/r^β` and
/// `b = A_tan(rφ)/r^{β+δ}`, `δ = min(γ, 1−β, 1/2)`.
pub fn zero_noise_reference<T: Scalar>(field: &FieldSpec<T>, phi: &[T], t_end: T, steps: usize) -> Result<Vec<T>> {
    let beta = field.beta();
    let delta = field.gamma().min(T::one() - beta).min(T::lit(0.5));
    let floor = T::min_positive_value().sqrt();
    let a = |r: T, p: &[T]| {
        let r = r.max(floor);
        let x: Vec<T> = p.iter().map(|&v| v * r).collect();
        dot(&field.eval_vec(&x), p) / r.powf(beta)
    };
    let b = |r: T, p: &[T], out: &mut [T]| {
        let r = r.max(floor);
        let x: Vec<T> = p.iter().map(|&v| v * r).collect();
        let v = field.eval_vec(&x);
        let along = dot(&v, p);
        let scale = r.powf(beta + delta);
        for i in 0..p.len() {
            out[i] = (v[i] - along * p[i]) / scale;
        }
    };
    let sol = polar_ode_solve(a, b, beta, delta, T::zero(), phi, t_end, steps)?;
    let (r, phi) = sol.terminal();
    Ok(phi.iter().map(|&p| p * r).collect())
}

/// For `n` in `grid_sizes`, the largest geodesic distance between `Φ(t_end)`
/// of neighbouring initial angles `2πk/n` (`d = 2`). It tends to 0 under
/// refinement when the solution map is continuous in the initial angle.
pub fn angle_continuity_sweep<T, A, B>(
    a: A,
    b: B,
    beta: T,
    delta: T,
    t_end: T,
    steps: usize,
    grid_sizes: &[usize],
) -> Result<Vec<(usize, T)>>
where
    T: Scalar,
    A: Fn(T, &[T]) -> T + Sync,
    B: Fn(T, &[T], &mut [T]) + Sync,
{
    grid_sizes
        .iter()
        .map(|&n| {
            if n < 2 {
                return domain("angle grid needs at least two points");
            }
            let ends: Vec<Vec<T>> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let th = T::TAU() * from_usize::<T>(j) / from_usize::<T>(n);
                    polar_ode_solve(&a, &b, beta, delta, T::zero(), &[th.cos(), th.sin()], t_end, steps)
                        .map(|s| s.terminal().1)
                })
                .collect::<Result<_>>()?;
            let sup = (0..n).map(|j| geodesic(&ends[j], &ends[(j + 1) % n])).fold(T::zero(), T::max);
            Ok((n, sup))
        })
        .collect()
}
