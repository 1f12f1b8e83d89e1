//! Isotropic symmetric α-stable increments and paths.
//!
//! Scale convention: `c` is the coefficient of the characteristic exponent,
//! `E exp(i⟨z, B(t)⟩) = exp(-c |z|^α t)`. This is the only place the
//! relation between `c` and concrete sampling scales is worked out.
//!
//! An increment over `dt` is drawn by Gaussian subordination:
//!
//! ```text
//! ΔB = √2 (c dt)^{1/α} · √S · G
//! ```
//!
//! with `G` standard Gaussian in ℝ^d and `S > 0` a one-sided (α/2)-stable
//! variable normalized by `E exp(-λ S) = exp(-λ^{α/2})`. Conditionally on `S`
//! the characteristic function is `exp(-(c dt)^{2/α} S |z|²)`, and averaging
//! over `S` with `λ = (c dt)^{2/α} |z|²` gives `exp(-c dt |z|^α)`. For
//! `α = 2`, `S ≡ 1` and the increment is `N(0, 2 c dt I)`.
//!
//! `S` is drawn by Kanter's transform: with `U ~ Unif(0, π)`, `E ~ Exp(1)`
//! and `a = α/2`,
//! `S = sin(aU) / sin(U)^{1/a} · (sin((1-a)U) / E)^{(1-a)/a}`.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::norm;
use crate::rng::{self, Stream};
use crate::scalar::Scalar;

/// Law of the driving noise: stability index, characteristic scale, dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams<T> {
    pub alpha: T,
    pub c: T,
    pub dim: usize,
}

impl<T: Scalar> StableParams<T> {
    pub fn new(alpha: T, c: T, dim: usize) -> Result<Self> {
        let p = Self { alpha, c, dim };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::one() && self.alpha <= T::lit(2.0)) {
            return domain(format!("stability index alpha = {} outside (1, 2]", self.alpha));
        }
        if !(self.c > T::zero()) || !self.c.is_finite() {
            return domain(format!("scale c = {} must be positive", self.c));
        }
        if self.dim == 0 {
            return domain("dimension must be at least 1");
        }
        Ok(())
    }

    pub fn is_gaussian(&self) -> bool {
        self.alpha == T::lit(2.0)
    }
}

/// Draws `S > 0` with `E exp(-λS) = exp(-λ^a)`, `0 < a < 1`.
pub fn sample_positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let e: f64 = Exp1.sample(rng);
    let log_s = (a * u).sin().ln() - (u.sin().ln()) / a
        + ((1.0 - a) / a) * (((1.0 - a) * u).sin().ln() - e.ln());
    log_s.exp()
}

/// Increment sampler for a fixed `(params, dt)`; reuse it inside time loops.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler {
    alpha: f64,
    dim: usize,
    scale: f64,
}

impl IncrementSampler {
    pub fn new<T: Scalar>(params: &StableParams<T>, dt: T) -> Result<Self> {
        params.validate()?;
        if !(dt > T::zero()) {
            return domain(format!("time step dt = {dt} must be positive"));
        }
        let alpha = params.alpha.as_f64();
        let scale = std::f64::consts::SQRT_2 * (params.c.as_f64() * dt.as_f64()).powf(1.0 / alpha);
        Ok(Self { alpha, dim: params.dim, scale })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes one increment into `out` (length `dim`).
    #[inline]
    pub fn fill<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [T]) {
        let mut mult = self.scale;
        if self.alpha < 2.0 {
            mult *= sample_positive_stable(0.5 * self.alpha, rng).sqrt();
        }
        for o in out.iter_mut() {
            let g: f64 = StandardNormal.sample(rng);
            *o = T::lit(mult * g);
        }
    }

    /// Adds `weight` times one increment to `acc`.
    #[inline]
    pub fn add_scaled<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R, weight: T, acc: &mut [T]) {
        let mut mult = self.scale;
        if self.alpha < 2.0 {
            mult *= sample_positive_stable(0.5 * self.alpha, rng).sqrt();
        }
        for o in acc.iter_mut() {
            let g: f64 = StandardNormal.sample(rng);
            *o = *o + weight * T::lit(mult * g);
        }
    }
}

/// One increment `B(t + dt) - B(t)`.
pub fn sample_increment<T: Scalar, R: Rng + ?Sized>(
    params: &StableParams<T>,
    dt: T,
    rng: &mut R,
) -> Result<Vec<T>> {
    let sampler = IncrementSampler::new(params, dt)?;
    let mut out = vec![T::zero(); params.dim];
    sampler.fill(rng, &mut out);
    Ok(out)
}

/// A sampled noise path on an arbitrary increasing grid starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePath<T> {
    pub params: StableParams<T>,
    pub times: Vec<T>,
    /// Row-major, `times.len() - 1` rows of `dim` coordinates.
    pub increments: Vec<T>,
    pub seed: u64,
    pub stream: u64,
}

impl<T: Scalar> NoisePath<T> {
    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn increment(&self, k: usize) -> &[T] {
        let d = self.dim();
        &self.increments[k * d..(k + 1) * d]
    }

    /// Path values `B(times[k])`, row-major; the first row is zero.
    pub fn values(&self) -> Vec<T> {
        let d = self.dim();
        let mut out = vec![T::zero(); self.times.len() * d];
        for k in 1..self.times.len() {
            for i in 0..d {
                out[k * d + i] = out[(k - 1) * d + i] + self.increments[(k - 1) * d + i];
            }
        }
        out
    }

    /// Value at the final grid time.
    pub fn terminal(&self) -> Vec<T> {
        let d = self.dim();
        let mut acc = vec![T::zero(); d];
        for row in self.increments.chunks_exact(d) {
            for (a, &x) in acc.iter_mut().zip(row) {
                *a = *a + x;
            }
        }
        acc
    }
}

fn check_grid<T: Scalar>(grid: &[T]) -> Result<()> {
    if grid.is_empty() || grid[0] != T::zero() {
        return domain("noise grid must start at 0");
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("noise grid must be strictly increasing");
    }
    Ok(())
}

/// Samples a path on `grid`, one independent increment per interval, from
/// stream `(seed, stream)`.
pub fn sample_path<T: Scalar>(
    params: &StableParams<T>,
    grid: &[T],
    seed: u64,
    stream: u64,
) -> Result<NoisePath<T>> {
    params.validate()?;
    check_grid(grid)?;
    let mut rng: Stream = rng::stream(seed, stream);
    let d = params.dim;
    let mut increments = vec![T::zero(); (grid.len() - 1) * d];
    for (k, w) in grid.windows(2).enumerate() {
        let sampler = IncrementSampler::new(params, w[1] - w[0])?;
        sampler.fill(&mut rng, &mut increments[k * d..(k + 1) * d]);
    }
    Ok(NoisePath { params: *params, times: grid.to_vec(), increments, seed, stream })
}

/// Maximum of `|B(t)| / t^{1/α'}` over the grid points of one dyadic window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowMax<T> {
    /// Window `[2^k, 2^{k+1}]`.
    pub k: i32,
    pub value: T,
}

/// Per-window maxima of `|B(t)| / t^{1/α'}` over every full dyadic window
/// `[2^k, 2^{k+1}]` covered by the grid, in increasing `k`.
///
/// For `α' < α` the normalized path tends to zero, so the window maxima
/// trend downward; for `α' ≥ α` the statistic does not vanish in law.
pub fn khintchine_windows<T: Scalar>(path: &NoisePath<T>, alpha_prime: T) -> Result<Vec<WindowMax<T>>> {
    if !(alpha_prime > T::one() && alpha_prime < path.params.alpha) {
        return domain(format!(
            "alpha' = {alpha_prime} must lie in (1, alpha = {})",
            path.params.alpha
        ));
    }
    let values = path.values();
    let d = path.dim();
    let exponent = T::one() / alpha_prime;
    let t_min = match path.times.iter().find(|&&t| t > T::zero()) {
        Some(&t) => t,
        None => return Ok(Vec::new()),
    };
    let horizon = *path.times.last().expect("non-empty grid");
    let k_lo = t_min.log2().ceil().to_i32().unwrap_or(i32::MIN);
    let k_hi = horizon.log2().floor().to_i32().unwrap_or(i32::MIN) - 1;
    let mut out = Vec::new();
    for k in k_lo..=k_hi {
        let lo = T::lit(2.0).powi(k);
        let hi = lo * T::lit(2.0);
        let mut best = T::zero();
        for (idx, &t) in path.times.iter().enumerate() {
            if t >= lo && t <= hi {
                let r = norm(&values[idx * d..(idx + 1) * d]);
                best = best.max(r / t.powf(exponent));
            }
        }
        out.push(WindowMax { k, value: best });
    }
    Ok(out)
}

/// Maximum over all full dyadic windows of `sup |B(t)| / t^{1/α'}`.
pub fn khintchine_statistic<T: Scalar>(path: &NoisePath<T>, alpha_prime: T) -> Result<T> {
    Ok(khintchine_windows(path, alpha_prime)?
        .iter()
        .fold(T::zero(), |m, w| m.max(w.value)))
}

/// Geometric grid `0, t_min, t_min·q, …, horizon` with `per_octave` points
/// per doubling. Suited to scale-free path diagnostics.
pub fn geometric_grid<T: Scalar>(t_min: T, horizon: T, per_octave: usize) -> Vec<T> {
    let mut grid = vec![T::zero()];
    let q = T::lit(2.0).powf(T::one() / T::from_usize(per_octave.max(1)).unwrap());
    let mut t = t_min;
    while t < horizon {
        grid.push(t);
        t = t * q;
    }
    grid.push(horizon);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{correlation, empirical_cf, mean, variance};

    fn draws(params: &StableParams<f64>, dt: f64, n: usize, seed: u64) -> Vec<f64> {
        let sampler = IncrementSampler::new(params, dt).unwrap();
        let mut rng = rng::stream(seed, 0);
        let mut out = vec![0.0; n * params.dim];
        for row in out.chunks_exact_mut(params.dim) {
            sampler.fill(&mut rng, row);
        }
        out
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StableParams::new(1.0, 1.0, 1).is_err());
        assert!(StableParams::new(2.1, 1.0, 1).is_err());
        assert!(StableParams::new(1.5, 0.0, 1).is_err());
        assert!(StableParams::new(1.5, 1.0, 0).is_err());
        let p = StableParams::new(1.5, 1.0, 1).unwrap();
        let mut rng = rng::stream(0, 0);
        assert!(sample_increment(&p, 0.0, &mut rng).is_err());
        assert!(sample_increment(&p, -1.0, &mut rng).is_err());
    }

    #[test]
    fn gaussian_case_variance() {
        // α = 2, c = 1, dt = 1: variance 2
        let p = StableParams::new(2.0, 1.0, 1).unwrap();
        let x = draws(&p, 1.0, 100_000, 11);
        let v = variance(&x);
        // standard error of the variance for a normal sample: v·√(2/(n-1))
        let se = 2.0 * (2.0 / 99_999.0f64).sqrt();
        assert!((v - 2.0).abs() < 3.0 * se, "variance {v}");
    }

    #[test]
    fn gaussian_case_per_coordinate_variance() {
        // α = 2, c = 0.5, d = 3, dt = 2: per-coordinate variance 2·0.5·2 = 2
        let p = StableParams::new(2.0, 0.5, 3).unwrap();
        let n = 100_000;
        let x = draws(&p, 2.0, n, 12);
        let se = 2.0 * (2.0 / (n as f64 - 1.0)).sqrt();
        for i in 0..3 {
            let col: Vec<f64> = x.chunks_exact(3).map(|r| r[i]).collect();
            let v = variance(&col);
            assert!((v - 2.0).abs() < 3.0 * se, "coordinate {i}: variance {v}");
        }
    }

    #[test]
    fn stable_case_characteristic_function() {
        // α = 1.5, c = 1, dt = 1: E cos(zX) = exp(-|z|^1.5)
        let p = StableParams::new(1.5, 1.0, 1).unwrap();
        let n = 100_000;
        let x = draws(&p, 1.0, n, 13);
        for z in [0.5, 1.0, 2.0] {
            let (re, _) = empirical_cf(&x, 1, &[z]);
            let target = (-z.powf(1.5)).exp();
            assert!((re - target).abs() < 4.0 / (n as f64).sqrt(), "z = {z}: {re} vs {target}");
        }
    }

    #[test]
    fn positive_stable_laplace_transform() {
        // E exp(-λS) = exp(-λ^a), checked at λ ∈ {0.5, 1, 2}
        let mut rng = rng::stream(5, 0);
        let a = 0.75;
        let n = 100_000;
        let s: Vec<f64> = (0..n).map(|_| sample_positive_stable(a, &mut rng)).collect();
        for lambda in [0.5f64, 1.0, 2.0] {
            let est = mean(&s.iter().map(|&v| (-lambda * v).exp()).collect::<Vec<_>>());
            let target = (-lambda.powf(a)).exp();
            assert!((est - target).abs() < 4.0 / (n as f64).sqrt(), "λ = {lambda}");
        }
    }

    #[test]
    fn path_is_reproducible() {
        let p = StableParams::new(1.7, 1.0, 2).unwrap();
        let grid = [0.0, 0.5, 1.0, 1.5];
        let a = sample_path(&p, &grid, 42, 9).unwrap();
        let b = sample_path(&p, &grid, 42, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_path(&p, &grid, 42, 10).unwrap();
        assert_ne!(a.increments, c.increments);
    }

    #[test]
    fn path_rejects_bad_grids() {
        let p = StableParams::new(2.0, 1.0, 1).unwrap();
        assert!(sample_path(&p, &[0.0, 1.0, 1.0], 0, 0).is_err());
        assert!(sample_path(&p, &[0.0, 2.0, 1.0], 0, 0).is_err());
        assert!(sample_path(&p, &[0.5, 1.0], 0, 0).is_err());
    }

    #[test]
    fn path_value_is_sum_of_increments() {
        // grid [0,1,2], α = 2: B(2) = ΔB₀ + ΔB₁, variance 2·c·2 = 4
        let p = StableParams::new(2.0, 1.0, 1).unwrap();
        let n = 20_000;
        let ends: Vec<f64> = (0..n)
            .map(|s| {
                let path = sample_path(&p, &[0.0, 1.0, 2.0], 3, s).unwrap();
                let v = path.values();
                assert_eq!(v[2], path.increments[0] + path.increments[1]);
                v[2]
            })
            .collect();
        let var = variance(&ends);
        let se = 4.0 * (2.0 / (n as f64 - 1.0)).sqrt();
        assert!((var - 4.0).abs() < 3.0 * se, "variance {var}");
    }

    #[test]
    fn disjoint_increments_uncorrelated() {
        let p = StableParams::new(2.0, 1.0, 1).unwrap();
        let n = 10_000u64;
        let (mut first, mut second) = (Vec::new(), Vec::new());
        for s in 0..n {
            let path = sample_path(&p, &[0.0, 1.0, 2.0], 17, s).unwrap();
            first.push(path.increments[0]);
            second.push(path.increments[1]);
        }
        let rho: f64 = correlation(&first, &second);
        assert!(rho.abs() < 3.0 / (n as f64).sqrt(), "correlation {rho}");
    }

    #[test]
    fn khintchine_zero_path() {
        let p = StableParams::new(2.0, 1.0, 1).unwrap();
        let path = NoisePath {
            params: p,
            times: vec![0.0, 1.0, 2.0, 4.0],
            increments: vec![0.0; 3],
            seed: 0,
            stream: 0,
        };
        assert_eq!(khintchine_statistic(&path, 1.9).unwrap(), 0.0);
    }

    #[test]
    fn khintchine_rejects_alpha_prime_at_or_above_alpha() {
        let p = StableParams::new(1.5, 1.0, 1).unwrap();
        let path = sample_path(&p, &[0.0, 1.0, 2.0], 0, 0).unwrap();
        assert!(khintchine_statistic(&path, 1.5).is_err());
        assert!(khintchine_statistic(&path, 1.7).is_err());
    }
}
