//! Empirical distances and moment estimators used by the verification layer.
//!
//! Kolmogorov–Smirnov distances are reported as raw sup-norm statistics;
//! thresholds are applied by the callers, not converted to p-values.

use std::cmp::Ordering;

use crate::scalar::{from_usize, Scalar};

fn sorted<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
///
/// Ties across samples are handled by advancing both empirical CDFs past the
/// tied value before measuring the gap.
pub fn ks_two_sample<T: Scalar>(a: &[T], b: &[T]) -> T {
    if a.is_empty() || b.is_empty() {
        return T::one();
    }
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (from_usize::<T>(a.len()), from_usize::<T>(b.len()));
    let (mut i, mut j) = (0, 0);
    let mut d = T::zero();
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        let gap = (from_usize::<T>(i) / na - from_usize::<T>(j) / nb).abs();
        d = d.max(gap);
    }
    d
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn ks_one_sample<T: Scalar>(a: &[T], cdf: impl Fn(T) -> T) -> T {
    if a.is_empty() {
        return T::one();
    }
    let a = sorted(a);
    let n = from_usize::<T>(a.len());
    a.iter().enumerate().fold(T::zero(), |d, (k, &x)| {
        let f = cdf(x);
        let lo = from_usize::<T>(k) / n;
        let hi = from_usize::<T>(k + 1) / n;
        d.max((f - lo).abs()).max((hi - f).abs())
    })
}

/// Breakpoints and the CDF difference `F_a - F_b` on each interval between them.
fn cdf_difference<T: Scalar>(a: &[T], b: &[T]) -> (Vec<T>, Vec<T>) {
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (from_usize::<T>(a.len()), from_usize::<T>(b.len()));
    let mut points = Vec::with_capacity(a.len() + b.len());
    let mut diffs = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        points.push(x);
        diffs.push(from_usize::<T>(i) / na - from_usize::<T>(j) / nb);
    }
    (points, diffs)
}

/// 1-Wasserstein distance between two empirical measures on the line.
pub fn wasserstein1<T: Scalar>(a: &[T], b: &[T]) -> T {
    if a.is_empty() || b.is_empty() {
        return T::infinity();
    }
    let (points, diffs) = cdf_difference(a, b);
    points
        .windows(2)
        .zip(&diffs)
        .fold(T::zero(), |acc, (w, &d)| acc + d.abs() * (w[1] - w[0]))
}

/// 1-Wasserstein distance on the circle of circumference `2π` between two
/// empirical measures of angles (radians, any representative).
///
/// Exact for empirical measures: with `D = F_a - F_b` computed from an
/// arbitrary cut point, `W1 = min_c ∫ |D(θ) - c| dθ`, attained at the
/// length-weighted median of `D`.
pub fn circular_wasserstein1<T: Scalar>(a: &[T], b: &[T]) -> T {
    if a.is_empty() || b.is_empty() {
        return T::infinity();
    }
    let wrap = |xs: &[T]| xs.iter().map(|&t| crate::geometry::wrap_angle(t)).collect::<Vec<_>>();
    let (a, b) = (wrap(a), wrap(b));
    let (points, diffs) = cdf_difference(&a, &b);
    let tau = T::TAU();
    // segment [points[k], points[k+1]) carries diffs[k]; the last segment wraps
    // through 2π back to points[0] and carries diffs[last] = 0 by construction,
    // which equals the value of D before the first point.
    let m = points.len();
    let mut segments: Vec<(T, T)> = Vec::with_capacity(m);
    for k in 0..m {
        let len = if k + 1 < m {
            points[k + 1] - points[k]
        } else {
            tau - points[k] + points[0]
        };
        segments.push((diffs[k], len));
    }
    let mut by_value = segments.clone();
    by_value.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
    let half = tau / T::lit(2.0);
    let mut acc = T::zero();
    let mut median = by_value[0].0;
    for &(v, len) in &by_value {
        acc = acc + len;
        median = v;
        if acc >= half {
            break;
        }
    }
    segments
        .iter()
        .fold(T::zero(), |s, &(v, len)| s + (v - median).abs() * len)
}

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / from_usize(xs.len())
}

/// Unbiased sample variance.
pub fn variance<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    ss / from_usize(xs.len().saturating_sub(1).max(1))
}

/// Pearson correlation of two equally long samples.
pub fn correlation<T: Scalar>(a: &[T], b: &[T]) -> T {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = T::zero();
    let mut saa = T::zero();
    let mut sbb = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        sab = sab + (x - ma) * (y - mb);
        saa = saa + (x - ma) * (x - ma);
        sbb = sbb + (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Empirical characteristic function `(mean cos(z·x), mean sin(z·x))` of
/// vectors stored row-major with `dim` coordinates each.
pub fn empirical_cf<T: Scalar>(samples: &[T], dim: usize, z: &[T]) -> (T, T) {
    let n = samples.len() / dim;
    let (mut re, mut im) = (T::zero(), T::zero());
    for row in samples.chunks_exact(dim) {
        let phase = crate::geometry::dot(row, z);
        let (s, c) = phase.sin_cos();
        re = re + c;
        im = im + s;
    }
    let n = from_usize::<T>(n);
    (re / n, im / n)
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile<T: Scalar>(xs: &[T], q: T) -> T {
    let v = sorted(xs);
    if v.is_empty() {
        return T::nan();
    }
    let pos = q.max(T::zero()).min(T::one()) * from_usize::<T>(v.len() - 1);
    let lo = pos.floor().to_usize().unwrap_or(0);
    let hi = (lo + 1).min(v.len() - 1);
    let frac = pos - from_usize::<T>(lo);
    v[lo] + (v[hi] - v[lo]) * frac
}
