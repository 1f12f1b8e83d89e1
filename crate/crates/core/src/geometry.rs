//! Small vector helpers on `&[T]` slices.

use crate::scalar::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Scalar>(x: &[T]) -> T {
    // hypot-style scaling is unnecessary at the magnitudes we integrate
    dot(x, x).sqrt()
}

/// Unit vector `x/|x|`; the first basis vector when `x = 0`.
pub fn unit<T: Scalar>(x: &[T]) -> Vec<T> {
    let r = norm(x);
    if r > T::zero() {
        x.iter().map(|&v| v / r).collect()
    } else {
        basis(x.len(), 0)
    }
}

pub fn basis<T: Scalar>(dim: usize, k: usize) -> Vec<T> {
    let mut e = vec![T::zero(); dim];
    e[k] = T::one();
    e
}

/// Geodesic (arc-length) distance between two unit vectors.
///
/// Uses `2 asin(|u - v| / 2)`, which stays accurate for nearly equal vectors.
pub fn geodesic<T: Scalar>(u: &[T], v: &[T]) -> T {
    let chord = u
        .iter()
        .zip(v)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
        .sqrt();
    let half = (chord / T::lit(2.0)).min(T::one());
    T::lit(2.0) * half.asin()
}

/// Polar angle of a planar vector in `[0, 2π)`.
pub fn angle2<T: Scalar>(x: &[T]) -> T {
    let theta = x[1].atan2(x[0]);
    if theta < T::zero() {
        theta + T::TAU()
    } else {
        theta
    }
}

/// Rotates a planar vector by `theta`.
pub fn rotate2<T: Scalar>(x: &[T], theta: T) -> Vec<T> {
    let (s, c) = theta.sin_cos();
    vec![c * x[0] - s * x[1], s * x[0] + c * x[1]]
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle<T: Scalar>(theta: T) -> T {
    let tau = T::TAU();
    let w = theta % tau;
    if w < T::zero() {
        w + tau
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn geodesic_of_opposite_points_is_pi() {
        let d: f64 = geodesic(&[1.0, 0.0], &[-1.0, 0.0]);
        assert_relative_eq!(d, std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn geodesic_small_angle() {
        let t = 1e-9_f64;
        let d = geodesic(&[1.0, 0.0], &[t.cos(), t.sin()]);
        assert_relative_eq!(d, t, max_relative = 1e-6);
    }

    #[test]
    fn unit_of_zero_is_first_basis_vector() {
        assert_eq!(unit::<f64>(&[0.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn angle2_range() {
        let a: f64 = angle2(&[0.0, -1.0]);
        assert_relative_eq!(a, 1.5 * std::f64::consts::PI, epsilon = 1e-15);
    }
}
