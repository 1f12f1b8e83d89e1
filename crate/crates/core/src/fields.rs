//! Drift fields with declared power asymptotics at the origin or at infinity.
//!
//! A field is stored as an evaluation closure together with the data its
//! asymptotics are declared against: the power index `β`, the tangential
//! margin `γ`, and the angular profile `ā` on the unit sphere.

use std::fmt;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{dot, norm, unit};
use crate::rng;
use crate::scalar::{from_usize, Scalar};
use crate::sde::AlternatingForcing;

pub type DriftFn<T> = Arc<dyn Fn(&[T], &mut [T]) + Send + Sync>;
pub type AngularFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// Where the field's declared asymptotics hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Asymptotics {
    /// `A(x) ~ ā(φ) x^β` and `|A_tan| = o(r^{β+γ})` as `r → 0`.
    Zero,
    /// `A_rad = a(x) r^β φ` with `a → ā` and `|A_tan| ≤ C r^{β-γ}` as `r → ∞`.
    Infinity,
    /// Exact at both ends (model fields).
    Both,
}

/// Immutable drift field `A: ℝ^d → ℝ^d` with `A(0) = 0`.
#[derive(Clone)]
pub struct FieldSpec<T> {
    name: String,
    dim: usize,
    beta: T,
    gamma: T,
    asymptotics: Asymptotics,
    drift: DriftFn<T>,
    a_bar: AngularFn<T>,
}

impl<T: Scalar> fmt::Debug for FieldSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("beta", &self.beta)
            .field("gamma", &self.gamma)
            .field("asymptotics", &self.asymptotics)
            .finish()
    }
}

impl<T: Scalar> FieldSpec<T> {
    /// Builds a field and checks its invariants: `|β| < 1`, `γ > 0`,
    /// `A(0) = 0`, and `ā > 0` on a sampled angle grid.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        beta: T,
        gamma: T,
        asymptotics: Asymptotics,
        drift: DriftFn<T>,
        a_bar: AngularFn<T>,
    ) -> Result<Self> {
        if dim == 0 {
            return domain("field dimension must be at least 1");
        }
        if !(beta.abs() < T::one()) {
            return domain(format!("power index beta = {beta} must satisfy |beta| < 1"));
        }
        if !(gamma > T::zero()) {
            return domain(format!("tangential margin gamma = {gamma} must be positive"));
        }
        let field = Self { name: name.into(), dim, beta, gamma, asymptotics, drift, a_bar };
        let zero = vec![T::zero(); dim];
        if field.eval_vec(&zero).iter().any(|&v| v != T::zero()) {
            return domain("field must vanish at the origin");
        }
        for phi in angle_grid::<T>(dim, 256) {
            let a = field.a_bar_at(&phi);
            if !(a > T::zero()) || !a.is_finite() {
                return domain(format!("angular profile is not positive at {phi:?}: {a}"));
            }
        }
        Ok(field)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn gamma(&self) -> T {
        self.gamma
    }
    pub fn asymptotics(&self) -> Asymptotics {
        self.asymptotics
    }

    /// Renamed copy.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn eval(&self, x: &[T], out: &mut [T]) {
        (self.drift)(x, out)
    }

    pub fn eval_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.eval(x, &mut out);
        out
    }

    /// `ā(φ)` for a unit vector `φ`.
    #[inline]
    pub fn a_bar_at(&self, phi: &[T]) -> T {
        (self.a_bar)(phi)
    }

    /// Smallest value of `ā` on a sampled angle grid.
    pub fn a_bar_min(&self) -> T {
        angle_grid::<T>(self.dim, 720)
            .iter()
            .map(|phi| self.a_bar_at(phi))
            .fold(T::infinity(), T::min)
    }
}

/// A point in polar form. At `r = 0` the angle is the first basis vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint<T> {
    pub r: T,
    pub phi: Vec<T>,
}

impl<T: Scalar> PolarPoint<T> {
    pub fn from_cartesian(x: &[T]) -> Self {
        Self { r: norm(x), phi: unit(x) }
    }

    pub fn to_cartesian(&self) -> Vec<T> {
        self.phi.iter().map(|&p| p * self.r).collect()
    }
}

/// Signed power `x^β := |x|^{β-1} x`, with `0^β := 0` for every `β`.
pub fn power_map<T: Scalar>(x: &[T], beta: T) -> Vec<T> {
    let r = norm(x);
    if r == T::zero() {
        return vec![T::zero(); x.len()];
    }
    let s = r.powf(beta - T::one());
    x.iter().map(|&v| v * s).collect()
}

/// Splits `A(x)` into `⟨A(x), φ⟩φ` and the orthogonal remainder.
pub fn decompose<T: Scalar>(field: &FieldSpec<T>, x: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let r = norm(x);
    if r == T::zero() {
        return domain("radial/tangential decomposition is undefined at the origin");
    }
    let a = field.eval_vec(x);
    Ok(split(&a, x, r))
}

fn split<T: Scalar>(a: &[T], x: &[T], r: T) -> (Vec<T>, Vec<T>) {
    let phi: Vec<T> = x.iter().map(|&v| v / r).collect();
    let along = dot(a, &phi);
    let rad: Vec<T> = phi.iter().map(|&p| along * p).collect();
    let tan: Vec<T> = a.iter().zip(&rad).map(|(&v, &w)| v - w).collect();
    (rad, tan)
}

/// Angles used to sample functions on `S^{d-1}`: `±1` for `d = 1`, `n`
/// uniform angles for `d = 2`, and a fixed pseudo-random cloud plus the
/// coordinate directions for `d ≥ 3`.
pub fn angle_grid<T: Scalar>(dim: usize, n: usize) -> Vec<Vec<T>> {
    match dim {
        1 => vec![vec![T::one()], vec![-T::one()]],
        2 => (0..n.max(1))
            .map(|k| {
                let th = T::TAU() * from_usize::<T>(k) / from_usize::<T>(n.max(1));
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut rng = rng::stream(0x005e_eda9, 0);
            let mut out = Vec::with_capacity(n + 2 * dim);
            for k in 0..dim {
                for s in [T::one(), -T::one()] {
                    let mut e = vec![T::zero(); dim];
                    e[k] = s;
                    out.push(e);
                }
            }
            for _ in 0..n {
                let g: Vec<T> = (0..dim)
                    .map(|_| T::lit(StandardNormal.sample(&mut rng)))
                    .collect();
                out.push(unit(&g));
            }
            out
        }
    }
}

/// Model field `A(x) = ā(φ) r^β φ`: no tangential part, exact asymptotics
/// at both ends.
pub fn model_field<T: Scalar>(
    a_bar: impl Fn(&[T]) -> T + Send + Sync + 'static,
    beta: T,
    dim: usize,
) -> Result<FieldSpec<T>> {
    radial_field("model", Arc::new(a_bar), beta, dim, None)
}

/// Radial field `ā(φ) ρ(r) φ` with `ρ(r) = r^β`, optionally continued past
/// `truncate` by its tangent line `ρ(R) + ρ'(R)(r − R)`, which keeps the
/// field `C¹` in `r` and globally Lipschitz outside every ball around 0.
fn radial_field<T: Scalar>(
    name: &str,
    a_bar: AngularFn<T>,
    beta: T,
    dim: usize,
    truncate: Option<T>,
) -> Result<FieldSpec<T>> {
    if let Some(rt) = truncate {
        if !(rt > T::zero()) {
            return domain(format!("truncation radius {rt} must be positive"));
        }
    }
    let a = a_bar.clone();
    let drift: DriftFn<T> = Arc::new(move |x: &[T], out: &mut [T]| {
        let r = norm(x);
        if r == T::zero() {
            out.iter_mut().for_each(|o| *o = T::zero());
            return;
        }
        let profile = match truncate {
            Some(rt) if r > rt => rt.powf(beta) + beta * rt.powf(beta - T::one()) * (r - rt),
            _ => r.powf(beta),
        };
        let inv_r = T::one() / r;
        let mut phi_buf = [T::zero(); 8];
        let scale = if x.len() <= 8 {
            for (p, &v) in phi_buf.iter_mut().zip(x) {
                *p = v * inv_r;
            }
            a(&phi_buf[..x.len()]) * profile * inv_r
        } else {
            let phi: Vec<T> = x.iter().map(|&v| v * inv_r).collect();
            a(&phi) * profile * inv_r
        };
        for (o, &v) in out.iter_mut().zip(x) {
            *o = v * scale;
        }
    });
    let asym = if truncate.is_some() { Asymptotics::Zero } else { Asymptotics::Both };
    // the tangential part is identically zero, so any positive margin works
    FieldSpec::new(name, dim, beta, T::one(), asym, drift, a_bar)
}

/// Built-in fields, addressable by name from experiment configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "kebab-case")]
pub enum FieldChoice {
    /// `ā ≡ a_bar`, any dimension.
    Model { a_bar: f64 },
    /// One-dimensional `a_± |x|^β sign(x)`.
    Sign1d { a_plus: f64, a_minus: f64 },
    /// Planar `ā(θ) = 1 + amplitude · cos(θ − phase)`.
    AngularCosine { amplitude: f64, phase: f64 },
    /// The bounded-orbit construction; see [`counterexample_pair`].
    Counterexample { n: f64, r_rad: f64 },
    /// `ā` tabulated: `[ā(+1), ā(−1)]` for `d = 1`, or values on the uniform
    /// angle grid `θ_k = 2πk/m` (periodic linear interpolation) for `d = 2`.
    CustomTable { values: Vec<f64> },
}

impl FieldChoice {
    pub fn name(&self) -> &'static str {
        match self {
            FieldChoice::Model { .. } => "model",
            FieldChoice::Sign1d { .. } => "sign1d",
            FieldChoice::AngularCosine { .. } => "angular-cosine",
            FieldChoice::Counterexample { .. } => "counterexample",
            FieldChoice::CustomTable { .. } => "custom-table",
        }
    }

    /// Instantiates the field. `truncate` applies to the radial families
    /// (ignored by the counterexample).
    pub fn build<T: Scalar>(&self, beta: T, dim: usize, truncate: Option<T>) -> Result<FieldSpec<T>> {
        let name = self.name();
        match self {
            FieldChoice::Model { a_bar } => {
                let a = T::lit(*a_bar);
                radial_field(name, Arc::new(move |_: &[T]| a), beta, dim, truncate)
            }
            FieldChoice::Sign1d { a_plus, a_minus } => {
                if dim != 1 {
                    return domain("sign1d is one-dimensional");
                }
                let (p, m) = (T::lit(*a_plus), T::lit(*a_minus));
                radial_field(
                    name,
                    Arc::new(move |phi: &[T]| if phi[0] >= T::zero() { p } else { m }),
                    beta,
                    1,
                    truncate,
                )
            }
            FieldChoice::AngularCosine { amplitude, phase } => {
                if dim != 2 {
                    return domain("angular-cosine is planar");
                }
                if amplitude.abs() >= 1.0 {
                    return domain("angular-cosine amplitude must be below 1 for a positive profile");
                }
                let (amp, ph) = (T::lit(*amplitude), T::lit(*phase));
                radial_field(
                    name,
                    Arc::new(move |phi: &[T]| T::one() + amp * (phi[1].atan2(phi[0]) - ph).cos()),
                    beta,
                    2,
                    truncate,
                )
            }
            FieldChoice::Counterexample { n, r_rad } => {
                if dim != 2 {
                    return domain("the counterexample field is planar");
                }
                counterexample_pair(T::lit(*n), beta, T::lit(*r_rad)).map(|(f, _)| f)
            }
            FieldChoice::CustomTable { values } => {
                let table: Vec<T> = values.iter().map(|&v| T::lit(v)).collect();
                tabulated_profile(table, dim).and_then(|a| radial_field(name, a, beta, dim, truncate))
            }
        }
    }
}

fn tabulated_profile<T: Scalar>(table: Vec<T>, dim: usize) -> Result<AngularFn<T>> {
    if table.iter().any(|&v| !(v > T::zero())) {
        return domain("tabulated angular profile must be positive");
    }
    match dim {
        1 if table.len() == 2 => {
            let (p, m) = (table[0], table[1]);
            Ok(Arc::new(move |phi: &[T]| if phi[0] >= T::zero() { p } else { m }))
        }
        1 => domain("a one-dimensional table needs exactly [a(+1), a(-1)]"),
        2 if table.len() >= 2 => {
            let m = table.len();
            Ok(Arc::new(move |phi: &[T]| {
                let theta = crate::geometry::angle2(phi);
                let pos = theta / T::TAU() * from_usize::<T>(m);
                let k = pos.floor().to_usize().unwrap_or(0) % m;
                let frac = pos - pos.floor();
                table[k] * (T::one() - frac) + table[(k + 1) % m] * frac
            }))
        }
        2 => domain("a planar table needs at least two values"),
        _ => domain("tabulated profiles are supported for d = 1 and d = 2"),
    }
}

// Shape constants of the steering annulus used by `counterexample_pair`.
const STEER_SPEEDUP: f64 = 3.0;
const LANDING_WIDTH: f64 = 0.05;
const LANDING_PULL: f64 = 50.0;
const INNER_SKIRT: f64 = 0.5;

/// Planar field and forcing whose forced solution from `(n, 0)` stays
/// bounded although the radial part grows like `r^β`.
///
/// With `σ = ((n+1)^{1−β} − n^{1−β})/(1−β)` the forcing alternates between
/// `(0,0)` and `(1,0)` on consecutive σ-blocks. On the annulus
/// `[n − ½, r_rad)` the field turns the orbit half a revolution while the
/// radius climbs from `n` to `n + 1`; each forcing jump then moves the point
/// from `(∓(n+1), 0)` back to `(∓n, 0)`.
///
/// Outside the annulus `A = r^β φ`. Inside it the radial speed is
/// `κ r^β` up to a landing ring at `r = n + 1` that attracts both radially
/// (linear ramp of width `w`) and in angle (pull towards the nearest multiple
/// of π), so the orbit arrives early and waits. A constant-speed half-turn
/// with `A_rad = r^β φ` would be exactly periodic but linearly unstable
/// (radial multiplier `((n+1)/n)^β` per half-cycle), and would not survive
/// rounding over long horizons.
pub fn counterexample_pair<T: Scalar>(n: T, beta: T, r_rad: T) -> Result<(FieldSpec<T>, AlternatingForcing<T>)> {
    if !(n >= T::one()) {
        return domain(format!("counterexample needs n >= 1, got {n}"));
    }
    if !(beta > T::zero() && beta < T::one()) {
        return domain(format!("counterexample needs beta in (0, 1), got {beta}"));
    }
    let w = T::lit(LANDING_WIDTH);
    let top = n + T::one();
    if !(r_rad > top + w) {
        return domain(format!("r_rad = {r_rad} must exceed n + 1 + {LANDING_WIDTH}"));
    }
    let one_m_beta = T::one() - beta;
    let sigma = (top.powf(one_m_beta) - n.powf(one_m_beta)) / one_m_beta;

    let kappa = T::lit(STEER_SPEEDUP);
    let pull = T::lit(LANDING_PULL);
    let inner = n - T::lit(INNER_SKIRT);
    let rot_end = top - w - w;
    // angle gained on [n, rot_end]: ∫ ω/(κ r) dr = (ω/κ) ln(rot_end/n) = π
    let omega = kappa * T::PI() / (rot_end / n).ln();

    let drift: DriftFn<T> = Arc::new(move |x: &[T], out: &mut [T]| {
        let r = norm(x);
        if r == T::zero() {
            out[0] = T::zero();
            out[1] = T::zero();
            return;
        }
        let (p0, p1) = (x[0] / r, x[1] / r);
        let in_annulus = r >= inner && r < r_rad;
        let a = if in_annulus {
            kappa * ((top - r) / w).max(-T::one()).min(T::one())
        } else {
            T::one()
        };
        let g = if in_annulus && r < rot_end {
            omega
        } else if in_annulus {
            -pull * p0 * p1
        } else {
            T::zero()
        };
        let rb = r.powf(beta);
        out[0] = rb * (a * p0 - g * p1);
        out[1] = rb * (a * p1 + g * p0);
    });
    let field = FieldSpec::new(
        "counterexample",
        2,
        beta,
        T::lit(0.5),
        Asymptotics::Infinity,
        drift,
        Arc::new(|_: &[T]| T::one()),
    )?;
    let forcing = AlternatingForcing::new(sigma, vec![T::one(), T::zero()])?;
    Ok((field, forcing))
}

/// Worst-case asymptotic ratios at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusCheck<T> {
    pub r: T,
    /// `max_φ |⟨A(rφ), φ⟩ − ā(φ) r^β| / (ā(φ) r^β)`.
    pub radial_deviation: T,
    /// `max_φ |A_tan(rφ)| / r^{β+γ}` (at zero) or `/ r^{β−γ}` (at infinity).
    pub tangential_ratio: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck<T> {
    pub regime: Asymptotics,
    /// Ordered from the far end towards the asymptotic end.
    pub rows: Vec<RadiusCheck<T>>,
    pub radial_ok: bool,
    pub tangential_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport<T> {
    pub field: String,
    pub checks: Vec<RegimeCheck<T>>,
    pub violations: Vec<String>,
    pub passed: bool,
}

/// Numerically checks the declared asymptotics of `field` on `radii × angles`.
///
/// Radial: the relative deviation from `ā(φ) r^β` at the radius nearest the
/// asymptotic end must be at most `tol` and must not exceed the deviation at
/// the far end by more than `tol`. Tangential: the normalized tangential size
/// must stay finite and must not grow towards the asymptotic end (more than
/// `tol` above its far-end value). A field whose tangential part decays more
/// slowly than the declared rate shows a ratio that grows along the grid.
///
/// `Both` runs the zero and infinity checks on the same radii.
pub fn asymptotic_validate<T: Scalar>(
    field: &FieldSpec<T>,
    radii: &[T],
    angles: &[Vec<T>],
    tol: T,
) -> Result<AsymptoticReport<T>> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > T::zero())) {
        return domain("validation radii must be positive");
    }
    if angles.iter().any(|a| a.len() != field.dim()) {
        return Err(Error::Domain("validation angles have the wrong dimension".into()));
    }
    let regimes: &[Asymptotics] = match field.asymptotics() {
        Asymptotics::Zero => &[Asymptotics::Zero],
        Asymptotics::Infinity => &[Asymptotics::Infinity],
        Asymptotics::Both => &[Asymptotics::Zero, Asymptotics::Infinity],
    };
    let beta = field.beta();
    let gamma = field.gamma();
    let mut checks = Vec::new();
    let mut violations = Vec::new();
    for &regime in regimes {
        let mut rs = radii.to_vec();
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if regime == Asymptotics::Zero {
            rs.reverse();
        }
        let tan_exp = match regime {
            Asymptotics::Infinity => beta - gamma,
            _ => beta + gamma,
        };
        let rows: Vec<RadiusCheck<T>> = rs
            .iter()
            .map(|&r| {
                let rb = r.powf(beta);
                let mut rad_dev = T::zero();
                let mut tan_ratio = T::zero();
                for phi in angles {
                    let x: Vec<T> = phi.iter().map(|&p| p * r).collect();
                    let a = field.eval_vec(&x);
                    let (rad, tan) = split(&a, &x, r);
                    let along = dot(&rad, phi);
                    let target = field.a_bar_at(phi) * rb;
                    rad_dev = rad_dev.max((along - target).abs() / target);
                    // tangential parts at rounding level of |A| count as zero
                    let tn = norm(&tan);
                    let tn = if tn <= T::lit(64.0) * T::epsilon() * norm(&a) { T::zero() } else { tn };
                    tan_ratio = tan_ratio.max(tn / r.powf(tan_exp));
                }
                RadiusCheck { r, radial_deviation: rad_dev, tangential_ratio: tan_ratio }
            })
            .collect();
        let first = rows.first().expect("non-empty radii");
        let last = rows.last().expect("non-empty radii");
        let radial_ok = last.radial_deviation <= tol && last.radial_deviation <= first.radial_deviation + tol;
        let tangential_ok = rows.iter().all(|row| row.tangential_ratio.is_finite())
            && last.tangential_ratio <= first.tangential_ratio * (T::one() + tol) + tol;
        let label = match regime {
            Asymptotics::Zero => "at 0",
            _ => "at infinity",
        };
        if !radial_ok {
            violations.push(format!(
                "radial part deviates from a_bar r^beta {label}: {} at r = {}",
                last.radial_deviation, last.r
            ));
        }
        if !tangential_ok {
            violations.push(format!(
                "tangential part exceeds r^{tan_exp} scaling {label}: ratio {} at r = {} vs {} at r = {}",
                last.tangential_ratio, last.r, first.tangential_ratio, first.r
            ));
        }
        checks.push(RegimeCheck { regime, rows, radial_ok, tangential_ok });
    }
    Ok(AsymptoticReport {
        field: field.name().to_string(),
        passed: violations.is_empty(),
        checks,
        violations,
    })
}
