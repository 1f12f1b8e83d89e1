//! Small α-stable noise perturbations of ODEs whose drift is non-Lipschitz
//! at the origin: noise sampling, drift fields, fixed-step integrators,
//! time–space rescaling and limit statistics.
//!
//! Numerical code is generic over [`Scalar`]; the aliases at the crate root
//! fix it to `f64`.

// `!(x > 0)` guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod noise;
pub mod rng;
pub mod scalar;
pub mod scaling;
pub mod sde;
pub mod stats;

pub use asymptotics::{
    angle_continuity_sweep, angular_diameter, closed_form_radius, closed_form_solution,
    closed_form_time_to_radius, exit_angle_distribution, limit_angle, polar_ode_solve, radial_fit,
    scale_function_oracle_1d, zero_noise_reference, AngleMeta, ExitConfig, LimitAngle,
};
pub use error::{Error, Result};
pub use fields::{
    asymptotic_validate, counterexample_pair, decompose, model_field, power_map, Asymptotics, FieldChoice,
};
pub use noise::{khintchine_statistic, khintchine_windows, sample_increment, sample_path, IncrementSampler};
pub use scalar::Scalar;
pub use scaling::{exponents, rescale, scaling_identity_test, ScalingPoint, ScalingReport};
pub use sde::{
    first_exit, first_exit_online, integrate_ode, integrate_sde, integrate_sde_observed, integrate_with_forcing,
    Forcing, FnForcing,
};

pub type StableParams = noise::StableParams<f64>;
pub type NoisePath = noise::NoisePath<f64>;
pub type FieldSpec = fields::FieldSpec<f64>;
pub type PolarPoint = fields::PolarPoint<f64>;
pub type AsymptoticReport = fields::AsymptoticReport<f64>;
pub type Trajectory = sde::Trajectory<f64>;
pub type UniformGrid = sde::UniformGrid<f64>;
pub type ExitRecord = sde::ExitRecord<f64>;
pub type AlternatingForcing = sde::AlternatingForcing<f64>;
pub type ScalingExponents = scaling::ScalingExponents<f64>;
pub type ScalingTestConfig = scaling::ScalingTestConfig<f64>;
pub type AngleSample = asymptotics::AngleSample<f64>;
pub type RadialFit = asymptotics::RadialFit<f64>;
pub type PolarSolution = asymptotics::PolarSolution<f64>;
