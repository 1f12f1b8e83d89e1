use peano_core::geometry::{angle2, wrap_angle};
use peano_core::sde::UniformGrid;
use peano_core::stats::ks_two_sample;
use peano_core::{
    angle_continuity_sweep, closed_form_radius, closed_form_solution, exit_angle_distribution, integrate_ode,
    polar_ode_solve, radial_fit, rescale, scale_function_oracle_1d, exponents, ExitConfig, FieldChoice, FieldSpec,
    StableParams,
};
use peano_core::fields::Asymptotics;
use rand::Rng;
use statrs::function::gamma::{gamma, gamma_lr};
use std::sync::Arc;

/// `∫₀^R exp(−k y^p) dy = k^{−1/p} Γ(1/p) P(1/p, k R^p) / p`.
fn scale_integral_closed_form(a: f64, beta: f64, r: f64, c: f64) -> f64 {
    let p = 1.0 + beta;
    let k = a / (c * p);
    k.powf(-1.0 / p) * gamma(1.0 / p) * gamma_lr(1.0 / p, k * r.powf(p)) / p
}

#[test]
fn oracle_matches_incomplete_gamma() {
    for (ap, am, beta, r, c) in [(2.0, 1.0, 0.5, 50.0, 1.0), (0.3, 3.0, 0.2, 5.0, 0.5), (1.0, 1.5, 0.9, 2.0, 2.0)] {
        let ip = scale_integral_closed_form(ap, beta, r, c);
        let im = scale_integral_closed_form(am, beta, r, c);
        let p = scale_function_oracle_1d(ap, am, beta, r, c).unwrap();
        assert!((p - im / (ip + im)).abs() < 1e-9, "{p} vs {}", im / (ip + im));
    }
}

#[test]
fn oracle_regression_and_r_stability() {
    let p50 = scale_function_oracle_1d(2.0, 1.0, 0.5, 50.0, 1.0).unwrap();
    let p100 = scale_function_oracle_1d(2.0, 1.0, 0.5, 100.0, 1.0).unwrap();
    assert!((p50 - 0.613_511_790_435_690_7).abs() < 1e-9, "{p50}");
    assert!((p50 - p100).abs() < 1e-3);
}

#[test]
fn closed_form_solves_limit_equation() {
    let mut rng = peano_core::rng::stream(11, 0);
    for _ in 0..100 {
        let beta: f64 = rng.random_range(-0.9..0.8);
        let a: f64 = rng.random_range(0.2..3.0);
        let t: f64 = rng.random_range(0.5..3.0);
        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let phi = [th.cos(), th.sin()];
        let h = 1e-5;
        let xp = closed_form_solution(a, beta, 0.0, &phi, t + h);
        let xm = closed_form_solution(a, beta, 0.0, &phi, t - h);
        let r = closed_form_radius(a, beta, t);
        for i in 0..2 {
            let fd = (xp[i] - xm[i]) / (2.0 * h);
            let rhs = a * r.powf(beta) * phi[i];
            assert!((fd - rhs).abs() <= 1e-6 * (1.0 + rhs.abs()), "beta {beta}: {fd} vs {rhs}");
        }
    }
}

#[test]
fn radial_fit_is_scale_consistent() {
    let f = FieldChoice::Model { a_bar: 1.3 }.build::<f64>(0.5, 2, None).unwrap();
    let tr = integrate_ode(&f, &[0.6, 0.8], &UniformGrid::new(1e-2, 10.0).unwrap()).unwrap();
    let direct = radial_fit(&tr, 0.5, (2.005, 9.995)).unwrap();
    assert!((direct.a_bar_hat - 1.3).abs() < 1e-6);
    let eps: f64 = 0.3;
    let e = exponents(2.0, 0.5).unwrap();
    let s = eps.powf(-e.time_exp);
    let scaled = radial_fit(&rescale(&tr, eps, &e).unwrap(), 0.5, (2.005 * s, 9.995 * s)).unwrap();
    assert_eq!(scaled.samples, direct.samples);
    assert!((scaled.a_bar_hat - direct.a_bar_hat).abs() < 1e-6);
}

fn wobbly_a(r: f64, phi: &[f64]) -> f64 {
    1.0 + 0.3 * (r + 3.0 * phi[0]).sin()
}

fn swirl_b(_: f64, phi: &[f64], out: &mut [f64]) {
    out[0] = -0.5 * phi[1];
    out[1] = 0.5 * phi[0];
}

#[test]
fn polar_solution_respects_comparison_bounds() {
    let sol = polar_ode_solve(wobbly_a, swirl_b, 0.5, 0.5, 0.0, &[1.0, 0.0], 3.0, 4000).unwrap();
    for (k, &t) in sol.times.iter().enumerate().skip(1) {
        let r = sol.radii[k];
        assert!(r > 0.0);
        assert!(r >= closed_form_radius(0.7, 0.5, t) * (1.0 - 1e-9));
        assert!(r <= closed_form_radius(1.3, 0.5, t) * (1.0 + 1e-9));
    }
    assert!(sol.renorm_drift < 1e-8);
}

#[test]
fn polar_solution_solves_cartesian_equation() {
    let (beta, delta) = (0.5, 0.5);
    let sol = polar_ode_solve(wobbly_a, swirl_b, beta, delta, 0.0, &[0.0, 1.0], 2.0, 20_000).unwrap();
    let induced = FieldSpec::new(
        "induced",
        2,
        beta,
        delta,
        Asymptotics::Zero,
        Arc::new(move |x: &[f64], out: &mut [f64]| {
            let r = peano_core::geometry::norm(x);
            if r == 0.0 {
                out.fill(0.0);
                return;
            }
            let phi = [x[0] / r, x[1] / r];
            let mut b = [0.0; 2];
            swirl_b(r, &phi, &mut b);
            let a = wobbly_a(r, &phi) * r.powf(beta);
            let s = r.powf(beta + delta);
            out[0] = a * phi[0] + s * b[0];
            out[1] = a * phi[1] + s * b[1];
        }),
        Arc::new(|phi: &[f64]| wobbly_a(0.0, phi)),
    )
    .unwrap();
    let k0 = sol.times.partition_point(|&t| t < 0.5);
    let x0 = sol.cartesian(k0);
    let span = 2.0 - sol.times[k0];
    let tr = integrate_ode(&induced, &x0, &UniformGrid::new(span / 20_000.0, span).unwrap()).unwrap();
    let (r, phi) = sol.terminal();
    let end = tr.final_state();
    for i in 0..2 {
        assert!((end[i] - r * phi[i]).abs() < 1e-6 * r, "{end:?} vs {r} {phi:?}");
    }
}

#[test]
fn polar_solution_is_continuous_in_initial_angle() {
    let sweep = angle_continuity_sweep(wobbly_a, swirl_b, 0.5, 0.5, 1.0, 500, &[8, 32, 128]).unwrap();
    let sups: Vec<f64> = sweep.iter().map(|s| s.1).collect();
    assert!(sups.windows(2).all(|w| w[1] < w[0]), "{sups:?}");
    assert!(sups[2] < sups[0] / 4.0);
}

#[test]
fn exit_law_is_rotation_equivariant() {
    let psi = 1.1;
    let direct = FieldChoice::AngularCosine { amplitude: 0.4, phase: 0.0 }.build::<f64>(0.5, 2, None).unwrap();
    let rotated = FieldChoice::AngularCosine { amplitude: 0.4, phase: psi }.build::<f64>(0.5, 2, None).unwrap();
    let p = StableParams::new(2.0, 1.0, 2).unwrap();
    let mut cfg = ExitConfig::new(20.0, 5000, 1e-3, 8);
    let a = exit_angle_distribution(&direct, &p, &cfg).unwrap();
    cfg.first_stream = 5000;
    let b = exit_angle_distribution(&rotated, &p, &cfg).unwrap();
    let back: Vec<f64> = b.samples.iter().map(|s| wrap_angle(angle2(s) - psi)).collect();
    let ks = ks_two_sample(&a.planar_angles(), &back);
    assert!(ks < 0.04, "KS {ks}");
    for s in a.samples.iter().chain(&b.samples) {
        assert!((peano_core::geometry::norm(s) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn exit_sampler_reports_horizon_failures() {
    let f = FieldChoice::Model { a_bar: 1.0 }.build::<f64>(0.5, 1, None).unwrap();
    let p = StableParams::new(2.0, 1.0, 1).unwrap();
    let mut cfg = ExitConfig::new(50.0, 100, 1e-2, 1);
    cfg.horizon_factor = 0.01;
    assert!(matches!(
        exit_angle_distribution(&f, &p, &cfg),
        Err(peano_core::Error::ExitHorizon { .. })
    ));
    assert!(exit_angle_distribution(&f, &p, &ExitConfig::new(50.0, 99, 1e-2, 1)).is_err());
}

#[test]
fn merged_samples_do_not_depend_on_order() {
    let f = FieldChoice::Model { a_bar: 1.0 }.build::<f64>(0.5, 2, None).unwrap();
    let p = StableParams::new(1.7, 1.0, 2).unwrap();
    let mut cfg = ExitConfig::new(5.0, 100, 1e-3, 4);
    let a = exit_angle_distribution(&f, &p, &cfg).unwrap();
    cfg.first_stream = 100;
    let b = exit_angle_distribution(&f, &p, &cfg).unwrap();
    let ab = a.clone().merge(b.clone()).unwrap();
    let ba = b.merge(a).unwrap();
    assert_eq!(ab.samples, ba.samples);
    assert_eq!(ab.len(), 200);
}
