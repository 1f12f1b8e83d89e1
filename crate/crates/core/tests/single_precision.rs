//! The numerical core is generic over the scalar; `f32` must work end to end.

use peano_core::sde::{integrate_ode, integrate_sde, UniformGrid};
use peano_core::noise::StableParams;
use peano_core::{closed_form_radius, exit_angle_distribution, ExitConfig, FieldChoice};

#[test]
fn ode_matches_closed_form_in_f32() {
    let field = FieldChoice::Model { a_bar: 1.0 }.build::<f32>(0.5, 2, None).unwrap();
    let tr = integrate_ode(&field, &[0.6f32, 0.8], &UniformGrid::new(1e-3f32, 1.0).unwrap()).unwrap();
    let r = tr.radius(tr.len() - 1);
    assert!((r - 2.25).abs() / 2.25 < 1e-5, "{r}");
    assert!((closed_form_radius(1.0f32, 0.5, 3.0) - 2.25).abs() < 1e-6);
}

#[test]
fn f32_path_tracks_f64_path_on_the_same_stream() {
    let grid32 = UniformGrid::new(1e-3f32, 0.5).unwrap();
    let grid64 = UniformGrid::new(1e-3f64, 0.5).unwrap();
    for alpha in [2.0, 1.5] {
        let f32_field = FieldChoice::Model { a_bar: 1.0 }.build::<f32>(0.5, 2, None).unwrap();
        let f64_field = FieldChoice::Model { a_bar: 1.0 }.build::<f64>(0.5, 2, None).unwrap();
        let n32 = StableParams::<f32>::new(alpha as f32, 1.0, 2).unwrap();
        let n64 = StableParams::<f64>::new(alpha, 1.0, 2).unwrap();
        let a = integrate_sde(&f32_field, 0.1, &n32, &[0.0, 0.0], &grid32, 3, 7).unwrap();
        let b = integrate_sde(&f64_field, 0.1, &n64, &[0.0, 0.0], &grid64, 3, 7).unwrap();
        let (ea, eb) = (a.final_state(), b.final_state());
        for i in 0..2 {
            assert!((ea[i] as f64 - eb[i]).abs() < 1e-3 * (1.0 + eb[i].abs()), "alpha {alpha}: {ea:?} vs {eb:?}");
        }
    }
}

#[test]
fn exit_sampler_runs_in_f32() {
    let field = FieldChoice::Model { a_bar: 1.0 }.build::<f32>(0.5, 1, None).unwrap();
    let noise = StableParams::new(2.0f32, 1.0, 1).unwrap();
    let sample = exit_angle_distribution(&field, &noise, &ExitConfig::new(5.0f32, 400, 1e-3, 2)).unwrap();
    let p = sample.fraction_positive();
    assert!((0.4..0.6).contains(&p), "{p}");
}
