mod common;

use common::{bloch_real, damped_rabi_orders, dopri5, paper_params};
use nhwave::quantum::{
    BlochModel, BlochState, EmitterParams, Nh2Model, TwoLevelModel, WaveCoeffs,
};
use nhwave::units::HBAR;
use num_complex::Complex64;

#[test]
fn undamped_rabi_flopping_matches_reference() {
    let p = EmitterParams { gamma_star: 0.0, big_gamma: 0.0, ..paper_params() };
    let e0 = 5e9;
    let field = |t: f64| e0 * (p.omega_b * t).cos();
    let model = BlochModel::new(p);
    let dt = 1e-18;
    let per_sample = 1000;
    let mut s = BlochState::GROUND;
    let mut r = [1.0, 0.0, 0.0, 0.0];
    let mut peak: f64 = 0.0;
    for k in 0..50 {
        let t0 = (k * per_sample) as f64 * dt;
        for j in 0..per_sample {
            s = model.rk4_step(s, field, t0 + j as f64 * dt, dt).0;
        }
        r = dopri5(
            |t, y| bloch_real(&p, -p.mu_x * field(t) / HBAR, y),
            r,
            t0,
            t0 + per_sample as f64 * dt,
            1e-12,
        );
        assert!((s.rho22 - r[1]).abs() < 1e-6, "sample {k}: {} vs {}", s.rho22, r[1]);
        assert!((s.rho12 - Complex64::new(r[2], r[3])).norm() < 1e-6);
        peak = peak.max(s.rho22);
    }
    // the drive flips the population, so the comparison covers the full nonlinear range
    assert!(peak > 0.9, "peak excitation {peak}");
}

#[test]
fn rk4_is_fourth_order_on_damped_rabi() {
    let (errs, orders) = damped_rabi_orders();
    for o in &orders {
        assert!(*o >= 3.7, "errors {errs:?}, orders {orders:?}");
    }
}

#[test]
fn weak_drive_nh2_tracks_density_matrix() {
    let p = paper_params();
    let e0 = 1e7;
    let (tau, t0) = (10e-15, 40e-15);
    let field = |t: f64| {
        let s = (t - t0) / tau;
        e0 * (-4.0 * std::f64::consts::LN_2 * s * s).exp() * (p.omega_b * (t - t0)).cos()
    };
    let bloch = BlochModel::new(p);
    let nh2 = Nh2Model::new(p);
    let mut a = bloch.ground_state();
    let mut b = nh2.ground_state();
    let dt = 1.67e-18;
    let mut worst: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for k in 0..120_000 {
        let t = k as f64 * dt;
        a = bloch.rk4_step(a, field, t, dt).0;
        b = nh2.rk4_step(b, field, t, dt).0;
        worst = worst.max((a.rho12 - b.rho12()).norm());
        peak = peak.max(a.rho12.norm());
    }
    assert!(peak > 1e-3, "drive too weak to be meaningful: {peak}");
    assert!(worst < 1e-6, "max |rho12 - rho12^s| = {worst}");
}

#[test]
fn free_nh2_coherence_decays_at_gamma() {
    let p = paper_params();
    let model = Nh2Model::new(p);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut c = WaveCoeffs::new(Complex64::new(h, 0.0), Complex64::new(h, 0.0));
    // the step must resolve the free phase rotation at omega_b
    let dt = 0.005 / p.omega_b;
    let steps = (5.0 / p.gamma() / dt) as usize;
    for k in 0..steps {
        c = model.rk4_step(c, |_| 0.0, k as f64 * dt, dt).0;
    }
    let expected = 0.5 * (-p.gamma() * steps as f64 * dt).exp();
    let ratio = c.rho12().norm() / expected;
    assert!((ratio - 1.0).abs() < 1e-8, "ratio {ratio}, norm {}", c.norm_sqr());
}
