//! Reference integrators and shared fixtures for the integration tests.
#![allow(dead_code)]

use nhwave::quantum::{BlochModel, BlochState, EmitterParams, TwoLevelModel};
use nhwave::scenario::{preset, ScenarioConfig};
use nhwave::units::HBAR;
use num_complex::Complex64;

/// Adaptive Dormand-Prince 5(4), used as the reference integrator.
pub fn dopri5<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t0: f64,
    t1: f64,
    rtol: f64,
) -> [f64; N] {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0,
    ];
    let mut t = t0;
    let mut y = y0;
    let mut h = (t1 - t0) / 1000.0;
    while t < t1 {
        h = h.min(t1 - t);
        let mut k = [[0.0; N]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..N {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut d = 0.0;
            for s in 0..7 {
                y5[i] += h * B5[s] * k[s][i];
                d += h * (B5[s] - B4[s]) * k[s][i];
            }
            let scale = rtol * (1e-3 + y[i].abs().max(y5[i].abs()));
            err = err.max((d / scale).abs());
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    y
}

/// Density-matrix equations as four real components `[rho11, rho22, Re rho12, Im rho12]`.
pub fn bloch_real(p: &EmitterParams, omega: f64, y: &[f64; 4]) -> [f64; 4] {
    let g = p.gamma_star + 0.5 * p.big_gamma;
    let d11 = -2.0 * omega * y[3] + p.big_gamma * y[1];
    [
        d11,
        -d11,
        -p.omega_b * y[3] - g * y[2],
        omega * (y[0] - y[1]) + p.omega_b * y[2] - g * y[3],
    ]
}

pub fn paper_params() -> EmitterParams {
    preset("strong-field-strong-int").unwrap().emitter_params().unwrap()
}

/// Damped, resonantly driven emitter integrated with RK4 at `steps` steps
/// over `span`, compared against the reference integrator at every step.
/// Returns the max deviation of `(rho22, rho12)`.
pub fn damped_rabi_error(steps: usize, span: f64) -> f64 {
    let p = paper_params();
    let e0 = 2e9;
    let field = move |t: f64| e0 * (p.omega_b * t).cos();
    let omega = move |t: f64| -p.mu_x * field(t) / HBAR;
    let model = BlochModel::new(p);
    let dt = span / steps as f64;
    let mut s = BlochState::GROUND;
    let mut r = [1.0, 0.0, 0.0, 0.0];
    let mut worst: f64 = 0.0;
    for k in 0..steps {
        let t = k as f64 * dt;
        s = model.rk4_step(s, field, t, dt).0;
        r = dopri5(|t, y| bloch_real(&p, omega(t), y), r, t, t + dt, 1e-13);
        let d12 = (s.rho12 - Complex64::new(r[2], r[3])).norm();
        worst = worst.max((s.rho22 - r[1]).abs()).max(d12);
    }
    worst
}

/// Convergence exponents from successive halvings of the RK4 step.
pub fn damped_rabi_orders() -> (Vec<f64>, Vec<f64>) {
    let span = 20e-15;
    let errs: Vec<f64> = [100, 200, 400].iter().map(|&n| damped_rabi_error(n, span)).collect();
    let orders = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    (errs, orders)
}

/// A coarse, fast version of a preset for tests that need whole runs.
pub fn coarse(name: &str, extra: &[&str]) -> ScenarioConfig {
    let mut o = vec![
        "grid.dz_nm=5",
        "grid.gap_nm=300",
        "grid.margin_nm=25",
        "medium.slab_thickness_nm=300",
        "medium.probe_depth_nm=150",
        "stepper.record_stride=10",
    ];
    o.extend_from_slice(extra);
    preset(name).unwrap().with_overrides(&o).unwrap()
}
