/// State vectors the RK4 integrator can combine.
pub trait OdeState: Copy {
    /// `self + h * k`
    fn axpy(self, h: f64, k: Self) -> Self;
}

impl OdeState for f64 {
    #[inline]
    fn axpy(self, h: f64, k: Self) -> Self {
        self + h * k
    }
}

/// One classical fourth-order Runge-Kutta step of `dy/dt = f(t, y)`.
#[inline]
pub fn rk4<S, F>(y: S, t: f64, dt: f64, mut f: F) -> S
where
    S: OdeState,
    F: FnMut(f64, S) -> S,
{
    let half = 0.5 * dt;
    let k1 = f(t, y);
    let k2 = f(t + half, y.axpy(half, k1));
    let k3 = f(t + half, y.axpy(half, k2));
    let k4 = f(t + dt, y.axpy(dt, k3));
    let sixth = dt / 6.0;
    y.axpy(sixth, k1)
        .axpy(2.0 * sixth, k2)
        .axpy(2.0 * sixth, k3)
        .axpy(sixth, k4)
}
