use num_complex::Complex64;

use super::{
    EmitterParams, OdeState, ProbeSample, QuantumObservables, StepEvents, TwoLevelModel,
};

/// Density matrix of one emitter. `rho21` is `conj(rho12)` and is not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub rho11: f64,
    pub rho22: f64,
    pub rho12: Complex64,
}

impl BlochState {
    pub const GROUND: BlochState = BlochState {
        rho11: 1.0,
        rho22: 0.0,
        rho12: Complex64::new(0.0, 0.0),
    };

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho22
    }

    /// Checks trace, population bounds and positivity with slack `eps`.
    pub fn is_physical(&self, eps: f64) -> bool {
        let in_unit = |x: f64| (-eps..=1.0 + eps).contains(&x);
        in_unit(self.rho11)
            && in_unit(self.rho22)
            && (self.trace() - 1.0).abs() <= eps
            && self.rho12.norm_sqr() <= self.rho11 * self.rho22 + eps
    }
}

impl OdeState for BlochState {
    #[inline]
    fn axpy(self, h: f64, k: Self) -> Self {
        BlochState {
            rho11: self.rho11 + h * k.rho11,
            rho22: self.rho22 + h * k.rho22,
            rho12: self.rho12 + k.rho12 * h,
        }
    }
}

/// Optical Bloch equations for the density matrix.
///
/// ```text
/// d rho11 = i W (rho12 - rho21) + G rho22
/// d rho12 = i W (rho11 - rho22) + (i wB - g) rho12
/// d rho22 = i W (rho21 - rho12) - G rho22
/// ```
#[inline]
pub fn bloch_rhs(state: BlochState, omega: f64, params: &EmitterParams) -> BlochState {
    // i W (rho12 - conj rho12) = -2 W Im rho12
    let transfer = -2.0 * omega * state.rho12.im;
    let decay = params.big_gamma * state.rho22;
    let inversion = state.rho11 - state.rho22;
    BlochState {
        rho11: transfer + decay,
        rho22: -transfer - decay,
        rho12: Complex64::new(0.0, omega * inversion)
            + Complex64::new(-params.gamma(), params.omega_b) * state.rho12,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BlochModel {
    pub params: EmitterParams,
}

impl BlochModel {
    pub fn new(params: EmitterParams) -> Self {
        Self { params }
    }
}

impl TwoLevelModel for BlochModel {
    type State = BlochState;

    fn backend(&self) -> super::Backend {
        super::Backend::Bloch
    }

    fn params(&self) -> &EmitterParams {
        &self.params
    }

    fn ground_state(&self) -> BlochState {
        BlochState::GROUND
    }

    #[inline]
    fn derivative(&self, state: BlochState, omega: f64, _: &mut StepEvents) -> BlochState {
        bloch_rhs(state, omega, &self.params)
    }

    fn observables(&self, s: &BlochState) -> QuantumObservables {
        QuantumObservables::new(s.rho22, s.rho12, self.params.mu_x)
    }

    fn probe(&self, s: &BlochState) -> ProbeSample {
        ProbeSample {
            rho11: s.rho11,
            rho22: s.rho22,
            rho12: s.rho12,
            gamma1: 0.0,
            gamma2: 0.0,
            norm: s.trace(),
        }
    }
}
