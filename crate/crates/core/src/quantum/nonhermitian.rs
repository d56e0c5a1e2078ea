//! Amplitude ("wave packet") models with effective gain and decay rates.

use num_complex::Complex64;

use super::{
    Backend, EmitterParams, OdeState, ProbeSample, QuantumError, QuantumObservables, StepEvents,
    TwoLevelModel,
};

/// Default clamp on `|c1|^2 - |c2|^2` in the NH1 rates.
pub const DEFAULT_POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveCoeffs {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl WaveCoeffs {
    pub const GROUND: WaveCoeffs = WaveCoeffs {
        c1: Complex64::new(1.0, 0.0),
        c2: Complex64::new(0.0, 0.0),
    };

    pub fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    pub fn pop1(&self) -> f64 {
        self.c1.norm_sqr()
    }

    pub fn pop2(&self) -> f64 {
        self.c2.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.pop1() + self.pop2()
    }

    /// `rho^s_12 = c1 conj(c2)`, the element evolving as `exp(+i omega_b t)`.
    pub fn rho12(&self) -> Complex64 {
        self.c1 * self.c2.conj()
    }
}

impl OdeState for WaveCoeffs {
    #[inline]
    fn axpy(self, h: f64, k: Self) -> Self {
        WaveCoeffs {
            c1: self.c1 + k.c1 * h,
            c2: self.c2 + k.c2 * h,
        }
    }
}

/// Ground-state gain `gamma1` and excited-state decay `gamma2` (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub gamma1: f64,
    pub gamma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nh1Rates {
    pub rates: RatePair,
    /// The population difference was inside the guard band and got clamped.
    pub near_pole: bool,
}

/// Norm-conserving rates
/// `gamma1 = 2 g |c2|^2 / (|c1|^2 - |c2|^2)`, `gamma2 = 2 g |c1|^2 / (|c1|^2 - |c2|^2)`.
///
/// Within `pole_guard` of equal populations the denominator is replaced by
/// `+-pole_guard` (keeping its sign, `+` at exactly zero) and the result is
/// flagged.
#[inline]
pub fn nh1_rates(c: &WaveCoeffs, params: &EmitterParams, pole_guard: f64) -> Nh1Rates {
    let (p1, p2) = (c.pop1(), c.pop2());
    let mut denom = p1 - p2;
    let near_pole = denom.abs() < pole_guard;
    if near_pole {
        denom = if denom < 0.0 { -pole_guard } else { pole_guard };
    }
    let k = 2.0 * params.gamma() / denom;
    Nh1Rates {
        rates: RatePair {
            gamma1: k * p2,
            gamma2: k * p1,
        },
        near_pole,
    }
}

/// Pole-free rates
/// `gamma1 = (G - 2 g*) |c2|^2 / N`, `gamma2 = (2 g |c1|^2 + 2 G |c2|^2) / N`
/// with `N = |c1|^2 + |c2|^2`.
///
/// `gamma1` is negative whenever `G < 2 g*`; that is expected.
#[inline]
pub fn nh2_rates(c: &WaveCoeffs, params: &EmitterParams) -> Result<RatePair, QuantumError> {
    let (p1, p2) = (c.pop1(), c.pop2());
    let norm = p1 + p2;
    if norm <= 0.0 {
        return Err(QuantumError::ZeroState);
    }
    let g = params.big_gamma;
    Ok(RatePair {
        gamma1: (g - 2.0 * params.gamma_star) * p2 / norm,
        gamma2: (2.0 * params.gamma() * p1 + 2.0 * g * p2) / norm,
    })
}

/// `i d/dt (c1, c2) = [[i gamma1/2, W], [W, omega_b - i gamma2/2]] (c1, c2)`
#[inline]
pub fn nh_rhs(c: &WaveCoeffs, omega: f64, rates: RatePair, params: &EmitterParams) -> WaveCoeffs {
    let minus_i = Complex64::new(0.0, -1.0);
    WaveCoeffs {
        c1: c.c1 * (0.5 * rates.gamma1) + minus_i * omega * c.c2,
        c2: minus_i * omega * c.c1
            + c.c2 * Complex64::new(-0.5 * rates.gamma2, -params.omega_b),
    }
}

fn wave_observables(c: &WaveCoeffs, mu_x: f64) -> QuantumObservables {
    QuantumObservables::new(c.pop2(), c.rho12(), mu_x)
}

fn wave_probe(c: &WaveCoeffs, rates: RatePair) -> ProbeSample {
    ProbeSample {
        rho11: c.pop1(),
        rho22: c.pop2(),
        rho12: c.rho12(),
        gamma1: rates.gamma1,
        gamma2: rates.gamma2,
        norm: c.norm_sqr(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Nh1Model {
    pub params: EmitterParams,
    pub pole_guard: f64,
}

impl Nh1Model {
    pub fn new(params: EmitterParams, pole_guard: f64) -> Self {
        Self { params, pole_guard }
    }
}

impl TwoLevelModel for Nh1Model {
    type State = WaveCoeffs;

    fn backend(&self) -> Backend {
        Backend::Nh1
    }

    fn params(&self) -> &EmitterParams {
        &self.params
    }

    fn ground_state(&self) -> WaveCoeffs {
        WaveCoeffs::GROUND
    }

    #[inline]
    fn derivative(&self, c: WaveCoeffs, omega: f64, events: &mut StepEvents) -> WaveCoeffs {
        let r = nh1_rates(&c, &self.params, self.pole_guard);
        if r.near_pole {
            events.pole_hits += 1;
        }
        nh_rhs(&c, omega, r.rates, &self.params)
    }

    fn observables(&self, c: &WaveCoeffs) -> QuantumObservables {
        wave_observables(c, self.params.mu_x)
    }

    fn probe(&self, c: &WaveCoeffs) -> ProbeSample {
        wave_probe(c, nh1_rates(c, &self.params, self.pole_guard).rates)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Nh2Model {
    pub params: EmitterParams,
}

impl Nh2Model {
    pub fn new(params: EmitterParams) -> Self {
        Self { params }
    }
}

impl TwoLevelModel for Nh2Model {
    type State = WaveCoeffs;

    fn backend(&self) -> Backend {
        Backend::Nh2
    }

    fn params(&self) -> &EmitterParams {
        &self.params
    }

    fn ground_state(&self) -> WaveCoeffs {
        WaveCoeffs::GROUND
    }

    #[inline]
    fn derivative(&self, c: WaveCoeffs, omega: f64, _: &mut StepEvents) -> WaveCoeffs {
        // A state that reached (0, 0) has no dynamics left.
        let rates = nh2_rates(&c, &self.params).unwrap_or(RatePair {
            gamma1: 0.0,
            gamma2: 0.0,
        });
        nh_rhs(&c, omega, rates, &self.params)
    }

    fn observables(&self, c: &WaveCoeffs) -> QuantumObservables {
        wave_observables(c, self.params.mu_x)
    }

    fn probe(&self, c: &WaveCoeffs) -> ProbeSample {
        let rates = nh2_rates(c, &self.params).unwrap_or(RatePair {
            gamma1: 0.0,
            gamma2: 0.0,
        });
        wave_probe(c, rates)
    }
}
