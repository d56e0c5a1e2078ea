//! Two-level emitter dynamics.
//!
//! Three interchangeable models share one interface ([`TwoLevelModel`]):
//!
//! * [`BlochModel`] integrates the dissipative density-matrix equations and
//!   is the reference.
//! * [`Nh1Model`] propagates amplitudes `(c1, c2)` with norm-conserving gain
//!   and decay rates. Those rates have a pole at `|c1|^2 = |c2|^2`.
//! * [`Nh2Model`] uses rates that reproduce the population-difference
//!   equation instead of conserving the norm, and has no pole.
//!
//! Conventions: the ground state sits at zero energy and the excited state at
//! `hbar * omega_b`; the Rabi frequency is `-mu_x * E / hbar`; the coherence
//! `rho12` is the element that evolves freely as `exp(+i omega_b t)`, which for
//! the amplitude models is `c1 * conj(c2)`.

mod bloch;
mod nonhermitian;
mod rk4;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::HBAR;

pub use bloch::{bloch_rhs, BlochModel, BlochState};
pub use nonhermitian::{
    nh1_rates, nh2_rates, nh_rhs, Nh1Model, Nh1Rates, Nh2Model, RatePair, WaveCoeffs,
    DEFAULT_POLE_GUARD,
};
pub use rk4::{rk4, OdeState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("invalid emitter parameter {name} = {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("amplitudes are both zero; decay rates are undefined")]
    ZeroState,
}

/// Parameters of one two-level species, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    /// Transition angular frequency (rad/s).
    pub omega_b: f64,
    /// Transition dipole (C m).
    pub mu_x: f64,
    /// Pure dephasing rate (1/s).
    pub gamma_star: f64,
    /// Nonradiative decay rate of the excited state (1/s).
    pub big_gamma: f64,
}

impl EmitterParams {
    pub fn new(
        omega_b: f64,
        mu_x: f64,
        gamma_star: f64,
        big_gamma: f64,
    ) -> Result<Self, QuantumError> {
        let p = Self {
            omega_b,
            mu_x,
            gamma_star,
            big_gamma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        let checks = [
            ("omega_b", self.omega_b, self.omega_b > 0.0),
            ("mu_x", self.mu_x, self.mu_x > 0.0),
            ("gamma_star", self.gamma_star, self.gamma_star >= 0.0),
            ("big_gamma", self.big_gamma, self.big_gamma >= 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(QuantumError::InvalidParam { name, value });
            }
        }
        Ok(())
    }

    /// Total decoherence rate `gamma* + Gamma / 2`.
    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma_star + 0.5 * self.big_gamma
    }
}

/// Instantaneous Rabi frequency for a local field `e_local` (V/m).
#[inline]
pub fn rabi_frequency(e_local: f64, params: &EmitterParams) -> f64 {
    -params.mu_x * e_local / HBAR
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumObservables {
    pub pop_excited: f64,
    pub coherence: Complex64,
    /// `2 mu_x Re(coherence)`, C m.
    pub dipole_expect: f64,
}

impl QuantumObservables {
    pub(crate) fn new(pop_excited: f64, coherence: Complex64, mu_x: f64) -> Self {
        Self {
            pop_excited,
            coherence,
            dipole_expect: 2.0 * mu_x * coherence.re,
        }
    }
}

/// Everything recorded at a probe cell for one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub rho11: f64,
    pub rho22: f64,
    pub rho12: Complex64,
    /// Gain/decay rates; zero for the density-matrix model.
    pub gamma1: f64,
    pub gamma2: f64,
    /// `rho11 + rho22` (the squared norm for amplitude models).
    pub norm: f64,
}

/// Which equations of motion a cell follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Bloch,
    Nh1,
    Nh2,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Bloch, Backend::Nh1, Backend::Nh2];

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Bloch => "bloch",
            Backend::Nh1 => "nh1",
            Backend::Nh2 => "nh2",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown backend '{0}' (expected bloch, nh1 or nh2)")]
pub struct UnknownBackend(pub String);

impl FromStr for Backend {
    type Err = UnknownBackend;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bloch" => Ok(Backend::Bloch),
            "nh1" => Ok(Backend::Nh1),
            "nh2" => Ok(Backend::Nh2),
            _ => Err(UnknownBackend(s.to_string())),
        }
    }
}

/// Per-step bookkeeping that must survive the RK4 stages.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepEvents {
    /// Stages at which the NH1 denominator had to be clamped.
    pub pole_hits: u32,
}

/// Common interface of the three emitter models.
pub trait TwoLevelModel: Send + Sync {
    type State: OdeState + fmt::Debug + Send + Sync;

    fn backend(&self) -> Backend;
    fn params(&self) -> &EmitterParams;

    /// All emitters start in the ground state.
    fn ground_state(&self) -> Self::State;

    /// Time derivative of `state` under Rabi frequency `omega`.
    fn derivative(&self, state: Self::State, omega: f64, events: &mut StepEvents) -> Self::State;

    fn observables(&self, state: &Self::State) -> QuantumObservables;

    fn probe(&self, state: &Self::State) -> ProbeSample;

    /// Advance `state` from `t` to `t + dt` with classical RK4.
    ///
    /// `field` gives the local field (V/m) at any time in `[t, t + dt]`. Rates
    /// of the amplitude models are recomputed at every stage.
    fn rk4_step<F>(&self, state: Self::State, field: F, t: f64, dt: f64) -> (Self::State, StepEvents)
    where
        F: Fn(f64) -> f64,
    {
        let params = *self.params();
        let mut events = StepEvents::default();
        let next = rk4(state, t, dt, |tau, y| {
            self.derivative(y, rabi_frequency(field(tau), &params), &mut events)
        });
        (next, events)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{convert, Unit};

    pub(crate) fn paper_params() -> EmitterParams {
        EmitterParams::new(
            convert(2.0, Unit::ElectronVolt, Unit::RadPerSecond).unwrap(),
            convert(4.0, Unit::Debye, Unit::CoulombMeter).unwrap(),
            10e12,
            1e12,
        )
        .unwrap()
    }

    #[test]
    fn gamma_is_dephasing_plus_half_decay() {
        let p = paper_params();
        assert_eq!(p.gamma(), p.gamma_star + p.big_gamma / 2.0);
        assert_eq!(p.gamma(), 1.05e13);
    }

    #[test]
    fn params_rejected() {
        assert!(EmitterParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(EmitterParams::new(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(EmitterParams::new(1.0, 1.0, -1.0, 0.0).is_err());
        assert!(EmitterParams::new(1.0, 1.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn rabi_examples() {
        let p = paper_params();
        assert_eq!(rabi_frequency(0.0, &p), 0.0);
        let w = rabi_frequency(1.0, &p);
        assert!((w - (-1.2653e5)).abs() / 1.2653e5 < 1e-4);
        assert_eq!(rabi_frequency(2.0, &p), 2.0 * w);
    }

    #[test]
    fn backend_parse() {
        assert_eq!("NH2".parse::<Backend>().unwrap(), Backend::Nh2);
        assert!("nh3".parse::<Backend>().is_err());
        for b in Backend::ALL {
            assert_eq!(b.as_str().parse::<Backend>().unwrap(), b);
        }
    }
}
