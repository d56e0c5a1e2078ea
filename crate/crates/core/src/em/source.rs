use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::{EmError, FieldGrid};
use crate::units::{C, EPS0, ETA0, MU0};

/// Gaussian pulse `e0 exp(-4 ln2 (t - t0)^2 / tau^2) cos(omega0 (t - t0))`.
///
/// `tau_fwhm` is the FWHM of the field envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub e0: f64,
    pub omega0: f64,
    pub tau_fwhm: f64,
    pub t0: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<(), EmError> {
        let ok = self.e0 > 0.0
            && self.omega0 > 0.0
            && self.tau_fwhm > 0.0
            && self.t0 >= 3.0 * self.tau_fwhm
            && [self.e0, self.omega0, self.tau_fwhm, self.t0].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(EmError::InvalidSetup(format!("bad pulse {self:?}")))
        }
    }

    #[inline]
    pub fn envelope(&self, t: f64) -> f64 {
        let s = (t - self.t0) / self.tau_fwhm;
        self.e0 * (-4.0 * LN_2 * s * s).exp()
    }

    #[inline]
    pub fn field(&self, t: f64) -> f64 {
        self.envelope(t) * (self.omega0 * (t - self.t0)).cos()
    }
}

/// One-way total-field / scattered-field injection at node `plane`.
///
/// Nodes `>= plane` carry the total field, nodes `< plane` the scattered
/// field only. The incident wave is `pulse.field(t - (z - z_plane) / c)`.
#[derive(Debug, Clone, Copy)]
pub struct TfsfSource {
    pub pulse: PulseSpec,
    pub plane: usize,
}

impl TfsfSource {
    pub fn new(pulse: PulseSpec, plane: usize) -> Self {
        Self { pulse, plane }
    }

    /// Correction to `hy[plane - 1]` ahead of the H update that uses `ex` at
    /// time `t_e`.
    pub fn correct_h(&self, grid: &mut FieldGrid, t_e: f64, dt: f64) {
        let e_inc = self.pulse.field(t_e);
        grid.hy[self.plane - 1] += dt / (MU0 * grid.dz) * e_inc;
    }

    /// Correction to `ex[plane]` after the E update that used `hy` at time
    /// `t_h` (half a step behind the new E).
    pub fn correct_e(&self, grid: &mut FieldGrid, t_h: f64, dt: f64) {
        // H node sits half a cell upstream, so the wave reaches it earlier
        let h_inc = self.pulse.field(t_h + 0.5 * grid.dz / C) / ETA0;
        grid.ex[self.plane] += dt / (EPS0 * grid.dz) * h_inc;
    }
}
