use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::EmError;
use crate::units::{EPS0, MU0};

/// Node indices of the 1D domain, left to right:
/// absorbing edge, reflected detector, injection plane, vacuum gap, slab,
/// vacuum gap, transmitted detector, absorbing edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub nz: usize,
    pub reflect_detector: usize,
    /// First node of the total-field region.
    pub injection: usize,
    pub slab: Range<usize>,
    pub transmit_detector: usize,
    /// Node whose emitter state is recorded.
    pub probe: usize,
}

impl Layout {
    /// Standard layout for a slab of `slab_cells` nodes with `gap_cells`
    /// vacuum on each side and `margin_cells` between detectors, injection
    /// plane and edges.
    pub fn standard(slab_cells: usize, gap_cells: usize, margin_cells: usize, probe_offset: usize) -> Self {
        let reflect_detector = margin_cells;
        let injection = 2 * margin_cells;
        let slab_start = injection + gap_cells;
        let slab = slab_start..slab_start + slab_cells;
        let transmit_detector = slab.end + gap_cells;
        let nz = transmit_detector + margin_cells + 1;
        Self {
            nz,
            reflect_detector,
            injection,
            probe: slab_start + probe_offset,
            slab,
            transmit_detector,
        }
    }

    pub fn validate(&self) -> Result<(), EmError> {
        let ok = 0 < self.reflect_detector
            && self.reflect_detector + 1 < self.injection
            && self.injection < self.slab.start
            && self.slab.start <= self.slab.end
            && self.slab.end < self.transmit_detector
            && self.transmit_detector + 1 < self.nz
            && (self.slab.is_empty() || self.slab.contains(&self.probe));
        if ok {
            Ok(())
        } else {
            Err(EmError::InvalidSetup(format!("inconsistent layout {self:?}")))
        }
    }
}

/// Field arrays of one simulation.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub dz: f64,
    pub ex: Vec<f64>,
    pub hy: Vec<f64>,
    pub px: Vec<f64>,
    pub density: Vec<f64>,
    pub slab: Range<usize>,
}

impl FieldGrid {
    /// Zero fields; `density` (1/m^3) on `slab`, zero elsewhere. A zero
    /// density gives an empty slab.
    pub fn new(dz: f64, nz: usize, slab: Range<usize>, density: f64) -> Result<Self, EmError> {
        if !(dz > 0.0) || nz < 3 || slab.end > nz || !(density >= 0.0) {
            return Err(EmError::InvalidSetup(format!(
                "grid dz={dz} nz={nz} slab={slab:?} density={density}"
            )));
        }
        let slab = if density > 0.0 { slab } else { slab.start..slab.start };
        let mut n = vec![0.0; nz];
        n[slab.clone()].iter_mut().for_each(|v| *v = density);
        Ok(Self {
            dz,
            ex: vec![0.0; nz],
            hy: vec![0.0; nz - 1],
            px: vec![0.0; nz],
            density: n,
            slab,
        })
    }

    pub fn nz(&self) -> usize {
        self.ex.len()
    }

    /// Index of the first non-finite `ex` value, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.ex.iter().position(|v| !v.is_finite())
    }
}

/// `hy -= dt / (mu0 dz) * (ex[i+1] - ex[i])`
pub fn update_h(grid: &mut FieldGrid, dt: f64) {
    let k = dt / (MU0 * grid.dz);
    let ex = &grid.ex;
    for (i, h) in grid.hy.iter_mut().enumerate() {
        *h -= k * (ex[i + 1] - ex[i]);
    }
}

/// `ex -= dt / eps0 * ((hy[i] - hy[i-1]) / dz + dpx_dt[i])` on interior
/// nodes. `dpx_dt` is indexed from `grid.slab.start` and is zero elsewhere.
pub fn update_e(grid: &mut FieldGrid, dpx_dt: &[f64], dt: f64) {
    let k = dt / (EPS0 * grid.dz);
    let nz = grid.ex.len();
    let hy = &grid.hy;
    for i in 1..nz - 1 {
        grid.ex[i] -= k * (hy[i] - hy[i - 1]);
    }
    let ks = dt / EPS0;
    let start = grid.slab.start;
    for (j, d) in dpx_dt.iter().enumerate() {
        grid.ex[start + j] -= ks * d;
    }
}

/// Lorentz-Lorenz local field `Ex + Px / (3 eps0)` inside the medium.
#[inline]
pub fn local_field(ex: f64, px: f64, in_slab: bool) -> f64 {
    if in_slab {
        ex + px / (3.0 * EPS0)
    } else {
        ex
    }
}
