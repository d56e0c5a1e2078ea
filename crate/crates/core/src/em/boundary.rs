use serde::{Deserialize, Serialize};

use super::FieldGrid;
use crate::units::C;

/// Absorbing-boundary variant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// First-order Mur.
    #[default]
    Mur1,
}

/// First-order Mur absorbing boundary on both ends of the `ex` array.
#[derive(Debug, Clone, Copy)]
pub struct MurBoundary {
    coeff: f64,
    // ex[1] and ex[nz-2] before the latest E update
    left_prev: f64,
    right_prev: f64,
}

impl MurBoundary {
    pub fn new(dz: f64, dt: f64) -> Self {
        let cdt = C * dt;
        Self {
            coeff: (cdt - dz) / (cdt + dz),
            left_prev: 0.0,
            right_prev: 0.0,
        }
    }

    /// Record the neighbours of the edge nodes. Call before the E update.
    pub fn remember(&mut self, grid: &FieldGrid) {
        let n = grid.ex.len();
        self.left_prev = grid.ex[1];
        self.right_prev = grid.ex[n - 2];
    }

    /// Set the edge nodes. Call after the E update.
    pub fn apply(&mut self, grid: &mut FieldGrid) {
        let n = grid.ex.len();
        let ex = &mut grid.ex;
        ex[0] = self.left_prev + self.coeff * (ex[1] - ex[0]);
        ex[n - 1] = self.right_prev + self.coeff * (ex[n - 2] - ex[n - 1]);
    }
}
