//! 1D FDTD on a staggered grid, coupled to per-cell emitter models.
//!
//! `ex` and `px` live on integer nodes `z = i dz`, `hy` on half nodes
//! `z = (i + 1/2) dz`. Each time step runs, in order: H half-step, emitter
//! update and polarization, E update, source injection, absorbing boundary,
//! detector sampling.

mod boundary;
mod grid;
mod sim;
mod source;

use thiserror::Error;

pub use boundary::{BoundaryKind, MurBoundary};
pub use grid::{local_field, update_e, update_h, FieldGrid, Layout};
pub use sim::{
    run, step_cell, CellStep, Diagnostics, DetectorSeries, LeapfrogOrder, RawRecords, SimSetup,
    StepperConfig,
};
pub use source::{PulseSpec, TfsfSource};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmError {
    #[error("invalid simulation setup: {0}")]
    InvalidSetup(String),
    #[error("non-finite field at step {step}, cell {cell}")]
    NonFinite { step: u64, cell: usize },
}
