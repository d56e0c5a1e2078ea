//! Coupled Maxwell / two-level-emitter simulation of a thin layer of
//! interacting emitters in 1D.
//!
//! * [`units`]: constants and unit conversion.
//! * [`quantum`]: the density-matrix model and the two non-Hermitian
//!   amplitude models, advanced with RK4.
//! * [`em`]: the staggered-grid FDTD solver and its coupling to the emitters.
//! * [`spectra`]: reflection / transmission / absorption from detector traces.
//! * [`scenario`]: configuration, presets, orchestration and output files.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod units;
pub mod quantum;
pub mod em;
pub mod spectra;
pub mod scenario;

pub use quantum::{Backend, EmitterParams};
