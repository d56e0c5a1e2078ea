//! Reflection, transmission and absorption spectra from detector traces.
//!
//! The spectral flux of a trace is `|E(w) H(w)|`, the product of the Fourier
//! magnitudes of the two field components, evaluated on a zero-padded FFT
//! grid. Medium runs are divided by the flux of a vacuum run with the same
//! grid and pulse.

use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::em::RawRecords;
use crate::quantum::EmitterParams;

/// Zero-padding factor applied before the FFT.
pub const PAD_FACTOR: usize = 4;
/// Frequencies where the reference flux is below this fraction of its peak
/// are not reported.
pub const REFERENCE_FLOOR: f64 = 1e-4;
/// Default reported detuning window, in units of gamma.
pub const DEFAULT_DELTA_RANGE: (f64, f64) = (-60.0, 60.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("trace '{0}' is empty")]
    Empty(DetectorLocation),
    #[error("trace '{location}' is not uniformly sampled (deviation {deviation:e} s)")]
    NonUniform { location: DetectorLocation, deviation: f64 },
    #[error("trace '{0}' has mismatched array lengths")]
    Ragged(DetectorLocation),
    #[error("frequency axes differ")]
    AxisMismatch,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no frequency in the reported band has usable reference flux")]
    EmptySpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorLocation {
    Reflected,
    Transmitted,
    Reference,
}

impl fmt::Display for DetectorLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorLocation::Reflected => "reflected",
            DetectorLocation::Transmitted => "transmitted",
            DetectorLocation::Reference => "reference",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorTrace {
    pub t: Vec<f64>,
    pub ex: Vec<f64>,
    pub hy: Vec<f64>,
    pub location: DetectorLocation,
}

impl DetectorTrace {
    pub fn reflected(rec: &RawRecords) -> Self {
        Self {
            t: rec.times.clone(),
            ex: rec.reflected.ex.clone(),
            hy: rec.reflected.hy.clone(),
            location: DetectorLocation::Reflected,
        }
    }

    pub fn transmitted(rec: &RawRecords) -> Self {
        Self {
            t: rec.times.clone(),
            ex: rec.transmitted.ex.clone(),
            hy: rec.transmitted.hy.clone(),
            location: DetectorLocation::Transmitted,
        }
    }

    /// Reflected detector of a medium run minus that of the matching vacuum
    /// run. In vacuum the scattered-field region only sees what the absorbing
    /// edges send back; removing it leaves the field scattered by the layer.
    /// The two runs share their time grid; the shorter record is treated as
    /// zero past its end.
    pub fn reflected_scattered(rec: &RawRecords, vacuum: &RawRecords) -> Self {
        let n = rec.times.len();
        let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        Self {
            t: rec.times.clone(),
            ex: (0..n).map(|k| rec.reflected.ex[k] - at(&vacuum.reflected.ex, k)).collect(),
            hy: (0..n).map(|k| rec.reflected.hy[k] - at(&vacuum.reflected.hy, k)).collect(),
            location: DetectorLocation::Reflected,
        }
    }

    /// The transmitted detector of a vacuum run, i.e. the incident pulse.
    pub fn reference(vacuum: &RawRecords) -> Self {
        Self {
            location: DetectorLocation::Reference,
            ..Self::transmitted(vacuum)
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Sample spacing, after checking the sampling is uniform.
    pub fn sample_dt(&self) -> Result<f64, SpectraError> {
        if self.t.is_empty() {
            return Err(SpectraError::Empty(self.location));
        }
        if self.ex.len() != self.t.len() || self.hy.len() != self.t.len() {
            return Err(SpectraError::Ragged(self.location));
        }
        if self.t.len() == 1 {
            return Err(SpectraError::Empty(self.location));
        }
        let mut steps: Vec<f64> = self.t.windows(2).map(|w| w[1] - w[0]).collect();
        steps.sort_by(f64::total_cmp);
        let median = steps[steps.len() / 2];
        let deviation = steps
            .iter()
            .map(|d| (d - median).abs())
            .fold(0.0, f64::max);
        // sample times are n * stride * dt in floating point
        if !(median > 0.0) || deviation >= 1e-9 * median {
            return Err(SpectraError::NonUniform {
                location: self.location,
                deviation,
            });
        }
        Ok(median)
    }

    /// Whether the first and last 1% of samples stay below `1e-5` of the
    /// peak `|ex|`, i.e. the pulse was captured completely.
    pub fn is_fully_captured(&self) -> bool {
        let peak = self.ex.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if peak == 0.0 {
            return true;
        }
        let edge = (self.ex.len() / 100).max(1);
        let limit = 1e-5 * peak;
        let n = self.ex.len();
        self.ex[..edge]
            .iter()
            .chain(&self.ex[n - edge..])
            .all(|e| e.abs() < limit)
    }
}

/// Spectral flux on the non-negative half of an FFT grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSpectrum {
    /// Angular frequency (rad/s).
    pub omega: Vec<f64>,
    pub flux: Vec<f64>,
    /// The trace did not decay to zero at its ends.
    pub truncated: bool,
}

/// Padded FFT length used for a trace of `len` samples.
pub fn fft_len(len: usize) -> usize {
    (PAD_FACTOR * len).next_power_of_two()
}

fn fourier(values: &[f64], n: usize, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    planner.plan_fft_forward(n).process(&mut buf);
    buf
}

/// `S(w) = |E(w) H(w)|` with the trace zero-padded to at least `min_len`
/// samples (and at least `PAD_FACTOR` times its own length).
pub fn poynting_spectrum_padded(
    trace: &DetectorTrace,
    min_len: usize,
) -> Result<FluxSpectrum, SpectraError> {
    let dt = trace.sample_dt()?;
    let n = fft_len(trace.len()).max(min_len.next_power_of_two());
    let mut planner = FftPlanner::new();
    let e = fourier(&trace.ex, n, &mut planner);
    let h = fourier(&trace.hy, n, &mut planner);
    let half = n / 2 + 1;
    let dw = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let scale = dt * dt;
    Ok(FluxSpectrum {
        omega: (0..half).map(|k| k as f64 * dw).collect(),
        flux: (0..half).map(|k| (e[k] * h[k]).norm() * scale).collect(),
        truncated: !trace.is_fully_captured(),
    })
}

pub fn poynting_spectrum(trace: &DetectorTrace) -> Result<FluxSpectrum, SpectraError> {
    poynting_spectrum_padded(trace, 0)
}

/// `spec / reference`, `None` where the reference is below
/// `REFERENCE_FLOOR` of its peak.
pub fn normalize(spec: &FluxSpectrum, reference: &FluxSpectrum) -> Result<Vec<Option<f64>>, SpectraError> {
    let same_axis = spec.omega.len() == reference.omega.len()
        && spec
            .omega
            .iter()
            .zip(&reference.omega)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()));
    if !same_axis {
        return Err(SpectraError::AxisMismatch);
    }
    let peak = reference.flux.iter().cloned().fold(0.0, f64::max);
    let floor = REFERENCE_FLOOR * peak;
    Ok(spec
        .flux
        .iter()
        .zip(&reference.flux)
        .map(|(&s, &r)| (r >= floor && r > 0.0).then(|| s / r))
        .collect())
}

/// R, T and A against relative detuning `(w - w_B) / gamma`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub delta: Vec<f64>,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub a: Vec<f64>,
    /// Some input trace did not decay to zero at its ends.
    pub truncated: bool,
}

impl SpectrumSet {
    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }
}

/// Build R/T/A from a medium run's two detectors and a vacuum reference.
///
/// All three traces are padded to a common FFT length so they share one
/// frequency axis; only detunings inside `delta_range` are kept.
pub fn assemble(
    r_trace: &DetectorTrace,
    t_trace: &DetectorTrace,
    ref_trace: &DetectorTrace,
    params: &EmitterParams,
    delta_range: (f64, f64),
) -> Result<SpectrumSet, SpectraError> {
    assemble_padded(r_trace, t_trace, ref_trace, params, delta_range, 0)
}

/// [`assemble`] with the FFT length raised to at least `min_len`, so that
/// spectra of runs with different durations share one detuning grid.
pub fn assemble_padded(
    r_trace: &DetectorTrace,
    t_trace: &DetectorTrace,
    ref_trace: &DetectorTrace,
    params: &EmitterParams,
    delta_range: (f64, f64),
    min_len: usize,
) -> Result<SpectrumSet, SpectraError> {
    let n = [r_trace, t_trace, ref_trace]
        .iter()
        .map(|tr| fft_len(tr.len()))
        .chain([min_len.next_power_of_two()])
        .max()
        .unwrap_or(0);
    let sr = poynting_spectrum_padded(r_trace, n)?;
    let st = poynting_spectrum_padded(t_trace, n)?;
    let sref = poynting_spectrum_padded(ref_trace, n)?;
    let r = normalize(&sr, &sref)?;
    let t = normalize(&st, &sref)?;
    let g = params.gamma();

    let mut out = SpectrumSet {
        truncated: sr.truncated || st.truncated || sref.truncated,
        ..Default::default()
    };
    for (k, &w) in sref.omega.iter().enumerate() {
        let delta = (w - params.omega_b) / g;
        if delta < delta_range.0 || delta > delta_range.1 {
            continue;
        }
        if let (Some(rv), Some(tv)) = (r[k], t[k]) {
            out.delta.push(delta);
            out.r.push(rv);
            out.t.push(tv);
            out.a.push(1.0 - rv - tv);
        }
    }
    if out.is_empty() {
        return Err(SpectraError::EmptySpectrum);
    }
    Ok(out)
}

/// `|rho12(t) - rho12^s(t)|` sample by sample.
pub fn coherence_error(reference: &[Complex64], other: &[Complex64]) -> Result<Vec<f64>, SpectraError> {
    if reference.len() != other.len() {
        return Err(SpectraError::LengthMismatch(reference.len(), other.len()));
    }
    Ok(reference.iter().zip(other).map(|(a, b)| (a - b).norm()).collect())
}
