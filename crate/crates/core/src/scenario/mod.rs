//! Scenario configuration, the four reference presets, orchestration of the
//! vacuum and medium runs, and output files.

mod config;
mod output;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::em::{self, EmError, RawRecords, SimSetup};
use crate::quantum::{Backend, QuantumError};
use crate::spectra::{self, DetectorTrace, SpectraError, SpectrumSet};
use crate::units::DimensionMismatch;

pub use config::{
    density_from_eta, dipole_coupling, preset, EmitterConfig, GridConfig, MediumConfig,
    PulseConfig, ScenarioConfig, SpectraConfig, StepperSection, PRESETS,
};
pub use output::{write_outputs, FAILED_MARKER};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Units(#[from] DimensionMismatch),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error("solver failed: {0}")]
    Solver(#[from] EmError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl ScenarioError {
    /// Errors caused by the input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            ScenarioError::Config(_)
                | ScenarioError::Units(_)
                | ScenarioError::Quantum(_)
                | ScenarioError::Json(_)
        ) || matches!(self, ScenarioError::Solver(EmError::InvalidSetup(_)))
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config_hash: String,
    pub config: ScenarioConfig,
    /// Resolved SI input of the medium runs.
    pub setup: SimSetup,
    pub density_m3: f64,
    /// `n mu^2 / (9 hbar eps0)`, rad/s.
    pub dipole_coupling: f64,
    /// `dipole_coupling / gamma`, equal to `eta` unless the density is overridden.
    pub eta_effective: f64,
    /// Peak field in atomic units.
    pub field_au: f64,
    pub dt: f64,
}

impl RunManifest {
    pub fn new(config: &ScenarioConfig) -> Result<Self, ScenarioError> {
        config.validate()?;
        let setup = config.sim_setup()?;
        let d = dipole_coupling(setup.density, &setup.emitter);
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
            config: config.clone(),
            dt: setup.dt(),
            density_m3: setup.density,
            dipole_coupling: d,
            eta_effective: d / setup.emitter.gamma(),
            field_au: config.field_au(),
            setup,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let m: RunManifest = serde_json::from_str(text)?;
        m.config.validate()?;
        Ok(m)
    }
}

/// Result of one backend.
#[derive(Debug, Clone)]
pub struct BackendRun {
    pub records: RawRecords,
    pub spectra: SpectrumSet,
    /// `|rho12_bloch - rho12|` at the probe, when the density-matrix run is
    /// part of the scenario.
    pub coherence_error: Option<Vec<f64>>,
}

/// In-memory result of [`execute`].
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub manifest: RunManifest,
    pub vacuum: RawRecords,
    pub runs: BTreeMap<Backend, BackendRun>,
    /// Backends whose solver aborted, with the reason.
    pub failures: BTreeMap<Backend, String>,
}

impl ScenarioOutput {
    pub fn succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExecuteOptions {
    /// Run the backends on separate threads.
    pub parallel: bool,
}

impl Default for ExecuteOptions {
    fn default() -> Self {
        Self { parallel: true }
    }
}

/// Vacuum reference run for a medium setup: identical grid and pulse, no emitters.
pub fn vacuum_setup(setup: &SimSetup) -> SimSetup {
    let mut v = setup.clone();
    v.density = 0.0;
    v
}

/// Run the vacuum reference and every requested backend, then build spectra
/// and coherence errors. A solver abort in one backend is recorded in
/// `failures`; the remaining backends still run.
pub fn execute(config: &ScenarioConfig, opts: ExecuteOptions) -> Result<ScenarioOutput, ScenarioError> {
    let manifest = RunManifest::new(config)?;
    log::info!(
        "scenario '{}': E0 = {:.4e} V/m ({:.4} au), n = {:.4e} m^-3, eta = {:.3e}",
        config.name,
        config.pulse.e0_v_per_m,
        manifest.field_au,
        manifest.density_m3,
        manifest.eta_effective
    );
    let setup = &manifest.setup;
    if setup.is_vacuum() {
        return Err(ScenarioError::Config("emitter density is zero".into()));
    }

    let vacuum = em::run(&vacuum_setup(setup), config.backends[0])?;
    let reference = DetectorTrace::reference(&vacuum);

    let results: Vec<(Backend, Result<RawRecords, EmError>)> = if opts.parallel && config.backends.len() > 1 {
        std::thread::scope(|s| {
            let handles: Vec<_> = config
                .backends
                .iter()
                .map(|&b| (b, s.spawn(move || em::run(setup, b))))
                .collect();
            handles
                .into_iter()
                .map(|(b, h)| (b, h.join().expect("solver thread panicked")))
                .collect()
        })
    } else {
        config.backends.iter().map(|&b| (b, em::run(setup, b))).collect()
    };

    let range = (config.spectra.delta_min, config.spectra.delta_max);
    // one FFT length for every backend keeps the detuning grids identical
    let common_len = results
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .map(|r| spectra::fft_len(r.times.len()))
        .chain([spectra::fft_len(vacuum.times.len())])
        .max()
        .unwrap_or(0);
    let mut runs = BTreeMap::new();
    let mut failures = BTreeMap::new();
    for (b, res) in results {
        match res {
            Ok(records) => {
                if records.diagnostics.hit_time_cap {
                    log::warn!("{b}: stopped at the time cap before the detectors went quiet");
                }
                let spectra = spectra::assemble_padded(
                    &DetectorTrace::reflected_scattered(&records, &vacuum),
                    &DetectorTrace::transmitted(&records),
                    &reference,
                    &setup.emitter,
                    range,
                    common_len,
                )?;
                runs.insert(b, BackendRun { records, spectra, coherence_error: None });
            }
            Err(e @ EmError::NonFinite { .. }) => {
                log::error!("{b}: {e}");
                failures.insert(b, e.to_string());
            }
            Err(e) => return Err(e.into()),
        }
    }

    if let Some(bloch) = runs.get(&Backend::Bloch).map(|r| probe_coherence(&r.records)) {
        for run in runs.values_mut() {
            let other = probe_coherence(&run.records);
            let n = bloch.len().min(other.len());
            run.coherence_error = Some(spectra::coherence_error(&bloch[..n], &other[..n])?);
        }
    }

    Ok(ScenarioOutput { manifest, vacuum, runs, failures })
}

fn probe_coherence(rec: &RawRecords) -> Vec<num_complex::Complex64> {
    rec.probe.iter().map(|p| p.rho12).collect()
}

/// [`execute`] followed by [`write_outputs`].
pub fn execute_to_dir(
    config: &ScenarioConfig,
    dir: &Path,
    opts: ExecuteOptions,
) -> Result<ScenarioOutput, ScenarioError> {
    let out = execute(config, opts)?;
    write_outputs(&out, dir)?;
    Ok(out)
}
