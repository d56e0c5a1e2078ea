use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ScenarioError;
use crate::em::{BoundaryKind, Layout, LeapfrogOrder, PulseSpec, SimSetup, StepperConfig};
use crate::quantum::{Backend, EmitterParams, DEFAULT_POLE_GUARD};
use crate::units::{convert, Unit, AU_FIELD, EPS0, HBAR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterConfig {
    pub omega_b_ev: f64,
    pub mu_x_debye: f64,
    pub gamma_star_thz: f64,
    pub big_gamma_thz: f64,
}

impl EmitterConfig {
    pub fn to_si(&self) -> Result<EmitterParams, ScenarioError> {
        let p = EmitterParams::new(
            convert(self.omega_b_ev, Unit::ElectronVolt, Unit::RadPerSecond)?,
            convert(self.mu_x_debye, Unit::Debye, Unit::CoulombMeter)?,
            convert(self.gamma_star_thz, Unit::Terahertz, Unit::PerSecond)?,
            convert(self.big_gamma_thz, Unit::Terahertz, Unit::PerSecond)?,
        )?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    /// Cooperativity `n mu^2 / (9 hbar eps0 gamma)`.
    pub eta: f64,
    /// Number density override (1/m^3); replaces `eta` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_m3: Option<f64>,
    pub slab_thickness_nm: f64,
    pub probe_depth_nm: f64,
    #[serde(default = "yes")]
    pub local_field: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub e0_v_per_m: f64,
    /// Carrier photon energy; resonant with the transition when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_ev: Option<f64>,
    pub tau_fwhm_fs: f64,
    pub t0_fs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dz_nm: f64,
    /// Vacuum between the injection plane and the slab, and between the slab
    /// and the transmitted detector.
    pub gap_nm: f64,
    /// Spacing between edge, detectors and injection plane.
    pub margin_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    pub courant: f64,
    #[serde(default)]
    pub boundary: BoundaryKind,
    pub pole_guard: f64,
    pub record_stride: usize,
    pub quiet_level: f64,
    pub quiet_taus: f64,
    pub max_time_fs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_time_fs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraConfig {
    pub delta_min: f64,
    pub delta_max: f64,
}

/// A complete scenario in user units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Free-form label, the preset tag for presets.
    #[serde(default)]
    pub name: String,
    pub backends: Vec<Backend>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub emitter: EmitterConfig,
    pub medium: MediumConfig,
    pub pulse: PulseConfig,
    pub grid: GridConfig,
    pub stepper: StepperSection,
    pub spectra: SpectraConfig,
}

fn yes() -> bool {
    true
}

/// Emitter density giving cooperativity `eta`: `n = 9 hbar eps0 gamma eta / mu^2`.
pub fn density_from_eta(eta: f64, params: &EmitterParams) -> f64 {
    9.0 * HBAR * EPS0 * params.gamma() * eta / (params.mu_x * params.mu_x)
}

/// Dipole-dipole frequency `n mu^2 / (9 hbar eps0)` (rad/s).
pub fn dipole_coupling(density: f64, params: &EmitterParams) -> f64 {
    density * params.mu_x * params.mu_x / (9.0 * HBAR * EPS0)
}

pub const PRESETS: [&str; 4] = [
    "weak-field-weak-int",
    "weak-field-strong-int",
    "strong-field-weak-int",
    "strong-field-strong-int",
];

/// One of the four reference scenarios.
pub fn preset(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    let (e0, eta) = match name {
        "weak-field-weak-int" => (1.0, 1.3e-7),
        "weak-field-strong-int" => (1.0, 1.3),
        "strong-field-weak-int" => (1e10, 1.3e-7),
        "strong-field-strong-int" => (1e10, 1.3),
        _ => {
            return Err(ScenarioError::Config(format!(
                "unknown preset '{name}'; available: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(ScenarioConfig {
        name: name.to_string(),
        backends: Backend::ALL.to_vec(),
        output_dir: None,
        emitter: EmitterConfig {
            omega_b_ev: 2.0,
            mu_x_debye: 4.0,
            gamma_star_thz: 10.0,
            big_gamma_thz: 1.0,
        },
        medium: MediumConfig {
            eta,
            density_m3: None,
            slab_thickness_nm: 600.0,
            probe_depth_nm: 290.0,
            local_field: true,
        },
        pulse: PulseConfig {
            e0_v_per_m: e0,
            omega0_ev: None,
            tau_fwhm_fs: 10.0,
            t0_fs: 40.0,
        },
        grid: GridConfig {
            dz_nm: 1.0,
            gap_nm: 1000.0,
            margin_nm: 50.0,
        },
        stepper: StepperSection {
            courant: 0.5,
            boundary: BoundaryKind::Mur1,
            pole_guard: DEFAULT_POLE_GUARD,
            record_stride: 50,
            quiet_level: 1e-6,
            quiet_taus: 5.0,
            max_time_fs: 4000.0,
            fixed_time_fs: None,
        },
        spectra: SpectraConfig {
            delta_min: -60.0,
            delta_max: 60.0,
        },
    })
}

fn cells(length_nm: f64, dz_nm: f64, what: &str) -> Result<usize, ScenarioError> {
    let n = length_nm / dz_nm;
    if !(n >= 1.0) || !n.is_finite() {
        return Err(ScenarioError::Config(format!("{what} = {length_nm} nm is below one cell")));
    }
    Ok(n.round() as usize)
}

impl ScenarioConfig {
    /// Parse the flat key-value format; unknown keys are errors.
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Apply `key=value` overrides with dotted keys, e.g.
    /// `pulse.e0_v_per_m=1e9` or `backends=["nh2"]`.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self, ScenarioError> {
        let mut doc = toml::Value::try_from(self)
            .map_err(|e| ScenarioError::Config(e.to_string()))?;
        for item in overrides {
            let item = item.as_ref();
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| ScenarioError::Config(format!("override '{item}' is not key=value")))?;
            let value = parse_value(raw.trim());
            set_path(&mut doc, key.trim(), value)?;
        }
        let cfg: ScenarioConfig = doc
            .try_into()
            .map_err(|e: toml::de::Error| ScenarioError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Config(m));
        if self.backends.is_empty() {
            return bad("no backends requested".into());
        }
        let unique: BTreeSet<_> = self.backends.iter().collect();
        if unique.len() != self.backends.len() {
            return bad(format!("duplicate backends in {:?}", self.backends));
        }
        let m = &self.medium;
        match m.density_m3 {
            Some(n) if !(n >= 0.0) => return bad(format!("medium.density_m3 = {n}")),
            None if !(m.eta > 0.0) => return bad(format!("medium.eta = {} must be positive", m.eta)),
            _ => {}
        }
        if !(m.probe_depth_nm > 0.0 && m.probe_depth_nm < m.slab_thickness_nm) {
            return bad(format!(
                "medium.probe_depth_nm = {} must lie inside (0, {})",
                m.probe_depth_nm, m.slab_thickness_nm
            ));
        }
        if !(self.spectra.delta_min < self.spectra.delta_max) {
            return bad("spectra.delta_min must be below spectra.delta_max".into());
        }
        let setup = self.sim_setup()?;
        setup
            .validate()
            .map_err(|e| ScenarioError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn emitter_params(&self) -> Result<EmitterParams, ScenarioError> {
        self.emitter.to_si()
    }

    pub fn density(&self) -> Result<f64, ScenarioError> {
        match self.medium.density_m3 {
            Some(n) => Ok(n),
            None => Ok(density_from_eta(self.medium.eta, &self.emitter_params()?)),
        }
    }

    /// Peak field in atomic units.
    pub fn field_au(&self) -> f64 {
        self.pulse.e0_v_per_m / AU_FIELD
    }

    /// Resolve to SI simulation input (medium run).
    pub fn sim_setup(&self) -> Result<SimSetup, ScenarioError> {
        let p = self.emitter_params()?;
        let g = &self.grid;
        let dz = convert(g.dz_nm, Unit::Nanometer, Unit::Meter)?;
        let slab = cells(self.medium.slab_thickness_nm, g.dz_nm, "medium.slab_thickness_nm")?;
        let gap = cells(g.gap_nm, g.dz_nm, "grid.gap_nm")?;
        let margin = cells(g.margin_nm, g.dz_nm, "grid.margin_nm")?;
        let probe = (self.medium.probe_depth_nm / g.dz_nm).round() as usize;
        let fs = |v: f64| convert(v, Unit::Femtosecond, Unit::Second);
        let omega0 = match self.pulse.omega0_ev {
            Some(ev) => convert(ev, Unit::ElectronVolt, Unit::RadPerSecond)?,
            None => p.omega_b,
        };
        let s = &self.stepper;
        Ok(SimSetup {
            dz,
            layout: Layout::standard(slab, gap, margin, probe.min(slab.saturating_sub(1))),
            pulse: PulseSpec {
                e0: self.pulse.e0_v_per_m,
                omega0,
                tau_fwhm: fs(self.pulse.tau_fwhm_fs)?,
                t0: fs(self.pulse.t0_fs)?,
            },
            emitter: p,
            density: self.density()?,
            stepper: StepperConfig {
                courant: s.courant,
                boundary: s.boundary,
                pole_guard: s.pole_guard,
                record_stride: s.record_stride,
                quiet_level: s.quiet_level,
                quiet_taus: s.quiet_taus,
                max_time: fs(s.max_time_fs)?,
                fixed_time: s.fixed_time_fs.map(fs).transpose()?,
            },
            local_field: self.medium.local_field,
            order: LeapfrogOrder::HFirst,
        })
    }

    /// SHA-256 of the canonical JSON form, ignoring `output_dir`.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.output_dir = None;
        let json = serde_json::to_string(&canon).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or(toml::Value::String(raw.to_string())),
        // bare words and comma lists, e.g. `backends=bloch,nh2`
        Err(_) if raw.contains(',') => toml::Value::Array(
            raw.split(',')
                .map(|s| toml::Value::String(s.trim().to_string()))
                .collect(),
        ),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_path(doc: &mut toml::Value, key: &str, value: toml::Value) -> Result<(), ScenarioError> {
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| ScenarioError::Config(format!("'{key}' does not name a setting")))?;
        if i + 1 == parts.len() {
            // a single item for a list setting, e.g. `backends=nh1`
            let value = match (table.get(*part), value) {
                (Some(toml::Value::Array(_)), v @ toml::Value::String(_)) => toml::Value::Array(vec![v]),
                (_, v) => v,
            };
            table.insert(part.to_string(), value);
            return Ok(());
        }
        node = table
            .get_mut(*part)
            .ok_or_else(|| ScenarioError::Config(format!("unknown section '{part}' in '{key}'")))?;
    }
    Err(ScenarioError::Config(format!("empty override key '{key}'")))
}
