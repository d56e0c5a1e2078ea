//! Physical constants and the handful of unit conversions the simulator needs.
//!
//! Everything inside the engine is SI. User-facing parameters come in eV,
//! Debye, THz, fs, nm and V/m and are converted once, at parse time.
//!
//! Rates quoted in THz are taken as `1e12 s^-1` with no factor of 2π: they
//! enter the equations of motion as exponential decay rates, not as
//! spectroscopic line positions.

use std::fmt;

use thiserror::Error;

/// Speed of light in vacuum (m/s), exact.
pub const C: f64 = 299_792_458.0;
/// Vacuum permittivity (F/m), CODATA 2018.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability (H/m), chosen so that `c^2 eps0 mu0 = 1`.
pub const MU0: f64 = 1.0 / (EPS0 * C * C);
/// Reduced Planck constant (J s), exact.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// One Debye in C m (`1e-21 / c`).
pub const DEBYE: f64 = 1e-21 / C;
/// One electron-volt in J.
pub const EV: f64 = ELEMENTARY_CHARGE;
/// Atomic unit of electric field (V/m), CODATA 2018.
pub const AU_FIELD: f64 = 5.142_206_747_63e11;
/// Impedance of free space (ohm).
pub const ETA0: f64 = MU0 * C;

/// The constants bundled as a value, for code that wants to carry them around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub c: f64,
    pub eps0: f64,
    pub mu0: f64,
    pub hbar: f64,
    pub debye: f64,
    pub ev: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        c: C,
        eps0: EPS0,
        mu0: MU0,
        hbar: HBAR,
        debye: DEBYE,
        ev: EV,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Time,
    Energy,
    /// Rates and angular frequencies share this dimension (s^-1).
    Frequency,
    DipoleMoment,
    ElectricField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Meter,
    Micrometer,
    Nanometer,
    Second,
    Picosecond,
    Femtosecond,
    Joule,
    ElectronVolt,
    /// Angular frequency, rad/s.
    RadPerSecond,
    /// Plain rate, 1/s.
    PerSecond,
    /// `1e12 s^-1`, no 2π.
    Terahertz,
    CoulombMeter,
    Debye,
    VoltPerMeter,
    /// Atomic units of electric field.
    AtomicField,
}

impl Unit {
    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Meter | Micrometer | Nanometer => Dimension::Length,
            Second | Picosecond | Femtosecond => Dimension::Time,
            Joule | ElectronVolt => Dimension::Energy,
            RadPerSecond | PerSecond | Terahertz => Dimension::Frequency,
            CoulombMeter | Debye => Dimension::DipoleMoment,
            VoltPerMeter | AtomicField => Dimension::ElectricField,
        }
    }

    /// Factor taking one of this unit to the SI unit of its dimension.
    pub fn to_si(self) -> f64 {
        use Unit::*;
        match self {
            Meter => 1.0,
            Micrometer => 1e-6,
            Nanometer => 1e-9,
            Second => 1.0,
            Picosecond => 1e-12,
            Femtosecond => 1e-15,
            Joule => 1.0,
            ElectronVolt => EV,
            RadPerSecond | PerSecond => 1.0,
            Terahertz => 1e12,
            CoulombMeter => 1.0,
            Debye => DEBYE,
            VoltPerMeter => 1.0,
            AtomicField => AU_FIELD,
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Meter => "m",
            Micrometer => "um",
            Nanometer => "nm",
            Second => "s",
            Picosecond => "ps",
            Femtosecond => "fs",
            Joule => "J",
            ElectronVolt => "eV",
            RadPerSecond => "rad/s",
            PerSecond => "1/s",
            Terahertz => "THz",
            CoulombMeter => "C*m",
            Debye => "D",
            VoltPerMeter => "V/m",
            AtomicField => "au",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot convert {from} ({from_dim:?}) to {to} ({to_dim:?})")]
pub struct DimensionMismatch {
    pub from: Unit,
    pub to: Unit,
    pub from_dim: Dimension,
    pub to_dim: Dimension,
}

/// Convert `value` between units.
///
/// Same-dimension conversions compose the SI factors. The only cross-dimension
/// conversion is energy <-> angular frequency through `E = hbar * omega`.
pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64, DimensionMismatch> {
    let (fd, td) = (from.dimension(), to.dimension());
    let si = value * from.to_si();
    let si = match (fd, td) {
        (a, b) if a == b => si,
        (Dimension::Energy, Dimension::Frequency) => si / HBAR,
        (Dimension::Frequency, Dimension::Energy) => si * HBAR,
        _ => {
            return Err(DimensionMismatch {
                from,
                to,
                from_dim: fd,
                to_dim: td,
            })
        }
    };
    Ok(si / to.to_si())
}
