use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{local_field, BoundaryKind, update_e, update_h, EmError, FieldGrid, Layout, MurBoundary, PulseSpec, TfsfSource};
use crate::quantum::{
    Backend, BlochModel, EmitterParams, Nh1Model, Nh2Model, ProbeSample, StepEvents,
    TwoLevelModel, DEFAULT_POLE_GUARD,
};
use crate::units::C;

/// Discretization and bookkeeping knobs of the time loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    /// `dt = courant * dz / c`.
    pub courant: f64,
    #[serde(default)]
    pub boundary: BoundaryKind,
    /// Clamp on the NH1 population difference.
    pub pole_guard: f64,
    /// Record detectors every this many steps.
    pub record_stride: usize,
    /// Detector fields must stay below this fraction of their peak...
    pub quiet_level: f64,
    /// ...for this many pulse durations before the run stops.
    pub quiet_taus: f64,
    /// Hard cap on simulated time (s).
    pub max_time: f64,
    /// Run for exactly this long instead of stopping when quiet (s).
    pub fixed_time: Option<f64>,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            courant: 0.5,
            boundary: BoundaryKind::Mur1,
            pole_guard: DEFAULT_POLE_GUARD,
            record_stride: 50,
            quiet_level: 1e-6,
            quiet_taus: 5.0,
            max_time: 4e-12,
            fixed_time: None,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<(), EmError> {
        let ok = self.courant > 0.0
            && self.courant <= 1.0
            && self.pole_guard > 0.0
            && self.record_stride > 0
            && self.quiet_level > 0.0
            && self.quiet_taus > 0.0
            && self.max_time > 0.0
            && self.fixed_time.is_none_or(|t| t > 0.0);
        if ok {
            Ok(())
        } else {
            Err(EmError::InvalidSetup(format!("bad stepper config {self:?}")))
        }
    }
}

/// Order of the two curl updates. Only [`LeapfrogOrder::HFirst`] is
/// consistent with the source timing; the other exists to test that.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeapfrogOrder {
    #[default]
    HFirst,
    EFirst,
}

/// Everything a single simulation needs, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSetup {
    pub dz: f64,
    pub layout: Layout,
    pub pulse: PulseSpec,
    pub emitter: EmitterParams,
    /// Emitter number density in the slab (1/m^3). Zero gives a vacuum run.
    pub density: f64,
    pub stepper: StepperConfig,
    /// Apply the Lorentz-Lorenz local-field correction.
    pub local_field: bool,
    #[serde(default)]
    pub order: LeapfrogOrder,
}

impl SimSetup {
    pub fn dt(&self) -> f64 {
        self.stepper.courant * self.dz / C
    }

    pub fn validate(&self) -> Result<(), EmError> {
        self.layout.validate()?;
        self.pulse.validate()?;
        self.stepper.validate()?;
        self.emitter
            .validate()
            .map_err(|e| EmError::InvalidSetup(e.to_string()))?;
        if !(self.dz > 0.0) || !(self.density >= 0.0) {
            return Err(EmError::InvalidSetup(format!(
                "dz={} density={}",
                self.dz, self.density
            )));
        }
        Ok(())
    }

    pub fn is_vacuum(&self) -> bool {
        self.density == 0.0 || self.layout.slab.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectorSeries {
    pub ex: Vec<f64>,
    pub hy: Vec<f64>,
}

impl DetectorSeries {
    fn push(&mut self, grid: &FieldGrid, node: usize) {
        self.ex.push(grid.ex[node]);
        self.hy.push(grid.hy[node]);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Cell-steps in which the NH1 rate denominator was clamped.
    pub pole_events: u64,
    /// Largest `|rho11 + rho22 - 1|` seen in any slab cell at a sample time.
    pub max_norm_drift: f64,
    /// Largest violation of `rho11, rho22 >= 0` and `|rho12|^2 <= rho11 rho22`,
    /// same sampling as `max_norm_drift`.
    pub max_positivity_violation: f64,
    pub steps: u64,
    pub final_time: f64,
    /// Stopped by `max_time` before the detectors went quiet.
    pub hit_time_cap: bool,
    pub runtime_s: f64,
}

/// Time series recorded by one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecords {
    /// `None` for a vacuum run.
    pub backend: Option<Backend>,
    pub sample_dt: f64,
    pub times: Vec<f64>,
    pub reflected: DetectorSeries,
    pub transmitted: DetectorSeries,
    /// Emitter record at the probe node; empty for a vacuum run.
    pub probe: Vec<ProbeSample>,
    pub diagnostics: Diagnostics,
}

/// Result of advancing one cell.
#[derive(Debug, Clone, Copy)]
pub struct CellStep<S> {
    pub state: S,
    /// Local field at the start of the step (V/m).
    pub e_loc: f64,
    pub px: f64,
    pub dpx_dt: f64,
    pub events: StepEvents,
}

/// Advance one medium cell by `dt`.
///
/// The local field is built from `ex` and the polarization of the previous
/// step, then extrapolated linearly across the step using `prev_e_loc`, the
/// local field one step earlier. A constant hold would make the coupling
/// first order in `dt`. The new polarization is `n * 2 mu_x Re(rho12)` and its
/// time derivative a backward difference.
#[inline]
#[allow(clippy::too_many_arguments)]
pub fn step_cell<M: TwoLevelModel>(
    model: &M,
    state: M::State,
    ex_node: f64,
    px_node: f64,
    prev_e_loc: f64,
    density: f64,
    dt: f64,
    lorentz_lorenz: bool,
) -> CellStep<M::State> {
    let e_loc = local_field(ex_node, px_node, lorentz_lorenz);
    let slope = (e_loc - prev_e_loc) / dt;
    let (state, events) = model.rk4_step(state, |tau| e_loc + slope * tau, 0.0, dt);
    let px = density * model.observables(&state).dipole_expect;
    CellStep {
        state,
        e_loc,
        px,
        dpx_dt: (px - px_node) / dt,
        events,
    }
}

/// Run one simulation with the requested emitter model.
pub fn run(setup: &SimSetup, backend: Backend) -> Result<RawRecords, EmError> {
    setup.validate()?;
    let p = setup.emitter;
    let mut records = match backend {
        Backend::Bloch => Simulation::new(setup, BlochModel::new(p))?.run()?,
        Backend::Nh1 => Simulation::new(setup, Nh1Model::new(p, setup.stepper.pole_guard))?.run()?,
        Backend::Nh2 => Simulation::new(setup, Nh2Model::new(p))?.run()?,
    };
    if setup.is_vacuum() {
        records.backend = None;
    }
    Ok(records)
}

struct Simulation<'a, M: TwoLevelModel> {
    setup: &'a SimSetup,
    model: M,
    grid: FieldGrid,
    states: Vec<M::State>,
    e_loc: Vec<f64>,
    dpx_dt: Vec<f64>,
    source: TfsfSource,
    boundary: MurBoundary,
    dt: f64,
}

impl<'a, M: TwoLevelModel> Simulation<'a, M> {
    fn new(setup: &'a SimSetup, model: M) -> Result<Self, EmError> {
        let l = &setup.layout;
        let grid = FieldGrid::new(setup.dz, l.nz, l.slab.clone(), setup.density)?;
        let cells = grid.slab.len();
        let dt = setup.dt();
        Ok(Self {
            states: vec![model.ground_state(); cells],
            e_loc: vec![0.0; cells],
            dpx_dt: vec![0.0; cells],
            source: TfsfSource::new(setup.pulse, l.injection),
            boundary: match setup.stepper.boundary {
                BoundaryKind::Mur1 => MurBoundary::new(setup.dz, dt),
            },
            model,
            grid,
            setup,
            dt,
        })
    }

    fn step_medium(&mut self, diag: &mut Diagnostics) {
        let start = self.grid.slab.start;
        let ll = self.setup.local_field;
        for (j, state) in self.states.iter_mut().enumerate() {
            let i = start + j;
            let out = step_cell(
                &self.model,
                *state,
                self.grid.ex[i],
                self.grid.px[i],
                self.e_loc[j],
                self.grid.density[i],
                self.dt,
                ll,
            );
            *state = out.state;
            self.e_loc[j] = out.e_loc;
            self.grid.px[i] = out.px;
            self.dpx_dt[j] = out.dpx_dt;
            if out.events.pole_hits > 0 {
                diag.pole_events += 1;
            }
        }
    }

    fn run(mut self) -> Result<RawRecords, EmError> {
        let started = Instant::now();
        let setup = self.setup;
        let st = &setup.stepper;
        let l = &setup.layout;
        let dt = self.dt;
        let e_floor = 1e-8 * setup.pulse.e0;

        let mut rec = RawRecords {
            backend: Some(self.model.backend()),
            sample_dt: dt * st.record_stride as f64,
            times: Vec::new(),
            reflected: DetectorSeries::default(),
            transmitted: DetectorSeries::default(),
            probe: Vec::new(),
            diagnostics: Diagnostics::default(),
        };
        let mut diag = Diagnostics::default();

        // earliest time the incident pulse has fully crossed the far detector
        let transit = (l.transmit_detector - l.injection) as f64 * setup.dz / C;
        let t_min = setup.pulse.t0 + 3.0 * setup.pulse.tau_fwhm + transit;
        let quiet_span = st.quiet_taus * setup.pulse.tau_fwhm;
        let mut peaks = [0.0f64; 2];
        let mut last_loud = 0.0f64;

        self.source.correct_h(&mut self.grid, 0.0, dt);
        let probe_cell = l.probe.wrapping_sub(self.grid.slab.start);

        let mut n: u64 = 0;
        loop {
            let t_next = (n + 1) as f64 * dt;
            self.boundary.remember(&self.grid);
            match setup.order {
                LeapfrogOrder::HFirst => {
                    update_h(&mut self.grid, dt);
                    self.step_medium(&mut diag);
                    update_e(&mut self.grid, &self.dpx_dt, dt);
                }
                LeapfrogOrder::EFirst => {
                    self.step_medium(&mut diag);
                    update_e(&mut self.grid, &self.dpx_dt, dt);
                    update_h(&mut self.grid, dt);
                }
            }
            self.source.correct_e(&mut self.grid, t_next - 0.5 * dt, dt);
            self.source.correct_h(&mut self.grid, t_next, dt);
            self.boundary.apply(&mut self.grid);
            n += 1;

            if let Some(cell) = self.grid.first_non_finite() {
                return Err(EmError::NonFinite { step: n, cell });
            }

            if n.is_multiple_of(st.record_stride as u64) {
                rec.times.push(t_next);
                rec.reflected.push(&self.grid, l.reflect_detector);
                rec.transmitted.push(&self.grid, l.transmit_detector);
                if let Some(s) = self.states.get(probe_cell) {
                    rec.probe.push(self.model.probe(s));
                }
                for s in &self.states {
                    let p = self.model.probe(s);
                    diag.max_norm_drift = diag.max_norm_drift.max((p.norm - 1.0).abs());
                    let violation = (p.rho12.norm_sqr() - p.rho11 * p.rho22)
                        .max(-p.rho11)
                        .max(-p.rho22);
                    diag.max_positivity_violation = diag.max_positivity_violation.max(violation);
                }

                let now = [
                    self.grid.ex[l.reflect_detector].abs(),
                    self.grid.ex[l.transmit_detector].abs(),
                ];
                let mut loud = false;
                for k in 0..2 {
                    peaks[k] = peaks[k].max(now[k]);
                    if now[k] > st.quiet_level * peaks[k].max(e_floor) {
                        loud = true;
                    }
                }
                if loud {
                    last_loud = t_next;
                }
                let done = match st.fixed_time {
                    Some(t_end) => t_next >= t_end,
                    None => t_next >= t_min && t_next - last_loud >= quiet_span,
                };
                if done {
                    break;
                }
                if st.fixed_time.is_none() && t_next >= st.max_time {
                    diag.hit_time_cap = true;
                    break;
                }
            }
        }

        diag.steps = n;
        diag.final_time = n as f64 * dt;
        diag.runtime_s = started.elapsed().as_secs_f64();
        rec.diagnostics = diag;
        Ok(rec)
    }
}
