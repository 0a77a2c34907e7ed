//! Fixed-step coupled simulation: kite, tether, platform, waves and the
//! flight controller advance together on a classical RK4 scheme.
//!
//! The continuous state vector is
//! `[θ, φ, r, θ̇, φ̇, ṙ, ν(6), ν̇(6), z(n)]` (18 + n entries). The digital
//! controller runs every `control_period` with the steering input held
//! between updates; the wave excitation is pre-synthesized for the whole
//! run and linearly interpolated inside integrator stages. Runs are
//! deterministic: identical configuration and seed give bit-identical
//! records.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{fabs, round};
use nalgebra::{DVector, Vector3, Vector6};
use thiserror::Error;

use crate::control::{
    frequency_from_cycle_times, ControlError, ControllerMode, ControllerState, FlightController,
    PlannerConfig, TargetPoints, TargetSide,
};
use crate::kite::{
    aero_local, apparent_local, gravity_local, kite_accelerations, local_basis, AeroParams,
    KiteError, KiteState, LocalForces,
};
use crate::platform::{radiation_force, PlatformModel, PlatformState};
use crate::tether::{effective_mass, traction_wrench, TetherConfig, TetherError, TetherWrench};
use crate::waves::{synthesize, ExcitationSeries, WaveError, WaveScenario};

/// Platform rotation magnitude beyond which a warning event is logged, rad.
pub const ROTATION_WARN: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{source} (t = {t:.3} s)")]
    Kite { t: f64, source: KiteError },
    #[error("{source} (t = {t:.3} s)")]
    Tether { t: f64, source: TetherError },
    #[error("{source}")]
    Wave {
        #[from]
        source: WaveError,
    },
    #[error("{source}")]
    Platform {
        #[from]
        source: crate::platform::PlatformError,
    },
    #[error("non-finite state at t = {t:.3} s: {diagnostic}")]
    NonFiniteState { t: f64, diagnostic: String },
}

/// Nominal tether length schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TetherMode {
    /// Constant nominal length, m.
    FixedLength(f64),
    /// Constant-rate reel-out from `initial` at `rate` m/s.
    ReelOut { initial: f64, rate: f64 },
}

impl TetherMode {
    pub fn length_at(&self, t: f64) -> f64 {
        match *self {
            TetherMode::FixedLength(l) => l,
            TetherMode::ReelOut { initial, rate } => initial + rate * t,
        }
    }
}

/// Platform side of the configuration: `None` freezes the platform at the
/// origin (onshore mode).
#[derive(Debug, Clone)]
pub struct PlatformSetup {
    pub model: PlatformModel,
    pub initial: Option<PlatformState>,
}

/// Full simulation configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Integrator step, s.
    pub dt: f64,
    /// Simulated duration, s.
    pub duration: f64,
    /// Digital control period, s; an integer multiple of `dt`.
    pub control_period: f64,
    /// Uniform wind, m/s (inertial frame).
    pub wind: Vector3<f64>,
    pub tether_mode: TetherMode,
    pub kite_mass: f64,
    pub aero: AeroParams,
    pub tether: TetherConfig,
    /// Apply the kite-side traction only on the radial axis instead of
    /// projecting the full line direction.
    pub radial_only_traction: bool,
    pub initial_kite: KiteState,
    pub targets: TargetPoints,
    pub controller: ControllerState,
    pub mode: ControllerMode,
    pub planner: PlannerConfig,
    pub platform: Option<PlatformSetup>,
    pub waves: Option<WaveScenario>,
    /// Run seed, echoed into outputs.
    pub seed: u64,
}

/// Timestamped run events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimEvent {
    TargetSwitch { t: f64, to: TargetSide },
    PlannerUpdate { t: f64, v_bar: f64, delta_phi: f64 },
    PlannerHold { t: f64, reason: ControlError },
    /// Traction exceeded the breaking load (diagnostic; the run continues).
    TetherOverload { t: f64, force: f64 },
    CourseUndefined { t: f64 },
    LargeRotation { t: f64, angle: f64 },
}

impl SimEvent {
    pub fn time(&self) -> f64 {
        match *self {
            SimEvent::TargetSwitch { t, .. }
            | SimEvent::PlannerUpdate { t, .. }
            | SimEvent::PlannerHold { t, .. }
            | SimEvent::TetherOverload { t, .. }
            | SimEvent::CourseUndefined { t }
            | SimEvent::LargeRotation { t, .. } => t,
        }
    }
}

impl core::fmt::Display for SimEvent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            SimEvent::TargetSwitch { t, to } => write!(f, "{t:.2} target_switch {to:?}"),
            SimEvent::PlannerUpdate { t, v_bar, delta_phi } => {
                write!(f, "{t:.2} planner_update v_bar={v_bar:.3} delta_phi={delta_phi:.4}")
            }
            SimEvent::PlannerHold { t, reason } => write!(f, "{t:.2} planner_hold {reason}"),
            SimEvent::TetherOverload { t, force } => {
                write!(f, "{t:.2} tether_overload force={force:.0}")
            }
            SimEvent::CourseUndefined { t } => write!(f, "{t:.2} course_undefined"),
            SimEvent::LargeRotation { t, angle } => {
                write!(f, "{t:.2} large_rotation angle={angle:.3}")
            }
        }
    }
}

/// Time series sampled once per control step, plus the event log.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    /// Sampling interval of the series (the control period), s.
    pub sample_dt: f64,
    pub time: Vec<f64>,
    pub kite: Vec<KiteState>,
    pub platform_nu: Vec<Vector6<f64>>,
    /// Tether force on the platform (inertial frame), N.
    pub tether_force: Vec<Vector3<f64>>,
    pub delta: Vec<f64>,
    pub active: Vec<TargetSide>,
    pub events: Vec<SimEvent>,
    pub seed: u64,
}

impl SimRecord {
    /// Times of every switch to the PLUS target.
    pub fn plus_switch_times(&self) -> Vec<f64> {
        self.events
            .iter()
            .filter_map(|e| match e {
                SimEvent::TargetSwitch { t, to: TargetSide::Plus } => Some(*t),
                _ => None,
            })
            .collect()
    }

    /// Total number of target alternations.
    pub fn alternation_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, SimEvent::TargetSwitch { .. }))
            .count()
    }

    /// Start of the steady window: the time of the PLUS switch that closes
    /// the `transient_eights`-th figure-eight.
    pub fn steady_start_time(&self, transient_eights: usize) -> Option<f64> {
        self.plus_switch_times().get(transient_eights).copied()
    }

    /// Sample index of the steady-window start.
    pub fn steady_start_index(&self, transient_eights: usize) -> Option<usize> {
        let t0 = self.steady_start_time(transient_eights)?;
        Some(self.time.iter().position(|&t| t >= t0)?)
    }

    /// Figure-eight repetition frequency over the steady window, from the
    /// recorded switch events.
    pub fn f_traj(&self, transient_eights: usize) -> Result<f64, ControlError> {
        let times = self.plus_switch_times();
        if times.len() <= transient_eights {
            return Err(ControlError::InsufficientHistory);
        }
        frequency_from_cycle_times(&times[transient_eights..])
    }

    /// RMS distance of the kite path from its mean position over the steady
    /// window (a scalar fingerprint used for step-size convergence checks).
    pub fn kite_path_rms(&self, transient_eights: usize) -> Option<f64> {
        let start = self.steady_start_index(transient_eights)?;
        let pts: Vec<Vector3<f64>> = self.kite[start..].iter().map(|k| k.position()).collect();
        if pts.is_empty() {
            return None;
        }
        let mean = pts.iter().fold(Vector3::zeros(), |a, p| a + p) / pts.len() as f64;
        let ms = pts.iter().map(|p| (p - mean).norm_squared()).sum::<f64>() / pts.len() as f64;
        Some(libm::sqrt(ms))
    }
}

/// Classical fourth-order Runge-Kutta step.
pub fn rk4_step<F>(x: &DVector<f64>, t: f64, dt: f64, mut f: F) -> Result<DVector<f64>, EngineError>
where
    F: FnMut(&DVector<f64>, f64) -> Result<DVector<f64>, EngineError>,
{
    let k1 = f(x, t)?;
    let k2 = f(&(x + &k1 * (dt / 2.0)), t + dt / 2.0)?;
    let k3 = f(&(x + &k2 * (dt / 2.0)), t + dt / 2.0)?;
    let k4 = f(&(x + &k3 * dt), t + dt)?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

const PLATFORM_OFFSET: usize = 6;
const RADIATION_OFFSET: usize = 18;

fn kite_from_vec(x: &DVector<f64>) -> KiteState {
    KiteState::new(x[0], x[1], x[2], x[3], x[4], x[5])
}

fn platform_disp(x: &DVector<f64>, coupled: bool) -> Vector3<f64> {
    if coupled {
        Vector3::new(x[PLATFORM_OFFSET], x[PLATFORM_OFFSET + 1], x[PLATFORM_OFFSET + 2])
    } else {
        Vector3::zeros()
    }
}

/// Evaluates the coupled state derivative at time `t` with the steering
/// input held at `delta`.
///
/// The tether wrench is evaluated once and feeds both the kite and the
/// platform equations (equal and opposite in the inertial frame).
pub fn derivative(
    x: &DVector<f64>,
    t: f64,
    cfg: &SimConfig,
    waves: Option<&ExcitationSeries>,
    delta: f64,
) -> Result<DVector<f64>, EngineError> {
    let kite = kite_from_vec(x);
    let length = cfg.tether_mode.length_at(t);
    let mass = effective_mass(cfg.kite_mass, &cfg.tether, length);
    let coupled = cfg.platform.is_some();

    let wrench = traction_wrench(&kite.position(), &platform_disp(x, coupled), &cfg.tether, length)
        .map_err(|source| EngineError::Tether { t, source })?;

    let basis = local_basis(kite.theta, kite.phi);
    let mut total = gravity_local(mass, kite.theta) + apparent_local(&kite, mass);
    total = total
        + aero_local(&kite, &cfg.wind, &Vector3::zeros(), &cfg.aero, delta, length, cfg.tether.diameter)
            .map_err(|source| EngineError::Kite { t, source })?;
    if cfg.radial_only_traction {
        total.f_r -= wrench.magnitude;
    } else {
        total = total + LocalForces::from_cartesian(&basis, &wrench.force_on_kite);
    }
    let (theta_dd, phi_dd, r_dd) = kite_accelerations(&total, mass, kite.r, kite.theta)
        .map_err(|source| EngineError::Kite { t, source })?;

    let mut dx = DVector::zeros(x.len());
    dx[0] = kite.theta_dot;
    dx[1] = kite.phi_dot;
    dx[2] = kite.r_dot;
    dx[3] = theta_dd;
    dx[4] = phi_dd;
    dx[5] = r_dd;

    if let Some(setup) = &cfg.platform {
        let n = setup.model.radiation.order();
        let nu = Vector6::from_iterator((0..6).map(|i| x[PLATFORM_OFFSET + i]));
        let nu_dot = Vector6::from_iterator((0..6).map(|i| x[PLATFORM_OFFSET + 6 + i]));
        let z = DVector::from_iterator(n, (0..n).map(|i| x[RADIATION_OFFSET + i]));

        let (mu, z_dot) = radiation_force(&setup.model.radiation, &z, &nu_dot);
        let f_exc = waves.map_or_else(Vector6::zeros, |w| w.force_at(t));
        let mut f_t = Vector6::zeros();
        for i in 0..3 {
            f_t[i] = wrench.force_on_platform[i];
            f_t[i + 3] = wrench.moment_on_platform[i];
        }
        let acc = setup.model.acceleration(&nu, &nu_dot, &mu, &f_exc, &f_t);
        for i in 0..6 {
            dx[PLATFORM_OFFSET + i] = nu_dot[i];
            dx[PLATFORM_OFFSET + 6 + i] = acc[i];
        }
        for i in 0..n {
            dx[RADIATION_OFFSET + i] = z_dot[i];
        }
    }
    Ok(dx)
}

fn check_finite(x: &DVector<f64>, t: f64) -> Result<(), EngineError> {
    if x.iter().all(|v| v.is_finite()) {
        return Ok(());
    }
    let bad: Vec<usize> = x
        .iter()
        .enumerate()
        .filter_map(|(i, v)| (!v.is_finite()).then_some(i))
        .collect();
    Err(EngineError::NonFiniteState { t, diagnostic: format!("non-finite entries at indices {bad:?}") })
}

fn steps_per_control(cfg: &SimConfig) -> Result<usize, EngineError> {
    if !(cfg.dt > 0.0) {
        return Err(EngineError::InvalidConfig(String::from("dt must be positive")));
    }
    let ratio = cfg.control_period / cfg.dt;
    let steps = round(ratio);
    if steps < 1.0 || fabs(ratio - steps) > 1e-9 * ratio.max(1.0) {
        return Err(EngineError::InvalidConfig(format!(
            "control_period ({}) must be an integer multiple of dt ({})",
            cfg.control_period, cfg.dt
        )));
    }
    Ok(steps as usize)
}

/// Runs a full deterministic simulation.
///
/// The wave excitation (when a scenario is supplied and the platform is
/// coupled) is synthesized up front; the controller runs at the control
/// period with zero-order-held steering; every module error is surfaced in
/// the event log or, for hard aborts, returned as the run error.
pub fn run(cfg: &SimConfig) -> Result<SimRecord, EngineError> {
    let steps = steps_per_control(cfg)?;
    let n_control = round(cfg.duration / cfg.control_period) as usize;

    let waves = match (&cfg.waves, &cfg.platform) {
        (Some(w), Some(_)) if w.hs > 0.0 => {
            Some(synthesize(w, cfg.duration + cfg.control_period, cfg.dt)?)
        }
        _ => None,
    };

    let n_rad = cfg.platform.as_ref().map_or(0, |p| p.model.radiation.order());
    let mut x = DVector::zeros(RADIATION_OFFSET + n_rad);
    x[0] = cfg.initial_kite.theta;
    x[1] = cfg.initial_kite.phi;
    x[2] = cfg.initial_kite.r;
    x[3] = cfg.initial_kite.theta_dot;
    x[4] = cfg.initial_kite.phi_dot;
    x[5] = cfg.initial_kite.r_dot;
    if let Some(setup) = &cfg.platform {
        if let Some(init) = &setup.initial {
            for i in 0..6 {
                x[PLATFORM_OFFSET + i] = init.nu[i];
                x[PLATFORM_OFFSET + 6 + i] = init.nu_dot[i];
            }
            for i in 0..init.radiation_state.len().min(n_rad) {
                x[RADIATION_OFFSET + i] = init.radiation_state[i];
            }
        }
    }

    let mut controller =
        FlightController::new(cfg.targets, cfg.controller, cfg.mode, cfg.planner);

    let mut record = SimRecord {
        sample_dt: cfg.control_period,
        time: Vec::with_capacity(n_control + 1),
        kite: Vec::with_capacity(n_control + 1),
        platform_nu: Vec::with_capacity(n_control + 1),
        tether_force: Vec::with_capacity(n_control + 1),
        delta: Vec::with_capacity(n_control + 1),
        active: Vec::with_capacity(n_control + 1),
        events: Vec::new(),
        seed: cfg.seed,
    };

    let mut overloaded = false;
    let mut course_lost = false;
    let mut rotation_warned = false;

    for k in 0..=n_control {
        let t = k as f64 * cfg.control_period;
        let kite = kite_from_vec(&x);
        let coupled = cfg.platform.is_some();
        let length = cfg.tether_mode.length_at(t);

        let ctl = controller.step(t, &kite, length);
        if let Some(to) = ctl.switched {
            record.events.push(SimEvent::TargetSwitch { t, to });
        }
        if let Some(u) = ctl.planner_update {
            record.events.push(SimEvent::PlannerUpdate { t, v_bar: u.v_bar, delta_phi: u.delta_phi });
        }
        if let Some(reason) = ctl.planner_hold {
            record.events.push(SimEvent::PlannerHold { t, reason });
        }
        if ctl.course_undefined && !course_lost {
            record.events.push(SimEvent::CourseUndefined { t });
        }
        course_lost = ctl.course_undefined;

        let wrench = traction_wrench(&kite.position(), &platform_disp(&x, coupled), &cfg.tether, length)
            .map_err(|source| EngineError::Tether { t, source })?;
        if cfg.tether.breaking_exceeded(wrench.magnitude) {
            if !overloaded {
                record.events.push(SimEvent::TetherOverload { t, force: wrench.magnitude });
            }
            overloaded = true;
        } else {
            overloaded = false;
        }
        if coupled && !rotation_warned {
            let rot = libm::sqrt(
                x[PLATFORM_OFFSET + 3].powi(2)
                    + x[PLATFORM_OFFSET + 4].powi(2)
                    + x[PLATFORM_OFFSET + 5].powi(2),
            );
            if rot > ROTATION_WARN {
                record.events.push(SimEvent::LargeRotation { t, angle: rot });
                rotation_warned = true;
            }
        }

        record.time.push(t);
        record.kite.push(kite);
        record.platform_nu.push(Vector6::from_iterator((0..6).map(|i| x[PLATFORM_OFFSET + i])));
        record.tether_force.push(wrench.force_on_platform);
        record.delta.push(ctl.delta);
        record.active.push(ctl.active);

        if k == n_control {
            break;
        }
        for i in 0..steps {
            let ti = t + i as f64 * cfg.dt;
            x = rk4_step(&x, ti, cfg.dt, |x, tau| derivative(x, tau, cfg, waves.as_ref(), ctl.delta))?;
            check_finite(&x, ti + cfg.dt)?;
        }
    }
    Ok(record)
}

/// One sweep case: fixed nominal length and controller mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCase {
    pub length: f64,
    pub mode: ControllerMode,
}

/// Cross product of lengths and modes, lengths-major.
pub fn sweep_cases(lengths: &[f64], modes: &[ControllerMode]) -> Vec<SweepCase> {
    let mut out = Vec::with_capacity(lengths.len() * modes.len());
    for &mode in modes {
        for &length in lengths {
            out.push(SweepCase { length, mode });
        }
    }
    out
}

/// Derives the per-case configuration: fixed length, case mode, initial
/// radial distance tracking the new length, shared wave seed.
pub fn config_for_case(base: &SimConfig, case: &SweepCase) -> SimConfig {
    let mut cfg = base.clone();
    cfg.tether_mode = TetherMode::FixedLength(case.length);
    cfg.mode = case.mode;
    let scale = case.length / base.tether_mode.length_at(0.0);
    cfg.initial_kite.r = base.initial_kite.r * scale;
    cfg
}

/// Convenience wrapper around a full wrench evaluation at a recorded state
/// (used by decoupling and bookkeeping tests).
pub fn wrench_at(
    kite: &KiteState,
    platform_nu: &Vector6<f64>,
    cfg: &SimConfig,
    t: f64,
) -> Result<TetherWrench, TetherError> {
    let disp = Vector3::new(platform_nu[0], platform_nu[1], platform_nu[2]);
    traction_wrench(&kite.position(), &disp, &cfg.tether, cfg.tether_mode.length_at(t))
}
