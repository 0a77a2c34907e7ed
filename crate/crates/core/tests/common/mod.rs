#![allow(dead_code)]

//! Shared reference configurations for the integration tests: a desk-scale
//! kite/tether setup plus a spar-like platform with sway/surge resonance
//! near 0.0185 Hz and heave near 0.14 Hz.

use nalgebra::{Matrix6, Vector3, Vector6};
use sparkite_core::control::{ControllerMode, ControllerState, PlannerConfig, TargetPoints, TargetSide};
use sparkite_core::engine::{PlatformSetup, SimConfig, TetherMode};
use sparkite_core::kite::{AeroParams, KiteState};
use sparkite_core::platform::{BandPassKernel, HydroMatrices, PlatformModel, RadiationStateSpace};
use sparkite_core::tether::TetherConfig;
use sparkite_core::waves::WaveScenario;

pub fn diag6(v: [f64; 6]) -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::from_column_slice(&v))
}

/// Spar-like coefficient set: 760 t hull, waterplane heave stiffness
/// ρg·π·5², soft catenary mooring tuned for the reference resonances.
pub fn spar_matrices() -> HydroMatrices {
    HydroMatrices {
        mass: diag6([760e3, 760e3, 760e3, 1.5e8, 1.5e8, 1.1e7]),
        added_mass_inf: diag6([700e3, 700e3, 2.35e5, 1.5e8, 1.5e8, 1e6]),
        hydrostatic: diag6([0.0, 0.0, 7.8976e5, 1.46e7, 1.46e7, 0.0]),
        mooring_mass: diag6([4e4, 4e4, 4e4, 1e5, 1e5, 1e5]),
        mooring_damping: diag6([1e4, 1e4, 5e3, 1e5, 1e5, 1e4]),
        mooring_stiffness: diag6([2.03e4, 2.03e4, 5e3, 1e5, 1e5, 5e4]),
    }
}

pub fn spar_radiation() -> RadiationStateSpace {
    RadiationStateSpace::from_band_pass(&[
        BandPassKernel { omega0: 0.1162, zeta: 0.7, gain: 1.63e4 },
        BandPassKernel { omega0: 0.1162, zeta: 0.7, gain: 1.63e4 },
        BandPassKernel { omega0: 0.8796, zeta: 0.7, gain: 2.23e5 },
        BandPassKernel { omega0: 0.22, zeta: 0.7, gain: 5.1e6 },
        BandPassKernel { omega0: 0.22, zeta: 0.7, gain: 5.1e6 },
        BandPassKernel { omega0: 0.3, zeta: 0.7, gain: 1e5 },
    ])
}

pub fn spar_platform() -> PlatformSetup {
    PlatformSetup {
        model: PlatformModel::new(spar_matrices(), spar_radiation()).unwrap(),
        initial: None,
    }
}

/// Calibrated drag coefficient of the desk-scale setup (sets the average
/// kite speed near 30 m/s at L = 900 m).
pub const CALIBRATED_DRAG: f64 = 0.165;

/// Planner constants trimmed on the desk-scale trajectories: the effective
/// turn radius of this controller tuning, and a lowered θ_− absorbing the
/// difference between the Manhattan-style path-length estimate and the
/// actual (shorter, diagonal) figure-eight arcs.
pub fn calibrated_planner() -> PlannerConfig {
    PlannerConfig { f_star: 0.0305, turn_radius: 25.0, theta_min: 0.6, theta_minus: 0.5, v_bar_window: 3 }
}

/// Onshore (frozen platform) baseline configuration at the given nominal
/// tether length.
pub fn onshore_config(length: f64) -> SimConfig {
    SimConfig {
        dt: 0.01,
        duration: 900.0,
        control_period: 0.1,
        wind: Vector3::new(8.5, 0.0, 0.0),
        tether_mode: TetherMode::FixedLength(length),
        kite_mass: 90.0,
        aero: AeroParams { drag_coeff: CALIBRATED_DRAG, ..AeroParams::default() },
        tether: TetherConfig::default(),
        radial_only_traction: false,
        initial_kite: KiteState::new(0.7, 0.05, length, 0.0, 0.0, 0.0),
        targets: TargetPoints::default(),
        controller: ControllerState { active_target: TargetSide::Plus, k_p: 1.0, delta_limit: 1.0 },
        mode: ControllerMode::Baseline,
        planner: calibrated_planner(),
        platform: None,
        waves: None,
        seed: 20_240_901,
    }
}

/// Offshore configuration: coupled spar platform, wave A by default.
pub fn offshore_config(length: f64) -> SimConfig {
    let mut cfg = onshore_config(length);
    cfg.platform = Some(spar_platform());
    cfg.waves = Some(WaveScenario::new(0.5, 3.7, 3.1, cfg.seed));
    cfg
}

/// Average kite speed sampled from a record over the steady window.
pub fn record_v_bar(record: &sparkite_core::SimRecord, transient_eights: usize) -> Option<f64> {
    let start = record.steady_start_index(transient_eights)?;
    let samples: Vec<(f64, Vector3<f64>)> = record.time[start..]
        .iter()
        .zip(&record.kite[start..])
        .map(|(&t, k)| (t, k.position()))
        .collect();
    sparkite_core::control::estimate_v_bar(&samples).ok()
}
