//! Figure-eight flight control: two-target-point navigation with a
//! proportional steering law, plus the resonance-avoiding target-point
//! planner.
//!
//! The navigation layer switches the active target on azimuth thresholds
//! (with hysteresis) and tracks the course "velocity angle"
//! `γ = atan2(φ̇ cos θ, θ̇)`. The planner resizes the target-point spread
//! `Δφ` from the measured average kite speed so that the figure-eight
//! repetition frequency locks to a prescribed value away from the platform
//! resonances.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use libm::{asin, atan2, cos, remainder, sin};
use nalgebra::Vector3;
use thiserror::Error;

use crate::kite::KiteState;

/// Smallest admissible planner output for `Δφ*`, rad.
pub const DELTA_PHI_FLOOR: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ControlError {
    /// Course angle undefined: both tangent-plane velocity components
    /// (or both target offsets) vanish.
    #[error("undefined course: tangent-plane direction is degenerate")]
    UndefinedCourse,
    /// The turn-radius term exceeds the unit circle: `2R/L + sin θ_− > 1`.
    #[error("planner geometry error: asin argument {arg:.4} > 1")]
    Geometry { arg: f64 },
    /// Planned `Δφ*` fell below [`DELTA_PHI_FLOOR`].
    #[error("planned path too narrow: delta_phi = {delta_phi:.4} rad")]
    PathTooNarrow { delta_phi: f64 },
    /// Not enough trajectory history for the requested estimate.
    #[error("insufficient history")]
    InsufficientHistory,
}

/// Which target point is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSide {
    Minus,
    Plus,
}

/// The two navigation target points in the `(θ, φ)` plane, `φ_− < φ_+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetPoints {
    pub theta_minus: f64,
    pub phi_minus: f64,
    pub theta_plus: f64,
    pub phi_plus: f64,
}

impl TargetPoints {
    pub fn new(p_minus: (f64, f64), p_plus: (f64, f64)) -> Self {
        Self {
            theta_minus: p_minus.0,
            phi_minus: p_minus.1,
            theta_plus: p_plus.0,
            phi_plus: p_plus.1,
        }
    }

    /// `(θ_a, φ_a)` of the given side.
    pub fn of(&self, side: TargetSide) -> (f64, f64) {
        match side {
            TargetSide::Minus => (self.theta_minus, self.phi_minus),
            TargetSide::Plus => (self.theta_plus, self.phi_plus),
        }
    }
}

impl Default for TargetPoints {
    fn default() -> Self {
        Self::new((0.6, -0.4), (0.6, 0.4))
    }
}

/// Proportional steering parameters and the active-target memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub active_target: TargetSide,
    /// Proportional gain on the course error.
    pub k_p: f64,
    /// Saturation bound on the steering input.
    pub delta_limit: f64,
}

impl Default for ControllerState {
    fn default() -> Self {
        Self { active_target: TargetSide::Plus, k_p: 0.05, delta_limit: 1.0 }
    }
}

/// Planner parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerConfig {
    /// Desired figure-eight repetition frequency, Hz.
    pub f_star: f64,
    /// Kite turning radius `R`, m (about three wingspans).
    pub turn_radius: f64,
    /// Elevation of the planned target points, rad.
    pub theta_min: f64,
    /// Lower target elevation used in the `Δθ` estimate, rad.
    pub theta_minus: f64,
    /// Number of completed figure-eights in the rolling speed average.
    pub v_bar_window: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { f_star: 0.0305, turn_radius: 50.0, theta_min: 0.6, theta_minus: 0.6, v_bar_window: 3 }
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = remainder(x, 2.0 * core::f64::consts::PI);
    if w <= -core::f64::consts::PI {
        w + 2.0 * core::f64::consts::PI
    } else {
        w
    }
}

/// Course (velocity) angle `γ = atan2(φ̇ cos θ, θ̇)` in `(−π, π]`.
pub fn velocity_angle(state: &KiteState) -> Result<f64, ControlError> {
    let north = state.theta_dot;
    let east = state.phi_dot * cos(state.theta);
    if north.abs() < 1e-9 && east.abs() < 1e-9 {
        return Err(ControlError::UndefinedCourse);
    }
    Ok(atan2(east, north))
}

/// Active target point selection with hysteresis:
/// below `φ_−` aim at `P_+`, above `φ_+` aim at `P_−`, otherwise keep the
/// previous target.
pub fn select_target(phi: f64, tp: &TargetPoints, prev: TargetSide) -> TargetSide {
    if phi < tp.phi_minus {
        TargetSide::Plus
    } else if phi > tp.phi_plus {
        TargetSide::Minus
    } else {
        prev
    }
}

/// Reference course pointing at the active target:
/// `γ_ref = atan2((φ_a − φ) cos θ, θ_a − θ)`.
pub fn gamma_ref(state: &KiteState, active: (f64, f64)) -> Result<f64, ControlError> {
    let north = active.0 - state.theta;
    let east = (active.1 - state.phi) * cos(state.theta);
    if north.abs() < 1e-12 && east.abs() < 1e-12 {
        return Err(ControlError::UndefinedCourse);
    }
    Ok(atan2(east, north))
}

/// Proportional steering with error wrapping and saturation:
/// `δ = clamp(k_p · wrap(γ_ref − γ), ±delta_limit)`.
pub fn steering(gamma: f64, gamma_ref: f64, cs: &ControllerState) -> f64 {
    let err = wrap_angle(gamma_ref - gamma);
    (cs.k_p * err).clamp(-cs.delta_limit, cs.delta_limit)
}

/// Target-point spread for the desired path frequency:
///
/// ```text
/// Δφ* = v̄_K / (2 f* L) − asin(2R/L + sin θ_−) + θ_min
/// ```
///
/// For fixed speed and frequency, `Δφ*` shrinks as the tether gets longer.
pub fn delta_phi_star(
    v_bar: f64,
    cfg: &PlannerConfig,
    length: f64,
    theta_minus: f64,
) -> Result<f64, ControlError> {
    let arg = 2.0 * cfg.turn_radius / length + sin(theta_minus);
    if arg > 1.0 {
        return Err(ControlError::Geometry { arg });
    }
    let dphi = v_bar / (2.0 * cfg.f_star * length) - asin(arg) + cfg.theta_min;
    if dphi <= DELTA_PHI_FLOOR {
        return Err(ControlError::PathTooNarrow { delta_phi: dphi });
    }
    Ok(dphi)
}

/// Target points symmetric about the x-axis: `P_∓ = (θ_min, ∓Δφ/2)`.
pub fn plan_targets(delta_phi: f64, theta_min: f64) -> TargetPoints {
    debug_assert!(delta_phi > 0.0);
    TargetPoints::new((theta_min, -0.5 * delta_phi), (theta_min, 0.5 * delta_phi))
}

/// Average speed along a sampled inertial path: arc length over elapsed
/// time.
pub fn estimate_v_bar(samples: &[(f64, Vector3<f64>)]) -> Result<f64, ControlError> {
    if samples.len() < 2 {
        return Err(ControlError::InsufficientHistory);
    }
    let elapsed = samples[samples.len() - 1].0 - samples[0].0;
    if elapsed <= 0.0 {
        return Err(ControlError::InsufficientHistory);
    }
    let mut arc = 0.0;
    for w in samples.windows(2) {
        arc += (w[1].1 - w[0].1).norm();
    }
    Ok(arc / elapsed)
}

/// Figure-eight repetition frequency from an azimuth series, by replaying
/// the target-switch hysteresis and counting full
/// MINUS→PLUS→MINUS cycles. Needs at least three completed cycles.
pub fn measure_traj_frequency(
    phi: &[f64],
    dt: f64,
    phi_minus: f64,
    phi_plus: f64,
) -> Result<f64, ControlError> {
    let tp = TargetPoints::new((0.0, phi_minus), (0.0, phi_plus));
    let mut side = TargetSide::Plus;
    let mut plus_switch_times = Vec::new();
    for (i, &p) in phi.iter().enumerate() {
        let next = select_target(p, &tp, side);
        if next != side {
            if next == TargetSide::Plus {
                plus_switch_times.push(i as f64 * dt);
            }
            side = next;
        }
    }
    frequency_from_cycle_times(&plus_switch_times)
}

/// Frequency from the timestamps of equivalent cycle events (e.g. every
/// switch to the PLUS target): `(n − 1) / (t_n − t_1)`.
pub fn frequency_from_cycle_times(times: &[f64]) -> Result<f64, ControlError> {
    if times.len() < 4 {
        // Three full cycles require four boundary events.
        return Err(ControlError::InsufficientHistory);
    }
    let elapsed = times[times.len() - 1] - times[0];
    if elapsed <= 0.0 {
        return Err(ControlError::InsufficientHistory);
    }
    Ok((times.len() - 1) as f64 / elapsed)
}

/// Controller operating mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerMode {
    /// Fixed user-supplied target points.
    Baseline,
    /// Target spread re-planned once per completed figure-eight.
    ResonanceAvoid,
}

/// What happened during one controller step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlStep {
    pub delta: f64,
    pub active: TargetSide,
    /// Set when the active target switched this step.
    pub switched: Option<TargetSide>,
    /// Set when the planner replanned the targets this step.
    pub planner_update: Option<PlannerUpdate>,
    /// Planner input became infeasible; previous targets kept.
    pub planner_hold: Option<ControlError>,
    /// The course angle was undefined; previous steering held.
    pub course_undefined: bool,
}

/// A successful planner update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerUpdate {
    pub v_bar: f64,
    pub delta_phi: f64,
    pub targets: TargetPoints,
}

/// Deterministic controller state machine advanced once per control period.
#[derive(Debug, Clone)]
pub struct FlightController {
    pub targets: TargetPoints,
    pub state: ControllerState,
    pub mode: ControllerMode,
    pub planner: PlannerConfig,
    delta: f64,
    last_sample: Option<(f64, Vector3<f64>)>,
    eight_arc: f64,
    eight_start: f64,
    eight_open: bool,
    history: VecDeque<(f64, f64)>,
}

impl FlightController {
    pub fn new(
        targets: TargetPoints,
        state: ControllerState,
        mode: ControllerMode,
        planner: PlannerConfig,
    ) -> Self {
        Self {
            targets,
            state,
            mode,
            planner,
            delta: 0.0,
            last_sample: None,
            eight_arc: 0.0,
            eight_start: 0.0,
            eight_open: false,
            history: VecDeque::new(),
        }
    }

    /// Currently held steering input.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Rolling average speed over the last completed eights, if any.
    pub fn v_bar(&self) -> Option<f64> {
        if self.history.is_empty() {
            return None;
        }
        let (arc, dur) = self
            .history
            .iter()
            .fold((0.0, 0.0), |(a, d), &(arc, dur)| (a + arc, d + dur));
        (dur > 0.0).then(|| arc / dur)
    }

    /// Advances the controller by one digital step at time `t`.
    ///
    /// Accumulates path length, runs the target-switch algorithm, replans
    /// once per completed figure-eight (on the switch to PLUS) in
    /// resonance-avoid mode, and updates the held steering input.
    pub fn step(&mut self, t: f64, state: &KiteState, tether_length: f64) -> ControlStep {
        let pos = state.position();
        if let Some((_, prev)) = self.last_sample {
            self.eight_arc += (pos - prev).norm();
        }
        self.last_sample = Some((t, pos));

        let mut out = ControlStep {
            delta: self.delta,
            active: self.state.active_target,
            switched: None,
            planner_update: None,
            planner_hold: None,
            course_undefined: false,
        };

        let next = select_target(state.phi, &self.targets, self.state.active_target);
        if next != self.state.active_target {
            self.state.active_target = next;
            out.switched = Some(next);
            if next == TargetSide::Plus {
                if self.eight_open {
                    // One full eight completed between consecutive switches
                    // to PLUS.
                    self.history.push_back((self.eight_arc, t - self.eight_start));
                    while self.history.len() > self.planner.v_bar_window.max(1) {
                        self.history.pop_front();
                    }
                    if self.mode == ControllerMode::ResonanceAvoid {
                        self.replan(tether_length, &mut out);
                    }
                }
                self.eight_open = true;
                self.eight_arc = 0.0;
                self.eight_start = t;
            }
        }
        out.active = self.state.active_target;

        match velocity_angle(state)
            .and_then(|g| gamma_ref(state, self.targets.of(self.state.active_target)).map(|gr| (g, gr)))
        {
            Ok((gamma, gref)) => {
                self.delta = steering(gamma, gref, &self.state);
            }
            Err(_) => {
                out.course_undefined = true;
            }
        }
        out.delta = self.delta;
        out
    }

    fn replan(&mut self, tether_length: f64, out: &mut ControlStep) {
        let Some(v_bar) = self.v_bar() else {
            out.planner_hold = Some(ControlError::InsufficientHistory);
            return;
        };
        match delta_phi_star(v_bar, &self.planner, tether_length, self.planner.theta_minus) {
            Ok(delta_phi) => {
                self.targets = plan_targets(delta_phi, self.planner.theta_min);
                out.planner_update = Some(PlannerUpdate { v_bar, delta_phi, targets: self.targets });
            }
            Err(e) => {
                out.planner_hold = Some(e);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn state_with_rates(theta: f64, theta_dot: f64, phi_dot: f64) -> KiteState {
        KiteState::new(theta, 0.0, 900.0, theta_dot, phi_dot, 0.0)
    }

    #[test]
    fn velocity_angle_basic_directions() {
        assert_eq!(velocity_angle(&state_with_rates(0.6, 0.05, 0.0)).unwrap(), 0.0);
        let g = velocity_angle(&state_with_rates(PI / 3.0, 0.01, 0.02)).unwrap();
        assert_relative_eq!(g, FRAC_PI_4, epsilon = 1e-12);
        // Four-quadrant: pure negative north is π, not 0.
        assert_relative_eq!(velocity_angle(&state_with_rates(0.6, -0.01, 0.0)).unwrap(), PI, epsilon = 1e-12);
        assert_eq!(
            velocity_angle(&state_with_rates(0.6, 0.0, 0.0)),
            Err(ControlError::UndefinedCourse)
        );
    }

    #[test]
    fn select_target_switching_branches() {
        let tp = TargetPoints::default();
        assert_eq!(select_target(-0.5, &tp, TargetSide::Minus), TargetSide::Plus);
        assert_eq!(select_target(0.5, &tp, TargetSide::Plus), TargetSide::Minus);
        assert_eq!(select_target(0.0, &tp, TargetSide::Plus), TargetSide::Plus);
        assert_eq!(select_target(0.0, &tp, TargetSide::Minus), TargetSide::Minus);
    }

    #[test]
    fn select_target_hysteresis_inside_band() {
        let tp = TargetPoints::default();
        for prev in [TargetSide::Minus, TargetSide::Plus] {
            for i in 0..100 {
                let phi = -0.4 + 0.8 * i as f64 / 99.0;
                assert_eq!(select_target(phi, &tp, prev), prev);
            }
        }
    }

    #[test]
    fn gamma_ref_examples() {
        let s = KiteState::new(0.6, 0.0, 900.0, 0.0, 0.0, 0.0);
        assert_eq!(gamma_ref(&s, (0.9, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(gamma_ref(&s, (0.6, 0.4)).unwrap(), FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!(gamma_ref(&s, (0.6, -0.4)).unwrap(), -FRAC_PI_2, epsilon = 1e-12);
        assert_eq!(gamma_ref(&s, (0.6, 0.0)), Err(ControlError::UndefinedCourse));
    }

    #[test]
    fn steering_wrap_and_saturation() {
        let cs = ControllerState { active_target: TargetSide::Plus, k_p: 0.05, delta_limit: 1.0 };
        assert_eq!(steering(0.3, 0.3, &cs), 0.0);
        // Error of 3π/2 wraps to −π/2.
        let d = steering(0.0, 1.5 * PI, &cs);
        assert_relative_eq!(d, -0.05 * FRAC_PI_2, epsilon = 1e-12);
        let hot = ControllerState { k_p: 10.0, ..cs };
        assert_eq!(steering(0.0, 1.0, &hot), 1.0);
        assert_eq!(steering(1.0, 0.0, &hot), -1.0);
    }

    #[test]
    fn wrap_angle_range() {
        assert_relative_eq!(wrap_angle(1.5 * PI), -FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(PI), PI, epsilon = 1e-15);
        assert_relative_eq!(wrap_angle(-PI), PI, epsilon = 1e-15);
        for i in -20..20 {
            let x = i as f64 * 0.7;
            let w = wrap_angle(x);
            assert!(w > -PI && w <= PI);
            assert_abs_diff_eq!((x - w) % (2.0 * PI), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn delta_phi_star_reference_value() {
        let cfg = PlannerConfig { f_star: 0.0305, turn_radius: 50.0, theta_min: 0.6, theta_minus: 0.6, v_bar_window: 3 };
        let dphi = delta_phi_star(30.0, &cfg, 1000.0, 0.6).unwrap();
        assert_abs_diff_eq!(dphi, 0.365, epsilon = 5e-4);
    }

    #[test]
    fn delta_phi_star_round_trip_identity() {
        let cfg = PlannerConfig::default();
        for &(v, l) in &[(30.0, 1000.0), (40.0, 700.0), (38.0, 1300.0)] {
            let dphi = delta_phi_star(v, &cfg, l, cfg.theta_minus).unwrap();
            let dtheta = asin(2.0 * cfg.turn_radius / l + sin(cfg.theta_minus)) - cfg.theta_min;
            let f = v / (2.0 * (dtheta + dphi) * l);
            assert_relative_eq!(f, cfg.f_star, epsilon = 1e-14, max_relative = 1e-14);
        }
    }

    #[test]
    fn delta_phi_star_decreases_with_length() {
        let cfg = PlannerConfig::default();
        let mut prev = f64::INFINITY;
        for &l in &[600.0, 800.0, 1000.0, 1200.0, 1400.0] {
            let dphi = delta_phi_star(38.0, &cfg, l, cfg.theta_minus).unwrap();
            assert!(dphi < prev, "L={l}: {dphi} !< {prev}");
            prev = dphi;
        }
    }

    #[test]
    fn delta_phi_star_error_paths() {
        let cfg = PlannerConfig::default();
        // 2R/L + sin θ− > 1 for very short tethers.
        assert!(matches!(
            delta_phi_star(30.0, &cfg, 200.0, 0.6),
            Err(ControlError::Geometry { .. })
        ));
        // Tiny speed collapses the path below the floor.
        assert!(matches!(
            delta_phi_star(5.0, &cfg, 1000.0, 0.6),
            Err(ControlError::PathTooNarrow { .. })
        ));
    }

    #[test]
    fn plan_targets_symmetry() {
        let tp = plan_targets(0.8, 0.6);
        assert_eq!(tp, TargetPoints::new((0.6, -0.4), (0.6, 0.4)));
        let tp = plan_targets(0.365, 0.6);
        assert_relative_eq!(tp.phi_plus, 0.1825, epsilon = 1e-12);
        for i in 1..50 {
            let dphi = i as f64 * 0.02;
            let tp = plan_targets(dphi, 0.6);
            assert_eq!(tp.phi_minus, -tp.phi_plus);
        }
    }

    #[test]
    fn v_bar_circle_and_line() {
        // Circle of radius ρ at angular rate ω: speed ρω.
        let (rho, omega) = (120.0, 0.21);
        let samples: Vec<(f64, Vector3<f64>)> = (0..2000)
            .map(|i| {
                let t = i as f64 * 0.01;
                (t, Vector3::new(rho * cos(omega * t), rho * sin(omega * t), 5.0))
            })
            .collect();
        assert_relative_eq!(estimate_v_bar(&samples).unwrap(), rho * omega, max_relative = 5e-3);

        let line: Vec<(f64, Vector3<f64>)> =
            (0..100).map(|i| (i as f64, Vector3::new(3.0 * i as f64, 0.0, 0.0))).collect();
        assert_relative_eq!(estimate_v_bar(&line).unwrap(), 3.0, epsilon = 1e-12);

        assert_eq!(estimate_v_bar(&[]), Err(ControlError::InsufficientHistory));
    }

    #[test]
    fn traj_frequency_of_synthetic_sinusoid() {
        let f0 = 0.03;
        let dt = 0.1;
        let n = (400.0 / dt) as usize;
        let phi: Vec<f64> = (0..n).map(|i| 0.4 * sin(2.0 * PI * f0 * i as f64 * dt)).collect();
        let f = measure_traj_frequency(&phi, dt, -0.39, 0.39).unwrap();
        assert_abs_diff_eq!(f, f0, epsilon = 1.0 / 400.0);

        let flat = alloc::vec![0.1; 1000];
        assert_eq!(
            measure_traj_frequency(&flat, dt, -0.39, 0.39),
            Err(ControlError::InsufficientHistory)
        );
    }

    #[test]
    fn traj_frequency_invariant_to_dt_halving() {
        let f0 = 0.03;
        let build = |dt: f64| -> Vec<f64> {
            let n = (500.0 / dt) as usize;
            (0..n).map(|i| 0.4 * sin(2.0 * PI * f0 * i as f64 * dt)).collect()
        };
        let fa = measure_traj_frequency(&build(0.1), 0.1, -0.39, 0.39).unwrap();
        let fb = measure_traj_frequency(&build(0.05), 0.05, -0.39, 0.39).unwrap();
        assert_relative_eq!(fa, fb, max_relative = 2e-3);
    }

    #[test]
    fn controller_replans_once_per_eight() {
        // Kinematic azimuth oscillation crossing both thresholds; the
        // planner must fire exactly on the switches to PLUS after the first
        // complete eight, with targets from the measured speed.
        let planner = PlannerConfig { f_star: 0.0305, turn_radius: 50.0, theta_min: 0.6, theta_minus: 0.6, v_bar_window: 2 };
        let mut ctl = FlightController::new(
            TargetPoints::default(),
            ControllerState::default(),
            ControllerMode::ResonanceAvoid,
            planner,
        );
        let dt = 0.1;
        let f0 = 0.03;
        let mut updates = 0;
        let mut last_update: Option<PlannerUpdate> = None;
        for i in 0..(200.0 / dt) as usize {
            let t = i as f64 * dt;
            let phi = 0.45 * sin(2.0 * PI * f0 * t);
            let state = KiteState::new(0.7, phi, 1000.0, 0.01, 0.02, 0.0);
            let out = ctl.step(t, &state, 1000.0);
            if let Some(u) = out.planner_update {
                updates += 1;
                last_update = Some(u);
            }
        }
        // ~6 cycles in 200 s at 0.03 Hz; first PLUS switch only opens the eight.
        assert!(updates >= 4, "updates = {updates}");
        let u = last_update.unwrap();
        let expected = delta_phi_star(u.v_bar, &planner, 1000.0, 0.6).unwrap();
        assert_relative_eq!(u.delta_phi, expected, epsilon = 1e-12);
        assert_eq!(ctl.targets, plan_targets(expected, 0.6));
    }
}
