//! Point-mass kite model in the spherical tether frame.
//!
//! The kite position is described by the elevation angle `theta`, the
//! azimuth `phi` and the radial distance `r` from the inertial origin:
//! `p = r (cos θ cos φ, cos θ sin φ, sin θ)`. Forces are expressed on the
//! local unit vectors `(e_θ, e_φ, e_r)` where `e_θ` points down-meridian
//! (towards decreasing elevation), `e_φ` points east and `e_r` radially
//! outward.

use libm::{cos, sin};
use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::GRAVITY;

/// Minimum apparent wind speed below which the aerodynamic model is
/// considered stalled, m/s.
pub const STALL_SPEED: f64 = 0.1;

/// `|cos θ|` threshold below which the azimuth equation degenerates
/// (kite at the zenith pole).
pub const POLE_EPS: f64 = 1e-6;

/// Tether drag coefficient referred to the tether frontal area.
pub const TETHER_DRAG_COEFF: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KiteError {
    /// Apparent wind speed at or below [`STALL_SPEED`]; the aerodynamic
    /// force direction is no longer defined.
    #[error("stall: apparent wind speed {airspeed:.3} m/s is below {STALL_SPEED} m/s")]
    Stall { airspeed: f64 },
    /// Kite at the zenith pole where the azimuth equation degenerates.
    #[error("polar singularity: |cos theta| < {POLE_EPS} at theta = {theta:.6} rad")]
    Singularity { theta: f64 },
}

/// Kite state in spherical coordinates: elevation, azimuth, radial
/// distance and their rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KiteState {
    /// Elevation above the horizontal, rad.
    pub theta: f64,
    /// Azimuth around the vertical axis, rad.
    pub phi: f64,
    /// Distance from the inertial origin, m. Must stay positive.
    pub r: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub r_dot: f64,
}

impl KiteState {
    pub fn new(theta: f64, phi: f64, r: f64, theta_dot: f64, phi_dot: f64, r_dot: f64) -> Self {
        Self { theta, phi, r, theta_dot, phi_dot, r_dot }
    }

    /// Cartesian position in the inertial frame.
    pub fn position(&self) -> Vector3<f64> {
        let (st, ct) = (sin(self.theta), cos(self.theta));
        let (sp, cp) = (sin(self.phi), cos(self.phi));
        Vector3::new(self.r * ct * cp, self.r * ct * sp, self.r * st)
    }

    /// Cartesian inertial velocity,
    /// `ṙ e_r − r θ̇ e_θ + r φ̇ cos θ e_φ`.
    pub fn velocity(&self) -> Vector3<f64> {
        let b = local_basis(self.theta, self.phi);
        let ct = cos(self.theta);
        b.column(2) * self.r_dot - b.column(0) * (self.r * self.theta_dot)
            + b.column(1) * (self.r * self.phi_dot * ct)
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite()
            && self.phi.is_finite()
            && self.r.is_finite()
            && self.theta_dot.is_finite()
            && self.phi_dot.is_finite()
            && self.r_dot.is_finite()
    }
}

/// Aerodynamic parameters of the kite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroParams {
    /// Effective kite area, m².
    pub area: f64,
    pub lift_coeff: f64,
    pub drag_coeff: f64,
    /// Air density, kg/m³.
    pub air_density: f64,
    /// Roll of the lift vector per unit steering input, rad.
    pub steering_gain: f64,
    /// Wingspan, m; sets the planner turn radius.
    pub wingspan: f64,
}

impl Default for AeroParams {
    fn default() -> Self {
        Self {
            area: 360.0,
            lift_coeff: 0.9,
            drag_coeff: 0.1,
            air_density: 1.225,
            steering_gain: 0.1,
            wingspan: 50.0 / 3.0,
        }
    }
}

/// Force components on the local basis `(e_θ, e_φ, e_r)`, N.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalForces {
    pub f_theta: f64,
    pub f_phi: f64,
    pub f_r: f64,
}

impl LocalForces {
    pub fn new(f_theta: f64, f_phi: f64, f_r: f64) -> Self {
        Self { f_theta, f_phi, f_r }
    }

    /// Projects a Cartesian force onto the local basis.
    pub fn from_cartesian(basis: &Matrix3<f64>, f: &Vector3<f64>) -> Self {
        Self {
            f_theta: basis.column(0).dot(f),
            f_phi: basis.column(1).dot(f),
            f_r: basis.column(2).dot(f),
        }
    }

    /// Cartesian vector `f_θ e_θ + f_φ e_φ + f_r e_r`.
    pub fn to_cartesian(&self, basis: &Matrix3<f64>) -> Vector3<f64> {
        basis.column(0) * self.f_theta + basis.column(1) * self.f_phi + basis.column(2) * self.f_r
    }

    pub fn is_finite(&self) -> bool {
        self.f_theta.is_finite() && self.f_phi.is_finite() && self.f_r.is_finite()
    }
}

impl core::ops::Add for LocalForces {
    type Output = LocalForces;
    fn add(self, rhs: LocalForces) -> LocalForces {
        LocalForces::new(self.f_theta + rhs.f_theta, self.f_phi + rhs.f_phi, self.f_r + rhs.f_r)
    }
}

/// Local orthonormal basis `[e_θ | e_φ | e_r]` as matrix columns.
///
/// `e_r` is the unit position direction; `e_θ × e_φ = e_r` (determinant +1).
pub fn local_basis(theta: f64, phi: f64) -> Matrix3<f64> {
    let (st, ct) = (sin(theta), cos(theta));
    let (sp, cp) = (sin(phi), cos(phi));
    Matrix3::new(
        st * cp, -sp, ct * cp, //
        st * sp, cp, ct * sp, //
        -ct, 0.0, st,
    )
}

/// Gravity `(0, 0, -m g)` projected on the local basis:
/// `(m g cos θ, 0, −m g sin θ)`.
pub fn gravity_local(mass: f64, theta: f64) -> LocalForces {
    let w = mass * GRAVITY;
    LocalForces::new(w * cos(theta), 0.0, -w * sin(theta))
}

/// Fictitious (centrifugal + Coriolis) force of the rotating spherical
/// frame, such that the equations of motion take the form used by
/// [`kite_accelerations`].
///
/// Quadratic in the rates: scaling all rates by `s` scales the output
/// by `s²`.
pub fn apparent_local(state: &KiteState, mass: f64) -> LocalForces {
    let (st, ct) = (sin(state.theta), cos(state.theta));
    let KiteState { r, theta_dot: td, phi_dot: pd, r_dot: rd, .. } = *state;
    LocalForces::new(
        mass * (2.0 * rd * td + r * pd * pd * st * ct),
        mass * (2.0 * r * td * pd * st - 2.0 * rd * pd * ct),
        mass * (r * td * td + r * pd * pd * ct * ct),
    )
}

/// Aerodynamic force of the kite, including tether drag, projected on
/// the local basis.
///
/// The effective wind is `W_e = wind − v_kite − exit_velocity` (the exit
/// point velocity is a hook for platform-induced apparent wind and is
/// normally zero). Drag acts along `W_e` with
/// `C_D,eff = C_D + C_D,t d_t L / (4 A)`; lift is perpendicular to `W_e`,
/// obtained by rotating the in-plane component of `e_r` about `W_e` by
/// the roll angle `ψ = steering_gain · δ`.
pub fn aero_local(
    state: &KiteState,
    wind: &Vector3<f64>,
    platform_exit_velocity: &Vector3<f64>,
    params: &AeroParams,
    delta: f64,
    tether_length: f64,
    tether_diameter: f64,
) -> Result<LocalForces, KiteError> {
    let w_e = wind - state.velocity() - platform_exit_velocity;
    let airspeed = w_e.norm();
    if airspeed <= STALL_SPEED {
        return Err(KiteError::Stall { airspeed });
    }
    let w_hat = w_e / airspeed;

    let basis = local_basis(state.theta, state.phi);
    let e_r: Vector3<f64> = basis.column(2).into();

    // Lift direction: component of e_r orthogonal to the apparent wind.
    let mut lift_dir = e_r - w_hat * e_r.dot(&w_hat);
    let lift_norm = lift_dir.norm();
    if lift_norm < 1e-9 {
        // Apparent wind aligned with the radial direction; fall back to the
        // up-meridian tangent.
        lift_dir = -Vector3::from(basis.column(0));
        lift_dir -= w_hat * lift_dir.dot(&w_hat);
        lift_dir /= lift_dir.norm();
    } else {
        lift_dir /= lift_norm;
    }
    // Roll the lift vector about the apparent-wind axis (Rodrigues with
    // lift_dir ⟂ w_hat), handed so that positive steering turns the course
    // angle positive.
    let psi = params.steering_gain * delta;
    let lift_rot = lift_dir * cos(psi) + lift_dir.cross(&w_hat) * sin(psi);

    let cd_eff = params.drag_coeff
        + TETHER_DRAG_COEFF * tether_diameter * tether_length / (4.0 * params.area);
    let q = 0.5 * params.air_density * params.area * airspeed * airspeed;
    let f = lift_rot * (q * params.lift_coeff) + w_hat * (q * cd_eff);
    Ok(LocalForces::from_cartesian(&basis, &f))
}

/// Accelerations `(θ̈, φ̈, r̈)` from the total local force (external plus
/// [`apparent_local`]):
///
/// ```text
/// θ̈ = −F_θ / (m r),   φ̈ = F_φ / (m r cos θ),   r̈ = F_r / m
/// ```
///
/// The minus sign on `θ̈` reflects that `e_θ` points down-meridian while
/// `θ` grows upward.
pub fn kite_accelerations(
    forces: &LocalForces,
    mass: f64,
    r: f64,
    theta: f64,
) -> Result<(f64, f64, f64), KiteError> {
    debug_assert!(mass > 0.0 && r > 0.0);
    let ct = cos(theta);
    if fabs(ct) < POLE_EPS {
        return Err(KiteError::Singularity { theta });
    }
    Ok((
        -forces.f_theta / (mass * r),
        forces.f_phi / (mass * r * ct),
        forces.f_r / mass,
    ))
}

fn fabs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Cartesian acceleration reconstructed from spherical accelerations and
/// the current state:
///
/// ```text
/// p̈ = (r̈ − rθ̇² − rφ̇²cos²θ) e_r − (rθ̈ + 2ṙθ̇ + rφ̇² sinθ cosθ) e_θ
///     + (rφ̈ cosθ + 2ṙφ̇ cosθ − 2rθ̇φ̇ sinθ) e_φ
/// ```
///
/// Together with [`kite_accelerations`] this closes Newton's law: feeding
/// the projected external force plus [`apparent_local`] through
/// [`kite_accelerations`] and back through this function returns exactly
/// the external Cartesian force divided by the mass.
pub fn cartesian_acceleration(
    state: &KiteState,
    theta_ddot: f64,
    phi_ddot: f64,
    r_ddot: f64,
) -> Vector3<f64> {
    let (st, ct) = (sin(state.theta), cos(state.theta));
    let KiteState { r, theta_dot: td, phi_dot: pd, r_dot: rd, .. } = *state;
    let b = local_basis(state.theta, state.phi);
    let a_r = r_ddot - r * td * td - r * pd * pd * ct * ct;
    let a_theta = -(r * theta_ddot + 2.0 * rd * td + r * pd * pd * st * ct);
    let a_phi = r * phi_ddot * ct + 2.0 * rd * pd * ct - 2.0 * r * td * pd * st;
    b.column(2) * a_r + b.column(0) * a_theta + b.column(1) * a_phi
}

/// Effective drag coefficient including the tether contribution.
pub fn effective_drag_coeff(params: &AeroParams, tether_length: f64, tether_diameter: f64) -> f64 {
    params.drag_coeff + TETHER_DRAG_COEFF * tether_diameter * tether_length / (4.0 * params.area)
}

/// Apparent wind vector seen by the kite, m/s.
pub fn apparent_wind(state: &KiteState, wind: &Vector3<f64>) -> Vector3<f64> {
    wind - state.velocity()
}
