//! Nonlinear-spring tether: effective mass contribution, length-dependent
//! stiffness, traction magnitude and the force/wrench pair applied to kite
//! and platform.
//!
//! The tether pulls only when taut: `F = max(0, k(L) (‖d‖ − L))` with
//! `k(L) = F̄ / (ε̄ L)`, so the breaking load `F̄` is reached exactly at
//! elongation `ε̄`.

use core::f64::consts::PI;

use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TetherError {
    /// Kite coincides with the tether exit point; the line direction is
    /// undefined.
    #[error("degenerate geometry: kite at the tether exit point")]
    DegenerateGeometry,
}

/// Tether geometry and material properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetherConfig {
    /// Diameter, m.
    pub diameter: f64,
    /// Material density, kg/m³.
    pub density: f64,
    /// Breaking load, N.
    pub breaking_load: f64,
    /// Elongation at the breaking load, dimensionless, in (0, 0.2).
    pub breaking_elongation: f64,
    /// Tether exit point relative to the platform centre of gravity,
    /// platform frame at rest, m. Held constant in the inertial frame.
    pub exit_point: Vector3<f64>,
}

impl Default for TetherConfig {
    fn default() -> Self {
        Self {
            diameter: 0.035,
            density: 980.0,
            breaking_load: 490e3,
            breaking_elongation: 0.03,
            exit_point: Vector3::new(0.0, 0.0, 7.8475),
        }
    }
}

/// Tether force and moment applied to the platform, plus the equal and
/// opposite pull on the kite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetherWrench {
    /// Force on the platform, N (points from the exit point towards the kite).
    pub force_on_platform: Vector3<f64>,
    /// Moment on the platform about its centre of gravity, N·m.
    pub moment_on_platform: Vector3<f64>,
    /// Force on the kite, N (`−force_on_platform`).
    pub force_on_kite: Vector3<f64>,
    /// Traction magnitude, N.
    pub magnitude: f64,
}

impl TetherWrench {
    pub fn zero() -> Self {
        Self {
            force_on_platform: Vector3::zeros(),
            moment_on_platform: Vector3::zeros(),
            force_on_kite: Vector3::zeros(),
            magnitude: 0.0,
        }
    }
}

/// Kite mass augmented by half the tether mass:
/// `m = m_K + ρ_t π d_t² L / 8`.
pub fn effective_mass(kite_mass: f64, cfg: &TetherConfig, length: f64) -> f64 {
    kite_mass + cfg.density * PI * cfg.diameter * cfg.diameter * length / 8.0
}

/// Length-dependent spring coefficient `k = F̄ / (ε̄ L)`, N/m.
pub fn spring_coefficient(cfg: &TetherConfig, length: f64) -> f64 {
    cfg.breaking_load / (cfg.breaking_elongation * length)
}

/// Traction magnitude, clamped at zero when slack:
/// `F = max(0, k(L) (span − L))`.
///
/// Exceeding the breaking load is a diagnostic condition, not an error;
/// use [`TetherConfig::breaking_exceeded`] to flag it.
pub fn traction_magnitude(cfg: &TetherConfig, length: f64, span_distance: f64) -> f64 {
    let f = spring_coefficient(cfg, length) * (span_distance - length);
    if f > 0.0 {
        f
    } else {
        0.0
    }
}

impl TetherConfig {
    /// True when a traction value exceeds the breaking load.
    pub fn breaking_exceeded(&self, traction: f64) -> bool {
        traction > self.breaking_load
    }
}

/// Force/wrench pair for the current geometry.
///
/// The exit point is `P_{W−K} = P_{W−O} + P_{O−K}`, the line vector
/// `d = p_kite − P_{W−K}`, and the platform wrench is
/// `[F d̂ ; (F d̂) × P_{O−K}]` with the kite pulled by `−F d̂`.
pub fn traction_wrench(
    kite_pos_inertial: &Vector3<f64>,
    platform_displacement: &Vector3<f64>,
    cfg: &TetherConfig,
    length: f64,
) -> Result<TetherWrench, TetherError> {
    let exit = platform_displacement + cfg.exit_point;
    let d = kite_pos_inertial - exit;
    let span = d.norm();
    if span < 1e-9 {
        return Err(TetherError::DegenerateGeometry);
    }
    let magnitude = traction_magnitude(cfg, length, span);
    if magnitude == 0.0 {
        return Ok(TetherWrench::zero());
    }
    let force = d * (magnitude / span);
    Ok(TetherWrench {
        force_on_platform: force,
        moment_on_platform: force.cross(&cfg.exit_point),
        force_on_kite: -force,
        magnitude,
    })
}
