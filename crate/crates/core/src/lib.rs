//! Coupled dynamics of a pumping airborne-wind-energy kite tethered to a
//! moored floating spar.
//!
//! The crate is organised around the physical subsystems:
//!
//! * [`kite`] — point-mass kite in the spherical tether frame,
//! * [`tether`] — nonlinear-spring tether and the force/wrench pair it
//!   applies to kite and platform,
//! * [`platform`] — 6-DOF floating body with hydrostatic restoring,
//!   radiation memory (state-space realisation), mooring and frequency
//!   response,
//! * [`waves`] — JONSWAP spectrum and stochastic synthesis of the wave
//!   excitation force,
//! * [`control`] — two-target-point navigation, steering law and the
//!   resonance-avoiding target-point planner,
//! * [`engine`] — the fixed-step RK4 integrator coupling everything.
//!
//! Everything here is `no_std`-compatible (`alloc` required); IO, file
//! formats and spectral post-processing live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod control;
pub mod engine;
pub mod kite;
pub mod platform;
pub mod tether;
pub mod waves;

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.81;

pub use control::{ControllerMode, ControllerState, FlightController, PlannerConfig, TargetPoints, TargetSide};
pub use engine::{SimConfig, SimEvent, SimRecord, TetherMode};
pub use kite::{AeroParams, KiteState, LocalForces};
pub use platform::{HydroMatrices, PlatformModel, PlatformState, RadiationStateSpace};
pub use tether::{TetherConfig, TetherWrench};
pub use waves::{ExcitationSeries, WaveScenario};
