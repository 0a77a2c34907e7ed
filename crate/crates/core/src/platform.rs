//! 6-DOF floating platform: hydrostatic restoring, radiation memory via a
//! state-space realisation, linear mooring and the tether wrench.
//!
//! Equation of motion:
//!
//! ```text
//! (M + M∞ + M_m) ν̈ = −(K_h + K_m) ν − B_m ν̇ − μ + F_exc + F_t
//! ż = A z + B ν̇,   μ = C z + D ν̇
//! ```
//!
//! where `μ` is the radiation memory force. The combined inertia matrix is
//! factorised once at model construction.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Matrix6, Vector6};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlatformError {
    /// Combined inertia matrix is not symmetric positive definite.
    #[error("singular mass matrix: M + Minf + Mm is not positive definite")]
    SingularMassMatrix,
    /// State-space matrix dimensions do not match (`A` n×n, `B` n×6, `C` 6×n, `D` 6×6).
    #[error("radiation state-space dimension mismatch: A is {rows}x{cols}, B {b_rows}x{b_cols}, C {c_rows}x{c_cols}")]
    Dimensions { rows: usize, cols: usize, b_rows: usize, b_cols: usize, c_rows: usize, c_cols: usize },
    /// No interior local maximum in any diagonal response channel.
    #[error("empty result: frequency response has no resonance peak")]
    EmptyResult,
}

/// Constant coefficient matrices of the platform model, SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroMatrices {
    /// Rigid-body mass-inertia matrix `M`.
    pub mass: Matrix6<f64>,
    /// Infinite-frequency added mass `M∞`.
    pub added_mass_inf: Matrix6<f64>,
    /// Hydrostatic restoring `K_h`.
    pub hydrostatic: Matrix6<f64>,
    /// Mooring inertia `M_m`.
    pub mooring_mass: Matrix6<f64>,
    /// Mooring damping `B_m`.
    pub mooring_damping: Matrix6<f64>,
    /// Mooring stiffness `K_m`.
    pub mooring_stiffness: Matrix6<f64>,
}

impl HydroMatrices {
    /// `M + M∞ + M_m`.
    pub fn total_inertia(&self) -> Matrix6<f64> {
        self.mass + self.added_mass_inf + self.mooring_mass
    }

    /// `K_h + K_m`.
    pub fn total_stiffness(&self) -> Matrix6<f64> {
        self.hydrostatic + self.mooring_stiffness
    }
}

/// State-space realisation of the radiation impulse response
/// `h_ra(t) ≈ C e^{At} B` (+ direct feedthrough `D`).
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationStateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: Matrix6<f64>,
}

/// Second-order band-pass radiation kernel for one diagonal channel:
/// transfer `β s / (s² + 2ζω₀ s + ω₀²)`. Zero DC gain, so the memory
/// force vanishes for steady drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPassKernel {
    pub omega0: f64,
    pub zeta: f64,
    pub gain: f64,
}

impl RadiationStateSpace {
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: Matrix6<f64>,
    ) -> Result<Self, PlatformError> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || b.ncols() != 6 || c.nrows() != 6 || c.ncols() != n {
            return Err(PlatformError::Dimensions {
                rows: a.nrows(),
                cols: a.ncols(),
                b_rows: b.nrows(),
                b_cols: b.ncols(),
                c_rows: c.nrows(),
                c_cols: c.ncols(),
            });
        }
        Ok(Self { a, b, c, d })
    }

    /// Trivial realisation with no memory (n = 0, D = 0).
    pub fn none() -> Self {
        Self {
            a: DMatrix::zeros(0, 0),
            b: DMatrix::zeros(0, 6),
            c: DMatrix::zeros(6, 0),
            d: Matrix6::zeros(),
        }
    }

    /// Block-diagonal realisation with one [`BandPassKernel`] per DOF
    /// (two states each).
    pub fn from_band_pass(kernels: &[BandPassKernel; 6]) -> Self {
        let n = 12;
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, 6);
        let mut c = DMatrix::zeros(6, n);
        for (i, k) in kernels.iter().enumerate() {
            let r = 2 * i;
            a[(r, r + 1)] = 1.0;
            a[(r + 1, r)] = -k.omega0 * k.omega0;
            a[(r + 1, r + 1)] = -2.0 * k.zeta * k.omega0;
            b[(r + 1, i)] = 1.0;
            c[(i, r + 1)] = k.gain;
        }
        Self { a, b, c, d: Matrix6::zeros() }
    }

    /// Number of radiation states.
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// `K_rad(iω) = C (iωI − A)⁻¹ B + D` evaluated at the signed angular
    /// frequency `omega`, rad/s.
    pub fn transfer(&self, omega: f64) -> Option<Matrix6<Complex64>> {
        let n = self.order();
        let d_c = self.d.map(|x| Complex64::new(x, 0.0));
        if n == 0 {
            return Some(d_c);
        }
        let mut m = self.a.map(|x| Complex64::new(-x, 0.0));
        for i in 0..n {
            m[(i, i)] += Complex64::new(0.0, omega);
        }
        let b_c = self.b.map(|x| Complex64::new(x, 0.0));
        let sol = m.lu().solve(&b_c)?;
        let c_c = self.c.map(|x| Complex64::new(x, 0.0));
        let prod = &c_c * &sol;
        let mut out = d_c;
        for i in 0..6 {
            for j in 0..6 {
                out[(i, j)] += prod[(i, j)];
            }
        }
        Some(out)
    }
}

/// Platform displacements/rotations, velocities, and radiation memory state.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformState {
    /// `[x_P, y_P, z_P, ω_x, ω_y, ω_z]` — surge, sway, heave, roll, pitch, yaw.
    pub nu: Vector6<f64>,
    pub nu_dot: Vector6<f64>,
    pub radiation_state: DVector<f64>,
}

impl PlatformState {
    pub fn at_rest(radiation_order: usize) -> Self {
        Self {
            nu: Vector6::zeros(),
            nu_dot: Vector6::zeros(),
            radiation_state: DVector::zeros(radiation_order),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.nu.iter().all(|x| x.is_finite())
            && self.nu_dot.iter().all(|x| x.is_finite())
            && self.radiation_state.iter().all(|x| x.is_finite())
    }

    /// Translational displacement `[x_P, y_P, z_P]`.
    pub fn displacement(&self) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new(self.nu[0], self.nu[1], self.nu[2])
    }
}

/// Radiation memory force and the radiation state derivative:
/// `μ = C z + D ν̇`, `ż = A z + B ν̇`.
pub fn radiation_force(
    ss: &RadiationStateSpace,
    radiation_state: &DVector<f64>,
    nu_dot: &Vector6<f64>,
) -> (Vector6<f64>, DVector<f64>) {
    let nu_dot_d = DVector::from_column_slice(nu_dot.as_slice());
    let cz = &ss.c * radiation_state;
    let mut mu = ss.d * nu_dot;
    for i in 0..6 {
        mu[i] += cz[i];
    }
    let z_dot = &ss.a * radiation_state + &ss.b * &nu_dot_d;
    (mu, z_dot)
}

/// Resonance peak of one diagonal response channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    /// DOF index, 0 = surge … 5 = yaw.
    pub dof: usize,
    /// Peak frequency after sub-grid quadratic interpolation, Hz.
    pub frequency: f64,
    /// Interpolated peak gain.
    pub gain: f64,
}

/// Frequency response `H(ω)` sampled on a grid; entries where the linear
/// solve failed are flagged as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub freqs_hz: Vec<f64>,
    pub matrices: Vec<Option<Matrix6<Complex64>>>,
}

impl FrequencyResponse {
    /// |H(f)| for one (output, input) pair; flagged entries become NaN.
    pub fn magnitude(&self, out_dof: usize, in_dof: usize) -> Vec<f64> {
        self.matrices
            .iter()
            .map(|m| m.as_ref().map_or(f64::NAN, |h| h[(out_dof, in_dof)].norm()))
            .collect()
    }

    /// Diagonal magnitudes for all six DOFs.
    pub fn diagonal_magnitudes(&self) -> [Vec<f64>; 6] {
        core::array::from_fn(|i| self.magnitude(i, i))
    }

    /// Resonance peaks of the diagonal channels, sorted by gain.
    pub fn resonances(&self) -> Result<Vec<Resonance>, PlatformError> {
        let mags = self.diagonal_magnitudes();
        find_resonances(&mags, &self.freqs_hz)
    }
}

/// The platform model with the combined inertia factorised once.
#[derive(Debug, Clone)]
pub struct PlatformModel {
    pub hydro: HydroMatrices,
    pub radiation: RadiationStateSpace,
    inertia_chol: Cholesky<f64, nalgebra::U6>,
}

impl PlatformModel {
    pub fn new(hydro: HydroMatrices, radiation: RadiationStateSpace) -> Result<Self, PlatformError> {
        let total = hydro.total_inertia();
        let asym = (total - total.transpose()).norm() / total.norm().max(1.0);
        if asym > 1e-9 {
            return Err(PlatformError::SingularMassMatrix);
        }
        let inertia_chol = total.cholesky().ok_or(PlatformError::SingularMassMatrix)?;
        Ok(Self { hydro, radiation, inertia_chol })
    }

    /// `ν̈` for the current state and applied generalised forces.
    pub fn acceleration(
        &self,
        nu: &Vector6<f64>,
        nu_dot: &Vector6<f64>,
        radiation_mu: &Vector6<f64>,
        f_exc: &Vector6<f64>,
        f_tether: &Vector6<f64>,
    ) -> Vector6<f64> {
        let rhs = -self.hydro.total_stiffness() * nu
            - self.hydro.mooring_damping * nu_dot
            - radiation_mu
            + f_exc
            + f_tether;
        self.inertia_chol.solve(&rhs)
    }

    /// `H(iω)` at a signed frequency in Hz (negative values permitted for
    /// conjugate-symmetry checks).
    pub fn response_at(&self, freq_hz: f64) -> Option<Matrix6<Complex64>> {
        let omega = 2.0 * core::f64::consts::PI * freq_hz;
        let k_rad = self.radiation.transfer(omega)?;
        let mut m = Matrix6::<Complex64>::zeros();
        let inertia = self.hydro.total_inertia();
        let stiffness = self.hydro.total_stiffness();
        let damping = self.hydro.mooring_damping;
        for i in 0..6 {
            for j in 0..6 {
                m[(i, j)] = Complex64::new(
                    stiffness[(i, j)] - omega * omega * inertia[(i, j)],
                    omega * damping[(i, j)],
                ) + Complex64::new(0.0, omega) * k_rad[(i, j)];
            }
        }
        m.try_inverse()
    }

    /// Frequency response over a strictly positive, increasing grid.
    pub fn frequency_response(&self, freq_grid_hz: &[f64]) -> FrequencyResponse {
        debug_assert!(freq_grid_hz.windows(2).all(|w| w[0] > 0.0 && w[0] < w[1]));
        FrequencyResponse {
            freqs_hz: freq_grid_hz.to_vec(),
            matrices: freq_grid_hz.iter().map(|&f| self.response_at(f)).collect(),
        }
    }
}

/// Local maxima of per-channel magnitude curves with sub-grid quadratic
/// interpolation, sorted by descending gain.
///
/// Returns [`PlatformError::EmptyResult`] when no channel has an interior
/// local maximum (monotone or flat response).
pub fn find_resonances(
    magnitudes: &[Vec<f64>],
    freq_grid_hz: &[f64],
) -> Result<Vec<Resonance>, PlatformError> {
    let n = freq_grid_hz.len();
    let mut out = Vec::new();
    for (dof, mag) in magnitudes.iter().enumerate() {
        if mag.len() != n || n < 3 {
            continue;
        }
        for k in 1..n - 1 {
            let (ym, y0, yp) = (mag[k - 1], mag[k], mag[k + 1]);
            if !(ym.is_finite() && y0.is_finite() && yp.is_finite()) {
                continue;
            }
            if y0 > ym && y0 > yp {
                let (frequency, gain) =
                    parabola_vertex(freq_grid_hz[k - 1], ym, freq_grid_hz[k], y0, freq_grid_hz[k + 1], yp);
                out.push(Resonance { dof, frequency, gain });
            }
        }
    }
    if out.is_empty() {
        return Err(PlatformError::EmptyResult);
    }
    out.sort_by(|a, b| b.gain.partial_cmp(&a.gain).unwrap_or(core::cmp::Ordering::Equal));
    Ok(out)
}

/// Vertex of the parabola through three points (supports non-uniform grids).
fn parabola_vertex(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> (f64, f64) {
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curv = (d1 - d0) / (x2 - x0);
    if curv >= 0.0 {
        return (x1, y1);
    }
    let xv = 0.5 * (x0 + x1 - d0 / curv);
    // Newton form: p(x) = y0 + d0 (x − x0) + curv (x − x0)(x − x1).
    let yv = y0 + d0 * (xv - x0) + curv * (xv - x0) * (xv - x1);
    (xv, yv)
}
