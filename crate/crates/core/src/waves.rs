//! JONSWAP spectrum evaluation and stochastic synthesis of the free-surface
//! elevation and the 6-DOF wave excitation force.
//!
//! Synthesis uses a random-amplitude scheme: every frequency bin gets a
//! circularly-symmetric complex Gaussian coefficient with variance
//! `S(f_k) Δf`, and the time series is the real part of the resulting
//! harmonic sum. For a fixed seed the output is bit-identical.

use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, exp, pow, sin, sqrt};
use nalgebra::Vector6;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    /// Time step too coarse for the highest synthesized frequency.
    #[error("alias error: dt = {dt} s cannot resolve f_max = {f_max} Hz (need dt < {})", 1.0 / (2.0 * f_max))]
    Alias { dt: f64, f_max: f64 },
}

/// Excitation transfer coefficient at one frequency: complex force per
/// unit wave amplitude for each DOF (N/m, N·m/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationCoeff {
    pub freq_hz: f64,
    pub coeffs: [Complex64; 6],
}

/// Sea state, synthesis grid and excitation coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveScenario {
    /// Significant wave height, m.
    pub hs: f64,
    /// Peak wave period, s (`f_p = 1/te`).
    pub te: f64,
    /// Peak-shape parameter.
    pub gamma_j: f64,
    pub seed: u64,
    pub f_min: f64,
    pub f_max: f64,
    pub n_bins: usize,
    /// Per-frequency excitation coefficients, sorted by frequency;
    /// linearly interpolated onto the synthesis bins.
    pub exc_coeffs: Vec<ExcitationCoeff>,
}

impl WaveScenario {
    /// Scenario on the default 0.02–0.5 Hz, 240-bin grid with the flat
    /// heave-dominant fallback coefficients.
    pub fn new(hs: f64, te: f64, gamma_j: f64, seed: u64) -> Self {
        Self {
            hs,
            te,
            gamma_j,
            seed,
            f_min: 0.02,
            f_max: 0.5,
            n_bins: 240,
            exc_coeffs: Self::flat_heave_coeffs(7.9e5),
        }
    }

    /// Flat-magnitude, zero-phase, heave-dominant coefficients
    /// (`heave_gain` N per metre of wave amplitude).
    pub fn flat_heave_coeffs(heave_gain: f64) -> Vec<ExcitationCoeff> {
        let mut coeffs = [Complex64::new(0.0, 0.0); 6];
        coeffs[2] = Complex64::new(heave_gain, 0.0);
        vec![
            ExcitationCoeff { freq_hz: 0.0, coeffs },
            ExcitationCoeff { freq_hz: 10.0, coeffs },
        ]
    }

    /// Bin width of the synthesis grid, Hz.
    pub fn delta_f(&self) -> f64 {
        (self.f_max - self.f_min) / self.n_bins as f64
    }

    /// Centre frequency of bin `k`, Hz.
    pub fn bin_freq(&self, k: usize) -> f64 {
        self.f_min + (k as f64 + 0.5) * self.delta_f()
    }

    /// Excitation coefficients interpolated at frequency `f`, clamped to
    /// the tabulated range; zero when no coefficients are given.
    pub fn coeffs_at(&self, f: f64) -> [Complex64; 6] {
        let zero = [Complex64::new(0.0, 0.0); 6];
        let table = &self.exc_coeffs;
        if table.is_empty() {
            return zero;
        }
        if f <= table[0].freq_hz {
            return table[0].coeffs;
        }
        if f >= table[table.len() - 1].freq_hz {
            return table[table.len() - 1].coeffs;
        }
        let idx = table.partition_point(|c| c.freq_hz <= f);
        let (lo, hi) = (&table[idx - 1], &table[idx]);
        let w = (f - lo.freq_hz) / (hi.freq_hz - lo.freq_hz);
        core::array::from_fn(|j| lo.coeffs[j] * (1.0 - w) + hi.coeffs[j] * w)
    }
}

/// JONSWAP spectrum with the scale factor fixed numerically so that
/// `4 √(∫S df) = H_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonswapSpectrum {
    pub hs: f64,
    pub te: f64,
    pub gamma_j: f64,
    scale: f64,
}

impl JonswapSpectrum {
    pub fn new(hs: f64, te: f64, gamma_j: f64) -> Self {
        let mut s = Self { hs, te, gamma_j, scale: 1.0 };
        if hs <= 0.0 {
            s.scale = 0.0;
            return s;
        }
        // Normalise the shape integral on a dense grid spanning the
        // support (the tail above 10 f_p carries < 0.02 % of the area).
        let fp = 1.0 / te;
        let lo = fp / 8.0;
        let hi = 10.0 * fp;
        let n = 20_000;
        let df = (hi - lo) / n as f64;
        let mut integral = 0.0;
        let mut prev = s.shape(lo);
        for i in 1..=n {
            let cur = s.shape(lo + i as f64 * df);
            integral += 0.5 * (prev + cur) * df;
            prev = cur;
        }
        let m0_target = (hs / 4.0) * (hs / 4.0);
        s.scale = m0_target / integral;
        s
    }

    /// Unnormalised spectral shape `f⁻⁵ exp(−1.25 (f_p/f)⁴) γ^b`.
    fn shape(&self, f: f64) -> f64 {
        if f <= 0.0 {
            return 0.0;
        }
        let fp = 1.0 / self.te;
        let sigma = if f <= fp { 0.07 } else { 0.09 };
        let ratio = fp / f;
        let pm = pow(f, -5.0) * exp(-1.25 * ratio * ratio * ratio * ratio);
        let arg = (f - fp) / (sigma * fp);
        let b = exp(-0.5 * arg * arg);
        pm * pow(self.gamma_j, b)
    }

    /// Spectral density, m²/Hz.
    pub fn psd(&self, f: f64) -> f64 {
        self.scale * self.shape(f)
    }
}

/// One-shot JONSWAP spectral density, m²/Hz.
pub fn jonswap_psd(f: f64, hs: f64, te: f64, gamma_j: f64) -> f64 {
    JonswapSpectrum::new(hs, te, gamma_j).psd(f)
}

/// Seeded circularly-symmetric complex Gaussian coefficient per bin,
/// `Re, Im ~ N(0, S(f_k) Δf)`, so that `Re[a_k e^{iωt}]` carries the bin
/// variance `S(f_k) Δf` and the synthesized elevation reproduces `m₀`.
pub fn draw_components(scenario: &WaveScenario) -> Vec<Complex64> {
    let spectrum = JonswapSpectrum::new(scenario.hs, scenario.te, scenario.gamma_j);
    let mut rng = ChaCha12Rng::seed_from_u64(scenario.seed);
    let df = scenario.delta_f();
    (0..scenario.n_bins)
        .map(|k| {
            // Two draws per bin regardless of amplitude keeps the stream
            // alignment independent of the spectrum.
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            let sigma = sqrt(spectrum.psd(scenario.bin_freq(k)) * df);
            Complex64::new(sigma * z1, sigma * z2)
        })
        .collect()
}

/// Free-surface elevation at the origin and 6-DOF excitation force on a
/// uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSeries {
    pub dt: f64,
    pub samples: Vec<Vector6<f64>>,
    pub elevation: Vec<f64>,
}

impl ExcitationSeries {
    /// All-zero series (calm water / onshore runs).
    pub fn zero(duration: f64, dt: f64) -> Self {
        let n = (duration / dt) as usize;
        Self { dt, samples: vec![Vector6::zeros(); n], elevation: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Force linearly interpolated at time `t`, clamped to the series span.
    pub fn force_at(&self, t: f64) -> Vector6<f64> {
        if self.samples.is_empty() {
            return Vector6::zeros();
        }
        let x = (t / self.dt).max(0.0);
        let i = (x as usize).min(self.samples.len() - 1);
        if i + 1 >= self.samples.len() {
            return self.samples[self.samples.len() - 1];
        }
        let w = x - i as f64;
        self.samples[i] * (1.0 - w) + self.samples[i + 1] * w
    }
}

/// Synthesizes elevation and excitation force over `duration` at step `dt`.
///
/// `elevation(t) = Σ_k Re[a_k e^{i 2π f_k t}]`, and each force channel is
/// the same sum weighted by its excitation coefficient. Stationary and
/// zero-mean; bit-identical for a fixed `(seed, scenario, duration, dt)`.
pub fn synthesize(
    scenario: &WaveScenario,
    duration: f64,
    dt: f64,
) -> Result<ExcitationSeries, WaveError> {
    if dt >= 1.0 / (2.0 * scenario.f_max) {
        return Err(WaveError::Alias { dt, f_max: scenario.f_max });
    }
    let n = libm::round(duration / dt) as usize;
    let amps = draw_components(scenario);

    let mut elevation = vec![0.0_f64; n];
    let mut samples = vec![Vector6::<f64>::zeros(); n];

    const RESYNC: usize = 8192;
    for (k, &a) in amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let f = scenario.bin_freq(k);
        let coeffs = scenario.coeffs_at(f);
        let omega = 2.0 * core::f64::consts::PI * f;
        let rot = Complex64::new(cos(omega * dt), sin(omega * dt));
        let mut phasor = a;
        for i in 0..n {
            if i % RESYNC == 0 {
                // Re-anchor the recurrence to the exact phase.
                let t = i as f64 * dt;
                phasor = a * Complex64::new(cos(omega * t), sin(omega * t));
            }
            elevation[i] += phasor.re;
            let s = &mut samples[i];
            for j in 0..6 {
                let c = coeffs[j];
                s[j] += c.re * phasor.re - c.im * phasor.im;
            }
            phasor *= rot;
        }
    }
    Ok(ExcitationSeries { dt, samples, elevation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn psd_zero_frequency_and_zero_hs() {
        assert_eq!(jonswap_psd(0.0, 0.5, 3.7, 3.1), 0.0);
        assert_eq!(jonswap_psd(0.27, 0.0, 3.7, 3.1), 0.0);
    }

    #[test]
    fn psd_peaks_at_peak_frequency() {
        let s = JonswapSpectrum::new(0.5, 3.7, 3.1);
        let fp = 1.0 / 3.7;
        let df = 1e-4;
        let mut best = (0.0, 0.0);
        let mut f = 0.01;
        while f < 1.0 {
            let v = s.psd(f);
            if v > best.1 {
                best = (f, v);
            }
            f += df;
        }
        assert_abs_diff_eq!(best.0, fp, epsilon = df * 1.5);
    }

    /// Quadrature oracle: 4√m₀ must recover H_s for both reference sea
    /// states (the normalisation is independent of this trapezoid).
    #[test]
    fn psd_integral_matches_hs() {
        for (hs, te, gamma) in [(0.5, 3.7, 3.1), (2.0, 7.5, 3.1)] {
            let s = JonswapSpectrum::new(hs, te, gamma);
            let df = 5e-5;
            let mut m0 = 0.0;
            let mut f = df;
            while f < 4.0 {
                m0 += 0.5 * (s.psd(f) + s.psd(f + df)) * df;
                f += df;
            }
            assert_relative_eq!(4.0 * m0.sqrt(), hs, max_relative = 5e-3);
        }
    }

    #[test]
    fn draw_zero_for_calm_sea() {
        let sc = WaveScenario::new(0.0, 3.7, 3.1, 42);
        assert!(draw_components(&sc).iter().all(|a| a.norm_sqr() == 0.0));
    }

    #[test]
    fn draw_deterministic() {
        let sc = WaveScenario::new(0.5, 3.7, 3.1, 4242);
        assert_eq!(draw_components(&sc), draw_components(&sc));
    }

    /// Monte-Carlo oracle: each quadrature of the coefficient carries the
    /// bin variance S(f) Δf, i.e. E|a|² = 2 S Δf.
    #[test]
    fn draw_variance_matches_spectrum() {
        let mut sc = WaveScenario::new(0.5, 3.7, 3.1, 0);
        sc.f_min = 0.25;
        sc.f_max = 0.29;
        sc.n_bins = 1;
        let spectrum = JonswapSpectrum::new(sc.hs, sc.te, sc.gamma_j);
        let bin_variance = spectrum.psd(sc.bin_freq(0)) * sc.delta_f();
        let mut acc = 0.0;
        for seed in 0..1000 {
            sc.seed = seed;
            acc += draw_components(&sc)[0].norm_sqr();
        }
        assert_relative_eq!(acc / 1000.0, 2.0 * bin_variance, max_relative = 0.1);
    }

    #[test]
    fn synthesize_zero_for_calm_sea() {
        let sc = WaveScenario::new(0.0, 3.7, 3.1, 1);
        let series = synthesize(&sc, 50.0, 0.05).unwrap();
        assert!(series.elevation.iter().all(|&x| x == 0.0));
        assert!(series.samples.iter().all(|v| *v == Vector6::zeros()));
        assert_eq!(series.len(), 1000);
    }

    #[test]
    fn synthesize_alias_guard() {
        let sc = WaveScenario::new(0.5, 3.7, 3.1, 1);
        let err = synthesize(&sc, 10.0, 1.0).unwrap_err();
        assert!(matches!(err, WaveError::Alias { .. }));
    }

    #[test]
    fn synthesize_deterministic() {
        let sc = WaveScenario::new(0.5, 3.7, 3.1, 777);
        let a = synthesize(&sc, 120.0, 0.05).unwrap();
        let b = synthesize(&sc, 120.0, 0.05).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unit_heave_coefficient_passes_elevation_through() {
        let mut sc = WaveScenario::new(0.5, 3.7, 3.1, 8);
        sc.exc_coeffs = WaveScenario::flat_heave_coeffs(1.0);
        let series = synthesize(&sc, 100.0, 0.05).unwrap();
        for (i, &eta) in series.elevation.iter().enumerate() {
            assert_eq!(series.samples[i][2], eta);
            assert_eq!(series.samples[i][0], 0.0);
        }
    }

    #[test]
    fn force_scales_linearly_with_coefficients() {
        let mut sc = WaveScenario::new(0.5, 3.7, 3.1, 9);
        sc.exc_coeffs = WaveScenario::flat_heave_coeffs(3.0e5);
        let base = synthesize(&sc, 60.0, 0.05).unwrap();
        let mut scaled = sc.clone();
        for c in &mut scaled.exc_coeffs {
            for j in 0..6 {
                c.coeffs[j] *= 2.0;
            }
        }
        let doubled = synthesize(&scaled, 60.0, 0.05).unwrap();
        for i in 0..base.len() {
            // Power-of-two scaling is exact in floating point.
            assert_eq!(doubled.samples[i][2], 2.0 * base.samples[i][2]);
        }
    }

    #[test]
    fn elevation_variance_tracks_m0() {
        // Reduced-size check; the wide version runs in the acceptance suite.
        let mut acc = 0.0;
        let mut count = 0usize;
        for seed in 0..10 {
            let mut sc = WaveScenario::new(0.5, 3.7, 3.1, seed);
            sc.f_max = 1.0;
            sc.n_bins = 400;
            let series = synthesize(&sc, 500.0, 0.25).unwrap();
            for &x in &series.elevation {
                acc += x * x;
                count += 1;
            }
        }
        let m0 = acc / count as f64;
        assert_relative_eq!(4.0 * m0.sqrt(), 0.5, max_relative = 0.1);
    }

    #[test]
    fn coeff_interpolation_clamps_and_blends() {
        let mut sc = WaveScenario::new(0.5, 3.7, 3.1, 0);
        sc.exc_coeffs = vec![
            ExcitationCoeff { freq_hz: 0.1, coeffs: [Complex64::new(1.0, 0.0); 6] },
            ExcitationCoeff { freq_hz: 0.3, coeffs: [Complex64::new(3.0, 0.0); 6] },
        ];
        assert_eq!(sc.coeffs_at(0.05)[0].re, 1.0);
        assert_eq!(sc.coeffs_at(0.4)[0].re, 3.0);
        assert_relative_eq!(sc.coeffs_at(0.2)[0].re, 2.0, epsilon = 1e-12);
    }
}
