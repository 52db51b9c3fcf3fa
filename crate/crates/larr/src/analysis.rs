//! Saddle-point emission-energy curves with their cutoff, and the
//! time-frequency spectrogram pipeline used to interpret computed spectra.

use crate::amplitude::ScatteringConfig;
use crate::units::C_AU;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid spectrogram configuration: {0}")]
    Invalid(String),
    #[error("signal grid [{lo}, {hi}] does not cover the truncation window")]
    GridCoverage { lo: f64, hi: f64 },
}

/// Instantaneous emission energy along the pulse, dipole and corrected.
#[derive(Debug, Clone)]
pub struct SaddleCurve {
    pub t_grid: Vec<f64>,
    pub omega_dipole: Vec<f64>,
    pub omega_full: Vec<f64>,
}

/// Emission energy of an electron captured at time t:
/// `omega_K(t) = (p - eA)^2/2 - E_B - (n.p/c)[eA.p - (eA)^2/2]`,
/// with the recoil term optional.
pub fn saddle_energy(config: &ScatteringConfig, t: f64, include_recoil: bool) -> f64 {
    let p = config.p_vec();
    let ea = config.pulse.vector_potential(t);
    let dipole = 0.5 * (p - ea).norm2() - config.e_b();
    if include_recoil {
        let np = config.pulse.n_prop.dot(p);
        dipole - np / C_AU * (ea.dot(p) - 0.5 * ea.norm2())
    } else {
        dipole
    }
}

/// Sample both saddle curves on a time grid.
pub fn saddle_curve(config: &ScatteringConfig, t_grid: &[f64]) -> SaddleCurve {
    SaddleCurve {
        t_grid: t_grid.to_vec(),
        omega_dipole: t_grid.iter().map(|&t| saddle_energy(config, t, false)).collect(),
        omega_full: t_grid.iter().map(|&t| saddle_energy(config, t, true)).collect(),
    }
}

/// Highest saddle emission energy over the pulse: dense sampling
/// (>= 10^3 points per cycle) plus golden-section refinement.
pub fn cutoff(config: &ScatteringConfig, include_recoil: bool) -> f64 {
    let t_p = config.pulse.t_p();
    let n = 1000 * config.pulse.n_osc as usize;
    let g = |t: f64| saddle_energy(config, t, include_recoil);
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=n {
        let v = g(t_p * i as f64 / n as f64);
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    let mut lo = t_p * best.saturating_sub(1) as f64 / n as f64;
    let mut hi = t_p * (best + 1).min(n) as f64 / n as f64;
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while hi - lo > 1e-12 * t_p {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = g(x1);
        }
    }
    g(0.5 * (lo + hi)).max(best_v)
}

/// Spectrogram parameters: truncation window [omega1, omega2] with ramp
/// fraction xi_t, Gaussian window fraction xi_w, and the output grids.
#[derive(Debug, Clone)]
pub struct SpectrogramConfig {
    pub xi_t: f64,
    pub xi_w: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub t_grid: Vec<f64>,
    pub omega_k_grid: Vec<f64>,
}

impl SpectrogramConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if !(self.xi_t > 0.0 && self.xi_t < 0.5) {
            return Err(AnalysisError::Invalid("xi_t must lie in (0, 1/2)".into()));
        }
        if !(self.xi_w > 0.0) {
            return Err(AnalysisError::Invalid("xi_w must be positive".into()));
        }
        if !(self.omega1 < self.omega2) {
            return Err(AnalysisError::Invalid("omega1 must be below omega2".into()));
        }
        Ok(())
    }
}

/// Five-branch truncation profile on the normalized coordinate x with
/// normalized ramp width dx.
pub fn truncation_profile(x: f64, dx: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else if x < dx {
        (PI * x / (2.0 * dx)).sin().powi(2)
    } else if x <= 1.0 - dx {
        1.0
    } else {
        (PI * (1.0 - x) / (2.0 * dx)).sin().powi(2)
    }
}

/// Normalized Gaussian window `exp(-(x/dx)^2) / (sqrt(pi) dx)`.
pub fn gaussian_window(x: f64, dx: f64) -> f64 {
    (-(x / dx) * (x / dx)).exp() / (PI.sqrt() * dx)
}

/// Multiply the sampled signal by the truncation profile over
/// [omega1, omega2]; the grid must cover the window.
pub fn truncate_signal(
    omega: &[f64],
    signal: &[Complex64],
    cfg: &SpectrogramConfig,
) -> Result<Vec<Complex64>, AnalysisError> {
    cfg.validate()?;
    if omega.len() != signal.len() || omega.len() < 2 {
        return Err(AnalysisError::Invalid("signal and grid lengths must match".into()));
    }
    let (lo, hi) = (omega[0], omega[omega.len() - 1]);
    if lo > cfg.omega1 || hi < cfg.omega2 {
        return Err(AnalysisError::GridCoverage { lo, hi });
    }
    let span = cfg.omega2 - cfg.omega1;
    Ok(omega
        .iter()
        .zip(signal.iter())
        .map(|(&w, &s)| s * truncation_profile((w - cfg.omega1) / span, cfg.xi_t))
        .collect())
}

/// Squared short-time Fourier transform
/// `S(t, omega_K) = |int domega A_T(omega) W(omega - omega_K) e^{-i omega t}|^2`
/// by trapezoidal quadrature on the signal grid; rows follow `t_grid`,
/// columns follow `omega_k_grid`.
pub fn spectrogram(
    omega: &[f64],
    signal: &[Complex64],
    cfg: &SpectrogramConfig,
) -> Result<Vec<Vec<f64>>, AnalysisError> {
    let truncated = truncate_signal(omega, signal, cfg)?;
    let width = cfg.xi_w * (cfg.omega2 - cfg.omega1);
    // Trapezoid weights on the (possibly nonuniform) grid, restricted to the
    // truncation window where the integrand is supported.
    let mut weights = vec![0.0; omega.len()];
    for k in 0..omega.len() - 1 {
        let half = 0.5 * (omega[k + 1] - omega[k]);
        weights[k] += half;
        weights[k + 1] += half;
    }
    let rows: Vec<Vec<f64>> = cfg
        .t_grid
        .par_iter()
        .map(|&t| {
            cfg.omega_k_grid
                .iter()
                .map(|&wk| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for ((&w, &a), &wt) in
                        omega.iter().zip(truncated.iter()).zip(weights.iter())
                    {
                        if a == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        let window = gaussian_window(w - wk, width);
                        acc += a * window * wt * Complex64::new(0.0, -w * t).exp();
                    }
                    acc.norm_sqr()
                })
                .collect()
        })
        .collect();
    Ok(rows)
}
