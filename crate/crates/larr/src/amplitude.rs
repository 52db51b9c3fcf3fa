//! Time-domain recombination amplitude with leading-order nondipole
//! corrections.
//!
//! For one photon energy the engine integrates the coupled system
//! `Hdot = (1 + n.p/c)[eA.p - (eA)^2/2]`,
//! `R1dot = i e^{iQt+iH}[Bdot + i Hdot B]`,
//! `R2dot = -(1/c) e^{iQt+iH} C`
//! over the pulse support, assembles the field-free part
//! `R0 = 2 pi B(0) e^{iH(Tp)/2} cos(H(Tp)/2)`, smears the singular
//! distributions over a Lorentzian longitudinal momentum profile, and forms
//! the triply differential radiated-energy distribution.
//!
//! Charge-multiplied field convention: pulse evaluations return eE and eA
//! with e = -1, so e^2 A^2 = (eA).(eA).

use crate::nordsieck::{kernel_b, kernel_values, NordsieckArgs, NordsieckError};
use crate::ode::{integrate, OdeError, OdeOptions};
use crate::pulse::PulseSpec;
use crate::units::C_AU;
use crate::vec3::{direction_from_angles, Vec3};
use num_complex::Complex64;
use rayon::prelude::*;
use std::cell::Cell;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AmplitudeError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("photon energy {omega} below threshold |E_B| = {threshold}")]
    SubThreshold { omega: f64, threshold: f64 },
    #[error(transparent)]
    Kernel(#[from] NordsieckError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("non-finite amplitude value near t = {t}")]
    NonFinite { t: f64 },
    #[error("grid point {index}: {source}")]
    Point {
        index: usize,
        #[source]
        source: Box<AmplitudeError>,
    },
}

/// Switches for the individual 1/c corrections; all off reproduces the
/// dipole approximation without photon recoil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NondipoleFlags {
    /// The (1 + n.p/c) factor in the phase rate.
    pub recoil: bool,
    /// The -(n/c)[eA.p - (eA)^2/2] shift inside q(t).
    pub retardation: bool,
    /// The C(t)/c amplitude term.
    pub gauge: bool,
    /// The -K photon momentum in q(t).
    pub photon_momentum: bool,
}

impl NondipoleFlags {
    pub fn all() -> Self {
        NondipoleFlags { recoil: true, retardation: true, gauge: true, photon_momentum: true }
    }

    pub fn none() -> Self {
        NondipoleFlags {
            recoil: false,
            retardation: false,
            gauge: false,
            photon_momentum: false,
        }
    }
}

impl Default for NondipoleFlags {
    fn default() -> Self {
        NondipoleFlags::all()
    }
}

/// Scattering geometry and target, in atomic units.
#[derive(Debug, Clone)]
pub struct ScatteringConfig {
    /// Ion charge number.
    pub z: f64,
    /// Central electron momentum magnitude (p0).
    pub p_mag: f64,
    /// Electron direction polar angle (rad).
    pub theta_p: f64,
    /// Electron direction azimuth (rad).
    pub phi_p: f64,
    /// Longitudinal momentum HWHM (p0).
    pub dp: f64,
    pub pulse: PulseSpec,
    /// Photon emission direction (unit).
    pub n_k: Vec3,
    /// Photon polarization (unit, orthogonal to n_k).
    pub eps_k: Vec3,
    pub flags: NondipoleFlags,
}

impl ScatteringConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        z: f64,
        p_mag: f64,
        theta_p: f64,
        phi_p: f64,
        dp: f64,
        pulse: PulseSpec,
        n_k: Vec3,
        eps_k: Vec3,
        flags: NondipoleFlags,
    ) -> Result<Self, AmplitudeError> {
        if !(z >= 1.0) {
            return Err(AmplitudeError::Invalid("z must be >= 1".into()));
        }
        if !(p_mag > 0.0) {
            return Err(AmplitudeError::Invalid("p_mag must be positive".into()));
        }
        if !(dp > 0.0) {
            return Err(AmplitudeError::Invalid("dp must be positive".into()));
        }
        if (n_k.norm() - 1.0).abs() > 1e-10 || (eps_k.norm() - 1.0).abs() > 1e-10 {
            return Err(AmplitudeError::Invalid("n_k and eps_k must be unit vectors".into()));
        }
        if n_k.dot(eps_k).abs() > 1e-10 {
            return Err(AmplitudeError::Invalid("eps_k must be orthogonal to n_k".into()));
        }
        Ok(ScatteringConfig { z, p_mag, theta_p, phi_p, dp, pulse, n_k, eps_k, flags })
    }

    /// Binding energy of the final ground state, -Z^2/2.
    pub fn e_b(&self) -> f64 {
        -0.5 * self.z * self.z
    }

    /// Sommerfeld parameter Z/|p|.
    pub fn nu(&self) -> f64 {
        self.z / self.p_mag
    }

    /// Bound-state inverse length Z (in 1/a0).
    pub fn lambda(&self) -> f64 {
        self.z
    }

    pub fn p_vec(&self) -> Vec3 {
        direction_from_angles(self.theta_p, self.phi_p) * self.p_mag
    }

    /// Photon momentum K = (omega_K / c) n_K, regardless of flags.
    pub fn photon_momentum(&self, omega_k: f64) -> Vec3 {
        self.n_k * (omega_k / C_AU)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationMode {
    /// Adaptive embedded Runge-Kutta; the reference path.
    Adaptive,
    /// Fixed grid with linear-phase (Filon-type) weights per interval;
    /// trades a little accuracy for a predictable, shareable time grid.
    Fast,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationSettings {
    pub mode: IntegrationMode,
    pub rtol: f64,
    pub atol: f64,
    /// Fixed-grid density for the fast mode.
    pub points_per_cycle: usize,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings {
            mode: IntegrationMode::Adaptive,
            rtol: 1e-8,
            atol: 1e-12,
            points_per_cycle: 400,
        }
    }
}

/// The three partial contributions plus shared scalars for one photon energy.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeParts {
    pub r0: Complex64,
    pub r1: Complex64,
    pub r2: Complex64,
    /// Accumulated phase H(T_p) (rad).
    pub h_tp: f64,
    /// Energy mismatch Q (E0).
    pub q: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub omega_grid: Vec<f64>,
    pub d3e: Vec<f64>,
    pub parts: Option<Vec<AmplitudeParts>>,
}

/// Energy mismatch `Q = E_B + omega_K - p^2/2`.
pub fn energy_mismatch_q(config: &ScatteringConfig, omega_k: f64) -> f64 {
    config.e_b() + omega_k - 0.5 * config.p_mag * config.p_mag
}

/// Effective momentum transfer
/// `q(t) = p - eA - K - (n/c)[eA.p - (eA)^2/2]`, with the K and n/c terms
/// gated by the photon_momentum and retardation flags.
pub fn q_of_t(config: &ScatteringConfig, omega_k: f64, t: f64) -> Vec3 {
    let p = config.p_vec();
    let ea = config.pulse.vector_potential(t);
    let mut q = p - ea;
    if config.flags.photon_momentum {
        q = q - config.photon_momentum(omega_k);
    }
    if config.flags.retardation {
        q = q - config.pulse.n_prop * ((ea.dot(p) - 0.5 * ea.norm2()) / C_AU);
    }
    q
}

/// Phase rate `Hdot(t) = (1 + n.p/c)[eA.p - (eA)^2/2]`, recoil factor gated
/// by the recoil flag.
pub fn h_rate(config: &ScatteringConfig, t: f64) -> f64 {
    let p = config.p_vec();
    let ea = config.pulse.vector_potential(t);
    let recoil = if config.flags.recoil {
        1.0 + config.pulse.n_prop.dot(p) / C_AU
    } else {
        1.0
    };
    recoil * (ea.dot(p) - 0.5 * ea.norm2())
}

/// Phaseless integrand factors at time t: the phase rate `Hdot`, the R1
/// kernel `i [Bdot + i Hdot B]` and the R2 kernel `-C/c`.
fn integrand_factors(
    config: &ScatteringConfig,
    omega_k: f64,
    t: f64,
) -> Result<(f64, Complex64, Complex64), NordsieckError> {
    let p = config.p_vec();
    let n = config.pulse.n_prop;
    let ea = config.pulse.vector_potential(t);
    let ee = config.pulse.e_field(t);
    let hdot = h_rate(config, t);
    let q = q_of_t(config, omega_k, t);
    let args = NordsieckArgs::new(config.nu(), config.lambda(), q, p)?;
    let kv = kernel_values(&args, config.eps_k, ee, n)?;
    // qdot = eE + (n/c)(eE.p - eA.eE) when retardation is on.
    let n_coeff = if config.flags.retardation {
        (ee.dot(p) - ea.dot(ee)) / C_AU
    } else {
        0.0
    };
    let bdot = kv.db_dfield + kv.db_dn * n_coeff;
    let i = Complex64::new(0.0, 1.0);
    let g1 = i * (bdot + i * hdot * kv.b);
    let g2 = if config.flags.gauge {
        -kv.c / C_AU
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok((hdot, g1, g2))
}

fn r0_part(config: &ScatteringConfig, omega_k: f64, h_tp: f64) -> Result<Complex64, NordsieckError> {
    let p = config.p_vec();
    let mut q0 = p;
    if config.flags.photon_momentum {
        q0 = q0 - config.photon_momentum(omega_k);
    }
    let args = NordsieckArgs::new(config.nu(), config.lambda(), q0, p)?;
    let b0 = kernel_b(&args, config.eps_k)?;
    let half = Complex64::new(0.0, 0.5 * h_tp).exp();
    Ok(2.0 * PI * b0 * half * (0.5 * h_tp).cos())
}

fn integrate_adaptive(
    config: &ScatteringConfig,
    omega_k: f64,
    settings: &IntegrationSettings,
) -> Result<AmplitudeParts, AmplitudeError> {
    let q_mismatch = energy_mismatch_q(config, omega_k);
    let t_p = config.pulse.t_p();
    let failure: Cell<Option<NordsieckError>> = Cell::new(None);
    let rhs = |t: f64, y: &[f64; 5]| -> [f64; 5] {
        match integrand_factors(config, omega_k, t) {
            Ok((hdot, g1, g2)) => {
                let phase = Complex64::new(0.0, q_mismatch * t + y[0]).exp();
                let r1dot = phase * g1;
                let r2dot = phase * g2;
                [hdot, r1dot.re, r1dot.im, r2dot.re, r2dot.im]
            }
            Err(e) => {
                failure.set(Some(e));
                [0.0; 5]
            }
        }
    };
    let opts = OdeOptions {
        rtol: settings.rtol,
        atol: settings.atol,
        h_initial: 1e-3 * t_p,
        h_max: t_p / 16.0,
        ..Default::default()
    };
    let y = integrate(rhs, 0.0, t_p, [0.0; 5], &opts, None)?;
    if let Some(e) = failure.take() {
        return Err(e.into());
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(AmplitudeError::NonFinite { t: t_p });
    }
    let h_tp = y[0];
    Ok(AmplitudeParts {
        r0: r0_part(config, omega_k, h_tp)?,
        r1: Complex64::new(y[1], y[2]),
        r2: Complex64::new(y[3], y[4]),
        h_tp,
        q: q_mismatch,
    })
}

/// Linear-weight moments of e^{i theta s} on the unit interval:
/// `w0 = int (1-s) e^{i theta s} ds`, `w1 = int s e^{i theta s} ds`.
fn filon_weights(theta: f64) -> (Complex64, Complex64) {
    let z = Complex64::new(0.0, theta);
    if theta.abs() < 1e-3 {
        let w_all = 1.0 + z * (1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
        let w1 = 0.5 + z * (1.0 / 3.0 + z * (1.0 / 8.0 + z * (1.0 / 30.0 + z / 144.0)));
        (w_all - w1, w1)
    } else {
        let e = z.exp();
        let w_all = (e - 1.0) / z;
        let w1 = ((z - 1.0) * e + 1.0) / (z * z);
        (w_all - w1, w1)
    }
}

fn integrate_fast(
    config: &ScatteringConfig,
    omega_k: f64,
    settings: &IntegrationSettings,
) -> Result<AmplitudeParts, AmplitudeError> {
    let q_mismatch = energy_mismatch_q(config, omega_k);
    let t_p = config.pulse.t_p();
    let n_steps = (settings.points_per_cycle * config.pulse.n_osc as usize).max(16);
    let h = t_p / n_steps as f64;

    let mut r1 = Complex64::new(0.0, 0.0);
    let mut r2 = Complex64::new(0.0, 0.0);
    let mut h_acc = 0.0f64;
    let (mut hdot_k, mut g1_k, mut g2_k) = integrand_factors(config, omega_k, 0.0)?;
    for k in 0..n_steps {
        let t0 = k as f64 * h;
        let t1 = t0 + h;
        // Simpson step for the smooth phase H.
        let hdot_mid = h_rate(config, t0 + 0.5 * h);
        let (hdot_next, g1_next, g2_next) = integrand_factors(config, omega_k, t1)?;
        let h_next = h_acc + h / 6.0 * (hdot_k + 4.0 * hdot_mid + hdot_next);
        // Linear-phase, linear-amplitude quadrature over the interval.
        let phi0 = q_mismatch * t0 + h_acc;
        let phi1 = q_mismatch * t1 + h_next;
        let (w0, w1) = filon_weights(phi1 - phi0);
        let lead = Complex64::new(0.0, phi0).exp() * h;
        r1 += lead * (w0 * g1_k + w1 * g1_next);
        r2 += lead * (w0 * g2_k + w1 * g2_next);
        h_acc = h_next;
        hdot_k = hdot_next;
        g1_k = g1_next;
        g2_k = g2_next;
    }
    if !(r1.is_finite() && r2.is_finite() && h_acc.is_finite()) {
        return Err(AmplitudeError::NonFinite { t: t_p });
    }
    Ok(AmplitudeParts {
        r0: r0_part(config, omega_k, h_acc)?,
        r1,
        r2,
        h_tp: h_acc,
        q: q_mismatch,
    })
}

/// Integrate the amplitude system over the pulse support for one photon
/// energy.
pub fn integrate_amplitude(
    config: &ScatteringConfig,
    omega_k: f64,
    settings: &IntegrationSettings,
) -> Result<AmplitudeParts, AmplitudeError> {
    if !(omega_k > 0.0) {
        return Err(AmplitudeError::Invalid("omega_k must be positive".into()));
    }
    match settings.mode {
        IntegrationMode::Adaptive => integrate_adaptive(config, omega_k, settings),
        IntegrationMode::Fast => integrate_fast(config, omega_k, settings),
    }
}

/// Lorentzian-averaged singular distributions for a longitudinal momentum
/// profile of HWHM dp: returns (<delta(Q)>, <P(1/Q)>).
pub fn averaged_distributions(
    config: &ScatteringConfig,
    omega_k: f64,
) -> Result<(f64, f64), AmplitudeError> {
    let threshold = -config.e_b();
    if omega_k <= threshold {
        return Err(AmplitudeError::SubThreshold { omega: omega_k, threshold });
    }
    let kappa0 = (2.0 * (config.e_b() + omega_k)).sqrt();
    let gamma = kappa0 * config.dp;
    let q = energy_mismatch_q(config, omega_k);
    let denom = q * q + gamma * gamma;
    Ok((gamma / (PI * denom), q / denom))
}

/// `<R> = R0 <delta(Q)> + R1 <P(1/Q)> + R2`.
pub fn averaged_r(
    config: &ScatteringConfig,
    omega_k: f64,
    settings: &IntegrationSettings,
) -> Result<(Complex64, AmplitudeParts), AmplitudeError> {
    let (avg_delta, avg_pv) = averaged_distributions(config, omega_k)?;
    let parts = integrate_amplitude(config, omega_k, settings)?;
    Ok((parts.r0 * avg_delta + parts.r1 * avg_pv + parts.r2, parts))
}

/// Triply differential radiated-energy distribution
/// `d3E = [nu^4 e^{pi nu}/sinh(pi nu)] [alpha |p|^2/((2 pi)^2 c^2)]
///  omega^4 |<R>|^2`.
pub fn energy_distribution(
    config: &ScatteringConfig,
    omega_k: f64,
    settings: &IntegrationSettings,
) -> Result<f64, AmplitudeError> {
    let (avg, _) = averaged_r(config, omega_k, settings)?;
    Ok(distribution_prefactor(config) * omega_k.powi(4) * avg.norm_sqr())
}

/// The omega-independent prefactor of the energy distribution.
pub fn distribution_prefactor(config: &ScatteringConfig) -> f64 {
    let nu = config.nu();
    let coulomb = nu.powi(4) * (PI * nu).exp() / (PI * nu).sinh();
    let alpha = 1.0 / C_AU;
    coulomb * alpha * config.p_mag * config.p_mag / ((2.0 * PI).powi(2) * C_AU * C_AU)
}

fn check_grid(config: &ScatteringConfig, omega_grid: &[f64]) -> Result<(), AmplitudeError> {
    if omega_grid.is_empty() {
        return Err(AmplitudeError::Invalid("empty omega grid".into()));
    }
    if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AmplitudeError::Invalid("omega grid must be strictly increasing".into()));
    }
    let threshold = -config.e_b();
    if omega_grid[0] <= threshold {
        return Err(AmplitudeError::SubThreshold { omega: omega_grid[0], threshold });
    }
    Ok(())
}

/// Spectrum over a photon-energy grid; points are independent and evaluated
/// in parallel, with results placed by index.
pub fn scan_spectrum(
    config: &ScatteringConfig,
    omega_grid: &[f64],
    settings: &IntegrationSettings,
) -> Result<SpectrumResult, AmplitudeError> {
    check_grid(config, omega_grid)?;
    let prefactor = distribution_prefactor(config);
    let evaluated: Result<Vec<(f64, AmplitudeParts)>, AmplitudeError> = omega_grid
        .par_iter()
        .enumerate()
        .map(|(index, &omega)| {
            averaged_r(config, omega, settings)
                .map(|(avg, parts)| (prefactor * omega.powi(4) * avg.norm_sqr(), parts))
                .map_err(|e| AmplitudeError::Point { index, source: Box::new(e) })
        })
        .collect();
    let evaluated = evaluated?;
    let (d3e, parts) = evaluated.into_iter().unzip();
    Ok(SpectrumResult { omega_grid: omega_grid.to_vec(), d3e, parts: Some(parts) })
}

/// Spectra over a polar-angle sweep of the electron direction; rows follow
/// theta_grid, columns follow omega_grid.
pub fn angular_map(
    config: &ScatteringConfig,
    theta_grid: &[f64],
    omega_grid: &[f64],
    settings: &IntegrationSettings,
) -> Result<Vec<Vec<f64>>, AmplitudeError> {
    for &theta in theta_grid {
        if !(theta > 0.0 && theta < PI) {
            return Err(AmplitudeError::Invalid(format!(
                "theta_p = {theta} outside (0, pi)"
            )));
        }
    }
    theta_grid
        .iter()
        .map(|&theta| {
            let mut row_config = config.clone();
            row_config.theta_p = theta;
            scan_spectrum(&row_config, omega_grid, settings).map(|r| r.d3e)
        })
        .collect()
}

/// Regularized two-sided integral `I_eps = int e^{-eps|t|} e^{iQt} F(t) dt`
/// with `F = f e^{iH}` constant outside [0, T_p]: the tails are analytic,
/// the middle is adaptive quadrature. Returns one value per epsilon.
pub fn boca_florescu_oracle(
    q: f64,
    h_of_t: &dyn Fn(f64) -> f64,
    f_of_t: &dyn Fn(f64) -> f64,
    t_p: f64,
    eps_list: &[f64],
) -> Result<Vec<Complex64>, AmplitudeError> {
    if q == 0.0 {
        return Err(AmplitudeError::Invalid("Q must be nonzero".into()));
    }
    let f0 = Complex64::new(f_of_t(0.0), 0.0);
    let f_tp = f_of_t(t_p) * Complex64::new(0.0, h_of_t(t_p)).exp();
    eps_list
        .iter()
        .map(|&eps| {
            if !(eps > 0.0) {
                return Err(AmplitudeError::Invalid("epsilon must be positive".into()));
            }
            // Left tail: F = f(0), H = 0 on (-inf, 0].
            let left = f0 / Complex64::new(eps, q);
            // Right tail: F frozen at its T_p value on [T_p, inf).
            let zq = Complex64::new(-eps, q);
            let right = f_tp * (zq * t_p).exp() / (-zq);
            // Middle: adaptive quadrature of e^{(iQ - eps)t} F(t).
            let rhs = |t: f64, _: &[f64; 2]| {
                let val = (zq * t).exp()
                    * f_of_t(t)
                    * Complex64::new(0.0, h_of_t(t)).exp();
                [val.re, val.im]
            };
            let opts = OdeOptions { rtol: 1e-11, atol: 1e-14, h_initial: 1e-3 * t_p, ..Default::default() };
            let y = integrate(rhs, 0.0, t_p, [0.0; 2], &opts, None)?;
            Ok(left + right + Complex64::new(y[0], y[1]))
        })
        .collect()
}

/// The epsilon -> 0 closed form for Q != 0 (the delta term drops):
/// `i (1/Q) int_0^{T_p} e^{iQt + iH} [fdot + i Hdot f] dt`.
pub fn boca_florescu_closed_form(
    q: f64,
    h_of_t: &dyn Fn(f64) -> f64,
    hdot_of_t: &dyn Fn(f64) -> f64,
    f_of_t: &dyn Fn(f64) -> f64,
    fdot_of_t: &dyn Fn(f64) -> f64,
    t_p: f64,
) -> Result<Complex64, AmplitudeError> {
    if q == 0.0 {
        return Err(AmplitudeError::Invalid("Q must be nonzero".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let rhs = |t: f64, _: &[f64; 2]| {
        let phase = Complex64::new(0.0, q * t + h_of_t(t)).exp();
        let val = phase * (fdot_of_t(t) + i * hdot_of_t(t) * f_of_t(t));
        [val.re, val.im]
    };
    let opts = OdeOptions { rtol: 1e-11, atol: 1e-14, h_initial: 1e-3 * t_p, ..Default::default() };
    let y = integrate(rhs, 0.0, t_p, [0.0; 2], &opts, None)?;
    Ok(i / q * Complex64::new(y[0], y[1]))
}
