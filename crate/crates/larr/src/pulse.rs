//! Laser-pulse models: electric field, vector potential, chirped phases and
//! CEP conventions, all as pure functions of time.
//!
//! Sign convention: every returned vector is already multiplied by the
//! electron charge `e = -|e|`. `e_field` returns `e E(t)` (field0 units) and
//! `vector_potential` returns `e A(t)` (p0 units); the two satisfy
//! `e E(t) = -d/dt [e A(t)]`. All downstream formulas consume only these
//! charge-multiplied combinations.

use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseShape {
    /// Sine-squared envelope on the electric field; amplitude is the peak
    /// field strength (field0 units).
    FieldSine2,
    /// Chirped shape function `f1` on the vector potential; amplitude is
    /// `|e| A0` (p0 units).
    ChirpF1,
    /// Chirped shape function `f2 = (f1 + 1)^2 - 1`; amplitude as for f1.
    ChirpF2,
}

#[derive(Debug, Error, PartialEq)]
pub enum PulseError {
    #[error("operation defined only for the FieldSine2 shape")]
    UnsupportedShape,
    #[error("invalid pulse: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// Carrier frequency (E0 units).
    pub omega: f64,
    /// Peak field (FieldSine2, field0) or `|e| A0` (chirped shapes, p0).
    pub amplitude: f64,
    /// Cycle count.
    pub n_osc: u32,
    /// Chirp strength (dimensionless).
    pub eta0: f64,
    /// Chirp envelope exponent.
    pub n_c: u32,
    /// Carrier-envelope phase (rad).
    pub chi: f64,
    /// Propagation direction (unit).
    pub n_prop: Vec3,
    /// Polarization direction (unit).
    pub eps_pol: Vec3,
    /// Peak-normalization factor (1 for chirped shapes).
    n0: f64,
}

impl PulseSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        shape: PulseShape,
        omega: f64,
        amplitude: f64,
        n_osc: u32,
        eta0: f64,
        n_c: u32,
        chi: f64,
        n_prop: Vec3,
        eps_pol: Vec3,
    ) -> Result<Self, PulseError> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(PulseError::Invalid("omega must be positive".into()));
        }
        if n_osc == 0 {
            return Err(PulseError::Invalid("n_osc must be at least 1".into()));
        }
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(PulseError::Invalid("amplitude must be finite and >= 0".into()));
        }
        if (n_prop.norm() - 1.0).abs() > 1e-10 || (eps_pol.norm() - 1.0).abs() > 1e-10 {
            return Err(PulseError::Invalid("n_prop and eps_pol must be unit vectors".into()));
        }
        if n_prop.dot(eps_pol).abs() > 1e-10 {
            return Err(PulseError::Invalid("eps_pol must be orthogonal to n_prop".into()));
        }
        let mut spec = PulseSpec {
            shape,
            omega,
            amplitude,
            n_osc,
            eta0,
            n_c,
            chi,
            n_prop,
            eps_pol,
            n0: 1.0,
        };
        if shape == PulseShape::FieldSine2 {
            spec.n0 = 1.0 / spec.sine2_envelope_max();
        }
        Ok(spec)
    }

    /// Pulse duration `T_p = 2 pi N_osc / omega`.
    pub fn t_p(&self) -> f64 {
        2.0 * PI * self.n_osc as f64 / self.omega
    }

    /// Scaling factor making the peak of `|E(t)|` equal the requested
    /// amplitude. Defined only for the sine-squared field shape.
    pub fn normalization_factor(&self) -> Result<f64, PulseError> {
        match self.shape {
            PulseShape::FieldSine2 => Ok(self.n0),
            _ => Err(PulseError::UnsupportedShape),
        }
    }

    /// Maximum of `sin^2(w t / 2N) |sin(w t)|` over one pulse, by dense
    /// sampling and golden-section refinement.
    fn sine2_envelope_max(&self) -> f64 {
        let tp = self.t_p();
        let g = |t: f64| {
            let a = self.omega * t / (2.0 * self.n_osc as f64);
            let s = a.sin();
            (s * s * (self.omega * t).sin()).abs()
        };
        let n = 10_000 * self.n_osc as usize;
        let mut best_i = 0;
        let mut best = 0.0;
        for i in 0..=n {
            let v = g(tp * i as f64 / n as f64);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let mut lo = tp * (best_i.saturating_sub(1)) as f64 / n as f64;
        let mut hi = tp * (best_i + 1).min(n) as f64 / n as f64;
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let (mut f1, mut f2) = (g(x1), g(x2));
        while hi - lo > 1e-13 * tp {
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
        g(0.5 * (lo + hi)).max(best)
    }

    /// Nonlinear temporal carrier phase of the chirped shapes.
    pub fn chirped_phase(&self, t: f64) -> f64 {
        let wt = self.omega * t;
        let half = (self.omega * t / (2.0 * self.n_osc as f64)).sin();
        self.omega * t + self.chi + self.eta0 * wt * wt * half.powi(2 * self.n_c as i32)
    }

    fn chirped_phase_derivative(&self, t: f64) -> f64 {
        let w = self.omega;
        let wt = w * t;
        let b = w / (2.0 * self.n_osc as f64);
        let (sb, cb) = (b * t).sin_cos();
        let pow = sb.powi(2 * self.n_c as i32);
        let mut d = w + self.eta0 * 2.0 * w * wt * pow;
        if self.n_c > 0 {
            d += self.eta0 * wt * wt * 2.0 * self.n_c as f64 * sb.powi(2 * self.n_c as i32 - 1) * cb * b;
        }
        d
    }

    fn f1(&self, t: f64) -> f64 {
        let env = (self.omega * t / (2.0 * self.n_osc as f64)).sin();
        env * env * self.chirped_phase(t).sin()
    }

    fn f1_derivative(&self, t: f64) -> f64 {
        let b = self.omega / (2.0 * self.n_osc as f64);
        let (sb, cb) = (b * t).sin_cos();
        let (sp, cp) = self.chirped_phase(t).sin_cos();
        2.0 * b * sb * cb * sp + sb * sb * cp * self.chirped_phase_derivative(t)
    }

    /// `e E(t)` in field0 units; zero outside `[0, T_p]`.
    pub fn e_field(&self, t: f64) -> Vec3 {
        let tp = self.t_p();
        if t < 0.0 || t > tp {
            return crate::vec3::ZERO;
        }
        let scalar = match self.shape {
            PulseShape::FieldSine2 => {
                let env = (self.omega * t / (2.0 * self.n_osc as f64)).sin();
                -self.amplitude * self.n0 * env * env * (self.omega * t).sin()
            }
            // e E = -d(eA)/dt with eA = -amplitude * f_j.
            PulseShape::ChirpF1 => self.amplitude * self.f1_derivative(t),
            PulseShape::ChirpF2 => {
                self.amplitude * 2.0 * (self.f1(t) + 1.0) * self.f1_derivative(t)
            }
        };
        self.eps_pol * scalar
    }

    /// `e A(t)` in p0 units; zero for `t <= 0`, held at `e A(T_p)` after the
    /// pulse.
    pub fn vector_potential(&self, t: f64) -> Vec3 {
        let tp = self.t_p();
        if t <= 0.0 {
            return crate::vec3::ZERO;
        }
        let t = t.min(tp);
        let scalar = match self.shape {
            PulseShape::FieldSine2 => {
                // Closed-form antiderivative of envelope x carrier:
                // sin^2(wt/2N) sin(wt) = sin(wt)/2 - [sin(w+ t) + sin(w- t)]/4
                // with w+- = w (1 +- 1/N); e A = + integral of the physical
                // field (e = -|e| twice).
                let w = self.omega;
                let n = self.n_osc as f64;
                let wp = w * (1.0 + 1.0 / n);
                let wm = w * (1.0 - 1.0 / n);
                let term = |k: f64| if k == 0.0 { 0.0 } else { (1.0 - (k * t).cos()) / k };
                self.amplitude * self.n0 * (0.5 * term(w) - 0.25 * term(wp) - 0.25 * term(wm))
            }
            PulseShape::ChirpF1 => -self.amplitude * self.f1(t),
            PulseShape::ChirpF2 => {
                let f1 = self.f1(t);
                -self.amplitude * ((f1 + 1.0) * (f1 + 1.0) - 1.0)
            }
        };
        self.eps_pol * scalar
    }
}

/// CEP that centers the chirped vector-potential maximum at `T_p/2`,
/// reduced to `(-pi, pi]`.
pub fn flat_top_cep(n_osc: u32, eta0: f64) -> f64 {
    let pn = PI * n_osc as f64;
    let v = -(pn + eta0 * pn * pn + PI / 2.0);
    let mut r = v.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}
