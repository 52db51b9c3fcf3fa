//! Classical electron dynamics in the plane-wave pulse: the full
//! Newton-Lorentz equation with retarded fields, and the analytic
//! leading-order 1/c momentum correction it validates.

use crate::ode::{self, OdeError, OdeOptions};
use crate::pulse::PulseSpec;
use crate::vec3::{Vec3, ZERO};

/// Position, kinetic momentum and time along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryState {
    pub r: Vec3,
    pub pi: Vec3,
    pub t: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-10, atol: 1e-12 }
    }
}

/// Right-hand side of the Newton-Lorentz equation with the full retarded
/// field: `dpi/dt = eE(t - n.r/c) + pi x (n x eE) / c`, `dr/dt = pi`.
/// No 1/c expansion is made here; `c_value` may be infinite, which recovers
/// the dipole force `eE(t)`.
pub fn lorentz_rhs(state: &TrajectoryState, pulse: &PulseSpec, c_value: f64) -> (Vec3, Vec3) {
    let t_ret = if c_value.is_finite() {
        state.t - pulse.n_prop.dot(state.r) / c_value
    } else {
        state.t
    };
    let ee = pulse.e_field(t_ret);
    let mut force = ee;
    if c_value.is_finite() {
        force += state.pi.cross(pulse.n_prop.cross(ee)) * (1.0 / c_value);
    }
    (state.pi, force)
}

/// Integrate the Newton-Lorentz equation from `r0` with incident momentum
/// `p_asymptotic`, starting at t = 0 before the pulse reaches the particle
/// and running until the retarded time at the particle has passed the pulse.
/// Returns the accepted-step sequence.
pub fn integrate_trajectory(
    r0: Vec3,
    p_asymptotic: Vec3,
    pulse: &PulseSpec,
    c_value: f64,
    ctrl: &StepControl,
) -> Result<Vec<TrajectoryState>, OdeError> {
    let t_p = pulse.t_p();
    let mut t_end = t_p;
    if c_value.is_finite() {
        // The retarded time advances as 1 - n.pi/c; stretch the window so it
        // covers the whole pulse, plus the initial propagation delay.
        let drift = (p_asymptotic.norm() / c_value).min(0.5);
        t_end = (t_p + (pulse.n_prop.dot(r0) / c_value).max(0.0)) / (1.0 - drift);
    }
    let y0 = pack(r0, p_asymptotic);
    let opts = OdeOptions { rtol: ctrl.rtol, atol: ctrl.atol, ..Default::default() };
    let mut states = Vec::new();
    let mut observer = |t: f64, y: &[f64; 6]| {
        let (r, pi) = unpack(y);
        states.push(TrajectoryState { r, pi, t });
    };
    ode::integrate(
        |t, y| {
            let (r, pi) = unpack(y);
            let (rdot, pidot) = lorentz_rhs(&TrajectoryState { r, pi, t }, pulse, c_value);
            pack(rdot, pidot)
        },
        0.0,
        t_end,
        y0,
        &opts,
        Some(&mut observer),
    )?;
    Ok(states)
}

fn pack(r: Vec3, pi: Vec3) -> [f64; 6] {
    [r.x, r.y, r.z, pi.x, pi.y, pi.z]
}

fn unpack(y: &[f64; 6]) -> (Vec3, Vec3) {
    (Vec3::new(y[0], y[1], y[2]), Vec3::new(y[3], y[4], y[5]))
}

/// Position along the dipole trajectory, `r0 + p t - int_0^t eA dt'`,
/// with the vector-potential integral done by per-cycle Gauss panels.
pub fn dipole_position(r0: Vec3, p: Vec3, pulse: &PulseSpec, t: f64) -> Vec3 {
    let mut drift = ZERO;
    if t > 0.0 {
        let cycle = 2.0 * std::f64::consts::PI / pulse.omega;
        let panels = ((t / cycle * 8.0).ceil() as usize).max(1);
        let (xs, ws) = crate::nordsieck::gauss_legendre(16);
        let h = t / panels as f64;
        for k in 0..panels {
            let a = k as f64 * h;
            for (&x, &w) in xs.iter().zip(ws.iter()) {
                drift += pulse.vector_potential(a + 0.5 * h * (x + 1.0)) * (0.5 * h * w);
            }
        }
    }
    r0 + p * t - drift
}

/// Leading-order momentum correction
/// `dpi = -(n.r/c) eE(t) - (n/c)(p.eA) + ((eA)^2 / 2c) n`,
/// so that `pi = p - eA + dpi` matches the full dynamics to O(1/c^2).
pub fn analytic_momentum_correction(
    p: Vec3,
    pulse: &PulseSpec,
    t: f64,
    r: Vec3,
    c_value: f64,
) -> Vec3 {
    let ee = pulse.e_field(t);
    let ea = pulse.vector_potential(t);
    let n = pulse.n_prop;
    ee * (-n.dot(r) / c_value) + n * ((-p.dot(ea) + 0.5 * ea.norm2()) / c_value)
}

/// Kinetic energy `pi^2/2` expanded to first order in 1/c:
/// `(p - eA)^2/2 - (n.p/c)[eA.p - (eA)^2/2] + (n.r/c)(p - eA).eE`.
pub fn kinetic_energy_nondipole(
    p: Vec3,
    pulse: &PulseSpec,
    t: f64,
    r: Vec3,
    c_value: f64,
) -> f64 {
    let ea = pulse.vector_potential(t);
    let ee = pulse.e_field(t);
    let n = pulse.n_prop;
    let dipole = 0.5 * (p - ea).norm2();
    let recoil = -n.dot(p) / c_value * (ea.dot(p) - 0.5 * ea.norm2());
    let retard = n.dot(r) / c_value * (p - ea).dot(ee);
    dipole + recoil + retard
}
