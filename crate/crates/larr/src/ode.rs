//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4)) for small
//! fixed-size real systems.

/// Tolerances and step limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_initial: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h_initial: 1e-3,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OdeError {
    #[error("step count limit exceeded at t = {0}")]
    StepLimit(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `dy/dt = f(t, y)` from `t0` to `t1` (requires `t1 > t0`).
/// Returns the final state; `observer`, when given, sees every accepted step.
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &OdeOptions,
    mut observer: Option<&mut dyn FnMut(f64, &[f64; N])>,
) -> Result<[f64; N], OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_initial.min(t1 - t0).min(opts.h_max);
    let mut k0 = f(t, &y);
    let mut err_prev = 1.0f64;
    if let Some(obs) = observer.as_deref_mut() {
        obs(t, &y);
    }
    for _ in 0..opts.max_steps {
        if t >= t1 {
            return Ok(y);
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let mut k = [[0.0; N]; 7];
        k[0] = k0;
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[stage + 1] = f(t + C[stage] * h, &ys);
        }
        // 5th-order solution is the stage-6 state (FSAL); error from E weights.
        let mut y5 = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[5][j];
            if a != 0.0 {
                for i in 0..N {
                    y5[i] += h * a * kj[i];
                }
            }
        }
        let mut err = 0.0f64;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err += (h * e / sc).powi(2);
        }
        err = (err / N as f64).sqrt().max(1e-30);
        if err <= 1.0 {
            t += h;
            y = y5;
            k0 = k[6];
            if let Some(obs) = observer.as_deref_mut() {
                obs(t, &y);
            }
            // PI step-size control.
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h = (h * fac.clamp(0.2, 5.0)).min(opts.h_max);
            err_prev = err;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
        if h < 1e-14 * (t1 - t0) {
            return Err(OdeError::StepUnderflow(t));
        }
    }
    Err(OdeError::StepLimit(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            3.0,
            [1.0],
            &OdeOptions::default(),
            None,
        )
        .unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let opts = OdeOptions { rtol: 1e-10, atol: 1e-13, ..Default::default() };
        let y = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            20.0 * std::f64::consts::PI,
            [1.0, 0.0],
            &opts,
            None,
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-7 && y[1].abs() < 1e-7, "y={:?}", y);
    }

    #[test]
    fn oscillatory_quadrature() {
        // integral of cos(50 t) over [0, 1] = sin(50)/50.
        let y = integrate(
            |t, _: &[f64; 1]| [(50.0 * t).cos()],
            0.0,
            1.0,
            [0.0],
            &OdeOptions::default(),
            None,
        )
        .unwrap();
        assert!((y[0] - 50.0f64.sin() / 50.0).abs() < 1e-9);
    }

    #[test]
    fn tolerance_tightening_improves_error() {
        let run = |rtol: f64| {
            integrate(
                |t, y: &[f64; 1]| [y[0] * t.cos()],
                0.0,
                10.0,
                [1.0],
                &OdeOptions { rtol, atol: rtol * 1e-3, ..Default::default() },
                None,
            )
            .unwrap()[0]
        };
        let exact = 10.0f64.sin().exp();
        let loose = (run(1e-5) - exact).abs();
        let tight = (run(1e-10) - exact).abs();
        assert!(tight < loose, "loose={} tight={}", loose, tight);
        assert!(tight < 1e-8 * exact);
    }

    #[test]
    fn observer_sees_monotonic_times() {
        let mut times = Vec::new();
        let _ = integrate(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            1.0,
            [1.0],
            &OdeOptions::default(),
            Some(&mut |t, _: &[f64; 1]| times.push(t)),
        )
        .unwrap();
        assert!(times.first() == Some(&0.0) && (times.last().unwrap() - 1.0).abs() < 1e-12);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
    }
}
