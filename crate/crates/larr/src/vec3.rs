//! Minimal real 3-vector used for momenta, field directions and positions.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
pub const EX: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
pub const EY: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
pub const EZ: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        self * (1.0 / n)
    }
}

/// Unit vector `(sin t cos f, sin t sin f, cos t)` for polar angle `t` and
/// azimuth `f`.
pub fn direction_from_angles(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sf, cf) = phi.sin_cos();
    Vec3::new(st * cf, st * sf, ct)
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn direction_examples() {
        let p = direction_from_angles(0.0, 0.0);
        assert!((p - EZ).norm() < 1e-15);

        let q = direction_from_angles(std::f64::consts::FRAC_PI_2, std::f64::consts::PI);
        assert!((q - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);

        let r = direction_from_angles(0.432 * std::f64::consts::PI, std::f64::consts::PI);
        assert!((r.x - (-0.977268)).abs() < 1e-5);
        assert!(r.y.abs() < 1e-15);
        assert!((r.z - 0.212007).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn directions_are_unit(theta in -10.0f64..10.0, phi in -10.0f64..10.0) {
            let d = direction_from_angles(theta, phi);
            prop_assert!((d.norm() - 1.0).abs() < 1e-14);
        }
    }
}
