//! Truncated polynomial algebra over four nilpotent generators.
//!
//! An element is a complex polynomial in e1..e4 with e_i^2 = 0. Evaluating a
//! smooth scalar chain in this algebra yields every mixed first partial
//! derivative (one order per generator) exactly, to machine precision. The
//! kernel module seeds three generators with momentum-space directions and
//! the fourth with the bound-state screening parameter.

use num_complex::Complex64;

pub const N: usize = 16;

#[derive(Debug, Clone, Copy)]
pub struct Jet {
    /// Coefficients indexed by generator bitmask (bit i = generator e_{i+1}).
    pub c: [Complex64; N],
}

const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);

impl Jet {
    pub fn zero() -> Jet {
        Jet { c: [ZERO_C; N] }
    }

    pub fn constant(v: Complex64) -> Jet {
        let mut j = Jet::zero();
        j.c[0] = v;
        j
    }

    pub fn constant_re(v: f64) -> Jet {
        Jet::constant(Complex64::new(v, 0.0))
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = Jet::zero();
        for m in 0..N {
            r.c[m] = self.c[m] + o.c[m];
        }
        r
    }

    pub fn scale(&self, s: Complex64) -> Jet {
        let mut r = Jet::zero();
        for m in 0..N {
            r.c[m] = self.c[m] * s;
        }
        r
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut r = Jet::zero();
        for m in 0..N {
            // Split the mask over all disjoint submask pairs.
            let mut s = m;
            let mut acc = ZERO_C;
            loop {
                acc += self.c[s] * o.c[m ^ s];
                if s == 0 {
                    break;
                }
                s = (s - 1) & m;
            }
            r.c[m] = acc;
        }
        r
    }

    /// Apply a scalar function given its Taylor coefficients
    /// `h[k] = h^(k)(x0) / k!` at `x0 = self.c[0]`.
    pub fn compose(&self, h: &[Complex64; 5]) -> Jet {
        let mut delta = *self;
        delta.c[0] = ZERO_C;
        let d2 = delta.mul(&delta);
        let d3 = d2.mul(&delta);
        let d4 = d3.mul(&delta);
        let mut r = Jet::constant(h[0]);
        r = r.add(&delta.scale(h[1]));
        r = r.add(&d2.scale(h[2]));
        r = r.add(&d3.scale(h[3]));
        r = r.add(&d4.scale(h[4]));
        r
    }

    /// Reciprocal 1/x.
    pub fn recip(&self) -> Jet {
        let x0 = self.c[0];
        let inv = 1.0 / x0;
        let mut h = [ZERO_C; 5];
        let mut cur = inv;
        for (k, slot) in h.iter_mut().enumerate() {
            *slot = cur;
            let _ = k;
            cur = -cur * inv;
        }
        self.compose(&h)
    }

    /// Principal-branch complex power x^a for constant exponent `a`.
    pub fn powc(&self, a: Complex64) -> Jet {
        let x0 = self.c[0];
        let w = x0.powc(a); // principal branch
        let inv = 1.0 / x0;
        let mut h = [ZERO_C; 5];
        let mut coeff = w;
        for (k, slot) in h.iter_mut().enumerate() {
            *slot = coeff;
            coeff = coeff * (a - k as f64) * inv / (k as f64 + 1.0);
        }
        self.compose(&h)
    }
}
