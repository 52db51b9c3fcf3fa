//! Atomic-unit constants and the handful of unit conversions the CLI needs.
//!
//! Every internal computation runs in atomic units: `m_e = hbar = |e| = 1`,
//! `c = 1/alpha`. Conversions to laboratory units happen only at the I/O
//! boundary.

/// CODATA 2018 fine-structure constant.
pub const ALPHA: f64 = 7.297_352_569_3e-3;

/// Speed of light in atomic units, `1/alpha`.
pub const C_AU: f64 = 1.0 / ALPHA;

/// Hartree energy in electronvolts.
pub const HARTREE_EV: f64 = 27.211_386_245_988;

/// Atomic units collected in one place, with their SI magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Fine-structure constant (dimensionless).
    pub alpha: f64,
    /// Speed of light in atomic units.
    pub c_au: f64,
    /// Unit of momentum `p0 = alpha m_e c` in kg m/s.
    pub p0_si: f64,
    /// Unit of energy `E0 = alpha^2 m_e c^2` in eV.
    pub e0_ev: f64,
    /// Unit of length (Bohr radius) in m.
    pub a0_si: f64,
    /// Unit of time in s.
    pub t0_si: f64,
    /// Unit of field strength in V/m.
    pub field0_si: f64,
    /// Unit of intensity `I0 = eps0 c field0^2` in W/cm^2.
    pub i0_w_cm2: f64,
}

impl Constants {
    pub const fn new() -> Self {
        Constants {
            alpha: ALPHA,
            c_au: C_AU,
            p0_si: 1.992_851_914e-24,
            e0_ev: HARTREE_EV,
            a0_si: 5.291_772_109e-11,
            t0_si: 2.418_884_326_58e-17,
            field0_si: 5.142_206_747_6e11,
            i0_w_cm2: 7.019e16,
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::new()
    }
}

/// eV -> E0.
pub fn energy_ev_to_au(e_ev: f64) -> f64 {
    e_ev / HARTREE_EV
}

/// E0 -> eV.
pub fn energy_au_to_ev(e_au: f64) -> f64 {
    e_au * HARTREE_EV
}
