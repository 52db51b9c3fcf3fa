//! Strong-field recombination spectra with leading-order nondipole
//! corrections: pulse models, analytic Coulomb kernels, the time-domain
//! amplitude integral, spectral analysis tools and a classical cross-check.

pub mod amplitude;
pub mod analysis;
pub mod classical;
pub mod cli;
mod jet;
pub mod nordsieck;
pub mod ode;
pub mod pulse;
pub mod special;
pub mod units;
pub mod vec3;

pub use pulse::{PulseShape, PulseSpec};
pub use vec3::Vec3;
