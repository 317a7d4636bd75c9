//! Long-time wave decomposition for the focusing MKdV equation
//! `q_t + 6 q^2 q_x + q_xxx = 0` with step-like data `q -> c∓` as `x -> ∓∞`,
//! `c_- > c_+ >= 0`.
//!
//! The crate has two halves that check each other:
//!
//! * closed-form machinery — scattering presets, Blaschke/Cauchy corrections,
//!   Whitham modulation speeds, elliptic/theta traveling waves, soliton and
//!   breather profiles, and the region dispatcher assembling the large-time
//!   wave picture ([`asymptotics`]);
//! * a direct finite-difference integrator ([`pde`]) used as the ground-truth
//!   oracle for every closed-form prediction.
//!
//! Grid sweeps (profile evaluation, modulation scans, comparisons) are
//! data-parallel through [`parallel`]; build with `--no-default-features`
//! for a fully sequential crate.

pub mod asymptotics;
pub mod error;
pub mod parallel;
pub mod pde;
pub mod profiles;
pub mod quad;
pub mod scattering;
pub mod specfun;
pub mod util;
pub mod whitham;

pub use error::{MkdvError, Result};
pub use num_complex::Complex64;
