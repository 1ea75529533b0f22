//! Recurrence complexity of almost periodic functions.
//!
//! The crate measures how long one has to wait for an ε-almost period of a
//! quasiperiodic function and how that waiting time scales as ε → 0 (the
//! Diophantine dimension). The building blocks:
//!
//! * [`contfrac`]: exact continued fractions and Diophantine profiles,
//! * [`apfun`]: trigonometric polynomials over a frequency basis, their torus
//!   representation and certified shift distances,
//! * [`kronecker`]: solutions of `‖ω_j τ‖ < δ`,
//! * [`periods`]: almost-period scans and inclusion lengths,
//! * [`dimension`]: log-log slope fits and box counting,
//! * [`evolution`]: strongly monotone ODEs driven by almost periodic forcing,
//! * [`ergodic`]: Birkhoff averages and the Liouville closeness bound,
//! * [`cli`]: experiment configs, artifacts and the result cache.

pub mod apfun;
pub mod cli;
pub mod contfrac;
pub mod dimension;
pub mod ergodic;
pub mod error;
pub mod evolution;
pub mod exact;
pub mod kronecker;
pub mod periods;

pub use error::{Error, Result};
