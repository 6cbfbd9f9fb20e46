//! Steady stress and linear stability of a viscoelastic film under
//! normal-incidence ion irradiation.
//!
//! The film is a Maxwell viscoelastic layer of thickness `h` on a rigid
//! substrate. The beam injects a stress-free "pancake" strain at rate
//! `f·A`, which the film relaxes viscously. This crate computes:
//!
//! - the flat steady state ([`steady`]),
//! - the closed-form perturbation field and kinematic residual ([`modal`]),
//! - the dimensionless dispersion relation, its neutral boundary and
//!   asymptotic limits ([`dispersion`]),
//! - an independent shooting solution of the same linear problem
//!   ([`oracle`]) used to cross-check the closed forms.
//!
//! All quantities are SI internally.

pub mod dispersion;
mod error;
pub mod hyperbolic;
pub mod modal;
pub mod oracle;
pub mod params;
pub(crate) mod roots;
pub mod steady;

pub use error::{Error, Result};
pub use params::{DimensionlessState, MaterialParams, Modulus, SymTensor3};
