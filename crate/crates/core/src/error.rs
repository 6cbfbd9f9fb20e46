use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("infinite shear modulus: use the viscous-limit growth rate instead")]
    ViscousLimit,

    #[error("infinite bulk modulus: modal coefficients diverge, use the dimensionless or viscous-limit path")]
    IncompressibleLimit,

    #[error("growth rate is zero: beta = B/sigma is singular, use the neutral-limit path")]
    NeutralLimit,

    #[error("Maxwell resonance at sigma = {sigma} (1 + eta*sigma/G = 0)")]
    MaxwellResonance { sigma: f64 },

    #[error("pole of 2R/(1+R) at R = -1")]
    Pole,

    #[error("singular boundary system at Q = {q} (sigma = {sigma}, eta = {eta})")]
    SingularBoundary { q: f64, sigma: f64, eta: f64 },

    #[error("no sign change of the dispersion relation for R in ({r_min}, {r_max}] at Q = {q}")]
    NoBracket { q: f64, r_min: f64, r_max: f64 },

    #[error("root refinement did not converge after {iterations} iterations (bracket [{lo}, {hi}])")]
    NotConverged { iterations: usize, lo: f64, hi: f64 },

    #[error("non-finite state at step {step} of {n_steps} (z = {z})")]
    IntegrationOverflow { step: usize, n_steps: usize, z: f64 },

    #[error("ill-conditioned shooting boundary system (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("unforced film (f*A = 0 and gamma = 0): the kinematic residual equals sigma and has no nonzero root")]
    Unforced,

    #[error("computed steady stress is zero; cannot form a ratio")]
    ZeroStress,
}
