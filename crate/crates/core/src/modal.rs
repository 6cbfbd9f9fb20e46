//! Closed-form solution of the linearized perturbation problem.
//!
//! A surface mode `h(x) = h0 + eps*exp(ikx + sigma*t)` drives a velocity
//! perturbation `(u(z), w(z))*exp(ikx + sigma*t)` obeying
//!
//! ```text
//! u'' - N w' - K u = 0        K = (4a+6b)/(3a) k^2    N = -i (a+6b)/(3a) k
//! w'' - M u' - L w = 0        L = 3a/(4a+6b) k^2      M = -i (a+6b)/(4a+6b) k
//! ```
//!
//! with `a = alpha = 2 eta/(1 + eta sigma/G)` and `b = beta = B/sigma`. The
//! characteristic roots are a double pair `+-k`, so the no-slip solution is
//!
//! ```text
//! u = b sinh(kz) + U kz (b cosh(kz) - i d sinh(kz))
//! w = d sinh(kz) + U kz (-d cosh(kz) - i b sinh(kz))
//! ```
//!
//! with `U = (a+6b)/(7a+6b)`. The two traction conditions at `z = h` fix the
//! amplitudes `b`, `d`, and the kinematic condition `sigma = w(h)` closes the
//! eigenvalue problem.
//!
//! For `Q = kh` above [`SCALE_THRESHOLD`](crate::hyperbolic::SCALE_THRESHOLD)
//! the hyperbolics are carried in scaled form; `b`, `d` then shrink like
//! `exp(-Q)` and are kept as scaled mantissas alongside their (possibly
//! underflowed) plain values.

use num_complex::Complex64;

use crate::hyperbolic::ScaledHyperbolic;
use crate::params::{MaterialParams, Modulus};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Velocity amplitudes and boundary determinant in scaled form:
/// `b = b * exp(-log_scale)`, `d = d * exp(-log_scale)`,
/// `delta = delta * exp(2 log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledAmplitudes {
    pub b: Complex64,
    pub d: Complex64,
    pub delta: Complex64,
    pub log_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalCoefficients {
    pub wavenumber: f64,
    pub q: f64,
    pub sigma: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub ode_k: Complex64,
    pub ode_l: Complex64,
    pub ode_m: Complex64,
    pub ode_n: Complex64,
    pub u: Complex64,
    pub v: Complex64,
    /// `V - U = 3a/(7a+6b)`, evaluated without cancellation.
    pub v_minus_u: Complex64,
    pub delta: Complex64,
    pub b: Complex64,
    pub d: Complex64,
    pub scaled: ScaledAmplitudes,
}

struct Bulk {
    alpha: Complex64,
    beta: Complex64,
    u: Complex64,
    v: Complex64,
    v_minus_u: Complex64,
}

fn bulk(p: &MaterialParams, sigma: Complex64) -> Result<Bulk> {
    if sigma == Complex64::new(0.0, 0.0) {
        return Err(Error::NeutralLimit);
    }
    let b_mod = match p.bulk_modulus {
        Modulus::Finite(b) => b,
        Modulus::Infinite => return Err(Error::IncompressibleLimit),
    };
    let relax = 1.0 + sigma * p.maxwell_time();
    if relax.norm() == 0.0 {
        return Err(Error::MaxwellResonance { sigma: sigma.re });
    }
    let alpha = 2.0 * p.eta / relax;
    let beta = b_mod / sigma;
    let denom = 7.0 * alpha + 6.0 * beta;
    Ok(Bulk {
        alpha,
        beta,
        u: (alpha + 6.0 * beta) / denom,
        v: (4.0 * alpha + 6.0 * beta) / denom,
        v_minus_u: 3.0 * alpha / denom,
    })
}

/// Modal coefficients at a complex growth rate.
pub fn modal_coefficients_complex(
    p: &MaterialParams,
    k: f64,
    sigma: Complex64,
) -> Result<ModalCoefficients> {
    p.validate()?;
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k,
            reason: "must be non-negative and finite",
        });
    }
    let Bulk {
        alpha,
        beta,
        u,
        v,
        v_minus_u,
    } = bulk(p, sigma)?;
    let k2 = k * k;
    let ode_k = (4.0 * alpha + 6.0 * beta) / (3.0 * alpha) * k2;
    let ode_l = 3.0 * alpha / (4.0 * alpha + 6.0 * beta) * k2;
    let ode_m = -I * (alpha + 6.0 * beta) / (4.0 * alpha + 6.0 * beta) * k;
    let ode_n = -I * (alpha + 6.0 * beta) / (3.0 * alpha) * k;

    let q = k * p.thickness;
    let zero = Complex64::new(0.0, 0.0);
    let (scaled, delta, b, d) = if k == 0.0 {
        // uniform mode: no traction forcing and no flow
        let s = ScaledAmplitudes {
            b: zero,
            d: zero,
            delta: zero,
            log_scale: 0.0,
        };
        (s, zero, zero, zero)
    } else {
        let hyp = ScaledHyperbolic::new(q);
        let (sh, ch) = (hyp.sinh, hyp.cosh);
        let damp = hyp.inv_scale();
        let damp2 = damp * damp;
        let ak = alpha * k;
        let delta = ak * ak * (v * v * damp2 + u * sh * sh + u * u * q * q * damp2);
        if delta.norm() == 0.0 || !delta.is_finite() {
            return Err(Error::SingularBoundary {
                q,
                sigma: sigma.re,
                eta: p.eta,
            });
        }
        let shear_load = 6.0 * p.strain_rate() * p.eta * k;
        let capillary_load = p.surface_energy * k2;
        let b = -I * ak / delta
            * (shear_load * (v * ch - u * q * sh)
                + capillary_load * (-v_minus_u * sh + u * q * ch));
        let d = -ak / delta
            * (shear_load * (-v_minus_u * sh - u * q * ch)
                + capillary_load * (v * ch + u * q * sh));
        let s = ScaledAmplitudes {
            b,
            d,
            delta,
            log_scale: hyp.log_scale,
        };
        let scale = hyp.log_scale.exp();
        (s, delta * scale * scale, b * damp, d * damp)
    };

    Ok(ModalCoefficients {
        wavenumber: k,
        q,
        sigma,
        alpha,
        beta,
        ode_k,
        ode_l,
        ode_m,
        ode_n,
        u,
        v,
        v_minus_u,
        delta,
        b,
        d,
        scaled,
    })
}

/// Modal coefficients at a real growth rate.
pub fn modal_coefficients(p: &MaterialParams, k: f64, sigma: f64) -> Result<ModalCoefficients> {
    modal_coefficients_complex(p, k, Complex64::new(sigma, 0.0))
}

/// Velocity and its first two derivatives at one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub u: Complex64,
    pub du: Complex64,
    pub d2u: Complex64,
    pub w: Complex64,
    pub dw: Complex64,
    pub d2w: Complex64,
}

/// Perturbation velocity `(u(z), w(z))` on `[0, h]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityField {
    b: Complex64,
    d: Complex64,
    u_coef: Complex64,
    /// `1 - U`, kept separately since `U -> 1` for stiff bulk response.
    one_minus_u: Complex64,
    k: f64,
    log_scale: f64,
    thickness: f64,
}

impl VelocityField {
    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    /// `(u(z), w(z))`.
    pub fn velocity(&self, z: f64) -> (Complex64, Complex64) {
        let f = self.at(z);
        (f.u, f.w)
    }

    pub fn at(&self, z: f64) -> FieldPoint {
        let k = self.k;
        let x = k * z;
        let (s, c) = if self.log_scale == 0.0 {
            (x.sinh(), x.cosh())
        } else {
            let up = (x - self.log_scale).exp();
            let down = (-x - self.log_scale).exp();
            (0.5 * (up - down), 0.5 * (up + down))
        };
        let (b, d, uc) = (self.b, self.d, self.u_coef);
        // secular combinations
        let su = b * c - I * d * s;
        let su_d = b * s - I * d * c;
        let sw = -d * c - I * b * s;
        let sw_d = -d * s - I * b * c;
        FieldPoint {
            u: b * s + uc * x * su,
            du: k * (b * c + uc * su + uc * x * su_d),
            d2u: k * k * (b * s + 2.0 * uc * su_d + uc * x * su),
            w: d * s + uc * x * sw,
            // d c + U sw without the cancellation of d c against U d c
            dw: k * (self.one_minus_u * d * c - I * uc * b * s + uc * x * sw_d),
            d2w: k * k * (d * s + 2.0 * uc * sw_d + uc * x * sw),
        }
    }
}

/// The no-slip velocity field for given coefficients.
pub fn velocity_field(c: &ModalCoefficients, p: &MaterialParams, k: f64) -> VelocityField {
    debug_assert_eq!(c.wavenumber, k);
    VelocityField {
        b: c.scaled.b,
        d: c.scaled.d,
        u_coef: c.u,
        one_minus_u: 2.0 * c.v_minus_u,
        k,
        log_scale: c.scaled.log_scale,
        thickness: p.thickness,
    }
}

/// Traction boundary system at `z = h` for the amplitudes `(b, d)`.
///
/// Rows are `T_xz` and `T_zz`, columns the unit-`b` and unit-`d` fields from
/// the no-slip general solution. Entries are scaled by `exp(-log_scale)` so
/// that the solution is the scaled amplitude pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySystem {
    pub matrix: [[Complex64; 2]; 2],
    pub rhs: [Complex64; 2],
    pub log_scale: f64,
}

impl BoundarySystem {
    pub fn determinant(&self) -> Complex64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Solves by Cramer's rule, returning scaled `(b, d)`.
    pub fn solve(&self) -> Option<(Complex64, Complex64)> {
        let det = self.determinant();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let m = &self.matrix;
        let b = (self.rhs[0] * m[1][1] - m[0][1] * self.rhs[1]) / det;
        let d = (m[0][0] * self.rhs[1] - self.rhs[0] * m[1][0]) / det;
        Some((b, d))
    }

    /// `matrix * (b, d) - rhs`.
    pub fn residual(&self, b: Complex64, d: Complex64) -> [Complex64; 2] {
        let m = &self.matrix;
        [
            m[0][0] * b + m[0][1] * d - self.rhs[0],
            m[1][0] * b + m[1][1] * d - self.rhs[1],
        ]
    }
}

pub fn boundary_system(c: &ModalCoefficients, p: &MaterialParams) -> BoundarySystem {
    let k = c.wavenumber;
    let q = c.q;
    let hyp = ScaledHyperbolic::new(q);
    let (sh, ch) = (hyp.sinh, hyp.cosh);
    let (uc, alpha, beta) = (c.u, c.alpha, c.beta);
    let ik = I * k;

    // unit b
    let u_b = sh + uc * q * ch;
    let w_b = -I * uc * q * sh;
    let du_b = k * (ch * (1.0 + uc) + uc * q * sh);
    let dw_b = -I * uc * k * (sh + q * ch);
    // unit d
    let u_d = -I * uc * q * sh;
    let w_d = sh - uc * q * ch;
    let du_d = -I * uc * k * (sh + q * ch);
    let dw_d = k * (ch * (1.0 - uc) - uc * q * sh);

    // divergence ik u + w' is (1 - U) times (ik sinh, k cosh); forming it by
    // subtraction loses every digit that beta/alpha gains
    let one_minus_u = 2.0 * c.v_minus_u;
    let div_b = one_minus_u * ik * sh;
    let div_d = one_minus_u * k * ch;
    let txz = |w: Complex64, du: Complex64| 0.5 * alpha * (ik * w + du);
    let tzz = |u: Complex64, dw: Complex64, div: Complex64| alpha / 3.0 * (-ik * u + 2.0 * dw) + beta * div;
    BoundarySystem {
        matrix: [
            [txz(w_b, du_b), txz(w_d, du_d)],
            [tzz(u_b, dw_b, div_b), tzz(u_d, dw_d, div_d)],
        ],
        rhs: [
            -6.0 * p.strain_rate() * p.eta * ik,
            Complex64::new(-p.surface_energy * k * k, 0.0),
        ],
        log_scale: hyp.log_scale,
    }
}

/// Amplitudes `(b, d)` from a direct solve of the traction conditions.
pub fn direct_amplitudes(c: &ModalCoefficients, p: &MaterialParams) -> Result<(Complex64, Complex64)> {
    let system = boundary_system(c, p);
    let (b, d) = system.solve().ok_or(Error::SingularBoundary {
        q: c.q,
        sigma: c.sigma.re,
        eta: p.eta,
    })?;
    let damp = (-system.log_scale).exp();
    Ok((b * damp, d * damp))
}

/// Kinematic residual `sigma - w(h)` at a complex growth rate.
pub fn kinematic_residual_complex(p: &MaterialParams, k: f64, sigma: Complex64) -> Result<Complex64> {
    let c = modal_coefficients_complex(p, k, sigma)?;
    if k == 0.0 {
        return Ok(sigma);
    }
    let hyp = ScaledHyperbolic::new(c.q);
    let (b, d) = (c.scaled.b, c.scaled.d);
    let w_top = d * hyp.sinh + c.u * c.q * (-d * hyp.cosh - I * b * hyp.sinh);
    Ok(sigma - w_top)
}

/// Kinematic residual `sigma - w(h)`; its zeros in `sigma` are the growth
/// rates of the mode.
pub fn kinematic_residual(p: &MaterialParams, k: f64, sigma: f64) -> Result<Complex64> {
    kinematic_residual_complex(p, k, Complex64::new(sigma, 0.0))
}
