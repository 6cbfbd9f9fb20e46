//! Physical and dimensionless parameter sets.
//!
//! [`MaterialParams`] holds the dimensional film and beam constants in SI
//! units. [`DimensionlessState`] holds the reduced groups
//!
//! ```text
//! R = eta*sigma/G   Q = h*k   D = 6*f*A*eta/G   C = gamma/(2*G*h)   Gamma = B/G
//! ```
//!
//! The elastic moduli may be [`Modulus::Infinite`] to request the purely
//! viscous (`G -> inf`) or incompressible (`B -> inf`) limits. Those limits
//! are carried as a flag and never approximated by large finite numbers.

use std::ops::{Add, Mul, Sub};

use crate::{Error, Result};

/// An elastic modulus (or modulus ratio) that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modulus {
    Finite(f64),
    Infinite,
}

impl Modulus {
    pub fn finite(self) -> Option<f64> {
        match self {
            Modulus::Finite(v) => Some(v),
            Modulus::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Modulus::Infinite)
    }

    /// `1/self`, with `1/inf = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Modulus::Finite(v) => 1.0 / v,
            Modulus::Infinite => 0.0,
        }
    }

    /// Value as an `f64`, mapping the sentinel to `f64::INFINITY`.
    pub fn as_f64(self) -> f64 {
        match self {
            Modulus::Finite(v) => v,
            Modulus::Infinite => f64::INFINITY,
        }
    }
}

impl From<f64> for Modulus {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            Modulus::Infinite
        } else {
            Modulus::Finite(v)
        }
    }
}

/// Film and beam constants, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Viscosity, Pa·s.
    pub eta: f64,
    /// Shear modulus G, Pa.
    pub shear_modulus: Modulus,
    /// Bulk modulus B, Pa.
    pub bulk_modulus: Modulus,
    /// Surface energy gamma, N/m.
    pub surface_energy: f64,
    /// Ion flux f, ions/(m²·s).
    pub flux: f64,
    /// Stress-free strain per ion A, m²/ion.
    pub strain_per_dose: f64,
    /// Unperturbed film thickness h, m.
    pub thickness: f64,
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative and finite",
        })
    }
}

fn check_modulus(name: &'static str, value: Modulus) -> Result<()> {
    match value {
        Modulus::Finite(v) => check_positive(name, v),
        Modulus::Infinite => Ok(()),
    }
}

impl MaterialParams {
    /// Checks that viscosity and thickness are positive, that the moduli are
    /// positive or infinite, and that the forcing constants are non-negative.
    ///
    /// Zero flux, strain per dose or surface energy are accepted: they
    /// describe an unforced film or a film without capillarity.
    pub fn validate(&self) -> Result<()> {
        check_positive("eta", self.eta)?;
        check_modulus("shear_modulus", self.shear_modulus)?;
        check_modulus("bulk_modulus", self.bulk_modulus)?;
        check_non_negative("surface_energy", self.surface_energy)?;
        check_non_negative("flux", self.flux)?;
        check_non_negative("strain_per_dose", self.strain_per_dose)?;
        check_positive("thickness", self.thickness)?;
        Ok(())
    }

    /// Rate of injected stress-free strain, f·A, 1/s.
    pub fn strain_rate(&self) -> f64 {
        self.flux * self.strain_per_dose
    }

    /// Maxwell relaxation time eta/G, s. Zero for an infinite shear modulus.
    pub fn maxwell_time(&self) -> f64 {
        self.eta * self.shear_modulus.recip()
    }

    /// Builds the dimensional twin of a dimensionless point `(Q, D, C, Gamma)`.
    ///
    /// Viscosity, shear modulus, thickness and strain per dose are taken from
    /// `reference`; the bulk modulus, flux and surface energy are chosen so
    /// that the reduced groups come out as requested. Returns the material
    /// and the wavenumber `k = Q/h`.
    pub fn from_dimensionless(
        reference: &MaterialParams,
        q: f64,
        deborah: f64,
        capillary: f64,
        gamma: Modulus,
    ) -> Result<(MaterialParams, f64)> {
        reference.validate()?;
        let g = reference
            .shear_modulus
            .finite()
            .ok_or(Error::ViscousLimit)?;
        check_non_negative("Q", q)?;
        check_non_negative("D", deborah)?;
        check_non_negative("C", capillary)?;
        check_modulus("Gamma", gamma)?;
        let h = reference.thickness;
        let strain_rate = deborah * g / (6.0 * reference.eta);
        let params = MaterialParams {
            bulk_modulus: match gamma {
                Modulus::Finite(ratio) => Modulus::Finite(ratio * g),
                Modulus::Infinite => Modulus::Infinite,
            },
            flux: strain_rate / reference.strain_per_dose,
            surface_energy: 2.0 * g * h * capillary,
            ..*reference
        };
        Ok((params, q / h))
    }
}

/// Dimensional quantities preserved when an infinite shear modulus collapses
/// the reduced groups to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscousLimit {
    pub params: MaterialParams,
    pub wavenumber: f64,
    pub growth_rate: f64,
}

/// Reduced parameter set `(R, Q, D, C, Gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessState {
    /// Growth rate eta*sigma/G.
    pub r: f64,
    /// Wavenumber h*k.
    pub q: f64,
    /// Deborah number 6*f*A*eta/G.
    pub d: f64,
    /// Capillary number gamma/(2*G*h).
    pub c: f64,
    /// Compressibility ratio B/G.
    pub gamma: Modulus,
    /// Set when the shear modulus is infinite; the reduced groups are then
    /// zero and the dimensional inputs are kept for the viscous-limit path.
    pub viscous_limit: Option<ViscousLimit>,
}

impl DimensionlessState {
    /// A state with `R` unset (zero), as consumed by the growth-rate solver.
    pub fn new(q: f64, d: f64, c: f64, gamma: Modulus) -> Self {
        DimensionlessState {
            r: 0.0,
            q,
            d,
            c,
            gamma,
            viscous_limit: None,
        }
    }

    pub fn with_r(self, r: f64) -> Self {
        DimensionlessState { r, ..self }
    }
}

/// Maps a dimensional `(material, k, sigma)` triple to reduced groups.
pub fn to_dimensionless(p: &MaterialParams, k: f64, sigma: f64) -> Result<DimensionlessState> {
    p.validate()?;
    check_non_negative("k", k)?;
    if !sigma.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sigma",
            value: sigma,
            reason: "must be finite",
        });
    }
    let q = p.thickness * k;
    match p.shear_modulus {
        Modulus::Infinite => Ok(DimensionlessState {
            r: 0.0,
            q,
            d: 0.0,
            c: 0.0,
            gamma: Modulus::Infinite,
            viscous_limit: Some(ViscousLimit {
                params: *p,
                wavenumber: k,
                growth_rate: sigma,
            }),
        }),
        Modulus::Finite(g) => Ok(DimensionlessState {
            r: p.eta * sigma / g,
            q,
            d: 6.0 * p.strain_rate() * p.eta / g,
            c: p.surface_energy / (2.0 * g * p.thickness),
            gamma: match p.bulk_modulus {
                Modulus::Finite(b) => Modulus::Finite(b / g),
                Modulus::Infinite => Modulus::Infinite,
            },
            viscous_limit: None,
        }),
    }
}

/// Inverse of the growth-rate map: `sigma = R*G/eta`.
pub fn growth_rate_dimensional(p: &MaterialParams, r: f64) -> Result<f64> {
    let g = p.shear_modulus.finite().ok_or(Error::ViscousLimit)?;
    Ok(r * g / p.eta)
}

/// Symmetric 3×3 tensor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
}

impl SymTensor3 {
    pub const ZERO: SymTensor3 = SymTensor3::diag(0.0, 0.0, 0.0);

    pub const fn diag(xx: f64, yy: f64, zz: f64) -> Self {
        SymTensor3 {
            xx,
            yy,
            zz,
            xy: 0.0,
            xz: 0.0,
            yz: 0.0,
        }
    }

    pub fn identity() -> Self {
        SymTensor3::diag(1.0, 1.0, 1.0)
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    /// `T - tr(T)/3 * I`.
    pub fn deviator(&self) -> Self {
        let mean = self.trace() / 3.0;
        SymTensor3 {
            xx: self.xx - mean,
            yy: self.yy - mean,
            zz: self.zz - mean,
            ..*self
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + 2.0 * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz))
            .sqrt()
    }

    pub fn components(&self) -> [f64; 6] {
        [self.xx, self.yy, self.zz, self.xy, self.xz, self.yz]
    }
}

impl Add for SymTensor3 {
    type Output = SymTensor3;
    fn add(self, o: SymTensor3) -> SymTensor3 {
        SymTensor3 {
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            zz: self.zz + o.zz,
            xy: self.xy + o.xy,
            xz: self.xz + o.xz,
            yz: self.yz + o.yz,
        }
    }
}

impl Sub for SymTensor3 {
    type Output = SymTensor3;
    fn sub(self, o: SymTensor3) -> SymTensor3 {
        self + o * -1.0
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = SymTensor3;
    fn mul(self, s: f64) -> SymTensor3 {
        SymTensor3 {
            xx: self.xx * s,
            yy: self.yy * s,
            zz: self.zz * s,
            xy: self.xy * s,
            xz: self.xz * s,
            yz: self.yz * s,
        }
    }
}
