//! Flat-film steady state.
//!
//! With the steady velocity identically zero, the deviatoric part of the
//! constitutive law balances the beam strain, `T_D = -2*eta*f*A*diag(1,1,-2)`.
//! The stress-free top surface fixes the trace, `tr(T) = -12*eta*f*A`, which
//! gives a purely lateral compressive stress `6*eta*f*A*diag(-1,-1,0)`. The
//! spherical part of the constitutive law then gives the vertical strain
//! `-4*(eta/B)*f*A`.
//!
//! Compression is negative.

use crate::params::{MaterialParams, Modulus, SymTensor3};
use crate::{Error, Result};

/// Beam-imposed stress-free strain direction ("pancake" strain).
pub const PANCAKE: SymTensor3 = SymTensor3::diag(1.0, 1.0, -2.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// T0, Pa.
    pub stress: SymTensor3,
    /// E0, dimensionless.
    pub strain: SymTensor3,
    pub stress_trace: f64,
    pub strain_trace: f64,
    /// Set for an infinite bulk modulus; the strain is then exactly zero.
    pub incompressible: bool,
}

impl SteadyState {
    /// Steady vertical velocity `w0(z)`; mass conservation forces it to zero.
    pub fn velocity(&self, _z: f64) -> f64 {
        0.0
    }

    /// Magnitude of the lateral compressive stress, Pa.
    pub fn lateral_stress_magnitude(&self) -> f64 {
        self.stress.xx.abs()
    }
}

pub fn steady_state(p: &MaterialParams) -> Result<SteadyState> {
    p.validate()?;
    let load = p.eta * p.strain_rate();
    let stress = SymTensor3::diag(-6.0 * load, -6.0 * load, 0.0);
    let stress_trace = stress.xx + stress.yy + stress.zz;
    let (strain, strain_trace, incompressible) = match p.bulk_modulus {
        Modulus::Finite(b) => {
            let ezz = -4.0 * load / b;
            (SymTensor3::diag(0.0, 0.0, ezz), ezz, false)
        }
        Modulus::Infinite => (SymTensor3::ZERO, 0.0, true),
    };
    Ok(SteadyState {
        stress,
        strain,
        stress_trace,
        strain_trace,
        incompressible,
    })
}

/// Ratio `measured / |T0_xx|`.
pub fn compare_to_measurement(s: &SteadyState, measured_stress: f64) -> Result<f64> {
    if !(measured_stress.is_finite() && measured_stress > 0.0) {
        return Err(Error::InvalidParameter {
            name: "measured_stress",
            value: measured_stress,
            reason: "must be positive and finite",
        });
    }
    let computed = s.lateral_stress_magnitude();
    if computed == 0.0 {
        return Err(Error::ZeroStress);
    }
    Ok(measured_stress / computed)
}
