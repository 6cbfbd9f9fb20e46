//! Overflow-safe hyperbolic helpers.
//!
//! `sinh` and `cosh` overflow `f64` just above 710, and products such as
//! `(alpha k)^2 sinh^2 Q` overflow much earlier. The perturbation formulas
//! only ever need ratios of hyperbolics, so for large arguments they are
//! carried as a mantissa times `exp(log_scale)`. Past the threshold
//! `exp(-2x) < 5e-18`, so the mantissas lose nothing.

/// Arguments above this are represented in scaled form.
pub const SCALE_THRESHOLD: f64 = 20.0;

/// `sinh(x) = sinh * exp(log_scale)`, `cosh(x) = cosh * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledHyperbolic {
    pub sinh: f64,
    pub cosh: f64,
    pub log_scale: f64,
}

impl ScaledHyperbolic {
    pub fn new(x: f64) -> Self {
        if x.abs() <= SCALE_THRESHOLD {
            ScaledHyperbolic {
                sinh: x.sinh(),
                cosh: x.cosh(),
                log_scale: 0.0,
            }
        } else {
            let e = (-2.0 * x.abs()).exp();
            ScaledHyperbolic {
                sinh: x.signum() * 0.5 * (1.0 - e),
                cosh: 0.5 * (1.0 + e),
                log_scale: x.abs(),
            }
        }
    }

    /// `exp(-log_scale)`, the factor that turns an unscaled quantity into the
    /// same scale as the mantissas.
    pub fn inv_scale(&self) -> f64 {
        (-self.log_scale).exp()
    }
}

/// `sinh(x) - x` without cancellation near zero.
pub fn sinh_minus_x(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // x^3/3! + x^5/5! + ...; terms shrink by x^2/((2n)(2n+1)) < 1/24
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum = term;
        let mut n = 2.0;
        while term.abs() > 1e-17 * sum.abs() {
            term *= x2 / ((2.0 * n) * (2.0 * n + 1.0));
            sum += term;
            n += 1.0;
        }
        sum
    } else {
        x.sinh() - x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_matches_direct_below_threshold() {
        for &x in &[0.0, 1e-8, 0.3, 5.0, 19.9] {
            let h = ScaledHyperbolic::new(x);
            assert_eq!(h.log_scale, 0.0);
            assert_eq!(h.sinh, x.sinh());
            assert_eq!(h.cosh, x.cosh());
        }
    }

    #[test]
    fn scaled_is_finite_and_consistent_above_threshold() {
        for &x in &[21.0, 351.0, 700.0, 1e4] {
            let h = ScaledHyperbolic::new(x);
            assert!(h.sinh.is_finite() && h.cosh.is_finite());
            assert_eq!(h.log_scale, x);
            assert!((h.sinh - 0.5).abs() < 1e-15);
        }
        // continuity across the switch: compare the tanh ratio
        let below = ScaledHyperbolic::new(19.999);
        let above = ScaledHyperbolic::new(20.001);
        assert!((below.sinh / below.cosh - above.sinh / above.cosh).abs() < 1e-15);
        let mid = ScaledHyperbolic::new(30.0);
        let direct = 30f64.sinh() * (-30f64).exp();
        assert!((mid.sinh - direct).abs() < 1e-15);
    }

    #[test]
    fn sinh_minus_x_series_matches_taylor() {
        // x^3/6 + x^5/120 + x^7/5040 summed by hand
        let x: f64 = 0.1;
        let taylor = x.powi(3) / 6.0 + x.powi(5) / 120.0 + x.powi(7) / 5040.0 + x.powi(9) / 362880.0
            + x.powi(11) / 39916800.0;
        assert!((sinh_minus_x(x) - taylor).abs() < 1e-15 * taylor);
        assert!((sinh_minus_x(-x) + taylor).abs() < 1e-15 * taylor);
        assert_eq!(sinh_minus_x(0.0), 0.0);
        assert!((sinh_minus_x(2.0) - (2f64.sinh() - 2.0)).abs() < 1e-15);
        // the two branches agree at the switch
        let lo = sinh_minus_x(0.4999999999);
        let direct = 0.4999999999f64.sinh() - 0.4999999999;
        assert!((lo - direct).abs() < 1e-16);
    }
}
