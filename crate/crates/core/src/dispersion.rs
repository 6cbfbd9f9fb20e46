//! Dimensionless dispersion relation and its limits.
//!
//! The growth rate `R` at wavenumber `Q` solves
//!
//! ```text
//! 2R/(1+R) [V^2 + U^2 Q^2 + U sinh^2 Q]
//!   + D [U^2 Q^2 - (V-U) sinh^2 Q]
//!   + C V Q [sinh 2Q - 2 U Q] = 0
//! ```
//!
//! where `U`, `V` depend on `R` through `s = alpha/beta = 2R/(Gamma (1+R))`:
//! `U = (s+6)/(7s+6)`, `V = (4s+6)/(7s+6)`. Writing `U`, `V` in terms of `s`
//! removes the apparent singularity at `R = 0` (where `s = 0` and
//! `U = V = 1`) and makes the incompressible limit `Gamma -> inf` an ordinary
//! evaluation with `s = 0`.
//!
//! Multiplying through by `(7s+6)^2` gives a pole-free function of `R` on
//! `(-1, inf)`; the root search brackets that form and reports the residual
//! of the original relation.

use num_complex::Complex64;

use crate::hyperbolic::{sinh_minus_x, ScaledHyperbolic};
use crate::params::{DimensionlessState, MaterialParams, Modulus};
use crate::roots::{brent, Bracketed};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative bracket width and residual tolerance.
    pub tol: f64,
    /// Upper end of the search on the unstable side.
    pub r_max: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            r_max: 10.0,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionRoot {
    pub q: f64,
    pub r: f64,
    /// Left side of the dispersion relation at `r`. For `Q` above the
    /// hyperbolic scaling threshold this is multiplied by `exp(-2Q)`.
    pub residual: f64,
    /// Largest of the three terms of the relation at `r`, same scaling.
    pub residual_scale: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub converged: bool,
    /// Further sign changes found on `(-1, r_max]`, nearest to zero first.
    pub extra_brackets: Vec<(f64, f64)>,
}

impl DispersionRoot {
    pub fn multiple(&self) -> bool {
        !self.extra_brackets.is_empty()
    }
}

/// Wavenumber-dependent pieces of the relation, evaluated once per `Q`.
#[derive(Debug, Clone, Copy)]
struct Shape {
    q: f64,
    d: f64,
    c: f64,
    inv_gamma: f64,
    /// exp(-2 L) where L is the hyperbolic scale
    damp2: f64,
    /// sinh^2 Q, scaled
    sh2: f64,
    /// sinh 2Q, scaled
    s2q: f64,
    /// sinh 2Q - 2Q, scaled
    s2q_minus: f64,
}

impl Shape {
    fn new(q: f64, d: f64, c: f64, gamma: Modulus) -> Self {
        let hyp = ScaledHyperbolic::new(q);
        let damp = hyp.inv_scale();
        let damp2 = damp * damp;
        let s2q = 2.0 * hyp.sinh * hyp.cosh;
        let s2q_minus = if hyp.log_scale == 0.0 {
            sinh_minus_x(2.0 * q)
        } else {
            s2q - 2.0 * q * damp2
        };
        Shape {
            q,
            d,
            c,
            inv_gamma: gamma.recip(),
            damp2,
            sh2: hyp.sinh * hyp.sinh,
            s2q,
            s2q_minus,
        }
    }

    fn from_state(s: &DimensionlessState) -> Self {
        Shape::new(s.q, s.d, s.c, s.gamma)
    }

    /// The three terms of the relation at a (possibly complex) `R`.
    fn terms<T>(&self, r: T) -> [T; 3]
    where
        T: Copy
            + std::ops::Add<Output = T>
            + std::ops::Sub<Output = T>
            + std::ops::Mul<Output = T>
            + std::ops::Div<Output = T>
            + std::ops::Mul<f64, Output = T>
            + std::ops::Add<f64, Output = T>,
    {
        let x = r * 2.0 / (r + 1.0);
        let s = x * self.inv_gamma;
        let den = s * 7.0 + 6.0;
        let u = (s + 6.0) / den;
        let v = (s * 4.0 + 6.0) / den;
        let v_minus_u = s * 3.0 / den;
        let one_minus_u = s * 6.0 / den;
        let q = self.q;
        let q2 = q * q * self.damp2;
        let t1 = x * (v * v * self.damp2 + u * u * q2 + u * self.sh2);
        let t2 = (u * u * q2 - v_minus_u * self.sh2) * self.d;
        // sinh 2Q - 2UQ = (sinh 2Q - 2Q) + 2Q (1 - U)
        let bracket = one_minus_u * (2.0 * q * self.damp2) + self.s2q_minus;
        let t3 = v * q * self.c * bracket;
        [t1, t2, t3]
    }

    /// Relation multiplied by `(7s+6)^2`, as a function of `x = 2R/(1+R)`.
    /// A cubic in `x` with no poles; `R in (-1, inf)` maps to `x in (-inf, 2)`.
    fn cleared(&self, x: f64) -> f64 {
        let [a, b, c] = self.cleared_parts(x);
        a + b + c
    }

    /// Relation value and largest term, both divided back by `(7s+6)^2`
    /// (left cleared exactly at the pole).
    fn cleared_terms(&self, x: f64) -> (f64, f64) {
        let parts = self.cleared_parts(x);
        let c7 = 7.0 * x * self.inv_gamma + 6.0;
        let norm = if c7 == 0.0 { 1.0 } else { c7 * c7 };
        let scale = parts.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        (parts.iter().sum::<f64>() / norm, scale / norm)
    }

    /// Traction-system determinant times `(7s+6)^2`, relative to its largest
    /// term. Where it vanishes the surface solve is singular: the kinematic
    /// residual has a pole there and a zero of the relation next to it is
    /// not a determinate mode.
    fn relative_determinant(&self, x: f64) -> f64 {
        let s = x * self.inv_gamma;
        let q2 = self.q * self.q * self.damp2;
        let value = (4.0 * s + 6.0).powi(2) * self.damp2
            + (s + 6.0) * (7.0 * s + 6.0) * self.sh2
            + (s + 6.0).powi(2) * q2;
        // magnitudes before any cancellation, including inside 7s + 6
        let scale = (4.0 * s + 6.0).powi(2) * self.damp2
            + (s + 6.0).abs() * (7.0 * s.abs() + 6.0) * self.sh2
            + (s + 6.0).powi(2) * q2;
        (value / scale).abs()
    }

    /// Coefficients `[c0, c1, c2, c3]` of the cleared relation as a cubic in `x`.
    fn cubic(&self) -> [f64; 4] {
        let g = self.inv_gamma;
        let (q, d, c) = (self.q, self.d, self.c);
        let (damp2, sh2) = (self.damp2, self.sh2);
        let q2 = q * q * damp2;
        let m = self.s2q_minus;
        let n = 7.0 * self.s2q - 2.0 * q * damp2;
        [
            36.0 * (d * q2 + c * q * m),
            36.0 * (damp2 + q2 + sh2) + d * g * (12.0 * q2 - 18.0 * sh2) + c * q * g * (24.0 * m + 6.0 * n),
            g * (48.0 * (damp2 + sh2) + 12.0 * q2) + g * g * (d * (q2 - 21.0 * sh2) + 4.0 * c * q * n),
            g * g * (16.0 * damp2 + q2 + 7.0 * sh2),
        ]
    }

    /// Real stationary points of the cubic. Between consecutive ones it is
    /// monotone and holds at most one root.
    fn turning_points(&self) -> Vec<f64> {
        let [_, c1, c2, c3] = self.cubic();
        // 3 c3 x^2 + 2 c2 x + c1 = 0
        let (a, b, c) = (3.0 * c3, 2.0 * c2, c1);
        if a == 0.0 {
            return if b != 0.0 { vec![-c / b] } else { Vec::new() };
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let t = -0.5 * (b + disc.sqrt().copysign(b));
        let mut out = vec![t / a];
        if t != 0.0 {
            out.push(c / t);
        }
        out.retain(|x| x.is_finite());
        out
    }

    fn cleared_parts(&self, x: f64) -> [f64; 3] {
        let s = x * self.inv_gamma;
        let (a, b, c7) = (4.0 * s + 6.0, s + 6.0, 7.0 * s + 6.0);
        let q = self.q;
        let q2 = q * q * self.damp2;
        let p1 = a * a * self.damp2 + b * b * q2 + b * c7 * self.sh2;
        let p2 = b * b * q2 - 3.0 * s * c7 * self.sh2;
        // (7s+6) sinh 2Q - 2(s+6) Q = 6 (sinh 2Q - 2Q) + s (7 sinh 2Q - 2Q)
        let p3 = q * a * (6.0 * self.s2q_minus + s * (7.0 * self.s2q - 2.0 * q * self.damp2));
        [x * p1, self.d * p2, self.c * p3]
    }
}

fn check_state(s: &DimensionlessState, need_positive_q: bool) -> Result<()> {
    if s.viscous_limit.is_some() {
        return Err(Error::ViscousLimit);
    }
    let bad = |name, value, reason| Err(Error::InvalidParameter { name, value, reason });
    if !(s.q.is_finite() && (s.q > 0.0 || (!need_positive_q && s.q == 0.0))) {
        return bad("Q", s.q, "must be positive and finite");
    }
    if !(s.d.is_finite() && s.d >= 0.0) {
        return bad("D", s.d, "must be non-negative and finite");
    }
    if !(s.c.is_finite() && s.c >= 0.0) {
        return bad("C", s.c, "must be non-negative and finite");
    }
    if let Modulus::Finite(g) = s.gamma {
        if !(g.is_finite() && g > 0.0) {
            return bad("Gamma", g, "must be positive");
        }
    }
    Ok(())
}

/// Left side of the dispersion relation at `R` (the `r` field of `s` is
/// ignored).
///
/// `R = 0` is evaluated through its continuous extension `U = V = 1`. The
/// value is non-finite where `7s + 6 = 0`, a genuine pole of the relation.
pub fn dispersion_lhs(r: f64, s: &DimensionlessState) -> Result<f64> {
    check_state(s, false)?;
    if r == -1.0 {
        return Err(Error::Pole);
    }
    Ok(Shape::from_state(s).terms(r).iter().sum())
}

/// [`dispersion_lhs`] at complex `R`, for diagnostic sweeps.
pub fn dispersion_lhs_complex(r: Complex64, s: &DimensionlessState) -> Result<Complex64> {
    check_state(s, false)?;
    if r == Complex64::new(-1.0, 0.0) {
        return Err(Error::Pole);
    }
    Ok(Shape::from_state(s).terms(r).iter().sum())
}

/// Roots where the relative traction determinant is below this sit inside an
/// unresolvably narrow zero-pole pair of the kinematic residual.
const DEGENERATE: f64 = 1e-6;

/// Probe points `x = 2R/(1+R)` walking away from zero on one side:
/// geometric steps plus the turning points of the cleared cubic, so that no
/// interval between probes can hide a pair of roots.
fn probes(sign: f64, limit: f64, turning: &[f64]) -> Vec<f64> {
    let mut xs = Vec::new();
    let mut x = 1e-20;
    while x < limit {
        xs.push(sign * x);
        x *= 4.0;
    }
    xs.push(sign * limit);
    xs.extend(turning.iter().filter(|&&t| t * sign > 0.0 && t.abs() < limit));
    xs.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    xs.dedup();
    xs
}

fn r_of_x(x: f64) -> f64 {
    x / (2.0 - x)
}

/// Sign changes of the cleared relation walking from `x = 0` along the
/// probe points, as `(x_a, f_a, x_b, f_b)`.
fn sign_changes(shape: &Shape, f0: f64, xs: Vec<f64>) -> Vec<(f64, f64, f64, f64)> {
    let mut out = Vec::new();
    let (mut x_prev, mut f_prev) = (0.0, f0);
    for x in xs {
        let f = shape.cleared(x);
        if f == 0.0 || f.signum() != f_prev.signum() {
            out.push((x_prev, f_prev, x, f));
        }
        if f != 0.0 {
            x_prev = x;
            f_prev = f;
        }
    }
    out
}

pub fn solve_growth_rate(s: &DimensionlessState) -> Result<DispersionRoot> {
    solve_growth_rate_with(s, &SolveOptions::default())
}

/// Real growth rate nearest zero for `(Q, D, C, Gamma)`.
///
/// Probes outward from `R = 0` toward `R = -1` and up to `R = r_max`,
/// refines the sign change nearest zero with Brent's method, and lists any
/// other sign changes in [`DispersionRoot::extra_brackets`].
///
/// The search runs in `x = 2R/(1+R)`, which is monotone in `R` and keeps the
/// relative resolution uniform as `R` approaches `-1`.
pub fn solve_growth_rate_with(s: &DimensionlessState, opts: &SolveOptions) -> Result<DispersionRoot> {
    check_state(s, true)?;
    let shape = Shape::from_state(s);
    let f0 = shape.cleared(0.0);
    if f0 == 0.0 {
        let [t1, t2, t3] = shape.terms(0.0);
        return Ok(DispersionRoot {
            q: s.q,
            r: 0.0,
            residual: t1 + t2 + t3,
            residual_scale: t1.abs().max(t2.abs()).max(t3.abs()),
            bracket: (0.0, 0.0),
            iterations: 0,
            converged: true,
            extra_brackets: Vec::new(),
        });
    }

    // 1 + R = 2/(2 - x); stop once 1 + R reaches 1e-13
    let x_neg_limit = 2.0e13;
    let x_pos_limit = 2.0 * opts.r_max / (1.0 + opts.r_max);
    let turning = shape.turning_points();
    let neg = sign_changes(&shape, f0, probes(-1.0, x_neg_limit, &turning));
    let pos = sign_changes(&shape, f0, probes(1.0, x_pos_limit, &turning));
    if neg.is_empty() && pos.is_empty() {
        return Err(Error::NoBracket {
            q: s.q,
            r_min: -1.0,
            r_max: opts.r_max,
        });
    }

    let refine = |(a, fa, b, fb): (f64, f64, f64, f64)| {
        brent(|x| shape.cleared(x), a, b, fa, fb, 0.25 * opts.tol, 1e-300, opts.max_iter)
    };
    let to_r = |a: f64, b: f64| {
        let (ra, rb) = (r_of_x(a), r_of_x(b));
        (ra.min(rb), ra.max(rb))
    };
    // first determinate root on each side, with its bracket index
    let first_root = |brackets: &[(f64, f64, f64, f64)]| {
        brackets.iter().enumerate().find_map(|(i, &br)| {
            let root = refine(br);
            (shape.relative_determinant(root.root) > DEGENERATE).then_some((root, i))
        })
    };
    let mut candidates: Vec<(Bracketed, usize, bool)> = Vec::new();
    if let Some((root, i)) = first_root(&neg) {
        candidates.push((root, i, true));
    }
    if let Some((root, i)) = first_root(&pos) {
        candidates.push((root, i, false));
    }
    if candidates.is_empty() {
        return Err(Error::NoBracket {
            q: s.q,
            r_min: -1.0,
            r_max: opts.r_max,
        });
    }
    candidates.sort_by(|a, b| a.0.root.abs().total_cmp(&b.0.root.abs()));
    let (best, best_idx, best_neg) = candidates[0];

    let mut extra: Vec<(f64, f64)> = neg
        .iter()
        .enumerate()
        .filter(|&(i, _)| !(best_neg && i == best_idx))
        .chain(pos.iter().enumerate().filter(|&(i, _)| !(!best_neg && i == best_idx)))
        .map(|(_, &(a, _, b, _))| to_r(a, b))
        .collect();
    extra.sort_by(|a, b| a.1.abs().min(a.0.abs()).total_cmp(&b.1.abs().min(b.0.abs())));

    // Residual and term scale in the cleared form: every term carries the
    // same factor (7s+6)^2, so the ratio is unchanged, but next to the pole
    // the uncleared terms cancel catastrophically.
    let width_ok = |b: &Bracketed| {
        let (lo, hi) = to_r(b.lo, b.hi);
        hi - lo <= opts.tol * r_of_x(b.root).abs().max(1.0)
    };
    let mut best = best;
    let (mut residual, mut residual_scale) = shape.cleared_terms(best.root);
    let mut residual_ok = residual.abs() <= opts.tol * residual_scale;
    let mut at_resolution = false;
    if best.converged && !(residual_ok && width_ok(&best)) && best.lo < best.hi {
        // Next to the pole the residual floor sits just above the tolerance,
        // and as R grows the map from x stretches the bracket; polish to float
        // resolution, the best any evaluation can do.
        let (fa, fb) = (shape.cleared(best.lo), shape.cleared(best.hi));
        if fa.signum() != fb.signum() {
            let polished = brent(
                |x| shape.cleared(x),
                best.lo,
                best.hi,
                fa,
                fb,
                4.0 * f64::EPSILON,
                1e-300,
                opts.max_iter,
            );
            best = Bracketed {
                iterations: best.iterations + polished.iterations,
                ..polished
            };
            (residual, residual_scale) = shape.cleared_terms(best.root);
            residual_ok = residual.abs() <= opts.tol * residual_scale;
            at_resolution = best.hi - best.lo <= 8.0 * f64::EPSILON * best.root.abs();
        }
    }
    let r = r_of_x(best.root);
    let bracket = to_r(best.lo, best.hi);
    let width_ok = width_ok(&best) || at_resolution;
    Ok(DispersionRoot {
        q: s.q,
        r,
        residual,
        residual_scale,
        bracket,
        iterations: best.iterations,
        converged: best.converged && width_ok && (residual_ok || at_resolution),
        extra_brackets: extra,
    })
}

/// Neutral stability boundary `D*(Q) = 2C (1 - sinh(2Q)/(2Q))`, with
/// `D*(0) = 0`.
pub fn neutral_boundary(q: f64, c: f64) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    // 2C (1 - sinh 2Q / 2Q) = -C (sinh 2Q - 2Q)/Q
    -c * sinh_minus_x(2.0 * q) / q
}

/// Long-wavelength, slow-growth approximation `R = -D Q^2/2 - 2 C Q^4/3`.
pub fn long_wavelength_growth(s: &DimensionlessState) -> f64 {
    let q2 = s.q * s.q;
    -0.5 * s.d * q2 - 2.0 / 3.0 * s.c * q2 * q2
}

/// Dimensional long-wavelength rate `-3 f A (hk)^2 - gamma/(3 eta h) (hk)^4`, 1/s.
pub fn long_wavelength_growth_dimensional(p: &MaterialParams, k: f64) -> f64 {
    let q2 = (p.thickness * k).powi(2);
    -3.0 * p.strain_rate() * q2 - p.surface_energy / (3.0 * p.eta * p.thickness) * q2 * q2
}

/// Growth rate of the purely viscous, incompressible film, 1/s:
///
/// ```text
/// sigma = -[6 f A Q^2 + (k gamma/2 eta)(sinh 2Q - 2Q)] / [1 + 2 Q^2 + cosh 2Q]
/// ```
///
/// With no beam this is Orchard's leveling rate.
pub fn viscous_growth(p: &MaterialParams, k: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let q = p.thickness * k;
    let q2 = q * q;
    let beam = 6.0 * p.strain_rate() * q2;
    let capillary = k * p.surface_energy / (2.0 * p.eta);
    let two_q = 2.0 * q;
    if two_q <= 700.0 {
        -(beam + capillary * sinh_minus_x(two_q)) / (1.0 + 2.0 * q2 + two_q.cosh())
    } else {
        // divide through by cosh 2Q
        let e = (-two_q).exp();
        let sech = 2.0 * e / (1.0 + e * e);
        let tanh = (1.0 - e * e) / (1.0 + e * e);
        -(beam * sech + capillary * (tanh - two_q * sech)) / ((1.0 + 2.0 * q2) * sech + 1.0)
    }
}
