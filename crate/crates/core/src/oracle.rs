//! Brute-force shooting solution of the perturbation problem.
//!
//! Works from the two second-order velocity equations and the linearized
//! traction conditions only; nothing here uses the closed-form solution.
//! The equations are integrated as a first-order system in velocity and
//! traction, with `xi = z/h` and tractions scaled by `h/eta`:
//!
//! ```text
//! t   = alpha/beta = a e,  a = alpha/eta = 2/(1 + eta sigma/G),  e = eta sigma/B
//! u'  = (2/a) txz - iQ w
//! w'  = [e tzz - iQ u (1 - t/3)] / (1 + 2t/3)
//! txz' = Q^2 a (2 + t/3)/(1 + 2t/3) u - iQ (1 - t/3)/(1 + 2t/3) tzz
//! tzz' = -iQ txz
//! ```
//!
//! Multiplying through by `e` keeps every coefficient finite for an
//! incompressible film (`e = 0`) and at `sigma = 0`, where the unknown
//! `beta = B/sigma` would otherwise diverge. No-slip fixes `u = w = 0` at the
//! substrate; the two basis solutions start from unit shear and unit normal
//! traction.

use num_complex::Complex64;

use crate::params::MaterialParams;
use crate::roots::{illinois, Bracketed};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Basis pairs are re-orthogonalized once their condition estimate passes this.
const REORTHOGONALIZE_ABOVE: f64 = 1e8;
/// Boundary systems worse than this are rejected.
const MAX_CONDITION: f64 = 1e12;
/// Re-orthogonalization checks per integration.
const CHECKPOINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub n_steps: usize,
    /// Points in the returned profile, both ends included.
    pub samples: usize,
    /// Convergence test `|sigma - w(h)| <= tol |sigma|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        ShootingOptions {
            n_steps: 2000,
            samples: 101,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Velocity and scaled traction (`T h/eta`) at one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub u: Complex64,
    pub w: Complex64,
    pub txz: Complex64,
    pub tzz: Complex64,
}

impl ModeState {
    pub const ZERO: ModeState = ModeState {
        u: Complex64 { re: 0.0, im: 0.0 },
        w: Complex64 { re: 0.0, im: 0.0 },
        txz: Complex64 { re: 0.0, im: 0.0 },
        tzz: Complex64 { re: 0.0, im: 0.0 },
    };

    fn from_array(y: [Complex64; 4]) -> Self {
        ModeState {
            u: y[0],
            w: y[1],
            txz: y[2],
            tzz: y[3],
        }
    }

    fn to_array(self) -> [Complex64; 4] {
        [self.u, self.w, self.txz, self.tzz]
    }

    fn combine(a: ModeState, ca: Complex64, b: ModeState, cb: Complex64) -> ModeState {
        let (a, b) = (a.to_array(), b.to_array());
        ModeState::from_array(std::array::from_fn(|i| a[i] * ca + b[i] * cb))
    }

    fn norm(self) -> f64 {
        self.to_array().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

/// Two independent no-slip solutions at the free surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBasis {
    pub first: ModeState,
    pub second: ModeState,
    pub reorthogonalizations: usize,
}

/// Both basis solutions sampled through the film. Re-orthogonalization is
/// applied to every stored sample, so each column is a single solution.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisProfile {
    /// Heights in m.
    pub z: Vec<f64>,
    pub first: Vec<ModeState>,
    pub second: Vec<ModeState>,
    pub reorthogonalizations: usize,
}

impl BasisProfile {
    pub fn top(&self) -> ModeBasis {
        ModeBasis {
            first: *self.first.last().unwrap(),
            second: *self.second.last().unwrap(),
            reorthogonalizations: self.reorthogonalizations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub z: f64,
    pub u: Complex64,
    pub w: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    pub sigma: f64,
    /// `sigma - w(h)` at the returned rate.
    pub residual: Complex64,
    /// Condition number of the 2x2 traction system at the returned rate.
    pub basis_mismatch: f64,
    pub profile: Vec<ProfilePoint>,
    pub iterations: usize,
    pub converged: bool,
}

/// Coefficients of the first-order system at one growth rate.
#[derive(Debug, Clone, Copy)]
struct System {
    q: f64,
    inv_a2: f64,
    e: f64,
    inv_den: f64,
    shear_u: f64,
    couple: f64,
}

impl System {
    fn new(p: &MaterialParams, k: f64, sigma: f64) -> Result<Self> {
        let shear = 1.0 + p.eta * sigma * p.shear_modulus.recip();
        if shear == 0.0 {
            return Err(Error::MaxwellResonance { sigma });
        }
        let a = 2.0 / shear;
        let e = p.eta * sigma * p.bulk_modulus.recip();
        let t = a * e;
        let den = 1.0 + 2.0 * t / 3.0;
        if den == 0.0 || !den.is_finite() {
            return Err(Error::SingularBoundary {
                q: k * p.thickness,
                sigma,
                eta: p.eta,
            });
        }
        let q = k * p.thickness;
        Ok(System {
            q,
            inv_a2: 2.0 / a,
            e,
            inv_den: 1.0 / den,
            shear_u: q * q * a * (2.0 + t / 3.0) / den,
            couple: 1.0 - t / 3.0,
        })
    }

    fn rhs(&self, y: &[Complex64; 4]) -> [Complex64; 4] {
        let iq = I * self.q;
        let [u, w, txz, tzz] = *y;
        [
            txz * self.inv_a2 - iq * w,
            (tzz * self.e - iq * u * self.couple) * self.inv_den,
            u * self.shear_u - iq * tzz * (self.couple * self.inv_den),
            -iq * txz,
        ]
    }

    fn rk4(&self, y: &mut [Complex64; 4], dx: f64) {
        let add = |y: &[Complex64; 4], k: &[Complex64; 4], s: f64| -> [Complex64; 4] {
            std::array::from_fn(|i| y[i] + k[i] * s)
        };
        let k1 = self.rhs(y);
        let k2 = self.rhs(&add(y, &k1, 0.5 * dx));
        let k3 = self.rhs(&add(y, &k2, 0.5 * dx));
        let k4 = self.rhs(&add(y, &k3, dx));
        for i in 0..4 {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dx / 6.0);
        }
    }
}

/// `1/sin` of the angle between two states; large when they are nearly
/// parallel.
fn pair_condition(a: ModeState, b: ModeState) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    let dot: Complex64 = a
        .to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let cos2 = (dot.norm() / (na * nb)).powi(2);
    1.0 / (1.0 - cos2).max(0.0).sqrt()
}

/// Gram-Schmidt step as weights: the new pair is
/// `(a w11, a w21 + b w22)` with `w11 = 1/|a|`.
fn gram_schmidt(a: ModeState, b: ModeState) -> (Complex64, Complex64, Complex64) {
    let na = a.norm();
    let a1 = ModeState::combine(a, Complex64::new(1.0 / na, 0.0), ModeState::ZERO, Complex64::default());
    let dot: Complex64 = a1
        .to_array()
        .iter()
        .zip(b.to_array())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let rest = ModeState::combine(b, Complex64::new(1.0, 0.0), a1, -dot);
    let nr = rest.norm();
    (
        Complex64::new(1.0 / na, 0.0),
        -dot / (na * nr),
        Complex64::new(1.0 / nr, 0.0),
    )
}

/// Integrates both basis solutions from the substrate to the surface.
///
/// `sigma = 0` is accepted: the scaled system stays regular there.
pub fn integrate_modes(p: &MaterialParams, k: f64, sigma: f64, n_steps: usize) -> Result<ModeBasis> {
    Ok(integrate_modes_sampled(p, k, sigma, n_steps, 2)?.top())
}

/// [`integrate_modes`] keeping `samples` roughly uniform heights (both ends
/// included; each lands on a step boundary).
pub fn integrate_modes_sampled(
    p: &MaterialParams,
    k: f64,
    sigma: f64,
    n_steps: usize,
    samples: usize,
) -> Result<BasisProfile> {
    p.validate()?;
    if n_steps == 0 {
        return Err(Error::InvalidParameter {
            name: "n_steps",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k,
            reason: "must be non-negative and finite",
        });
    }
    let system = System::new(p, k, sigma)?;
    let samples = samples.max(2);
    let sample_at: Vec<usize> = (0..samples)
        .map(|j| ((j as f64) * n_steps as f64 / (samples - 1) as f64).round() as usize)
        .collect();
    let checkpoint = (n_steps / CHECKPOINTS).max(1);

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let mut first = [zero, zero, one, zero];
    let mut second = [zero, zero, zero, one];
    let dx = 1.0 / n_steps as f64;

    let mut profile = BasisProfile {
        z: Vec::with_capacity(samples),
        first: Vec::with_capacity(samples),
        second: Vec::with_capacity(samples),
        reorthogonalizations: 0,
    };
    let mut next_sample = 0;
    for step in 0..=n_steps {
        if step > 0 {
            system.rk4(&mut first, dx);
            system.rk4(&mut second, dx);
            let (a, b) = (ModeState::from_array(first), ModeState::from_array(second));
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::IntegrationOverflow {
                    step,
                    n_steps,
                    z: step as f64 * dx * p.thickness,
                });
            }
            if step % checkpoint == 0 && step < n_steps {
                let big = a.norm().max(b.norm());
                if pair_condition(a, b) > REORTHOGONALIZE_ABOVE || !(1e-100..=1e100).contains(&big) {
                    let (w11, w21, w22) = gram_schmidt(a, b);
                    first = ModeState::combine(a, w11, ModeState::ZERO, zero).to_array();
                    second = ModeState::combine(a, w21, b, w22).to_array();
                    for j in 0..profile.first.len() {
                        let (pa, pb) = (profile.first[j], profile.second[j]);
                        profile.first[j] = ModeState::combine(pa, w11, ModeState::ZERO, zero);
                        profile.second[j] = ModeState::combine(pa, w21, pb, w22);
                    }
                    profile.reorthogonalizations += 1;
                }
            }
        }
        while next_sample < samples && sample_at[next_sample] == step {
            profile.z.push(step as f64 * dx * p.thickness);
            profile.first.push(ModeState::from_array(first));
            profile.second.push(ModeState::from_array(second));
            next_sample += 1;
        }
    }
    Ok(profile)
}

/// Forced solution at one trial growth rate.
#[derive(Debug, Clone, Copy)]
struct Forced {
    residual: Complex64,
    condition: f64,
    weights: (Complex64, Complex64),
}

/// Scaled traction targets `(txz, tzz)` at the surface.
fn surface_traction(p: &MaterialParams, k: f64) -> (Complex64, Complex64) {
    let q = k * p.thickness;
    (
        -I * (6.0 * p.strain_rate() * q),
        Complex64::new(-p.surface_energy * q * q / (p.eta * p.thickness), 0.0),
    )
}

/// 2-norm condition number of `[[a, b], [c, d]]`.
fn condition_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    let s = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
    let det = (a * d - b * c).norm();
    if det == 0.0 {
        return f64::INFINITY;
    }
    let root = (s * s - 4.0 * det * det).max(0.0).sqrt();
    (s + root) / (2.0 * det)
}

fn equilibrated_condition(mut m: [[Complex64; 2]; 2]) -> f64 {
    for row in m.iter_mut() {
        let r = row[0].norm().max(row[1].norm());
        if r == 0.0 {
            return f64::INFINITY;
        }
        row.iter_mut().for_each(|v| *v /= r);
    }
    let [top, bottom] = &mut m;
    for (a, b) in top.iter_mut().zip(bottom.iter_mut()) {
        let c = a.norm().max(b.norm());
        if c == 0.0 {
            return f64::INFINITY;
        }
        *a /= c;
        *b /= c;
    }
    condition_2x2(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn solve_surface(p: &MaterialParams, k: f64, sigma: f64, basis: &ModeBasis) -> Result<Forced> {
    let (f, s) = (basis.first, basis.second);
    // rows and columns equilibrated: shear and normal tractions differ in
    // scale, and so do the two basis solutions
    let condition = equilibrated_condition([[f.txz, s.txz], [f.tzz, s.tzz]]);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let (gx, gz) = surface_traction(p, k);
    let det = f.txz * s.tzz - s.txz * f.tzz;
    let c1 = (gx * s.tzz - s.txz * gz) / det;
    let c2 = (f.txz * gz - gx * f.tzz) / det;
    let w = c1 * f.w + c2 * s.w;
    Ok(Forced {
        residual: sigma - w,
        condition,
        weights: (c1, c2),
    })
}

/// `sigma - w(h)` from the numerically integrated field.
pub fn shooting_residual(p: &MaterialParams, k: f64, sigma: f64, n_steps: usize) -> Result<Complex64> {
    let basis = integrate_modes(p, k, sigma, n_steps)?;
    Ok(solve_surface(p, k, sigma, &basis)?.residual)
}

/// Growth rate from `rho = sigma/(1 + eta sigma/G)`, which maps the whole
/// axis onto rates above the Maxwell resonance `-G/eta`.
fn sigma_of_rho(p: &MaterialParams, rho: f64) -> f64 {
    rho / (1.0 - p.eta * rho * p.shear_modulus.recip())
}

pub fn shoot_growth_rate(p: &MaterialParams, k: f64) -> Result<ShootingResult> {
    shoot_growth_rate_with(p, k, &ShootingOptions::default())
}

/// Real growth rate nearest zero found by shooting.
///
/// Walks outward from `sigma = 0` on both sides in geometric steps of the
/// variable `rho = sigma/(1 + eta sigma/G)`, refines the first sign change of
/// `sigma - w(h)` with Illinois regula falsi, and returns the root of
/// smaller magnitude.
pub fn shoot_growth_rate_with(p: &MaterialParams, k: f64, opts: &ShootingOptions) -> Result<ShootingResult> {
    p.validate()?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter {
            name: "k",
            value: k,
            reason: "must be positive and finite",
        });
    }
    if p.strain_rate() == 0.0 && p.surface_energy == 0.0 {
        return Err(Error::Unforced);
    }

    let eval = |rho: f64| -> Result<f64> {
        let sigma = sigma_of_rho(p, rho);
        let basis = integrate_modes(p, k, sigma, opts.n_steps)?;
        Ok(solve_surface(p, k, sigma, &basis)?.residual.re)
    };
    let f0 = eval(0.0)?;
    if f0 == 0.0 {
        return finish(p, k, 0.0, 0, true, opts);
    }
    // -f0 = w(h) at sigma = 0 sets the natural rate scale
    let scale = f0.abs();
    let rho_pos_max = match p.shear_modulus.finite() {
        Some(g) => (g / p.eta) * (1.0 - 1e-9),
        None => f64::INFINITY,
    };

    // walk each side out to its limit; ill-conditioned probes sit next to a
    // free mode and are stepped over
    let walk = |sign: f64| -> Result<Vec<(f64, f64, f64, f64)>> {
        let mut out = Vec::new();
        let (mut rp, mut fp) = (0.0, f0);
        let mut magnitude = 1e-8 * scale;
        let limit = 1e14 * scale;
        while magnitude <= limit {
            let rho = if sign > 0.0 { magnitude.min(rho_pos_max) } else { -magnitude };
            match eval(rho) {
                Ok(f) => {
                    if f == 0.0 || f.signum() != fp.signum() {
                        out.push((rp, fp, rho, f));
                    }
                    if f != 0.0 {
                        (rp, fp) = (rho, f);
                    }
                }
                Err(Error::IllConditioned { .. }) => {}
                Err(e) => return Err(e),
            }
            if sign > 0.0 && rho >= rho_pos_max {
                break;
            }
            magnitude *= 2.0;
        }
        Ok(out)
    };

    // Refines one bracket. Sign changes through a pole of the residual do not
    // converge and are passed over, as are roots whose surface solve is
    // singular.
    let mut failure = None;
    let mut refine = |(a, fa, b, fb): (f64, f64, f64, f64)| -> Option<(f64, usize)> {
        let root = if fb == 0.0 {
            Bracketed {
                root: b,
                value: 0.0,
                lo: b,
                hi: b,
                iterations: 0,
                converged: true,
            }
        } else {
            let mut err = None;
            let r = illinois(
                |rho| match eval(rho) {
                    Ok(v) => v,
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                },
                a,
                b,
                fa,
                fb,
                |rho, f| f.abs() <= 0.01 * opts.tol * sigma_of_rho(p, rho).abs(),
                opts.max_iter,
            );
            if let Some(e) = err {
                failure.get_or_insert(e);
                return None;
            }
            r
        };
        let sigma = sigma_of_rho(p, root.root);
        // a bracket squeezed to float resolution is judged by its residual
        let resolved = root.converged || root.hi - root.lo <= 8.0 * f64::EPSILON * root.lo.abs().max(root.hi.abs());
        let ok = resolved
            && match integrate_modes(p, k, sigma, opts.n_steps).and_then(|b| solve_surface(p, k, sigma, &b)) {
                Ok(forced) => forced.residual.norm() <= opts.tol * sigma.abs(),
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            };
        ok.then_some((sigma, root.iterations))
    };

    let mut best: Option<(f64, usize)> = None;
    let mut any_bracket = false;
    for sign in [-1.0, 1.0] {
        let brackets = walk(sign)?;
        any_bracket |= !brackets.is_empty();
        if let Some(found) = brackets.into_iter().find_map(&mut refine) {
            if best.is_none_or(|(s, _)| found.0.abs() < s.abs()) {
                best = Some(found);
            }
        }
    }
    let Some((sigma, iterations)) = best else {
        return Err(match failure {
            _ if any_bracket => Error::NotConverged {
                iterations: opts.max_iter,
                lo: -p.shear_modulus.finite().map_or(f64::INFINITY, |g| g / p.eta),
                hi: rho_pos_max,
            },
            Some(e) => e,
            None => Error::NoBracket {
                q: k * p.thickness,
                r_min: -1.0,
                r_max: rho_pos_max * p.eta * p.shear_modulus.recip(),
            },
        });
    };
    let converged = true;
    finish(p, k, sigma, iterations, converged, opts)
}

fn finish(
    p: &MaterialParams,
    k: f64,
    sigma: f64,
    iterations: usize,
    converged: bool,
    opts: &ShootingOptions,
) -> Result<ShootingResult> {
    let profile = integrate_modes_sampled(p, k, sigma, opts.n_steps, opts.samples)?;
    let forced = solve_surface(p, k, sigma, &profile.top())?;
    let (c1, c2) = forced.weights;
    let points = profile
        .z
        .iter()
        .zip(profile.first.iter().zip(&profile.second))
        .map(|(&z, (a, b))| ProfilePoint {
            z,
            u: c1 * a.u + c2 * b.u,
            w: c1 * a.w + c2 * b.w,
        })
        .collect();
    let residual_ok = forced.residual.norm() <= opts.tol * sigma.abs();
    Ok(ShootingResult {
        sigma,
        residual: forced.residual,
        basis_mismatch: forced.condition,
        profile: points,
        iterations,
        converged: converged && residual_ok,
    })
}
