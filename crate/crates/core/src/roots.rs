//! Bracketed scalar root finders.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed {
    pub root: f64,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Brent–Dekker on `[a, b]` with `f(a)`, `f(b)` of opposite sign (or zero).
///
/// Stops when the bracket half-width drops below `rtol*|root| + atol`.
#[allow(clippy::too_many_arguments)]
pub fn brent(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    rtol: f64,
    atol: f64,
    max_iter: usize,
) -> Bracketed {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa == 0.0 {
        return exact(a);
    }
    if fb == 0.0 {
        return exact(b);
    }
    debug_assert!(fa.signum() != fb.signum());
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 0.5 * (rtol * b.abs() + atol);
        let m = 0.5 * (c - b);
        if fb == 0.0 {
            return Bracketed {
                iterations: iter,
                ..exact(b)
            };
        }
        if m.abs() <= tol {
            return Bracketed {
                root: b,
                value: fb,
                lo: b.min(c),
                hi: b.max(c),
                iterations: iter,
                converged: true,
            };
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Bracketed {
        root: b,
        value: fb,
        lo: b.min(c),
        hi: b.max(c),
        iterations: max_iter,
        converged: false,
    }
}

fn exact(root: f64) -> Bracketed {
    Bracketed {
        root,
        value: 0.0,
        lo: root,
        hi: root,
        iterations: 0,
        converged: true,
    }
}

/// Illinois-modified regula falsi. `done(x, fx)` decides convergence.
pub fn illinois(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    mut done: impl FnMut(f64, f64) -> bool,
    max_iter: usize,
) -> Bracketed {
    let mut side = 0i8;
    for iter in 1..=max_iter {
        let x = (a * fb - b * fa) / (fb - fa);
        let x = if x.is_finite() && x > a.min(b) && x < a.max(b) {
            x
        } else {
            0.5 * (a + b)
        };
        let fx = f(x);
        if fx == 0.0 || done(x, fx) {
            return Bracketed {
                root: x,
                value: fx,
                lo: a.min(b),
                hi: a.max(b),
                iterations: iter,
                converged: true,
            };
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Bracketed {
                root: x,
                value: fx,
                lo: a.min(b),
                hi: a.max(b),
                iterations: iter,
                converged: false,
            };
        }
    }
    Bracketed {
        root: 0.5 * (a + b),
        value: f64::NAN,
        lo: a.min(b),
        hi: a.max(b),
        iterations: max_iter,
        converged: false,
    }
}
