use ionfilm_core::dispersion::solve_growth_rate;
use ionfilm_core::modal::kinematic_residual;
use ionfilm_core::oracle::shoot_growth_rate;
use ionfilm_core::{DimensionlessState, MaterialParams, Modulus};

fn reference() -> MaterialParams {
    MaterialParams {
        eta: 6.2e8,
        shear_modulus: Modulus::Finite(3.1e10),
        bulk_modulus: Modulus::Finite(3.1e10),
        surface_energy: 1.0,
        flux: 3.5e19,
        strain_per_dose: 5e-21,
        thickness: 2e-9,
    }
}

fn twin(q: f64, d: f64, c: f64, gamma: f64) -> (MaterialParams, f64, f64) {
    let gamma = Modulus::Finite(gamma);
    let (p, k) = MaterialParams::from_dimensionless(&reference(), q, d, c, gamma).unwrap();
    let root = solve_growth_rate(&DimensionlessState::new(q, d, c, gamma)).unwrap();
    assert!(root.converged);
    (p, k, root.r / p.maxwell_time())
}

/// Bisection on the real part of the closed-form kinematic residual.
fn kinematic_root(p: &MaterialParams, k: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |s: f64| kinematic_residual(p, k, s).unwrap().re;
    let mut flo = f(lo);
    assert!(flo.signum() != f(hi).signum());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn kinematic_root_matches_dispersion_root() {
    for &(q, d, c, gamma) in &[(0.5, 0.2, 0.1, 10.0), (2.0, 1.0, 0.01, 1.0), (0.2, 0.01, 1.0, 1e4)] {
        let (p, k, sigma) = twin(q, d, c, gamma);
        let root = kinematic_root(&p, k, 1.01 * sigma, 0.99 * sigma);
        assert!(
            (root - sigma).abs() <= 1e-8 * sigma.abs(),
            "Q = {q}: {root} vs {sigma}"
        );
        let residual = kinematic_residual(&p, k, sigma).unwrap();
        assert!(residual.norm() < 1e-8 * sigma.abs(), "{residual}");
    }
}

#[test]
fn kinematic_residual_brackets_dispersion_roots() {
    for d in [0.01, 0.2, 1.0] {
        for c in [0.01, 0.1, 1.0] {
            for gamma in [1.0, 10.0, 1e4] {
                let (p, k, sigma) = twin(0.5, d, c, gamma);
                let lo = kinematic_residual(&p, k, sigma * (1.0 + 1e-6)).unwrap().re;
                let hi = kinematic_residual(&p, k, sigma * (1.0 - 1e-6)).unwrap().re;
                assert!(lo.signum() != hi.signum(), "D = {d}, C = {c}, Gamma = {gamma}");
            }
        }
    }
}

#[test]
fn unforced_kinematic_residual_is_sigma() {
    let p = MaterialParams {
        flux: 0.0,
        surface_energy: 0.0,
        ..reference()
    };
    for sigma in [-3.0, -1e-4, 2.5] {
        let r = kinematic_residual(&p, 5e8, sigma).unwrap();
        assert_eq!(r.re, sigma);
        assert_eq!(r.im, 0.0);
    }
}

#[test]
fn three_paths_agree() {
    let (p, k, sigma) = twin(1.0, 0.5, 0.5, 3.0);
    let shot = shoot_growth_rate(&p, k).unwrap();
    assert!(shot.converged);
    assert!((shot.sigma - sigma).abs() <= 1e-6 * sigma.abs());
    let root = kinematic_root(&p, k, 1.01 * sigma, 0.99 * sigma);
    assert!((root - shot.sigma).abs() <= 1e-6 * sigma.abs());
}
