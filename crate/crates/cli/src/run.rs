//! The five run modes. Each returns a [`Report`]: a table plus an outcome
//! that decides the exit status.

use ionfilm_core::dispersion::{neutral_boundary, solve_growth_rate_with, viscous_growth, SolveOptions};
use ionfilm_core::oracle::{shoot_growth_rate_with, ShootingOptions};
use ionfilm_core::params::{growth_rate_dimensional, to_dimensionless};
use ionfilm_core::steady::{compare_to_measurement, steady_state};
use ionfilm_core::{DimensionlessState, MaterialParams, Modulus};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{check_material, ConfigError, Mode, RunConfig, Sweep, SweepVariable};

/// Default pass threshold of `verify`.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Modulus> for Cell {
    fn from(m: Modulus) -> Self {
        match m {
            Modulus::Finite(v) => Cell::Num(v),
            Modulus::Infinite => Cell::Text("inf".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// Some rows did not converge; the table is still complete.
    NonConverged,
    VerifyFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub mode: Mode,
    pub table: Table,
    pub outcome: Outcome,
    /// Run-level figures such as the largest verification deviation.
    pub summary: Vec<(&'static str, Cell)>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] ionfilm_core::Error),
}

pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    match cfg.mode {
        Mode::Steady => run_steady(cfg),
        Mode::Neutral => run_neutral(cfg),
        Mode::Dispersion | Mode::Viscous => run_dispersion(cfg),
        Mode::Verify => run_verify(cfg),
    }
}

pub fn run_steady(cfg: &RunConfig) -> Result<Report, RunError> {
    let m = &cfg.material;
    // shear modulus, surface energy and thickness do not enter the steady state
    let p = check_material(MaterialParams {
        eta: m.eta()?,
        shear_modulus: m.shear_modulus.unwrap_or(Modulus::Infinite),
        bulk_modulus: m.bulk_modulus()?,
        surface_energy: m.surface_energy.unwrap_or(0.0),
        flux: m.flux()?,
        strain_per_dose: m.strain_per_dose()?,
        thickness: m.thickness.unwrap_or(1.0),
    })?;
    let s = steady_state(&p)?;
    let mut rows: Vec<(&str, Cell)> = vec![
        ("stress_xx", s.stress.xx.into()),
        ("stress_yy", s.stress.yy.into()),
        ("stress_zz", s.stress.zz.into()),
        ("strain_xx", s.strain.xx.into()),
        ("strain_yy", s.strain.yy.into()),
        ("strain_zz", s.strain.zz.into()),
        ("stress_trace", s.stress_trace.into()),
        ("strain_trace", s.strain_trace.into()),
        ("lateral_stress_magnitude", s.lateral_stress_magnitude().into()),
        ("incompressible", s.incompressible.into()),
    ];
    if let Some(measured) = cfg.measured_stress {
        rows.push(("measured_stress", measured.into()));
        let ratio = match compare_to_measurement(&s, measured) {
            Ok(r) => r.into(),
            Err(ionfilm_core::Error::ZeroStress) => Cell::Empty,
            Err(e) => return Err(e.into()),
        };
        rows.push(("measured_to_computed_ratio", ratio));
    }
    Ok(Report {
        mode: Mode::Steady,
        table: Table {
            columns: vec!["quantity", "value"],
            rows: rows
                .into_iter()
                .map(|(name, v)| vec![Cell::Text(name.into()), v])
                .collect(),
        },
        outcome: Outcome::Ok,
        summary: Vec::new(),
    })
}

fn require_sweep(cfg: &RunConfig) -> Result<Sweep, ConfigError> {
    cfg.sweep.ok_or(ConfigError::Missing("sweep_min/sweep_max/sweep_count"))
}

/// Capillary number from the override or from `gamma/(2 G h)`.
fn capillary_number(cfg: &RunConfig) -> Result<f64, ConfigError> {
    if let Some(c) = cfg.capillary_number {
        return Ok(c);
    }
    let m = &cfg.material;
    let g = m.shear_modulus()?.finite().ok_or(ConfigError::Invalid {
        key: "shear_modulus",
        value: "inf".into(),
        reason: "the capillary number vanishes for a rigid shear modulus; set capillary_number".into(),
    })?;
    Ok(m.surface_energy()? / (2.0 * g * m.thickness()?))
}

pub fn run_neutral(cfg: &RunConfig) -> Result<Report, RunError> {
    let sweep = require_sweep(cfg)?;
    let c = capillary_number(cfg)?;
    let scale = match sweep.variable {
        SweepVariable::Q => 1.0,
        SweepVariable::Wavenumber => cfg.material.thickness()?,
    };
    let rows = sweep
        .points()
        .into_iter()
        .map(|x| {
            let q = x * scale;
            vec![q.into(), neutral_boundary(q, c).into()]
        })
        .collect();
    Ok(Report {
        mode: Mode::Neutral,
        table: Table {
            columns: vec!["Q", "D_star"],
            rows,
        },
        outcome: Outcome::Ok,
        summary: vec![("capillary_number", c.into())],
    })
}

fn gamma_override(cfg: &RunConfig, p: &mut MaterialParams) -> Result<(), ConfigError> {
    if let Some(gamma) = cfg.gamma_ratio {
        p.bulk_modulus = match (gamma, p.shear_modulus) {
            (Modulus::Infinite, _) | (_, Modulus::Infinite) => Modulus::Infinite,
            (Modulus::Finite(r), Modulus::Finite(g)) => Modulus::Finite(r * g),
        };
    }
    Ok(())
}

/// One dispersion row: `(sigma, R, converged, note)`.
fn dispersion_row(p: &MaterialParams, k: f64, opts: &SolveOptions) -> (Cell, Cell, bool, Cell) {
    if k == 0.0 {
        return (0.0.into(), 0.0.into(), true, Cell::Empty);
    }
    let solved = to_dimensionless(p, k, 0.0).and_then(|s: DimensionlessState| {
        let root = solve_growth_rate_with(&s, opts)?;
        Ok((growth_rate_dimensional(p, root.r)?, root))
    });
    match solved {
        Ok((sigma, root)) => {
            let note = if root.multiple() {
                Cell::Text(format!("{} further root bracket(s)", root.extra_brackets.len()))
            } else {
                Cell::Empty
            };
            (sigma.into(), root.r.into(), root.converged, note)
        }
        Err(e) => (Cell::Empty, Cell::Empty, false, Cell::Text(e.to_string())),
    }
}

pub fn run_dispersion(cfg: &RunConfig) -> Result<Report, RunError> {
    let sweep = require_sweep(cfg)?;
    let m = &cfg.material;
    let viscous = cfg.mode == Mode::Viscous;
    let mut p = if viscous {
        // the closed form needs neither modulus
        check_material(MaterialParams {
            eta: m.eta()?,
            shear_modulus: m.shear_modulus.unwrap_or(Modulus::Infinite),
            bulk_modulus: m.bulk_modulus.unwrap_or(Modulus::Infinite),
            surface_energy: m.surface_energy()?,
            flux: m.flux()?,
            strain_per_dose: m.strain_per_dose()?,
            thickness: m.thickness()?,
        })?
    } else {
        m.complete()?
    };
    if !viscous && p.shear_modulus.is_infinite() {
        return Err(ConfigError::Invalid {
            key: "shear_modulus",
            value: "inf".into(),
            reason: "dispersion mode needs a finite shear modulus; use the `viscous` subcommand".into(),
        }
        .into());
    }
    gamma_override(cfg, &mut p)?;
    let opts = SolveOptions {
        tol: cfg.tol.unwrap_or(SolveOptions::default().tol),
        ..SolveOptions::default()
    };
    let h = p.thickness;
    let ks: Vec<f64> = match sweep.variable {
        SweepVariable::Wavenumber => sweep.points(),
        SweepVariable::Q => sweep.points().into_iter().map(|q| q / h).collect(),
    };
    let inv_tau = p.shear_modulus.recip() * p.eta;
    let rows: Vec<(Vec<Cell>, bool)> = ks
        .par_iter()
        .map(|&k| {
            let (sigma, r, converged, note) = if viscous {
                let sigma = viscous_growth(&p, k);
                let r = if inv_tau > 0.0 { (sigma * inv_tau).into() } else { Cell::Empty };
                (sigma.into(), r, sigma.is_finite(), Cell::Empty)
            } else {
                dispersion_row(&p, k, &opts)
            };
            (vec![k.into(), (k * h).into(), sigma, r, converged.into(), note], converged)
        })
        .collect();
    let failures = rows.iter().filter(|(_, ok)| !ok).count();
    Ok(Report {
        mode: cfg.mode,
        table: Table {
            columns: vec!["k", "Q", "sigma", "R", "converged", "note"],
            rows: rows.into_iter().map(|(r, _)| r).collect(),
        },
        outcome: if failures == 0 { Outcome::Ok } else { Outcome::NonConverged },
        summary: vec![("non_converged_rows", (failures as f64).into())],
    })
}

pub fn run_verify(cfg: &RunConfig) -> Result<Report, RunError> {
    let m = &cfg.material;
    let g = m.shear_modulus()?.finite().ok_or(ConfigError::Invalid {
        key: "shear_modulus",
        value: "inf".into(),
        reason: "verification maps the grid through a finite shear modulus".into(),
    })?;
    // bulk modulus, flux and surface energy are set per grid point
    let reference = check_material(MaterialParams {
        eta: m.eta()?,
        shear_modulus: Modulus::Finite(g),
        bulk_modulus: Modulus::Finite(g),
        surface_energy: 0.0,
        flux: 0.0,
        strain_per_dose: m.strain_per_dose()?,
        thickness: m.thickness()?,
    })?;
    let threshold = cfg.tol.unwrap_or(VERIFY_TOL);
    let shoot_opts = ShootingOptions {
        n_steps: cfg.n_steps.unwrap_or(ShootingOptions::default().n_steps),
        ..ShootingOptions::default()
    };
    let grid = &cfg.grid;
    let mut points = Vec::new();
    for &q in &grid.q {
        for &d in &grid.d {
            for &c in &grid.c {
                for &gamma in &grid.gamma {
                    points.push((q, d, c, gamma));
                }
            }
        }
    }
    let rows: Vec<(Vec<Cell>, Option<f64>)> = points
        .par_iter()
        .map(|&(q, d, c, gamma)| {
            let outcome = (|| {
                let (p, k) = MaterialParams::from_dimensionless(&reference, q, d, c, gamma)?;
                let root = solve_growth_rate_with(&DimensionlessState::new(q, d, c, gamma), &SolveOptions::default())?;
                let analytic = growth_rate_dimensional(&p, root.r)?;
                let shot = shoot_growth_rate_with(&p, k, &shoot_opts)?;
                Ok::<_, ionfilm_core::Error>((analytic, shot.sigma, root.converged && shot.converged))
            })();
            let head = vec![q.into(), d.into(), c.into(), gamma.into()];
            match outcome {
                Ok((a, s, converged)) => {
                    let dev = (s - a).abs() / a.abs();
                    let dev = if dev.is_nan() { f64::INFINITY } else { dev };
                    let mut row = head;
                    row.extend([a.into(), s.into(), dev.into(), converged.into(), Cell::Empty]);
                    (row, Some(dev))
                }
                Err(e) => {
                    let mut row = head;
                    row.extend([
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        false.into(),
                        Cell::Text(e.to_string()),
                    ]);
                    (row, None)
                }
            }
        })
        .collect();
    let errors = rows.iter().filter(|(_, d)| d.is_none()).count();
    let max_dev = rows.iter().filter_map(|(_, d)| *d).fold(0.0, f64::max);
    let failed = errors > 0 || max_dev > threshold;
    Ok(Report {
        mode: Mode::Verify,
        table: Table {
            columns: vec![
                "Q",
                "D",
                "C",
                "Gamma",
                "sigma_analytic",
                "sigma_shooting",
                "rel_deviation",
                "converged",
                "error",
            ],
            rows: rows.into_iter().map(|(r, _)| r).collect(),
        },
        outcome: if failed { Outcome::VerifyFailed } else { Outcome::Ok },
        summary: vec![
            ("max_rel_deviation", max_dev.into()),
            ("threshold", threshold.into()),
            ("failed_points", (errors as f64).into()),
        ],
    })
}
