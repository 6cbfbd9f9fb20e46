//! Flat `key = value unit` run configuration.
//!
//! Every supported unit is a power of ten away from SI, so conversion shifts
//! the decimal exponent of the literal before parsing. A lab-unit config and
//! its hand-converted SI twin therefore parse to bit-identical values.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use ionfilm_core::{MaterialParams, Modulus};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("`{key}`: cannot parse number `{value}`")]
    Number { key: String, value: String },
    #[error("`{key}`: unit `{unit}` not accepted (expected one of {expected})")]
    Unit {
        key: String,
        unit: String,
        expected: String,
    },
    #[error("missing required field `{0}`")]
    Missing(&'static str),
    #[error("`{key}` = {value}: {reason}")]
    Invalid {
        key: &'static str,
        value: String,
        reason: String,
    },
    #[error("cannot read config: {0}")]
    Io(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Steady,
    Dispersion,
    Neutral,
    Viscous,
    Verify,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Steady => "steady",
            Mode::Dispersion => "dispersion",
            Mode::Neutral => "neutral",
            Mode::Viscous => "viscous",
            Mode::Verify => "verify",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Wavenumber k in 1/m.
    Wavenumber,
    /// Q = kh.
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(ConfigError::Invalid {
                key: "sweep",
                value: format!("[{}, {}] x {}", self.min, self.max, self.count),
                reason: reason.to_string(),
            })
        };
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("sweep bounds must be finite");
        }
        // a single point needs coincident bounds
        match self.count {
            0 => return bad("sweep_count must be positive"),
            1 if self.min != self.max => return bad("a one-point sweep needs sweep_min = sweep_max"),
            1 => {}
            _ if self.min >= self.max => return bad("need sweep_min < sweep_max"),
            _ => {}
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return bad("log spacing needs sweep_min > 0");
        }
        if self.min < 0.0 {
            return bad("wavenumbers must be non-negative");
        }
        Ok(())
    }

    /// Sample points; the end points are exactly `min` and `max`.
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let last = (n.max(2) - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

/// Material constants as given; which ones are required depends on the mode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MaterialInput {
    pub eta: Option<f64>,
    pub shear_modulus: Option<Modulus>,
    pub bulk_modulus: Option<Modulus>,
    pub surface_energy: Option<f64>,
    pub flux: Option<f64>,
    pub strain_per_dose: Option<f64>,
    pub thickness: Option<f64>,
}

fn need<T>(v: Option<T>, name: &'static str) -> Result<T> {
    v.ok_or(ConfigError::Missing(name))
}

impl MaterialInput {
    pub fn eta(&self) -> Result<f64> {
        need(self.eta, "eta")
    }
    pub fn shear_modulus(&self) -> Result<Modulus> {
        need(self.shear_modulus, "shear_modulus")
    }
    pub fn bulk_modulus(&self) -> Result<Modulus> {
        need(self.bulk_modulus, "bulk_modulus")
    }
    pub fn surface_energy(&self) -> Result<f64> {
        need(self.surface_energy, "surface_energy")
    }
    pub fn flux(&self) -> Result<f64> {
        need(self.flux, "flux")
    }
    pub fn strain_per_dose(&self) -> Result<f64> {
        need(self.strain_per_dose, "strain_per_dose")
    }
    pub fn thickness(&self) -> Result<f64> {
        need(self.thickness, "thickness")
    }

    /// All seven constants, validated.
    pub fn complete(&self) -> Result<MaterialParams> {
        let p = MaterialParams {
            eta: self.eta()?,
            shear_modulus: self.shear_modulus()?,
            bulk_modulus: self.bulk_modulus()?,
            surface_energy: self.surface_energy()?,
            flux: self.flux()?,
            strain_per_dose: self.strain_per_dose()?,
            thickness: self.thickness()?,
        };
        check_material(p)
    }
}

pub fn check_material(p: MaterialParams) -> Result<MaterialParams> {
    p.validate().map_err(|e| match e {
        ionfilm_core::Error::InvalidParameter { name, value, reason } => ConfigError::Invalid {
            key: name,
            value: value.to_string(),
            reason: reason.to_string(),
        },
        other => ConfigError::Invalid {
            key: "material",
            value: String::new(),
            reason: other.to_string(),
        },
    })?;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyGrid {
    pub q: Vec<f64>,
    pub d: Vec<f64>,
    pub c: Vec<f64>,
    pub gamma: Vec<Modulus>,
}

impl Default for VerifyGrid {
    fn default() -> Self {
        VerifyGrid {
            q: vec![0.2, 0.5, 2.0],
            d: vec![0.01, 0.2, 1.0],
            c: vec![0.01, 0.1, 1.0],
            gamma: vec![Modulus::Finite(1.0), Modulus::Finite(10.0), Modulus::Finite(1e4)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub material: MaterialInput,
    pub measured_stress: Option<f64>,
    pub sweep: Option<Sweep>,
    /// Bulk-to-shear ratio; replaces the configured bulk modulus.
    pub gamma_ratio: Option<Modulus>,
    /// Capillary number for the neutral curve when it cannot be derived.
    pub capillary_number: Option<f64>,
    pub tol: Option<f64>,
    pub n_steps: Option<usize>,
    pub grid: VerifyGrid,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Raw `(key, value)` pairs in file order.
    pub echo: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        RunConfig {
            mode,
            material: MaterialInput::default(),
            measured_stress: None,
            sweep: None,
            gamma_ratio: None,
            capillary_number: None,
            tol: None,
            n_steps: None,
            grid: VerifyGrid::default(),
            out: None,
            format: Format::Csv,
            echo: Vec::new(),
        }
    }

    pub fn from_file(path: &std::path::Path, mode: Mode) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text, mode)
    }

    pub fn parse(text: &str, mode: Mode) -> Result<Self> {
        let mut cfg = RunConfig::new(mode);
        let mut seen = HashSet::new();
        let mut sweep = SweepParts::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: line_no })?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line: line_no });
            }
            if !seen.insert(key.clone()) {
                return Err(ConfigError::Duplicate { line: line_no, key });
            }
            cfg.set(&key, value, line_no, &mut sweep)?;
            cfg.echo.push((key, value.to_string()));
        }
        cfg.sweep = sweep.build()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, line: usize, sweep: &mut SweepParts) -> Result<()> {
        let m = &mut self.material;
        match key {
            "eta" | "viscosity" => m.eta = Some(quantity(key, value, VISCOSITY)?),
            "shear_modulus" => m.shear_modulus = Some(modulus(key, value, PRESSURE)?),
            "bulk_modulus" => m.bulk_modulus = Some(modulus(key, value, PRESSURE)?),
            "surface_energy" => m.surface_energy = Some(quantity(key, value, SURFACE_ENERGY)?),
            "flux" => m.flux = Some(quantity(key, value, FLUX)?),
            "strain_per_dose" => m.strain_per_dose = Some(quantity(key, value, AREA)?),
            "thickness" => m.thickness = Some(quantity(key, value, LENGTH)?),
            "measured_stress" => self.measured_stress = Some(quantity(key, value, PRESSURE)?),
            "gamma_ratio" => self.gamma_ratio = Some(modulus(key, value, DIMENSIONLESS)?),
            "capillary_number" => self.capillary_number = Some(quantity(key, value, DIMENSIONLESS)?),
            "tol" => self.tol = Some(quantity(key, value, DIMENSIONLESS)?),
            "n_steps" => self.n_steps = Some(integer(key, value)?),
            "format" => self.format = parse_format(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "sweep_variable" => {
                sweep.variable = Some(match value.to_ascii_lowercase().as_str() {
                    "k" | "wavenumber" => SweepVariable::Wavenumber,
                    "q" => SweepVariable::Q,
                    _ => return Err(invalid("sweep_variable", value, "expected `k` or `Q`")),
                })
            }
            "sweep_min" => sweep.min = Some(value.to_string()),
            "sweep_max" => sweep.max = Some(value.to_string()),
            "sweep_count" => sweep.count = Some(integer(key, value)?),
            "sweep_spacing" => {
                sweep.spacing = Some(match value.to_ascii_lowercase().as_str() {
                    "linear" | "lin" => Spacing::Linear,
                    "log" => Spacing::Log,
                    _ => return Err(invalid("sweep_spacing", value, "expected `linear` or `log`")),
                })
            }
            "verify_q" => self.grid.q = list(key, value)?,
            "verify_d" => self.grid.d = list(key, value)?,
            "verify_c" => self.grid.c = list(key, value)?,
            "verify_gamma" => {
                self.grid.gamma = value
                    .split(',')
                    .map(|v| modulus(key, v.trim(), DIMENSIONLESS))
                    .collect::<Result<_>>()?
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }
}

pub fn parse_format(value: &str) -> Result<Format> {
    match value.to_ascii_lowercase().as_str() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(invalid("format", value, "expected `csv` or `json`")),
    }
}

fn invalid(key: &'static str, value: &str, reason: &str) -> ConfigError {
    ConfigError::Invalid {
        key,
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Default)]
struct SweepParts {
    variable: Option<SweepVariable>,
    min: Option<String>,
    max: Option<String>,
    count: Option<usize>,
    spacing: Option<Spacing>,
}

impl SweepParts {
    fn build(self) -> Result<Option<Sweep>> {
        if self.variable.is_none() && self.min.is_none() && self.max.is_none() && self.count.is_none() {
            return Ok(None);
        }
        let variable = self.variable.unwrap_or(SweepVariable::Q);
        let units = match variable {
            SweepVariable::Wavenumber => WAVENUMBER,
            SweepVariable::Q => DIMENSIONLESS,
        };
        let sweep = Sweep {
            variable,
            min: quantity("sweep_min", &need(self.min, "sweep_min")?, units)?,
            max: quantity("sweep_max", &need(self.max, "sweep_max")?, units)?,
            count: need(self.count, "sweep_count")?,
            spacing: self.spacing.unwrap_or(Spacing::Linear),
        };
        sweep.validate()?;
        Ok(Some(sweep))
    }
}

/// Accepted unit spellings with their power-of-ten factor to SI.
type Units = &'static [(&'static str, i32)];

const DIMENSIONLESS: Units = &[("", 0)];
const VISCOSITY: Units = &[("Pa*s", 0), ("Pa.s", 0), ("Pas", 0), ("MPa*s", 6), ("GPa*s", 9)];
const PRESSURE: Units = &[("Pa", 0), ("kPa", 3), ("MPa", 6), ("GPa", 9)];
const SURFACE_ENERGY: Units = &[("J/m2", 0), ("N/m", 0), ("mJ/m2", -3), ("mN/m", -3)];
const FLUX: Units = &[
    ("/m2/s", 0),
    ("ions/m2/s", 0),
    ("/cm2/s", 4),
    ("ions/cm2/s", 4),
    ("/nm2/s", 18),
    ("ions/nm2/s", 18),
];
const AREA: Units = &[
    ("m2", 0),
    ("m2/ion", 0),
    ("cm2", -4),
    ("cm2/ion", -4),
    ("nm2", -18),
    ("nm2/ion", -18),
];
const LENGTH: Units = &[("m", 0), ("cm", -2), ("mm", -3), ("um", -6), ("nm", -9)];
const WAVENUMBER: Units = &[("/m", 0), ("/cm", 2), ("/mm", 3), ("/um", 6), ("/nm", 9)];

/// Splits `3.5e15 /cm2/s` into the literal and a whitespace-free unit.
fn split_value(value: &str) -> (&str, String) {
    let value = value.trim();
    match value.find(char::is_whitespace) {
        Some(i) => (&value[..i], value[i..].split_whitespace().collect()),
        None => (value, String::new()),
    }
}

/// Parses a decimal literal scaled by `10^shift` without a rounding step.
pub fn shift_decimal(literal: &str, shift: i32) -> Option<f64> {
    let literal = literal.trim();
    if literal.eq_ignore_ascii_case("inf") || literal.eq_ignore_ascii_case("infinity") {
        return Some(f64::INFINITY);
    }
    // reject anything the float parser would take but a config should not
    if literal.is_empty() || literal.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        return None;
    }
    literal.parse::<f64>().ok()?;
    let (mantissa, exponent) = match literal.find(['e', 'E']) {
        Some(i) => (&literal[..i], literal[i + 1..].parse::<i32>().ok()?),
        None => (literal, 0),
    };
    format!("{mantissa}e{}", exponent.checked_add(shift)?).parse().ok()
}

fn lookup(key: &str, unit: &str, units: Units) -> Result<i32> {
    units
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|&(_, shift)| shift)
        .ok_or_else(|| ConfigError::Unit {
            key: key.to_string(),
            unit: unit.to_string(),
            expected: units
                .iter()
                .map(|(u, _)| if u.is_empty() { "(none)".to_string() } else { format!("`{u}`") })
                .collect::<Vec<_>>()
                .join(", "),
        })
}

fn quantity(key: &str, value: &str, units: Units) -> Result<f64> {
    let (literal, unit) = split_value(value);
    let shift = lookup(key, &unit, units)?;
    let v = shift_decimal(literal, shift).ok_or_else(|| ConfigError::Number {
        key: key.to_string(),
        value: value.to_string(),
    })?;
    if !v.is_finite() {
        return Err(ConfigError::Number {
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(v)
}

/// A modulus; `inf` selects the rigid/incompressible sentinel.
fn modulus(key: &str, value: &str, units: Units) -> Result<Modulus> {
    let (literal, unit) = split_value(value);
    if literal.eq_ignore_ascii_case("inf") || literal.eq_ignore_ascii_case("infinity") {
        if !unit.is_empty() {
            lookup(key, &unit, units)?;
        }
        return Ok(Modulus::Infinite);
    }
    Ok(Modulus::Finite(quantity(key, value, units)?))
}

fn integer(key: &str, value: &str) -> Result<usize> {
    value.trim().parse().map_err(|_| ConfigError::Number {
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| quantity(key, v.trim(), DIMENSIONLESS)).collect()
}
