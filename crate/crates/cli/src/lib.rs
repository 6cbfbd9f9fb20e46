//! Command-line front end for `ionfilm-core`: steady-stress reports,
//! dispersion and viscous-limit sweeps, neutral curves and the dual-path
//! verification grid, written as CSV or JSON.

pub mod config;
pub mod output;
pub mod run;

use std::time::Instant;

pub use config::{ConfigError, Format, Mode, RunConfig};
pub use run::{run, Cell, Outcome, Report, RunError};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 1;
    pub const NON_CONVERGENCE: u8 = 2;
    pub const VERIFY_FAILED: u8 = 3;
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Ok => exit::OK,
            Outcome::NonConverged => exit::NON_CONVERGENCE,
            Outcome::VerifyFailed => exit::VERIFY_FAILED,
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => exit::CONFIG,
            RunError::Numerical(_) => exit::NON_CONVERGENCE,
        }
    }
}

/// Runs `cfg` and renders the report in the configured format.
pub fn execute(cfg: &RunConfig) -> Result<(Report, String), RunError> {
    let start = Instant::now();
    let report = run(cfg)?;
    let text = match cfg.format {
        Format::Csv => output::to_csv(&report),
        Format::Json => {
            let value = output::to_json(&report, cfg, start.elapsed().as_secs_f64());
            let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
            s.push('\n');
            s
        }
    };
    Ok((report, text))
}
