use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use ionfilm_cli::config::parse_format;
use ionfilm_cli::{exit, execute, Mode, Outcome, RunConfig};
use ionfilm_core::Modulus;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Steady,
    Dispersion,
    Neutral,
    Viscous,
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "ionfilm", version, about = "Stress and stability of ion-irradiated viscoelastic films")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// key = value configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Bulk-to-shear modulus ratio B/G (`inf` for incompressible)
    #[arg(long = "gamma-ratio")]
    gamma_ratio: Option<String>,
    /// Root tolerance (dispersion) or pass threshold (verify)
    #[arg(long)]
    tol: Option<f64>,
}

fn configure(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mode = match cli.command {
        Command::Steady => Mode::Steady,
        Command::Dispersion => Mode::Dispersion,
        Command::Neutral => Mode::Neutral,
        Command::Viscous => Mode::Viscous,
        Command::Verify => Mode::Verify,
    };
    let mut cfg = RunConfig::from_file(&cli.config, mode)?;
    if let Some(f) = &cli.format {
        cfg.format = parse_format(f)?;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(g) = &cli.gamma_ratio {
        let gamma = match g.trim() {
            s if s.eq_ignore_ascii_case("inf") => Modulus::Infinite,
            s => Modulus::Finite(
                s.parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite() && *v > 0.0)
                    .with_context(|| format!("--gamma-ratio: expected a positive number or `inf`, got `{s}`"))?,
            ),
        };
        cfg.gamma_ratio = Some(gamma);
        cfg.echo.push(("gamma_ratio (cli)".into(), g.clone()));
    }
    if let Some(tol) = cli.tol {
        anyhow::ensure!(tol.is_finite() && tol > 0.0, "--tol must be positive");
        cfg.tol = Some(tol);
        cfg.echo.push(("tol (cli)".into(), tol.to_string()));
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG } else { exit::OK });
        }
    };
    let cfg = match configure(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit::CONFIG);
        }
    };
    let (report, text) = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(exit::CONFIG);
    }
    for (name, value) in &report.summary {
        if let ionfilm_cli::Cell::Num(v) = value {
            eprintln!("{name}: {v:e}");
        }
    }
    match report.outcome {
        Outcome::Ok => {}
        Outcome::NonConverged => eprintln!("warning: some rows did not converge"),
        Outcome::VerifyFailed => eprintln!("verification failed"),
    }
    ExitCode::from(report.outcome.exit_code())
}
