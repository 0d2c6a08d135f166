//! Command-line front end: scenario loading, dispatch and report emission.

pub mod commands;
pub mod report;
pub mod scenario;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use commands::{CommandError, Options};
use scenario::{load_scenario, parse_constant, LoadError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_FLAGGED: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "hodge-neron", version, about = "Run a nilpotent-orbit scenario through one analysis command")]
pub struct Cli {
    /// One of: validate, wfilt, splitting, sl2, estimate-scan, presentation, fiber, tz-closure,
    /// quotient-fiber, monodromy, nf-validate, nf-v0, nf-singularity, nf-closure, report-all
    pub command: String,
    pub scenario: PathBuf,
    /// Base point `s1,s2,...` (exact scalars); for nf-v0 the imaginary parts `y`.
    #[arg(long)]
    pub point: Option<String>,
    /// Stratum as 1-based indices of vanishing coordinates, e.g. `1,2`.
    #[arg(long)]
    pub stratum: Option<String>,
    /// Scan levels, e.g. `10,20,40,80`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub height: Option<u32>,
    #[arg(long)]
    pub no_derivative_sections: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn list<T>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',').map(|x| f(x.trim())).collect()
}

fn options(c: &Cli) -> Result<Options, String> {
    let point = c.point.as_deref().map(|p| list(p, parse_constant)).transpose()?;
    let stratum = c
        .stratum
        .as_deref()
        .map(|p| {
            if p.trim().is_empty() {
                return Ok(vec![]);
            }
            list(p, |x| match x.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k - 1),
                _ => Err(format!("bad stratum index '{x}'")),
            })
        })
        .transpose()?;
    let grid = c
        .grid
        .as_deref()
        .map(|p| list(p, |x| x.parse::<u32>().map(f64::from).map_err(|_| format!("bad grid level '{x}'"))))
        .transpose()?;
    Ok(Options { point, stratum, grid, height: c.height, no_derivative_sections: c.no_derivative_sections })
}

/// Runs one invocation; returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    if !commands::COMMANDS.contains(&cli.command.as_str()) {
        let _ = writeln!(err, "{}", CommandError::Unknown(cli.command.clone()));
        return EXIT_ERROR;
    }
    let opts = match options(&cli) {
        Ok(o) => o,
        Err(m) => {
            let _ = writeln!(err, "usage error: {m}");
            return EXIT_ERROR;
        }
    };
    let scenario = match load_scenario(&cli.scenario) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return if matches!(e, LoadError::Validation(_)) { EXIT_VALIDATION } else { EXIT_ERROR };
        }
    };
    let reports = match commands::run(&cli.command, &scenario, &opts) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_ERROR;
        }
    };
    let json = if reports.len() == 1 {
        reports[0].to_json()
    } else {
        serde_json::Value::Array(reports.iter().map(|r| r.to_json()).collect())
    };
    let json_text = serde_json::to_string_pretty(&json).unwrap_or_default() + "\n";
    let body = match cli.format {
        Format::Text => reports.iter().map(|r| r.to_text()).collect::<Vec<_>>().join("\n"),
        Format::Json => json_text.clone(),
    };
    let _ = out.write_all(body.as_bytes());
    if let Some(p) = &cli.out {
        if let Err(e) = std::fs::write(p, &json_text) {
            let _ = writeln!(err, "cannot write {}: {e}", p.display());
            return EXIT_ERROR;
        }
    }
    let failed: Vec<String> =
        reports.iter().flat_map(|r| r.failed_flags().into_iter().map(move |f| format!("{}: {}", r.command, f.name))).collect();
    if failed.is_empty() {
        EXIT_OK
    } else {
        for f in &failed {
            let _ = writeln!(err, "flagged property failed: {f}");
        }
        EXIT_FLAGGED
    }
}
