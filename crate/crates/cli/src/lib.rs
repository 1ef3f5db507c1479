//! Command-line front end for `twophoton-core`: config parsing, protocol runs
//! checked against the projector oracle, and report output.

pub mod config;
pub mod ket;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use twophoton_core::measurement::{ProjectorFamily, PAIR_LABELS};
use twophoton_core::protocol::{
    compare_reports, oracle_report, run_protocol, ProtocolReport, Verdict,
};
use twophoton_core::Amplitude;

use config::{parse_config, ConfigError, RunConfig};
use report::{format_number, Format};

#[derive(Debug, Parser)]
#[command(
    name = "twophoton",
    version,
    about = "Two-photon projective measurement via auxiliary photons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run the protocol, check it against the oracle and write the report.
    Run {
        /// Config file, or inline JSON starting with '{'.
        #[arg(long)]
        config: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the protocol and print only the oracle comparison.
    Verify {
        #[arg(long)]
        config: String,
    },
    /// Print the parity family as a config skeleton.
    Families,
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Pass = 0,
    Invalid = 1,
    ParseFailure = 2,
    Mismatch = 3,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_verdict(verdict: &Verdict) -> Self {
        if verdict.passed() {
            Status::Pass
        } else {
            Status::Mismatch
        }
    }
}

struct Failure {
    status: Status,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(err: ConfigError) -> Self {
        let status = match err {
            ConfigError::Parse(_) => Status::ParseFailure,
            ConfigError::Invalid(_) => Status::Invalid,
        };
        Failure {
            status,
            message: err.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        status: Status::Invalid,
        message: message.into(),
    }
}

/// Reads `arg` as inline JSON if it starts with '{', otherwise as a path.
pub fn load_config(arg: &str) -> Result<RunConfig, ConfigError> {
    if arg.trim_start().starts_with('{') {
        return parse_config(arg);
    }
    let text = fs::read_to_string(arg)
        .map_err(|e| ConfigError::Parse(format!("cannot read config {arg}: {e}")))?;
    parse_config(&text)
}

fn evaluate(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<(ProtocolReport, Verdict), Failure> {
    for w in &cfg.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let report = run_protocol(&cfg.input, &cfg.family, cfg.mode, &cfg.analyzer)
        .map_err(|e| invalid(e.to_string()))?;
    let oracle = oracle_report(&cfg.input, &cfg.family).map_err(|e| invalid(e.to_string()))?;
    let verdict = compare_reports(&report, &oracle, cfg.tol);
    for m in &verdict.mismatches {
        let _ = writeln!(stderr, "mismatch: {m}");
    }
    Ok((report, verdict))
}

fn run(
    config: &str,
    format: Format,
    out: Option<&PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<Status, Failure> {
    let cfg = load_config(config)?;
    let (report, verdict) = evaluate(&cfg, stderr)?;
    let text = match format {
        Format::Json => report::to_json(&report, cfg.preset.as_deref()),
        Format::Csv => report::to_csv(&report).map_err(|e| invalid(format!("csv: {e}")))?,
    };
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| invalid(format!("cannot write report: {e}")))?,
    }
    Ok(Status::from_verdict(&verdict))
}

fn verify(config: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Status, Failure> {
    let cfg = load_config(config)?;
    let (report, verdict) = evaluate(&cfg, stderr)?;
    let t = &report.totals;
    let conditional: Vec<String> = t.conditional_j.iter().map(|p| format_number(*p)).collect();
    let _ = writeln!(
        stdout,
        "{} mode={} success_probability={} conditional_j=[{}] mismatches={}",
        if verdict.passed() { "pass" } else { "fail" },
        report.mode.name(),
        format_number(t.success_probability),
        conditional.join(", "),
        verdict.mismatches.len()
    );
    Ok(Status::from_verdict(&verdict))
}

fn state_expression(state: &[Amplitude; 4]) -> String {
    let one = Amplitude::new(1.0, 0.0);
    let zero = Amplitude::new(0.0, 0.0);
    let unit = state.iter().filter(|a| **a == one).count() == 1
        && state.iter().filter(|a| **a == zero).count() == 3;
    match state.iter().position(|a| *a == one) {
        Some(k) if unit => format!("|{}>", PAIR_LABELS[k]),
        _ => ket::format_ket(state),
    }
}

/// The parity family written out as a complete, runnable config.
pub fn families_skeleton() -> String {
    let family = ProjectorFamily::parity();
    let basis: Vec<String> = family
        .basis()
        .states()
        .iter()
        .map(|s| format!("\"{}\"", state_expression(s)))
        .collect();
    let assignment: Vec<String> = family
        .assignment()
        .to_matrix()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(u8::to_string).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!(
        "{{\n  \"input_state\": \"|HH>\",\n  \"family\": {{\n    \"basis\": [{}],\n    \"assignment\": [{}]\n  }},\n  \"mode\": \"parity5\",\n  \"analyzer\": \"linear\",\n  \"tol\": {}\n}}\n",
        basis.join(", "),
        assignment.join(", "),
        format_number(twophoton_core::statevec::DEFAULT_TOL)
    )
}

/// Executes one command; diagnostics go to `stderr`, reports to `stdout` or `--out`.
pub fn run_command(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Status {
    let result = match command {
        Command::Run {
            config,
            format,
            out,
        } => run(config, *format, out.as_ref(), stdout, stderr),
        Command::Verify { config } => verify(config, stdout, stderr),
        Command::Families => stdout
            .write_all(families_skeleton().as_bytes())
            .map(|_| Status::Pass)
            .map_err(|e| invalid(format!("cannot write: {e}"))),
    };
    match result {
        Ok(status) => status,
        Err(f) => {
            let kind = match f.status {
                Status::ParseFailure => "parse error",
                _ => "error",
            };
            let _ = writeln!(stderr, "{kind}: {}", f.message);
            f.status
        }
    }
}
