//! `rqbc` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when an
//! audit finds violations or, with `--strict`, when a run contains an abort
//! or a scan disagrees with its reference values.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rqbc_core::adversary::{build_report, default_strategy_menu, SecurityReport, Strategy};
use rqbc_core::harness::{
    enumerate, monte_carlo, sample_transcripts, to_sorted_json_pretty, write_jsonl, RunConfig,
};
use rqbc_core::spacetime::{audit, unchecked_schedule, Schedule, Topology};
use rqbc_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rqbc", version, about = "Relativistic quantum bit commitment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sampled executions as transcript JSONL, or a statistics summary.
    Run {
        #[command(flatten)]
        common: Common,
        /// Emit a Monte Carlo summary against exact probabilities instead of transcripts.
        #[arg(long)]
        summary: bool,
    },
    /// Exact branch tree of one execution as JSON.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Security report over the strategy menu.
    AttackScan {
        #[command(flatten)]
        common: Common,
    },
    /// Light-cone check of a schedule.
    Audit {
        #[command(flatten)]
        common: Common,
    },
    /// Render a security report (from `--input` or freshly computed) as a table.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// single, multi or string.
    #[arg(long)]
    scheme: Option<String>,
    /// Z0, Z1, X0, X1, uniform-z or uniform.
    #[arg(long)]
    phi: Option<String>,
    /// Committer label as two bits (e.g. 01) or a name (zeta+, eta-).
    #[arg(long)]
    alice_label: Option<String>,
    /// Bob's label, or `uniform`.
    #[arg(long)]
    bob_label: Option<String>,
    /// Validation mode R1 or R2.
    #[arg(long)]
    mode: Option<String>,
    /// honest, relabel:<ij>, rechoice:<ij>, extract:<z|x|bell>, skip:<z|x|bell>.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Reveal time.
    #[arg(long = "T")]
    reveal_time: Option<f64>,
    #[arg(long)]
    n_pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Exit 2 on any abort or disagreement.
    #[arg(long)]
    strict: bool,
    /// JSON file with the same field names as these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input file: a schedule for `audit`, a report for `report`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

impl Common {
    fn config(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(s) = &self.scheme {
            cfg.scheme = s.parse()?;
        }
        if let Some(m) = &self.mode {
            cfg.mode = m.parse()?;
        }
        if let Some(s) = &self.strategy {
            s.parse::<Strategy>()?;
            cfg.strategy = s.clone();
        }
        macro_rules! take {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = &self.$field {
                    cfg.$target = v.clone().into();
                })*
            };
        }
        take!(phi => phi, alice_label => alice_label, bob_label => bob_label,
              x => x, c => c, reveal_time => reveal_time, n_pairs => n_pairs,
              seed => seed, trials => trials);
        if let Some(p) = &self.output {
            cfg.output = Some(p.display().to_string());
        }
        Ok(cfg)
    }
}

fn emit(out: &mut dyn Write, cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {path}: {e}"))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("cannot write output: {e}"))),
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    Ok(with_newline(to_sorted_json_pretty(value)?))
}

fn strict_failure(strict: bool, failed: bool, what: &str) -> Result<(), Failure> {
    if strict && failed {
        return Err(Failure {
            code: EXIT_FAILED,
            message: what.to_string(),
        });
    }
    Ok(())
}

fn scan(common: &Common, cfg: &RunConfig) -> Result<SecurityReport, Failure> {
    let params = cfg.params()?;
    let strategies = match &common.strategy {
        Some(s) => vec![s.parse::<Strategy>()?],
        None => default_strategy_menu(),
    };
    Ok(build_report(&params, &strategies, cfg.mode)?)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Run { common, summary } => {
            let cfg = common.config()?;
            if summary {
                let stats = monte_carlo(&cfg)?;
                let text = match common.format {
                    Some(Format::Table) => stats.render(),
                    _ => json(&stats)?,
                };
                emit(out, &cfg, &text)?;
                strict_failure(common.strict, !stats.all_agree, "empirical frequencies disagree with exact values")
            } else {
                let ts = sample_transcripts(&cfg)?;
                emit(out, &cfg, &write_jsonl(&ts)?)?;
                let aborted = ts.iter().any(|t| !t.verdict.is_some_and(|v| v.is_accept()));
                strict_failure(common.strict, aborted, "at least one execution aborted")
            }
        }
        Command::Enumerate { common } => {
            let cfg = common.config()?;
            let e = enumerate(&cfg)?;
            emit(out, &cfg, &json(&e)?)?;
            strict_failure(common.strict, e.acceptance_probability < 1.0 - 1e-12, "some branches abort")
        }
        Command::AttackScan { common } => {
            let cfg = common.config()?;
            let report = scan(&common, &cfg)?;
            let text = match common.format {
                Some(Format::Table) => report.render(),
                _ => json(&report)?,
            };
            emit(out, &cfg, &text)?;
            strict_failure(common.strict, !report.all_agree(), "report disagrees with reference values")
        }
        Command::Audit { common } => {
            let cfg = common.config()?;
            let topology = Topology::standard(cfg.scheme, cfg.x, cfg.c)?;
            let schedule: Schedule = match &common.input {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
                None => {
                    if !(cfg.x > 0.0 && cfg.c > 0.0) {
                        return Err(usage("x and c must be positive"));
                    }
                    let t = cfg.reveal_time.unwrap_or(10.0 * cfg.x / cfg.c);
                    unchecked_schedule(cfg.x, cfg.c, t, cfg.scheme)?
                }
            };
            let report = audit(&schedule, &topology)?;
            let text = match common.format {
                Some(Format::Table) => {
                    let mut s = format!("{} violation(s)\n", report.violations.len());
                    for v in &report.violations {
                        s.push_str(&format!("  {v}\n"));
                    }
                    s
                }
                _ => json(&serde_json::json!({
                    "valid": report.is_valid(),
                    "violations": report.violations,
                }))?,
            };
            emit(out, &cfg, &text)?;
            if report.is_valid() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_FAILED,
                    message: format!("schedule has {} causality violation(s)", report.violations.len()),
                })
            }
        }
        Command::Report { common } => {
            let cfg = common.config()?;
            let report: SecurityReport = match &common.input {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
                None => scan(&common, &cfg)?,
            };
            let text = match common.format {
                Some(Format::Json) => json(&report)?,
                _ => report.render(),
            };
            emit(out, &cfg, &text)?;
            strict_failure(common.strict, !report.all_agree(), "report disagrees with reference values")
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "rqbc: {}", f.message);
            f.code
        }
    }
}

