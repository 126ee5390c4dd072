//! `awtp`: run sessions, verification suites and parameter sweeps.
//!
//! Exit codes: 0 success, 1 a bound or suite check failed, 2 usage or
//! configuration error.

mod config;
mod report;
mod sweep;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use awtp_core::protocols::SessionTranscript;
use awtp_core::verify::{run_suite, Suite, VerifyOptions};
use awtp_core::{build_strategy, run_session, RngSampler};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use config::{ExperimentConfig, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] awtp_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use awtp_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(
                E::NotPrime(_)
                | E::Usage(_)
                | E::Parameter(_)
                | E::Config(_)
                | E::UnknownStrategy(_)
                | E::Malformed(_)
                | E::Guard(_),
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "awtp", version, about = "Key agreement over adversarial wiretap channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Extra key=value override; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one session and write its JSON transcript.
    Run(Common),
    /// Run a verification suite: primitives, lvcode, secrecy, reliability, bounds, mi or all.
    Verify {
        suite: String,
        /// Honest sessions per variant in the reliability suite.
        #[arg(long)]
        sessions: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// One reliability row per value of a configuration field.
    Sweep {
        /// q, u, n1, key_len, rho_r, rho_w, rho (sets rho_r = rho_w = rho/2) or trials.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[command(flatten)]
        common: Common,
    },
    /// Pretty-print a transcript JSON file.
    Report {
        file: PathBuf,
        #[arg(long)]
        format: Option<String>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    for kv in &common.overrides {
        cfg.apply_override(kv)?;
    }
    if let Some(s) = common.seed {
        cfg.seed = Some(s);
    }
    if let Some(t) = common.trials {
        cfg.set("trials", &t.to_string())?;
    }
    if let Some(s) = &common.strategy {
        cfg.set("strategy", s)?;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    if let Some(f) = &common.format {
        cfg.format = Some(Format::parse(f)?);
    }
    Ok(cfg)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }
    }
}

fn cmd_run(common: &Common) -> Result<bool, CliError> {
    let cfg = load(common)?;
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Usage("run writes a JSON transcript; --format csv is not supported".into()));
    }
    let seed = cfg.seed()?;
    let proto = cfg.protocol()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adv = build_strategy(&cfg.strategy, seed)?;
    let outcome = run_session(&proto, adv.as_mut(), &mut RngSampler(&mut rng))?;
    let transcript = SessionTranscript::new(&proto, &cfg.strategy, Some(seed), &outcome);
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("transcript.json"));
    write_output(Some(&out), &(transcript.to_json_pretty() + "\n"))?;
    let len = |k: &Option<Vec<u32>>| k.as_ref().map_or("⊥".to_string(), |k| k.len().to_string());
    println!(
        "variant={} strategy={} keys_equal={} len(k_A)={} len(k_B)={} accepted={} transcript={}",
        proto.variant().as_str(),
        cfg.strategy,
        outcome.agreed(),
        len(&outcome.k_a),
        len(&outcome.k_b),
        outcome.accepted,
        out.display()
    );
    Ok(true)
}

fn cmd_verify(suite: &str, sessions: Option<u64>, common: &Common) -> Result<bool, CliError> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(suite)?]
    };
    let format = common.format.as_deref().map(Format::parse).transpose()?;
    let mut opts = VerifyOptions::default();
    if let Some(s) = common.seed {
        opts.seed = s;
    }
    if let Some(t) = common.trials {
        if t == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        opts.trials = t;
    }
    if let Some(s) = sessions {
        opts.sessions = s;
    }
    let mut all_pass = true;
    let mut text = String::new();
    let mut rows = Vec::new();
    for s in suites {
        let checks = run_suite(s, &opts)?;
        let pass = checks.iter().all(|c| c.pass);
        all_pass &= pass;
        match format {
            Some(Format::Json) => {
                for c in &checks {
                    rows.push(serde_json::json!({
                        "suite": s.as_str(),
                        "check": c.name,
                        "pass": c.pass,
                        "detail": c.detail,
                    }));
                }
            }
            Some(Format::Csv) => {
                if text.is_empty() {
                    text.push_str("suite,check,pass,detail\n");
                }
                for c in &checks {
                    text.push_str(&format!("{},{},{},\"{}\"\n", s.as_str(), c.name, c.pass, c.detail.replace('"', "'")));
                }
            }
            None => {
                text.push_str(&format!("{} suite {}\n", if pass { "PASS" } else { "FAIL" }, s.as_str()));
                for c in &checks {
                    text.push_str(&format!("  {c}\n"));
                }
            }
        }
    }
    if format == Some(Format::Json) {
        text = serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n";
    }
    write_output(common.out.as_deref(), &text)?;
    Ok(all_pass)
}

fn cmd_report(file: &Path, format: Option<&str>) -> Result<bool, CliError> {
    let text = fs::read_to_string(file).map_err(|source| CliError::Io {
        path: file.to_path_buf(),
        source,
    })?;
    let transcript = SessionTranscript::from_json(&text)?;
    let out = match format.map(Format::parse).transpose()? {
        Some(Format::Json) => transcript.to_json_pretty() + "\n",
        Some(Format::Csv) => return Err(CliError::Usage("report prints text or json".into())),
        None => report::render(&transcript),
    };
    write_output(None, &out)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(common) => cmd_run(common),
        Command::Verify { suite, sessions, common } => cmd_verify(suite, *sessions, common),
        Command::Sweep { axis, values, common } => load(common).and_then(|cfg| sweep::cmd_sweep(&cfg, axis, values)),
        Command::Report { file, format } => cmd_report(file, format.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("awtp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
