//! `sweep`: one reliability estimate per axis value.
//!
//! CSV columns, in this order:
//! `config_hash,estimator,axis,value,trials,estimate,std_error,bound,pass,achieved_rate,rate_bound,feasible`.
//! `config_hash` is the short SHA-256 of the canonical configuration of that
//! row. Infeasible points keep their row with `pass = false`,
//! `feasible = false` and empty numeric fields; the reason goes to stderr.

use awtp_core::analysis::{achieved_rate, estimate_reliability, rate_bound, short_digest, Reliability};
use awtp_core::rational::{parse_fraction, to_f64};
use awtp_core::{Fraction, Variant};
use serde::Serialize;

use crate::config::{ExperimentConfig, Format};
use crate::{write_output, CliError};

pub const CSV_HEADER: &str =
    "config_hash,estimator,axis,value,trials,estimate,std_error,bound,pass,achieved_rate,rate_bound,feasible";

const AXES: [&str; 8] = ["q", "u", "n1", "key_len", "rho_r", "rho_w", "rho", "trials"];

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub config_hash: String,
    pub estimator: String,
    pub axis: String,
    pub value: String,
    pub trials: u64,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub bound: Option<f64>,
    pub pass: bool,
    pub achieved_rate: Option<f64>,
    pub rate_bound: Option<f64>,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Row {
    fn csv(&self) -> String {
        let f = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.config_hash,
            self.estimator,
            self.axis,
            self.value,
            self.trials,
            f(self.estimate),
            f(self.std_error),
            f(self.bound),
            self.pass,
            f(self.achieved_rate),
            f(self.rate_bound),
            self.feasible
        )
    }
}

fn apply_axis(cfg: &mut ExperimentConfig, axis: &str, value: &str) -> Result<(), CliError> {
    if axis == "rho" {
        // rho moves the whole channel: rho_r = rho_w = rho / 2
        let rho = parse_fraction(value).map_err(|e| CliError::Config(format!("`rho`: {e}")))?;
        let half = rho / Fraction::from_integer(2);
        cfg.rho = rho;
        cfg.rho_r = half;
        cfg.rho_w = half;
        Ok(())
    } else {
        cfg.set(axis, value)
    }
}

pub fn sweep_rows(template: &ExperimentConfig, axis: &str, values: &[&str]) -> Result<Vec<Row>, CliError> {
    if !AXES.contains(&axis) {
        return Err(CliError::Usage(format!(
            "unknown sweep axis `{axis}` (expected one of {})",
            AXES.join(", ")
        )));
    }
    let seed = template.seed()?;
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let mut cfg = template.clone();
        let estimator = format!("reliability/{}", cfg.strategy);
        let infeasible = |cfg: &ExperimentConfig, reason: String| Row {
            config_hash: short_digest(&cfg.canonical()),
            estimator: estimator.clone(),
            axis: axis.to_string(),
            value: value.to_string(),
            trials: cfg.trials,
            estimate: None,
            std_error: None,
            bound: None,
            pass: false,
            achieved_rate: None,
            rate_bound: None,
            feasible: false,
            reason: Some(reason),
        };
        if let Err(e) = apply_axis(&mut cfg, axis, value) {
            match e {
                CliError::Config(reason) => {
                    rows.push(infeasible(&cfg, reason));
                    continue;
                }
                other => return Err(other),
            }
        }
        let proto = match cfg.protocol() {
            Ok(p) => p,
            Err(e) => {
                rows.push(infeasible(&cfg, e.to_string()));
                continue;
            }
        };
        let report = estimate_reliability(&proto, &cfg.strategy, cfg.trials, seed)?;
        let mode = if proto.variant() == Variant::Weak {
            Reliability::Weak
        } else {
            Reliability::Strong
        };
        rows.push(Row {
            config_hash: short_digest(&cfg.canonical()),
            estimator,
            axis: axis.to_string(),
            value: value.to_string(),
            trials: report.trials,
            estimate: Some(report.estimate_f64()),
            std_error: Some(report.std_error),
            bound: Some(report.bound_f64()),
            pass: report.pass,
            achieved_rate: Some(to_f64(achieved_rate(&proto))),
            rate_bound: Some(to_f64(rate_bound(proto.channel(), mode))),
            feasible: true,
            reason: None,
        });
    }
    Ok(rows)
}

pub fn cmd_sweep(template: &ExperimentConfig, axis: &str, values: &str) -> Result<bool, CliError> {
    let values: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    let rows = sweep_rows(template, axis, &values)?;
    for r in rows.iter().filter(|r| !r.feasible) {
        eprintln!("awtp: {}={} infeasible: {}", r.axis, r.value, r.reason.as_deref().unwrap_or(""));
    }
    let text = match template.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from(CSV_HEADER);
            t.push('\n');
            for r in &rows {
                t.push_str(&r.csv());
                t.push('\n');
            }
            t
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
    };
    write_output(template.out.as_deref(), &text)?;
    Ok(rows.iter().filter(|r| r.feasible).all(|r| r.pass))
}
