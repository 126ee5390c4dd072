//! Experiment configuration: a flat `key = value` file plus overrides.
//!
//! Keys and defaults:
//!
//! | key       | default  |
//! |-----------|----------|
//! | variant   | awtp     |
//! | q         | 65521    |
//! | u         | 8        |
//! | n1 (or n) | 64       |
//! | rho_r     | 0.3      |
//! | rho_w     | 0.2      |
//! | rho       | 0.5      |
//! | key_len   | largest allowed |
//! | strategy  | passive  |
//! | trials    | 1000     |
//! | seed      | required |
//! | out       | none     |
//! | format    | command dependent |

use std::fmt;
use std::path::PathBuf;

use awtp_core::protocols::max_key_len;
use awtp_core::rational::{display, parse_fraction};
use awtp_core::{ChannelParams, Field, Fraction, SkaConfig, Variant, STRATEGY_NAMES};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub q: u32,
    pub u: usize,
    pub n1: usize,
    pub rho_r: Fraction,
    pub rho_w: Fraction,
    pub rho: Fraction,
    pub key_len: Option<usize>,
    pub strategy: String,
    pub trials: u64,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            variant: Variant::Awtp,
            q: 65521,
            u: 8,
            n1: 64,
            rho_r: Fraction::new(3, 10),
            rho_w: Fraction::new(1, 5),
            rho: Fraction::new(1, 2),
            key_len: None,
            strategy: "passive".into(),
            trials: 1000,
            seed: None,
            out: None,
            format: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("`{key}` expects a non-negative integer, got `{value}`")))
}

fn parse_frac(key: &str, value: &str) -> Result<Fraction, CliError> {
    parse_fraction(value).map_err(|e| CliError::Config(format!("`{key}`: {e}")))
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got `{line}`", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "variant" => self.variant = Variant::parse(value).map_err(|e| CliError::Config(e.to_string()))?,
            "q" => self.q = parse_num(key, value)?,
            "u" => self.u = parse_num(key, value)?,
            "n1" | "n" => self.n1 = parse_num(key, value)?,
            "rho_r" => self.rho_r = parse_frac(key, value)?,
            "rho_w" => self.rho_w = parse_frac(key, value)?,
            "rho" => self.rho = parse_frac(key, value)?,
            "key_len" | "l" => {
                self.key_len = if value == "max" { None } else { Some(parse_num(key, value)?) }
            }
            "strategy" => {
                if !STRATEGY_NAMES.contains(&value) {
                    return Err(CliError::Config(format!(
                        "unknown strategy `{value}` (expected one of {})",
                        STRATEGY_NAMES.join(", ")
                    )));
                }
                self.strategy = value.to_string();
            }
            "trials" => {
                let t: u64 = parse_num(key, value)?;
                if t == 0 {
                    return Err(CliError::Config("`trials` must be at least 1".into()));
                }
                self.trials = t;
            }
            "seed" => self.seed = Some(parse_num(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = Some(Format::parse(value)?),
            other => return Err(CliError::Config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), CliError> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("override `{kv}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Config("`seed` is required (set it in the config file or pass --seed)".into()))
    }

    /// Builds and validates the protocol configuration.
    pub fn protocol(&self) -> Result<SkaConfig, CliError> {
        let field = Field::new(self.q)?;
        let channel = ChannelParams::new(self.rho_r, self.rho_w, self.rho)?;
        let key_len = self
            .key_len
            .unwrap_or_else(|| max_key_len(self.variant, self.u, self.n1, &channel));
        Ok(SkaConfig::new(field, self.u, self.n1, self.variant, channel, key_len)?)
    }

    /// Canonical `key=value` text, the input to the configuration hash.
    pub fn canonical(&self) -> String {
        let key_len = self.key_len.map_or("max".to_string(), |l| l.to_string());
        format!(
            "variant={}\nq={}\nu={}\nn1={}\nrho_r={}\nrho_w={}\nrho={}\nkey_len={key_len}\nstrategy={}\ntrials={}\nseed={}\n",
            self.variant.as_str(),
            self.q,
            self.u,
            self.n1,
            display(self.rho_r),
            display(self.rho_w),
            display(self.rho),
            self.strategy,
            self.trials,
            self.seed.map_or("none".into(), |s| s.to_string()),
        )
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}
