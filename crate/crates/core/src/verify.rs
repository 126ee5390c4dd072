//! Verification battery shared by the CLI `verify` subcommand and the
//! acceptance test target. Each check carries its measured value and the
//! bound it was compared against.

use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    achieved_rate, amd_tamper_max, estimate_lv_reliability, estimate_reliability, exhaustive_mi,
    exhaustive_secrecy, exhaustive_secrecy_ordered, extractor_exactness, hash_universality_max,
    mac_forgery_max, rate_bound, u_for_gap, EnumOrder, EstimateReport, Reliability,
};
use crate::channel::{build_strategy, ChannelParams, STRATEGY_NAMES};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::lvcode::{lv_rate, LVParams};
use crate::protocols::{run_session, SkaConfig, Variant};
use crate::rational::{display, parse_fraction, Fraction};
use crate::sampler::RngSampler;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            detail: detail.into(),
            pass,
        }
    }

    fn from_report(name: impl Into<String>, r: &EstimateReport) -> Self {
        Check::new(
            name,
            r.pass,
            format!(
                "{}/{} failures, estimate {:.6} <= bound {:.6} + 3*{:.6}",
                r.failures,
                r.trials,
                r.estimate_f64(),
                r.bound_f64(),
                r.std_error
            ),
        )
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Primitives,
    Lvcode,
    Secrecy,
    Reliability,
    Bounds,
    Mi,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Primitives,
        Suite::Lvcode,
        Suite::Secrecy,
        Suite::Reliability,
        Suite::Bounds,
        Suite::Mi,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown suite `{s}` (expected one of primitives, lvcode, secrecy, reliability, bounds, mi)"
                ))
            })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Primitives => "primitives",
            Suite::Lvcode => "lvcode",
            Suite::Secrecy => "secrecy",
            Suite::Reliability => "reliability",
            Suite::Bounds => "bounds",
            Suite::Mi => "mi",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Monte Carlo trials per strategy.
    pub trials: u64,
    /// Honest sessions per variant.
    pub sessions: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 10_000,
            sessions: 1_000,
            seed: 2024,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    match suite {
        Suite::Primitives => {
            checks.extend(mac_forgery()?);
            checks.extend(amd_security()?);
            checks.extend(extractor()?);
        }
        Suite::Lvcode => checks.extend(lv_code(opts.trials, opts.seed)?),
        Suite::Secrecy => checks.extend(perfect_secrecy()?),
        Suite::Reliability => {
            checks.extend(correctness(opts.sessions, opts.seed)?);
            checks.extend(strong_reliability(opts.trials, opts.seed)?);
            checks.extend(weak_reliability(opts.trials, opts.seed)?);
        }
        Suite::Bounds => {
            checks.extend(rate_vs_bound()?);
            checks.extend(weak_rate()?);
        }
        Suite::Mi => checks.extend(mutual_information()?),
    }
    Ok(checks)
}

fn chan(r: &str, w: &str, rho: &str) -> Result<ChannelParams> {
    ChannelParams::new(parse_fraction(r)?, parse_fraction(w)?, parse_fraction(rho)?)
}

fn big_field() -> Field {
    Field::new(65521).expect("65521 is prime")
}

/// Strong configuration used by the reliability checks.
pub fn reference_strong(variant: Variant) -> Result<SkaConfig> {
    SkaConfig::with_max_key(big_field(), 8, 64, variant, chan("0.3", "0.2", "0.5")?)
}

/// Weak configuration used by the weak-reliability checks.
pub fn reference_weak() -> Result<SkaConfig> {
    SkaConfig::with_max_key(big_field(), 8, 64, Variant::Weak, chan("0.5", "0.5", "0.5")?)
}

/// Honest sessions of every variant agree on the key.
pub fn correctness(sessions: u64, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for cfg in [reference_strong(Variant::Awtp)?, reference_strong(Variant::AwtpPd)?, reference_weak()?] {
        let mut agreed = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..sessions {
            let mut adv = build_strategy("passive", 0)?;
            let out = run_session(&cfg, adv.as_mut(), &mut RngSampler(&mut rng))?;
            agreed += out.agreed() as u64;
        }
        out.push(Check::new(
            format!("correctness/{}", cfg.variant().as_str()),
            agreed == sessions,
            format!("{agreed}/{sessions} passive sessions agreed"),
        ));
    }
    Ok(out)
}

/// Strong AWTP at q = 65521, u = 8, n1 = 64, (0.3, 0.2, 0.5).
pub fn strong_reliability(trials: u64, seed: u64) -> Result<Vec<Check>> {
    let cfg = reference_strong(Variant::Awtp)?;
    STRATEGY_NAMES
        .iter()
        .map(|s| {
            let r = estimate_reliability(&cfg, s, trials, seed)?;
            Ok(Check::from_report(format!("strong_reliability/{s}"), &r))
        })
        .collect()
}

/// Weak protocol against the overwriting strategy at rho_r = rho_w = 0.5,
/// plus the other library strategies.
pub fn weak_reliability(trials: u64, seed: u64) -> Result<Vec<Check>> {
    let cfg = reference_weak()?;
    let mut names = vec!["overlap_overwrite"];
    names.extend(STRATEGY_NAMES.iter().filter(|&&s| s != "overlap_overwrite"));
    names
        .into_iter()
        .map(|s| {
            let r = estimate_reliability(&cfg, s, trials, seed)?;
            Ok(Check::from_report(format!("weak_reliability/{s}"), &r))
        })
        .collect()
}

/// Achieved weak rate equals `((u-2)/u)(1 - rho_r)` and stays below `1 - rho_r`.
pub fn weak_rate() -> Result<Vec<Check>> {
    let ch = chan("0.5", "0.5", "0.5")?;
    let bound = rate_bound(&ch, Reliability::Weak);
    let mut out = Vec::new();
    let mut prev_gap: Option<Fraction> = None;
    for u in [4usize, 8, 16, 32] {
        let cfg = SkaConfig::with_max_key(big_field(), u, 64, Variant::Weak, ch)?;
        let rate = achieved_rate(&cfg);
        let closed = Fraction::new(u as i64 - 2, u as i64) * bound;
        let gap = bound - rate;
        let shrinking = prev_gap.is_none_or(|p| gap < p);
        prev_gap = Some(gap);
        out.push(Check::new(
            format!("weak_rate/u={u}"),
            rate == closed && rate <= bound && shrinking,
            format!(
                "rate {} = ((u-2)/u)(1-rho_r) = {}, bound {}",
                display(rate),
                display(closed),
                display(bound)
            ),
        ));
    }
    Ok(out)
}

/// Exhaustive secrecy at q = 3, u = 2, n1 = 2, l = 1 over the PD variant,
/// and the oversized-key control at q = 5, l = 2.
pub fn perfect_secrecy() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let f3 = Field::new(3)?;
    let cfg = SkaConfig::new(f3, 2, 2, Variant::AwtpPd, chan("0.5", "0", "0.5")?, 1)?;
    let fwd = exhaustive_secrecy(&cfg, "tail_reader", 0)?;
    let rev = exhaustive_secrecy_ordered(&cfg, "tail_reader", 0, EnumOrder::Reverse)?;
    out.push(Check::new(
        "secrecy/tail_reader",
        fwd.max_distance.is_zero() && rev == fwd,
        format!(
            "max_z SD = {} over {} states, {} views; reversed order identical: {}",
            display(fwd.max_distance),
            fwd.states,
            fwd.observations,
            rev == fwd
        ),
    ));

    let active = SkaConfig::new(f3, 2, 2, Variant::AwtpPd, chan("0.5", "0.5", "0.5")?, 1)?;
    for s in STRATEGY_NAMES {
        let r = exhaustive_secrecy(&active, s, 7)?;
        out.push(Check::new(
            format!("secrecy/active/{s}"),
            r.max_distance.is_zero(),
            format!("max_z SD = {} at (0.5, 0.5, 0.5)", display(r.max_distance)),
        ));
    }

    let blind = SkaConfig::new(f3, 2, 2, Variant::AwtpPd, ChannelParams::noiseless(), 1)?;
    let r = exhaustive_secrecy(&blind, "passive", 0)?;
    out.push(Check::new(
        "secrecy/no_observation",
        r.max_distance.is_zero(),
        format!("SD = {}", display(r.max_distance)),
    ));

    let over = SkaConfig::unchecked_key_len(Field::new(5)?, 2, 2, Variant::AwtpPd, chan("0.5", "0", "0.5")?, 2)?;
    let r = exhaustive_secrecy(&over, "tail_reader", 0)?;
    out.push(Check::new(
        "secrecy/negative_control",
        r.max_distance > Fraction::zero(),
        format!("oversized l = 2 > (u-1)(1-rho) n1 = 1 at q = 5: SD = {}", display(r.max_distance)),
    ));
    Ok(out)
}

fn monotone(values: &[(u32, Fraction)]) -> bool {
    values.windows(2).all(|w| w[1].1 <= w[0].1)
}

pub fn mac_forgery() -> Result<Vec<Check>> {
    let m = mac_forgery_max(7, 2)?;
    let bound = Fraction::new(2, 7);
    let sweep: Vec<(u32, Fraction)> = [3u32, 5, 7, 11, 13]
        .into_iter()
        .map(|q| Ok((q, mac_forgery_max(q, 2)?)))
        .collect::<Result<_>>()?;
    let within = sweep.iter().all(|&(q, p)| p <= Fraction::new(2, q as i64));
    let uh = hash_universality_max(7, 2)?;
    Ok(vec![
        Check::new("mac_forgery/q=7,l=2", m <= bound, format!("max {} <= {}", display(m), display(bound))),
        Check::new(
            "mac_forgery/monotone_in_q",
            monotone(&sweep) && within,
            sweep.iter().map(|(q, p)| format!("q={q}: {}", display(*p))).collect::<Vec<_>>().join(", "),
        ),
        Check::new("hash_universality/q=7,len=2", uh <= bound, format!("max {} <= {}", display(uh), display(bound))),
    ])
}

pub fn amd_security() -> Result<Vec<Check>> {
    let (m, accept) = amd_tamper_max(7, 1)?;
    let bound = Fraction::new(2, 7);
    let sweep: Vec<(u32, Fraction)> = [5u32, 7, 11, 13]
        .into_iter()
        .map(|q| Ok((q, amd_tamper_max(q, 1)?.0)))
        .collect::<Result<_>>()?;
    let within = sweep.iter().all(|&(q, p)| p <= Fraction::new(2, q as i64));
    Ok(vec![
        Check::new(
            "amd_security/q=7,d=1",
            m <= bound && accept <= bound,
            format!(
                "manipulation max {}, any-offset acceptance max {}, bound {}",
                display(m),
                display(accept),
                display(bound)
            ),
        ),
        Check::new(
            "amd_security/monotone_in_q",
            monotone(&sweep) && within,
            sweep.iter().map(|(q, p)| format!("q={q}: {}", display(*p))).collect::<Vec<_>>().join(", "),
        ),
    ])
}

pub fn extractor() -> Result<Vec<Check>> {
    let sd = extractor_exactness(11, 4)?;
    Ok(vec![Check::new(
        "extractor/q=11,N<=4",
        sd.is_zero(),
        format!("max SD over all symbol-fixing sources = {}", display(sd)),
    )])
}

/// `(rho_r, rho_w, rho)` with the LV rate computed by hand.
const LV_RATE_TABLE: [(&str, &str, &str, &str); 10] = [
    ("0", "0", "0", "1"),
    ("0.3", "0.2", "0.5", "4/5"),
    ("0.5", "0.5", "0.5", "0"),
    ("0.25", "0.25", "0.5", "3/4"),
    ("0.4", "0.2", "0.5", "7/10"),
    ("0.1", "0.1", "0.1", "4/5"),
    ("1/3", "1/6", "1/2", "5/6"),
    ("0.2", "0", "0.2", "1"),
    ("0", "0.3", "0.3", "7/10"),
    ("0.6", "0.3", "0.7", "1/2"),
];

pub fn lv_code(trials: u64, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let f = big_field();

    // Uncorrupted round trips.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = 0;
    let total = 200;
    for i in 0..total {
        let u = 3 + i % 6;
        let k = 1 + i % 23;
        let lv = LVParams::new(f, u, k, k + i % 7, ChannelParams::noiseless())?;
        let msg: Vec<Vec<u32>> = (0..k).map(|_| (0..u - 2).map(|_| rng.gen_range(0..65521)).collect()).collect();
        let cw = lv.encode(&msg, &mut RngSampler(&mut rng))?;
        ok += (lv.decode(&cw.to_word()) == Some(msg)) as usize;
    }
    out.push(Check::new("lv/round_trip", ok == total, format!("{ok}/{total} exact")));

    for (r, w, rho) in [("0.3", "0.2", "0.5"), ("0.4", "0.2", "0.5")] {
        let lv = LVParams::for_message(f, 8, 22, chan(r, w, rho)?)?;
        for s in STRATEGY_NAMES {
            let rep = estimate_lv_reliability(&lv, s, trials, seed)?;
            out.push(Check::from_report(format!("lv/({r},{w},{rho}),n={}/{s}", lv.n()), &rep));
        }
    }

    let mut exact = 0;
    let mut details = Vec::new();
    for (r, w, rho, want) in LV_RATE_TABLE {
        let got = lv_rate(parse_fraction(r)?, parse_fraction(w)?, parse_fraction(rho)?)?;
        let want = parse_fraction(want)?;
        if got == want {
            exact += 1;
        } else {
            details.push(format!("({r},{w},{rho}): {} != {}", display(got), display(want)));
        }
    }
    out.push(Check::new(
        "lv/rate_closed_form",
        exact == LV_RATE_TABLE.len(),
        if details.is_empty() {
            format!("{exact}/{} triples exact", LV_RATE_TABLE.len())
        } else {
            details.join("; ")
        },
    ));
    Ok(out)
}

/// Key rate never exceeds `1 - rho`, and with `u >= 1/xi + 4/(xi R)` it is
/// within `xi` of it.
pub fn rate_vs_bound() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let f = big_field();
    let rhos = ["0", "0.25", "0.5"];
    let mut under = 0;
    let mut total = 0;
    let mut worst = Vec::new();
    for u in [4usize, 8, 16] {
        for rho in rhos {
            let rho = parse_fraction(rho)?;
            let half = rho / Fraction::from_integer(2);
            let ch = ChannelParams::new(half, half, rho)?;
            for variant in [Variant::Awtp, Variant::AwtpPd] {
                let cfg = SkaConfig::with_max_key(f, u, 64, variant, ch)?;
                let rate = achieved_rate(&cfg);
                let bound = rate_bound(&ch, Reliability::Strong);
                total += 1;
                if rate <= bound {
                    under += 1;
                } else {
                    worst.push(format!("u={u} rho={} {}: {} > {}", display(rho), variant.as_str(), display(rate), display(bound)));
                }
            }
        }
    }
    out.push(Check::new(
        "rate/below_bound",
        under == total,
        if worst.is_empty() {
            format!("{under}/{total} sweep points with achieved rate <= 1 - rho (exact)")
        } else {
            worst.join("; ")
        },
    ));

    for xi in ["0.1", "0.05"] {
        let xi = parse_fraction(xi)?;
        for rho in rhos {
            let rho = parse_fraction(rho)?;
            let half = rho / Fraction::from_integer(2);
            let ch = ChannelParams::new(half, half, rho)?;
            let u = u_for_gap(xi, ch.lv_rate());
            let n1 = 2 * (u - 2);
            let cfg = SkaConfig::with_max_key(f, u, n1, Variant::Awtp, ch)?;
            let rate = achieved_rate(&cfg);
            let target = Fraction::from_integer(1) - rho - xi;
            out.push(Check::new(
                format!("rate/gap/xi={},rho={}", display(xi), display(rho)),
                rate >= target,
                format!("u={u}, n1={n1}: rate {:.4} >= {:.4}", crate::rational::to_f64(rate), crate::rational::to_f64(target)),
            ));
        }
    }
    Ok(out)
}

pub fn mutual_information() -> Result<Vec<Check>> {
    let cases: [(&str, &[usize], &[usize]); 3] = [
        ("S_r={1},S_w={2}", &[0], &[1]),
        ("identity", &[], &[]),
        ("S_r={1},S_w={1}", &[0], &[0]),
    ];
    cases
        .into_iter()
        .map(|(name, r, w)| {
            let rep = exhaustive_mi(2, 3, 1, r, w)?;
            Ok(Check::new(
                format!("mi/{name}"),
                rep.pass,
                format!(
                    "I(X;Y|Z) = {:.6} (expect {:.6}), I(X;Y) = {:.6} <= {:.6}",
                    rep.i_xy_given_z, rep.expected_conditional, rep.i_xy, rep.unconditional_bound
                ),
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.as_str()).unwrap(), s);
        }
        assert!(matches!(Suite::parse("nope"), Err(Error::Usage(_))));
    }

    #[test]
    fn quick_suites_pass() {
        for s in [Suite::Bounds, Suite::Mi, Suite::Secrecy] {
            let checks = run_suite(s, &VerifyOptions::default()).unwrap();
            for c in &checks {
                assert!(c.pass, "{c}");
            }
        }
    }
}
