//! Estimators, exhaustive oracles, rates and bounds.
//!
//! Monte Carlo estimators parallelize over trials; trial `i` runs on a
//! ChaCha8 stream `i` of the master seed, so results do not depend on the
//! thread count. Everything exhaustive is sequential and exact.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{awtp_transmit, build_strategy, ChannelParams, Direction, Layout, RoundContext};
use crate::error::{Error, Result};
use crate::gf::{is_prime, Field};
use crate::lvcode::LVParams;
use crate::primitives::{sf_extract, universal_hash, AmdParams};
use crate::protocols::{run_session, Observation, SkaConfig, Variant};
use crate::rational::{to_f64, Fraction};
use crate::sampler::{RngSampler, ScriptedSampler};

/// Largest randomness space the exhaustive secrecy check will enumerate.
pub const SECRECY_GUARD: u64 = 1 << 24;
/// Largest joint support for the mutual-information check.
pub const MI_GUARD: u64 = 1 << 20;
/// Largest field for the forgery oracles.
pub const FORGERY_MAX_Q: u32 = 31;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimator: String,
    pub failures: u64,
    pub trials: u64,
    #[serde(with = "frac_str")]
    pub point_estimate: Fraction,
    pub std_error: f64,
    #[serde(with = "frac_str")]
    pub bound: Fraction,
    pub pass: bool,
}

mod frac_str {
    use super::Fraction;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(f: &Fraction, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", f.numer(), f.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Fraction, D::Error> {
        let s = String::deserialize(d)?;
        crate::rational::parse_fraction(&s).map_err(serde::de::Error::custom)
    }
}

impl EstimateReport {
    /// Binomial report. The standard error is taken at
    /// `max(p_hat, bound)` so that a run with zero failures still carries
    /// an honest margin.
    pub fn new(estimator: impl Into<String>, failures: u64, trials: u64, bound: Fraction) -> Self {
        assert!(trials >= 1, "at least one trial");
        let point_estimate = Fraction::new(failures as i64, trials as i64);
        let p = to_f64(point_estimate).max(to_f64(bound)).min(1.0);
        let std_error = (p * (1.0 - p) / trials as f64).sqrt();
        let pass = to_f64(point_estimate) <= to_f64(bound) + 3.0 * std_error;
        EstimateReport {
            estimator: estimator.into(),
            failures,
            trials,
            point_estimate,
            std_error,
            bound,
            pass,
        }
    }

    pub fn estimate_f64(&self) -> f64 {
        to_f64(self.point_estimate)
    }

    pub fn bound_f64(&self) -> f64 {
        to_f64(self.bound)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str = "config_hash,estimator,estimate,std_error,bound,pass";

    pub fn csv_row(&self, config_hash: &str) -> String {
        format!(
            "{config_hash},{},{},{},{},{}",
            self.estimator,
            self.estimate_f64(),
            self.std_error,
            self.bound_f64(),
            self.pass
        )
    }
}

/// Short stable identifier of a configuration (first 16 hex digits of the
/// SHA-256 of its JSON summary).
pub fn config_hash(cfg: &SkaConfig) -> String {
    short_digest(&serde_json::to_string(&cfg.summary()).expect("summary serializes"))
}

/// First 16 hex digits of the SHA-256 of `text`.
pub fn short_digest(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Theoretical failure ceiling: `u n / q` (strong, `n` all symbols sent)
/// or `n (d+1) / q` with `d = n (u-2)` (weak).
pub fn reliability_bound(cfg: &SkaConfig) -> Fraction {
    let q = cfg.field().modulus() as i64;
    match cfg.variant() {
        Variant::Weak => {
            let n = cfg.n1() as i64;
            let d = n * (cfg.u() as i64 - 2);
            Fraction::new(n * (d + 1), q)
        }
        _ => Fraction::new((cfg.u() * cfg.total_len()) as i64, q),
    }
}

/// Runs `trials` seeded sessions. Strong variants count `K_A != K_B`
/// (⊥ included); the weak variant counts sessions where both parties
/// output keys that differ.
pub fn estimate_reliability(cfg: &SkaConfig, strategy: &str, trials: u64, seed: u64) -> Result<EstimateReport> {
    if trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    build_strategy(strategy, 0)?;
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = trial_rng(seed, t);
            let mut adv = build_strategy(strategy, rng.next_u64())?;
            let out = run_session(cfg, adv.as_mut(), &mut RngSampler(&mut rng))?;
            let failed = match cfg.variant() {
                Variant::Weak => out.eve_wins(),
                _ => !out.agreed(),
            };
            Ok(failed as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(EstimateReport::new(
        format!("reliability/{strategy}"),
        failures,
        trials,
        reliability_bound(cfg),
    ))
}

/// LV code alone: a random message per trial, one AWTP round, and a failure
/// whenever the decoder does not return the sent message. Bound `u n / q`.
pub fn estimate_lv_reliability(lv: &LVParams, strategy: &str, trials: u64, seed: u64) -> Result<EstimateReport> {
    if trials == 0 {
        return Err(Error::Usage("trials must be at least 1".into()));
    }
    build_strategy(strategy, 0)?;
    let f = lv.field();
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let mut rng = trial_rng(seed, t);
            let mut adv = build_strategy(strategy, rng.next_u64())?;
            let mut sampler = RngSampler(&mut rng);
            let msg: Vec<Vec<u32>> = (0..lv.k())
                .map(|_| crate::sampler::FieldSampler::draw_vec(&mut sampler, f, lv.symbol_dim()))
                .collect();
            let word = lv.encode(&msg, &mut sampler)?.to_word();
            let ctx = RoundContext::new(
                1,
                Direction::Forward,
                Layout::Lv { k: lv.k() },
                f,
                lv.u(),
                lv.n(),
                lv.channel(),
            );
            let log = awtp_transmit(&word, adv.as_mut(), &ctx)?;
            Ok((lv.decode(&log.received).as_ref() != Some(&msg)) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let bound = Fraction::new((lv.u() * lv.n()) as i64, f.modulus() as i64);
    Ok(EstimateReport::new(format!("lv/{strategy}"), failures, trials, bound))
}

/// Enumeration order for [`exhaustive_secrecy_ordered`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumOrder {
    Forward,
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecrecyReport {
    /// `max_z SD(P_{K|Z=z}, U)`.
    pub max_distance: Fraction,
    pub states: u64,
    pub observations: usize,
}

/// Number of field draws one session consumes.
pub fn session_draws(cfg: &SkaConfig, strategy: &str, strategy_seed: u64) -> Result<usize> {
    let mut adv = build_strategy(strategy, strategy_seed)?;
    let mut s = ScriptedSampler::new(Vec::new());
    run_session(cfg, adv.as_mut(), &mut s)?;
    Ok(s.consumed())
}

pub fn exhaustive_secrecy(cfg: &SkaConfig, strategy: &str, strategy_seed: u64) -> Result<SecrecyReport> {
    exhaustive_secrecy_ordered(cfg, strategy, strategy_seed, EnumOrder::Forward)
}

/// Enumerates every assignment of protocol randomness and computes the
/// exact distance of Alice's key from uniform given the adversary's view.
pub fn exhaustive_secrecy_ordered(
    cfg: &SkaConfig,
    strategy: &str,
    strategy_seed: u64,
    order: EnumOrder,
) -> Result<SecrecyReport> {
    let q = cfg.field().modulus() as u64;
    let draws = session_draws(cfg, strategy, strategy_seed)?;
    let states = (0..draws).try_fold(1u64, |acc, _| acc.checked_mul(q).filter(|&s| s <= SECRECY_GUARD));
    let states = states.ok_or_else(|| {
        Error::Guard(format!(
            "randomness space q^{draws} with q = {q} exceeds 2^24 states; use smaller q, u or n1"
        ))
    })?;
    let key_space = (0..cfg.key_len())
        .try_fold(1i64, |acc, _| acc.checked_mul(q as i64))
        .ok_or_else(|| Error::Guard("key space q^l overflows".into()))?;

    let mut table: BTreeMap<Vec<Observation>, BTreeMap<Vec<u32>, i64>> = BTreeMap::new();
    let mut script = vec![0u32; draws];
    for i in 0..states {
        let idx = match order {
            EnumOrder::Forward => i,
            EnumOrder::Reverse => states - 1 - i,
        };
        let mut rest = idx;
        for slot in script.iter_mut() {
            *slot = (rest % q) as u32;
            rest /= q;
        }
        let mut adv = build_strategy(strategy, strategy_seed)?;
        let out = run_session(cfg, adv.as_mut(), &mut ScriptedSampler::new(script.clone()))?;
        let key = out.k_a.expect("strong variants always give Alice a key");
        *table.entry(out.adversary_view).or_default().entry(key).or_insert(0) += 1;
    }

    let mut max_distance = Fraction::zero();
    let uniform = Fraction::new(1, key_space);
    for keys in table.values() {
        let total: i64 = keys.values().sum();
        let seen: Fraction = keys
            .values()
            .map(|&c| (Fraction::new(c, total) - uniform).abs())
            .fold(Fraction::zero(), |a, b| a + b);
        let unseen = uniform * Fraction::from_integer(key_space - keys.len() as i64);
        let sd = (seen + unseen) / Fraction::from_integer(2);
        if sd > max_distance {
            max_distance = sd;
        }
    }
    Ok(SecrecyReport {
        max_distance,
        states,
        observations: table.len(),
    })
}

/// `l / (n_total u)`, counting every symbol sent (public ones included).
pub fn achieved_rate(cfg: &SkaConfig) -> Fraction {
    Fraction::new(cfg.key_len() as i64, (cfg.total_len() * cfg.u()) as i64)
}

/// `((u-1) / (u + 4/R)) (1 - rho)`.
pub fn closed_form_rate(u: usize, lv_rate: Fraction, rho: Fraction) -> Fraction {
    let u = Fraction::from_integer(u as i64);
    (u - Fraction::one()) / (u + Fraction::from_integer(4) / lv_rate) * (Fraction::one() - rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reliability {
    Strong,
    Weak,
}

/// Upper bound on the key rate: `1 - rho` (strong) or `1 - rho_r` (weak).
pub fn rate_bound(channel: &ChannelParams, mode: Reliability) -> Fraction {
    match mode {
        Reliability::Strong => Fraction::one() - channel.rho(),
        Reliability::Weak => Fraction::one() - channel.rho_r(),
    }
}

/// Smallest `u` with `u >= 1/xi + 4/(xi R)`.
pub fn u_for_gap(xi: Fraction, lv_rate: Fraction) -> usize {
    let need = Fraction::one() / xi + Fraction::from_integer(4) / (xi * lv_rate);
    need.ceil().to_integer() as usize
}

fn forgery_guard(q: u32) -> Result<Field> {
    if !is_prime(q) || q > FORGERY_MAX_Q {
        return Err(Error::Guard(format!(
            "forgery oracles enumerate exhaustively; need a prime q <= {FORGERY_MAX_Q}, got {q}"
        )));
    }
    Field::new(q)
}

fn all_vectors(q: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..q).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Exact maximum, over messages `x`, observed tags `t` and substitutions
/// `(x', t') != (x, t)`, of `P[tag(x') = t' | tag(x) = t]` for the one-time
/// MAC on messages of length `len`.
pub fn mac_forgery_max(q: u32, len: usize) -> Result<Fraction> {
    let f = forgery_guard(q)?;
    if len == 0 || len as u32 > q - 1 {
        return Err(Error::Parameter(format!("MAC message length must be in 1..=q-1, got {len}")));
    }
    let msgs = all_vectors(q, len);
    let keys: Vec<(u32, u32)> = (0..q).flat_map(|a| (0..q).map(move |b| (a, b))).collect();
    let tag = |m: &[u32], (a, b): (u32, u32)| f.add(universal_hash(f, m, a).unwrap(), b);
    let qs = q as usize;
    let mut best = Fraction::zero();
    for x in &msgs {
        let tx: Vec<u32> = keys.iter().map(|&k| tag(x, k)).collect();
        let mut given = vec![0i64; qs];
        for &t in &tx {
            given[t as usize] += 1;
        }
        for x2 in &msgs {
            let mut joint = vec![0i64; qs * qs];
            for (i, &k) in keys.iter().enumerate() {
                joint[tx[i] as usize * qs + tag(x2, k) as usize] += 1;
            }
            for t in 0..qs {
                for t2 in 0..qs {
                    if x2 == x && t2 == t {
                        continue;
                    }
                    let c = joint[t * qs + t2];
                    if c > 0 {
                        best = best.max(Fraction::new(c, given[t]));
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Exact maxima for the AMD code of dimension `d`: `(manipulation, accept)`.
/// `manipulation` is the largest probability over `x` and nonzero offsets
/// that the tampered word verifies and decodes to a different message;
/// `accept` is the largest probability that any nonzero offset verifies.
pub fn amd_tamper_max(q: u32, d: usize) -> Result<(Fraction, Fraction)> {
    let f = forgery_guard(q)?;
    let amd = AmdParams::new(f, d)?;
    let qi = q as i64;
    let mut manip = Fraction::zero();
    let mut accept = Fraction::zero();
    for x in all_vectors(q, d) {
        for delta in all_vectors(q, d + 2) {
            if delta.iter().all(|&v| v == 0) {
                continue;
            }
            let dx = &delta[..d];
            let x2: Vec<u32> = x.iter().zip(dx).map(|(&a, &b)| f.add(a, b)).collect();
            let hits = (0..q)
                .filter(|&r| {
                    let t = amd.tag(&x, r);
                    amd.check(&x2, f.add(r, delta[d]), f.add(t, delta[d + 1]))
                })
                .count() as i64;
            let p = Fraction::new(hits, qi);
            accept = accept.max(p);
            if dx.iter().any(|&v| v != 0) {
                manip = manip.max(p);
            }
        }
    }
    Ok((manip, accept))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForgeryReport {
    pub q: u32,
    pub mac_max: Fraction,
    pub mac_bound: Fraction,
    pub amd_max: Fraction,
    pub amd_accept_max: Fraction,
    pub amd_bound: Fraction,
}

/// MAC (message length `len`) and AMD (dimension `d`) maxima at one `q`.
pub fn forgery_oracles(q: u32, len: usize, d: usize) -> Result<ForgeryReport> {
    let mac_max = mac_forgery_max(q, len)?;
    let (amd_max, amd_accept_max) = amd_tamper_max(q, d)?;
    Ok(ForgeryReport {
        q,
        mac_max,
        mac_bound: Fraction::new(len as i64, q as i64),
        amd_max,
        amd_accept_max,
        amd_bound: Fraction::new(d as i64 + 1, q as i64),
    })
}

/// Largest fraction of hash keys with `h(x1) - h(x2) = t`, over `x1 != x2`.
pub fn hash_universality_max(q: u32, len: usize) -> Result<Fraction> {
    let f = forgery_guard(q)?;
    if len == 0 || len as u32 > q - 1 {
        return Err(Error::Parameter(format!("hash input length must be in 1..=q-1, got {len}")));
    }
    // h is linear, so h(x1) - h(x2) = h(x1 - x2); range over nonzero differences.
    let mut best = 0i64;
    for dx in all_vectors(q, len) {
        if dx.iter().all(|&v| v == 0) {
            continue;
        }
        let mut counts = vec![0i64; q as usize];
        for a in 0..q {
            counts[universal_hash(f, &dx, a)? as usize] += 1;
        }
        best = best.max(*counts.iter().max().unwrap());
    }
    Ok(Fraction::new(best, q as i64))
}

/// Enumerates every symbol-fixing source of length `1..=max_len` over
/// `F_q` and returns the largest distance of the extractor output (with
/// `m` = number of free positions) from uniform.
pub fn extractor_exactness(q: u32, max_len: usize) -> Result<Fraction> {
    let f = Field::new(q)?;
    let mut worst = Fraction::zero();
    for n in 1..=max_len {
        for mask in 1u32..(1 << n) {
            let free: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let fixed: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 0).collect();
            let m = free.len();
            if (q as usize) < n + m {
                return Err(Error::Parameter(format!("q = {q} too small for N = {n}, m = {m}")));
            }
            let outputs = (q as i64).pow(m as u32);
            for fixed_vals in all_vectors(q, fixed.len()) {
                let mut counts: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
                for free_vals in all_vectors(q, m) {
                    let mut x = vec![0u32; n];
                    for (&p, &v) in fixed.iter().zip(&fixed_vals) {
                        x[p] = v;
                    }
                    for (&p, &v) in free.iter().zip(&free_vals) {
                        x[p] = v;
                    }
                    *counts.entry(sf_extract(f, &x, m)?).or_insert(0) += 1;
                }
                let u = Fraction::new(1, outputs);
                let seen: Fraction = counts
                    .values()
                    .map(|&c| (Fraction::new(c, outputs) - u).abs())
                    .fold(Fraction::zero(), |a, b| a + b);
                let sd = (seen + u * Fraction::from_integer(outputs - counts.len() as i64)) / Fraction::from_integer(2);
                worst = worst.max(sd);
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiReport {
    pub read_set: Vec<usize>,
    pub write_set: Vec<usize>,
    /// `I(X;Y)` in bits.
    pub i_xy: f64,
    /// `I(X;Y|Z)` in bits.
    pub i_xy_given_z: f64,
    /// `(1 - rho) n log2 |Sigma|`.
    pub expected_conditional: f64,
    /// `(1 - rho_w) n log2 |Sigma|`.
    pub unconditional_bound: f64,
    pub pass: bool,
}

fn entropy_bits<K: Ord>(counts: &BTreeMap<K, u64>, total: u64) -> f64 {
    let t = total as f64;
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.log2()
        })
        .sum()
}

/// Exact `I(X;Y)` and `I(X;Y|Z)` for `n` uniform symbols over `F_q^u`
/// when the positions in `write_set` receive uniform additive errors and
/// `Z` is `X` restricted to `read_set`.
pub fn exhaustive_mi(n: usize, q: u32, u: usize, read_set: &[usize], write_set: &[usize]) -> Result<MiReport> {
    let f = Field::new(q)?;
    if read_set.iter().chain(write_set).any(|&p| p >= n) {
        return Err(Error::Parameter("set position out of range".into()));
    }
    let mut rs = read_set.to_vec();
    rs.sort_unstable();
    rs.dedup();
    let mut ws = write_set.to_vec();
    ws.sort_unstable();
    ws.dedup();
    let sym = (q as u64).checked_pow(u as u32).ok_or_else(|| Error::Guard("alphabet overflow".into()))?;
    let states = sym
        .checked_pow((n + ws.len()) as u32)
        .filter(|&s| s <= MI_GUARD)
        .ok_or_else(|| Error::Guard("joint support exceeds 2^20; use smaller n, q or u".into()))?;

    let digits = (n + ws.len()) * u;
    let mut hz = BTreeMap::new();
    let mut hxz = BTreeMap::new();
    let mut hyz = BTreeMap::new();
    let mut hxyz = BTreeMap::new();
    let mut hx = BTreeMap::new();
    let mut hy = BTreeMap::new();
    let mut hxy = BTreeMap::new();
    for idx in 0..states {
        let mut rest = idx;
        let vals: Vec<u32> = (0..digits)
            .map(|_| {
                let v = (rest % q as u64) as u32;
                rest /= q as u64;
                v
            })
            .collect();
        let x: Vec<u32> = vals[..n * u].to_vec();
        let mut y = x.clone();
        for (j, &p) in ws.iter().enumerate() {
            for c in 0..u {
                let e = vals[(n + j) * u + c];
                y[p * u + c] = f.add(y[p * u + c], e);
            }
        }
        let z: Vec<u32> = rs.iter().flat_map(|&p| x[p * u..(p + 1) * u].to_vec()).collect();
        *hz.entry(z.clone()).or_insert(0u64) += 1;
        *hxz.entry((x.clone(), z.clone())).or_insert(0u64) += 1;
        *hyz.entry((y.clone(), z.clone())).or_insert(0u64) += 1;
        *hxyz.entry((x.clone(), y.clone(), z)).or_insert(0u64) += 1;
        *hx.entry(x.clone()).or_insert(0u64) += 1;
        *hy.entry(y.clone()).or_insert(0u64) += 1;
        *hxy.entry((x, y)).or_insert(0u64) += 1;
    }
    let h = |m: &BTreeMap<_, u64>| entropy_bits(m, states);
    let i_xy = entropy_bits(&hx, states) + entropy_bits(&hy, states) - h(&hxy);
    let i_xy_given_z = entropy_bits(&hxz, states) + entropy_bits(&hyz, states)
        - entropy_bits(&hxyz, states)
        - entropy_bits(&hz, states);
    let log_sigma = (sym as f64).log2();
    let union = {
        let mut u: Vec<usize> = rs.iter().chain(&ws).copied().collect();
        u.sort_unstable();
        u.dedup();
        u.len()
    };
    let expected_conditional = (n - union) as f64 * log_sigma;
    let unconditional_bound = (n - ws.len()) as f64 * log_sigma;
    const TOL: f64 = 1e-9;
    let pass = (i_xy_given_z - expected_conditional).abs() <= TOL && i_xy <= unconditional_bound + TOL;
    Ok(MiReport {
        read_set: rs,
        write_set: ws,
        i_xy,
        i_xy_given_z,
        expected_conditional,
        unconditional_bound,
        pass,
    })
}

/// Sets from fractions: `S_r` is the first `floor(rho_r n)` positions and
/// `S_w` overlaps its tail in `floor(rho_0 n)` positions.
pub fn exhaustive_mi_check(n: usize, q: u32, u: usize, channel: &ChannelParams) -> Result<MiReport> {
    let b = channel.budget(n);
    let (r, w, o) = b.plan(b.reads, b.writes, b.overlap);
    let read: Vec<usize> = (0..r).collect();
    let write: Vec<usize> = (r - o..r - o + w).collect();
    exhaustive_mi(n, q, u, &read, &write)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_fraction;

    fn fr(s: &str) -> Fraction {
        parse_fraction(s).unwrap()
    }

    fn chan(r: &str, w: &str, rho: &str) -> ChannelParams {
        ChannelParams::new(fr(r), fr(w), fr(rho)).unwrap()
    }

    #[test]
    fn report_predicate() {
        let r = EstimateReport::new("x", 0, 100, Fraction::new(1, 100));
        assert!(r.pass);
        assert_eq!(r.point_estimate, Fraction::zero());
        let r = EstimateReport::new("x", 50, 100, Fraction::new(1, 100));
        assert!(!r.pass);
        let json = r.to_json();
        let back: EstimateReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(r.csv_row("abc").starts_with("abc,x,0.5,"));
    }

    #[test]
    fn passive_never_fails() {
        let cfg = SkaConfig::with_max_key(Field::new(65521).unwrap(), 8, 8, Variant::Awtp, chan("0.3", "0.2", "0.5")).unwrap();
        let r = estimate_reliability(&cfg, "passive", 50, 1).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.pass);
        assert!(estimate_reliability(&cfg, "nobody", 5, 1).is_err());
        assert!(estimate_reliability(&cfg, "passive", 0, 1).is_err());
    }

    #[test]
    fn estimates_are_seed_deterministic() {
        let cfg = SkaConfig::with_max_key(Field::new(101).unwrap(), 4, 4, Variant::Awtp, chan("0.3", "0.2", "0.5")).unwrap();
        let a = estimate_reliability(&cfg, "random_additive", 200, 9).unwrap();
        let b = estimate_reliability(&cfg, "random_additive", 200, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bound_values() {
        let cfg = SkaConfig::with_max_key(Field::new(65521).unwrap(), 8, 64, Variant::Awtp, chan("0.3", "0.2", "0.5")).unwrap();
        assert_eq!(reliability_bound(&cfg), Fraction::new(960, 65521));
        let weak = SkaConfig::with_max_key(Field::new(65521).unwrap(), 8, 64, Variant::Weak, chan("0.5", "0.5", "0.5")).unwrap();
        assert_eq!(reliability_bound(&weak), Fraction::new(64 * 385, 65521));
    }

    #[test]
    fn tiny_secrecy() {
        let f = Field::new(3).unwrap();
        let cfg = SkaConfig::new(f, 2, 2, Variant::AwtpPd, chan("0.5", "0", "0.5"), 1).unwrap();
        let fwd = exhaustive_secrecy(&cfg, "tail_reader", 0).unwrap();
        assert_eq!(fwd.max_distance, Fraction::zero());
        assert_eq!(fwd.states, 729);
        let rev = exhaustive_secrecy_ordered(&cfg, "tail_reader", 0, EnumOrder::Reverse).unwrap();
        assert_eq!(rev, fwd);

        let blind = SkaConfig::new(f, 2, 2, Variant::AwtpPd, ChannelParams::noiseless(), 1).unwrap();
        assert_eq!(exhaustive_secrecy(&blind, "passive", 0).unwrap().max_distance, Fraction::zero());

        let f5 = Field::new(5).unwrap();
        let over = SkaConfig::unchecked_key_len(f5, 2, 2, Variant::AwtpPd, chan("0.5", "0", "0.5"), 2).unwrap();
        assert!(exhaustive_secrecy(&over, "tail_reader", 0).unwrap().max_distance > Fraction::zero());
    }

    #[test]
    fn secrecy_guard() {
        let cfg = SkaConfig::with_max_key(Field::new(65521).unwrap(), 8, 8, Variant::AwtpPd, chan("0.3", "0.2", "0.5")).unwrap();
        assert!(matches!(exhaustive_secrecy(&cfg, "passive", 0), Err(Error::Guard(_))));
    }

    #[test]
    fn rates() {
        assert_eq!(closed_form_rate(8, fr("0.8"), fr("0.5")), Fraction::new(7, 26));
        // large u, rho = 0 approaches 1
        let r = closed_form_rate(100_000, Fraction::one(), Fraction::zero());
        assert!(Fraction::one() - r < Fraction::new(1, 10_000));
        assert_eq!(rate_bound(&chan("0.2", "0.1", "0.3"), Reliability::Strong), fr("0.7"));
        assert_eq!(rate_bound(&chan("0", "0.1", "0.1"), Reliability::Weak), Fraction::one());
        assert_eq!(rate_bound(&chan("1", "0", "1"), Reliability::Strong), Fraction::zero());
        assert_eq!(u_for_gap(fr("0.1"), fr("0.75")), 64);
        let cfg = SkaConfig::with_max_key(Field::new(65521).unwrap(), 8, 64, Variant::Awtp, chan("0.3", "0.2", "0.5")).unwrap();
        assert_eq!(achieved_rate(&cfg), Fraction::new(224, 120 * 8));
    }

    #[test]
    fn forgery_small() {
        let r = forgery_oracles(7, 2, 1).unwrap();
        assert!(r.mac_max <= Fraction::new(2, 7));
        assert!(r.amd_max <= Fraction::new(2, 7));
        assert!(r.amd_accept_max <= Fraction::new(2, 7));
        assert!(forgery_oracles(37, 2, 1).is_err());
        assert!(hash_universality_max(7, 2).unwrap() <= Fraction::new(2, 7));
    }

    #[test]
    fn zero_offset_is_not_a_tamper() {
        // With only the zero offset excluded, the max over the remaining
        // offsets is still within the bound, and the zero offset itself is
        // never counted.
        let (m, a) = amd_tamper_max(5, 1).unwrap();
        assert!(m <= a);
        assert!(a <= Fraction::new(2, 5));
    }

    #[test]
    fn extractor_small() {
        assert_eq!(extractor_exactness(7, 3).unwrap(), Fraction::zero());
    }

    #[test]
    fn mi_examples() {
        let r = exhaustive_mi(2, 2, 1, &[0], &[1]).unwrap();
        assert!(r.pass);
        assert!(r.i_xy_given_z.abs() < 1e-9);
        let r = exhaustive_mi_check(2, 3, 1, &ChannelParams::noiseless()).unwrap();
        assert!((r.i_xy - 2.0 * 3f64.log2()).abs() < 1e-9);
        assert!((r.i_xy_given_z - 2.0 * 3f64.log2()).abs() < 1e-9);
        let r = exhaustive_mi_check(2, 3, 1, &chan("0.5", "0.5", "0.5")).unwrap();
        assert_eq!((r.read_set.clone(), r.write_set.clone()), (vec![0], vec![0]));
        assert!((r.i_xy_given_z - 3f64.log2()).abs() < 1e-9);
        assert!(r.pass);
        assert!(exhaustive_mi(8, 7, 2, &[], &[]).is_err());
    }
}
