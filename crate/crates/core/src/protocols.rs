//! Key agreement protocols and the session engine.
//!
//! Three variants share one configuration type:
//!
//! * [`Variant::Awtp`]: three rounds over the AWTP channel. Alice sends
//!   random `(r_i, beta_i)`, Bob answers with MAC keys and tags inside an LV
//!   codeword, Alice returns the accept vector `v` in a second LV codeword,
//!   and both extract the key from the accepted `r_i`.
//! * [`Variant::AwtpPd`]: the same, with rounds two and three sent in the
//!   clear over the public-discussion channel.
//! * [`Variant::Weak`]: one AWTP round of AMD-tagged random symbols; Bob
//!   outputs ⊥ when any tag fails.
//!
//! Randomness is drawn from one [`FieldSampler`] in this order:
//! round 1 `r_1, beta_1, r_2, beta_2, ...` (each `r_i` coordinate by
//! coordinate); round 2 `alpha_1..alpha_{n1}` then the LV tag randomness of
//! every component; round 3 the LV tag randomness. The weak variant draws
//! all of `s` (flattened) and then `r_1..r_n`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::channel::{
    awtp_transmit, pd_transmit, AdversaryStrategy, ChannelParams, Direction, Layout, RoundContext,
    RoundLog,
};
use crate::error::{config, Error, Result};
use crate::gf::Field;
use crate::lvcode::LVParams;
use crate::primitives::{sf_extract, universal_hash, AmdParams};
use crate::rational::{ceil_div, display, floor_mul, Fraction};
use crate::sampler::FieldSampler;
use crate::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Awtp,
    AwtpPd,
    Weak,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "awtp" => Ok(Variant::Awtp),
            "awtp_pd" | "pd" => Ok(Variant::AwtpPd),
            "weak" | "weak_one_round" => Ok(Variant::Weak),
            other => Err(Error::Usage(format!(
                "unknown variant `{other}` (expected awtp, awtp_pd or weak)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Awtp => "awtp",
            Variant::AwtpPd => "awtp_pd",
            Variant::Weak => "weak",
        }
    }

    pub fn is_strong(self) -> bool {
        !matches!(self, Variant::Weak)
    }
}

/// Protocol configuration. `n1` is the first-round length for the strong
/// variants and the whole codeword length for the weak one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkaConfig {
    field: Field,
    u: usize,
    n1: usize,
    variant: Variant,
    channel: ChannelParams,
    key_len: usize,
}

impl SkaConfig {
    /// Fully validated configuration, including the secrecy bound on `key_len`.
    pub fn new(
        field: Field,
        u: usize,
        n1: usize,
        variant: Variant,
        channel: ChannelParams,
        key_len: usize,
    ) -> Result<Self> {
        let cfg = Self::unchecked_key_len(field, u, n1, variant, channel, key_len)?;
        cfg.check_key_bound()?;
        Ok(cfg)
    }

    /// Configuration with the largest key length the variant allows.
    pub fn with_max_key(field: Field, u: usize, n1: usize, variant: Variant, channel: ChannelParams) -> Result<Self> {
        Self::new(field, u, n1, variant, channel, max_key_len(variant, u, n1, &channel))
    }

    /// Skips only the secrecy bound on `key_len`; every feasibility
    /// condition is still enforced. Used for negative controls.
    pub fn unchecked_key_len(
        field: Field,
        u: usize,
        n1: usize,
        variant: Variant,
        channel: ChannelParams,
        key_len: usize,
    ) -> Result<Self> {
        let cfg = SkaConfig {
            field,
            u,
            n1,
            variant,
            channel,
            key_len,
        };
        cfg.check_feasible()?;
        Ok(cfg)
    }

    fn check_feasible(&self) -> Result<()> {
        let q = self.field.modulus() as u64;
        if self.n1 == 0 {
            return Err(config("codeword length n1 must be positive"));
        }
        if self.key_len == 0 {
            return Err(config("key length must be positive"));
        }
        let min_u = if self.variant == Variant::AwtpPd { 2 } else { 3 };
        if self.u < min_u {
            return Err(config(format!(
                "variant {} needs u >= {min_u}, got {}",
                self.variant.as_str(),
                self.u
            )));
        }
        if self.variant.is_strong() && (self.u - 1) as u64 > q - 1 {
            return Err(config("MAC input length u-1 exceeds q-1"));
        }
        let n_src = self.source_len();
        if q < (n_src + self.key_len) as u64 {
            return Err(config(format!(
                "extractor needs q >= N + l (q = {q}, N = {n_src}, l = {})",
                self.key_len
            )));
        }
        match self.variant {
            Variant::Awtp => {
                let r = self.channel.lv_rate();
                if r <= Fraction::zero() {
                    return Err(config(format!(
                        "AWTP variant needs rho_r + 2 rho_w < 1 + rho (got {} + 2*{} >= 1 + {})",
                        display(self.channel.rho_r()),
                        display(self.channel.rho_w()),
                        display(self.channel.rho())
                    )));
                }
                self.lv_params()?;
            }
            Variant::Weak => {
                AmdParams::new(self.field, self.n1 * (self.u - 2))
                    .map_err(|e| config(e.to_string()))?;
            }
            Variant::AwtpPd => {}
        }
        Ok(())
    }

    fn check_key_bound(&self) -> Result<()> {
        let max = max_key_len(self.variant, self.u, self.n1, &self.channel);
        if self.key_len > max {
            let formula = if self.variant.is_strong() {
                "l <= (u-1)(1-rho) n1"
            } else {
                "l <= (u-2)(1-rho_r) n"
            };
            return Err(config(format!(
                "key length {} violates {formula} = {max}",
                self.key_len
            )));
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn u(&self) -> usize {
        self.u
    }
    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }
    pub fn key_len(&self) -> usize {
        self.key_len
    }

    /// Extractor input length `N`.
    pub fn source_len(&self) -> usize {
        match self.variant {
            Variant::Weak => self.n1 * self.u.saturating_sub(2),
            _ => self.n1 * (self.u - 1),
        }
    }

    /// LV message length `k = ceil(2 n1 / (u-2))` for rounds two and three.
    pub fn lv_k(&self) -> usize {
        ceil_div(2 * self.n1, self.u - 2)
    }

    pub fn lv_params(&self) -> Result<LVParams> {
        LVParams::for_message(self.field, self.u, self.lv_k(), self.channel).map_err(|e| config(e.to_string()))
    }

    /// Symbols sent in each round.
    pub fn round_lengths(&self) -> Vec<usize> {
        match self.variant {
            Variant::Awtp => {
                let n2 = self.lv_params().map(|p| p.n()).unwrap_or(0);
                vec![self.n1, n2, n2]
            }
            Variant::AwtpPd => vec![self.n1, ceil_div(2 * self.n1, self.u), ceil_div(self.n1, self.u)],
            Variant::Weak => vec![self.n1],
        }
    }

    pub fn total_len(&self) -> usize {
        self.round_lengths().iter().sum()
    }

    pub fn summary(&self) -> ConfigSummary {
        ConfigSummary {
            variant: self.variant,
            q: self.field.modulus(),
            u: self.u,
            n1: self.n1,
            rho_r: display(self.channel.rho_r()),
            rho_w: display(self.channel.rho_w()),
            rho: display(self.channel.rho()),
            key_len: self.key_len,
            round_lengths: self.round_lengths(),
        }
    }
}

/// Largest key allowed: `floor((u-1)(1-rho) n1)` for the strong variants,
/// `floor((u-2)(1-rho_r) n)` for the weak one.
pub fn max_key_len(variant: Variant, u: usize, n1: usize, channel: &ChannelParams) -> usize {
    let one = Fraction::from_integer(1);
    match variant {
        Variant::Weak => floor_mul(one - channel.rho_r(), n1 * u.saturating_sub(2)),
        _ => floor_mul(one - channel.rho(), n1 * u.saturating_sub(1)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub variant: Variant,
    pub q: u32,
    pub u: usize,
    pub n1: usize,
    pub rho_r: String,
    pub rho_w: String,
    pub rho: String,
    pub key_len: usize,
    pub round_lengths: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AliceState {
    pub r: Vec<Vec<u32>>,
    pub beta: Vec<u32>,
    /// Accept vector, set in round three.
    pub v: Option<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BobState {
    pub r_prime: Vec<Vec<u32>>,
    pub beta_prime: Vec<u32>,
    pub alpha: Vec<u32>,
    pub tags: Vec<u32>,
}

/// Lays `elems` into `k` symbols of `d` coordinates, coordinate-major:
/// element `e` goes to symbol `e % k`, coordinate `e / k`. Zero padded.
pub fn pack_coordinate_major(elems: &[u32], k: usize, d: usize) -> Result<Vec<Vec<u32>>> {
    if elems.len() > k * d {
        return Err(config(format!("{} elements do not fit {k} x {d}", elems.len())));
    }
    let mut out = vec![vec![0u32; d]; k];
    for (e, &v) in elems.iter().enumerate() {
        out[e % k][e / k] = v;
    }
    Ok(out)
}

pub fn unpack_coordinate_major(symbols: &[Vec<u32>], count: usize) -> Vec<u32> {
    let k = symbols.len();
    (0..count)
        .map(|e| symbols.get(e % k).and_then(|s| s.get(e / k)).copied().unwrap_or(0))
        .collect()
}

/// Raw PD layout: consecutive elements fill `u`-element symbols.
fn pack_raw(elems: &[u32], u: usize) -> Vec<Symbol> {
    elems
        .chunks(u)
        .map(|c| {
            let mut s = c.to_vec();
            s.resize(u, 0);
            s
        })
        .collect()
}

fn unpack_raw(word: &[Symbol], count: usize) -> Vec<u32> {
    word.iter().flatten().copied().chain(std::iter::repeat(0)).take(count).collect()
}

pub fn r1_alice(cfg: &SkaConfig, sampler: &mut impl FieldSampler) -> (Vec<Symbol>, AliceState) {
    let f = cfg.field;
    let mut r = Vec::with_capacity(cfg.n1);
    let mut beta = Vec::with_capacity(cfg.n1);
    let mut word = Vec::with_capacity(cfg.n1);
    for _ in 0..cfg.n1 {
        let ri = sampler.draw_vec(f, cfg.u - 1);
        let bi = sampler.draw(f);
        let mut sym = ri.clone();
        sym.push(bi);
        word.push(sym);
        r.push(ri);
        beta.push(bi);
    }
    (word, AliceState { r, beta, v: None })
}

fn mac(cfg: &SkaConfig, r: &[u32], alpha: u32, beta: u32) -> u32 {
    let h = universal_hash(cfg.field, r, alpha).expect("u-1 <= q-1 checked at configuration");
    cfg.field.add(h, beta)
}

pub fn r2_bob(cfg: &SkaConfig, x1: &[Symbol], sampler: &mut impl FieldSampler) -> Result<(Vec<Symbol>, BobState)> {
    if x1.len() != cfg.n1 || x1.iter().any(|s| s.len() != cfg.u) {
        return Err(Error::Usage("round-1 word has the wrong shape".into()));
    }
    let f = cfg.field;
    let r_prime: Vec<Vec<u32>> = x1.iter().map(|s| s[..cfg.u - 1].to_vec()).collect();
    let beta_prime: Vec<u32> = x1.iter().map(|s| s[cfg.u - 1]).collect();
    let alpha = sampler.draw_vec(f, cfg.n1);
    let tags: Vec<u32> = (0..cfg.n1)
        .map(|i| mac(cfg, &r_prime[i], alpha[i], beta_prime[i]))
        .collect();
    let payload: Vec<u32> = alpha.iter().chain(&tags).copied().collect();
    let word = match cfg.variant {
        Variant::Awtp => {
            let lv = cfg.lv_params()?;
            let msg = pack_coordinate_major(&payload, lv.k(), lv.symbol_dim())?;
            lv.encode(&msg, sampler)?.to_word()
        }
        Variant::AwtpPd => pack_raw(&payload, cfg.u),
        Variant::Weak => return Err(Error::Usage("r2_bob is not part of the weak variant".into())),
    };
    Ok((
        word,
        BobState {
            r_prime,
            beta_prime,
            alpha,
            tags,
        },
    ))
}

/// Decodes a round-2/3 payload of `count` elements; `None` is ⊥.
fn receive_payload(cfg: &SkaConfig, word: &[Symbol], count: usize) -> Result<Option<Vec<u32>>> {
    Ok(match cfg.variant {
        Variant::Awtp => {
            let lv = cfg.lv_params()?;
            lv.decode(word).map(|m| unpack_coordinate_major(&m, count))
        }
        _ => Some(unpack_raw(word, count)),
    })
}

pub fn r3_alice(
    cfg: &SkaConfig,
    mut alice: AliceState,
    y2: &[Symbol],
    sampler: &mut impl FieldSampler,
) -> Result<(Vec<Symbol>, AliceState)> {
    let n1 = cfg.n1;
    let v: Vec<bool> = match receive_payload(cfg, y2, 2 * n1)? {
        Some(p) => {
            let (alpha, tags) = p.split_at(n1);
            (0..n1)
                .map(|i| tags[i] == mac(cfg, &alice.r[i], alpha[i], alice.beta[i]))
                .collect()
        }
        None => vec![false; n1],
    };
    let bits: Vec<u32> = v.iter().map(|&b| b as u32).collect();
    let word = match cfg.variant {
        Variant::Awtp => {
            let lv = cfg.lv_params()?;
            let msg = pack_coordinate_major(&bits, lv.k(), lv.symbol_dim())?;
            lv.encode(&msg, sampler)?.to_word()
        }
        _ => pack_raw(&bits, cfg.u),
    };
    alice.v = Some(v);
    Ok((word, alice))
}

fn masked_source(cfg: &SkaConfig, r: &[Vec<u32>], v: &[bool]) -> Vec<u32> {
    r.iter()
        .zip(v)
        .flat_map(|(ri, &keep)| {
            if keep {
                ri.clone()
            } else {
                vec![0; cfg.u - 1]
            }
        })
        .collect()
}

/// Key derivation for both parties. `k_B` is ⊥ when Bob cannot decode `x3`.
pub fn derive_keys(
    cfg: &SkaConfig,
    alice: &AliceState,
    bob: &BobState,
    x3: &[Symbol],
) -> Result<(Option<Vec<u32>>, Option<Vec<u32>>)> {
    let v_a = alice
        .v
        .as_ref()
        .ok_or_else(|| Error::Usage("Alice has not run round three".into()))?;
    let k_a = sf_extract(cfg.field, &masked_source(cfg, &alice.r, v_a), cfg.key_len)?;
    let k_b = match receive_payload(cfg, x3, cfg.n1)? {
        Some(bits) => {
            let v_b: Vec<bool> = bits.iter().map(|&b| b == 1).collect();
            Some(sf_extract(cfg.field, &masked_source(cfg, &bob.r_prime, &v_b), cfg.key_len)?)
        }
        None => None,
    };
    Ok((Some(k_a), k_b))
}

fn weak_amd(cfg: &SkaConfig) -> Result<AmdParams> {
    AmdParams::new(cfg.field, cfg.n1 * (cfg.u - 2))
}

pub fn weak_send(cfg: &SkaConfig, sampler: &mut impl FieldSampler) -> Result<(Vec<Symbol>, Vec<u32>)> {
    if cfg.variant != Variant::Weak {
        return Err(Error::Usage("weak_send needs the weak variant".into()));
    }
    let f = cfg.field;
    let d = cfg.u - 2;
    let amd = weak_amd(cfg)?;
    let s = sampler.draw_vec(f, cfg.n1 * d);
    let r = sampler.draw_vec(f, cfg.n1);
    let word = (0..cfg.n1)
        .map(|i| {
            let mut sym = s[i * d..(i + 1) * d].to_vec();
            sym.push(r[i]);
            sym.push(amd.tag(&s, r[i]));
            sym
        })
        .collect();
    let k_a = sf_extract(f, &s, cfg.key_len)?;
    Ok((word, k_a))
}

/// Accepts iff every component's tag verifies over the whole received `s'`.
pub fn weak_receive(cfg: &SkaConfig, x: &[Symbol]) -> Result<Option<Vec<u32>>> {
    if x.len() != cfg.n1 || x.iter().any(|s| s.len() != cfg.u) {
        return Ok(None);
    }
    let d = cfg.u - 2;
    let amd = weak_amd(cfg)?;
    let s: Vec<u32> = x.iter().flat_map(|c| c[..d].iter().copied()).collect();
    if x.iter().all(|c| amd.tag(&s, c[d]) == c[d + 1]) {
        Ok(Some(sf_extract(cfg.field, &s, cfg.key_len)?))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Observation {
    pub round: usize,
    pub position: usize,
    pub symbol: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionOutcome {
    pub k_a: Option<Vec<u32>>,
    pub k_b: Option<Vec<u32>>,
    pub transcript: Vec<RoundLog>,
    pub adversary_view: Vec<Observation>,
    /// Components Alice accepted (strong variants) or `n` (weak).
    pub accepted: usize,
    /// Fewer accepted components than `l / (u-1)`: the key source has too
    /// little entropy for the secrecy argument to apply.
    pub secrecy_void: bool,
}

impl SessionOutcome {
    pub fn agreed(&self) -> bool {
        matches!((&self.k_a, &self.k_b), (Some(a), Some(b)) if a == b)
    }

    /// Weak-reliability failure: both output keys and they differ.
    pub fn eve_wins(&self) -> bool {
        matches!((&self.k_a, &self.k_b), (Some(a), Some(b)) if a != b)
    }
}

fn collect_view(logs: &[RoundLog]) -> Vec<Observation> {
    logs.iter()
        .flat_map(|l| {
            l.observation.iter().map(move |(p, s)| Observation {
                round: l.round,
                position: *p,
                symbol: s.clone(),
            })
        })
        .collect()
}

/// Runs one full session of the configured variant.
pub fn run_session(
    cfg: &SkaConfig,
    strategy: &mut dyn AdversaryStrategy,
    sampler: &mut impl FieldSampler,
) -> Result<SessionOutcome> {
    let f = cfg.field;
    let ch = cfg.channel;
    let lens = cfg.round_lengths();
    let mut logs = Vec::with_capacity(3);

    if cfg.variant == Variant::Weak {
        let (c, k_a) = weak_send(cfg, sampler)?;
        let ctx = RoundContext::new(1, Direction::Forward, Layout::WeakAmd, f, cfg.u, lens[0], &ch);
        let log = awtp_transmit(&c, strategy, &ctx)?;
        let k_b = weak_receive(cfg, &log.received)?;
        logs.push(log);
        return Ok(SessionOutcome {
            k_a: Some(k_a),
            k_b,
            adversary_view: collect_view(&logs),
            transcript: logs,
            accepted: cfg.n1,
            secrecy_void: false,
        });
    }

    let lv_layout = match cfg.variant {
        Variant::Awtp => Layout::Lv { k: cfg.lv_k() },
        _ => Layout::Opaque,
    };
    let send = |round: usize,
                dir: Direction,
                word: &[Symbol],
                strategy: &mut dyn AdversaryStrategy,
                layout: Layout|
     -> Result<RoundLog> {
        let ctx = RoundContext::new(round, dir, layout, f, cfg.u, word.len(), &ch);
        if cfg.variant == Variant::AwtpPd && round > 1 {
            let log = pd_transmit(word, round, dir);
            strategy.observe_public(&ctx, word);
            Ok(log)
        } else {
            awtp_transmit(word, strategy, &ctx)
        }
    };

    let (c1, alice) = r1_alice(cfg, sampler);
    let log1 = send(1, Direction::Forward, &c1, strategy, Layout::MacPairs)?;
    let (d2, bob) = r2_bob(cfg, &log1.received, sampler)?;
    logs.push(log1);
    let log2 = send(2, Direction::Backward, &d2, strategy, lv_layout)?;
    let (c3, alice) = r3_alice(cfg, alice, &log2.received, sampler)?;
    logs.push(log2);
    let log3 = send(3, Direction::Forward, &c3, strategy, lv_layout)?;
    let (k_a, k_b) = derive_keys(cfg, &alice, &bob, &log3.received)?;
    logs.push(log3);

    let accepted = alice.v.as_ref().map_or(0, |v| v.iter().filter(|&&b| b).count());
    Ok(SessionOutcome {
        k_a,
        k_b,
        adversary_view: collect_view(&logs),
        transcript: logs,
        accepted,
        secrecy_void: accepted * (cfg.u - 1) < cfg.key_len,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub k_a: Option<Vec<u32>>,
    pub k_b: Option<Vec<u32>>,
    pub agreed: bool,
    pub accepted: usize,
    pub secrecy_void: bool,
}

/// JSON transcript: `config`, `rounds`, `outcome` (⊥ keys are `null`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub config: ConfigSummary,
    pub strategy: String,
    pub seed: Option<u64>,
    pub rounds: Vec<RoundLog>,
    pub outcome: OutcomeRecord,
}

impl SessionTranscript {
    pub fn new(cfg: &SkaConfig, strategy: &str, seed: Option<u64>, outcome: &SessionOutcome) -> Self {
        SessionTranscript {
            config: cfg.summary(),
            strategy: strategy.to_string(),
            seed,
            rounds: outcome.transcript.clone(),
            outcome: OutcomeRecord {
                k_a: outcome.k_a.clone(),
                k_b: outcome.k_b.clone(),
                agreed: outcome.agreed(),
                accepted: outcome.accepted,
                secrecy_void: outcome.secrecy_void,
            },
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::build_strategy;
    use crate::primitives::mac_tag;
    use crate::primitives::MacKey;
    use crate::rational::parse_fraction;
    use crate::sampler::{RngSampler, ScriptedSampler};
    use rand::SeedableRng;

    fn chan(r: &str, w: &str, rho: &str) -> ChannelParams {
        ChannelParams::new(
            parse_fraction(r).unwrap(),
            parse_fraction(w).unwrap(),
            parse_fraction(rho).unwrap(),
        )
        .unwrap()
    }

    fn sampler(seed: u64) -> RngSampler<rand_chacha::ChaCha8Rng> {
        RngSampler(rand_chacha::ChaCha8Rng::seed_from_u64(seed))
    }

    fn strong(q: u32, u: usize, n1: usize, variant: Variant) -> SkaConfig {
        SkaConfig::with_max_key(Field::new(q).unwrap(), u, n1, variant, chan("0.3", "0.2", "0.5")).unwrap()
    }

    #[test]
    fn round_one_layout_and_determinism() {
        let cfg = strong(65521, 8, 16, Variant::Awtp);
        let (c1, st) = r1_alice(&cfg, &mut sampler(1));
        assert_eq!(c1.len(), 16);
        assert!(c1.iter().all(|s| s.len() == 8));
        assert_eq!(st.r[3], c1[3][..7].to_vec());
        assert_eq!(st.beta[3], c1[3][7]);
        let (again, _) = r1_alice(&cfg, &mut sampler(1));
        assert_eq!(c1, again);
    }

    #[test]
    fn round_one_marginal_is_uniform() {
        // chi-square on one coordinate, q = 11, 10^5 draws, 10 dof.
        let cfg = SkaConfig::with_max_key(Field::new(11).unwrap(), 3, 1, Variant::AwtpPd, ChannelParams::noiseless()).unwrap();
        let mut s = sampler(5);
        let mut counts = [0u64; 11];
        let trials = 100_000;
        for _ in 0..trials {
            let (c1, _) = r1_alice(&cfg, &mut s);
            counts[c1[0][1] as usize] += 1;
        }
        let expected = trials as f64 / 11.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99.9% quantile of chi2(10) is 29.59
        assert!(chi2 < 29.59, "chi2 = {chi2}");
    }

    #[test]
    fn round_two_tags_match_mac() {
        let cfg = strong(65521, 8, 16, Variant::Awtp);
        let (c1, alice) = r1_alice(&cfg, &mut sampler(2));
        let (_, bob) = r2_bob(&cfg, &c1, &mut sampler(3)).unwrap();
        for i in 0..16 {
            let key = MacKey {
                alpha: bob.alpha[i],
                beta: alice.beta[i],
            };
            assert_eq!(bob.tags[i], mac_tag(cfg.field(), &alice.r[i], key).unwrap());
        }
    }

    #[test]
    fn round_two_hand_example() {
        // q = 7, r' = (1,1,1), alpha = 2, beta' = 3 -> t = 3
        let cfg = SkaConfig::with_max_key(Field::new(7).unwrap(), 4, 1, Variant::AwtpPd, ChannelParams::noiseless()).unwrap();
        let (_, bob) = r2_bob(&cfg, &[vec![1, 1, 1, 3]], &mut ScriptedSampler::new(vec![2])).unwrap();
        assert_eq!(bob.tags, vec![3]);
    }

    #[test]
    fn packing() {
        assert_eq!(ceil_div(2 * 2, 4 - 2), 2);
        let p = pack_coordinate_major(&[1, 2, 3, 4, 5], 3, 2).unwrap();
        assert_eq!(p, vec![vec![1, 4], vec![2, 5], vec![3, 0]]);
        assert_eq!(unpack_coordinate_major(&p, 5), vec![1, 2, 3, 4, 5]);
        assert!(pack_coordinate_major(&[1; 7], 3, 2).is_err());
        let cfg = strong(65521, 4, 2, Variant::Awtp);
        assert_eq!(cfg.lv_k(), 2);
        let cfg = strong(65521, 8, 64, Variant::Awtp);
        assert_eq!(cfg.lv_k(), 22);
        assert_eq!(cfg.round_lengths(), vec![64, 28, 28]);
        assert_eq!(cfg.key_len(), 224);
    }

    #[test]
    fn altered_r_rejected_unless_collision() {
        // Brute force over alpha at q = 7, u = 4: for an altered r' with
        // beta' = beta, v = 1 iff hash(r - r', alpha) = 0, which holds for
        // at most u-1 = 3 of the 7 alphas.
        let f = Field::new(7).unwrap();
        let cfg = SkaConfig::with_max_key(f, 4, 1, Variant::AwtpPd, ChannelParams::noiseless()).unwrap();
        let r = vec![3, 1, 4];
        let beta = 5;
        for delta in [[1, 0, 0], [0, 2, 0], [1, 1, 1], [6, 0, 1]] {
            let r_alt: Vec<u32> = r.iter().zip(delta).map(|(&a, d)| f.add(a, d)).collect();
            let mut accepted = 0;
            for alpha in 0..7 {
                let t = mac(&cfg, &r_alt, alpha, beta);
                if t == mac(&cfg, &r, alpha, beta) {
                    accepted += 1;
                }
            }
            assert!(accepted <= 3, "{delta:?}: {accepted}");
        }
    }

    #[test]
    fn honest_runs_accept_everything() {
        for variant in [Variant::Awtp, Variant::AwtpPd] {
            let cfg = strong(65521, 8, 16, variant);
            let mut passive = build_strategy("passive", 0).unwrap();
            let out = run_session(&cfg, passive.as_mut(), &mut sampler(4)).unwrap();
            assert!(out.agreed());
            assert_eq!(out.accepted, 16);
            assert!(!out.secrecy_void);
            assert_eq!(out.k_a.as_ref().unwrap().len(), cfg.key_len());
        }
    }

    #[test]
    fn pd_rounds_are_public() {
        let cfg = strong(65521, 8, 16, Variant::AwtpPd);
        let mut s = build_strategy("random_additive", 1).unwrap();
        let out = run_session(&cfg, s.as_mut(), &mut sampler(5)).unwrap();
        for log in &out.transcript[1..] {
            assert!(log.write_set.is_empty());
            assert_eq!(log.observation.len(), log.sent.len());
            assert_eq!(log.sent, log.received);
        }
    }

    #[test]
    fn all_rejected_gives_fixed_key() {
        let cfg = strong(65521, 8, 4, Variant::AwtpPd);
        let (_, mut alice) = r1_alice(&cfg, &mut sampler(6));
        alice.v = Some(vec![false; 4]);
        let k = sf_extract(cfg.field(), &masked_source(&cfg, &alice.r, alice.v.as_ref().unwrap()), cfg.key_len()).unwrap();
        assert!(k.iter().all(|&x| x == 0));
    }

    #[test]
    fn key_derivation_hand_example() {
        let f = Field::new(11).unwrap();
        let cfg = SkaConfig::new(f, 2, 2, Variant::AwtpPd, ChannelParams::noiseless(), 1).unwrap();
        let alice = AliceState {
            r: vec![vec![1], vec![2]],
            beta: vec![0, 0],
            v: Some(vec![true, true]),
        };
        let bob = BobState {
            r_prime: vec![vec![1], vec![2]],
            beta_prime: vec![0, 0],
            alpha: vec![0, 0],
            tags: vec![0, 0],
        };
        let x3 = pack_raw(&[1, 1], 2);
        let (ka, kb) = derive_keys(&cfg, &alice, &bob, &x3).unwrap();
        assert_eq!(ka, Some(vec![3]));
        assert_eq!(kb, Some(vec![3]));
    }

    #[test]
    fn weak_examples() {
        let f = Field::new(7).unwrap();
        let cfg = SkaConfig::new(f, 3, 1, Variant::Weak, ChannelParams::noiseless(), 1).unwrap();
        let (c, ka) = weak_send(&cfg, &mut ScriptedSampler::new(vec![2, 1])).unwrap();
        assert_eq!(c, vec![vec![2, 1, 3]]);
        assert_eq!(ka.len(), 1);
        let (c, _) = weak_send(&cfg, &mut ScriptedSampler::new(vec![0, 0])).unwrap();
        assert_eq!(c[0][2], 0);

        let cfg = SkaConfig::with_max_key(Field::new(65521).unwrap(), 8, 16, Variant::Weak, chan("0.5", "0.5", "0.5")).unwrap();
        assert_eq!(cfg.key_len(), 48);
        let (c, ka) = weak_send(&cfg, &mut sampler(7)).unwrap();
        assert_eq!(weak_receive(&cfg, &c).unwrap(), Some(ka));
        let mut t = c.clone();
        t[3][7] = cfg.field().add(t[3][7], 1);
        assert_eq!(weak_receive(&cfg, &t).unwrap(), None);
    }

    #[test]
    fn config_validation() {
        let f = Field::new(65521).unwrap();
        let bad = SkaConfig::with_max_key(f, 8, 16, Variant::Awtp, chan("0.5", "0.5", "0.5"));
        assert!(matches!(bad, Err(Error::Config(m)) if m.contains("rho_r + 2 rho_w < 1 + rho")));
        assert!(SkaConfig::with_max_key(f, 8, 16, Variant::AwtpPd, chan("0.5", "0.5", "0.5")).is_ok());
        let over = SkaConfig::new(f, 8, 16, Variant::AwtpPd, chan("0.3", "0.2", "0.5"), 57);
        assert!(matches!(over, Err(Error::Config(m)) if m.contains("(u-1)(1-rho) n1")));
        assert!(SkaConfig::unchecked_key_len(f, 8, 16, Variant::AwtpPd, chan("0.3", "0.2", "0.5"), 57).is_ok());
        let small = Field::new(5).unwrap();
        assert!(SkaConfig::new(small, 2, 4, Variant::AwtpPd, ChannelParams::noiseless(), 2).is_err());
        assert!(SkaConfig::with_max_key(f, 2, 4, Variant::Awtp, ChannelParams::noiseless()).is_err());
    }

    #[test]
    fn transcript_round_trip() {
        let cfg = strong(65521, 4, 4, Variant::Awtp);
        let mut s = build_strategy("random_additive", 3).unwrap();
        let out = run_session(&cfg, s.as_mut(), &mut sampler(8)).unwrap();
        let t = SessionTranscript::new(&cfg, "random_additive", Some(8), &out);
        let json = t.to_json_pretty();
        assert_eq!(SessionTranscript::from_json(&json).unwrap(), t);
        let bottom = OutcomeRecord {
            k_a: Some(vec![1]),
            k_b: None,
            agreed: false,
            accepted: 0,
            secrecy_void: true,
        };
        assert!(serde_json::to_string(&bottom).unwrap().contains("\"k_b\":null"));
    }
}
