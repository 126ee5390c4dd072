//! Limited-view adversary code: Reed-Solomon outer code whose components are
//! individually AMD-authenticated.
//!
//! A message is `k` symbols over `F_q^{u-2}`. Coordinate `j` of all message
//! symbols forms one RS message stream, so the code is `u-2` interleaved RS
//! codes over `F_q` sharing evaluation points `0..n`. Each codeword component
//! `i` carries `(c_i, r_i, t_i)` with `t_i = f(c_i, r_i)` from [`AmdParams`].
//!
//! Decoding drops every component whose AMD check fails and runs unique RS
//! decoding on what is left.

pub mod rs;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{param, Error, Result};
use crate::gf::Field;
use crate::primitives::{AmdCodeword, AmdParams};
use crate::rational::Fraction;
use crate::sampler::FieldSampler;
use crate::Symbol;

/// `R_LV = 1 + rho - rho_r - 2 rho_w`. May be `<= 0` (infeasible).
pub fn lv_rate(rho_r: Fraction, rho_w: Fraction, rho: Fraction) -> Result<Fraction> {
    let one = Fraction::from_integer(1);
    let ok = rho_r >= Fraction::zero()
        && rho_w >= Fraction::zero()
        && rho_r <= rho
        && rho_w <= rho
        && rho <= one
        && rho <= rho_r + rho_w;
    if !ok {
        return Err(param(format!(
            "need 0 <= rho_r, rho_w <= rho <= min(1, rho_r + rho_w); got ({rho_r}, {rho_w}, {rho})"
        )));
    }
    Ok(one + rho - rho_r - rho_w * 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LVParams {
    field: Field,
    u: usize,
    k: usize,
    n: usize,
    channel: ChannelParams,
    amd: AmdParams,
}

impl LVParams {
    pub fn new(field: Field, u: usize, k: usize, n: usize, channel: ChannelParams) -> Result<Self> {
        if u < 3 {
            return Err(param(format!("LV code needs u >= 3 (AMD dimension u-2 >= 1), got u = {u}")));
        }
        if k == 0 {
            return Err(param("LV message length k must be positive"));
        }
        if (field.modulus() as u64) < n as u64 {
            return Err(param(format!(
                "RS evaluation points need q >= n (q = {}, n = {n})",
                field.modulus()
            )));
        }
        let amd = AmdParams::new(field, u - 2)?;
        let rate = channel.lv_rate();
        if rate <= Fraction::zero() {
            return Err(param(format!(
                "LV rate 1 + rho - rho_r - 2 rho_w = {rate} is not positive (need rho_r + 2 rho_w < 1 + rho)"
            )));
        }
        if Fraction::from_integer(k as i64) > rate * Fraction::from_integer(n as i64) {
            return Err(param(format!("k/n = {k}/{n} exceeds the LV rate {rate}")));
        }
        Ok(LVParams {
            field,
            u,
            k,
            n,
            channel,
            amd,
        })
    }

    /// Shortest code for `k` message symbols: `n = ceil(k / R_LV)`.
    pub fn for_message(field: Field, u: usize, k: usize, channel: ChannelParams) -> Result<Self> {
        let rate = channel.lv_rate();
        if rate <= Fraction::zero() {
            return Err(param(format!(
                "LV rate 1 + rho - rho_r - 2 rho_w = {rate} is not positive (need rho_r + 2 rho_w < 1 + rho)"
            )));
        }
        let n = (Fraction::from_integer(k as i64) / rate).ceil().to_integer() as usize;
        Self::new(field, u, k, n.max(1), channel)
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn u(&self) -> usize {
        self.u
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn n(&self) -> usize {
        self.n
    }
    /// Field elements per message symbol, `u - 2`.
    pub fn symbol_dim(&self) -> usize {
        self.u - 2
    }
    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }
    pub fn amd(&self) -> &AmdParams {
        &self.amd
    }
    pub fn rate(&self) -> Fraction {
        Fraction::new(self.k as i64, self.n as i64)
    }

    fn check_message(&self, msg: &[Vec<u32>]) -> Result<()> {
        if msg.len() != self.k || msg.iter().any(|s| s.len() != self.symbol_dim()) {
            return Err(param(format!(
                "LV message must be {} symbols of {} field elements",
                self.k,
                self.symbol_dim()
            )));
        }
        Ok(())
    }

    /// RS-encodes each coordinate stream and lays out the `n` components.
    fn rs_components(&self, msg: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let d = self.symbol_dim();
        let mut comps = vec![vec![0u32; d]; self.n];
        for j in 0..d {
            let stream: Vec<u32> = msg.iter().map(|s| s[j] % self.field.modulus()).collect();
            for (i, y) in rs::encode(self.field, &stream, self.n).into_iter().enumerate() {
                comps[i][j] = y;
            }
        }
        comps
    }

    pub fn encode(&self, msg: &[Vec<u32>], sampler: &mut impl FieldSampler) -> Result<LVCodeword> {
        self.check_message(msg)?;
        let components = self
            .rs_components(msg)
            .into_iter()
            .map(|c| self.amd.encode(&c, sampler))
            .collect::<Result<_>>()?;
        Ok(LVCodeword { components })
    }

    /// Encoding with caller-chosen AMD randomness `r_i` per component.
    pub fn encode_with(&self, msg: &[Vec<u32>], randomness: &[u32]) -> Result<LVCodeword> {
        self.check_message(msg)?;
        if randomness.len() != self.n {
            return Err(param(format!("need {} AMD randomness values", self.n)));
        }
        let components = self
            .rs_components(msg)
            .into_iter()
            .zip(randomness)
            .map(|(c, &r)| self.amd.encode_with(&c, r))
            .collect::<Result<_>>()?;
        Ok(LVCodeword { components })
    }

    /// Decodes a received word of `n` symbols of `u` field elements.
    ///
    /// Returns `None` (⊥) when fewer than `k` components pass the AMD check
    /// or no codeword lies within the unique-decoding radius of the
    /// survivors.
    pub fn decode(&self, word: &[Symbol]) -> Option<Vec<Vec<u32>>> {
        if word.len() != self.n || word.iter().any(|s| s.len() != self.u) {
            return None;
        }
        let d = self.symbol_dim();
        let survivors: Vec<usize> = (0..self.n)
            .filter(|&i| {
                let s = &word[i];
                self.amd.check(&s[..d], s[d], s[d + 1])
            })
            .collect();
        self.decode_survivors(word, &survivors)
    }

    /// RS decoding restricted to the given component indices.
    pub fn decode_survivors(&self, word: &[Symbol], survivors: &[usize]) -> Option<Vec<Vec<u32>>> {
        let d = self.symbol_dim();
        if survivors.len() < self.k {
            return None;
        }
        let radius = (survivors.len() - self.k) / 2;
        let mut msg = vec![vec![0u32; d]; self.k];
        for j in 0..d {
            let pts: Vec<(u32, u32)> = survivors.iter().map(|&i| (i as u32, word[i][j])).collect();
            let stream = rs::decode(self.field, &pts, self.k)?;
            for (sym, v) in msg.iter_mut().zip(stream) {
                sym[j] = v;
            }
        }
        // Errors are component-level: the streams must agree on at most
        // `radius` corrupted components in total.
        let reencoded = self.rs_components(&msg);
        let bad = survivors
            .iter()
            .filter(|&&i| reencoded[i][..] != word[i][..d])
            .count();
        (bad <= radius).then_some(msg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LVCodeword {
    pub components: Vec<AmdCodeword>,
}

impl LVCodeword {
    /// Channel symbols `(c_i..., r_i, t_i)`.
    pub fn to_word(&self) -> Vec<Symbol> {
        self.components
            .iter()
            .map(|c| {
                let mut s = c.x.clone();
                s.push(c.r);
                s.push(c.t);
                s
            })
            .collect()
    }

    pub fn from_word(word: &[Symbol]) -> Result<Self> {
        let components = word
            .iter()
            .map(|s| {
                if s.len() < 3 {
                    return Err(Error::Malformed("LV symbol shorter than 3 elements".into()));
                }
                let d = s.len() - 2;
                Ok(AmdCodeword {
                    x: s[..d].to_vec(),
                    r: s[d],
                    t: s[d + 1],
                })
            })
            .collect::<Result<_>>()?;
        Ok(LVCodeword { components })
    }

    pub fn to_bytes(&self, field: Field) -> Vec<u8> {
        word_to_bytes(&self.to_word(), field)
    }

    pub fn from_bytes(bytes: &[u8], field: Field, u: usize) -> Result<Self> {
        Self::from_word(&word_from_bytes(bytes, field, u)?)
    }
}

/// Flat little-endian serialization, component-major: 16-bit integers when
/// `q < 2^16`, else 32-bit.
pub fn word_to_bytes(word: &[Symbol], field: Field) -> Vec<u8> {
    let wide = field.modulus() >= 1 << 16;
    let mut out = Vec::new();
    for v in word.iter().flatten() {
        if wide {
            out.extend_from_slice(&v.to_le_bytes());
        } else {
            out.extend_from_slice(&(*v as u16).to_le_bytes());
        }
    }
    out
}

pub fn word_from_bytes(bytes: &[u8], field: Field, u: usize) -> Result<Vec<Symbol>> {
    let width = if field.modulus() >= 1 << 16 { 4 } else { 2 };
    if u == 0 || !bytes.len().is_multiple_of(width * u) {
        return Err(Error::Malformed(format!(
            "{} bytes is not a whole number of {u}-element symbols",
            bytes.len()
        )));
    }
    let vals: Vec<u32> = bytes
        .chunks_exact(width)
        .map(|c| match width {
            4 => u32::from_le_bytes([c[0], c[1], c[2], c[3]]),
            _ => u16::from_le_bytes([c[0], c[1]]) as u32,
        })
        .collect();
    if let Some(v) = vals.iter().find(|&&v| v >= field.modulus()) {
        return Err(Error::Malformed(format!("value {v} outside F_{}", field.modulus())));
    }
    Ok(vals.chunks(u).map(<[u32]>::to_vec).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_fraction;
    use crate::sampler::RngSampler;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn fr(s: &str) -> Fraction {
        parse_fraction(s).unwrap()
    }

    fn chan(r: &str, w: &str, rho: &str) -> ChannelParams {
        ChannelParams::new(fr(r), fr(w), fr(rho)).unwrap()
    }

    fn params(q: u32, u: usize, k: usize, n: usize) -> LVParams {
        LVParams::new(Field::new(q).unwrap(), u, k, n, chan("0", "0", "0")).unwrap()
    }

    #[test]
    fn rate_examples() {
        assert_eq!(lv_rate(fr("0.4"), fr("0.2"), fr("0.5")).unwrap(), fr("0.7"));
        assert_eq!(lv_rate(fr("0"), fr("0"), fr("0")).unwrap(), fr("1"));
        assert_eq!(lv_rate(fr("1"), fr("1"), fr("1")).unwrap(), fr("-1"));
        assert!(lv_rate(fr("0.6"), fr("0.2"), fr("0.5")).is_err());
        assert!(lv_rate(fr("0.2"), fr("0.2"), fr("0.5")).is_err());
    }

    #[test]
    fn constant_message_layout() {
        let p = params(7, 3, 1, 3);
        let cw = p.encode_with(&[vec![5]], &[0, 0, 0]).unwrap();
        for c in &cw.components {
            assert_eq!((c.x.as_slice(), c.r, c.t), (&[5u32][..], 0, 0));
        }
        let zero = p.encode_with(&[vec![0]], &[0, 0, 0]).unwrap();
        assert!(zero.to_word().iter().flatten().all(|&v| v == 0));
    }

    #[test]
    fn exhaustive_round_trip_small() {
        let p = params(7, 3, 1, 3);
        let mut rng = RngSampler(rand_chacha::ChaCha8Rng::seed_from_u64(3));
        for m in 0..7 {
            let cw = p.encode(&[vec![m]], &mut rng).unwrap();
            assert_eq!(p.decode(&cw.to_word()), Some(vec![vec![m]]));
        }
        for n in 1..=4 {
            let p = params(11, 3, 1, n);
            for m in 0..11 {
                let cw = p.encode(&[vec![m]], &mut rng).unwrap();
                assert_eq!(p.decode(&cw.to_word()), Some(vec![vec![m]]));
            }
        }
    }

    #[test]
    fn tampered_tag_is_erased() {
        let p = params(11, 3, 1, 4);
        let f = p.field();
        let cw = p.encode_with(&[vec![6]], &[1, 2, 3, 4]).unwrap();
        let mut w = cw.to_word();
        w[2][2] = f.add(w[2][2], 1);
        assert!(!p.amd().check(&w[2][..1], w[2][1], w[2][2]));
        assert_eq!(p.decode(&w), Some(vec![vec![6]]));
    }

    #[test]
    fn too_few_survivors_is_bottom() {
        let p = params(11, 3, 2, 3);
        let cw = p.encode_with(&[vec![1], vec![2]], &[1, 2, 3]).unwrap();
        let mut w = cw.to_word();
        w[0][2] += 1;
        w[1][2] += 1;
        assert_eq!(p.decode(&w), None);
        assert_eq!(p.decode(&w[..2]), None);
    }

    #[test]
    fn amd_valid_errors_are_corrected() {
        // Overlap-style corruption: components rewritten with valid tags.
        let p = params(65521, 5, 3, 9);
        let f = p.field();
        let msg = vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]];
        let mut rng = RngSampler(rand_chacha::ChaCha8Rng::seed_from_u64(9));
        let cw = p.encode(&msg, &mut rng).unwrap();
        let mut w = cw.to_word();
        for &i in &[0usize, 5, 7] {
            let payload = vec![f.add(w[i][0], 1), w[i][1], 42];
            let r = w[i][3];
            let t = p.amd().tag(&payload, r);
            w[i] = [payload, vec![r, t]].concat();
        }
        assert_eq!(p.decode(&w), Some(msg.clone()));
        // one more than the radius (9-3)/2 = 3 fails cleanly
        let i = 2;
        let payload = vec![f.add(w[i][0], 1), w[i][1], w[i][2]];
        let t = p.amd().tag(&payload, w[i][3]);
        w[i] = [payload, vec![w[i][3], t]].concat();
        assert_ne!(p.decode(&w), Some(msg));
    }

    #[test]
    fn oblivious_write_dimension_arithmetic() {
        // n = 16: 4 components read-and-rewritten, 2 write-only (erased),
        // so n' = 14 and k = n' - 2 * 4 = 6 = R_LV * n.
        let ch = chan("0.5", "0.375", "0.625");
        let n = 16usize;
        let rho0 = ch.overlap();
        let write_only = crate::rational::floor_mul(ch.rho_w() - rho0, n);
        let overlap = crate::rational::floor_mul(rho0, n);
        let survivors_n = n - write_only;
        let k = survivors_n - 2 * overlap;
        let f = Field::new(65521).unwrap();
        let p = LVParams::new(f, 3, k, n, ch).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let msg: Vec<Vec<u32>> = (0..k).map(|_| vec![rng.gen_range(0..65521)]).collect();
            let cw = p.encode(&msg, &mut RngSampler(&mut rng)).unwrap();
            let mut w = cw.to_word();
            let mut pos: Vec<usize> = (0..n).collect();
            for i in 0..n {
                pos.swap(i, rng.gen_range(i..n));
            }
            for &i in &pos[..write_only] {
                w[i][2] = f.add(w[i][2], 1); // forced AMD failure
            }
            for &i in &pos[write_only..write_only + overlap] {
                let payload = vec![rng.gen_range(0..65521)];
                let t = p.amd().tag(&payload, w[i][1]);
                w[i] = vec![payload[0], w[i][1], t];
            }
            assert_eq!(p.decode(&w), Some(msg));
        }
    }

    #[test]
    fn byte_layout() {
        let p = params(7, 3, 1, 2);
        let cw = p.encode_with(&[vec![5]], &[1, 2]).unwrap();
        let bytes = cw.to_bytes(p.field());
        assert_eq!(bytes.len(), 2 * 3 * 2);
        assert_eq!(&bytes[..6], &[5, 0, 1, 0, cw.components[0].t as u8, 0]);
        assert_eq!(LVCodeword::from_bytes(&bytes, p.field(), 3).unwrap(), cw);
        let wide = Field::new(65537).unwrap();
        assert_eq!(word_to_bytes(&[vec![65536, 1, 2]], wide).len(), 12);
        assert!(word_from_bytes(&[1, 2, 3], p.field(), 3).is_err());
        assert!(word_from_bytes(&[9, 0, 0, 0, 0, 0], p.field(), 3).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        let f = Field::new(7).unwrap();
        assert!(LVParams::new(f, 2, 1, 3, chan("0", "0", "0")).is_err());
        assert!(LVParams::new(f, 3, 1, 8, chan("0", "0", "0")).is_err()); // q < n
        assert!(LVParams::new(f, 7, 1, 3, chan("0", "0", "0")).is_err()); // 7 | d+2
        assert!(LVParams::new(f, 3, 4, 4, chan("0.25", "0.25", "0.5")).is_err()); // k/n > R
        assert!(LVParams::new(f, 3, 3, 4, chan("0.25", "0.25", "0.5")).is_ok()); // k/n = R
        assert!(LVParams::for_message(f, 3, 1, chan("0.5", "0.5", "0.5")).is_err()); // R = 0
        let p = LVParams::for_message(Field::new(65521).unwrap(), 8, 22, chan("0.3", "0.2", "0.5")).unwrap();
        assert_eq!(p.n(), 28);
    }

    proptest! {
        #[test]
        fn round_trip(seed in any::<u64>(), k in 1usize..6, extra in 0usize..6, u in 3usize..7) {
            let f = Field::new(65521).unwrap();
            let p = LVParams::new(f, u, k, k + extra, chan("0", "0", "0")).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let msg: Vec<Vec<u32>> = (0..k).map(|_| (0..u - 2).map(|_| rng.gen_range(0..65521)).collect()).collect();
            let cw = p.encode(&msg, &mut RngSampler(&mut rng)).unwrap();
            prop_assert_eq!(p.decode(&cw.to_word()), Some(msg));
        }

        #[test]
        fn erasures_do_not_change_message(seed in any::<u64>(), erase in proptest::collection::vec(0usize..10, 0..4)) {
            let f = Field::new(65521).unwrap();
            let p = LVParams::new(f, 4, 3, 10, chan("0", "0", "0")).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let msg: Vec<Vec<u32>> = (0..3).map(|_| vec![rng.gen_range(0..65521), rng.gen_range(0..65521)]).collect();
            let mut w = p.encode(&msg, &mut RngSampler(&mut rng)).unwrap().to_word();
            for &i in &erase {
                w[i][3] = f.add(w[i][3], 1);
            }
            prop_assert_eq!(p.decode(&w), Some(msg));
        }
    }
}
