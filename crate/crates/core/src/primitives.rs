//! Universal hash, one-time MAC, AMD code and the seedless extractor.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::gf::Field;
use crate::sampler::FieldSampler;

/// `hash_alpha(x) = sum_{j=1..len} x_j alpha^j mod q`.
pub fn universal_hash(field: Field, x: &[u32], alpha: u32) -> Result<u32> {
    if x.len() as u64 > field.modulus() as u64 - 1 {
        return Err(param(format!(
            "hash input length {} exceeds q-1 = {}",
            x.len(),
            field.modulus() - 1
        )));
    }
    // Horner on x_len ... x_1, then one extra multiply for the alpha^1 offset.
    let h = field.eval(x, alpha);
    Ok(field.mul(h, alpha))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacKey {
    pub alpha: u32,
    pub beta: u32,
}

pub fn mac_tag(field: Field, m: &[u32], key: MacKey) -> Result<u32> {
    Ok(field.add(universal_hash(field, m, key.alpha)?, key.beta))
}

pub fn mac_verify(field: Field, m: &[u32], tag: u32, key: MacKey) -> bool {
    mac_tag(field, m, key).is_ok_and(|t| t == tag % field.modulus())
}

/// Parameters of the systematic AMD code over `F_q^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmdParams {
    field: Field,
    d: usize,
}

impl AmdParams {
    pub fn new(field: Field, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(param("AMD message dimension d must be at least 1"));
        }
        if (d as u64 + 2).is_multiple_of(field.modulus() as u64) {
            return Err(param(format!(
                "AMD requires d + 2 not divisible by q (d = {d}, q = {})",
                field.modulus()
            )));
        }
        Ok(AmdParams { field, d })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `f(x, r) = r^{d+2} + sum_{i=1..d} x_i r^i mod q`.
    pub fn tag(&self, x: &[u32], r: u32) -> u32 {
        debug_assert_eq!(x.len(), self.d);
        let f = self.field;
        let lin = f.mul(f.eval(x, r), r);
        f.add(f.pow(r, self.d as u64 + 2), lin)
    }

    pub fn encode(&self, x: &[u32], sampler: &mut impl FieldSampler) -> Result<AmdCodeword> {
        let r = sampler.draw(self.field);
        self.encode_with(x, r)
    }

    /// Deterministic encoding with caller-chosen randomness `r`.
    pub fn encode_with(&self, x: &[u32], r: u32) -> Result<AmdCodeword> {
        if x.len() != self.d {
            return Err(param(format!("AMD input has length {}, expected {}", x.len(), self.d)));
        }
        let x: Vec<u32> = x.iter().map(|&v| v % self.field.modulus()).collect();
        let r = r % self.field.modulus();
        let t = self.tag(&x, r);
        Ok(AmdCodeword { x, r, t })
    }

    /// Returns the message iff the tag matches, `None` (⊥) otherwise.
    pub fn verify<'a>(&self, c: &'a AmdCodeword) -> Option<&'a [u32]> {
        self.check(&c.x, c.r, c.t).then_some(c.x.as_slice())
    }

    pub fn check(&self, x: &[u32], r: u32, t: u32) -> bool {
        x.len() == self.d && self.tag(x, r) == t
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmdCodeword {
    pub x: Vec<u32>,
    pub r: u32,
    pub t: u32,
}

/// A vector whose `free` positions are uniform and whose other positions
/// are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolFixingSource {
    pub values: Vec<u32>,
    pub free_positions: Vec<usize>,
}

impl SymbolFixingSource {
    pub fn new(values: Vec<u32>, mut free_positions: Vec<usize>) -> Result<Self> {
        free_positions.sort_unstable();
        free_positions.dedup();
        if free_positions.iter().any(|&p| p >= values.len()) {
            return Err(param("free position outside the source"));
        }
        Ok(SymbolFixingSource {
            values,
            free_positions,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of uniform symbols (min-entropy in units of `log q`).
    pub fn entropy_symbols(&self) -> usize {
        self.free_positions.len()
    }

    /// A concrete sample with the free positions replaced by `free_values`.
    pub fn realize(&self, free_values: &[u32]) -> Vec<u32> {
        let mut out = self.values.clone();
        for (&p, &v) in self.free_positions.iter().zip(free_values) {
            out[p] = v;
        }
        out
    }

    pub fn sample(&self, field: Field, sampler: &mut impl FieldSampler) -> Vec<u32> {
        let free = sampler.draw_vec(field, self.free_positions.len());
        self.realize(&free)
    }
}

/// Seedless extractor: interpolates `f` with `f(i) = x_i` for `i < N` and
/// outputs `f(N), ..., f(N+m-1)`.
pub fn sf_extract(field: Field, x: &[u32], m: usize) -> Result<Vec<u32>> {
    if m == 0 {
        return Err(param("extractor output length must be at least 1"));
    }
    let n = x.len();
    if (field.modulus() as u64) < (n + m) as u64 {
        return Err(param(format!(
            "extractor requires q >= N + m (q = {}, N = {n}, m = {m})",
            field.modulus()
        )));
    }
    // Nodes are 0..N-1, so the Lagrange weights have the closed form
    // w_i = (-1)^(N-1-i) / (i! (N-1-i)!) and for x >= N
    // f(x) = prod_j (x - j) * sum_i w_i y_i / (x - i).
    let inv = small_inverses(field, n + m);
    let mut inv_fact = vec![1u32; n.max(1)];
    for i in 1..n {
        inv_fact[i] = field.mul(inv_fact[i - 1], inv[i]);
    }
    let weighted: Vec<u32> = x
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let w = field.mul(inv_fact[i], inv_fact[n - 1 - i]);
            let w = if (n - 1 - i) % 2 == 1 { field.neg(w) } else { w };
            field.mul(w, field.reduce(y as u64))
        })
        .collect();
    let mut node_prod: u32 = (0..n).fold(1, |acc, j| field.mul(acc, field.reduce((n - j) as u64)));
    let mut out = Vec::with_capacity(m);
    for xv in n..n + m {
        if xv > n {
            // prod_j (x - j) for x -> x + 1: multiply by x, divide by x - N
            node_prod = field.mul(field.mul(node_prod, field.reduce(xv as u64)), inv[xv - n]);
        }
        let mut sum = 0u64;
        for (i, &wy) in weighted.iter().enumerate() {
            sum += field.mul(wy, inv[xv - i]) as u64;
        }
        out.push(field.mul(node_prod, field.reduce(sum)));
    }
    Ok(out)
}

/// Inverses of `1..len` (index 0 unused) by `inv[k] = -(q / k) inv[q mod k]`.
fn small_inverses(field: Field, len: usize) -> Vec<u32> {
    let q = field.modulus() as u64;
    let mut inv = vec![0u32; len.max(2)];
    inv[1] = 1;
    for k in 2..len {
        let t = field.mul((q / k as u64) as u32, inv[(q % k as u64) as usize]);
        inv[k] = field.neg(t);
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{RngSampler, ScriptedSampler};
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn f(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn hash_examples() {
        assert_eq!(universal_hash(f(7), &[0, 0, 0], 5).unwrap(), 0);
        assert_eq!(universal_hash(f(7), &[3], 2).unwrap(), 6);
        assert_eq!(universal_hash(f(7), &[1, 1], 2).unwrap(), 6);
        assert_eq!(universal_hash(f(7), &[1, 1, 1], 2).unwrap(), 0);
        assert!(universal_hash(f(7), &[1; 7], 2).is_err());
        assert!(universal_hash(f(7), &[1; 6], 2).is_ok());
    }

    #[test]
    fn mac_examples() {
        let k = |a, b| MacKey { alpha: a, beta: b };
        assert_eq!(mac_tag(f(7), &[0, 0], k(4, 5)).unwrap(), 5);
        assert_eq!(mac_tag(f(7), &[3], k(2, 1)).unwrap(), 0);
        assert_eq!(mac_tag(f(7), &[1, 1], k(2, 2)).unwrap(), 1);
        assert!(mac_verify(f(7), &[3], 0, k(2, 1)));
        assert!(!mac_verify(f(7), &[4], 0, k(2, 1)));
        for a in 0..7 {
            for b in 0..7 {
                let t = mac_tag(f(7), &[2, 5], k(a, b)).unwrap();
                assert!(mac_verify(f(7), &[2, 5], t, k(a, b)));
            }
        }
    }

    #[test]
    fn amd_examples() {
        let p1 = AmdParams::new(f(7), 1).unwrap();
        assert_eq!(p1.encode_with(&[0], 0).unwrap().t, 0);
        assert_eq!(p1.encode_with(&[2], 1).unwrap().t, 3);
        let p2 = AmdParams::new(f(7), 2).unwrap();
        assert_eq!(p2.encode_with(&[1, 2], 2).unwrap().t, 5);

        let good = AmdCodeword { x: vec![2], r: 1, t: 3 };
        assert_eq!(p1.verify(&good), Some(&[2u32][..]));
        let bad = AmdCodeword { x: vec![2], r: 1, t: 4 };
        assert_eq!(p1.verify(&bad), None);
    }

    #[test]
    fn amd_parameter_checks() {
        assert!(AmdParams::new(f(7), 5).is_err());
        assert!(AmdParams::new(f(7), 0).is_err());
        assert!(AmdParams::new(f(3), 1).is_err());
        assert!(AmdParams::new(f(7), 1).unwrap().encode_with(&[1, 2], 0).is_err());
    }

    #[test]
    fn amd_round_trip_scripted() {
        let p = AmdParams::new(f(11), 3).unwrap();
        for r in 0..11 {
            let mut s = ScriptedSampler::new(vec![r]);
            let c = p.encode(&[4, 0, 9], &mut s).unwrap();
            assert_eq!(c.r, r);
            assert_eq!(p.verify(&c), Some(&[4u32, 0, 9][..]));
        }
    }

    #[test]
    fn extractor_examples() {
        assert_eq!(sf_extract(f(5), &[3, 3], 1).unwrap(), vec![3]);
        assert_eq!(sf_extract(f(11), &[6, 6, 6], 4).unwrap(), vec![6; 4]);
        assert_eq!(sf_extract(f(7), &[1, 2], 1).unwrap(), vec![3]);
        assert_eq!(sf_extract(f(11), &[1, 2], 1).unwrap(), vec![3]);
        assert!(sf_extract(f(5), &[1, 2, 3, 4], 2).is_err());
        assert!(sf_extract(f(5), &[1, 2], 0).is_err());
    }

    #[test]
    fn source_realization() {
        let src = SymbolFixingSource::new(vec![1, 0, 4, 0], vec![3, 1]).unwrap();
        assert_eq!(src.entropy_symbols(), 2);
        assert_eq!(src.realize(&[7, 8]), vec![1, 7, 4, 8]);
        let mut rng = RngSampler(rand_chacha::ChaCha8Rng::seed_from_u64(1));
        let s = src.sample(f(11), &mut rng);
        assert_eq!((s[0], s[2]), (1, 4));
        assert!(SymbolFixingSource::new(vec![0], vec![1]).is_err());
    }

    proptest! {
        #[test]
        fn amd_round_trip(x in proptest::collection::vec(0u32..65521, 1..12), r in 0u32..65521) {
            let p = AmdParams::new(f(65521), x.len()).unwrap();
            let c = p.encode_with(&x, r).unwrap();
            prop_assert_eq!(p.verify(&c), Some(x.as_slice()));
        }

        #[test]
        fn extractor_constant_source(c in 0u32..65521, n in 1usize..10, m in 1usize..10) {
            let out = sf_extract(f(65521), &vec![c; n], m).unwrap();
            prop_assert_eq!(out, vec![c; m]);
        }

        #[test]
        fn extractor_matches_interpolation(
            x in proptest::collection::vec(0u32..101, 0..40),
            m in 1usize..40,
        ) {
            let field = f(101);
            prop_assume!(x.len() + m <= 101);
            let pts: Vec<(u32, u32)> = x.iter().enumerate().map(|(i, &v)| (i as u32, v)).collect();
            let poly = crate::gf::interpolate(field, &pts).unwrap();
            let want: Vec<u32> = (x.len()..x.len() + m).map(|i| poly.eval_raw(i as u32)).collect();
            prop_assert_eq!(sf_extract(field, &x, m).unwrap(), want);
        }
    }
}
