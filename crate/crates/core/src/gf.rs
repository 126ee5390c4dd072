//! Prime-field arithmetic and univariate polynomials over `F_q`.
//!
//! Elements are stored as canonical `u32` residues and every product is
//! formed in `u64` before reduction, so any prime `q < 2^32` is exact.
//! [`Field`] is the arithmetic context used by the codes and protocols;
//! [`FieldElement`] carries its modulus and checks it on every operation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic primality test for 32-bit moduli (trial division).
pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    if q < 4 {
        return true;
    }
    if q.is_multiple_of(2) || q.is_multiple_of(3) {
        return false;
    }
    let q = q as u64;
    let mut d = 5u64;
    while d * d <= q {
        if q.is_multiple_of(d) || q.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// The prime field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Field {
    q: u32,
}

impl TryFrom<u32> for Field {
    type Error = Error;

    fn try_from(q: u32) -> Result<Self> {
        Field::new(q)
    }
}

impl From<Field> for u32 {
    fn from(f: Field) -> u32 {
        f.q
    }
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Field { q })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % self.q as u64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.q as u64 {
            (s - self.q as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.q as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.q) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// Embeds an arbitrary integer (e.g. an evaluation point index).
    #[inline]
    pub fn elem(self, x: u64) -> u32 {
        self.reduce(x)
    }

    pub fn element(self, value: u32) -> FieldElement {
        FieldElement {
            value: value % self.q,
            modulus: self.q,
        }
    }

    /// Horner evaluation of `coeffs` (lowest degree first) at `x`.
    pub fn eval(self, coeffs: &[u32], x: u32) -> u32 {
        coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Solves `A x = b` by Gaussian elimination. Rows of `a` are augmented
    /// with `b` internally. Returns one solution (free variables set to zero)
    /// or `None` when the system is inconsistent.
    pub fn solve(self, a: &[Vec<u32>], b: &[u32]) -> Option<Vec<u32>> {
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut m: Vec<Vec<u32>> = a
            .iter()
            .zip(b)
            .map(|(row, &rhs)| {
                let mut r = row.clone();
                r.push(rhs);
                r
            })
            .collect();
        let mut pivots = Vec::with_capacity(cols.min(rows));
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, p);
            let inv = self.inv(m[r][c]).ok()?;
            for v in m[r][c..].iter_mut() {
                *v = self.mul(*v, inv);
            }
            for i in 0..rows {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c];
                    for j in c..=cols {
                        let t = self.mul(f, m[r][j]);
                        m[i][j] = self.sub(m[i][j], t);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if m[r..].iter().any(|row| row[cols] != 0) {
            return None;
        }
        let mut x = vec![0; cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = m[i][cols];
        }
        Some(x)
    }
}

/// An element of `F_q` that carries its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl FieldElement {
    pub fn new(value: u64, modulus: u32) -> Result<Self> {
        let f = Field::new(modulus)?;
        Ok(f.element(f.reduce(value)))
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn field(self) -> Field {
        Field { q: self.modulus }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Self) -> Result<Field> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.field())
    }

    pub fn apply(self, other: Self, op: ArithOp) -> Result<Self> {
        let f = self.same_field(other)?;
        let v = match op {
            ArithOp::Add => f.add(self.value, other.value),
            ArithOp::Sub => f.sub(self.value, other.value),
            ArithOp::Mul => f.mul(self.value, other.value),
        };
        Ok(f.element(v))
    }

    pub fn add(self, other: Self) -> Result<Self> {
        self.apply(other, ArithOp::Add)
    }

    pub fn sub(self, other: Self) -> Result<Self> {
        self.apply(other, ArithOp::Sub)
    }

    pub fn mul(self, other: Self) -> Result<Self> {
        self.apply(other, ArithOp::Mul)
    }

    pub fn inv(self) -> Result<Self> {
        let f = self.field();
        Ok(f.element(f.inv(self.value)?))
    }

    pub fn pow(self, exp: u64) -> Self {
        let f = self.field();
        f.element(f.pow(self.value, exp))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// Univariate polynomial, lowest degree first, kept in canonical form
/// (no trailing zeros; the zero polynomial has no coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<u32>,
    field: Field,
}

impl Poly {
    pub fn new(field: Field, coeffs: impl Into<Vec<u32>>) -> Self {
        let mut coeffs: Vec<u32> = coeffs.into();
        for c in coeffs.iter_mut() {
            *c %= field.modulus();
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs, field }
    }

    pub fn zero(field: Field) -> Self {
        Poly {
            coeffs: Vec::new(),
            field,
        }
    }

    pub fn from_elements(coeffs: &[FieldElement]) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::Usage("cannot infer modulus of an empty coefficient list".into()));
        };
        let field = first.field();
        if let Some(bad) = coeffs.iter().find(|c| c.modulus() != field.modulus()) {
            return Err(Error::ModulusMismatch(field.modulus(), bad.modulus()));
        }
        Ok(Poly::new(field, coeffs.iter().map(|c| c.value()).collect::<Vec<_>>()))
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: FieldElement) -> Result<FieldElement> {
        if x.modulus() != self.field.modulus() {
            return Err(Error::ModulusMismatch(self.field.modulus(), x.modulus()));
        }
        Ok(self.field.element(self.eval_raw(x.value())))
    }

    pub fn eval_raw(&self, x: u32) -> u32 {
        self.field.eval(&self.coeffs, x)
    }

    /// Long division; returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let f = self.field;
        let Some(dd) = divisor.degree() else {
            return Err(Error::DivisionByZero);
        };
        let lead_inv = f.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quot = vec![0; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = f.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            if c != 0 {
                for (j, &dc) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = f.sub(rem[i + j], f.mul(c, dc));
                }
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(f, quot), Poly::new(f, rem)))
    }
}

/// Lagrange interpolation through `(x, y)` pairs given as raw residues.
///
/// Returns the unique polynomial of degree `< points.len()` through them.
pub fn interpolate(field: Field, points: &[(u32, u32)]) -> Result<Poly> {
    let n = points.len();
    if n > field.modulus() as usize {
        return Err(Error::Usage(format!(
            "{n} interpolation points exceed field size {}",
            field.modulus()
        )));
    }
    for (i, &(xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|&(xj, _)| xj % field.modulus() == xi % field.modulus()) {
            return Err(Error::Usage(format!("duplicate interpolation abscissa {xi}")));
        }
    }
    // master polynomial prod_j (X - x_j), low degree first
    let mut master = vec![1u32];
    for &(xj, _) in points {
        master.push(0);
        for k in (1..master.len()).rev() {
            master[k] = field.sub(master[k - 1], field.mul(master[k], xj));
        }
        master[0] = field.neg(field.mul(master[0], xj));
    }
    let mut acc = vec![0u32; n];
    let mut basis = vec![0u32; n];
    for &(xi, yi) in points {
        if yi % field.modulus() == 0 {
            continue;
        }
        // basis = master / (X - x_i) by synthetic division
        basis[n - 1] = master[n];
        for k in (1..n).rev() {
            basis[k - 1] = field.add(master[k], field.mul(xi, basis[k]));
        }
        let denom = field.eval(&basis, xi);
        let scale = field.mul(yi, field.inv(denom)?);
        for (a, &b) in acc.iter_mut().zip(&basis) {
            *a = field.add(*a, field.mul(b, scale));
        }
    }
    Ok(Poly::new(field, acc))
}

/// [`interpolate`] over typed elements.
pub fn lagrange_interpolate(points: &[(FieldElement, FieldElement)]) -> Result<Poly> {
    let Some(&(x0, _)) = points.first() else {
        return Err(Error::Usage("cannot interpolate zero points without a field".into()));
    };
    let field = x0.field();
    let mut raw = Vec::with_capacity(points.len());
    for &(x, y) in points {
        x.same_field(x0)?;
        y.same_field(x0)?;
        raw.push((x.value(), y.value()));
    }
    interpolate(field, &raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fe(v: u64, q: u32) -> FieldElement {
        FieldElement::new(v, q).unwrap()
    }

    #[test]
    fn primality() {
        let small: Vec<u32> = (0..40).filter(|&q| is_prime(q)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(65521));
        assert!(!is_prime(65521 * 3));
        assert!(is_prime(4294967291));
        assert!(Field::new(65536).is_err());
    }

    #[test]
    fn arith_examples() {
        assert_eq!(fe(3, 7).add(fe(5, 7)).unwrap().value(), 1);
        let x = fe(4, 7);
        assert!(x.mul(fe(0, 7)).unwrap().is_zero());
        assert!(x.sub(x).unwrap().is_zero());
        assert!(matches!(fe(1, 7).add(fe(1, 11)), Err(Error::ModulusMismatch(7, 11))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(fe(1, 65521).inv().unwrap().value(), 1);
        assert_eq!(fe(3, 7).inv().unwrap().value(), 5);
        assert!(matches!(fe(0, 7).inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn eval_examples() {
        let f = Field::new(7).unwrap();
        assert_eq!(Poly::new(f, [0, 1]).eval(fe(2, 7)).unwrap().value(), 2);
        assert_eq!(Poly::zero(f).eval(fe(5, 7)).unwrap().value(), 0);
        assert_eq!(Poly::new(f, [1, 1]).eval(fe(2, 7)).unwrap().value(), 3);
        assert!(Poly::new(f, [1]).eval(fe(2, 11)).is_err());
    }

    #[test]
    fn canonical_form() {
        let f = Field::new(7).unwrap();
        assert_eq!(Poly::new(f, [1, 0, 7, 14]).coeffs(), &[1]);
        assert_eq!(Poly::new(f, [0, 0]).degree(), None);
    }

    #[test]
    fn interpolation_examples() {
        let p = lagrange_interpolate(&[(fe(0, 5), fe(3, 5)), (fe(1, 5), fe(3, 5))]).unwrap();
        assert_eq!(p.coeffs(), &[3]);
        let p = lagrange_interpolate(&[(fe(0, 7), fe(1, 7)), (fe(1, 7), fe(2, 7))]).unwrap();
        assert_eq!(p.coeffs(), &[1, 1]);
        assert_eq!(p.eval(fe(2, 7)).unwrap().value(), 3);
        let p = lagrange_interpolate(&[(fe(4, 11), fe(9, 11))]).unwrap();
        assert_eq!(p.coeffs(), &[9]);
        let dup = lagrange_interpolate(&[(fe(1, 7), fe(1, 7)), (fe(8, 7), fe(2, 7))]);
        assert!(matches!(dup, Err(Error::Usage(_))));
    }

    #[test]
    fn div_rem_recovers_product() {
        let f = Field::new(11).unwrap();
        let a = Poly::new(f, [3, 0, 5, 1]);
        let b = Poly::new(f, [2, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert!(r.degree().unwrap_or(0) < 1);
        for x in 0..11 {
            let lhs = a.eval_raw(x);
            let rhs = f.add(f.mul(q.eval_raw(x), b.eval_raw(x)), r.eval_raw(x));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn solve_small_system() {
        let f = Field::new(7).unwrap();
        // x + y = 3, x - y = 1  =>  x = 2, y = 1
        let a = vec![vec![1, 1], vec![1, 6]];
        assert_eq!(f.solve(&a, &[3, 1]), Some(vec![2, 1]));
        // inconsistent
        let a = vec![vec![1, 1], vec![2, 2]];
        assert_eq!(f.solve(&a, &[1, 3]), None);
    }

    fn field_axioms(q: u32, triples: &[(u32, u32, u32)]) {
        let f = Field::new(q).unwrap();
        for &(a, b, c) in triples {
            let (a, b, c) = (a % q, b % q, c % q);
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.add(a, b), f.add(b, a));
            assert_eq!(f.mul(a, b), f.mul(b, a));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.add(a, f.neg(a)), 0);
            assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn field_axioms_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for q in [7u32, 65521] {
            let triples: Vec<_> = (0..10_000).map(|_| (rng.gen(), rng.gen(), rng.gen())).collect();
            field_axioms(q, &triples);
        }
    }

    proptest! {
        #[test]
        fn interpolate_then_eval(ys in proptest::collection::vec(0u32..65521, 1..40), shift in 0u32..1000) {
            let f = Field::new(65521).unwrap();
            let pts: Vec<(u32, u32)> = ys.iter().enumerate().map(|(i, &y)| (i as u32 * 3 + shift, y)).collect();
            let p = interpolate(f, &pts).unwrap();
            prop_assert!(p.coeffs().len() <= pts.len());
            for &(x, y) in &pts {
                prop_assert_eq!(p.eval_raw(x), y);
            }
        }

        #[test]
        fn horner_matches_power_sum(coeffs in proptest::collection::vec(0u32..65521, 0..21), x in 0u32..65521) {
            let f = Field::new(65521).unwrap();
            let naive = coeffs.iter().enumerate().fold(0u32, |acc, (i, &c)| f.add(acc, f.mul(c, f.pow(x, i as u64))));
            prop_assert_eq!(f.eval(&coeffs, x), naive);
        }
    }

    #[test]
    fn interpolate_full_field() {
        let f = Field::new(7).unwrap();
        let pts: Vec<_> = (0..7).map(|x| (x, (x * x + 3) % 7)).collect();
        let p = interpolate(f, &pts).unwrap();
        assert_eq!(p.coeffs(), &[3, 0, 1]);
    }
}
