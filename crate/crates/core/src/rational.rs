//! Exact fractions for channel parameters and rates.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Fraction = Ratio<i64>;

/// Parses `"0.25"`, `"1/3"`, `"1"` or `"-1"` exactly.
pub fn parse_fraction(s: &str) -> Result<Fraction> {
    let s = s.trim();
    let bad = || Error::Usage(format!("`{s}` is not a decimal or a/b fraction"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Fraction::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty())
        || frac.len() > 15
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let denom = 10i64.pow(frac.len() as u32);
    let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac_v: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let numer = int
        .checked_mul(denom)
        .and_then(|v| v.checked_add(frac_v))
        .ok_or_else(bad)?;
    let r = Fraction::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// `floor(frac * n)` for a nonnegative fraction.
pub fn floor_mul(frac: Fraction, n: usize) -> usize {
    let v = (frac * Fraction::from_integer(n as i64)).floor().to_integer();
    v.max(0) as usize
}

/// `ceil(a / b)` for integers.
pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

pub fn to_f64(r: Fraction) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renders a fraction as a short decimal when exact, else `a/b`.
pub fn display(r: Fraction) -> String {
    if r.denom().is_zero() {
        return "nan".into();
    }
    let mut d = *r.denom();
    while d % 2 == 0 {
        d /= 2;
    }
    while d % 5 == 0 {
        d /= 5;
    }
    if d == 1 {
        format!("{}", to_f64(r))
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_fraction("0.3").unwrap(), Fraction::new(3, 10));
        assert_eq!(parse_fraction("1/3").unwrap(), Fraction::new(1, 3));
        assert_eq!(parse_fraction("1").unwrap(), Fraction::from_integer(1));
        assert_eq!(parse_fraction(".5").unwrap(), Fraction::new(1, 2));
        assert_eq!(parse_fraction("-0.25").unwrap(), Fraction::new(-1, 4));
        let sum = parse_fraction("0.3").unwrap() + parse_fraction("0.2").unwrap()
            - parse_fraction("0.5").unwrap();
        assert!(sum.is_zero());
        for bad in ["", "abc", "1/0", "0.3.1", "."] {
            assert!(parse_fraction(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn floors() {
        assert_eq!(floor_mul(Fraction::new(3, 10), 28), 8);
        assert_eq!(floor_mul(Fraction::new(1, 2), 4), 2);
        assert_eq!(ceil_div(22, 1), 22);
        assert_eq!(ceil_div(128, 6), 22);
    }

    #[test]
    fn display_forms() {
        assert_eq!(display(Fraction::new(1, 4)), "0.25");
        assert_eq!(display(Fraction::new(1, 3)), "1/3");
    }
}
