//! Reed-Solomon over a prime field with evaluation points `0..n`.
//!
//! Messages are coefficient vectors of length `k`. Decoding works on an
//! arbitrary subset of positions (the survivors after erasure removal).

use crate::gf::{interpolate, Field, Poly};

pub fn encode(field: Field, msg: &[u32], n: usize) -> Vec<u32> {
    (0..n).map(|i| field.eval(msg, i as u32)).collect()
}

/// Coefficients of length exactly `k`, or `None` if `p` has degree `>= k`.
fn pad_coeffs(p: &Poly, k: usize) -> Option<Vec<u32>> {
    if p.coeffs().len() > k {
        return None;
    }
    let mut c = p.coeffs().to_vec();
    c.resize(k, 0);
    Some(c)
}

fn disagreements(field: Field, msg: &[u32], points: &[(u32, u32)]) -> usize {
    points.iter().filter(|&&(x, y)| field.eval(msg, x) != y).count()
}

/// Unique decoding of a dimension-`k` code from `points`, correcting up to
/// `floor((points.len() - k) / 2)` errors (Berlekamp-Welch).
pub fn decode(field: Field, points: &[(u32, u32)], k: usize) -> Option<Vec<u32>> {
    let n = points.len();
    if k == 0 || n < k {
        return None;
    }
    let radius = (n - k) / 2;

    // Error-free fast path: interpolate on the first k points, check the rest.
    let p = interpolate(field, &points[..k]).ok()?;
    let msg = pad_coeffs(&p, k)?;
    if disagreements(field, &msg, &points[k..]) == 0 {
        return Some(msg);
    }
    if radius == 0 {
        return None;
    }
    berlekamp_welch(field, points, k, radius)
}

fn berlekamp_welch(field: Field, points: &[(u32, u32)], k: usize, e: usize) -> Option<Vec<u32>> {
    // Unknowns: E = X^e + sum_{j<e} a_j X^j and Q = sum_{j<k+e} b_j X^j with
    // Q(x_i) = y_i E(x_i) for every point.
    let cols = e + k + e;
    let mut rows = Vec::with_capacity(points.len());
    let mut rhs = Vec::with_capacity(points.len());
    for &(x, y) in points {
        let mut row = Vec::with_capacity(cols);
        let mut pw = 1u32;
        let mut powers = Vec::with_capacity(k + e + 1);
        for _ in 0..=k + e {
            powers.push(pw);
            pw = field.mul(pw, x);
        }
        for &p in &powers[..e] {
            row.push(field.neg(field.mul(y, p)));
        }
        row.extend_from_slice(&powers[..k + e]);
        rows.push(row);
        rhs.push(field.mul(y, powers[e]));
    }
    let sol = field.solve(&rows, &rhs)?;
    let mut loc = sol[..e].to_vec();
    loc.push(1);
    let locator = Poly::new(field, loc);
    let q = Poly::new(field, sol[e..].to_vec());
    let (quot, rem) = q.div_rem(&locator).ok()?;
    if rem.degree().is_some() {
        return None;
    }
    let msg = pad_coeffs(&quot, k)?;
    (disagreements(field, &msg, points) <= e).then_some(msg)
}

/// Exhaustive unique decoder used as a test oracle: tries every `k`-subset
/// of points as the information set.
pub fn decode_brute_force(field: Field, points: &[(u32, u32)], k: usize) -> Option<Vec<u32>> {
    let n = points.len();
    if k == 0 || n < k {
        return None;
    }
    let radius = (n - k) / 2;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let subset: Vec<(u32, u32)> = idx.iter().map(|&i| points[i]).collect();
        if let Some(msg) = interpolate(field, &subset).ok().and_then(|p| pad_coeffs(&p, k)) {
            if disagreements(field, &msg, points) <= radius {
                return Some(msg);
            }
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(cw: &[u32]) -> Vec<(u32, u32)> {
        cw.iter().enumerate().map(|(i, &y)| (i as u32, y)).collect()
    }

    #[test]
    fn corrects_up_to_radius() {
        let f = Field::new(11).unwrap();
        let msg = vec![3, 7];
        let mut cw = encode(f, &msg, 8);
        // radius (8-2)/2 = 3
        cw[1] = f.add(cw[1], 1);
        cw[4] = f.add(cw[4], 5);
        cw[6] = f.add(cw[6], 2);
        assert_eq!(decode(f, &pts(&cw), 2), Some(msg.clone()));
        assert_eq!(decode_brute_force(f, &pts(&cw), 2), Some(msg));
    }

    #[test]
    fn survivors_subset() {
        let f = Field::new(13).unwrap();
        let msg = vec![1, 2, 3];
        let cw = encode(f, &msg, 9);
        let survivors: Vec<(u32, u32)> = [0usize, 2, 3, 5, 8].iter().map(|&i| (i as u32, cw[i])).collect();
        assert_eq!(decode(f, &survivors, 3), Some(msg));
        assert_eq!(decode(f, &survivors[..2], 3), None);
    }

    proptest! {
        #[test]
        fn bw_agrees_with_brute_force(
            msg in proptest::collection::vec(0u32..11, 1..4),
            n in 4usize..9,
            errs in proptest::collection::vec((0usize..8, 1u32..11), 0..5),
        ) {
            let f = Field::new(11).unwrap();
            let k = msg.len();
            prop_assume!(n >= k);
            let mut cw = encode(f, &msg, n);
            for &(p, e) in &errs {
                if p < n {
                    cw[p] = f.add(cw[p], e);
                }
            }
            let p = pts(&cw);
            let fast = decode(f, &p, k);
            let slow = decode_brute_force(f, &p, k);
            prop_assert_eq!(&fast, &slow);
            let nerr = cw.iter().zip(encode(f, &msg, n)).filter(|(a, b)| **a != *b).count();
            if nerr <= (n - k) / 2 {
                prop_assert_eq!(fast, Some(msg));
            }
        }
    }
}
