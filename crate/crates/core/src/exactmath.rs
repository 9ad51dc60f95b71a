//! Exact integer and rational arithmetic plus the binomial-sum identities the
//! rest of the crate leans on.
//!
//! Everything here is arbitrary precision. Binomials follow the counting
//! convention: `binom(n, r)` is zero whenever `r < 0`, `r > n` or `n < 0`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Number of `r`-element subsets of an `n`-element set.
pub fn binom(n: i64, r: i64) -> BigInt {
    if n < 0 || r < 0 || r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn binom_q(n: i64, r: i64) -> Rational {
    int(binom(n, r))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn sign(r: i64) -> i64 {
    if r % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Lagrange-style sum `sum_{i in B} prod_{a in A} (i - a) / prod_{b in B, b != i} (i - b)`.
///
/// It is the leading coefficient of the interpolant of `prod_{a in A}(x - a)` on
/// the nodes `B`, so it is 1 when `|B| = |A| + 1` and 0 when `|B| > |A| + 1`.
pub fn h_lagrange(a: &[i64], b: &[i64]) -> Result<Rational> {
    let distinct: BTreeSet<i64> = b.iter().copied().collect();
    if distinct.len() != b.len() {
        return Err(invalid("the node set B must have pairwise distinct elements"));
    }
    if a.len() >= b.len() {
        return Err(invalid(format!(
            "need |A| < |B|, got |A| = {} and |B| = {}",
            a.len(),
            b.len()
        )));
    }
    let mut total = Rational::zero();
    for &i in b {
        let num: BigInt = a.iter().map(|&x| BigInt::from(i - x)).product();
        let den: BigInt = b
            .iter()
            .filter(|&&x| x != i)
            .map(|&x| BigInt::from(i - x))
            .product();
        total += Rational::new(num, den);
    }
    Ok(total)
}

fn natural(name: &str, v: i64) -> Result<()> {
    if v < 0 {
        return Err(invalid(format!("{name} must be a natural number, got {v}")));
    }
    Ok(())
}

/// `sum_{r >= 0} (-1)^r C(a, r) C(b - r, c - r)`, equal to `C(b - a, c)` when
/// `b >= max(a, c)`.
pub fn s_sum(a: i64, b: i64, c: i64) -> Result<BigInt> {
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        natural(name, v)?;
    }
    if c > b {
        return Err(invalid(format!("s_sum needs c <= b, got c = {c}, b = {b}")));
    }
    let mut total = BigInt::zero();
    for r in 0..=a.min(c) {
        total += sign(r) * binom(a, r) * binom(b - r, c - r);
    }
    Ok(total)
}

/// `sum_{r >= 0} (-1)^r C(a, r) C(b - r, c - r) C(d - r, e - r)`.
///
/// With `b = a - 1` and `d >= a > c >= d - e >= 0` this collapses to
/// `(-1)^c C(d - a, d - e)`.
pub fn u_sum(a: i64, b: i64, c: i64, d: i64, e: i64) -> Result<BigInt> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d), ("e", e)] {
        natural(name, v)?;
    }
    if c > b || e > d {
        return Err(invalid(format!(
            "u_sum needs c <= b and e <= d, got (a, b, c, d, e) = ({a}, {b}, {c}, {d}, {e})"
        )));
    }
    let mut total = BigInt::zero();
    for r in 0..=a.min(c).min(e) {
        total += sign(r) * binom(a, r) * binom(b - r, c - r) * binom(d - r, e - r);
    }
    Ok(total)
}

/// True when `(a, b, c, d, e)` lies in the range where `u_sum` has its
/// single-binomial closed form.
pub fn u_closed_form_applies(a: i64, b: i64, c: i64, d: i64, e: i64) -> bool {
    b == a - 1 && d >= a && a > c && c >= d - e && d - e >= 0
}

pub fn u_closed_form(a: i64, c: i64, d: i64, e: i64) -> BigInt {
    sign(c) * binom(d - a, d - e)
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

pub fn to_u64(v: &BigInt) -> Result<u64> {
    v.to_u64().ok_or_else(|| Error::Overflow(v.to_string()))
}

pub fn to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64().ok_or_else(|| Error::Overflow(v.to_string()))
}

/// Integer value of a rational, failing if it has a denominator.
pub fn expect_integer(v: &Rational) -> Result<BigInt> {
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(Error::Internal(format!("expected an integer, got {v}")))
    }
}

/// Row-reduce a copy of `rows` and return the reduced rows together with the
/// pivot columns.
fn row_reduce(rows: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let lead = m[row][col].clone();
        for v in m[row].iter_mut() {
            *v /= lead.clone();
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..ncols {
                    let delta = &f * &m[row][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    row_reduce(rows).1.len()
}

/// A basis of `{v : rows * v = 0}`.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    if rows.is_empty() {
        return (0..ncols)
            .map(|j| (0..ncols).map(|i| int(i64::from(i == j))).collect())
            .collect();
    }
    let (m, pivots) = row_reduce(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize) -> Vec<Vec<u128>> {
        let mut t = vec![vec![0u128; n + 1]; n + 1];
        for i in 0..=n {
            t[i][0] = 1;
            for j in 1..=i {
                t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
            }
        }
        t
    }

    #[test]
    fn binom_matches_pascal_triangle() {
        let t = pascal(40);
        for n in 0..=40i64 {
            for r in -2..=42i64 {
                let want = if (0..=n).contains(&r) { t[n as usize][r as usize] } else { 0 };
                assert_eq!(binom(n, r), BigInt::from(want), "C({n},{r})");
            }
        }
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(4, -1), BigInt::zero());
        assert_eq!(binom(4, 5), BigInt::zero());
        assert_eq!(binom(-1, 0), BigInt::zero());
    }

    #[test]
    fn lagrange_examples() {
        assert_eq!(h_lagrange(&[], &[7]).unwrap(), int(1));
        assert_eq!(h_lagrange(&[], &[0, 3, 5]).unwrap(), int(0));
        assert_eq!(h_lagrange(&[2], &[0, 1]).unwrap(), int(1));
        assert!(h_lagrange(&[1, 2], &[0, 3]).is_err());
        assert!(h_lagrange(&[], &[1, 1]).is_err());
    }

    // Brute force: c-subsets of {0..b-1} missing {0..a-1}.
    fn s_oracle(a: usize, b: usize, c: usize) -> i64 {
        (0u32..1 << b)
            .filter(|m| m.count_ones() as usize == c && m & ((1 << a) - 1) == 0)
            .count() as i64
    }

    #[test]
    fn s_sum_matches_subset_count() {
        for b in 0..=10usize {
            for a in 0..=b {
                for c in 0..=b {
                    let got = s_sum(a as i64, b as i64, c as i64).unwrap();
                    assert_eq!(got, BigInt::from(s_oracle(a, b, c)), "S({a},{b},{c})");
                }
            }
        }
        assert_eq!(s_sum(0, 5, 2).unwrap(), BigInt::from(10));
        assert_eq!(s_sum(2, 4, 3).unwrap(), BigInt::zero());
        assert_eq!(s_sum(3, 3, 0).unwrap(), BigInt::one());
        assert!(s_sum(1, 2, 3).is_err());
    }

    #[test]
    fn u_sum_direct_values() {
        // Frozen from direct summation over Pascal-table binomials.
        assert_eq!(u_sum(1, 0, 0, 3, 2).unwrap(), BigInt::from(3));
        assert_eq!(u_sum(3, 2, 1, 3, 1).unwrap(), BigInt::from(3));
        assert_eq!(u_sum(0, 4, 2, 4, 2).unwrap(), BigInt::from(36));
        assert_eq!(u_sum(3, 2, 2, 4, 3).unwrap(), BigInt::one());
        assert!(!u_closed_form_applies(1, 0, 0, 3, 2));
        assert!(!u_closed_form_applies(3, 2, 1, 3, 1));
        assert!(u_closed_form_applies(3, 2, 2, 4, 3));
        assert!(u_sum(1, 0, 1, 3, 2).is_err());
    }

    #[test]
    fn u_closed_form_on_its_range() {
        let t = pascal(30);
        let c_ = |n: i64, r: i64| -> i128 {
            if n < 0 || r < 0 || r > n { 0 } else { t[n as usize][r as usize] as i128 }
        };
        for d in 0..=12i64 {
            for a in 1..=d {
                for c in 0..a {
                    for e in (d - c).max(0)..=d {
                        if !u_closed_form_applies(a, a - 1, c, d, e) {
                            continue;
                        }
                        let direct: i128 = (0..=a.min(c).min(e))
                            .map(|r| {
                                let s = if r % 2 == 0 { 1 } else { -1 };
                                s * c_(a, r) * c_(a - 1 - r, c - r) * c_(d - r, e - r)
                            })
                            .sum();
                        assert_eq!(BigInt::from(direct), u_closed_form(a, c, d, e));
                        assert_eq!(u_sum(a, a - 1, c, d, e).unwrap(), BigInt::from(direct));
                    }
                }
            }
        }
    }

    #[test]
    fn rank_and_nullspace() {
        let m = vec![vec![int(1), int(2), int(3)], vec![int(2), int(4), int(6)]];
        assert_eq!(rank(&m), 1);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            for row in &m {
                let dot: Rational = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn lcm_and_gcd() {
        let v = [rat(1, 3), rat(5, 4), int(2)];
        assert_eq!(lcm_of_denominators(&v), BigInt::from(12));
        let w = [BigInt::from(6), BigInt::from(-9), BigInt::zero()];
        assert_eq!(gcd_all(&w), BigInt::from(3));
    }
}
