//! Regular CPAs: pairs in which every word of a given weight occurs equally
//! often. Such a pair is described by two count vectors, one per side.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::designs::{check_cpa, DesignArray, DesignPair, PairKind, Params, Word};
use crate::error::{invalid, precondition, Error, Result};
use crate::exactmath::{binom, factorial, to_u64, Rational};

/// Per-weight multiplicities of a regular CPA: every weight-`i` word occurs
/// `y[i]` times in the first array and `x[i]` times in the second.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepVec {
    pub nu: usize,
    pub d: usize,
    pub k: usize,
    pub y: Vec<u64>,
    pub x: Vec<u64>,
}

impl RepVec {
    pub fn new(nu: usize, d: usize, k: usize, y: Vec<u64>, x: Vec<u64>) -> Result<Self> {
        let v = RepVec { nu, d, k, y, x };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        Params::new(self.nu, self.d, self.k).validate()?;
        if self.y.len() != self.nu + 1 || self.x.len() != self.d + 1 {
            return Err(Error::Shape(format!(
                "expected {} y entries and {} x entries, got {} and {}",
                self.nu + 1,
                self.d + 1,
                self.y.len(),
                self.x.len()
            )));
        }
        if self.y[self.nu] == 0 {
            return Err(invalid("the all-ones word must occur in the first array"));
        }
        Ok(())
    }

    /// Rows per side counted with multiplicity, from the first array.
    pub fn row_count(&self) -> BigInt {
        weighted_count(self.nu, &self.y)
    }

    pub fn second_row_count(&self) -> BigInt {
        weighted_count(self.nu, &self.x)
    }

    pub fn ratio(&self) -> Rational {
        Rational::new(BigInt::from(self.y[self.nu]), self.row_count())
    }

    /// Entries divided by their common gcd.
    pub fn reduced(&self) -> RepVec {
        let g = self.y.iter().chain(&self.x).fold(0u64, |a, &b| a.gcd(&b)).max(1);
        RepVec {
            y: self.y.iter().map(|v| v / g).collect(),
            x: self.x.iter().map(|v| v / g).collect(),
            ..self.clone()
        }
    }
}

fn weighted_count(nu: usize, counts: &[u64]) -> BigInt {
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| binom(nu as i64, i as i64) * BigInt::from(c))
        .sum()
}

/// Words of length `nu` with exactly `i` ones, in lexicographic order of
/// their 1-positions.
pub fn words_of_weight(nu: usize, i: usize) -> impl Iterator<Item = Word> {
    (0..nu).combinations(i).map(move |pos| Word::indicator(&pos, nu))
}

pub fn is_regular(a: &DesignArray) -> Result<bool> {
    if a.alphabet() != 2 {
        return Err(Error::Shape("regularity is defined for Boolean arrays".into()));
    }
    let nu = a.columns();
    let mut seen: Vec<(usize, Option<u64>)> = vec![(0, None); nu + 1];
    for (w, m) in a.iter() {
        let slot = &mut seen[w.weight()];
        slot.0 += 1;
        match slot.1 {
            None => slot.1 = Some(m),
            Some(prev) if prev != m => return Ok(false),
            _ => {}
        }
    }
    Ok(seen.iter().enumerate().all(|(i, &(count, mult))| {
        mult.is_none() || BigInt::from(count) == binom(nu as i64, i as i64)
    }))
}

/// Averages a CPA over all column permutations. A weight-`i` word receives
/// `i! (nu - i)!` times the number of weight-`i` rows of the source side, so
/// the ratio is unchanged. With `reduce` the result is divided by the gcd of
/// all multiplicities.
pub fn symmetrize(pair: &DesignPair, reduce: bool) -> Result<DesignPair> {
    let Params { size: nu, budget: d, strength: k } = pair.params;
    let verdict = check_cpa(pair, nu, d, k)?;
    if !verdict.passed() {
        return Err(precondition(format!("input is not a valid CPA: {verdict}")));
    }
    let per_weight = |a: &DesignArray| -> Vec<BigInt> {
        a.weight_profile()
            .into_iter()
            .enumerate()
            .map(|(i, c)| factorial(i as u64) * factorial((nu - i) as u64) * BigInt::from(c))
            .collect()
    };
    let (mf, ms) = (per_weight(&pair.first), per_weight(&pair.second));
    let g = if reduce {
        mf.iter().chain(&ms).fold(BigInt::zero(), |acc, v| acc.gcd(v))
    } else {
        BigInt::from(1)
    };
    let build = |m: &[BigInt]| -> Result<DesignArray> {
        let mut a = DesignArray::new(nu, 2);
        for (i, mult) in m.iter().enumerate() {
            if mult.is_zero() {
                continue;
            }
            let mult = to_u64(&(mult / &g))?;
            for w in words_of_weight(nu, i) {
                a.add(w, mult)?;
            }
        }
        Ok(a)
    };
    DesignPair::new(PairKind::Cpa, pair.params, build(&mf)?, build(&ms)?)
}

/// Count vectors of a regular CPA.
pub fn rep_vector(pair: &DesignPair) -> Result<RepVec> {
    if pair.kind != PairKind::Cpa {
        return Err(Error::Shape("representative vectors describe CPA pairs".into()));
    }
    if !is_regular(&pair.first)? || !is_regular(&pair.second)? {
        return Err(precondition("pair is not regular"));
    }
    let Params { size: nu, budget: d, strength: k } = pair.params;
    let per_word = |a: &DesignArray| -> Vec<u64> {
        let mut v = vec![0; nu + 1];
        for (w, m) in a.iter() {
            v[w.weight()] = m;
        }
        v
    };
    let y = per_word(&pair.first);
    let mut x = per_word(&pair.second);
    if let Some(i) = (d + 1..=nu).find(|&i| x[i] != 0) {
        return Err(precondition(format!("second array has rows of weight {i} > {d}")));
    }
    x.truncate(d + 1);
    RepVec::new(nu, d, k, y, x)
}

/// Pairs `(lhs, rhs)` of the balance sums
/// `sum_i C(nu - k, i - h) y_i` and `sum_i C(nu - k, i - h) x_i` for `h = 0..=k`.
pub fn balance_sums(v: &RepVec, k: usize) -> Vec<(BigInt, BigInt)> {
    let n = (v.nu - k.min(v.nu)) as i64;
    let side = |c: &[u64], h: usize| -> BigInt {
        c.iter()
            .enumerate()
            .map(|(i, &m)| binom(n, i as i64 - h as i64) * BigInt::from(m))
            .sum()
    };
    (0..=k).map(|h| (side(&v.y, h), side(&v.x, h))).collect()
}

/// Whether the regular pair described by `v` agrees on all `k`-column
/// projections. Strengths outside `1..=d` are reported as not holding.
pub fn check_eq4(v: &RepVec, k: usize) -> bool {
    if k == 0 || k > v.d {
        return false;
    }
    balance_sums(v, k).iter().all(|(a, b)| a == b)
}

/// Expands count vectors into explicit arrays.
pub fn materialize(v: &RepVec) -> Result<DesignPair> {
    v.validate()?;
    if !check_eq4(v, v.k) {
        return Err(precondition(format!(
            "count vectors do not balance at strength {}",
            v.k
        )));
    }
    let build = |c: &[u64]| -> Result<DesignArray> {
        let mut a = DesignArray::new(v.nu, 2);
        for (i, &m) in c.iter().enumerate() {
            if m > 0 {
                for w in words_of_weight(v.nu, i) {
                    a.add(w, m)?;
                }
            }
        }
        Ok(a)
    };
    DesignPair::new(PairKind::Cpa, Params::new(v.nu, v.d, v.k), build(&v.y)?, build(&v.x)?)
}

/// Removes weight classes present on both sides. The result still balances
/// and has a smaller or equal row count.
pub fn strip_common(v: &RepVec) -> RepVec {
    let mut out = v.clone();
    for i in 0..=v.d {
        let m = out.y[i].min(out.x[i]);
        out.y[i] -= m;
        out.x[i] -= m;
    }
    out
}

/// Signed encoding `z_i = x_i - y_i` of a regular CPA whose sides share no
/// weight class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZEnc {
    pub nu: usize,
    pub d: usize,
    pub k: usize,
    pub z: Vec<i64>,
}

impl ZEnc {
    pub fn new(nu: usize, d: usize, k: usize, z: Vec<i64>) -> Result<Self> {
        let e = ZEnc { nu, d, k, z };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        Params::new(self.nu, self.d, self.k).validate()?;
        if self.z.len() != self.nu + 1 {
            return Err(Error::Shape(format!(
                "expected {} entries, got {}",
                self.nu + 1,
                self.z.len()
            )));
        }
        if self.z[self.nu] >= 0 {
            return Err(invalid("the all-ones entry must be negative"));
        }
        if let Some(i) = (self.d + 1..self.nu).find(|&i| self.z[i] > 0) {
            return Err(invalid(format!("entry {i} lies above the budget but is positive")));
        }
        Ok(())
    }

    /// Whether `sum_i C(nu - k, i - h) z_i = 0` for every `h = 0..=k`.
    pub fn balances(&self) -> bool {
        let n = (self.nu - self.k) as i64;
        (0..=self.k as i64).all(|h| {
            self.z
                .iter()
                .enumerate()
                .map(|(i, &v)| binom(n, i as i64 - h) * BigInt::from(v))
                .sum::<BigInt>()
                .is_zero()
        })
    }

    /// Largest weight `r` in `d..nu` with a non-zero entry.
    pub fn top_weight(&self) -> Option<usize> {
        (self.d..self.nu).rev().find(|&i| self.z[i] != 0)
    }

    pub fn scaled(&self, factor: i64) -> Result<ZEnc> {
        let z = self
            .z
            .iter()
            .map(|v| v.checked_mul(factor).ok_or_else(|| Error::Overflow(format!("{v} * {factor}"))))
            .collect::<Result<Vec<_>>>()?;
        ZEnc::new(self.nu, self.d, self.k, z)
    }
}

pub fn to_z(v: &RepVec) -> Result<ZEnc> {
    v.validate()?;
    let mut z = Vec::with_capacity(v.nu + 1);
    for i in 0..=v.nu {
        let y = v.y[i];
        let x = if i <= v.d { v.x[i] } else { 0 };
        if x > 0 && y > 0 {
            return Err(precondition(format!(
                "weight {i} occurs on both sides; strip common classes first"
            )));
        }
        let signed = |u: u64| u.to_i64().ok_or_else(|| Error::Overflow(u.to_string()));
        z.push(signed(x)? - signed(y)?);
    }
    ZEnc::new(v.nu, v.d, v.k, z)
}

pub fn from_z(z: &ZEnc) -> Result<RepVec> {
    z.validate()?;
    let y = z.z.iter().map(|&v| (-v).max(0) as u64).collect();
    let x = z.z[..=z.d].iter().map(|&v| v.max(0) as u64).collect();
    RepVec::new(z.nu, z.d, z.k, y, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::ratio;
    use crate::exactmath::rat;
    use crate::fixtures;

    #[test]
    fn regularity() {
        assert!(is_regular(&fixtures::sample_cpa_5_4_3().first).unwrap());
        assert!(!is_regular(&fixtures::sample_cpa_4_3_2().second).unwrap());
        assert!(is_regular(&DesignArray::new(3, 2)).unwrap());
        assert!(is_regular(&fixtures::sample_arpa_4_3_2().first).is_err());
    }

    #[test]
    fn symmetrize_sample() {
        let p = fixtures::sample_cpa_4_3_2();
        let s = symmetrize(&p, false).unwrap();
        assert_eq!(s.row_count(), 144);
        assert_eq!(ratio(&s), rat(1, 3));
        assert!(s.verify().unwrap().passed());
        assert!(is_regular(&s.first).unwrap() && is_regular(&s.second).unwrap());
        let r = symmetrize(&p, true).unwrap();
        assert_eq!(ratio(&r), rat(1, 3));
        assert!(r.row_count() < 144);
    }

    #[test]
    fn rep_vector_of_sample() {
        let v = rep_vector(&fixtures::sample_cpa_5_4_3()).unwrap();
        assert_eq!(v.y, vec![2, 0, 0, 1, 0, 3]);
        assert_eq!(v.x, vec![0, 1, 0, 0, 2]);
        assert!(check_eq4(&v, 3));
        assert!(!check_eq4(&v, 4));
        let sums: Vec<BigInt> = balance_sums(&v, 3).into_iter().map(|(a, _)| a).collect();
        assert_eq!(sums, [2, 1, 2, 4].map(BigInt::from));
        assert!(rep_vector(&fixtures::sample_cpa_4_3_2()).is_err());
    }

    #[test]
    fn degenerate_rep_vector() {
        let mut first = DesignArray::new(3, 2);
        first.add(Word::ones(3), 5).unwrap();
        let mut second = DesignArray::new(3, 2);
        second.add(Word::zeros(3), 5).unwrap();
        let p = DesignPair::new(PairKind::Cpa, Params::new(3, 3, 1), first, second).unwrap();
        let v = rep_vector(&p).unwrap();
        assert_eq!(v.y, vec![0, 0, 0, 5]);
        assert_eq!(v.x, vec![5, 0, 0, 0]);
        assert!(!check_eq4(&v, 1));
        assert!(materialize(&v).is_err());
        assert!(RepVec::new(3, 3, 1, vec![0; 4], vec![0; 4]).is_err());
    }

    #[test]
    fn materialize_round_trip() {
        let p = fixtures::sample_cpa_5_4_3();
        let v = rep_vector(&p).unwrap();
        assert_eq!(materialize(&v).unwrap(), p);
    }

    #[test]
    fn z_encoding() {
        let v = rep_vector(&fixtures::sample_cpa_5_4_3()).unwrap();
        let z = to_z(&v).unwrap();
        assert_eq!(z.z, vec![-2, 1, 0, -1, 2, -3]);
        assert!(z.balances());
        assert_eq!(from_z(&z).unwrap(), v);
        assert_eq!(z.top_weight(), Some(4));
    }

    #[test]
    fn overlapping_classes_need_stripping() {
        let v = RepVec::new(4, 2, 1, vec![1, 1, 0, 0, 1], vec![2, 1, 0]).unwrap();
        assert!(to_z(&v).is_err());
        let s = strip_common(&v);
        assert_eq!(s.y, vec![0, 0, 0, 0, 1]);
        assert_eq!(s.x, vec![1, 0, 0]);
        assert_eq!(check_eq4(&v, 1), check_eq4(&s, 1));
    }
}
