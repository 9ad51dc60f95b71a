//! Lifting a regular CPA to an ARPA.
//!
//! Each Boolean word `u(J)` (ones on `J`) is replaced by ARPA rows whose match
//! set is exactly `J`. The row multiplicities are chosen so that every
//! `k`-column projection of the two ARPA arrays agrees, which the verifier
//! re-checks independently after construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::designs::{
    check_arpa, interprets_as, DesignArray, DesignPair, PairKind, Params, Symbol, Verdict, Word,
};
use crate::error::{invalid, precondition, Error, Result};
use crate::exactmath::{binom_q, expect_integer, int, lcm_of_denominators, to_i64, to_u64, Rational};
use crate::lp;
use crate::regular::{from_z, materialize, rep_vector, strip_common, to_z, RepVec, ZEnc};

/// `min(J ∪ {nu - r})`.
pub fn c_star(j: &BTreeSet<usize>, nu: usize, r: usize) -> usize {
    debug_assert!(r <= nu);
    j.first().map_or(nu - r, |&m| m.min(nu - r))
}

/// Row matching the identity on `J` and equal to `c_star(J)` elsewhere.
pub fn g_word(j: &BTreeSet<usize>, nu: usize, r: usize) -> Word {
    let c = c_star(j, nu, r) as Symbol;
    Word::new((0..nu).map(|i| if j.contains(&i) { i as Symbol } else { c }).collect())
}

/// Row matching the identity on `J`; off `J` it is `c + 1` up to column `c`
/// and `c` after it. Needs `c < c_star(J)`.
pub fn g_c_word(j: &BTreeSet<usize>, c: usize, nu: usize, r: usize) -> Result<Word> {
    let cs = c_star(j, nu, r);
    if c >= cs {
        return Err(invalid(format!("need c < {cs}, got c = {c}")));
    }
    Ok(Word::new(
        (0..nu)
            .map(|i| {
                if j.contains(&i) {
                    i as Symbol
                } else if i <= c {
                    (c + 1) as Symbol
                } else {
                    c as Symbol
                }
            })
            .collect(),
    ))
}

fn top_weight(z: &ZEnc) -> Result<usize> {
    if z.z[z.d] <= 0 {
        return Err(precondition(format!(
            "entry at the budget d = {} must be positive, got {}",
            z.d, z.z[z.d]
        )));
    }
    Ok(z.top_weight().expect("z_d is non-zero"))
}

/// Symbol budget of the lifted ARPA.
pub fn d_prime(z: &ZEnc) -> Result<usize> {
    z.validate()?;
    let r = top_weight(z)?;
    Ok(if r > z.d {
        z.d + 2
    } else if z.z[z.d - 1] > 0 {
        z.d + 1
    } else {
        z.d
    })
}

/// Signed ARPA rows: negative values go to the first array, positive to the
/// second. `scale` is the factor applied to the source encoding to make
/// every value integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZTilde {
    pub nu: usize,
    pub scale: BigInt,
    pub entries: BTreeMap<Word, i64>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    row: Vec<Symbol>,
    value: i64,
}

impl ZTilde {
    /// Builds from explicit rows, rejecting duplicates, zero values and
    /// ragged rows.
    pub fn from_entries(
        nu: usize,
        entries: impl IntoIterator<Item = (Word, i64)>,
    ) -> Result<ZTilde> {
        let mut map = BTreeMap::new();
        for (w, v) in entries {
            if w.len() != nu || w.symbols().iter().any(|&s| usize::from(s) >= nu) {
                return Err(Error::Shape(format!("row ({w}) is not a word over 0..{nu} of length {nu}")));
            }
            if v == 0 {
                return Err(invalid(format!("row ({w}) has value zero")));
            }
            if map.insert(w.clone(), v).is_some() {
                return Err(invalid(format!("row ({w}) appears twice")));
            }
        }
        Ok(ZTilde { nu, scale: BigInt::from(1), entries: map })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<EntryJson> = self
            .entries
            .iter()
            .map(|(w, &value)| EntryJson { row: w.symbols().to_vec(), value })
            .collect();
        serde_json::to_value(v).expect("entries serialize")
    }

    pub fn from_json(text: &str) -> Result<ZTilde> {
        let v: Vec<EntryJson> = serde_json::from_str(text)?;
        let nu = v.first().map_or(0, |e| e.row.len());
        ZTilde::from_entries(nu, v.into_iter().map(|e| (Word::new(e.row), e.value)))
    }

    /// Sum of values per match word.
    pub fn class_sums(&self) -> BTreeMap<Word, i64> {
        let mut out = BTreeMap::new();
        for (w, &v) in &self.entries {
            *out.entry(w.matches()).or_insert(0) += v;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftOutput {
    pub ztilde: ZTilde,
    pub d_prime: usize,
    pub k: usize,
    /// Largest weight in `d..nu` with a non-zero entry.
    pub r: usize,
}

/// Lifts a balanced encoding to signed ARPA rows.
pub fn lift(z: &ZEnc) -> Result<LiftOutput> {
    z.validate()?;
    if !z.balances() {
        return Err(precondition("encoding does not balance at its strength"));
    }
    let r = top_weight(z)?;
    let dp = d_prime(z)?;
    let nu = z.nu;
    let n = nu as i64;
    let mut raw: BTreeMap<Word, Rational> = BTreeMap::new();
    let mut put = |w: Word, v: Rational| -> Result<()> {
        if v.is_zero() {
            return Ok(());
        }
        if raw.insert(w.clone(), v).is_some() {
            return Err(Error::Internal(format!("row ({w}) produced twice")));
        }
        Ok(())
    };
    put(Word::identity(nu), int(z.z[nu]))?;
    for j in (0..nu).combinations(r) {
        let j: BTreeSet<usize> = j.into_iter().collect();
        put(g_word(&j, nu, r), int(z.z[r]))?;
    }
    for i in 0..r {
        if z.z[i] == 0 {
            continue;
        }
        let (ii, rr) = (i as i64, r as i64);
        let zi = int(z.z[i]);
        let denom = binom_q(n - 1 - ii, rr - ii);
        for j in (0..nu).combinations(i) {
            let j: BTreeSet<usize> = j.into_iter().collect();
            let cs = c_star(&j, nu, r);
            for c in 0..cs {
                let coef = binom_q(n - c as i64 - 2 - ii, rr - 1 - ii) / &denom;
                put(g_c_word(&j, c, nu, r)?, coef * &zi)?;
            }
            if cs < nu - r {
                let coef = binom_q(n - cs as i64 - 1 - ii, rr - ii) / &denom;
                put(g_word(&j, nu, r), coef * &zi)?;
            }
        }
    }
    let scale = lcm_of_denominators(raw.values());
    let entries = raw
        .into_iter()
        .map(|(w, v)| Ok((w, to_i64(&expect_integer(&(v * int(scale.clone())))?)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let out = LiftOutput { ztilde: ZTilde { nu, scale, entries }, d_prime: dp, k: z.k, r };
    if !conserves(&out.ztilde, z)? {
        return Err(Error::Internal("lifted rows do not reproduce the source classes".into()));
    }
    Ok(out)
}

/// Whether the values with match word `u` sum to `scale * z_{|u|}` for every
/// Boolean word `u`.
pub fn conserves(t: &ZTilde, z: &ZEnc) -> Result<bool> {
    let sums = t.class_sums();
    let scale = to_i64(&t.scale)?;
    let mut classes = vec![0usize; z.nu + 1];
    for (u, &s) in &sums {
        let w = u.weight();
        if s != scale * z.z[w] {
            return Ok(false);
        }
        if s != 0 {
            classes[w] += 1;
        }
    }
    Ok((0..=z.nu).all(|i| {
        z.z[i] == 0 || BigInt::from(classes[i]) == crate::exactmath::binom(z.nu as i64, i as i64)
    }))
}

/// Splits signed rows into an ARPA pair with the given symbol budget and
/// strength.
pub fn materialize_lift(t: &ZTilde, p: usize, k: usize) -> Result<DesignPair> {
    let mut first = DesignArray::new(t.nu, t.nu);
    let mut second = DesignArray::new(t.nu, t.nu);
    for (w, &v) in &t.entries {
        let m = to_u64(&BigInt::from(v).abs())?;
        if v < 0 {
            first.add(w.clone(), m)?;
        } else {
            second.add(w.clone(), m)?;
        }
    }
    DesignPair::new(PairKind::Arpa, Params::new(t.nu, p, k), first, second)
}

/// `sum_{i=h}^{r} C(nu-c-h-lam, i-h) C(nu-c-i, r-i) / C(nu-1-i, r-i) z_i`.
pub fn f_z_raw(z: &[Rational], nu: usize, r: usize, h: usize, lam: usize, c: usize) -> Rational {
    let (n, r, h, lam, c) = (nu as i64, r as i64, h as i64, lam as i64, c as i64);
    (h..=r)
        .map(|i| {
            binom_q(n - c - h - lam, i - h) * binom_q(n - c - i, r - i) / binom_q(n - 1 - i, r - i)
                * &z[i as usize]
        })
        .sum()
}

pub fn f_z_eval(z: &ZEnc, h: usize, lam: usize, c: usize) -> Result<Rational> {
    let r = top_weight(z)?;
    let zq: Vec<Rational> = z.z.iter().map(|&v| int(v)).collect();
    Ok(f_z_raw(&zq, z.nu, r, h, lam, c))
}

/// The six ways a projection value can meet the lifted rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One projection checked by [`projection_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionProbe {
    pub h_set: Vec<usize>,
    pub l_set: Vec<usize>,
    pub values: Vec<usize>,
    pub c: usize,
    pub case: Option<Case>,
    pub direct: Rational,
    pub predicted: Option<Rational>,
}

#[derive(Clone, Debug, Default)]
pub struct ProjectionReport {
    pub per_case: BTreeMap<Case, usize>,
    pub unclassified: usize,
    pub failures: Vec<ProjectionProbe>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Enumerates every projection of the lifted rows that fixes a set `H` of
/// matched columns plus values `c` or `c + 1` on `k - |H|` other columns, and
/// compares the direct sum of lifted values with the closed expression for its
/// case. Both must vanish.
pub fn projection_check(z: &ZEnc, t: &ZTilde) -> Result<ProjectionReport> {
    let r = top_weight(z)?;
    let (nu, k) = (z.nu, z.k);
    let zq: Vec<Rational> = z.z.iter().map(|&v| int(v)).collect();
    let f = |h: usize, lam: isize, c: usize| -> Rational {
        if lam < 0 {
            return Rational::zero();
        }
        f_z_raw(&zq, nu, r, h, lam as usize, c) * int(t.scale.clone())
    };
    let top = nu - r;
    let mut report = ProjectionReport::default();
    for h in 0..k {
        for hs in (0..nu).combinations(h) {
            let hset: BTreeSet<usize> = hs.iter().copied().collect();
            let cmax = c_star(&hset, nu, r);
            let rest: Vec<usize> = (0..nu).filter(|j| !hset.contains(j)).collect();
            for ls in rest.iter().copied().combinations(k - h) {
                for c in 0..=cmax {
                    for s in 0..k - h {
                        let vals: Vec<usize> =
                            (0..k - h).map(|t| if t < s { c + 1 } else { c }).collect();
                        if vals.iter().zip(&ls).any(|(v, l)| v == l) {
                            continue;
                        }
                        let direct: i64 = t
                            .entries
                            .iter()
                            .filter(|(w, _)| {
                                let sy = w.symbols();
                                hs.iter().all(|&j| usize::from(sy[j]) == j)
                                    && ls.iter().zip(&vals).all(|(&l, &v)| usize::from(sy[l]) == v)
                            })
                            .map(|(_, &v)| v)
                            .sum();
                        let lam = ls.iter().filter(|&&l| l > c).count() as isize;
                        let in_h = hset.contains(&c);
                        let (first, last) = (ls[0], ls[k - h - 1]);
                        let kh = (k - h) as isize;
                        let case = if s > 0 {
                            (ls[s - 1] <= c && c < ls[s] && !in_h && c < top).then_some(Case::C1)
                        } else if !in_h && first < c && c < last && c < top {
                            Some(Case::C2)
                        } else if !in_h && c < first && c < top {
                            Some(Case::C3)
                        } else if !in_h && last < c {
                            Some(Case::C4)
                        } else if in_h && c < last && c < top {
                            Some(Case::C5)
                        } else if in_h && last < c {
                            Some(Case::C6)
                        } else {
                            None
                        };
                        let predicted = case.map(|cs| match cs {
                            Case::C1 if c + 1 == top => f(h, lam, top),
                            Case::C1 => f(h, lam, c + 1) - f(h, lam - 1, c + 2),
                            Case::C2 => f(h + 1, lam - 1, c + 1),
                            Case::C3 if c + 1 == top => f(h, kh - 1, top),
                            Case::C3 => f(h, kh - 1, c + 1) - f(h, kh - 1, c + 2),
                            Case::C4 if c == top => f(h, 0, top),
                            Case::C4 => f(h, 0, c) - f(h, 0, c + 1),
                            Case::C5 => f(h, lam - 1, c + 1),
                            Case::C6 => f(h, 0, c),
                        });
                        match case {
                            Some(cs) => *report.per_case.entry(cs).or_insert(0) += 1,
                            None => report.unclassified += 1,
                        }
                        let direct = int(direct);
                        let ok = direct.is_zero()
                            && predicted.as_ref().is_none_or(|p| *p == direct);
                        if !ok {
                            report.failures.push(ProjectionProbe {
                                h_set: hs.clone(),
                                l_set: ls.clone(),
                                values: vals,
                                c,
                                case,
                                direct,
                                predicted,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    /// Match words of the ARPA reproduce the CPA row for row.
    pub interprets: bool,
    /// Full ARPA verdict at `(nu, d', k)`.
    pub verdict: Verdict,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.interprets && self.verdict.passed()
    }
}

pub fn verify_lift(arpa: &DesignPair, cpa: &DesignPair, d_prime: usize) -> Result<LiftReport> {
    let k = cpa.params.strength;
    Ok(LiftReport {
        interprets: interprets_as(arpa, cpa)?,
        verdict: check_arpa(arpa, arpa.params.size, d_prime, k)?,
    })
}

/// Everything produced on the way from parameters to an ARPA.
#[derive(Clone, Debug)]
pub struct Construction {
    pub cpa: RepVec,
    pub z: ZEnc,
    pub lifted: LiftOutput,
    pub arpa: DesignPair,
    /// The CPA at the lift's scale, which the ARPA interprets as.
    pub scaled_cpa: DesignPair,
}

fn construct_from_z(cpa: RepVec, z: ZEnc) -> Result<Construction> {
    let lifted = lift(&z)?;
    let arpa = materialize_lift(&lifted.ztilde, lifted.d_prime, z.k)?;
    let scale = to_i64(&lifted.ztilde.scale)?;
    let scaled_cpa = materialize(&from_z(&z.scaled(scale)?)?)?;
    Ok(Construction { cpa, z, lifted, arpa, scaled_cpa })
}

/// Builds an optimal ARPA for `(q, p, k)` with `p < q` by lifting the optimal
/// regular CPA.
pub fn construct_arpa(q: usize, p: usize, k: usize) -> Result<Construction> {
    let cpa = lp::optimal_cpa(q, p, k)?;
    let z = to_z(&cpa)?;
    construct_from_z(cpa, z)
}

/// Lifts an arbitrary regular CPA after removing shared weight classes.
pub fn lift_pair(pair: &DesignPair) -> Result<Construction> {
    let v = strip_common(&rep_vector(pair)?);
    let z = to_z(&v)?;
    construct_from_z(v, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use crate::fixtures;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn w(v: &[Symbol]) -> Word {
        Word::new(v.to_vec())
    }

    #[test]
    fn c_star_values() {
        assert_eq!(c_star(&set(&[0, 2]), 5, 3), 0);
        assert_eq!(c_star(&set(&[3, 4]), 5, 3), 2);
        assert_eq!(c_star(&set(&[]), 5, 3), 2);
    }

    #[test]
    fn g_words() {
        assert_eq!(g_word(&set(&[0, 2]), 5, 3), w(&[0, 0, 2, 0, 0]));
        assert_eq!(g_word(&set(&[0, 2]), 5, 3).matches(), w(&[1, 0, 1, 0, 0]));
        let g = g_c_word(&set(&[3]), 1, 5, 3).unwrap();
        assert_eq!(g, w(&[2, 2, 1, 3, 1]));
        assert_eq!(g.matches(), w(&[0, 0, 0, 1, 0]));
        assert_eq!(g_word(&set(&[]), 5, 3), w(&[2, 2, 2, 2, 2]));
        assert!(g_c_word(&set(&[3]), 2, 5, 3).is_err());
    }

    #[test]
    fn budget_after_lift() {
        let z = ZEnc::new(5, 4, 3, vec![-2, 1, 0, -1, 2, -3]).unwrap();
        assert_eq!(d_prime(&z).unwrap(), 4);
        // z_{d-1} > 0 with r = d.
        let z = ZEnc::new(4, 2, 1, vec![0, 1, 2, 0, -1]).unwrap();
        assert_eq!(d_prime(&z).unwrap(), 3);
        let z = ZEnc::new(5, 2, 1, vec![0, 0, 1, -1, 0, -1]).unwrap();
        assert_eq!(d_prime(&z).unwrap(), 4);
        let z = ZEnc::new(5, 2, 1, vec![0, 0, -1, 0, 0, -1]).unwrap();
        assert!(d_prime(&z).is_err());
    }

    #[test]
    fn lift_reproduces_sample_tables() {
        let z = ZEnc::new(5, 4, 3, vec![-2, 1, 0, -1, 2, -3]).unwrap();
        let out = lift(&z).unwrap();
        assert_eq!(out.ztilde.scale, BigInt::from(1));
        let arpa = materialize_lift(&out.ztilde, out.d_prime, 3).unwrap();
        assert_eq!(arpa, fixtures::lifted_arpa_5_4_3());

        let z = ZEnc::new(5, 2, 2, vec![6, -3, 1, 0, 0, -1]).unwrap();
        let out = lift(&z).unwrap();
        let arpa = materialize_lift(&out.ztilde, out.d_prime, 2).unwrap();
        assert_eq!(arpa, fixtures::lifted_arpa_5_2_2());
    }

    #[test]
    fn ztilde_rejects_bad_entries() {
        let id = Word::identity(3);
        assert!(ZTilde::from_entries(3, [(id.clone(), -1), (id.clone(), 1)]).is_err());
        assert!(ZTilde::from_entries(3, [(id.clone(), 0)]).is_err());
        assert!(ZTilde::from_entries(3, [(w(&[0, 1]), 1)]).is_err());
        let t = ZTilde::from_entries(3, [(id, -1)]).unwrap();
        assert!(materialize_lift(&t, 3, 1).is_err());
    }

    #[test]
    fn ztilde_json_round_trip() {
        let z = ZEnc::new(5, 4, 3, vec![-2, 1, 0, -1, 2, -3]).unwrap();
        let t = lift(&z).unwrap().ztilde;
        let back = ZTilde::from_json(&t.to_json().to_string()).unwrap();
        assert_eq!(back.entries, t.entries);
    }

    #[test]
    fn f_z_vanishes_below_strength() {
        let z = ZEnc::new(5, 4, 3, vec![-2, 1, 0, -1, 2, -3]).unwrap();
        let r = z.top_weight().unwrap();
        for h in 0..3 {
            for lam in 0..3 - h {
                for c in 0..=5 - r {
                    assert_eq!(f_z_eval(&z, h, lam, c).unwrap(), rat(0, 1));
                }
            }
        }
    }

    #[test]
    fn projection_cases_vanish() {
        let mut seen = BTreeSet::new();
        for z in [
            ZEnc::new(5, 4, 3, vec![-2, 1, 0, -1, 2, -3]).unwrap(),
            ZEnc::new(5, 2, 2, vec![6, -3, 1, 0, 0, -1]).unwrap(),
        ] {
            let t = lift(&z).unwrap().ztilde;
            let rep = projection_check(&z, &t).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures.first());
            seen.extend(rep.per_case.keys().copied());
        }
        assert_eq!(seen.len(), 6, "{seen:?}");
    }

    #[test]
    fn construct_small() {
        let c = construct_arpa(5, 2, 2).unwrap();
        assert_eq!(c.lifted.d_prime, 2);
        let rep = verify_lift(&c.arpa, &c.scaled_cpa, c.lifted.d_prime).unwrap();
        assert!(rep.passed());
        assert_eq!(crate::designs::ratio(&c.arpa), rat(1, 16));
    }
}
