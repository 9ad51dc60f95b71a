//! The linear program over regular CPAs with the all-ones class normalised to
//! one row, its bases, and the resulting optimal ratio.
//!
//! Variables are `y_0..y_{nu-1}` (first array) and `x_0..x_d` (second array).
//! Constraint `h` reads `sum_i C(nu-k, i-h) x_i - sum_{i<nu} C(nu-k, i-h) y_i`
//! equals 1 for `h = k` and 0 otherwise. The objective is the row count
//! `sum_i C(nu, i) (y_i + x_i)`; minimising it maximises the ratio
//! `2 / (opt + 1)` once the all-ones row is added back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exactmath::{binom, binom_q, expect_integer, int, lcm_of_denominators, rank, to_u64, Rational};
use crate::regular::RepVec;

/// Checks `1 <= k <= d < nu`.
pub fn validate(nu: usize, d: usize, k: usize) -> Result<()> {
    if k == 0 || k > d || d >= nu {
        return Err(invalid(format!(
            "need 1 <= k <= d < nu, got (nu, d, k) = ({nu}, {d}, {k})"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    Y(usize),
    X(usize),
}

impl Var {
    pub fn weight(self) -> usize {
        match self {
            Var::Y(i) | Var::X(i) => i,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Y(i) => write!(f, "y{i}"),
            Var::X(i) => write!(f, "x{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpMatrix {
    pub nu: usize,
    pub d: usize,
    pub k: usize,
    /// `k + 1` rows over the columns `y_0..y_{nu-1}, x_0..x_d`.
    pub rows: Vec<Vec<BigInt>>,
    pub rhs: Vec<BigInt>,
}

impl LpMatrix {
    pub fn column_index(&self, v: Var) -> usize {
        match v {
            Var::Y(i) => i,
            Var::X(i) => self.nu + i,
        }
    }

    pub fn column(&self, v: Var) -> Vec<Rational> {
        let c = self.column_index(v);
        self.rows.iter().map(|r| int(r[c].clone())).collect()
    }

    pub fn rank(&self) -> usize {
        let q: Vec<Vec<Rational>> =
            self.rows.iter().map(|r| r.iter().cloned().map(int).collect()).collect();
        rank(&q)
    }

    /// `M v - rhs` for a sparse assignment.
    pub fn residuals(&self, values: &BTreeMap<Var, Rational>) -> Vec<Rational> {
        (0..self.rows.len())
            .map(|h| {
                let lhs: Rational = values
                    .iter()
                    .map(|(&v, val)| int(self.rows[h][self.column_index(v)].clone()) * val)
                    .sum();
                lhs - int(self.rhs[h].clone())
            })
            .collect()
    }
}

pub fn lp_matrix(nu: usize, d: usize, k: usize) -> Result<LpMatrix> {
    validate(nu, d, k)?;
    let n = (nu - k) as i64;
    let rows = (0..=k as i64)
        .map(|h| {
            let ys = (0..nu as i64).map(|i| -binom(n, i - h));
            let xs = (0..=d as i64).map(|i| binom(n, i - h));
            ys.chain(xs).collect()
        })
        .collect();
    let rhs = (0..=k).map(|h| BigInt::from(u8::from(h == k))).collect();
    Ok(LpMatrix { nu, d, k, rows, rhs })
}

/// A candidate basis: weight classes taken from the first array (`y`) and
/// from the second (`x`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Base {
    pub y: BTreeSet<usize>,
    pub x: BTreeSet<usize>,
}

impl Base {
    pub fn new(y: impl IntoIterator<Item = usize>, x: impl IntoIterator<Item = usize>) -> Self {
        Base { y: y.into_iter().collect(), x: x.into_iter().collect() }
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.y.union(&self.x).copied().collect()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> =
            self.y.iter().map(|&i| Var::Y(i)).chain(self.x.iter().map(|&i| Var::X(i))).collect();
        v.sort_by_key(|v| v.weight());
        v
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y={{{}}} X={{{}}}", self.y.iter().join(","), self.x.iter().join(","))
    }
}

/// A base has `k + 1` distinct weights with no weight on both sides.
pub fn is_base(b: &Base, k: usize) -> bool {
    b.y.is_disjoint(&b.x) && b.y.len() + b.x.len() == k + 1
}

/// Cross-check of [`is_base`]: the base's columns of the constraint matrix are
/// linearly independent.
pub fn columns_independent(m: &LpMatrix, b: &Base) -> bool {
    let vars = b.vars();
    if vars.len() != m.rows.len() {
        return false;
    }
    let cols: Vec<Vec<Rational>> = vars.iter().map(|&v| m.column(v)).collect();
    rank(&cols) == vars.len()
}

fn check_base_domain(b: &Base, nu: usize) -> Result<()> {
    if !b.y.is_disjoint(&b.x) {
        return Err(invalid(format!("base {b} uses a weight on both sides")));
    }
    if b.y.iter().chain(&b.x).any(|&i| i >= nu) {
        return Err(invalid(format!("base {b} has a weight outside 0..{nu}")));
    }
    Ok(())
}

/// `prod_{a in S, a != i} (nu - a) / (i - a)` over the support `S`.
fn lagrange_weight(support: &BTreeSet<usize>, i: usize, nu: usize) -> Rational {
    support
        .iter()
        .filter(|&&a| a != i)
        .map(|&a| Rational::new(BigInt::from(nu as i64 - a as i64), BigInt::from(i as i64 - a as i64)))
        .product()
}

/// The basic solution of a base, in closed form. Values can be negative for
/// infeasible bases.
pub fn basic_solution(b: &Base, nu: usize) -> Result<BTreeMap<Var, Rational>> {
    check_base_domain(b, nu)?;
    let support = b.support();
    Ok(b.vars()
        .into_iter()
        .map(|v| {
            let i = v.weight();
            let w = lagrange_weight(&support, i, nu) / binom_q(nu as i64, i as i64);
            let val = match v {
                Var::Y(_) => -w,
                Var::X(_) => w,
            };
            (v, val)
        })
        .collect())
}

/// Feasibility by the alternation rule: listed by decreasing weight, the
/// classes go second, first, second, ... .
pub fn is_feasible_base(b: &Base, k: usize) -> bool {
    if !is_base(b, k) {
        return false;
    }
    b.support()
        .iter()
        .rev()
        .enumerate()
        .all(|(pos, i)| b.x.contains(i) == (pos % 2 == 0))
}

/// Feasibility by sign: every coordinate of the basic solution is non-negative.
pub fn is_feasible_by_sign(b: &Base, nu: usize) -> Result<bool> {
    Ok(basic_solution(b, nu)?.values().all(|v| !v.is_negative()))
}

/// LP objective `sum C(nu, i) value_i` of a basic solution.
pub fn objective(b: &Base, nu: usize) -> Result<Rational> {
    Ok(basic_solution(b, nu)?
        .iter()
        .map(|(v, val)| binom_q(nu as i64, v.weight() as i64) * val)
        .sum())
}

/// Objective of a feasible base as `sum_{i in S} prod_{a != i} (nu - a) / |i - a|`.
pub fn feasible_objective(b: &Base, nu: usize) -> Rational {
    let s = b.support();
    s.iter().map(|&i| lagrange_weight(&s, i, nu).abs()).sum()
}

fn ratio_from_objective(opt: &Rational) -> Rational {
    Rational::from_integer(BigInt::from(2)) / (opt + Rational::one())
}

/// Every base of the LP, feasible or not.
pub fn enumerate_bases(nu: usize, d: usize, k: usize) -> Result<Vec<Base>> {
    validate(nu, d, k)?;
    let mut out = Vec::new();
    for support in (0..nu).combinations(k + 1) {
        for mask in 0u32..1 << (k + 1) {
            let (mut y, mut x) = (BTreeSet::new(), BTreeSet::new());
            let mut ok = true;
            for (j, &i) in support.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    if i > d {
                        ok = false;
                        break;
                    }
                    x.insert(i);
                } else {
                    y.insert(i);
                }
            }
            if ok {
                out.push(Base { y, x });
            }
        }
    }
    Ok(out)
}

/// The base whose support is the sequence `i_0 < ... < i_k` (the trailing
/// `nu` dropped), assigned by alternation from the top.
pub fn base_of_sequence(seq: &OptSequence) -> Base {
    let s = &seq.0[..seq.0.len() - 1];
    let k = s.len() - 1;
    let (mut y, mut x) = (BTreeSet::new(), BTreeSet::new());
    for (r, &i) in s.iter().enumerate() {
        if (k - r).is_multiple_of(2) {
            x.insert(i);
        } else {
            y.insert(i);
        }
    }
    Base { y, x }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseOptimum {
    pub objective: Rational,
    pub delta: Rational,
    pub optimal_bases: Vec<Base>,
    pub feasible_bases: usize,
}

/// Optimum by scanning bases. Without `prune` every base is solved and kept
/// when its solution is non-negative. With `prune` only bases with `d` in the
/// second side and weight 0 in the support are scanned.
pub fn delta_by_bases(nu: usize, d: usize, k: usize, prune: bool) -> Result<BaseOptimum> {
    let bases = enumerate_bases(nu, d, k)?;
    let scored: Vec<(Base, Rational)> = bases
        .into_par_iter()
        .filter(|b| !prune || (b.x.contains(&d) && (b.y.contains(&0) || b.x.contains(&0))))
        .map(|b| {
            let feasible = is_feasible_by_sign(&b, nu)?;
            Ok(if feasible { Some((objective(&b, nu)?, b)) } else { None })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .map(|(o, b)| (b, o))
        .collect();
    let best = scored
        .iter()
        .map(|(_, o)| o)
        .min()
        .cloned()
        .ok_or_else(|| Error::Internal(format!("no feasible base for ({nu}, {d}, {k})")))?;
    let mut optimal_bases: Vec<Base> =
        scored.iter().filter(|(_, o)| *o == best).map(|(b, _)| b.clone()).collect();
    optimal_bases.sort();
    Ok(BaseOptimum {
        delta: ratio_from_objective(&best),
        objective: best,
        optimal_bases,
        feasible_bases: scored.len(),
    })
}

/// Strictly increasing weights `0 = i_0 < i_1 < ... < i_k = d < i_{k+1} = nu`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OptSequence(Vec<usize>);

impl OptSequence {
    pub fn new(v: Vec<usize>) -> Result<Self> {
        if v.len() < 3 || v[0] != 0 || v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "sequence must start at 0, be strictly increasing and have at least 3 terms, got {v:?}"
            )));
        }
        Ok(OptSequence(v))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn nu(&self) -> usize {
        *self.0.last().expect("non-empty")
    }

    pub fn d(&self) -> usize {
        self.0[self.0.len() - 2]
    }

    pub fn k(&self) -> usize {
        self.0.len() - 2
    }
}

impl fmt::Display for OptSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(", "))
    }
}

/// `prod_{s != r, s <= k} (nu - i_s) / |i_r - i_s|` for each `r <= k`.
fn class_weights(seq: &OptSequence) -> Vec<Rational> {
    let s = &seq.0[..seq.0.len() - 1];
    let nu = seq.nu() as i64;
    (0..s.len())
        .map(|r| {
            s.iter()
                .enumerate()
                .filter(|&(t, _)| t != r)
                .map(|(_, &i)| {
                    Rational::new(BigInt::from(nu - i as i64), BigInt::from((s[r] as i64 - i as i64).abs()))
                })
                .product()
        })
        .collect()
}

/// Ratio reached by the CPA built on `seq`.
pub fn sequence_value(seq: &OptSequence) -> Rational {
    ratio_from_objective(&class_weights(seq).iter().sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaOpt {
    pub value: Rational,
    pub sequence: OptSequence,
}

/// Best ratio of a `(nu, d)`-CPA of strength `k`, maximising over the interior
/// weights `i_1 < ... < i_{k-1}` in `1..d`. Ties go to the lexicographically
/// smallest sequence.
pub fn delta_opt(nu: usize, d: usize, k: usize) -> Result<DeltaOpt> {
    validate(nu, d, k)?;
    let mut best: Option<DeltaOpt> = None;
    for interior in (1..d).combinations(k - 1) {
        let mut v = vec![0];
        v.extend(interior);
        v.extend([d, nu]);
        let seq = OptSequence(v);
        let value = sequence_value(&seq);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(DeltaOpt { value, sequence: seq });
        }
    }
    best.ok_or_else(|| Error::Internal("no admissible sequence".into()))
}

/// Per-class multiplicities for `R* = 1`: entry `r` is the multiplicity of each
/// weight-`i_r` word.
fn unit_multiplicities(seq: &OptSequence) -> Vec<Rational> {
    let s = &seq.0[..seq.0.len() - 1];
    let nu = seq.nu() as i64;
    class_weights(seq)
        .into_iter()
        .zip(s)
        .map(|(w, &i)| w / binom_q(nu, i as i64))
        .collect()
}

/// Smallest number of all-ones rows for which the CPA built on `seq` has
/// integral multiplicities.
pub fn min_rstar(seq: &OptSequence) -> BigInt {
    lcm_of_denominators(&unit_multiplicities(seq))
}

/// Optimal regular CPA at the smallest integral scale.
pub fn optimal_cpa(nu: usize, d: usize, k: usize) -> Result<RepVec> {
    let opt = delta_opt(nu, d, k)?;
    cpa_of_sequence(&opt.sequence, k)
}

/// Regular CPA built on `seq`: weight `i_r` goes to the second array when
/// `r` and `k` have the same parity, otherwise to the first.
pub fn cpa_of_sequence(seq: &OptSequence, k: usize) -> Result<RepVec> {
    let (nu, d) = (seq.nu(), seq.d());
    if seq.k() != k {
        return Err(invalid(format!("sequence {seq} has strength {}, not {k}", seq.k())));
    }
    let rstar = min_rstar(seq);
    let mut y = vec![0; nu + 1];
    let mut x = vec![0; d + 1];
    for (r, m) in unit_multiplicities(seq).iter().enumerate() {
        let i = seq.0[r];
        let m = to_u64(&expect_integer(&(m * int(rstar.clone())))?)?;
        if (k - r).is_multiple_of(2) {
            x[i] = m;
        } else {
            y[i] = m;
        }
    }
    y[nu] = to_u64(&rstar)?;
    RepVec::new(nu, d, k, y, x)
}

/// Closed forms for budget equal to strength, strength 1 and strength 2.
pub fn closed_form(nu: usize, d: usize, k: usize) -> Result<Rational> {
    validate(nu, d, k)?;
    let (q, p) = (nu as i64, d as i64);
    let r = |a: i64, b: i64| Rational::new(BigInt::from(a), BigInt::from(b));
    if k == 1 {
        return Ok(r(p, q));
    }
    if k == 2 {
        let (hi, lo) = ((p + 1) / 2, p / 2);
        return Ok(r(hi * lo, (q - hi) * (q - lo)));
    }
    if d == k {
        let kk = k as i64;
        let s: BigInt = (0..=kk).map(|i| binom(q, i) * binom(q - i - 1, kk - i)).sum();
        return Ok(Rational::new(BigInt::from(2), s + 1));
    }
    Err(Error::NoClosedForm { nu, d, k })
}

/// Best ratio of a `(q, p)`-ARPA of strength `k`.
pub fn gamma(q: usize, p: usize, k: usize) -> Result<Rational> {
    if k == 0 || k > p || p > q {
        return Err(invalid(format!("need 1 <= k <= p <= q, got (q, p, k) = ({q}, {p}, {k})")));
    }
    if p == q {
        return Ok(Rational::one());
    }
    Ok(delta_opt(q, p, k)?.value)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaReport {
    pub value: Rational,
    /// Absent when `p = q`, where the single identity row is optimal.
    pub sequence: Option<OptSequence>,
    pub min_rstar: BigInt,
}

pub fn gamma_report(q: usize, p: usize, k: usize) -> Result<GammaReport> {
    let value = gamma(q, p, k)?;
    if p == q {
        return Ok(GammaReport { value, sequence: None, min_rstar: BigInt::one() });
    }
    let opt = delta_opt(q, p, k)?;
    Ok(GammaReport { value, min_rstar: min_rstar(&opt.sequence), sequence: Some(opt.sequence) })
}

pub fn all_zero(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn seq(v: &[usize]) -> OptSequence {
        OptSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn matrix_entries_and_rank() {
        let m = lp_matrix(4, 2, 1).unwrap();
        assert_eq!(m.rows[0][m.column_index(Var::X(0))], BigInt::from(1));
        assert_eq!(m.rows[1][m.column_index(Var::X(0))], BigInt::zero());
        assert_eq!(m.rows[0][m.column_index(Var::Y(1))], BigInt::from(-3));
        assert_eq!(lp_matrix(5, 3, 2).unwrap().rank(), 3);
        assert!(lp_matrix(4, 4, 1).is_err());
        assert!(lp_matrix(4, 2, 0).is_err());
    }

    #[test]
    fn bases() {
        assert!(is_base(&Base::new([0], [2]), 1));
        assert!(!is_base(&Base::new([0], [0]), 1));
        assert!(!is_base(&Base::new([0, 1], [2]), 1));
        assert!(is_feasible_base(&Base::new([0], [2]), 1));
        assert!(!is_feasible_base(&Base::new([2], [0]), 1));
    }

    #[test]
    fn basic_solutions() {
        let s = basic_solution(&Base::new([0], [2]), 4).unwrap();
        assert_eq!(s[&Var::Y(0)], int(1));
        assert_eq!(s[&Var::X(2)], rat(1, 3));
        let m = lp_matrix(4, 2, 1).unwrap();
        assert!(all_zero(&m.residuals(&s)));

        let s = basic_solution(&Base::new([1], [0, 3]), 5).unwrap();
        assert_eq!(s[&Var::X(0)], rat(8, 3));
        assert_eq!(s[&Var::Y(1)], int(1));
        assert_eq!(s[&Var::X(3)], rat(1, 3));
        assert!(basic_solution(&Base::new([1], [1]), 5).is_err());
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta_opt(5, 4, 1).unwrap().value, rat(4, 5));
        let o = delta_opt(5, 4, 2).unwrap();
        assert_eq!(o.value, rat(4, 9));
        assert_eq!(o.sequence, seq(&[0, 2, 4, 5]));
        let o = delta_opt(6, 3, 2).unwrap();
        assert_eq!(o.value, rat(1, 10));
        assert_eq!(o.sequence, seq(&[0, 1, 3, 6]));
    }

    #[test]
    fn rstar_values() {
        assert_eq!(min_rstar(&seq(&[0, 1, 3, 5])), BigInt::from(3));
        assert_eq!(min_rstar(&seq(&[0, 2, 4, 5])), BigInt::from(8));
        assert_eq!(min_rstar(&seq(&[0, 2, 4])), BigInt::from(3));
    }

    #[test]
    fn optimal_cpas() {
        let v = optimal_cpa(5, 2, 2).unwrap();
        assert_eq!(v.y, vec![0, 3, 0, 0, 0, 1]);
        assert_eq!(v.x, vec![6, 0, 1]);
        assert_eq!(v.row_count(), BigInt::from(16));
        let v = optimal_cpa(5, 3, 1).unwrap();
        assert_eq!(v.y, vec![4, 0, 0, 0, 0, 6]);
        assert_eq!(v.x, vec![0, 0, 0, 1]);
        assert_eq!(v.row_count(), BigInt::from(10));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form(6, 2, 2).unwrap(), rat(1, 25));
        assert_eq!(closed_form(5, 3, 1).unwrap(), rat(3, 5));
        assert_eq!(closed_form(5, 3, 2).unwrap(), rat(1, 6));
        assert!(matches!(closed_form(6, 4, 3), Err(Error::NoClosedForm { .. })));
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(7, 7, 3).unwrap(), int(1));
        assert_eq!(gamma(4, 3, 2).unwrap(), rat(1, 3));
        assert_eq!(gamma(5, 3, 3).unwrap(), rat(1, 25));
        assert!(gamma(4, 3, 0).is_err());
        assert!(gamma(3, 4, 1).is_err());
    }

    #[test]
    fn sequence_bases_are_feasible() {
        let s = seq(&[0, 1, 3, 5]);
        let b = base_of_sequence(&s);
        assert_eq!(b, Base::new([1], [0, 3]));
        assert!(is_feasible_base(&b, 2));
        assert_eq!(feasible_objective(&b, 5), objective(&b, 5).unwrap());
    }
}
