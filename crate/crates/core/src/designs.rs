//! Multiset arrays over a finite alphabet, pairs of them, and the verifiers
//! for both pair kinds.
//!
//! An ARPA pair `(Q, P)` has `q` columns over the symbols `0..q`. A CPA pair
//! `(N, D)` has `nu` Boolean columns. Both must agree on every projection onto
//! `k` columns; what differs is the row budget and the target row.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Error, Result};
use crate::exactmath::{binom, sign, Rational};

pub type Symbol = u16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// The row `0 1 ... q-1`.
    pub fn identity(q: usize) -> Self {
        Word((0..q as Symbol).collect())
    }

    pub fn ones(nu: usize) -> Self {
        Word(vec![1; nu])
    }

    pub fn zeros(nu: usize) -> Self {
        Word(vec![0; nu])
    }

    /// Boolean word whose 1-positions are the set bits of `mask`.
    pub fn from_mask(mask: u64, nu: usize) -> Self {
        Word((0..nu).map(|j| ((mask >> j) & 1) as Symbol).collect())
    }

    /// Boolean word with 1s exactly on `positions`.
    pub fn indicator(positions: &[usize], nu: usize) -> Self {
        let mut w = vec![0; nu];
        for &p in positions {
            w[p] = 1;
        }
        Word(w)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of non-zero coordinates. For Boolean words this is the weight.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&s| s != 0).count()
    }

    pub fn distinct_symbols(&self) -> usize {
        self.0.iter().unique().count()
    }

    pub fn project(&self, columns: &[usize]) -> Vec<Symbol> {
        columns.iter().map(|&c| self.0[c]).collect()
    }

    /// Boolean word marking the coordinates `j` with `self[j] == j`.
    pub fn matches(&self) -> Word {
        Word(
            self.0
                .iter()
                .enumerate()
                .map(|(j, &s)| Symbol::from(usize::from(s) == j))
                .collect(),
        )
    }

    /// Indices `j` with `self[j] == j`.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| usize::from(self.0[j]) == j).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().join(" "))
    }
}

impl FromStr for Word {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.split_whitespace()
            .map(|t| t.parse::<Symbol>().map_err(|e| format!("bad symbol {t:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// A multiset of words of equal length over `0..alphabet`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignArray {
    columns: usize,
    alphabet: usize,
    rows: BTreeMap<Word, u64>,
}

impl DesignArray {
    pub fn new(columns: usize, alphabet: usize) -> Self {
        DesignArray { columns, alphabet, rows: BTreeMap::new() }
    }

    pub fn from_rows(
        columns: usize,
        alphabet: usize,
        rows: impl IntoIterator<Item = (Word, u64)>,
    ) -> Result<Self> {
        let mut a = DesignArray::new(columns, alphabet);
        for (w, m) in rows {
            a.add(w, m)?;
        }
        Ok(a)
    }

    pub fn add(&mut self, word: Word, mult: u64) -> Result<()> {
        if word.len() != self.columns {
            return Err(Error::Shape(format!(
                "row {word} has {} columns, expected {}",
                word.len(),
                self.columns
            )));
        }
        if let Some(&s) = word.symbols().iter().find(|&&s| usize::from(s) >= self.alphabet) {
            return Err(Error::Shape(format!(
                "row {word} uses symbol {s} outside 0..{}",
                self.alphabet
            )));
        }
        if mult > 0 {
            let e = self.rows.entry(word).or_insert(0);
            *e = e.checked_add(mult).ok_or_else(|| Error::Overflow("multiplicity".into()))?;
        }
        Ok(())
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn rows(&self) -> &BTreeMap<Word, u64> {
        &self.rows
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, u64)> {
        self.rows.iter().map(|(w, &m)| (w, m))
    }

    pub fn distinct_rows(&self) -> usize {
        self.rows.len()
    }

    /// Total number of rows, counted with multiplicity.
    pub fn row_count(&self) -> u64 {
        self.rows.values().sum()
    }

    pub fn multiplicity(&self, w: &Word) -> u64 {
        self.rows.get(w).copied().unwrap_or(0)
    }

    pub fn projection(&self, columns: &[usize]) -> BTreeMap<Vec<Symbol>, u64> {
        let mut out = BTreeMap::new();
        for (w, m) in self.iter() {
            *out.entry(w.project(columns)).or_insert(0) += m;
        }
        out
    }

    /// Row counts by weight, indices `0..=columns`.
    pub fn weight_profile(&self) -> Vec<u64> {
        let mut out = vec![0; self.columns + 1];
        for (w, m) in self.iter() {
            out[w.weight()] += m;
        }
        out
    }

    /// Same rows with every multiplicity multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<DesignArray> {
        let mut out = DesignArray::new(self.columns, self.alphabet);
        for (w, m) in self.iter() {
            let m = m.checked_mul(factor).ok_or_else(|| Error::Overflow("multiplicity".into()))?;
            out.add(w.clone(), m)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Arpa,
    Cpa,
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairKind::Arpa => "arpa",
            PairKind::Cpa => "cpa",
        })
    }
}

impl FromStr for PairKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "arpa" => Ok(PairKind::Arpa),
            "cpa" => Ok(PairKind::Cpa),
            _ => Err(format!("unknown pair kind {s:?}, expected arpa or cpa")),
        }
    }
}

/// `(q, p, k)` for ARPAs, `(nu, d, k)` for CPAs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub size: usize,
    pub budget: usize,
    pub strength: usize,
}

impl Params {
    pub fn new(size: usize, budget: usize, strength: usize) -> Self {
        Params { size, budget, strength }
    }

    pub fn validate(&self) -> Result<()> {
        let Params { size, budget, strength } = *self;
        if strength == 0 {
            return Err(invalid("strength k must be at least 1"));
        }
        if !(strength <= budget && budget <= size) {
            return Err(invalid(format!(
                "need 1 <= k <= budget <= size, got (size, budget, k) = ({size}, {budget}, {strength})"
            )));
        }
        if size > Symbol::MAX as usize {
            return Err(invalid(format!("size {size} is too large")));
        }
        Ok(())
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.size, self.budget, self.strength)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignPair {
    pub kind: PairKind,
    pub params: Params,
    pub first: DesignArray,
    pub second: DesignArray,
}

impl DesignPair {
    pub fn new(
        kind: PairKind,
        params: Params,
        first: DesignArray,
        second: DesignArray,
    ) -> Result<Self> {
        params.validate()?;
        let alphabet = match kind {
            PairKind::Arpa => params.size,
            PairKind::Cpa => 2,
        };
        for (name, a) in [("first", &first), ("second", &second)] {
            if a.columns() != params.size || a.alphabet() != alphabet {
                return Err(Error::Shape(format!(
                    "{name} array is {} columns over {} symbols, expected {} over {}",
                    a.columns(),
                    a.alphabet(),
                    params.size,
                    alphabet
                )));
            }
        }
        let (r1, r2) = (first.row_count(), second.row_count());
        if r1 != r2 || r1 == 0 {
            return Err(Error::Shape(format!(
                "arrays must have the same positive row count, got {r1} and {r2}"
            )));
        }
        Ok(DesignPair { kind, params, first, second })
    }

    pub fn row_count(&self) -> u64 {
        self.first.row_count()
    }

    /// The row whose share in the first array is the pair's ratio.
    pub fn target(&self) -> Word {
        match self.kind {
            PairKind::Arpa => Word::identity(self.params.size),
            PairKind::Cpa => Word::ones(self.params.size),
        }
    }

    pub fn target_count(&self) -> u64 {
        self.first.multiplicity(&self.target())
    }

    pub fn verify(&self) -> Result<Verdict> {
        let Params { size, budget, strength } = self.params;
        match self.kind {
            PairKind::Arpa => check_arpa(self, size, budget, strength),
            PairKind::Cpa => check_cpa(self, size, budget, strength),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// First array contains the target row.
    TargetRow,
    /// Every row of the second array stays within the symbol or weight budget.
    RowBudget,
    /// All `k`-column projections agree.
    KEqual,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::TargetRow => "target-row",
            Condition::RowBudget => "row-budget",
            Condition::KEqual => "k-equal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionMismatch {
    pub columns: Vec<usize>,
    pub projected: Vec<Symbol>,
    pub first: u64,
    pub second: u64,
}

impl fmt::Display for ProjectionMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "columns {:?} value ({}) occurs {} times in the first array and {} in the second",
            self.columns,
            self.projected.iter().join(" "),
            self.first,
            self.second
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    MissingTarget { target: Word },
    OverBudget { row: Word, used: usize, budget: usize },
    Projection(ProjectionMismatch),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::MissingTarget { target } => write!(f, "row ({target}) is absent from the first array"),
            Witness::OverBudget { row, used, budget } => {
                write!(f, "row ({row}) uses {used} > {budget}")
            }
            Witness::Projection(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub condition: Condition,
    pub witness: Witness,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub failures: Vec<Failure>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, c: Condition) -> bool {
        self.failures.iter().any(|f| f.condition == c)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return f.write_str("pass");
        }
        let parts = self
            .failures
            .iter()
            .map(|x| format!("{}: {}", x.condition.name(), x.witness))
            .join("; ");
        write!(f, "fail({parts})")
    }
}

fn check_strength(k: usize, columns: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("strength k must be at least 1"));
    }
    if k > columns {
        return Err(invalid(format!("strength {k} exceeds the {columns} columns")));
    }
    Ok(())
}

/// First `k`-column projection on which `a` and `b` disagree, scanning column
/// sets in lexicographic order.
pub fn k_equal_violation(
    a: &DesignArray,
    b: &DesignArray,
    k: usize,
) -> Result<Option<ProjectionMismatch>> {
    if a.columns() != b.columns() {
        return Err(Error::Shape(format!(
            "arrays have {} and {} columns",
            a.columns(),
            b.columns()
        )));
    }
    check_strength(k, a.columns())?;
    let subsets: Vec<Vec<usize>> = (0..a.columns()).combinations(k).collect();
    Ok(subsets.par_iter().find_map_first(|cols| {
        let pa = a.projection(cols);
        let pb = b.projection(cols);
        pa.keys()
            .chain(pb.keys())
            .find(|v| pa.get(*v) != pb.get(*v))
            .map(|v| ProjectionMismatch {
                columns: cols.clone(),
                projected: v.clone(),
                first: pa.get(v).copied().unwrap_or(0),
                second: pb.get(v).copied().unwrap_or(0),
            })
    }))
}

pub fn check_k_equal(a: &DesignArray, b: &DesignArray, k: usize) -> Result<bool> {
    Ok(k_equal_violation(a, b, k)?.is_none())
}

fn check_pair(
    pair: &DesignPair,
    kind: PairKind,
    size: usize,
    budget: usize,
    k: usize,
) -> Result<Verdict> {
    if pair.kind != kind {
        return Err(Error::Shape(format!("expected a {kind} pair, got {}", pair.kind)));
    }
    Params::new(size, budget, k).validate()?;
    if pair.params.size != size {
        return Err(Error::Shape(format!(
            "pair has {} columns, checked against {size}",
            pair.params.size
        )));
    }
    let mut verdict = Verdict::default();
    let target = pair.target();
    if pair.first.multiplicity(&target) == 0 {
        verdict.failures.push(Failure {
            condition: Condition::TargetRow,
            witness: Witness::MissingTarget { target },
        });
    }
    let used = |w: &Word| match kind {
        PairKind::Arpa => w.distinct_symbols(),
        PairKind::Cpa => w.weight(),
    };
    if let Some((row, _)) = pair.second.iter().find(|(w, _)| used(w) > budget) {
        verdict.failures.push(Failure {
            condition: Condition::RowBudget,
            witness: Witness::OverBudget { row: row.clone(), used: used(row), budget },
        });
    }
    if let Some(m) = k_equal_violation(&pair.first, &pair.second, k)? {
        verdict.failures.push(Failure {
            condition: Condition::KEqual,
            witness: Witness::Projection(m),
        });
    }
    Ok(verdict)
}

/// Checks membership of an ARPA pair in the `(q, p)`-ARPAs of strength `k`.
pub fn check_arpa(pair: &DesignPair, q: usize, p: usize, k: usize) -> Result<Verdict> {
    check_pair(pair, PairKind::Arpa, q, p, k)
}

/// Checks membership of a CPA pair in the `(nu, d)`-CPAs of strength `k`.
pub fn check_cpa(pair: &DesignPair, nu: usize, d: usize, k: usize) -> Result<Verdict> {
    check_pair(pair, PairKind::Cpa, nu, d, k)
}

/// Share of the target row among the rows of the first array.
pub fn ratio(pair: &DesignPair) -> Rational {
    Rational::new(BigInt::from(pair.target_count()), BigInt::from(pair.row_count()))
}

pub fn pi_array(a: &DesignArray) -> DesignArray {
    let mut out = DesignArray::new(a.columns(), 2);
    for (w, m) in a.iter() {
        out.add(w.matches(), m).expect("match word has the right shape");
    }
    out
}

/// Replaces each ARPA row by its Boolean match word.
pub fn pi_pair(pair: &DesignPair) -> Result<DesignPair> {
    if pair.kind != PairKind::Arpa {
        return Err(Error::Shape("only ARPA pairs can be interpreted".into()));
    }
    DesignPair::new(PairKind::Cpa, pair.params, pi_array(&pair.first), pi_array(&pair.second))
}

/// True when the match words of `arpa` are exactly the rows of `cpa`.
pub fn interprets_as(arpa: &DesignPair, cpa: &DesignPair) -> Result<bool> {
    if arpa.kind != PairKind::Arpa || cpa.kind != PairKind::Cpa {
        return Err(Error::Shape("interprets_as takes an ARPA pair and a CPA pair".into()));
    }
    if arpa.params.size != cpa.params.size || arpa.row_count() != cpa.row_count() {
        return Ok(false);
    }
    Ok(pi_array(&arpa.first) == cpa.first && pi_array(&arpa.second) == cpa.second)
}

/// Upper bound `2 / (sum_{h=0}^{k} C(nu, h) C(nu - 1 - h, k - h) + 1)` on the
/// ratio of a CPA whose budget equals its strength.
pub fn tight_budget_bound(nu: usize, k: usize) -> Result<Rational> {
    if k == 0 || nu <= k {
        return Err(invalid(format!("need 1 <= k < nu, got nu = {nu}, k = {k}")));
    }
    let (n, k) = (nu as i64, k as i64);
    let s: BigInt = (0..=k).map(|h| binom(n, h) * binom(n - 1 - h, k - h)).sum();
    Ok(Rational::new(BigInt::from(2), s + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightEqualityReport {
    /// `sum_i C(i, h) C(nu - i, k - h) b_i` over the first array, per `h`.
    pub lhs: Vec<BigInt>,
    /// Same sum over the second array.
    pub rhs: Vec<BigInt>,
    /// `a_h - b_h - (-1)^(k-h) sum_{i>k} C(i, h) C(i - 1 - h, k - h) b_i`.
    pub residuals: Vec<BigInt>,
    /// Whether every row of the second array has weight at most `k`.
    pub within_budget: bool,
}

impl WeightEqualityReport {
    pub fn holds(&self) -> bool {
        self.within_budget && self.lhs == self.rhs && self.residuals.iter().all(Zero::is_zero)
    }
}

/// Weight-count identities that every CPA with budget equal to its strength
/// satisfies.
pub fn weight_equalities(pair: &DesignPair, nu: usize, k: usize) -> Result<WeightEqualityReport> {
    if pair.kind != PairKind::Cpa {
        return Err(Error::Shape("weight equalities apply to CPA pairs".into()));
    }
    if pair.params.size != nu {
        return Err(Error::Shape(format!("pair has {} columns, not {nu}", pair.params.size)));
    }
    if pair.params.budget != k {
        return Err(precondition(format!(
            "weight equalities need budget = strength, got d = {} and k = {k}",
            pair.params.budget
        )));
    }
    if k == 0 || k >= nu {
        return Err(invalid(format!("need 1 <= k < nu, got nu = {nu}, k = {k}")));
    }
    let b: Vec<BigInt> = pair.first.weight_profile().into_iter().map(BigInt::from).collect();
    let a: Vec<BigInt> = pair.second.weight_profile().into_iter().map(BigInt::from).collect();
    let (n, kk) = (nu as i64, k as i64);
    let weighted = |counts: &[BigInt], h: i64| -> BigInt {
        (0..=n)
            .map(|i| binom(i, h) * binom(n - i, kk - h) * &counts[i as usize])
            .sum()
    };
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let mut residuals = Vec::new();
    for h in 0..=kk {
        lhs.push(weighted(&b, h));
        rhs.push(weighted(&a, h));
        let tail: BigInt = (kk + 1..=n)
            .map(|i| binom(i, h) * binom(i - 1 - h, kk - h) * &b[i as usize])
            .sum();
        residuals.push(&a[h as usize] - &b[h as usize] - sign(kk - h) * tail);
    }
    let within_budget = a.iter().skip(k + 1).all(Zero::is_zero);
    Ok(WeightEqualityReport { lhs, rhs, residuals, within_budget })
}

/// Lifts a pair over `q - p + k` symbols with budget `k` to `(q, p)` by
/// appending the constant suffix `q-p+k, ..., q-1` to every row.
pub fn extend_arpa(pair: &DesignPair, q: usize, p: usize, k: usize) -> Result<DesignPair> {
    Params::new(q, p, k).validate()?;
    let base = q - p + k;
    let verdict = check_arpa(pair, base, k, k)?;
    if !verdict.passed() {
        return Err(precondition(format!(
            "input is not an ARPA with parameters ({base}, {k}, {k}): {verdict}"
        )));
    }
    let suffix: Vec<Symbol> = (base as Symbol..q as Symbol).collect();
    let extend = |a: &DesignArray| -> Result<DesignArray> {
        DesignArray::from_rows(
            q,
            q,
            a.iter().map(|(w, m)| {
                let mut s = w.symbols().to_vec();
                s.extend_from_slice(&suffix);
                (Word::new(s), m)
            }),
        )
    };
    DesignPair::new(PairKind::Arpa, Params::new(q, p, k), extend(&pair.first)?, extend(&pair.second)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use crate::fixtures;

    #[test]
    fn k_equal_on_sample_cpa() {
        let t = fixtures::sample_cpa_4_3_2();
        assert!(check_k_equal(&t.first, &t.second, 2).unwrap());
        let w = k_equal_violation(&t.first, &t.second, 3).unwrap().unwrap();
        assert_ne!(w.first, w.second);
        assert!(check_k_equal(&t.first, &t.second, 0).is_err());
        assert!(check_k_equal(&t.first, &t.second, 5).is_err());
    }

    #[test]
    fn cpa_and_arpa_checks() {
        let c = fixtures::sample_cpa_5_4_3();
        assert!(check_cpa(&c, 5, 4, 3).unwrap().passed());
        let v = check_cpa(&c, 5, 3, 3).unwrap();
        assert_eq!(v.failures.len(), 1);
        assert!(v.failed(Condition::RowBudget));

        let a = fixtures::sample_arpa_4_3_2();
        assert!(check_arpa(&a, 4, 3, 2).unwrap().passed());
        let v = check_arpa(&a, 4, 2, 2).unwrap();
        assert_eq!(v.failures.len(), 1);
        assert!(v.failed(Condition::RowBudget));
        assert!(check_cpa(&a, 4, 3, 2).is_err());
        assert!(check_arpa(&a, 4, 3, 0).is_err());
    }

    #[test]
    fn missing_target_is_reported() {
        let mut first = DesignArray::new(2, 2);
        first.add(Word::new(vec![0, 0]), 1).unwrap();
        let mut second = DesignArray::new(2, 2);
        second.add(Word::new(vec![0, 0]), 1).unwrap();
        let p = DesignPair::new(PairKind::Cpa, Params::new(2, 1, 1), first, second).unwrap();
        let v = p.verify().unwrap();
        assert!(v.failed(Condition::TargetRow));
        assert!(!v.failed(Condition::KEqual));
    }

    #[test]
    fn ratios() {
        assert_eq!(ratio(&fixtures::sample_cpa_5_4_3()), rat(1, 5));
        assert_eq!(ratio(&fixtures::sample_arpa_5_3_2()), rat(1, 6));
    }

    #[test]
    fn match_words() {
        let w = |v: &[Symbol]| Word::new(v.to_vec());
        assert_eq!(w(&[0, 1, 0, 2]).matches(), w(&[1, 1, 0, 0]));
        assert_eq!(w(&[3, 0, 0, 3]).matches(), w(&[0, 0, 0, 1]));
        assert_eq!(Word::identity(4).matches(), Word::ones(4));
    }

    #[test]
    fn interpretations() {
        let a = fixtures::sample_arpa_4_3_2();
        let c = fixtures::sample_cpa_4_3_2();
        assert!(interprets_as(&a, &c).unwrap());
        assert!(!interprets_as(&a, &fixtures::sample_cpa_5_3_2()).unwrap());
        assert!(interprets_as(&c, &a).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(tight_budget_bound(6, 2).unwrap(), rat(1, 25));
        assert_eq!(tight_budget_bound(5, 3).unwrap(), rat(1, 25));
        assert_eq!(tight_budget_bound(5, 2).unwrap(), rat(1, 16));
        assert!(tight_budget_bound(3, 3).is_err());
        assert!(tight_budget_bound(3, 0).is_err());
    }

    #[test]
    fn weight_equalities_need_budget_equal_strength() {
        let c = fixtures::sample_cpa_5_4_3();
        assert!(weight_equalities(&c, 5, 3).is_err());
    }

    #[test]
    fn word_parsing() {
        let w: Word = "0 1 2 3".parse().unwrap();
        assert_eq!(w, Word::identity(4));
        assert!("0 x".parse::<Word>().is_err());
    }
}
