//! Seeded randomized checks of the identities the constructions rely on.
//!
//! Each suite draws its own cases from a [`StdRng`] and reports how many it
//! ran and which failed. The CLI `identities` verb and the acceptance harness
//! both drive these.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::designs::{ratio, tight_budget_bound, weight_equalities};
use crate::exactmath::{
    binom, binom_q, expect_integer, h_lagrange, int, lcm_of_denominators, nullspace, s_sum,
    to_u64, u_closed_form, u_closed_form_applies, u_sum, Rational,
};
use crate::lift::f_z_raw;
use crate::lp::{
    basic_solution, enumerate_bases, is_feasible_base, is_feasible_by_sign, lp_matrix, Var,
};
use crate::regular::{materialize, symmetrize, RepVec};
use crate::Result;

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{status} {} ({} cases", self.name, self.cases)?;
        if !self.passed() {
            write!(f, ", first failure: {}", self.failures[0])?;
        }
        write!(f, ")")
    }
}

fn random_set(rng: &mut StdRng, pool: &[i64], n: usize) -> Vec<i64> {
    pool.choose_multiple(rng, n).copied().collect()
}

/// Interpolation sums over nodes in `-10..=10` are 1 with one spare node and
/// 0 with more.
pub fn lagrange(rng: &mut StdRng, iters: usize) -> SuiteResult {
    let mut out = SuiteResult::new("lagrange");
    let pool: Vec<i64> = (-10..=10).collect();
    for _ in 0..iters {
        let nb = rng.gen_range(1..=8);
        let na = rng.gen_range(0..nb);
        let b = random_set(rng, &pool, nb);
        let a = if rng.gen_bool(0.5) {
            b[..na].to_vec()
        } else {
            (0..na).map(|_| rng.gen_range(-10..=10)).collect()
        };
        let want = int(i64::from(nb == na + 1));
        let got = h_lagrange(&a, &b);
        out.record(matches!(&got, Ok(v) if *v == want), || {
            format!("A={a:?} B={b:?} gave {got:?}, want {want}")
        });
    }
    out
}

pub fn s_identity(rng: &mut StdRng, iters: usize) -> SuiteResult {
    let mut out = SuiteResult::new("alternating-binomial-sum");
    for _ in 0..iters {
        let b = rng.gen_range(0..=30);
        let a = rng.gen_range(0..=b);
        let c = rng.gen_range(0..=b);
        let got = s_sum(a, b, c);
        let want = binom(b - a, c);
        out.record(matches!(&got, Ok(v) if *v == want), || {
            format!("S({a},{b},{c}) = {got:?}, want {want}")
        });
    }
    out
}

pub fn u_identity(rng: &mut StdRng, iters: usize) -> SuiteResult {
    let mut out = SuiteResult::new("triple-binomial-sum");
    while out.cases < iters {
        let d = rng.gen_range(1..=25);
        let a = rng.gen_range(1..=d);
        let c = rng.gen_range(0..a);
        let e = rng.gen_range(d - c..=d);
        if !u_closed_form_applies(a, a - 1, c, d, e) {
            continue;
        }
        let got = u_sum(a, a - 1, c, d, e);
        let want = u_closed_form(a, c, d, e);
        out.record(matches!(&got, Ok(v) if *v == want), || {
            format!("U({a},{},{c},{d},{e}) = {got:?}, want {want}", a - 1)
        });
    }
    out
}

/// A random balanced integer vector over weights `0..=r` and `nu` with zeros
/// strictly between `r` and `nu`. Returns `None` when the draw is all zero.
pub fn random_balanced_z(rng: &mut StdRng, nu: usize, k: usize, r: usize) -> Option<Vec<Rational>> {
    let idx: Vec<usize> = (0..=r).chain([nu]).collect();
    let rows: Vec<Vec<Rational>> = (0..=k as i64)
        .map(|h| idx.iter().map(|&i| binom_q((nu - k) as i64, i as i64 - h)).collect())
        .collect();
    let basis = nullspace(&rows, idx.len());
    let mut v = vec![Rational::zero(); idx.len()];
    for b in &basis {
        let w = int(rng.gen_range(-4..=4));
        for (x, y) in v.iter_mut().zip(b) {
            *x += &w * y;
        }
    }
    if v.iter().all(Zero::is_zero) {
        return None;
    }
    let scale = int(lcm_of_denominators(&v));
    let mut z = vec![Rational::zero(); nu + 1];
    for (&i, x) in idx.iter().zip(v) {
        z[i] = x * &scale;
    }
    Some(z)
}

/// `f_z` vanishes below the strength and satisfies its Pascal-type
/// recurrence, for random balanced `z` with `nu <= 8`.
pub fn f_z_properties(rng: &mut StdRng, iters: usize) -> SuiteResult {
    let mut out = SuiteResult::new("f_z-vanishing-and-recurrence");
    while out.cases < iters {
        let nu = rng.gen_range(2..=8);
        let k = rng.gen_range(1..nu);
        let r = rng.gen_range(k..nu);
        let Some(z) = random_balanced_z(rng, nu, k, r) else { continue };
        let mut ok = true;
        let mut bad = String::new();
        for c in 0..=nu - r {
            for h in 0..k {
                for lam in 0..k - h {
                    let v = f_z_raw(&z, nu, r, h, lam, c);
                    if !v.is_zero() {
                        ok = false;
                        bad = format!("f({h},{lam},{c}) = {v}");
                    }
                }
            }
            for h in 0..=r {
                for lam in 1..=r - h {
                    let lhs = f_z_raw(&z, nu, r, h, lam, c);
                    let rhs = f_z_raw(&z, nu, r, h, lam - 1, c) - f_z_raw(&z, nu, r, h + 1, lam - 1, c);
                    if lhs != rhs {
                        ok = false;
                        bad = format!("recurrence at ({h},{lam},{c})");
                    }
                }
            }
        }
        out.record(ok, || format!("nu={nu} k={k} r={r} z={z:?}: {bad}"));
    }
    out
}

/// Closed-form basic solutions satisfy the constraints, and the alternation
/// rule agrees with the sign of the solution.
pub fn lp_bases(rng: &mut StdRng, iters: usize) -> SuiteResult {
    let mut out = SuiteResult::new("basic-solutions");
    while out.cases < iters {
        let nu = rng.gen_range(2..=9);
        let d = rng.gen_range(1..nu);
        let k = rng.gen_range(1..=d);
        let bases = enumerate_bases(nu, d, k).expect("valid parameters");
        let b = bases.choose(rng).expect("at least one base");
        let m = lp_matrix(nu, d, k).expect("valid parameters");
        let sol = basic_solution(b, nu).expect("valid base");
        let residual_ok = m.residuals(&sol).iter().all(Zero::is_zero);
        let feasible_ok = is_feasible_base(b, k) == is_feasible_by_sign(b, nu).expect("valid base");
        out.record(residual_ok && feasible_ok, || {
            format!("({nu},{d},{k}) base {b}: residuals ok {residual_ok}, feasibility agrees {feasible_ok}")
        });
    }
    out
}

/// A random regular CPA with budget equal to strength, built as a positive
/// combination of feasible basic solutions.
pub fn random_tight_cpa(rng: &mut StdRng, nu: usize, k: usize) -> Result<RepVec> {
    let feasible: Vec<_> = enumerate_bases(nu, k, k)?
        .into_iter()
        .filter(|b| is_feasible_base(b, k))
        .collect();
    let n = rng.gen_range(1..=3.min(feasible.len()));
    let chosen: BTreeSet<usize> = (0..n).map(|_| rng.gen_range(0..feasible.len())).collect();
    let mut y = vec![Rational::zero(); nu + 1];
    let mut x = vec![Rational::zero(); k + 1];
    for &i in &chosen {
        let w = int(rng.gen_range(1..=5));
        y[nu] += &w;
        for (v, val) in basic_solution(&feasible[i], nu)? {
            match v {
                Var::Y(j) => y[j] += &w * val,
                Var::X(j) => x[j] += &w * val,
            }
        }
    }
    let scale = int(lcm_of_denominators(y.iter().chain(&x)));
    let to_counts = |v: &[Rational]| -> Result<Vec<u64>> {
        v.iter().map(|q| to_u64(&expect_integer(&(q * &scale))?)).collect()
    };
    RepVec::new(nu, k, k, to_counts(&y)?, to_counts(&x)?)
}

/// No CPA with budget equal to strength beats the closed bound, and every
/// such CPA satisfies the weight-count equalities.
pub fn tight_bound(rng: &mut StdRng, iters: usize) -> SuiteResult {
    let mut out = SuiteResult::new("tight-budget-bound");
    for _ in 0..iters {
        let nu = rng.gen_range(2..=8);
        let k = rng.gen_range(1..nu);
        let res = (|| -> Result<(bool, String)> {
            let v = random_tight_cpa(rng, nu, k)?;
            let bound = tight_budget_bound(nu, k)?;
            let pair = materialize(&v)?;
            let eq = weight_equalities(&pair, nu, k)?.holds();
            let r = ratio(&pair);
            let sym = symmetrize(&pair, true)?;
            let sr = ratio(&sym);
            let ok = eq && r <= bound && sr == r;
            Ok((ok, format!("nu={nu} k={k} y={:?} x={:?} ratio {r} bound {bound} eq {eq}", v.y, v.x)))
        })();
        match res {
            Ok((ok, msg)) => out.record(ok, || msg),
            Err(e) => out.record(false, || format!("nu={nu} k={k}: {e}")),
        }
    }
    out
}

pub fn run_all(seed: u64, iters: usize) -> Vec<SuiteResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    vec![
        lagrange(&mut rng, iters),
        s_identity(&mut rng, iters),
        u_identity(&mut rng, iters),
        f_z_properties(&mut rng, iters),
        lp_bases(&mut rng, iters),
        tight_bound(&mut rng, iters),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_small() {
        for s in run_all(7, 60) {
            assert!(s.passed(), "{s}");
            assert_eq!(s.cases, 60);
        }
    }
}
