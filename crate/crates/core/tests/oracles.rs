//! Independent reimplementations checked against the library.

use std::collections::BTreeMap;

use arpa_forge::designs::{
    check_k_equal, interprets_as, pi_pair, ratio, DesignArray, DesignPair, PairKind, Word,
};
use arpa_forge::fixtures;
use arpa_forge::exactmath::{int, Rational};
use arpa_forge::lift::construct_arpa;
use arpa_forge::lp::{basic_solution, enumerate_bases, lp_matrix, optimal_cpa, Var};
use arpa_forge::regular::materialize;
use itertools::Itertools;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Flattens an array into a row list and compares sorted projections.
fn k_equal_naive(a: &DesignArray, b: &DesignArray, k: usize) -> bool {
    let rows = |x: &DesignArray| -> Vec<Vec<u16>> {
        x.iter()
            .flat_map(|(w, m)| std::iter::repeat_n(w.symbols().to_vec(), m as usize))
            .collect()
    };
    let (ra, rb) = (rows(a), rows(b));
    (0..a.columns()).combinations(k).all(|cols| {
        let proj = |rs: &[Vec<u16>]| -> Vec<Vec<u16>> {
            let mut v: Vec<Vec<u16>> =
                rs.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
            v.sort();
            v
        };
        proj(&ra) == proj(&rb)
    })
}

fn random_array(rng: &mut StdRng, cols: usize, alphabet: usize, rows: usize) -> DesignArray {
    let mut a = DesignArray::new(cols, alphabet);
    for _ in 0..rows {
        let w = Word::new((0..cols).map(|_| rng.gen_range(0..alphabet as u16)).collect());
        a.add(w, 1).unwrap();
    }
    a
}

#[test]
fn k_equal_matches_naive_on_random_arrays() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..400 {
        let cols = rng.gen_range(2..=5);
        let alphabet = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=6);
        let a = random_array(&mut rng, cols, alphabet, n);
        // Half the time, permute entries of a within columns so low strengths agree.
        let b = if rng.gen_bool(0.5) {
            random_array(&mut rng, cols, alphabet, n)
        } else {
            let mut rows: Vec<Vec<u16>> = a
                .iter()
                .flat_map(|(w, m)| std::iter::repeat_n(w.symbols().to_vec(), m as usize))
                .collect();
            let c = rng.gen_range(0..cols);
            let col: Vec<u16> = rows.iter().map(|r| r[c]).collect();
            for (i, r) in rows.iter_mut().enumerate() {
                r[c] = col[(i + 1) % col.len()];
            }
            let mut b = DesignArray::new(cols, alphabet);
            for r in rows {
                b.add(Word::new(r), 1).unwrap();
            }
            b
        };
        let mut prev = true;
        for k in 1..=cols {
            let got = check_k_equal(&a, &b, k).unwrap();
            assert_eq!(got, k_equal_naive(&a, &b, k));
            assert_eq!(got, check_k_equal(&b, &a, k).unwrap());
            // Agreement at strength k implies agreement at every lower strength.
            assert!(prev || !got);
            prev = got;
        }
    }
}

/// Gauss-Jordan on a square rational system; `None` when singular.
fn solve(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = Rational::one() / &m[col][col];
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        rhs[col] *= &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some(rhs)
}

#[test]
fn closed_form_basic_solutions_match_elimination() {
    for nu in 2..=7 {
        for d in 1..nu {
            for k in 1..=d {
                let m = lp_matrix(nu, d, k).unwrap();
                let rhs: Vec<Rational> = m.rhs.iter().cloned().map(int).collect();
                for b in enumerate_bases(nu, d, k).unwrap() {
                    let vars = b.vars();
                    let cols: Vec<Vec<Rational>> = vars.iter().map(|&v| m.column(v)).collect();
                    let square: Vec<Vec<Rational>> = (0..=k)
                        .map(|h| cols.iter().map(|c| c[h].clone()).collect())
                        .collect();
                    let sol = solve(square, rhs.clone()).expect("bases are nonsingular");
                    let want: BTreeMap<Var, Rational> = vars.into_iter().zip(sol).collect();
                    assert_eq!(basic_solution(&b, nu).unwrap(), want, "({nu},{d},{k}) {b}");
                }
            }
        }
    }
}

fn arpa_by_naive_check(pair: &DesignPair) -> bool {
    let p = pair.params;
    pair.first.multiplicity(&Word::identity(p.size)) > 0
        && pair.second.iter().all(|(w, _)| w.distinct_symbols() <= p.budget)
        && k_equal_naive(&pair.first, &pair.second, p.strength)
}

#[test]
fn constructions_pass_naive_checks() {
    for nu in 2..=5 {
        for d in 1..nu {
            for k in 1..=d {
                let cpa = materialize(&optimal_cpa(nu, d, k).unwrap()).unwrap();
                assert!(k_equal_naive(&cpa.first, &cpa.second, k), "cpa ({nu},{d},{k})");
                assert!(cpa.second.iter().all(|(w, _)| w.weight() <= d));
                let c = construct_arpa(nu, d, k).unwrap();
                assert!(arpa_by_naive_check(&c.arpa), "arpa ({nu},{d},{k})");
                // Match words, computed here from scratch, reproduce the CPA.
                let naive_pi = |a: &DesignArray| -> BTreeMap<Vec<u16>, u64> {
                    let mut out = BTreeMap::new();
                    for (w, m) in a.iter() {
                        let b: Vec<u16> =
                            w.symbols().iter().enumerate().map(|(j, &s)| u16::from(s as usize == j)).collect();
                        *out.entry(b).or_insert(0) += m;
                    }
                    out
                };
                let plain = |a: &DesignArray| -> BTreeMap<Vec<u16>, u64> {
                    a.iter().map(|(w, m)| (w.symbols().to_vec(), m)).collect()
                };
                let pi = pi_pair(&c.arpa).unwrap();
                assert_eq!(naive_pi(&c.arpa.first), plain(&pi.first));
                assert_eq!(naive_pi(&c.arpa.second), plain(&pi.second));
                assert_eq!(naive_pi(&c.arpa.first), plain(&c.scaled_cpa.first));
                assert_eq!(naive_pi(&c.arpa.second), plain(&c.scaled_cpa.second));
            }
        }
    }
}

#[test]
fn shipped_arpas_interpret_as_their_projection() {
    for f in fixtures::all() {
        if f.pair.kind == PairKind::Arpa {
            let pi = pi_pair(&f.pair).unwrap();
            assert!(interprets_as(&f.pair, &pi).unwrap(), "{}", f.name);
            assert_eq!(ratio(&pi), ratio(&f.pair), "{}", f.name);
        }
    }
}
