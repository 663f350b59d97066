#![allow(dead_code)]

use dt4_core::eqalg::vars::{s, sp};
use dt4_core::eqalg::{EqScalar, LinearForm, Var, WeightCharacter};
use dt4_core::partitions::Partition;
use num_bigint::BigInt;
use num_traits::One;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

pub fn rng() -> TestRunner {
    TestRunner::deterministic()
}

fn pick(rng: &mut TestRunner, lo: i64, hi: i64) -> i64 {
    (lo..=hi).new_tree(rng).unwrap().current()
}

fn random_factor(rng: &mut TestRunner) -> EqScalar {
    let vars = [sp(), s()];
    let mut f = EqScalar::from(pick(rng, -4, 4));
    for v in vars {
        f = &f + &EqScalar::var(v).scale_int(&pick(rng, -3, 3).into());
    }
    if f.is_zero() {
        EqScalar::from(1)
    } else {
        f
    }
}

/// A product of random linear factors in `s′, s` with a random power of
/// `s′` in front, possibly inverted.
pub fn random_rational(rng: &mut TestRunner) -> EqScalar {
    let mut x = EqScalar::var(sp()).pow(pick(rng, -4, 2) as i32).unwrap();
    for _ in 0..pick(rng, 1, 4) {
        let f = random_factor(rng);
        let e = pick(rng, -2, 2) as i32;
        if f.numerator().contains_var(sp()) && e < 0 && f.substitute(sp(), &EqScalar::zero()).unwrap().is_zero() {
            continue;
        }
        x = &x * &f.pow(e).unwrap();
    }
    x
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// `Res_{v=0}` by Taylor's formula: `(x v^p)^{(p-1)}(0) / (p-1)!` with `p`
/// the pole order read off the denominator.
pub fn residue_by_derivatives(x: &EqScalar, v: Var) -> EqScalar {
    if x.is_zero() {
        return EqScalar::zero();
    }
    let p = x.denominator().valuation_in(v) as i64 - x.numerator().valuation_in(v) as i64;
    if p <= 0 {
        return EqScalar::zero();
    }
    let mut g = x * &EqScalar::var(v).pow(p as i32).unwrap();
    for _ in 0..p - 1 {
        g = g.derivative(v);
    }
    let at0 = g.substitute(v, &EqScalar::zero()).unwrap();
    &at0 * &EqScalar::from_int(factorial((p - 1) as u32)).inv().unwrap()
}

fn rank_i128(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            let (a, b) = (rows[r][c], rows[i][c]);
            for j in 0..cols {
                rows[i][j] = a * rows[i][j] - b * rows[r][j];
            }
        }
        r += 1;
    }
    r
}

/// `Hom(I_λ, R/I_λ)` for `R = C[x, y]`, weight by weight.
pub fn hom_oracle(lambda: &Partition, w1: LinearForm, w2: LinearForm) -> WeightCharacter {
    let parts = lambda.parts();
    let len = parts.len() as i64;
    let row = |i: i64| if i < len { parts[i as usize] as i64 } else { 0 };
    let is_box = |i: i64, j: i64| i >= 0 && j >= 0 && j < row(i);
    let gens: Vec<(i64, i64)> = (0..=len).map(|i| (i, row(i))).collect();
    let n = lambda.size() as i64;
    let mut ch = WeightCharacter::new();
    for a in -n - 1..=n + 1 {
        for b in -n - 1..=n + 1 {
            let alive: Vec<bool> = gens.iter().map(|&(i, j)| is_box(i + a, j + b)).collect();
            let vars: Vec<usize> = (0..gens.len()).filter(|&k| alive[k]).collect();
            if vars.is_empty() {
                continue;
            }
            let mut rows = Vec::new();
            for p in 0..gens.len() {
                for q in p + 1..gens.len() {
                    let l = (gens[p].0.max(gens[q].0), gens[p].1.max(gens[q].1));
                    if !is_box(l.0 + a, l.1 + b) {
                        continue;
                    }
                    let mut r = vec![0i128; vars.len()];
                    for (k, &v) in vars.iter().enumerate() {
                        if v == p {
                            r[k] += 1;
                        }
                        if v == q {
                            r[k] -= 1;
                        }
                    }
                    rows.push(r);
                }
            }
            let dim = vars.len() - rank_i128(rows);
            ch.add_weight(-(w1.scale(a) + w2.scale(b)), dim as i64);
        }
    }
    ch
}

