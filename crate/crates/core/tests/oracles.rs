//! The library checked against deliberately naive reimplementations.

use std::collections::{HashMap, HashSet};

use ducci_core::cycles::{in_cycle, orbit_census, DEFAULT_GUARD};
use ducci_core::number_theory::{binomial_mod, is_prime, multiplicative_order, wieferich_scan};
use ducci_core::{PeriodEngine, ResidueTuple, Strategy};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn naive_step(a: &[u64], m: u64) -> Vec<u64> {
    let n = a.len();
    (0..n).map(|i| (a[i] + a[(i + 1) % n]) % m).collect()
}

/// Stores every state until one repeats.
fn naive_orbit(start: Vec<u64>, m: u64) -> (u64, u64) {
    let mut seen = HashMap::new();
    let mut cur = start;
    let mut i = 0u64;
    loop {
        if let Some(&first) = seen.get(&cur) {
            return (first, i - first);
        }
        seen.insert(cur.clone(), i);
        cur = naive_step(&cur, m);
        i += 1;
    }
}

fn basic(n: usize) -> Vec<u64> {
    let mut e = vec![0; n];
    e[0] = 1;
    e
}

#[test]
fn periods_match_stored_orbit() {
    let engine = PeriodEngine::new();
    for m in 2..=24u64 {
        for n in 1..=8usize {
            let (pre, period) = naive_orbit(basic(n), m);
            if pre + period > 200_000 {
                continue;
            }
            let brute = engine.period(m, n, Strategy::Brute).unwrap();
            assert_eq!((brute.period, brute.pre_period), (period, Some(pre)), "m={m} n={n}");
            let structural = engine.period(m, n, Strategy::Structural).unwrap();
            assert_eq!(structural.period, period, "m={m} n={n}");
        }
    }
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], m: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut c = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                c[i][j] = (c[i][j] + a[i][k] * b[k][j]) % m;
            }
        }
    }
    c
}

#[test]
fn advance_matches_matrix_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..60 {
        let m = rng.gen_range(2..40u64);
        let n = rng.gen_range(1..7usize);
        let k = rng.gen_range(0..300u64);
        let mut t = vec![vec![0u64; n]; n];
        for i in 0..n {
            t[i][i] = (t[i][i] + 1) % m;
            t[i][(i + 1) % n] = (t[i][(i + 1) % n] + 1) % m;
        }
        let mut power = vec![vec![0u64; n]; n];
        for (i, row) in power.iter_mut().enumerate() {
            row[i] = 1 % m;
        }
        for _ in 0..k {
            power = mat_mul(&power, &t, m);
        }
        let a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let expected: Vec<u64> =
            (0..n).map(|i| (0..n).map(|j| power[i][j] * a[j]).sum::<u64>() % m).collect();
        let tuple = ResidueTuple::new(m, a).unwrap();
        assert_eq!(tuple.advance(k).components(), &expected[..], "m={m} n={n} k={k}");
        assert_eq!(tuple.advance_by_polynomial(k).components(), &expected[..]);
        assert_eq!(tuple.advance_by_binomial_sum(k).components(), &expected[..]);
    }
}

#[test]
fn binomials_match_pascal_triangle() {
    for modulus in [2u64, 8, 9, 27, 49, 125, 1000] {
        let mut row = vec![1u64];
        for n in 0..=120u64 {
            for (k, &v) in row.iter().enumerate() {
                assert_eq!(binomial_mod(n, k as u64, modulus), Ok(v % modulus), "C({n},{k}) mod {modulus}");
            }
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = (row[k - 1] + row[k]) % modulus;
            }
            row = next;
        }
    }
}

#[test]
fn wieferich_matches_bigint_power() {
    let two = BigUint::from(2u32);
    let expected: Vec<u64> = (3..100_000u64)
        .filter(|&p| is_prime(p))
        .filter(|&p| two.modpow(&BigUint::from(p - 1), &BigUint::from(p * p)) == BigUint::from(1u32))
        .collect();
    assert_eq!(expected, vec![1093, 3511]);
    assert_eq!(wieferich_scan(100_000), expected);
}

#[test]
fn order_matches_naive_loop() {
    for m in 3..2_000u64 {
        if m % 2 == 0 {
            continue;
        }
        let mut x = 2 % m;
        let mut k = 1;
        while x != 1 {
            x = x * 2 % m;
            k += 1;
        }
        assert_eq!(multiplicative_order(2, m), Ok(k), "m={m}");
    }
}

/// `a` is on a cycle iff it comes back to itself.
fn naive_in_cycle(a: &[u64], m: u64) -> bool {
    let limit = (m as usize).pow(a.len() as u32);
    let mut cur = naive_step(a, m);
    for _ in 0..limit {
        if cur == a {
            return true;
        }
        cur = naive_step(&cur, m);
    }
    false
}

fn all_tuples(m: u64, n: usize) -> Vec<Vec<u64>> {
    let total = (m as usize).pow(n as u32);
    (0..total)
        .map(|mut i| {
            let mut v = vec![0u64; n];
            for slot in v.iter_mut().rev() {
                *slot = (i % m as usize) as u64;
                i /= m as usize;
            }
            v
        })
        .collect()
}

#[test]
fn membership_matches_return_test() {
    for (m, n) in [(2u64, 6usize), (3, 4), (3, 6), (4, 4), (5, 4), (6, 3), (6, 4), (9, 3), (10, 3), (12, 2)] {
        for a in all_tuples(m, n) {
            let expected = naive_in_cycle(&a, m);
            let tuple = ResidueTuple::new(m, a).unwrap();
            assert_eq!(in_cycle(&tuple).unwrap().in_cycle, expected, "{tuple}");
        }
    }
}

#[test]
fn census_matches_orbit_walk() {
    for (m, n) in [(2u64, 5usize), (3, 4), (4, 3), (5, 3), (6, 4), (7, 3)] {
        let mut seen = HashSet::new();
        let mut census = std::collections::BTreeMap::new();
        for a in all_tuples(m, n) {
            if seen.contains(&a) || !naive_in_cycle(&a, m) {
                continue;
            }
            let mut size = 0u64;
            let mut cur = a.clone();
            loop {
                seen.insert(cur.clone());
                size += 1;
                cur = naive_step(&cur, m);
                if cur == a {
                    break;
                }
            }
            *census.entry(size).or_insert(0u64) += 1;
        }
        assert_eq!(orbit_census(m, n, DEFAULT_GUARD).unwrap().census, census, "m={m} n={n}");
    }
}
