//! Integer arithmetic: factorization, valuations, multiplicative orders and
//! Wieferich primes.

mod binomial;

pub use binomial::{
    binomial_mod, exact_binomial, verify_binomial_lemmas, Lemma, LemmaInstance, LemmaReport,
    LEMMA_ROW_LIMIT,
};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial division runs up to this bound before switching to Pollard rho.
const TRIAL_BOUND: u64 = 1 << 16;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    result
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of the odd composite `n` (Brent's variant of rho).
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// `m = prod p_i^{e_i}` with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerFactorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl PrimePowerFactorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// Euler's totient.
    pub fn totient(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| (p - 1) * p.pow(e - 1)).product()
    }

    /// Carmichael's function: the exponent of the unit group.
    pub fn carmichael(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| {
                if p == 2 && e >= 3 {
                    1 << (e - 2)
                } else {
                    (p - 1) * p.pow(e - 1)
                }
            })
            .fold(1u64, |acc, l| acc.lcm(&l))
    }

    /// Prime powers `p^e`, one per prime.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, e)| p.pow(e))
    }
}

/// Unique prime factorization of `m >= 2`: wheel trial division by small
/// primes, then Pollard rho on whatever cofactor remains.
pub fn factorize(m: u64) -> Result<PrimePowerFactorization> {
    if m < 2 {
        return Err(Error::TooSmall(m));
    }
    let mut primes = Vec::new();
    let mut rest = m;
    for p in [2u64, 3, 5] {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
    }
    // 2*3*5 wheel
    const GAPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut gap = 0;
    while d <= TRIAL_BOUND && d * d <= rest {
        while rest.is_multiple_of(d) {
            primes.push(d);
            rest /= d;
        }
        d += GAPS[gap];
        gap = (gap + 1) % GAPS.len();
    }
    if rest > 1 {
        split_into(rest, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(PrimePowerFactorization { value: m, factors })
}

/// `v_p(x)`, the exponent of `p` in `x`.
pub fn p_adic_valuation(x: u64, p: u64) -> Result<u32> {
    if x == 0 {
        return Err(Error::ZeroValuation);
    }
    if p < 2 {
        return Err(Error::TooSmall(p));
    }
    let mut v = 0;
    let mut x = x;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    Ok(v)
}

/// `s_p(x)`, the digit sum of `x` in base `p`.
pub fn digit_sum_base_p(mut x: u64, p: u64) -> u64 {
    assert!(p >= 2, "base must be at least 2");
    let mut s = 0;
    while x > 0 {
        s += x % p;
        x /= p;
    }
    s
}

/// `v_p(x!)` by Legendre's formula `(x - s_p(x)) / (p - 1)`.
pub fn factorial_valuation(x: u64, p: u64) -> u64 {
    (x - digit_sum_base_p(x, p)) / (p - 1)
}

fn check_unit(a: u64, modulus: u64) -> Result<u64> {
    if modulus < 2 {
        return Err(Error::TooSmall(modulus));
    }
    let a = a % modulus;
    if a.gcd(&modulus) != 1 {
        return Err(Error::NotCoprime { a, modulus });
    }
    Ok(a)
}

/// Least `k >= 1` with `a^k = 1 (mod modulus)`, by descending from the
/// Carmichael exponent through its prime divisors.
pub fn multiplicative_order(a: u64, modulus: u64) -> Result<u64> {
    let a = check_unit(a, modulus)?;
    let lambda = factorize(modulus)?.carmichael();
    if lambda == 1 {
        return Ok(1);
    }
    let mut order = lambda;
    for &(q, _) in factorize(lambda)?.factors() {
        while order % q == 0 && pow_mod(a, order / q, modulus) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

/// Least `k >= 1` with `a^k = 1 (mod modulus)`, by repeated multiplication.
pub fn multiplicative_order_by_stepping(a: u64, modulus: u64) -> Result<u64> {
    let a = check_unit(a, modulus)?;
    let mut x = a;
    let mut k = 1;
    while x != 1 % modulus {
        x = mul_mod(x, a, modulus);
        k += 1;
    }
    Ok(k)
}

/// `O(m)`, the order of 2 modulo an odd `m > 2`.
pub fn order_of_two(m: u64) -> Result<u64> {
    if m < 3 {
        return Err(Error::TooSmall(m));
    }
    multiplicative_order(2, m)
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        Err(Error::NotOddPrime(p))
    } else {
        Ok(())
    }
}

/// `2^{p-1} = 1 (mod p^2)` for an odd prime `p`.
pub fn is_wieferich(p: u64) -> Result<bool> {
    check_odd_prime(p)?;
    let sq = (p as u128) * (p as u128);
    let sq = u64::try_from(sq).map_err(|_| Error::Overflow("p^2"))?;
    Ok(pow_mod(2, p - 1, sq) == 1)
}

/// The order criterion: `p` is Wieferich iff `O(p) = O(p^2)`.
pub fn is_wieferich_by_order(p: u64) -> Result<bool> {
    check_odd_prime(p)?;
    let sq = p.checked_mul(p).ok_or(Error::Overflow("p^2"))?;
    Ok(order_of_two(p)? == order_of_two(sq)?)
}

/// Primes below `limit` by the sieve of Eratosthenes.
pub fn primes_below(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n];
    let mut i = 2;
    while i * i < n {
        if !composite[i] {
            for j in (i * i..n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    (2..n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

/// All Wieferich primes below `limit`.
pub fn wieferich_scan(limit: u64) -> Vec<u64> {
    primes_below(limit)
        .into_iter()
        .filter(|&p| p > 2 && is_wieferich(p).unwrap_or(false))
        .collect()
}
