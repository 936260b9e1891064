//! Tuples over Z_m and the maps acting on them.
//!
//! The additive Ducci map `T` sends `(a_0, ..., a_{n-1})` to
//! `(a_0 + a_1, a_1 + a_2, ..., a_{n-1} + a_0)` modulo `m`, and the left
//! shift `H` sends it to `(a_1, ..., a_{n-1}, a_0)`. Since `T = I + H`, the
//! `k`-th iterate of `T` is the cyclic polynomial `(1 + x)^k` reduced modulo
//! `x^n - 1` and applied as a circulant.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported modulus. Residues stay below 2^32, so every product of
/// two residues fits in 64 bits.
pub const MAX_MODULUS: u64 = 1 << 32;

/// `advance` steps directly while `k <= STEP_FACTOR * n * bitlen(k)` and
/// switches to polynomial square-and-multiply above that.
pub const STEP_FACTOR: u64 = 2;

pub(crate) fn check_modulus(modulus: u64) -> Result<()> {
    if (2..=MAX_MODULUS).contains(&modulus) {
        Ok(())
    } else {
        Err(Error::InvalidModulus(modulus))
    }
}

/// An element of Z_m^n. Immutable: every operation returns a fresh tuple.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ResidueTuple {
    modulus: u64,
    components: Vec<u64>,
}

#[allow(clippy::len_without_is_empty)]
impl ResidueTuple {
    pub fn new(modulus: u64, components: Vec<u64>) -> Result<Self> {
        check_modulus(modulus)?;
        if components.is_empty() {
            return Err(Error::EmptyTuple);
        }
        if let Some((index, &value)) = components.iter().enumerate().find(|(_, &c)| c >= modulus) {
            return Err(Error::ComponentOutOfRange { index, value, modulus });
        }
        Ok(Self { modulus, components })
    }

    /// Builds a tuple from arbitrary integers, reducing each into `[0, m)`.
    pub fn from_integers(modulus: u64, values: &[i64]) -> Result<Self> {
        check_modulus(modulus)?;
        let m = modulus as i128;
        let components = values.iter().map(|&v| (v as i128).rem_euclid(m) as u64).collect();
        Self::new(modulus, components)
    }

    pub fn zero(modulus: u64, len: usize) -> Result<Self> {
        Self::new(modulus, vec![0; len])
    }

    /// The basic tuple `(1, 0, ..., 0)`.
    pub fn basic(modulus: u64, len: usize) -> Result<Self> {
        check_modulus(modulus)?;
        if len == 0 {
            return Err(Error::EmptyTuple);
        }
        let mut components = vec![0; len];
        components[0] = 1;
        Ok(Self { modulus, components })
    }

    pub(crate) fn from_raw(modulus: u64, components: Vec<u64>) -> Self {
        debug_assert!(components.iter().all(|&c| c < modulus));
        Self { modulus, components }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<u64> {
        self.components
    }

    /// Component `i`, with the index taken modulo `n`.
    pub fn at(&self, i: usize) -> u64 {
        self.components[i % self.components.len()]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0)
    }

    /// One application of `T`.
    pub fn step(&self) -> Self {
        let mut out = vec![0; self.len()];
        step_into(&self.components, &mut out, self.modulus);
        Self::from_raw(self.modulus, out)
    }

    /// One application of the left shift `H`.
    pub fn shift(&self) -> Self {
        self.shift_by(1)
    }

    /// `H^k`: component `i` of the result is `a_{i+k}`.
    pub fn shift_by(&self, k: u64) -> Self {
        let n = self.len();
        let k = (k % n as u64) as usize;
        let mut out = self.components.clone();
        out.rotate_left(k);
        Self::from_raw(self.modulus, out)
    }

    /// `T^k a`, choosing between direct stepping and polynomial powering.
    pub fn advance(&self, k: u64) -> Self {
        let bits = 64 - u64::from(k.leading_zeros());
        if k <= STEP_FACTOR * self.len() as u64 * bits.max(1) {
            self.advance_by_stepping(k)
        } else {
            self.advance_by_polynomial(k)
        }
    }

    /// `T^k a` by `k` single steps.
    pub fn advance_by_stepping(&self, k: u64) -> Self {
        let mut cur = self.components.clone();
        let mut next = vec![0; cur.len()];
        for _ in 0..k {
            step_into(&cur, &mut next, self.modulus);
            std::mem::swap(&mut cur, &mut next);
        }
        Self::from_raw(self.modulus, cur)
    }

    /// `T^k a` by square-and-multiply on `(1 + x)^k` in `Z_m[x]/(x^n - 1)`.
    pub fn advance_by_polynomial(&self, k: u64) -> Self {
        let coeffs = transition_polynomial(k, self.len(), self.modulus);
        self.apply_circulant(&coeffs)
    }

    /// `T^k a` through the binomial expansion
    /// `[T^k a]_i = sum_j C(k, j) a_{i+j}`, using an exact big-integer
    /// Pascal row reduced modulo `m`. Quadratic in `k`; meant for moderate `k`.
    pub fn advance_by_binomial_sum(&self, k: u64) -> Self {
        let n = self.len();
        let m = self.modulus;
        let mut coeffs = vec![0u64; n];
        let mut entry = BigUint::from(1u32);
        for j in 0..=k {
            if j > 0 {
                entry = entry * BigUint::from(k - j + 1) / BigUint::from(j);
            }
            let r = (&entry % m).to_u64().unwrap_or(0);
            let slot = (j % n as u64) as usize;
            coeffs[slot] = (coeffs[slot] + r) % m;
        }
        self.apply_circulant(&coeffs)
    }

    /// Applies `sum_j c_j H^j`.
    pub fn apply_circulant(&self, coeffs: &[u64]) -> Self {
        let n = self.len();
        debug_assert_eq!(coeffs.len(), n);
        let m = self.modulus as u128;
        let out = (0..n)
            .map(|i| {
                let acc: u128 = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(j, &c)| c as u128 * self.components[(i + j) % n] as u128)
                    .sum();
                (acc % m) as u64
            })
            .collect();
        Self::from_raw(self.modulus, out)
    }

    /// Sum of components modulo `m`.
    pub fn component_sum(&self) -> u64 {
        let total: u128 = self.components.iter().map(|&c| c as u128).sum();
        (total % self.modulus as u128) as u64
    }

    /// `sum_i (-1)^i a_i` normalized into `[0, m)`.
    pub fn alternating_sum(&self) -> u64 {
        let m = self.modulus;
        self.components.iter().enumerate().fold(0u64, |acc, (i, &c)| {
            if i % 2 == 0 {
                add_mod(acc, c, m)
            } else {
                sub_mod(acc, c, m)
            }
        })
    }

    /// Block-alternating sums `sigma_j = sum_{i<k} (-1)^i a_{b*i + j}` for
    /// `j < b`, where `b` is the block size and `k = n / b`.
    pub fn sigma_profile(&self, block: usize) -> Result<Vec<u64>> {
        let n = self.len();
        if block == 0 || !n.is_multiple_of(block) {
            return Err(Error::BlockSizeMismatch { block, len: n });
        }
        let m = self.modulus;
        let blocks = n / block;
        Ok((0..block)
            .map(|j| {
                (0..blocks).fold(0u64, |acc, i| {
                    let c = self.components[block * i + j];
                    if i % 2 == 0 {
                        add_mod(acc, c, m)
                    } else {
                        sub_mod(acc, c, m)
                    }
                })
            })
            .collect())
    }

    /// The image of this tuple in `Z_d^n` for a divisor `d` of `m`.
    pub fn reduce(&self, divisor: u64) -> Result<Self> {
        check_modulus(divisor)?;
        if !self.modulus.is_multiple_of(divisor) {
            return Err(Error::InvalidModulus(divisor));
        }
        Ok(Self::from_raw(divisor, self.components.iter().map(|&c| c % divisor).collect()))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, add_mod)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, sub_mod)
    }

    pub fn scaled(&self, factor: u64) -> Self {
        let m = self.modulus;
        let f = factor % m;
        Self::from_raw(m, self.components.iter().map(|&c| mul_mod(c, f, m)).collect())
    }

    fn zip_with(&self, other: &Self, op: fn(u64, u64, u64) -> u64) -> Result<Self> {
        if self.modulus != other.modulus || self.len() != other.len() {
            return Err(Error::ShapeMismatch(self.modulus, self.len(), other.modulus, other.len()));
        }
        let m = self.modulus;
        let out = self.components.iter().zip(&other.components).map(|(&a, &b)| op(a, b, m)).collect();
        Ok(Self::from_raw(m, out))
    }

    /// Position of this tuple in the lexicographic enumeration of Z_m^n.
    pub fn to_index(&self) -> u128 {
        self.components.iter().fold(0u128, |acc, &c| acc * self.modulus as u128 + c as u128)
    }

    /// Inverse of [`ResidueTuple::to_index`].
    pub fn from_index(modulus: u64, len: usize, mut index: u128) -> Result<Self> {
        check_modulus(modulus)?;
        if len == 0 {
            return Err(Error::EmptyTuple);
        }
        let mut components = vec![0u64; len];
        for slot in components.iter_mut().rev() {
            *slot = (index % modulus as u128) as u64;
            index /= modulus as u128;
        }
        if index != 0 {
            return Err(Error::Overflow("tuple index"));
        }
        Ok(Self::from_raw(modulus, components))
    }
}

/// Writes `T(src)` into `dst`. Both slices have length `n`, entries `< m`.
#[inline]
pub(crate) fn step_into(src: &[u64], dst: &mut [u64], m: u64) {
    let n = src.len();
    for i in 0..n - 1 {
        dst[i] = add_mod(src[i], src[i + 1], m);
    }
    dst[n - 1] = add_mod(src[n - 1], src[0], m);
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - b + a
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Cyclic convolution modulo `x^n - 1` and `m`.
fn cyclic_mul(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let n = a.len();
    let mut acc = vec![0u128; n];
    for (i, &x) in a.iter().enumerate().filter(|(_, &x)| x != 0) {
        for (j, &y) in b.iter().enumerate().filter(|(_, &y)| y != 0) {
            let slot = if i + j >= n { i + j - n } else { i + j };
            acc[slot] += x as u128 * y as u128;
        }
    }
    acc.into_iter().map(|v| (v % m as u128) as u64).collect()
}

/// Coefficients of `(1 + x)^k` in `Z_m[x]/(x^n - 1)`, so that
/// `T^k = sum_j c_j H^j`.
pub fn transition_polynomial(k: u64, n: usize, m: u64) -> Vec<u64> {
    let mut result = vec![0u64; n];
    result[0] = 1 % m;
    let mut base = vec![0u64; n];
    base[0] = 1 % m;
    base[1 % n] = (base[1 % n] + 1) % m;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = cyclic_mul(&result, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = cyclic_mul(&base, &base, m);
        }
    }
    result
}

impl fmt::Display for ResidueTuple {
    /// `m:n:c0,c1,...`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:", self.modulus, self.len())?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for ResidueTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse { input: s.to_string(), reason: reason.to_string() };
        let mut parts = s.trim().splitn(3, ':');
        let (Some(m), Some(n), Some(body)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(fail("expected m:n:c0,c1,..."));
        };
        let modulus: u64 = m.trim().parse().map_err(|_| fail("bad modulus"))?;
        let len: usize = n.trim().parse().map_err(|_| fail("bad length"))?;
        let components = parse_components(body).map_err(|e| fail(&e))?;
        if components.len() != len {
            return Err(fail("component count does not match declared length"));
        }
        Self::new(modulus, components)
    }
}

/// Parses a comma-separated list of decimal residues.
pub fn parse_components(body: &str) -> std::result::Result<Vec<u64>, String> {
    body.split(',')
        .map(|c| c.trim().parse::<u64>().map_err(|_| format!("bad component {:?}", c.trim())))
        .collect()
}

/// Exact `C(k, j)` row as big integers; used by tests and the lemma suite.
pub fn pascal_row(k: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(k as usize + 1);
    let mut entry = BigUint::from(1u32);
    row.push(entry.clone());
    for j in 1..=k {
        entry = entry * BigUint::from(k - j + 1) / BigUint::from(j);
        row.push(entry.clone());
    }
    debug_assert!(row.last().is_some_and(|v| !v.is_zero()));
    row
}
