//! Binomial coefficients modulo prime powers and the congruence lemmas that
//! drive the prime-power period theorems, checked instance by instance
//! against exact big-integer arithmetic.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{is_prime, p_adic_valuation};
use crate::error::{Error, Result};

/// Largest `p^k` whose full binomial row the lemma suite will stream.
pub const LEMMA_ROW_LIMIT: u64 = 200_000;

/// Largest `q * n` used for the subset-counting congruence.
const SUBSET_LIMIT: u64 = 2_500;

const MAX_K: u32 = 6;

/// Exact `C(n, k)`.
pub fn exact_binomial(n: u64, k: u64) -> Result<BigUint> {
    if k > n {
        return Err(Error::BinomialRange { n, k });
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * BigUint::from(n - k + i) / BigUint::from(i);
    }
    Ok(acc)
}

/// `C(n, k) mod modulus`, exact through big-integer arithmetic.
pub fn binomial_mod(n: u64, k: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::TooSmall(0));
    }
    let c = exact_binomial(n, k)?;
    Ok((c % modulus).to_u64().expect("residue below a u64 modulus"))
}

/// Streams `C(n, j) mod modulus` for `j = 0..=n` without storing the row.
struct RowResidues {
    n: u64,
    j: u64,
    entry: BigUint,
    modulus: u64,
}

impl RowResidues {
    fn new(n: u64, modulus: u64) -> Self {
        Self { n, j: 0, entry: BigUint::one(), modulus }
    }
}

impl Iterator for RowResidues {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        if self.j > self.n {
            return None;
        }
        if self.j > 0 {
            self.entry = &self.entry * BigUint::from(self.n - self.j + 1) / BigUint::from(self.j);
        }
        let r = (&self.entry % self.modulus).to_u64().expect("residue");
        let out = (self.j, r);
        self.j += 1;
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lemma {
    /// The indices `j` with `p^s` not dividing `C(p^k, j)` are exactly the
    /// multiples of `p^{k-s+1}`.
    LegendreSupport,
    /// `v_p(C(p^k, x)) = k - (index of the lowest nonzero base-p digit of x)`.
    LegendreValuation,
    /// `C(qn, t) = C(qn/p, t/p) (mod p^{v_p(n)})` for `p | t`.
    SubsetCounting,
    /// `C(p^k, m p^{k-1}) = C(p, m) (mod p^2)`.
    Babbage,
    /// `C(p^k, m p^{k-2}) = C(p^2, m) (mod p^3)` for `k >= 2`.
    Wolstenholme,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaInstance {
    pub lemma: Lemma,
    pub params: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub p: u64,
    pub k_max: u32,
    pub instances: Vec<LemmaInstance>,
}

impl LemmaReport {
    pub fn failures(&self) -> impl Iterator<Item = &LemmaInstance> {
        self.instances.iter().filter(|i| !i.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.instances.iter().all(|i| i.pass)
    }

    pub fn count(&self, lemma: Lemma) -> usize {
        self.instances.iter().filter(|i| i.lemma == lemma).count()
    }

    fn push(&mut self, lemma: Lemma, params: String, expected: String, observed: String) {
        let pass = expected == observed;
        self.instances.push(LemmaInstance { lemma, params, expected, observed, pass });
    }
}

fn describe_mismatches(bad: &[u64]) -> String {
    if bad.is_empty() {
        "exact".to_string()
    } else {
        let shown: Vec<String> = bad.iter().take(8).map(u64::to_string).collect();
        format!("mismatch at j = {}{}", shown.join(","), if bad.len() > 8 { ",..." } else { "" })
    }
}

/// Checks every instance of the binomial congruence lemmas for prime `p`
/// and exponents up to `k_max`. Failures are recorded, never fatal.
pub fn verify_binomial_lemmas(p: u64, k_max: u32) -> Result<LemmaReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k_max > MAX_K {
        return Err(Error::GuardExceeded { what: "k_max", value: k_max as u128, limit: MAX_K as u128 });
    }
    let top = (p as u128).pow(k_max);
    if top > LEMMA_ROW_LIMIT as u128 {
        return Err(Error::GuardExceeded { what: "p^k_max", value: top, limit: LEMMA_ROW_LIMIT as u128 });
    }

    let mut report = LemmaReport { p, k_max, instances: Vec::new() };
    let p2 = p * p;
    let p3 = p2 * p;
    let small_row: Vec<u64> = (0..=p).map(|m| binomial_mod(p, m, p2).unwrap()).collect();
    let square_row: Vec<u64> = (0..=p2).map(|m| binomial_mod(p2, m, p3).unwrap()).collect();

    for k in 1..=k_max {
        prime_power_row(&mut report, p, k, &small_row, &square_row);
    }
    subset_counting(&mut report, p, k_max);
    Ok(report)
}

fn prime_power_row(report: &mut LemmaReport, p: u64, k: u32, small_row: &[u64], square_row: &[u64]) {
    let pk = p.pow(k);
    let keep = p.pow((k + 1).max(3));
    let (p2, p3) = (p * p, p * p * p);
    let mut support_bad: Vec<Vec<u64>> = vec![Vec::new(); k as usize + 1];
    let mut valuation_bad = Vec::new();
    let mut babbage = Vec::new();
    let mut wolstenholme = Vec::new();

    for (j, r) in RowResidues::new(pk, keep) {
        // v_p(C(p^k, j)), saturated at k + 1
        let v = if r == 0 { k + 1 } else { p_adic_valuation(r, p).unwrap() };
        for s in 1..=k {
            let outside = v < s;
            let predicted = j % p.pow(k - s + 1) == 0;
            if outside != predicted {
                support_bad[s as usize].push(j);
            }
        }
        if 0 < j && j < pk {
            let lowest_digit = p_adic_valuation(j, p).unwrap();
            if v != k - lowest_digit {
                valuation_bad.push(j);
            }
        }
        let step1 = p.pow(k - 1);
        if j % step1 == 0 {
            let m = j / step1;
            babbage.push((m, small_row[m as usize], r % p2));
        }
        if k >= 2 {
            let step2 = p.pow(k - 2);
            if j % step2 == 0 {
                let m = j / step2;
                wolstenholme.push((m, square_row[m as usize], r % p3));
            }
        }
    }

    for s in 1..=k {
        report.push(
            Lemma::LegendreSupport,
            format!("p={p} k={k} s={s}"),
            "exact".into(),
            describe_mismatches(&support_bad[s as usize]),
        );
    }
    report.push(
        Lemma::LegendreValuation,
        format!("p={p} k={k}"),
        "exact".into(),
        describe_mismatches(&valuation_bad),
    );
    for (m, want, got) in babbage {
        report.push(Lemma::Babbage, format!("p={p} k={k} m={m}"), want.to_string(), got.to_string());
    }
    for (m, want, got) in wolstenholme {
        report.push(Lemma::Wolstenholme, format!("p={p} k={k} m={m}"), want.to_string(), got.to_string());
    }
}

fn subset_counting(report: &mut LemmaReport, p: u64, k_max: u32) {
    for j in 1..=k_max {
        for c in 1..=3u64 {
            let n = c * p.pow(j);
            let modulus = p.pow(p_adic_valuation(n, p).unwrap());
            for q in 1..=3u64 {
                let total = q * n;
                if total > SUBSET_LIMIT {
                    continue;
                }
                let reduced: Vec<u64> = RowResidues::new(total / p, modulus).map(|(_, r)| r).collect();
                let bad: Vec<u64> = RowResidues::new(total, modulus)
                    .filter(|&(t, _)| t % p == 0)
                    .filter(|&(t, r)| reduced[(t / p) as usize] != r)
                    .map(|(t, _)| t)
                    .collect();
                report.push(
                    Lemma::SubsetCounting,
                    format!("p={p} n={n} q={q} mod={modulus}"),
                    "exact".into(),
                    describe_mismatches(&bad),
                );
            }
        }
    }
}
