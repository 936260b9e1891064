//! The period function `P(m, n)`: the cycle length of the basic T-sequence
//! of `Z_m^n`, which every other cycle length divides.
//!
//! Two independent routes compute it. Brute force runs Brent's cycle finder
//! on the basic tuple. The structural route factors `m`, handles each prime
//! power through the prime-power scaling theorems (with empirical lifting
//! for 2 and Wieferich primes), reduces the prime case to a period multiple
//! `p^K - 1` that is then peeled down prime by prime, and combines the
//! factors with an lcm.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number_theory::{
    factorize, is_prime, is_wieferich, multiplicative_order, order_of_two, p_adic_valuation, pow_mod,
};
use crate::residue::{step_into, ResidueTuple, MAX_MODULUS};

pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

/// Exponential search for a cycle entry gives up past this many steps.
const PRE_PERIOD_SEARCH_LIMIT: u64 = 1 << 48;

pub mod flags {
    /// The coprime part of a prime period was simulated instead of refined.
    pub const FALLBACK_BRUTE: &str = "fallback-brute";
    /// Prime-power period obtained by lifting one exponent at a time.
    pub const EMPIRICAL_LIFT: &str = "empirical-lift";
    /// Wieferich prime lifted past the cube, where no theorem backs the shape.
    pub const BEYOND_GUARANTEE: &str = "beyond-paper-guarantee";
    /// `p = 2` with a power-of-two length: every sequence vanishes.
    pub const VANISHING_P2: &str = "vanishing-p2";
}

/// Pre-period, cycle length and cycle entry of one T-sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleReport {
    pub pre_period: u64,
    pub cycle_length: u64,
    /// `T^N a` for the pre-period `N`.
    pub cycle_entry: ResidueTuple,
}

/// Route that produced a [`PeriodRecord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    DivisorRefine,
    Structural,
    ClosedForm,
    Crosscheck,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::DivisorRefine => "divisor_refine",
            Method::Structural => "structural",
            Method::ClosedForm => "closed_form",
            Method::Crosscheck => "crosscheck",
        })
    }
}

/// Requested route for [`PeriodEngine::period`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    Brute,
    Structural,
    #[default]
    Auto,
    Crosscheck,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "brute" => Ok(Strategy::Brute),
            "structural" => Ok(Strategy::Structural),
            "auto" => Ok(Strategy::Auto),
            "crosscheck" => Ok(Strategy::Crosscheck),
            other => Err(format!("unknown method {other:?} (expected auto, brute, structural or crosscheck)")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub m: u64,
    pub n: usize,
    pub period: u64,
    pub pre_period: Option<u64>,
    pub method: Method,
    #[serde(default)]
    pub flags: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PartialEq for PeriodRecord {
    /// Timing is not part of a record's value.
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.n == other.n
            && self.period == other.period
            && self.pre_period == other.pre_period
            && self.method == other.method
            && self.flags == other.flags
    }
}

impl Eq for PeriodRecord {}

impl PeriodRecord {
    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    fn add_flag(&mut self, flag: &str) {
        if !self.has_flag(flag) {
            self.flags.push(flag.to_string());
        }
    }
}

/// Shared memo of prime `(p, n)` records. Many readers, one writer at a time;
/// values are deterministic so overwriting an equal key is harmless.
#[derive(Clone, Debug, Default)]
pub struct PeriodMemo {
    inner: Arc<RwLock<BTreeMap<(u64, usize), PeriodRecord>>>,
}

impl PeriodMemo {
    pub fn from_entries(entries: BTreeMap<(u64, usize), PeriodRecord>) -> Self {
        Self { inner: Arc::new(RwLock::new(entries)) }
    }

    pub fn get(&self, m: u64, n: usize) -> Option<PeriodRecord> {
        self.inner.read().expect("memo lock poisoned").get(&(m, n)).cloned()
    }

    pub fn insert(&self, record: PeriodRecord) {
        self.inner.write().expect("memo lock poisoned").insert((record.m, record.n), record);
    }

    pub fn snapshot(&self) -> BTreeMap<(u64, usize), PeriodRecord> {
        self.inner.read().expect("memo lock poisoned").clone()
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("memo lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact pre-period and cycle length by Brent's algorithm, followed by a
/// divisor pass confirming the cycle length is minimal. At most `budget`
/// single steps of `T` are spent.
pub fn detect_cycle(a: &ResidueTuple, budget: u64) -> Result<CycleReport> {
    let m = a.modulus();
    let over = || Error::StepBudgetExceeded { budget };
    let mut steps: u64 = 1;
    if steps > budget {
        return Err(over());
    }

    let mut tortoise = a.components().to_vec();
    let mut hare = vec![0; a.len()];
    let mut scratch = vec![0; a.len()];
    step_into(&tortoise, &mut hare, m);
    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    while tortoise != hare {
        if power == lam {
            tortoise.copy_from_slice(&hare);
            power *= 2;
            lam = 0;
        }
        step_into(&hare, &mut scratch, m);
        std::mem::swap(&mut hare, &mut scratch);
        lam += 1;
        steps += 1;
        if steps > budget {
            return Err(over());
        }
    }

    let mut behind = a.components().to_vec();
    let mut ahead = a.advance(lam).into_components();
    let mut mu: u64 = 0;
    while behind != ahead {
        step_into(&behind, &mut scratch, m);
        std::mem::swap(&mut behind, &mut scratch);
        step_into(&ahead, &mut scratch, m);
        std::mem::swap(&mut ahead, &mut scratch);
        mu += 1;
        steps += 2;
        if steps > budget {
            return Err(over());
        }
    }

    let entry = ResidueTuple::from_raw(m, behind);
    let cycle_length = refine_to_period(&entry, lam)?;
    Ok(CycleReport { pre_period: mu, cycle_length, cycle_entry: entry })
}

/// Smallest divisor `P` of `multiple` with `T^P a = a`, found by peeling
/// prime factors off `multiple`. `a` must satisfy `T^multiple a = a`.
pub fn refine_to_period(a: &ResidueTuple, multiple: u64) -> Result<u64> {
    if multiple == 0 || a.advance(multiple) != *a {
        return Err(Error::NotAPeriodMultiple { multiple });
    }
    if multiple == 1 {
        return Ok(1);
    }
    let mut period = multiple;
    for &(q, _) in factorize(multiple)?.factors() {
        while period.is_multiple_of(q) && a.advance(period / q) == *a {
            period /= q;
        }
    }
    Ok(period)
}

/// Smallest `N` with `T^{N+M} a = T^N a`, together with `T^N a`. Exact
/// whenever `multiple` is a multiple of the cycle length of `a`.
pub fn cycle_entry_for_multiple(a: &ResidueTuple, multiple: u64) -> Result<(u64, ResidueTuple)> {
    let holds = |n: u64| {
        let x = a.advance(n);
        let ok = x.advance(multiple) == x;
        (ok, x)
    };
    let (ok, x) = holds(0);
    if ok {
        return Ok((0, x));
    }
    let mut lo = 0u64; // fails
    let mut hi = 1u64;
    loop {
        if holds(hi).0 {
            break;
        }
        lo = hi;
        hi = hi.checked_mul(2).filter(|&h| h <= PRE_PERIOD_SEARCH_LIMIT).ok_or(
            Error::CycleEntryNotFound { m: a.modulus(), n: a.len() },
        )?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid).0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, a.advance(hi)))
}

/// A multiple of `P(p, n)` for `n` coprime to `p`: `p^K - 1` with `K` the
/// order of `p` modulo `n`, or the smaller `n (p^K' - 1)` when some
/// `p^K' = -1 (mod n)`. `None` when `p | n` or the multiple overflows `u64`.
pub fn candidate_multiple(p: u64, n: usize) -> Option<u64> {
    let n64 = n as u64;
    if n == 0 || p.gcd(&n64) != 1 {
        return None;
    }
    let order = if n64 <= 2 { 1 } else { multiplicative_order(p, n64).ok()? };
    let by_order = p.checked_pow(u32::try_from(order).ok()?).map(|v| v - 1);
    let by_negation = if n64 > 2 {
        (1..=order)
            .find(|&k| pow_mod(p, k, n64) == n64 - 1)
            .and_then(|k| p.checked_pow(u32::try_from(k).ok()?))
            .and_then(|v| (v - 1).checked_mul(n64))
    } else {
        None
    };
    match (by_order, by_negation) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Recognized closed-form shape of `P(p, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormShape {
    /// `n` in {1, 2}, odd `p`: `O(p)`.
    OneOrTwo,
    /// `n = p`: `p O(p)`.
    Prime,
    /// `n = 2p`: `p O(p)`.
    TwicePrime,
    /// `n = p^k (p^s - 1)`: the period is `n` itself.
    PowerTimesPredecessor,
    /// `n = p^k (p^s + 1)`: `p^k (p^{2s} - 1)`.
    PowerTimesSuccessor,
    /// `p = 2`, `n = 2^l`: everything vanishes.
    PowerOfTwo,
}

impl ClosedFormShape {
    pub fn tag(self) -> &'static str {
        match self {
            ClosedFormShape::OneOrTwo => "n in {1,2}",
            ClosedFormShape::Prime => "p",
            ClosedFormShape::TwicePrime => "2p",
            ClosedFormShape::PowerTimesPredecessor => "p^k(p^s-1)",
            ClosedFormShape::PowerTimesSuccessor => "p^k(p^s+1)",
            ClosedFormShape::PowerOfTwo => "2^l",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub value: u64,
    pub shape: ClosedFormShape,
}

/// Closed-form value of `P(p, n)` when `n` has a recognized shape. Length 3
/// is deliberately not treated here.
pub fn closed_form(p: u64, n: usize) -> Result<Option<ClosedForm>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::EmptyTuple);
    }
    let n64 = n as u64;
    let found = |value: u64, shape| Ok(Some(ClosedForm { value, shape }));
    if p == 2 && n.is_power_of_two() {
        return found(1, ClosedFormShape::PowerOfTwo);
    }
    if p > 2 {
        let order = order_of_two(p)?;
        if n <= 2 {
            return found(order, ClosedFormShape::OneOrTwo);
        }
        if n64 == p {
            return found(p * order, ClosedFormShape::Prime);
        }
        if n64 == 2 * p {
            return found(p * order, ClosedFormShape::TwicePrime);
        }
    }
    let k = p_adic_valuation(n64, p)?;
    let pk = p.pow(k);
    let rest = n64 / pk;
    let min_s = if p == 2 { 2 } else { 1 };
    let mut s = 1u32;
    while let Some(ps) = p.checked_pow(s) {
        if ps > rest + 1 {
            break;
        }
        if s >= min_s {
            if ps - 1 == rest {
                return found(n64, ClosedFormShape::PowerTimesPredecessor);
            }
            if ps + 1 == rest {
                let value = ps
                    .checked_mul(ps)
                    .and_then(|sq| (sq - 1).checked_mul(pk))
                    .ok_or(Error::Overflow("closed form"))?;
                return found(value, ClosedFormShape::PowerTimesSuccessor);
            }
        }
        s += 1;
    }
    Ok(None)
}

/// Brute-force `P(p, 3)` next to the two candidate formulas built from
/// `O(p)`: `gcd(O(p), 6)` and `lcm(O(p), 6)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthThreeProbe {
    pub p: u64,
    pub order: u64,
    pub brute: u64,
    pub gcd_prediction: u64,
    pub lcm_prediction: u64,
}

impl LengthThreeProbe {
    pub fn gcd_matches(&self) -> bool {
        self.brute == self.gcd_prediction
    }

    pub fn lcm_matches(&self) -> bool {
        self.brute == self.lcm_prediction
    }
}

fn checked_pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e).ok_or(Error::Overflow("prime power"))
}

fn lcm_exact(values: impl IntoIterator<Item = u64>) -> Result<u64> {
    let l = values.into_iter().fold(BigUint::one(), |acc, v| acc.lcm(&BigUint::from(v)));
    l.to_u64().ok_or(Error::Overflow("lcm of periods"))
}

/// Entry point for period computations. Cheap to clone; the memo is shared.
#[derive(Clone, Debug)]
pub struct PeriodEngine {
    step_budget: u64,
    memo: Option<PeriodMemo>,
}

impl Default for PeriodEngine {
    fn default() -> Self {
        Self { step_budget: DEFAULT_STEP_BUDGET, memo: None }
    }
}

impl PeriodEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_step_budget(mut self, budget: u64) -> Self {
        self.step_budget = budget;
        self
    }

    pub fn with_memo(mut self, memo: PeriodMemo) -> Self {
        self.memo = Some(memo);
        self
    }

    pub fn step_budget(&self) -> u64 {
        self.step_budget
    }

    pub fn memo(&self) -> Option<&PeriodMemo> {
        self.memo.as_ref()
    }

    pub fn detect_cycle(&self, a: &ResidueTuple) -> Result<CycleReport> {
        detect_cycle(a, self.step_budget)
    }

    /// `P(m, n)` as the cycle length of the simulated basic sequence.
    pub fn period_bruteforce(&self, m: u64, n: usize) -> Result<PeriodRecord> {
        let start = Instant::now();
        let report = self.detect_cycle(&ResidueTuple::basic(m, n)?)?;
        Ok(PeriodRecord {
            m,
            n,
            period: report.cycle_length,
            pre_period: Some(report.pre_period),
            method: Method::Brute,
            flags: Vec::new(),
            elapsed: start.elapsed(),
        })
    }

    /// `P(p, n) = p^k P(p, n')` with `n = p^k n'`; the coprime part comes from
    /// peeling the candidate multiple, and `p = 2, n' = 1` vanishes.
    pub fn period_prime(&self, p: u64, n: usize) -> Result<PeriodRecord> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if let Some(hit) = self.memo.as_ref().and_then(|memo| memo.get(p, n)) {
            return Ok(hit);
        }
        let start = Instant::now();
        let basic = ResidueTuple::basic(p, n)?;
        let k = p_adic_valuation(n as u64, p)?;
        let pk = checked_pow(p, k)?;
        let coprime_len = n / pk as usize;

        let mut flags = Vec::new();
        let (period, method) = if p == 2 && coprime_len == 1 {
            flags.push(flags::VANISHING_P2.to_string());
            (1, Method::Structural)
        } else {
            let (inner, method) = match candidate_multiple(p, coprime_len) {
                Some(multiple) => {
                    let coprime_basic = ResidueTuple::basic(p, coprime_len)?;
                    let (_, entry) = cycle_entry_for_multiple(&coprime_basic, multiple)?;
                    (refine_to_period(&entry, multiple)?, Method::DivisorRefine)
                }
                None => {
                    flags.push(flags::FALLBACK_BRUTE.to_string());
                    let coprime_basic = ResidueTuple::basic(p, coprime_len)?;
                    (self.detect_cycle(&coprime_basic)?.cycle_length, Method::Brute)
                }
            };
            (pk.checked_mul(inner).ok_or(Error::Overflow("prime period"))?, method)
        };
        let (pre_period, _) = cycle_entry_for_multiple(&basic, period)?;
        let record = PeriodRecord {
            m: p,
            n,
            period,
            pre_period: Some(pre_period),
            method,
            flags,
            elapsed: start.elapsed(),
        };
        if let Some(memo) = &self.memo {
            memo.insert(record.clone());
        }
        Ok(record)
    }

    /// `P(p^e, n)`: scaling by `p^{e-1}` for odd non-Wieferich `p`, the known
    /// special cases for `p = 2`, and exponent-by-exponent lifting otherwise.
    pub fn period_prime_power(&self, p: u64, e: u32, n: usize) -> Result<PeriodRecord> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::TooSmall(0));
        }
        if e == 1 {
            return self.period_prime(p, n);
        }
        let start = Instant::now();
        let modulus = checked_pow(p, e)?;
        if modulus > MAX_MODULUS {
            return Err(Error::InvalidModulus(modulus));
        }
        let basic = ResidueTuple::basic(modulus, n)?;

        let finish = |period: u64, pre_period: u64, flags: Vec<String>| PeriodRecord {
            m: modulus,
            n,
            period,
            pre_period: Some(pre_period),
            method: Method::Structural,
            flags,
            elapsed: start.elapsed(),
        };

        if p == 2 && n.is_power_of_two() {
            let (pre, _) = cycle_entry_for_multiple(&basic, 1)?;
            return Ok(finish(1, pre, vec![flags::VANISHING_P2.to_string()]));
        }
        if p == 2 && n == 3 {
            let (pre, _) = cycle_entry_for_multiple(&basic, 6)?;
            return Ok(finish(6, pre, Vec::new()));
        }

        let base = self.period_prime(p, n)?;
        let mut flags = base.flags.clone();
        if p > 2 && !is_wieferich(p)? {
            let period = checked_pow(p, e - 1)?
                .checked_mul(base.period)
                .ok_or(Error::Overflow("prime-power period"))?;
            let (pre, _) = cycle_entry_for_multiple(&basic, period)?;
            return Ok(finish(period, pre, flags));
        }

        // Each lift multiplies the period by 1 or p; test which on a cycle
        // tuple modulo the next power.
        let mut period = base.period;
        let mut pre = base.pre_period.unwrap_or(0);
        for k in 1..e {
            let next = ResidueTuple::basic(checked_pow(p, k + 1)?, n)?;
            let bound = period.checked_mul(p).ok_or(Error::Overflow("lifted period"))?;
            let (entry_pre, entry) = cycle_entry_for_multiple(&next, bound)?;
            if entry.advance(period) != entry {
                period = bound;
            }
            pre = entry_pre;
        }
        let mut record = finish(period, pre, std::mem::take(&mut flags));
        record.add_flag(flags::EMPIRICAL_LIFT);
        if p > 2 && e > 3 {
            record.add_flag(flags::BEYOND_GUARANTEE);
        }
        Ok(record)
    }

    /// `P(m, n)` as the lcm of the prime-power periods of `m`.
    pub fn period_structural(&self, m: u64, n: usize) -> Result<PeriodRecord> {
        let start = Instant::now();
        let factorization = factorize(m)?;
        if factorization.is_prime_power() && factorization.factors()[0].1 == 1 {
            return self.period_prime(m, n);
        }
        let parts = factorization
            .factors()
            .iter()
            .map(|&(p, e)| self.period_prime_power(p, e, n))
            .collect::<Result<Vec<_>>>()?;
        if parts.len() == 1 {
            return Ok(parts.into_iter().next().unwrap());
        }
        let period = lcm_exact(parts.iter().map(|r| r.period))?;
        let basic = ResidueTuple::basic(m, n)?;
        let (pre, _) = cycle_entry_for_multiple(&basic, period)?;
        let mut record = PeriodRecord {
            m,
            n,
            period,
            pre_period: Some(pre),
            method: Method::Structural,
            flags: Vec::new(),
            elapsed: Duration::ZERO,
        };
        for flag in parts.iter().flat_map(|r| r.flags.iter()) {
            record.add_flag(flag);
        }
        record.elapsed = start.elapsed();
        Ok(record)
    }

    pub fn period(&self, m: u64, n: usize, strategy: Strategy) -> Result<PeriodRecord> {
        match strategy {
            Strategy::Brute => self.period_bruteforce(m, n),
            Strategy::Structural => self.period_structural(m, n),
            Strategy::Auto => match self.period_structural(m, n) {
                Ok(record) if record.has_flag(flags::FALLBACK_BRUTE) => {
                    Ok(self.period_bruteforce(m, n).unwrap_or(record))
                }
                Ok(record) => Ok(record),
                Err(e) if e.is_resource() || matches!(e, Error::CycleEntryNotFound { .. }) => {
                    self.period_bruteforce(m, n)
                }
                Err(e) => Err(e),
            },
            Strategy::Crosscheck => {
                let start = Instant::now();
                let brute = self.period_bruteforce(m, n)?;
                let structural = self.period_structural(m, n)?;
                if brute.period != structural.period || brute.pre_period != structural.pre_period {
                    return Err(Error::Disagreement {
                        m,
                        n,
                        brute: brute.period,
                        structural: structural.period,
                    });
                }
                Ok(PeriodRecord {
                    method: Method::Crosscheck,
                    flags: structural.flags,
                    elapsed: start.elapsed(),
                    ..brute
                })
            }
        }
    }

    /// Closed form when one applies, else the structural value.
    pub fn period_with_closed_form(&self, p: u64, n: usize) -> Result<PeriodRecord> {
        let start = Instant::now();
        match closed_form(p, n)? {
            Some(cf) => {
                let (pre, _) = cycle_entry_for_multiple(&ResidueTuple::basic(p, n)?, cf.value)?;
                Ok(PeriodRecord {
                    m: p,
                    n,
                    period: cf.value,
                    pre_period: Some(pre),
                    method: Method::ClosedForm,
                    flags: vec![cf.shape.tag().to_string()],
                    elapsed: start.elapsed(),
                })
            }
            None => self.period_prime(p, n),
        }
    }

    pub fn length_three_probe(&self, p: u64) -> Result<LengthThreeProbe> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let order = order_of_two(p)?;
        let brute = self.period_bruteforce(p, 3)?.period;
        Ok(LengthThreeProbe { p, order, brute, gcd_prediction: order.gcd(&6), lcm_prediction: order.lcm(&6) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> PeriodEngine {
        PeriodEngine::new()
    }

    fn t(m: u64, c: &[u64]) -> ResidueTuple {
        ResidueTuple::new(m, c.to_vec()).unwrap()
    }

    /// Independent oracle: remember every visited tuple.
    fn naive_cycle(a: &ResidueTuple) -> (u64, u64) {
        let mut seen = std::collections::HashMap::new();
        let mut cur = a.clone();
        let mut i = 0u64;
        loop {
            if let Some(&first) = seen.get(&cur) {
                return (first, i - first);
            }
            seen.insert(cur.clone(), i);
            cur = cur.step();
            i += 1;
        }
    }

    #[test]
    fn detect_cycle_examples() {
        let r = detect_cycle(&ResidueTuple::basic(10, 4).unwrap(), DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!((r.pre_period, r.cycle_length), (4, 4));
        assert_eq!(r.cycle_entry, t(10, &[2, 4, 6, 4]));

        let r = detect_cycle(&ResidueTuple::basic(2, 4).unwrap(), DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!((r.pre_period, r.cycle_length), (4, 1));
        assert!(r.cycle_entry.is_zero());

        let r = detect_cycle(&ResidueTuple::basic(2, 3).unwrap(), DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(r.cycle_length, 3);
    }

    #[test]
    fn detect_cycle_respects_budget() {
        let e = ResidueTuple::basic(47, 11).unwrap();
        assert_eq!(detect_cycle(&e, 1000), Err(Error::StepBudgetExceeded { budget: 1000 }));
        assert!(detect_cycle(&e, 0).is_err());
    }

    #[test]
    fn detect_cycle_matches_naive_oracle() {
        for m in 2..=12u64 {
            for n in 1..=6usize {
                for seed in 0..5u64 {
                    let comps: Vec<u64> = (0..n as u64).map(|i| (seed * 7 + i * i * 3 + 1) % m).collect();
                    let a = t(m, &comps);
                    let r = detect_cycle(&a, DEFAULT_STEP_BUDGET).unwrap();
                    assert_eq!((r.pre_period, r.cycle_length), naive_cycle(&a), "{a}");
                    assert_eq!(r.cycle_entry.advance(r.cycle_length), r.cycle_entry);
                    if r.pre_period > 0 {
                        let before = a.advance(r.pre_period - 1);
                        let c = detect_cycle(&before, DEFAULT_STEP_BUDGET).unwrap();
                        assert!(c.pre_period > 0);
                    }
                }
            }
        }
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(engine().period_bruteforce(10, 4).unwrap().period, 4);
        assert_eq!(engine().period_bruteforce(4, 3).unwrap().period, 6);
        assert_eq!(engine().period_bruteforce(5, 4).unwrap().period, 4);
    }

    #[test]
    fn candidate_multiple_examples() {
        assert_eq!(candidate_multiple(5, 4), Some(4));
        assert_eq!(candidate_multiple(2, 3), Some(3));
        assert_eq!(candidate_multiple(3, 3), None);
        assert_eq!(candidate_multiple(3, 1), Some(2));
        // 2^5 = -1 mod 11 gives 11 * 31 = 341 < 2^10 - 1 = 1023
        assert_eq!(candidate_multiple(2, 11), Some(341));
    }

    #[test]
    fn refine_examples() {
        let on_cycle = ResidueTuple::basic(5, 4).unwrap().advance(10);
        assert_eq!(refine_to_period(&on_cycle, 4), Ok(4));
        let zero = ResidueTuple::zero(7, 3).unwrap();
        assert_eq!(refine_to_period(&zero, 360), Ok(1));
        let z23 = ResidueTuple::basic(2, 3).unwrap().advance(5);
        assert_eq!(refine_to_period(&z23, 6), Ok(3));
        assert_eq!(refine_to_period(&z23, 4), Err(Error::NotAPeriodMultiple { multiple: 4 }));
    }

    #[test]
    fn prime_period_examples() {
        let e = engine();
        assert_eq!(e.period_prime(3, 9).unwrap().period, 18);
        assert_eq!(e.period_bruteforce(3, 9).unwrap().period, 18);
        assert_eq!(e.period_prime(5, 10).unwrap().period, 20);
        let r = e.period_prime(2, 8).unwrap();
        assert_eq!(r.period, 1);
        assert!(r.has_flag(flags::VANISHING_P2));
        assert_eq!(e.period_prime(4, 3), Err(Error::NotPrime(4)));
    }

    #[test]
    fn prime_power_examples() {
        let e = engine();
        assert_eq!(e.period_prime_power(5, 2, 4).unwrap().period, 20);
        assert_eq!(e.period_bruteforce(25, 4).unwrap().period, 20);
        assert_eq!(e.period_prime_power(2, 3, 3).unwrap().period, 6);
        assert_eq!(e.period_prime_power(2, 4, 8).unwrap().period, 1);
        let lifted = e.period_prime_power(2, 3, 5).unwrap();
        assert!(lifted.has_flag(flags::EMPIRICAL_LIFT));
        let brute = e.period_bruteforce(8, 5).unwrap();
        assert_eq!((lifted.period, lifted.pre_period), (brute.period, brute.pre_period));
    }

    #[test]
    fn composite_examples() {
        let e = engine();
        let r = e.period(10, 4, Strategy::Structural).unwrap();
        assert_eq!((r.period, r.pre_period), (4, Some(4)));
        assert_eq!(e.period(15, 2, Strategy::Crosscheck).unwrap().period, 4);
        assert_eq!(e.period(7, 5, Strategy::Structural).unwrap(), e.period_prime(7, 5).unwrap());
        assert_eq!(e.period(16, 3, Strategy::Crosscheck).unwrap().period, 6);
    }

    #[test]
    fn wieferich_lift_smoke() {
        // 1093^2 fits under the modulus cap; lifting must agree with simulation
        let e = engine();
        let lifted = e.period_prime_power(1093, 2, 1).unwrap();
        assert!(lifted.has_flag(flags::EMPIRICAL_LIFT));
        assert_eq!(lifted.period, e.period_bruteforce(1093 * 1093, 1).unwrap().period);
        assert_eq!(lifted.period, order_of_two(1093 * 1093).unwrap());
    }

    #[test]
    fn closed_form_examples() {
        let cf = closed_form(3, 8).unwrap().unwrap();
        assert_eq!((cf.value, cf.shape.tag()), (8, "p^k(p^s-1)"));
        let cf = closed_form(2, 5).unwrap().unwrap();
        assert_eq!((cf.value, cf.shape.tag()), (15, "p^k(p^s+1)"));
        let cf = closed_form(7, 14).unwrap().unwrap();
        assert_eq!((cf.value, cf.shape.tag()), (21, "2p"));
        assert_eq!(closed_form(5, 3).unwrap(), None);
        assert_eq!(closed_form(2, 6).unwrap().unwrap().value, 6);
        assert!(closed_form(6, 3).is_err());
    }

    #[test]
    fn closed_forms_match_brute_force() {
        let e = engine();
        for p in [2u64, 3, 5, 7, 11, 13] {
            for n in 1..=30usize {
                if let Some(cf) = closed_form(p, n).unwrap() {
                    if let Ok(r) = e.with_budget(2_000_000).period_bruteforce(p, n) {
                        assert_eq!(r.period, cf.value, "p={p} n={n} shape={:?}", cf.shape);
                    }
                }
            }
        }
    }

    impl PeriodEngine {
        fn with_budget(&self, b: u64) -> PeriodEngine {
            self.clone().with_step_budget(b)
        }
    }

    #[test]
    fn memo_is_used() {
        let memo = PeriodMemo::default();
        let e = engine().with_memo(memo.clone());
        let first = e.period_prime(7, 6).unwrap();
        assert_eq!(memo.len(), 1);
        assert_eq!(e.period_prime(7, 6).unwrap(), first);
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("crosscheck".parse::<Strategy>(), Ok(Strategy::Crosscheck));
        assert!("fast".parse::<Strategy>().is_err());
    }

    #[test]
    fn cycle_entry_search() {
        let e = ResidueTuple::basic(10, 4).unwrap();
        let (pre, entry) = cycle_entry_for_multiple(&e, 4).unwrap();
        assert_eq!(pre, 4);
        assert_eq!(entry, t(10, &[2, 4, 6, 4]));
        // a non-multiple never closes up
        let z23 = ResidueTuple::basic(2, 3).unwrap();
        assert!(cycle_entry_for_multiple(&z23, 2).is_err());
    }
}
