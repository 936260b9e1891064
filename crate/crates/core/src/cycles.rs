//! Which tuples lie on T-cycles.
//!
//! Membership is decided by the known characterizations where their
//! hypotheses hold (odd modulus and odd length; alternating sum for odd `m`
//! and even `n` coprime to `m`; block sums for prime moduli) and by
//! simulation everywhere else. Full enumeration of `Z_m^n` as a functional
//! graph provides the independent oracle and the orbit census.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Pow;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number_theory::{is_prime, p_adic_valuation};
use crate::period::{detect_cycle, DEFAULT_STEP_BUDGET};
use crate::residue::ResidueTuple;

/// Default cap on `m^n` for full enumeration.
pub const DEFAULT_GUARD: u64 = 1_000_000;

/// Rule that decided a membership question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipRule {
    /// `m` and `n` odd: `T` is invertible, every tuple recurs.
    AllTuplesOddOdd,
    /// `m` odd, `n` even, `gcd(m, n) = 1`: on a cycle iff `sigma(a) = 0`.
    SigmaZero,
    /// `m = 2`, `n` odd: on a cycle iff the component sum is even.
    EvenMod2,
    /// `m` prime, `n = p^r k` even (or `m = 2`, `r >= 1`): all block sums
    /// `sigma_j` with block `p^r` vanish.
    REven,
    /// No characterization applies; the sequence was simulated.
    Enumeration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub in_cycle: bool,
    pub rule: MembershipRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// The rule [`in_cycle`] uses for tuples of `Z_m^n`.
pub fn membership_rule(m: u64, n: usize) -> MembershipRule {
    let n64 = n as u64;
    let m_odd = m % 2 == 1;
    if m_odd && n % 2 == 1 {
        MembershipRule::AllTuplesOddOdd
    } else if m_odd && m.gcd(&n64) == 1 {
        MembershipRule::SigmaZero
    } else if m == 2 && n % 2 == 1 {
        MembershipRule::EvenMod2
    } else if m == 2 || (m_odd && is_prime(m)) {
        MembershipRule::REven
    } else {
        MembershipRule::Enumeration
    }
}

/// Does the T-sequence of `a` reach the zero tuple?
pub fn vanishes(a: &ResidueTuple, budget: u64) -> Result<bool> {
    let report = detect_cycle(a, budget)?;
    Ok(report.cycle_length == 1 && report.cycle_entry.is_zero())
}

/// Cycle membership with the default step budget for the simulation path.
pub fn in_cycle(a: &ResidueTuple) -> Result<MembershipVerdict> {
    in_cycle_with_budget(a, DEFAULT_STEP_BUDGET)
}

pub fn in_cycle_with_budget(a: &ResidueTuple, budget: u64) -> Result<MembershipVerdict> {
    let m = a.modulus();
    let n = a.len();
    let rule = membership_rule(m, n);
    let verdict = |in_cycle: bool, witness: Option<String>| MembershipVerdict { in_cycle, rule, witness };
    match rule {
        MembershipRule::AllTuplesOddOdd => Ok(verdict(true, None)),
        MembershipRule::SigmaZero => {
            let sigma = a.alternating_sum();
            Ok(verdict(sigma == 0, (sigma != 0).then(|| format!("sigma = {sigma}"))))
        }
        MembershipRule::EvenMod2 => {
            let sum = a.component_sum();
            Ok(verdict(sum == 0, (sum != 0).then(|| "odd component sum".to_string())))
        }
        MembershipRule::REven => {
            let r = p_adic_valuation(n as u64, m)?;
            let block = m.pow(r) as usize;
            let sigmas = a.sigma_profile(block)?;
            let failing = sigmas.iter().position(|&s| s != 0);
            Ok(verdict(
                failing.is_none(),
                failing.map(|j| format!("sigma_{j} = {} (block {block})", sigmas[j])),
            ))
        }
        MembershipRule::Enumeration => {
            let report = detect_cycle(a, budget)?;
            Ok(verdict(
                report.pre_period == 0,
                Some(format!("pre-period {}, cycle length {}", report.pre_period, report.cycle_length)),
            ))
        }
    }
}

/// `|C_p^n| = p^{n - p^r}` with `r = v_p(n)`, for `p = 2` with odd part
/// greater than 1, or odd `p` with `n` even.
pub fn cycle_set_size(p: u64, n: usize) -> Result<BigUint> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::EmptyTuple);
    }
    let r = p_adic_valuation(n as u64, p)?;
    let block = p.pow(r) as usize;
    if p == 2 && n == block {
        return Err(Error::CharacterizationInapplicable { p, n, reason: "p = 2 needs an odd part greater than 1" });
    }
    if p > 2 && n % 2 == 1 {
        return Err(Error::CharacterizationInapplicable { p, n, reason: "odd p needs an even length" });
    }
    Ok(BigUint::from(p).pow((n - block) as u32))
}

/// Every `x` with `T x = a`, ordered by `x_0`.
///
/// Writing `x_{i+1} = a_i - x_i` expresses each `x_i` as `c_i + (-1)^i x_0`;
/// the wrap-around equation `x_{n-1} + x_0 = a_{n-1}` then reads
/// `c_{n-1} = a_{n-1}` for even `n` (any `x_0` works) and
/// `2 x_0 = a_{n-1} - c_{n-1}` for odd `n`.
pub fn preimages(a: &ResidueTuple) -> Vec<ResidueTuple> {
    let m = a.modulus();
    let n = a.len();
    let c = a.components();
    // offsets c_i with x_0 = 0
    let mut offsets = vec![0u64; n];
    for i in 0..n - 1 {
        offsets[i + 1] = (c[i] + m - offsets[i]) % m;
    }
    let residual = (c[n - 1] + m - offsets[n - 1]) % m;

    let starts: Vec<u64> = if n.is_multiple_of(2) {
        if residual != 0 {
            return Vec::new();
        }
        (0..m).collect()
    } else if m % 2 == 1 {
        // 2 is invertible
        vec![residual * m.div_ceil(2) % m]
    } else if residual.is_multiple_of(2) {
        let half = residual / 2;
        vec![half, half + m / 2]
    } else {
        return Vec::new();
    };

    starts
        .into_iter()
        .map(|x0| {
            let comps = offsets
                .iter()
                .enumerate()
                .map(|(i, &off)| if i % 2 == 0 { (off + x0) % m } else { (off + m - x0) % m })
                .collect();
            ResidueTuple::from_raw(m, comps)
        })
        .collect()
}

/// `T` on all of `Z_m^n` as a functional graph on lexicographic indices.
#[derive(Clone, Debug)]
pub struct CycleSet {
    pub m: u64,
    pub n: usize,
    /// `on_cycle[i]` for the tuple with lexicographic index `i`.
    pub on_cycle: Vec<bool>,
    /// Length of every T-orbit inside the cycle set, in discovery order.
    pub orbit_sizes: Vec<u64>,
    /// Largest pre-period over all tuples.
    pub max_pre_period: u64,
}

impl CycleSet {
    pub fn cycle_tuple_count(&self) -> u64 {
        self.on_cycle.iter().filter(|&&b| b).count() as u64
    }
}

fn check_guard(m: u64, n: usize, guard: u64) -> Result<u64> {
    let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > guard as u128 || size > u32::MAX as u128 {
        return Err(Error::GuardExceeded { what: "m^n", value: size, limit: guard as u128 });
    }
    Ok(size as u64)
}

/// Successor index of every tuple; chunks of the index space are filled in
/// parallel, each with its own odometer.
fn successor_table(m: u64, n: usize, size: u64) -> Vec<u32> {
    const CHUNK: usize = 1 << 14;
    let mut next = vec![0u32; size as usize];
    next.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, out)| {
        let first = (chunk * CHUNK) as u128;
        let mut digits = ResidueTuple::from_index(m, n, first).expect("index in range").into_components();
        for slot in out.iter_mut() {
            let mut idx: u64 = 0;
            for i in 0..n {
                let s = digits[i] + digits[(i + 1) % n];
                idx = idx * m + if s >= m { s - m } else { s };
            }
            *slot = idx as u32;
            // odometer: last component is least significant
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
    });
    next
}

/// Enumerates `Z_m^n` (at most `guard` tuples) and finds every cycle.
pub fn enumerate_cycle_set(m: u64, n: usize, guard: u64) -> Result<CycleSet> {
    ResidueTuple::basic(m, n)?;
    let size = check_guard(m, n, guard)?;
    let next = successor_table(m, n, size);

    const FRESH: u8 = 0;
    const ON_PATH: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![FRESH; size as usize];
    let mut on_cycle = vec![false; size as usize];
    // distance to the cycle set, valid once DONE
    let mut depth = vec![0u64; size as usize];
    let mut orbit_sizes = Vec::new();
    let mut path: Vec<u32> = Vec::new();

    for start in 0..size as u32 {
        if state[start as usize] != FRESH {
            continue;
        }
        path.clear();
        let mut cur = start;
        while state[cur as usize] == FRESH {
            state[cur as usize] = ON_PATH;
            path.push(cur);
            cur = next[cur as usize];
        }
        let mut tail_len = path.len();
        if state[cur as usize] == ON_PATH {
            let pos = path.iter().position(|&x| x == cur).expect("node on current path");
            for &x in &path[pos..] {
                on_cycle[x as usize] = true;
                depth[x as usize] = 0;
            }
            orbit_sizes.push((path.len() - pos) as u64);
            tail_len = pos;
        }
        let mut d = if tail_len == path.len() { depth[cur as usize] } else { 0 };
        for &x in path[..tail_len].iter().rev() {
            d += 1;
            depth[x as usize] = d;
        }
        for &x in &path {
            state[x as usize] = DONE;
        }
    }
    let max_pre_period = depth.iter().copied().max().unwrap_or(0);
    Ok(CycleSet { m, n, on_cycle, orbit_sizes, max_pre_period })
}

/// Distribution of T-orbit sizes on the cycle set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitCensus {
    pub m: u64,
    pub n: usize,
    /// orbit size -> number of orbits of that size
    pub census: BTreeMap<u64, u64>,
    #[serde(rename = "total")]
    pub total_cycle_tuples: u64,
}

pub fn orbit_census(m: u64, n: usize, guard: u64) -> Result<OrbitCensus> {
    let set = enumerate_cycle_set(m, n, guard)?;
    let mut census = BTreeMap::new();
    for &size in &set.orbit_sizes {
        *census.entry(size).or_insert(0u64) += 1;
    }
    let total_cycle_tuples = census.iter().map(|(size, count)| size * count).sum();
    Ok(OrbitCensus { m, n, census, total_cycle_tuples })
}
