//! Verification campaigns. Each one checks a family of statements instance
//! by instance and collects the outcome in a [`VerificationReport`].

use std::collections::{BTreeMap, BTreeSet};

use clap::ValueEnum;
use ducci_core::cycles::{cycle_set_size, enumerate_cycle_set, in_cycle, preimages};
use ducci_core::number_theory::{
    is_prime, is_wieferich, multiplicative_order, order_of_two, primes_below, verify_binomial_lemmas, LEMMA_ROW_LIMIT,
};
use ducci_core::period::{closed_form, ClosedFormShape};
use ducci_core::{Error, PeriodEngine, ResidueTuple, Result};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::VerificationReport;

pub const DEFAULT_SEED: u64 = 0x000d_0cc1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum Campaign {
    BinomialLemmas,
    OrderLifting,
    Ladder,
    StructuralVsBrute,
    ClosedForms,
    N3Formula,
    Membership,
    Cardinality,
    Divisibility,
    OrderDivides,
}

/// Optional overrides; every campaign has its own defaults.
#[derive(Clone, Debug, Default)]
pub struct Limits {
    pub m_max: Option<u64>,
    pub n_max: Option<usize>,
    pub p: Option<u64>,
    pub p_max: Option<u64>,
    pub k_max: Option<u32>,
    pub guard: Option<u64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Campaign {
    pub fn name(self) -> &'static str {
        match self {
            Campaign::BinomialLemmas => "binomial-lemmas",
            Campaign::OrderLifting => "order-lifting",
            Campaign::Ladder => "ladder",
            Campaign::StructuralVsBrute => "structural-vs-brute",
            Campaign::ClosedForms => "closed-forms",
            Campaign::N3Formula => "n3-formula",
            Campaign::Membership => "membership",
            Campaign::Cardinality => "cardinality",
            Campaign::Divisibility => "divisibility",
            Campaign::OrderDivides => "order-divides",
        }
    }

    /// The length-3 probe reports which formula matched; a failed candidate
    /// is a finding, not a campaign failure.
    pub fn failures_are_findings(self) -> bool {
        self == Campaign::N3Formula
    }

    pub fn run(self, engine: &PeriodEngine, limits: &Limits) -> Result<VerificationReport> {
        let mut report = VerificationReport::new(self.name(), limits.seed.unwrap_or(DEFAULT_SEED));
        match self {
            Campaign::BinomialLemmas => binomial_lemmas(&mut report, limits)?,
            Campaign::OrderLifting => order_lifting(&mut report, limits)?,
            Campaign::Ladder => ladder(&mut report, engine, limits)?,
            Campaign::StructuralVsBrute => structural_vs_brute(&mut report, engine, limits)?,
            Campaign::ClosedForms => closed_forms(&mut report, engine, limits)?,
            Campaign::N3Formula => n3_formula(&mut report, engine, limits)?,
            Campaign::Membership => membership(&mut report, limits)?,
            Campaign::Cardinality => cardinality(&mut report, limits)?,
            Campaign::Divisibility => divisibility(&mut report, engine, limits)?,
            Campaign::OrderDivides => order_divides(&mut report, engine, limits)?,
        }
        Ok(report)
    }
}

fn prime_list(limits: &Limits, default: &[u64]) -> Result<Vec<u64>> {
    match (limits.p, limits.p_max) {
        (Some(p), _) if !is_prime(p) => Err(Error::NotPrime(p)),
        (Some(p), _) => Ok(vec![p]),
        (None, Some(max)) => Ok(primes_below(max + 1)),
        (None, None) => Ok(default.to_vec()),
    }
}

/// Runs `f` over `items` in parallel and returns the results in input order.
fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

/// Resource errors become skips; anything else aborts the campaign.
fn period_or_skip(
    report: &mut VerificationReport,
    what: String,
    result: Result<u64>,
) -> Result<Option<u64>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_resource() => {
            report.skip(format!("{what}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn binomial_lemmas(report: &mut VerificationReport, limits: &Limits) -> Result<()> {
    let k_max = limits.k_max.unwrap_or(4);
    for p in prime_list(limits, &[2, 3, 5, 7])? {
        let mut k = k_max;
        while k > 1 && (p as u128).pow(k) > LEMMA_ROW_LIMIT as u128 {
            k -= 1;
        }
        if k < k_max {
            report.note(format!("p={p}: k capped at {k} (p^k <= {LEMMA_ROW_LIMIT})"));
        }
        let lemmas = verify_binomial_lemmas(p, k)?;
        for i in lemmas.instances {
            let claim = serde_json::to_value(i.lemma).expect("lemma name");
            report.check(claim.as_str().unwrap_or("lemma"), i.params, i.expected, i.observed, i.pass);
        }
    }
    Ok(())
}

fn order_lifting(report: &mut VerificationReport, limits: &Limits) -> Result<()> {
    let k_max = limits.k_max.unwrap_or(4);
    let primes: Vec<u64> = prime_list(limits, &[3, 5, 7, 11, 13])?.into_iter().filter(|&p| p > 2).collect();
    for p in primes {
        let mut orders = vec![0u64];
        for k in 1..=k_max + 2 {
            let Some(pk) = p.checked_pow(k) else {
                report.skip(format!("p={p} k={k}: p^k overflows"));
                break;
            };
            orders.push(multiplicative_order(2, pk)?);
        }
        let top = orders.len() - 1;
        for k in 1..=(k_max as usize).min(top.saturating_sub(1)) {
            let (lo, hi) = (orders[k], orders[k + 1]);
            report.check(
                "order-lift-dichotomy",
                format!("p={p} k={k}"),
                format!("{lo} or {}", p * lo),
                hi,
                hi == lo || hi == p * lo,
            );
            if hi == p * lo && k + 2 <= top {
                let next = orders[k + 2];
                report.expect_eq("order-lift-propagates", format!("p={p} k={k}"), p * hi, next);
            }
        }
        if !is_wieferich(p)? {
            for k in 1..=top {
                let expected = p.pow(k as u32 - 1) * orders[1];
                report.expect_eq("order-non-wieferich", format!("p={p} k={k}"), expected, orders[k]);
            }
        }
    }
    Ok(())
}

fn ladder(report: &mut VerificationReport, engine: &PeriodEngine, limits: &Limits) -> Result<()> {
    let k_max = limits.k_max.unwrap_or(2);
    let n_max = limits.n_max.unwrap_or(10);
    let mut jobs = Vec::new();
    for p in prime_list(limits, &[2, 3, 5])? {
        for k in 1..=k_max {
            for n in 1..=n_max {
                jobs.push((p, k, n));
            }
        }
    }
    let results = par_map(&jobs, |&(p, k, n)| {
        let lo = engine.period_bruteforce(p.pow(k), n).map(|r| r.period);
        let hi = engine.period_bruteforce(p.pow(k + 1), n).map(|r| r.period);
        (lo, hi)
    });
    for (&(p, k, n), (lo, hi)) in jobs.iter().zip(results) {
        let params = format!("p={p} k={k} n={n}");
        let Some(lo) = period_or_skip(report, params.clone(), lo)? else { continue };
        let Some(hi) = period_or_skip(report, params.clone(), hi)? else { continue };
        report.check("ladder", params, format!("{lo} or {}", p * lo), hi, hi == lo || hi == p * lo);
    }
    Ok(())
}

fn structural_vs_brute(report: &mut VerificationReport, engine: &PeriodEngine, limits: &Limits) -> Result<()> {
    let m_max = limits.m_max.unwrap_or(50);
    let n_max = limits.n_max.unwrap_or(12);
    let jobs: Vec<(u64, usize)> = (2..=m_max).flat_map(|m| (1..=n_max).map(move |n| (m, n))).collect();
    let results = par_map(&jobs, |&(m, n)| (engine.period_bruteforce(m, n), engine.period_structural(m, n)));
    for (&(m, n), (brute, structural)) in jobs.iter().zip(results) {
        let params = format!("m={m} n={n}");
        let Some(brute) = period_or_skip(report, params.clone(), brute.map(|r| r.period))? else { continue };
        let structural = structural?;
        report.expect_eq("structural-equals-brute", params.clone(), brute, structural.period);
        if !structural.flags.is_empty() {
            report.note(format!("{params}: structural flags {}", structural.flags.join(",")));
        }
    }
    Ok(())
}

fn closed_forms(report: &mut VerificationReport, engine: &PeriodEngine, limits: &Limits) -> Result<()> {
    let m_max = limits.m_max.unwrap_or(101);
    let n_max = limits.n_max.unwrap_or(30);
    let primes = prime_list(limits, &primes_below(14))?;

    let odd: Vec<u64> = (3..=m_max).step_by(2).collect();
    let results = par_map(&odd, |&m| {
        (order_of_two(m), engine.period_bruteforce(m, 1).map(|r| r.period), engine.period_bruteforce(m, 2).map(|r| r.period))
    });
    for (&m, (order, p1, p2)) in odd.iter().zip(results) {
        let order = order?;
        for (n, got) in [(1, p1), (2, p2)] {
            let params = format!("m={m} n={n}");
            if let Some(got) = period_or_skip(report, params.clone(), got)? {
                report.expect_eq("period-equals-order", params, order, got);
            }
        }
    }

    let mut jobs = Vec::new();
    for &p in &primes {
        for n in 1..=n_max {
            if let Some(form) = closed_form(p, n)? {
                jobs.push((p, n, form));
            }
        }
    }
    let results = par_map(&jobs, |&(p, n, _)| engine.period_bruteforce(p, n).map(|r| r.period));
    for (&(p, n, form), got) in jobs.iter().zip(results) {
        let params = format!("p={p} n={n} shape={}", form.shape.tag());
        let Some(got) = period_or_skip(report, params.clone(), got)? else { continue };
        let claim = match form.shape {
            ClosedFormShape::OneOrTwo => "closed-form-order",
            ClosedFormShape::Prime | ClosedFormShape::TwicePrime => "closed-form-p-2p",
            ClosedFormShape::PowerTimesPredecessor | ClosedFormShape::PowerTimesSuccessor => "closed-form-power",
            ClosedFormShape::PowerOfTwo => "closed-form-vanishing",
        };
        report.expect_eq(claim, params, form.value, got);
    }
    Ok(())
}

fn n3_formula(report: &mut VerificationReport, engine: &PeriodEngine, limits: &Limits) -> Result<()> {
    let p_max = limits.p_max.or(limits.p).unwrap_or(23);
    let primes: Vec<u64> = match limits.p {
        Some(p) if !is_prime(p) || p == 2 => return Err(Error::NotOddPrime(p)),
        Some(p) => vec![p],
        None => primes_below(p_max + 1).into_iter().filter(|&p| p > 2).collect(),
    };
    let probes = par_map(&primes, |&p| engine.length_three_probe(p));
    let (mut lcm_ok, mut gcd_ok, mut gcd_bad) = (Vec::new(), Vec::new(), Vec::new());
    for probe in probes {
        let probe = probe?;
        let params = format!("p={} O(p)={}", probe.p, probe.order);
        report.expect_eq("n3-lcm(O(p),6)", params.clone(), probe.lcm_prediction, probe.brute);
        report.expect_eq("n3-gcd(O(p),6)", params, probe.gcd_prediction, probe.brute);
        if probe.lcm_matches() {
            lcm_ok.push(probe.p);
        }
        if probe.gcd_matches() {
            gcd_ok.push(probe.p);
        } else {
            gcd_bad.push(probe.p);
        }
    }
    let list = |v: &[u64]| if v.is_empty() { "none".to_string() } else { format!("{v:?}") };
    report.note(format!("lcm(O(p),6) matched brute force for p in {} of {} primes", lcm_ok.len(), primes.len()));
    report.note(format!("gcd(O(p),6) matched brute force for p in {}", list(&gcd_ok)));
    if !gcd_bad.is_empty() {
        report.note(format!(
            "DISCREPANCY: the printed formula P(p,3) = gcd(O(p),6) fails for p = {}",
            list(&gcd_bad)
        ));
    }
    Ok(())
}

fn membership(report: &mut VerificationReport, limits: &Limits) -> Result<()> {
    let n_max = limits.n_max.unwrap_or(20);
    let guard = limits.guard.unwrap_or(ducci_core::cycles::DEFAULT_GUARD);
    for p in prime_list(limits, &[2, 3, 5])? {
        for n in 1..=n_max {
            if (p as u128).pow(n as u32) > guard as u128 {
                break;
            }
            let set = enumerate_cycle_set(p, n, guard)?;
            let indices: Vec<usize> = (0..set.on_cycle.len()).collect();
            let verdicts: Vec<Result<bool>> = indices
                .par_chunks(4096)
                .flat_map_iter(|chunk| {
                    chunk.iter().map(|&i| {
                        let a = ResidueTuple::from_index(p, n, i as u128)?;
                        Ok(in_cycle(&a)?.in_cycle)
                    })
                })
                .collect();
            let mut mismatches = 0usize;
            let mut first = None;
            for (i, v) in verdicts.into_iter().enumerate() {
                if v? != set.on_cycle[i] {
                    mismatches += 1;
                    first.get_or_insert(i);
                }
            }
            let total = set.on_cycle.len();
            let observed = match first {
                None => format!("0 of {total}"),
                Some(i) => format!("{mismatches} of {total}, first {}", ResidueTuple::from_index(p, n, i as u128)?),
            };
            report.check("membership-rule-equals-enumeration", format!("p={p} n={n}"), format!("0 of {total}"), observed, mismatches == 0);

            let members: Vec<u128> = (0..total).filter(|&i| set.on_cycle[i]).map(|i| i as u128).collect();
            let mut images: Vec<u128> = members
                .par_iter()
                .map(|&i| ResidueTuple::from_index(p, n, i).map(|a| a.step().to_index()))
                .collect::<Result<_>>()?;
            images.sort_unstable();
            report.check("bijective-on-cycle-set", format!("p={p} n={n}"), "permutation", if images == members { "permutation" } else { "not a permutation" }, images == members);

            if p == 2 && n <= 12 {
                let bad = (0..total as u128)
                    .filter(|&i| {
                        let a = ResidueTuple::from_index(2, n, i).expect("index in range");
                        let expected = if a.component_sum() == 0 { 2 } else { 0 };
                        preimages(&a).len() != expected
                    })
                    .count();
                report.expect_eq("preimage-count-mod-2", format!("n={n}"), 0, bad);
            }
        }
    }
    Ok(())
}

fn cardinality(report: &mut VerificationReport, limits: &Limits) -> Result<()> {
    let n_max = limits.n_max.unwrap_or(20);
    let guard = limits.guard.unwrap_or(ducci_core::cycles::DEFAULT_GUARD);
    for p in prime_list(limits, &[2, 3, 5, 7])? {
        for n in 1..=n_max {
            if (p as u128).pow(n as u32) > guard as u128 {
                break;
            }
            let expected = match cycle_set_size(p, n) {
                Ok(v) => v,
                Err(Error::CharacterizationInapplicable { .. }) => continue,
                Err(e) => return Err(e),
            };
            let count = enumerate_cycle_set(p, n, guard)?.cycle_tuple_count();
            report.expect_eq("cycle-set-size", format!("p={p} n={n}"), expected, BigUint::from(count));
        }
    }
    Ok(())
}

/// Periods on a grid via the default strategy, skipping budget overruns.
fn period_grid(
    report: &mut VerificationReport,
    engine: &PeriodEngine,
    ms: impl Iterator<Item = u64>,
    n_max: usize,
) -> Result<BTreeMap<(u64, usize), u64>> {
    let jobs: Vec<(u64, usize)> = ms.flat_map(|m| (1..=n_max).map(move |n| (m, n))).collect();
    let results = par_map(&jobs, |&(m, n)| engine.period(m, n, Default::default()).map(|r| r.period));
    let mut grid = BTreeMap::new();
    for (&(m, n), r) in jobs.iter().zip(results) {
        if let Some(v) = period_or_skip(report, format!("m={m} n={n}"), r)? {
            grid.insert((m, n), v);
        }
    }
    Ok(grid)
}

fn divisibility(report: &mut VerificationReport, engine: &PeriodEngine, limits: &Limits) -> Result<()> {
    let m_max = limits.m_max.unwrap_or(60);
    let n_max = limits.n_max.unwrap_or(10);
    let grid = period_grid(report, engine, 2..=m_max, n_max)?;
    for (&(m, n), &pm) in &grid {
        for d in (2..m).filter(|d| m % d == 0) {
            if let Some(&pd) = grid.get(&(d, n)) {
                report.check("divisor-period-divides", format!("d={d} m={m} n={n}"), format!("{pd} | {pm}"), pm % pd, pm % pd == 0);
            }
        }
    }

    // cycle lengths of random tuples divide the period
    let mut rng = ChaCha8Rng::seed_from_u64(report.seed);
    let samples = limits.samples.unwrap_or(300);
    let keys: Vec<(u64, usize)> = grid.keys().copied().collect();
    if keys.is_empty() {
        return Ok(());
    }
    let mut seen = BTreeSet::new();
    for _ in 0..samples {
        let (m, n) = keys[rng.gen_range(0..keys.len())];
        let comps: Vec<u64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let a = ResidueTuple::new(m, comps)?;
        if !seen.insert(a.to_string()) {
            continue;
        }
        let params = a.to_string();
        let Some(len) = period_or_skip(report, params.clone(), engine.detect_cycle(&a).map(|r| r.cycle_length))? else {
            continue;
        };
        let period = grid[&(m, n)];
        report.check("cycle-length-divides-period", params, format!("divides {period}"), len, period % len == 0);
    }
    Ok(())
}

fn order_divides(report: &mut VerificationReport, engine: &PeriodEngine, limits: &Limits) -> Result<()> {
    let m_max = limits.m_max.unwrap_or(60);
    let n_max = limits.n_max.unwrap_or(10);
    let grid = period_grid(report, engine, (3..=m_max).step_by(2), n_max)?;
    for (&(m, n), &period) in &grid {
        let order = order_of_two(m)?;
        report.check("order-divides-period", format!("m={m} n={n}"), format!("{order} | {period}"), period % order, period % order == 0);
    }
    Ok(())
}
