//! Acceptance criteria, one PASS/FAIL line each. Timings are measured on
//! library calls in the test profile.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ducci_core::cycles::{cycle_set_size, enumerate_cycle_set, DEFAULT_GUARD};
use ducci_core::number_theory::{order_of_two, wieferich_scan};
use ducci_core::period::closed_form;
use ducci_core::{PeriodEngine, Strategy};
use ducci_lab::{Campaign, Limits, VerificationReport};
use num_bigint::BigUint;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn ms(d: Duration) -> String {
    format!("{:.3} ms", d.as_secs_f64() * 1e3)
}

/// Runs `body`, then fails the criterion if it took longer than `limit`.
fn criterion(id: u32, title: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let in_time = elapsed < limit;
    let pass = out.pass && in_time;
    println!(
        "{} [{id:02}] {title}: {} ({} / limit {})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        ms(elapsed),
        ms(limit)
    );
    pass
}

fn run_campaign(campaign: Campaign, limits: Limits) -> VerificationReport {
    let engine = PeriodEngine::new();
    campaign.run(&engine, &limits).expect("campaign runs")
}

fn summary(r: &VerificationReport) -> String {
    format!("{}: {} checked, {} failed, {} skipped", r.campaign, r.summary.total, r.summary.failed, r.summary.skipped)
}

fn main() -> ExitCode {
    let engine = PeriodEngine::new();
    let mut results = Vec::new();

    results.push(criterion(1, "P(10,4) = 4 with pre-period 4", Duration::from_millis(1), || {
        let r = engine.period(10, 4, Strategy::Brute).unwrap();
        outcome(r.period == 4 && r.pre_period == Some(4), format!("period {} pre-period {:?}", r.period, r.pre_period))
    }));

    results.push(criterion(2, "P(2,3) = 3 and P(2^k,3) = 6 for k = 2..6", Duration::from_millis(10), || {
        let mut got = vec![engine.period_bruteforce(2, 3).unwrap().period];
        for k in 2..=6 {
            got.push(engine.period_bruteforce(1 << k, 3).unwrap().period);
        }
        outcome(got == [3, 6, 6, 6, 6, 6], format!("{got:?}"))
    }));

    results.push(criterion(3, "P(2^a,2^b) = 1 for 1 <= a,b <= 5", Duration::from_secs(1), || {
        let bad: Vec<(u32, u32)> = (1..=5)
            .flat_map(|a| (1..=5).map(move |b| (a, b)))
            .filter(|&(a, b)| engine.period_bruteforce(1 << a, 1 << b).unwrap().period != 1)
            .collect();
        outcome(bad.is_empty(), format!("25 pairs, violations {bad:?}"))
    }));

    results.push(criterion(4, "P(m,1) = P(m,2) = O(m) for odd m in [3,101]", Duration::from_secs(1), || {
        let bad: Vec<u64> = (3..=101u64)
            .step_by(2)
            .filter(|&m| {
                let o = order_of_two(m).unwrap();
                engine.period_bruteforce(m, 1).unwrap().period != o || engine.period_bruteforce(m, 2).unwrap().period != o
            })
            .collect();
        outcome(bad.is_empty(), format!("50 moduli, violations {bad:?}"))
    }));

    results.push(criterion(5, "P(p,p) = P(p,2p) = p O(p) for p in {3,5,7,11,13}", Duration::from_secs(5), || {
        let mut detail = Vec::new();
        let mut pass = true;
        for p in [3u64, 5, 7, 11, 13] {
            let want = p * order_of_two(p).unwrap();
            let a = engine.period_bruteforce(p, p as usize).unwrap().period;
            let b = engine.period_bruteforce(p, 2 * p as usize).unwrap().period;
            pass &= a == want && b == want;
            detail.push(format!("p={p}:{a}/{b}"));
        }
        outcome(pass, detail.join(" "))
    }));

    results.push(criterion(6, "closed forms P(3,2)=2 P(3,8)=8 P(5,24)=24 P(2,5)=15 P(3,10)=80", Duration::from_secs(30), || {
        let cases = [(3u64, 2usize, 2u64), (3, 8, 8), (5, 24, 24), (2, 5, 15), (3, 10, 80)];
        let mut pass = true;
        let mut detail = Vec::new();
        for (p, n, want) in cases {
            let formula = closed_form(p, n).unwrap().map(|f| f.value);
            let brute = engine.period_bruteforce(p, n).unwrap().period;
            pass &= formula == Some(want) && brute == want;
            detail.push(format!("({p},{n}) formula {} brute {brute}", formula.map_or("-".into(), |v| v.to_string())));
        }
        outcome(pass, detail.join(", "))
    }));

    results.push(criterion(7, "structural = brute for m <= 50, n <= 12 within budget", Duration::from_secs(60), || {
        let r = run_campaign(Campaign::StructuralVsBrute, Limits { m_max: Some(50), n_max: Some(12), ..Default::default() });
        outcome(r.all_pass() && r.summary.total > 0, summary(&r))
    }));

    results.push(criterion(8, "P(p^k,n) = p^(k-1) P(p,n) for p in {3,5,7}, k <= 3, n <= 10", Duration::from_secs(60), || {
        let (mut checked, mut skipped, mut bad) = (0, 0, Vec::new());
        for p in [3u64, 5, 7] {
            for n in 1..=10usize {
                let base = engine.period_bruteforce(p, n).unwrap().period;
                for k in 2..=3u32 {
                    match engine.period_bruteforce(p.pow(k), n) {
                        Ok(r) => {
                            checked += 1;
                            if r.period != p.pow(k - 1) * base {
                                bad.push((p, k, n));
                            }
                        }
                        Err(e) if e.is_resource() => skipped += 1,
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
        outcome(bad.is_empty() && checked > 0, format!("{checked} checked, {skipped} over budget, violations {bad:?}"))
    }));

    results.push(criterion(9, "membership rule = enumeration on Z_p^n, p in {2,3,5}, p^n <= 10^6", Duration::from_secs(60), || {
        let r = run_campaign(Campaign::Membership, Limits { n_max: Some(64), guard: Some(1_000_000), ..Default::default() });
        let tuples: usize = r
            .by_claim("membership-rule-equals-enumeration")
            .map(|i| i.expected.trim_start_matches("0 of ").parse::<usize>().unwrap())
            .sum();
        outcome(r.all_pass(), format!("{}; {tuples} tuples", summary(&r)))
    }));

    results.push(criterion(10, "|C_2^6| = 16 and |C_3^6| = 27 by enumeration", Duration::from_secs(5), || {
        let c2 = enumerate_cycle_set(2, 6, DEFAULT_GUARD).unwrap().cycle_tuple_count();
        let c3 = enumerate_cycle_set(3, 6, DEFAULT_GUARD).unwrap().cycle_tuple_count();
        let f2 = cycle_set_size(2, 6).unwrap();
        let f3 = cycle_set_size(3, 6).unwrap();
        let pass = c2 == 16 && c3 == 27 && f2 == BigUint::from(16u32) && f3 == BigUint::from(27u32);
        outcome(pass, format!("enumerated {c2}, {c3}; formula {f2}, {f3}"))
    }));

    results.push(criterion(11, "wieferich-scan --limit 100000 = {1093, 3511}", Duration::from_secs(5), || {
        let lib = wieferich_scan(100_000);
        let out = Command::new(env!("CARGO_BIN_EXE_ducci-lab"))
            .args(["wieferich-scan", "--limit", "100000"])
            .output()
            .expect("binary runs");
        let printed = String::from_utf8_lossy(&out.stdout).split_whitespace().map(str::to_string).collect::<Vec<_>>();
        outcome(lib == [1093, 3511] && printed == ["1093", "3511"] && out.status.success(), format!("library {lib:?}, cli {printed:?}"))
    }));

    results.push(criterion(12, "binomial lemmas for p in {2,3,5,7}, k <= 4", Duration::from_secs(30), || {
        let r = run_campaign(Campaign::BinomialLemmas, Limits { k_max: Some(4), ..Default::default() });
        outcome(r.all_pass() && r.summary.total > 0, summary(&r))
    }));

    results.push(criterion(13, "n = 3 probe: lcm(O(p),6) matches, printed gcd form flagged", Duration::from_secs(30), || {
        let r = run_campaign(Campaign::N3Formula, Limits { p_max: Some(23), ..Default::default() });
        let lcm: Vec<_> = r.by_claim("n3-lcm(O(p),6)").collect();
        let gcd_fail = r.by_claim("n3-gcd(O(p),6)").filter(|i| !i.pass).count();
        let flagged = r.notes.iter().any(|n| n.starts_with("DISCREPANCY"));
        let pass = lcm.len() == 8 && lcm.iter().all(|i| i.pass) && flagged;
        outcome(pass, format!("lcm matched {}/{}, gcd failed {gcd_fail}/8, discrepancy flagged: {flagged}", lcm.iter().filter(|i| i.pass).count(), lcm.len()))
    }));

    results.push(criterion(14, "order-lifting and period-ladder invariants", Duration::from_secs(30), || {
        let lift = run_campaign(Campaign::OrderLifting, Limits { k_max: Some(4), ..Default::default() });
        let ladder = run_campaign(Campaign::Ladder, Limits { k_max: Some(2), n_max: Some(10), ..Default::default() });
        outcome(lift.all_pass() && ladder.all_pass(), format!("{}; {}", summary(&lift), summary(&ladder)))
    }));

    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} acceptance criteria pass", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
