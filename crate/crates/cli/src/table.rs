use std::io::{self, Write};

use ducci_core::{PeriodEngine, PeriodRecord, Result, Strategy};
use rayon::prelude::*;

pub const CSV_HEADER: &str = "m,n,period,pre_period,method";

/// One record per `(m, n)` with `2 <= m <= m_max`, `1 <= n <= n_max`, in
/// row-major order.
pub fn build_table(engine: &PeriodEngine, m_max: u64, n_max: usize, strategy: Strategy) -> Result<Vec<PeriodRecord>> {
    let jobs: Vec<(u64, usize)> = (2..=m_max).flat_map(|m| (1..=n_max).map(move |n| (m, n))).collect();
    jobs.par_iter().map(|&(m, n)| engine.period(m, n, strategy)).collect()
}

pub fn write_csv(records: &[PeriodRecord], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let pre = r.pre_period.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", r.m, r.n, r.period, pre, r.method)?;
    }
    Ok(())
}

pub fn write_json(records: &[PeriodRecord], out: &mut dyn Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, records)?;
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid() {
        let records = build_table(&PeriodEngine::new(), 10, 6, Strategy::Auto).unwrap();
        assert_eq!(records.len(), 9 * 6);
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("m,n,period,pre_period,method\n"));
        assert!(text.lines().any(|l| l.starts_with("10,4,4,4,")));
        assert!(text.lines().any(|l| l.starts_with("3,1,2,")));
    }

    #[test]
    fn empty_grid_is_header_only() {
        let records = build_table(&PeriodEngine::new(), 1, 6, Strategy::Auto).unwrap();
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "m,n,period,pre_period,method\n");
    }
}
