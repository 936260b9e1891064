use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ducci_core::cycles::{in_cycle_with_budget, orbit_census, DEFAULT_GUARD};
use ducci_core::number_theory::wieferich_scan;
use ducci_core::period::PeriodMemo;
use ducci_core::residue::parse_components;
use ducci_core::{PeriodEngine, ResidueTuple, Strategy};
use thiserror::Error;

use crate::cache::{resolve_path, CacheError, PeriodCache};
use crate::campaigns::{Campaign, Limits};
use crate::table::{build_table, write_csv, write_json};

#[derive(Debug, Parser)]
#[command(name = "ducci-lab", version, about = "Periods and cycles of the additive Ducci map over Z_m^n")]
pub struct Cli {
    /// Maximum number of T steps per cycle detection.
    #[arg(long, global = true, env = "DUCCI_STEP_BUDGET")]
    pub step_budget: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Period and pre-period of the basic sequence of Z_m^n.
    Period {
        m: u64,
        n: usize,
        /// auto, brute, structural or crosscheck
        #[arg(long, default_value = "auto")]
        method: Strategy,
        #[arg(long)]
        json: bool,
        /// Cache file, or a directory holding period-cache.json.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Period table for 2 <= m <= m-max, 1 <= n <= n-max.
    Table {
        #[arg(long, default_value_t = 10)]
        m_max: u64,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        method: Strategy,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run a verification campaign.
    Verify {
        #[arg(long, value_enum)]
        campaign: Campaign,
        #[arg(long)]
        m_max: Option<u64>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        p_max: Option<u64>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        guard: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Orbit sizes of T on the cycle set of Z_m^n, as JSON.
    Orbits {
        m: u64,
        n: usize,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u64,
    },
    /// Whether the tuple c0,c1,... of Z_m^n lies on a cycle.
    CycleCheck {
        m: u64,
        n: usize,
        components: String,
        #[arg(long)]
        json: bool,
    },
    /// Wieferich primes below the limit.
    WieferichScan {
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ducci_core::Error),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("campaign {campaign}: {failed} failing instance(s)")]
    Mismatch { campaign: String, failed: usize },
}

impl CliError {
    /// 1 usage or I/O, 2 resource or guard, 3 verification mismatch.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_resource() => 2,
            CliError::Core(ducci_core::Error::Disagreement { .. }) => 3,
            CliError::Mismatch { .. } => 3,
            _ => 1,
        }
    }
}

fn engine_with_cache(cli_budget: Option<u64>, cache: Option<&PathBuf>) -> Result<(PeriodEngine, Option<PathBuf>), CliError> {
    let mut engine = PeriodEngine::new();
    if let Some(budget) = cli_budget {
        engine = engine.with_step_budget(budget);
    }
    let Some(path) = cache else { return Ok((engine, None)) };
    let path = resolve_path(path);
    let loaded = PeriodCache::load(&path)?;
    Ok((engine.with_memo(PeriodMemo::from_entries(loaded.entries)), Some(path)))
}

fn save_cache(engine: &PeriodEngine, path: Option<PathBuf>) -> Result<(), CliError> {
    if let (Some(path), Some(memo)) = (path, engine.memo()) {
        PeriodCache::from_entries(memo.snapshot()).store(&path)?;
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let budget = cli.step_budget;
    match cli.command {
        Command::Period { m, n, method, json, cache } => {
            let (engine, path) = engine_with_cache(budget, cache.as_ref())?;
            let record = engine.period(m, n, method)?;
            save_cache(&engine, path)?;
            if json {
                writeln!(out, "{}", to_json(&record))?;
            } else {
                let pre = record.pre_period.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
                let flags = if record.flags.is_empty() { "-".to_string() } else { record.flags.join(",") };
                writeln!(out, "m     n     period      pre_period  method          flags")?;
                writeln!(out, "{:<5} {:<5} {:<11} {:<11} {:<15} {}", record.m, record.n, record.period, pre, record.method.to_string(), flags)?;
            }
        }
        Command::Table { m_max, n_max, format, out: target, method, cache } => {
            let (engine, path) = engine_with_cache(budget, cache.as_ref())?;
            let records = build_table(&engine, m_max, n_max, method)?;
            save_cache(&engine, path)?;
            let mut file;
            let sink: &mut dyn Write = match &target {
                Some(p) => {
                    file = BufWriter::new(File::create(p).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))?);
                    &mut file
                }
                None => out,
            };
            match format {
                Format::Csv => write_csv(&records, sink)?,
                Format::Json => write_json(&records, sink)?,
            }
            sink.flush()?;
        }
        Command::Verify { campaign, m_max, n_max, p, p_max, k_max, guard, samples, seed, json } => {
            let (engine, _) = engine_with_cache(budget, None)?;
            let engine = engine.with_memo(PeriodMemo::default());
            let limits = Limits { m_max, n_max, p, p_max, k_max, guard, samples, seed };
            let report = campaign.run(&engine, &limits)?;
            if json {
                writeln!(out, "{}", to_json(&report))?;
            } else {
                writeln!(out, "{report}")?;
            }
            if !report.all_pass() && !campaign.failures_are_findings() {
                return Err(CliError::Mismatch { campaign: report.campaign, failed: report.summary.failed });
            }
        }
        Command::Orbits { m, n, guard } => {
            let census = orbit_census(m, n, guard)?;
            writeln!(out, "{}", serde_json::to_string(&census).expect("serializable"))?;
        }
        Command::CycleCheck { m, n, components, json } => {
            let comps = parse_components(&components).map_err(CliError::Usage)?;
            if comps.len() != n {
                return Err(CliError::Usage(format!("expected {n} components, got {}", comps.len())));
            }
            let a = ResidueTuple::new(m, comps)?;
            let verdict = in_cycle_with_budget(&a, budget.unwrap_or(ducci_core::period::DEFAULT_STEP_BUDGET))?;
            if json {
                writeln!(out, "{}", to_json(&verdict))?;
            } else {
                let rule = serde_json::to_value(verdict.rule).expect("rule name");
                write!(out, "{a}: {} (rule {})", if verdict.in_cycle { "on a cycle" } else { "not on a cycle" }, rule.as_str().unwrap_or("?"))?;
                match verdict.witness {
                    Some(w) => writeln!(out, ", {w}")?,
                    None => writeln!(out)?,
                }
            }
        }
        Command::WieferichScan { limit, json } => {
            let primes = wieferich_scan(limit);
            if json {
                writeln!(out, "{}", serde_json::to_string(&primes).expect("serializable"))?;
            } else {
                for p in primes {
                    writeln!(out, "{p}")?;
                }
            }
        }
    }
    Ok(())
}
