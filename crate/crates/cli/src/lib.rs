//! Command-line front end for `ducci-core`: period lookups and tables, a
//! persistent period cache, verification campaigns and orbit census.

pub mod cache;
pub mod campaigns;
pub mod cli;
pub mod report;
pub mod table;

pub use cache::{CacheError, PeriodCache};
pub use campaigns::{Campaign, Limits};
pub use cli::{run, Cli, CliError};
pub use report::VerificationReport;
