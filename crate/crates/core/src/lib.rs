//! Periods and cycle structure of the additive Ducci map
//! `T(a_0, ..., a_{n-1}) = (a_0 + a_1, ..., a_{n-1} + a_0)` over `Z_m^n`.
//!
//! * [`residue`]: tuples, `T`, the shift `H`, and fast iteration.
//! * [`number_theory`]: factorization, valuations, orders, Wieferich primes
//!   and the binomial congruence lemmas.
//! * [`period`]: the period function `P(m, n)` by simulation and by the
//!   structural prime-power/lcm route.
//! * [`cycles`]: cycle membership, preimages, cycle-set sizes and orbit census.

pub mod cycles;
pub mod error;
pub mod number_theory;
pub mod period;
pub mod residue;

pub use error::{Error, Result};
pub use period::{CycleReport, Method, PeriodEngine, PeriodRecord, Strategy};
pub use residue::ResidueTuple;
