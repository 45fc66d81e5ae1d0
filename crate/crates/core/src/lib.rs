//! Hall π-subgroup properties of finite simple groups of Lie type.

pub mod arith;
pub mod catalog;
pub mod classifier;
pub mod crosscheck;
pub mod glhall;
pub mod oracle;
pub mod orders;
pub mod records;

/// Default cap on the number of elements enumerated for any one group.
pub const DEFAULT_ENUMERATION_BOUND: usize = 1_000_000;

/// The enumeration cap, overridden by `HALLPI_BOUND` when it holds a number.
pub fn enumeration_bound() -> usize {
    std::env::var("HALLPI_BOUND").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ENUMERATION_BOUND)
}
