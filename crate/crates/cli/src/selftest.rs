//! Invariant suites with a fixed seed.

use std::fmt::Write;

use nh_bypass::invariants::{run_all, DEFAULT_SEED};

use crate::CliError;

pub const SEED_VAR: &str = "NH_BYPASS_SEED";

/// Decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64, CliError> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => t.replace('_', "").parse(),
    };
    parsed.map_err(|_| CliError::parse("seed", format!("`{s}`")))
}

pub fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(v) => parse_seed(&v),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Runs every suite and returns the printed summary and whether all passed.
pub fn selftest(seed: u64) -> (String, bool) {
    let outcomes = run_all(seed);
    let mut text = String::new();
    let _ = writeln!(text, "seed {seed:#x}");
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    for o in &outcomes {
        let status = if o.ok() { "ok" } else { "FAIL" };
        let _ = writeln!(
            text,
            "{:<width$}  {:>5}/{:<5} {status}",
            o.name, o.passed, o.total
        );
        for f in &o.failures {
            let _ = writeln!(text, "    {f}");
        }
    }
    let passed = outcomes.iter().filter(|o| o.ok()).count();
    let all = passed == outcomes.len();
    let _ = writeln!(text, "{passed}/{} suites passed", outcomes.len());
    (text, all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse() {
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert_eq!(parse_seed("0x5eed_2024").unwrap(), 0x5eed_2024);
        assert!(parse_seed("seed").is_err());
    }
}
