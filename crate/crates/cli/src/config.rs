use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use clap::ValueEnum;
use kmzeta::{Error, FieldOptions, FieldSpec, HpOptions, PrecisionSchedule, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

/// Inclusive range of `m`, written `A..B` or `A..=B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MRange(pub RangeInclusive<i64>);

impl FromStr for MRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
        let b = b.strip_prefix('=').unwrap_or(b);
        let parse = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}"));
        let (a, b) = (parse(a)?, parse(b)?);
        if a > b {
            return Err(format!("empty range {a}..{b}"));
        }
        Ok(MRange(a..=b))
    }
}

impl fmt::Display for MRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.0.start(), self.0.end())
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub start_bits: u32,
    pub precision_cap: u32,
    pub term_budget: u128,
    pub format: Format,
}

impl RunConfig {
    pub fn new(start_bits: u32, precision_cap: u32, term_budget: u128, format: Format) -> Result<Self> {
        if start_bits == 0 || precision_cap == 0 || term_budget == 0 {
            return Err(Error::OutOfRange("precision and budgets must be positive".into()));
        }
        if precision_cap < start_bits {
            return Err(Error::OutOfRange(format!("precision cap {precision_cap} is below the start {start_bits}")));
        }
        Ok(RunConfig { start_bits, precision_cap, term_budget, format })
    }

    pub fn field_options(&self) -> FieldOptions {
        FieldOptions { schedule: PrecisionSchedule::new(self.start_bits, self.precision_cap), ..FieldOptions::default() }
    }

    pub fn field(&self, m: i64) -> Result<FieldSpec> {
        FieldSpec::with_options(m, self.field_options())
    }

    pub fn valid_field(&self, m: i64) -> Result<FieldSpec> {
        let spec = self.field(m)?;
        spec.require_valid()?;
        Ok(spec)
    }

    pub fn hp_options(&self) -> HpOptions {
        HpOptions { term_budget: self.term_budget, ..HpOptions::default() }
    }
}

pub fn positive_u64(s: &str) -> std::result::Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}
