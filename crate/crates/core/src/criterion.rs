//! The class-number-one criterion: every `(nu) D_K`, `nu in S_1`, is prime.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat_string, Rat};
use crate::field::{FieldOptions, FieldSpec, Validity};
use crate::hp::{closed_form_partial_minus1, partial_zeta_2, reflect_to_minus1};
use crate::ideal::FactoredIdeal;
use crate::nt::is_prime_u64;
use crate::siegel::{f_st, siegel, t_set, SiegelResult};

/// A `nu in S_1` whose ideal `(nu) D_K` is not prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub coords: [i64; 3],
    pub ideal: FactoredIdeal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub m: i64,
    pub validity: Validity,
    pub all_prime: bool,
    pub witnesses: Vec<Witness>,
    /// `zeta_K(-1, P)` from the Halbritter-Pohst evaluation.
    #[serde(with = "rat_string")]
    pub zeta_partial: Rat,
    /// `zeta_K(-1)` from Siegel's formula.
    #[serde(with = "rat_string")]
    pub zeta_siegel: Rat,
}

pub fn criterion_check(spec: &FieldSpec) -> Result<CriterionReport> {
    spec.require_valid()?;
    let m = spec.m();
    let s = siegel(spec)?;
    let zeta_partial = reflect_to_minus1(&partial_zeta_2(spec)?)?;
    if zeta_partial != closed_form_partial_minus1(m) {
        return Err(Error::Invariant(format!("partial zeta at m = {m} differs from the closed form")));
    }
    report_from(spec, &s, zeta_partial)
}

/// Builds the report from an existing Siegel evaluation and `zeta_K(-1, P)`.
pub fn report_from(spec: &FieldSpec, s: &SiegelResult, zeta_partial: Rat) -> Result<CriterionReport> {
    let witnesses: Vec<Witness> = s
        .terms
        .iter()
        .filter(|t| !t.prime)
        .map(|t| Witness { coords: t.element.coords, ideal: t.ideal.clone() })
        .collect();
    let all_prime = witnesses.is_empty();
    let zeta_siegel = s.zeta_minus1.clone();
    if zeta_siegel > zeta_partial || all_prime != (zeta_siegel == zeta_partial) {
        return Err(Error::Invariant(format!("equality condition fails at m = {}", spec.m())));
    }
    Ok(CriterionReport { m: spec.m(), validity: spec.validity().clone(), all_prime, witnesses, zeta_partial, zeta_siegel })
}

/// `f_m(s,t)` is prime on `T \ {(2,3)}`, `f_m(2,3) = (2m-5)^2`, and the
/// ideal of that norm is a prime of residue degree 2.
pub fn prime_pattern_check(spec: &FieldSpec) -> Result<bool> {
    let m = spec.m();
    let sq = ((2 * m - 5) * (2 * m - 5)) as i128;
    if f_st(m, 2, 3) != sq {
        return Ok(false);
    }
    let t = t_set(m);
    let others_prime = t
        .iter()
        .filter(|p| (p.s, p.t) != (2, 3))
        .all(|p| u64::try_from(f_st(m, p.s, p.t)).is_ok_and(is_prime_u64));
    if !others_prime {
        return Ok(false);
    }
    let s = siegel(spec)?;
    let of_norm: Vec<_> = s.terms.iter().filter(|t| t.ideal.norm == sq as u64).collect();
    Ok(matches!(of_norm.as_slice(), [t] if t.prime && t.ideal.factors[0].0.f == 2))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SweepEntry {
    Checked(CriterionReport),
    Skipped { m: i64, validity: Validity },
    Failed { m: i64, error: String, resource_exhaustion: bool },
}

impl SweepEntry {
    fn failed(m: i64, e: &Error) -> Self {
        SweepEntry::Failed { m, error: e.to_string(), resource_exhaustion: e.is_resource_exhaustion() }
    }

    pub fn m(&self) -> i64 {
        match self {
            SweepEntry::Checked(r) => r.m,
            SweepEntry::Skipped { m, .. } | SweepEntry::Failed { m, .. } => *m,
        }
    }

    pub fn report(&self) -> Option<&CriterionReport> {
        match self {
            SweepEntry::Checked(r) => Some(r),
            _ => None,
        }
    }
}

/// Criterion reports for every `m` in `range`; invalid `m` are skipped and
/// per-`m` errors recorded.
pub fn sweep(range: RangeInclusive<i64>) -> Vec<SweepEntry> {
    sweep_with(range, FieldOptions::default())
}

pub fn sweep_with(range: RangeInclusive<i64>, options: FieldOptions) -> Vec<SweepEntry> {
    let ms: Vec<i64> = range.collect();
    ms.into_par_iter()
        .map(|m| {
            let spec = match FieldSpec::with_options(m, options) {
                Ok(s) => s,
                Err(e) => return SweepEntry::failed(m, &e),
            };
            if !spec.validity().is_valid() {
                return SweepEntry::Skipped { m, validity: spec.validity().clone() };
            }
            match criterion_check(&spec) {
                Ok(r) => SweepEntry::Checked(r),
                Err(e) => SweepEntry::failed(m, &e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn examples() {
        let r4 = criterion_check(&FieldSpec::new_valid(4).unwrap()).unwrap();
        assert!(r4.all_prime && r4.witnesses.is_empty());
        assert_eq!(r4.zeta_partial, rat(-2, 3));
        assert_eq!(r4.zeta_siegel, rat(-2, 3));
        let r7 = criterion_check(&FieldSpec::new_valid(7).unwrap()).unwrap();
        assert!(!r7.all_prime && !r7.witnesses.is_empty());
        assert!(r7.zeta_siegel < r7.zeta_partial);
        assert!(criterion_check(&FieldSpec::new_valid(8).unwrap()).unwrap().all_prime);
    }

    #[test]
    fn prime_pattern() {
        for m in [4, 5, 6, 8] {
            assert!(prime_pattern_check(&FieldSpec::new_valid(m).unwrap()).unwrap(), "m={m}");
        }
    }

    #[test]
    fn sweep_marks_invalid_and_finds_the_list() {
        let out = sweep(4..=30);
        assert_eq!(out.len(), 27);
        assert!(matches!(out.iter().find(|e| e.m() == 24), Some(SweepEntry::Skipped { .. })));
        let ones: Vec<i64> = out.iter().filter_map(|e| e.report()).filter(|r| r.all_prime).map(|r| r.m).collect();
        assert_eq!(ones, vec![4, 5, 6, 8]);
        assert!(out.iter().all(|e| !matches!(e, SweepEntry::Failed { .. })));
    }

    #[test]
    fn json_round_trip() {
        let out = sweep(6..=10);
        let json = serde_json::to_string(&out).unwrap();
        assert!(json.contains("\"zeta_partial\":\"-8\""));
        let back: Vec<SweepEntry> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, out);
    }
}
