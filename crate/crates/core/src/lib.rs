//! Exact and certified arithmetic for the cubic fields `Q(alpha)`,
//! `alpha^3 - m alpha^2 - (m+1) alpha - 1 = 0`: partial zeta values of the
//! principal class, Siegel's formula for `zeta_K(-1)`, and the
//! class-number-one criterion built from them.

#![allow(clippy::needless_range_loop)]

pub mod criterion;
pub mod dedekind;
pub mod error;
pub mod exact;
pub mod field;
pub mod hp;
pub mod ideal;
pub mod linalg;
pub mod nt;
pub mod oracles;
pub mod siegel;

pub use criterion::{criterion_check, prime_pattern_check, sweep, sweep_with, CriterionReport, SweepEntry, Witness};
pub use dedekind::{adjugate, dedekind_sum_b, dedekind_sum_b_reduced, DedekindSumInput};
pub use error::{Error, Result};
pub use exact::{PrecisionSchedule, Rat, RealBall};
pub use field::{FieldElem, FieldOptions, FieldSpec, InvalidReason, Validity};
pub use hp::{closed_form_partial_minus1, partial_zeta_2, reflect_to_minus1, HpEngine, HpOptions, HpTerms, QPiD};
pub use ideal::{FactoredIdeal, PrimeIdeal};
pub use oracles::{analytic_class_number, euler_zeta2, ClassNumberEstimate, EulerTruncation};
pub use siegel::{enumerate_s1, siegel, siegel_zeta_minus1, S1Element, SiegelResult};
