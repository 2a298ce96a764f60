//! Independent numerical checks: a truncated Euler product for `zeta_K(2)`
//! and an analytic class-number estimate.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{rat, Rat, RealBall};
use crate::field::FieldSpec;
use crate::ideal::decompose_prime;
use crate::nt::primes_up_to;

/// Working precision of the Euler products.
const EULER_BITS: u32 = 160;

#[derive(Debug, Clone, PartialEq)]
pub struct EulerTruncation {
    pub prime_bound: u64,
    pub value: RealBall,
    pub terms_used: usize,
}

/// Residue degrees of the primes above each `p <= bound`, in order of `p`.
fn splitting_data(spec: &FieldSpec, bound: u64) -> Vec<(u64, Vec<u32>)> {
    primes_up_to(bound)
        .into_par_iter()
        .map(|p| (p, decompose_prime(spec, p).iter().map(|q| q.f).collect()))
        .collect()
}

/// `prod_{p <= bound} prod_{P | p} (1 - N(P)^-2)^-1`, with the tail over
/// `p > bound` folded into the radius.
pub fn euler_zeta2(spec: &FieldSpec, prime_bound: u64) -> Result<EulerTruncation> {
    spec.require_valid()?;
    if prime_bound < 2 {
        return Err(Error::OutOfRange(format!("prime bound {prime_bound} < 2")));
    }
    let data = splitting_data(spec, prime_bound);
    // local factors as exact rationals, multiplied into a ball in a fixed order
    let locals: Vec<Rat> = data
        .par_iter()
        .map(|(p, fs)| {
            fs.iter().fold(rat(1, 1), |acc, &f| {
                let n2 = BigInt::from(*p).pow(2 * f);
                acc * Rat::new(n2.clone(), n2 - 1u32)
            })
        })
        .collect();
    let mut value = RealBall::one(EULER_BITS);
    for q in &locals {
        value = &value * &RealBall::from_rat(q, EULER_BITS);
    }
    // at most three primes above each p, each with -log(1 - N^-2) <= 1/(n^2 - 1):
    // the tail factor lies in [1, exp(t)] with t = 3.01 / bound, and exp(t) <= 1 + t + t^2
    let t = Rat::new(BigInt::from(301), BigInt::from(prime_bound) * 100u32);
    let top = rat(1, 1) + &t + &t * &t;
    let upper = &value * &RealBall::from_rat(&top, EULER_BITS);
    Ok(EulerTruncation { prime_bound, value: value.hull(&upper), terms_used: locals.len() })
}

/// Estimate of `h_K` with its nearest integer.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassNumberEstimate {
    pub prime_bound: u64,
    pub residue: f64,
    pub regulator: RealBall,
    pub estimate: RealBall,
    pub rounded: u64,
}

/// Default distance to the nearest integer accepted by [`analytic_class_number`].
pub const DEFAULT_MARGIN: f64 = 0.2;

/// `h ~ res * sqrt(D) / (4 R)` with `res` the truncated `zeta_K / zeta` product at `s = 1`.
///
/// The truncation error is not bounded rigorously; `estimate` carries only the
/// rounding and regulator radii. `Inconclusive` means the midpoint is farther
/// than `margin` from every integer.
pub fn analytic_class_number(spec: &FieldSpec, prime_bound: u64, margin: f64) -> Result<ClassNumberEstimate> {
    spec.require_valid()?;
    if prime_bound < 2 {
        return Err(Error::OutOfRange(format!("prime bound {prime_bound} < 2")));
    }
    let data = splitting_data(spec, prime_bound);
    // log of prod_p (1 - 1/p) / prod_{P|p} (1 - 1/N(P)), summed in a fixed order
    let logs: Vec<f64> = data
        .par_iter()
        .map(|(p, fs)| {
            let p = *p as f64;
            let mut s = (-1.0 / p).ln_1p();
            for &f in fs {
                s -= (-p.powi(-(f as i32))).ln_1p();
            }
            s
        })
        .collect();
    let residue = logs.iter().sum::<f64>().exp();
    let bits = spec.schedule().start;
    let regulator = spec.regulator(bits)?;
    if regulator.sign() != Some(1) {
        return Err(Error::Invariant("regulator not certified positive".into()));
    }
    let sqrt_d = RealBall::from_int(&BigInt::from(spec.disc()), bits).sqrt()?;
    let res = RealBall::from_rat(&f64_to_rat(residue), bits);
    let estimate = (&res * &sqrt_d).checked_div(&regulator.mul_int(&BigInt::from(4)))?;
    let mid = estimate.mid_f64();
    let nearest = mid.round();
    if nearest < 1.0 || (mid - nearest).abs() > margin {
        return Err(Error::Inconclusive { estimate: mid, margin });
    }
    Ok(ClassNumberEstimate { prime_bound, residue, regulator, estimate, rounded: nearest as u64 })
}

/// Repeats [`analytic_class_number`] with the bound multiplied by 4 until it
/// is conclusive or `max_bound` is passed.
pub fn analytic_class_number_escalating(
    spec: &FieldSpec,
    start_bound: u64,
    max_bound: u64,
    margin: f64,
) -> Result<ClassNumberEstimate> {
    let mut bound = start_bound;
    loop {
        match analytic_class_number(spec, bound, margin) {
            Err(Error::Inconclusive { .. }) if bound.saturating_mul(4) <= max_bound => bound *= 4,
            other => return other,
        }
    }
}

fn f64_to_rat(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

/// Relative width of a ball, for reporting.
pub fn relative_width(b: &RealBall) -> f64 {
    b.width_f64() / b.mid_f64().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::closed_form_partial_2;

    fn closed_form_ball(m: i64, bits: u32) -> RealBall {
        let spec = FieldSpec::new_valid(m).unwrap();
        let d = RealBall::from_int(&BigInt::from(spec.disc()), bits);
        let d32 = &d * &d.sqrt().unwrap();
        let num = &RealBall::from_rat(&closed_form_partial_2(m), bits) * &RealBall::pi(bits).pow(6);
        num.checked_div(&d32).unwrap()
    }

    #[test]
    fn euler_product_contains_closed_form_small_bound() {
        let spec = FieldSpec::new_valid(4).unwrap();
        let e = euler_zeta2(&spec, 20_000).unwrap();
        let exact = closed_form_ball(4, 160);
        assert!(exact.is_subset_of(&e.value), "{} vs {}", e.value, exact);
        assert!((exact.mid_f64() - 1.2445).abs() < 1e-3);
        assert!(e.value.width_f64() < 1e-3);
    }

    #[test]
    fn refinement_nests() {
        let spec = FieldSpec::new_valid(5).unwrap();
        let a = euler_zeta2(&spec, 2_000).unwrap();
        let b = euler_zeta2(&spec, 8_000).unwrap();
        let widened = a.value.inflate(&rat(1, 1_000_000_000));
        assert!(b.value.is_subset_of(&widened));
        assert!(b.value.width_f64() < a.value.width_f64());
    }

    #[test]
    fn class_number_small_cases() {
        for (m, one) in [(4, true), (6, true), (7, false)] {
            let spec = FieldSpec::new_valid(m).unwrap();
            let h = analytic_class_number_escalating(&spec, 100_000, 1_600_000, DEFAULT_MARGIN).unwrap();
            assert_eq!(h.rounded == 1, one, "m={m}: {}", h.estimate);
        }
    }
}
