//! Siegel's formula for `zeta_K(-1)`: enumeration of the trace-one totally
//! positive elements of the codifferent, their ideals, and the parametrized
//! point set `T` with its norm polynomial.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rat, rat_int, Rat, RealBall};
use crate::field::{FieldElem, FieldSpec};
use crate::ideal::{different_generator, factor_principal, is_prime_ideal, sigma1, FactoredIdeal};

/// `nu = b_1 w~_1 + b_2 w~_2 + b_3 w~_3` with `b_1 = Tr(nu) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct S1Element {
    pub coords: [i64; 3],
    pub nu: FieldElem,
    pub embeddings: [RealBall; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub s: i64,
    pub t: i64,
}

/// All `nu` in the codifferent with `nu >> 0` and `Tr(nu) = 1`, sorted by coordinates.
pub fn enumerate_s1(spec: &FieldSpec) -> Result<Vec<S1Element>> {
    spec.require_valid()?;
    let dual = spec.dual_basis();
    let schedule = spec.schedule();
    let mut last_err = None;
    for bits in schedule.steps() {
        match enumerate_at(spec, &dual, bits) {
            Ok(v) => return Ok(v),
            Err(e @ Error::PrecisionExhausted { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::PrecisionExhausted { what: "S1 search box", max_bits: schedule.cap }))
}

fn enumerate_at(spec: &FieldSpec, dual: &[FieldElem; 3], bits: u32) -> Result<Vec<S1Element>> {
    let exhausted = || Error::PrecisionExhausted { what: "S1 search box", max_bits: bits };
    let emb = dual.each_ref().map(|w| spec.embeddings(w, bits));
    let y = &emb[2];
    let y_sign: Vec<i8> = y.iter().map(|v| v.sign().ok_or_else(exhausted)).collect::<Result<_>>()?;
    let roots = spec.roots_at(bits);
    // b = Tr(nu alpha) is a convex combination of the conjugates of alpha
    let b_lo = floor(&roots[2].lower());
    let b_hi = ceil(&roots[0].upper());

    let mut candidates = Vec::new();
    for b in b_lo..=b_hi {
        let bb = BigInt::from(b);
        let (mut lo, mut hi): (Option<i64>, Option<i64>) = (None, None);
        for i in 0..3 {
            let x = &emb[0][i] + &emb[1][i].mul_int(&bb);
            // x + c y > 0
            let r = (-x).checked_div(&y[i]).map_err(|_| exhausted())?;
            if y_sign[i] > 0 {
                let v = floor(&r.lower());
                lo = Some(lo.map_or(v, |l| l.max(v)));
            } else {
                let v = ceil(&r.upper());
                hi = Some(hi.map_or(v, |h| h.min(v)));
            }
        }
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return Err(Error::Invariant("codifferent search box is unbounded".into()));
        };
        candidates.extend((lo..=hi).map(|c| [1, b, c]));
    }

    let mut out: Vec<S1Element> = candidates
        .into_par_iter()
        .filter_map(|coords| {
            let nu = &(&dual[0] + &dual[1].scale(&rat_int(coords[1]))) + &dual[2].scale(&rat_int(coords[2]));
            if !nu.is_totally_positive() {
                return None;
            }
            let embeddings = spec.embeddings(&nu, bits);
            Some(S1Element { coords, nu, embeddings })
        })
        .collect();
    out.sort_by_key(|e| e.coords);
    Ok(out)
}

fn floor(q: &Rat) -> i64 {
    q.floor().to_integer().to_i64().expect("search bound fits i64")
}

fn ceil(q: &Rat) -> i64 {
    q.ceil().to_integer().to_i64().expect("search bound fits i64")
}

/// The point set `T` in row order.
pub fn t_set(m: i64) -> Vec<LatticePoint> {
    assert!(m >= 4, "T is defined for m >= 4");
    let mut out: Vec<LatticePoint> = (1..m).map(|t| LatticePoint { s: 1, t }).collect();
    for s in 2..=m - 2 {
        out.extend((s..=m).map(|t| LatticePoint { s, t }));
    }
    out.push(LatticePoint { s: m - 1, t: m });
    out
}

/// `|S_1| = |T| = (m^2 + m - 6) / 2`.
pub fn expected_s1_size(m: i64) -> usize {
    ((m * m + m - 6) / 2) as usize
}

pub fn f_st(m: i64, s: i64, t: i64) -> i128 {
    let (m, s, t) = (m as i128, s as i128, t as i128);
    (-s * s + (t + 1) * s) * m * m + ((t - 2) * s * s - (t * t - t) * s - (t * t + t)) * m
        + (s * s * s - 2 * s * s - (t * t - 3 * t - 1) * s + t * t * t - t - 1)
}

/// One summand of Siegel's formula.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelTerm {
    pub element: S1Element,
    /// `nu f'(alpha)`, an integral generator of `(nu) D_K`.
    pub mu: FieldElem,
    pub ideal: FactoredIdeal,
    pub sigma1: BigInt,
    pub prime: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiegelResult {
    pub terms: Vec<SiegelTerm>,
    pub sigma_sum: BigInt,
    pub zeta_minus1: Rat,
}

/// `-8/504 = -1/63`.
pub fn siegel_factor() -> Rat {
    rat(-8, 504)
}

pub fn siegel(spec: &FieldSpec) -> Result<SiegelResult> {
    let elements = enumerate_s1(spec)?;
    let diff = different_generator(spec);
    let terms: Vec<SiegelTerm> = elements
        .into_par_iter()
        .map(|element| {
            let mu = &element.nu * &diff;
            if !mu.is_integral() {
                return Err(Error::Invariant(format!("nu f'(alpha) not integral for {:?}", element.coords)));
            }
            let ideal = factor_principal(spec, &mu)?;
            let sigma1 = sigma1(&ideal);
            let prime = is_prime_ideal(&ideal);
            Ok(SiegelTerm { element, mu, ideal, sigma1, prime })
        })
        .collect::<Result<_>>()?;
    let sigma_sum: BigInt = terms.iter().map(|t| &t.sigma1).sum();
    let zeta_minus1 = siegel_factor() * Rat::from_integer(sigma_sum.clone());
    Ok(SiegelResult { terms, sigma_sum, zeta_minus1 })
}

pub fn siegel_zeta_minus1(spec: &FieldSpec) -> Result<Rat> {
    Ok(siegel(spec)?.zeta_minus1)
}

/// Multiset of `N((nu) D_K)` over `S_1` equals that of `|f_m(s,t)|` over `T`.
pub fn norm_multiset_check(spec: &FieldSpec) -> Result<bool> {
    let result = siegel(spec)?;
    Ok(norms_match(spec.m(), &result))
}

pub fn norms_match(m: i64, result: &SiegelResult) -> bool {
    let mut a: Vec<u64> = result.terms.iter().map(|t| t.ideal.norm).collect();
    let mut b: Vec<u64> = t_set(m).iter().map(|p| f_st(m, p.s, p.t).unsigned_abs() as u64).collect();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// `sum_T f_m(s,t) + |T|`, which equals `Sum (1 + N)` over `S_1`.
pub fn t_sigma_lower_bound(m: i64) -> BigInt {
    let s: i128 = t_set(m).iter().map(|p| f_st(m, p.s, p.t)).sum();
    BigInt::from(s) + expected_s1_size(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hp::closed_form_partial_minus1;

    #[test]
    fn t_set_examples() {
        let t: Vec<(i64, i64)> = t_set(4).iter().map(|p| (p.s, p.t)).collect();
        assert_eq!(t, vec![(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (2, 4), (3, 4)]);
        for m in 4..=100 {
            let t = t_set(m);
            assert_eq!(t.len(), expected_s1_size(m));
            assert!(t.contains(&LatticePoint { s: 2, t: 3 }));
            assert!(t.iter().all(|p| f_st(m, p.s, p.t) > 1), "m={m}");
            assert_eq!(f_st(m, 2, 3), ((2 * m - 5) * (2 * m - 5)) as i128);
        }
    }

    #[test]
    fn f_st_examples() {
        assert_eq!(f_st(4, 2, 3), 9);
        assert_eq!(f_st(4, 1, 1), 5);
        assert_eq!(f_st(4, 3, 4), 3);
    }

    #[test]
    fn s1_at_m4() {
        let spec = FieldSpec::new_valid(4).unwrap();
        let s1 = enumerate_s1(&spec).unwrap();
        assert_eq!(s1.len(), 7);
        for e in &s1 {
            assert_eq!(e.nu.trace(), rat(1, 1));
            for x in &e.embeddings {
                assert_eq!(x.sign(), Some(1));
                assert!(x.upper() < rat(1, 1));
            }
        }
        let r = siegel(&spec).unwrap();
        let mut norms: Vec<u64> = r.terms.iter().map(|t| t.ideal.norm).collect();
        norms.sort_unstable();
        assert_eq!(norms, vec![3, 3, 3, 5, 5, 7, 9]);
        assert_eq!(r.sigma_sum, BigInt::from(42));
        assert_eq!(r.zeta_minus1, rat(-2, 3));
        assert!(r.terms.iter().all(|t| t.prime));
        assert!(norms_match(4, &r));
    }

    #[test]
    fn m5_matches_closed_form() {
        let spec = FieldSpec::new_valid(5).unwrap();
        assert_eq!(enumerate_s1(&spec).unwrap().len(), 12);
        let r = siegel(&spec).unwrap();
        assert_eq!(r.sigma_sum, BigInt::from(168));
        assert_eq!(r.zeta_minus1, closed_form_partial_minus1(5));
    }

    #[test]
    fn multisets_and_bounds_for_small_m() {
        for m in 4..=30 {
            let Ok(spec) = FieldSpec::new_valid(m) else { continue };
            let r = siegel(&spec).unwrap();
            assert_eq!(r.terms.len(), expected_s1_size(m), "m={m}");
            assert!(norms_match(m, &r), "m={m}");
            assert!(r.zeta_minus1 <= closed_form_partial_minus1(m), "m={m}");
            assert_eq!(
                siegel_factor() * Rat::from_integer(t_sigma_lower_bound(m)),
                closed_form_partial_minus1(m),
                "m={m}"
            );
        }
    }
}
