//! Integer factorization: trial division, Miller-Rabin and Pollard-Brent rho.

use crate::error::{Error, Result};

/// Limits for [`factor_u64`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division runs over all primes up to this bound.
    pub trial_limit: u64,
    /// Total number of rho iterations allowed across all splits.
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { trial_limit: 1_000_000, rho_iterations: 50_000_000 }
    }
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho; returns a non-trivial factor of the odd
/// composite `n`, spending at most `*budget` iterations.
fn pollard_brent(n: u64, budget: &mut u64) -> Option<u64> {
    for c in 1..u64::MAX {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1;
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = BATCH.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                if *budget < steps {
                    return None;
                }
                *budget -= steps;
                g = gcd(q, n);
                k += steps;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

fn push_factor(out: &mut Vec<(u64, u32)>, p: u64, e: u32) {
    match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += e,
        None => out.push((p, e)),
    }
}

/// Prime factorization of `n >= 1` as sorted `(prime, exponent)` pairs.
pub fn factor_u64(n: u64, budget: FactorBudget) -> Result<Vec<(u64, u32)>> {
    assert!(n >= 1, "factor_u64 needs a positive integer");
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p <= budget.trial_limit && p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        let mut iterations = budget.rho_iterations;
        let mut stack = vec![rest];
        while let Some(k) = stack.pop() {
            if k == 1 {
                continue;
            }
            if is_prime_u64(k) {
                push_factor(&mut out, k, 1);
                continue;
            }
            let r = isqrt(k);
            if r * r == k {
                stack.push(r);
                stack.push(r);
                continue;
            }
            match pollard_brent(k, &mut iterations) {
                Some(d) => {
                    stack.push(d);
                    stack.push(k / d);
                }
                None => return Err(Error::FactorizationTimeout { n: n as u128 }),
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub fn is_squarefree(n: u64, budget: FactorBudget) -> Result<bool> {
    Ok(factor_u64(n, budget)?.iter().all(|&(_, e)| e == 1))
}

/// Primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_values() {
        let b = FactorBudget::default();
        assert_eq!(factor_u64(1, b).unwrap(), vec![]);
        assert_eq!(factor_u64(257, b).unwrap(), vec![(257, 1)]);
        assert_eq!(factor_u64(697, b).unwrap(), vec![(17, 1), (41, 1)]);
        assert_eq!(factor_u64(11417, b).unwrap(), vec![(7, 2), (233, 1)]);
        assert_eq!(factor_u64(1 << 20, b).unwrap(), vec![(2, 20)]);
    }

    #[test]
    fn large_semiprime_uses_rho() {
        let b = FactorBudget { trial_limit: 1000, rho_iterations: 10_000_000 };
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(factor_u64(p * q, b).unwrap(), vec![(q, 1), (p, 1)]);
        assert_eq!(factor_u64(p * p, b).unwrap(), vec![(p, 2)]);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let b = FactorBudget { trial_limit: 10, rho_iterations: 1 };
        let n = 1_000_000_007u64 * 998_244_353u64;
        assert!(matches!(factor_u64(n, b), Err(Error::FactorizationTimeout { .. })));
    }

    #[test]
    fn sieve_matches_miller_rabin() {
        let ps = primes_up_to(10_000);
        let mr: Vec<u64> = (0..=10_000).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(ps, mr);
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(3_215_031_751));
    }

    proptest! {
        #[test]
        fn factorization_multiplies_back(n in 1u64..2_000_000_000_000) {
            let f = factor_u64(n, FactorBudget::default()).unwrap();
            let prod: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            prop_assert_eq!(prod, n);
            prop_assert!(f.iter().all(|&(p, _)| is_prime_u64(p)));
        }
    }
}
