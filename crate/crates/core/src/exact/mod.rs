//! Exact rationals, Bernoulli machinery, extended multinomials and certified
//! ball arithmetic.

mod ball;
mod bernoulli;
pub mod rat_string;

pub use ball::{certified_integer, certified_sign, reconstruct_integer, PrecisionSchedule, RealBall};
pub use bernoulli::{bernoulli_poly_eval, periodic_bernoulli, shared_table, BernoulliTable};

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Reduced rational with positive denominator.
pub type Rat = num_rational::BigRational;

/// Shorthand for `n / d` as a [`Rat`].
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rat {
    Rat::from_integer(n.into())
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Multinomial `k! / (l! m! (k-l-m)!)` extended to `k = -1` by
/// `(-1)^(l+m) C(l+m, l)`, and 0 whenever neither branch applies (including
/// negative `l` or `m`).
pub fn multinomial(k: i64, l: i64, m: i64) -> BigInt {
    if l < 0 || m < 0 {
        return BigInt::zero();
    }
    let (l, m) = (l as u64, m as u64);
    if k >= 0 {
        let k = k as u64;
        if l + m > k {
            return BigInt::zero();
        }
        factorial(k) / (factorial(l) * factorial(m) * factorial(k - l - m))
    } else if k == -1 {
        let c = binomial(l + m, l);
        if (l + m) % 2 == 0 {
            c
        } else {
            -c
        }
    } else {
        BigInt::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(6, 2, 2), BigInt::from(90));
        assert_eq!(multinomial(-1, 1, 1), BigInt::from(2));
        assert_eq!(multinomial(-1, 1, 0), BigInt::from(-1));
        assert_eq!(multinomial(-1, 2, 1), BigInt::from(-3));
        assert_eq!(multinomial(3, 2, 2), BigInt::zero());
        assert_eq!(multinomial(-2, 0, 0), BigInt::zero());
        assert_eq!(multinomial(5, -1, 0), BigInt::zero());
        assert_eq!(multinomial(0, 0, 0), BigInt::one());
    }

    proptest! {
        #[test]
        fn multinomial_symmetric(k in -3i64..12, l in -1i64..8, m in -1i64..8) {
            prop_assert_eq!(multinomial(k, l, m), multinomial(k, m, l));
        }

        #[test]
        fn periodic_bernoulli_has_period_one(r in 0usize..9, n in -60i64..60, d in 1i64..13) {
            let x = rat(n, d);
            let shifted = &x + rat(1, 1);
            prop_assert_eq!(periodic_bernoulli(r, &shifted), periodic_bernoulli(r, &x));
        }

        #[test]
        fn periodic_bernoulli_reflection(r in 0usize..9, n in -60i64..60, d in 1i64..13) {
            let x = rat(n, d);
            prop_assume!(r != 1 || !x.is_integer());
            let reflected = rat(1, 1) - &x;
            let sign = if r % 2 == 0 { rat(1, 1) } else { rat(-1, 1) };
            prop_assert_eq!(periodic_bernoulli(r, &reflected), sign * periodic_bernoulli(r, &x));
        }

        #[test]
        fn ball_arithmetic_is_sound(
            a in (-1000i64..1000, 1i64..97),
            b in (-1000i64..1000, 1i64..97),
            c in (1i64..1000, 1i64..97),
        ) {
            let (x, y, z) = (rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1));
            let bx = RealBall::from_rat(&x, 96);
            let by = RealBall::from_rat(&y, 96);
            let bz = RealBall::from_rat(&z, 96);
            let expr = (&(&bx * &by) + &bz).checked_div(&(&bz - &bx.mul_int(&BigInt::from(0)))).unwrap();
            let exact = (&x * &y + &z) / &z;
            prop_assert!(expr.contains_rat(&exact));
            let sq = (&(&bx - &by) * &(&bx + &by)).sqrt().ok();
            if let Some(sq) = sq {
                let v = &x * &x - &y * &y;
                // the enclosure of sqrt(v) squared must contain v
                prop_assert!(sq.square().contains_rat(&v));
            }
        }
    }
}
