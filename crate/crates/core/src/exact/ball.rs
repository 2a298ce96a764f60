//! Fixed-point ball arithmetic over big integers.
//!
//! A [`RealBall`] at precision `p` stores integers `mid` and `rad >= 0` and
//! encloses the real interval `[(mid - rad) / 2^p, (mid + rad) / 2^p]`. Every
//! operation rounds the midpoint and inflates the radius so the enclosure of the
//! exact result is never lost.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rat;
use crate::error::{Error, Result};

/// Guard bits used internally by the transcendental routines.
const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealBall {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_shr(x: &BigInt, bits: u32) -> BigInt {
    x.div_floor(&pow2(bits))
}

fn ceil_shr(x: &BigInt, bits: u32) -> BigInt {
    let d = pow2(bits);
    -((-x).div_floor(&d))
}

impl RealBall {
    /// Builds a ball directly from its fixed-point parts.
    pub fn from_parts(mid: BigInt, rad: BigInt, prec: u32) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        RealBall { mid, rad, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_int(&BigInt::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(&BigInt::one(), prec)
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        RealBall { mid: n << prec as usize, rad: BigInt::zero(), prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    /// Tightest enclosure of an exact rational at precision `prec`.
    pub fn from_rat(q: &Rat, prec: u32) -> Self {
        let scaled = q.numer() << prec as usize;
        let (mid, rem) = scaled.div_mod_floor(q.denom());
        let rad = if rem.is_zero() { BigInt::zero() } else { BigInt::one() };
        RealBall { mid, rad, prec }
    }

    /// Ball guaranteed to contain `[center - radius, center + radius]`.
    pub fn from_rat_with_radius(center: &Rat, radius: &Rat, prec: u32) -> Self {
        assert!(!radius.is_negative(), "negative radius");
        let mut b = Self::from_rat(center, prec);
        let r = radius * Rat::from_integer(pow2(prec));
        b.rad += r.ceil().to_integer();
        b
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    /// Midpoint as an exact rational.
    pub fn midpoint(&self) -> Rat {
        Rat::new(self.mid.clone(), pow2(self.prec))
    }

    /// Radius as an exact rational.
    pub fn radius(&self) -> Rat {
        Rat::new(self.rad.clone(), pow2(self.prec))
    }

    pub fn lower(&self) -> Rat {
        Rat::new(&self.mid - &self.rad, pow2(self.prec))
    }

    pub fn upper(&self) -> Rat {
        Rat::new(&self.mid + &self.rad, pow2(self.prec))
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_rat(&self, q: &Rat) -> bool {
        &self.lower() <= q && q <= &self.upper()
    }

    /// Whether `self` is a subset of `other` (as real intervals).
    pub fn is_subset_of(&self, other: &RealBall) -> bool {
        other.lower() <= self.lower() && self.upper() <= other.upper()
    }

    /// +1 or -1 when the ball excludes zero, `None` otherwise.
    pub fn sign(&self) -> Option<i8> {
        if &self.mid - &self.rad > BigInt::zero() {
            Some(1)
        } else if &self.mid + &self.rad < BigInt::zero() {
            Some(-1)
        } else {
            None
        }
    }

    /// Width of the enclosure, `2 * radius`, as a float (rounded up slightly).
    pub fn width_f64(&self) -> f64 {
        2.0 * scaled_to_f64(&self.rad, self.prec) * (1.0 + 1e-12)
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.prec)
    }

    /// Re-expresses the ball at another precision, rounding outward.
    pub fn with_precision(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = (prec - self.prec) as usize;
                RealBall { mid: &self.mid << s, rad: &self.rad << s, prec }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                let exact = self.mid.is_multiple_of(&pow2(s)) && self.rad.is_multiple_of(&pow2(s));
                let mid = floor_shr(&self.mid, s);
                let mut rad = ceil_shr(&self.rad, s);
                if !exact {
                    rad += 1;
                }
                RealBall { mid, rad, prec }
            }
        }
    }

    fn check_prec(&self, other: &RealBall) {
        assert_eq!(self.prec, other.prec, "mixed-precision ball arithmetic");
    }

    pub fn abs(&self) -> Self {
        if self.mid.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Smallest ball containing both inputs.
    pub fn hull(&self, other: &RealBall) -> Self {
        self.check_prec(other);
        let lo = (&self.mid - &self.rad).min(&other.mid - &other.rad);
        let hi = (&self.mid + &self.rad).max(&other.mid + &other.rad);
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        let rad = &hi - &mid;
        RealBall { mid, rad, prec: self.prec }
    }

    /// Adds a non-negative rational to the radius.
    pub fn inflate(&self, extra: &Rat) -> Self {
        let mut out = self.clone();
        out.rad += (extra * Rat::from_integer(pow2(self.prec))).ceil().to_integer();
        out
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        RealBall { mid: &self.mid * k, rad: &self.rad * k.abs(), prec: self.prec }
    }

    pub fn div_int(&self, k: &BigInt) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (mid, rem) = self.mid.div_mod_floor(k);
        let ka = k.abs();
        let mut rad = -((-&self.rad).div_floor(&ka));
        if !rem.is_zero() {
            rad += 1;
        }
        Ok(RealBall { mid, rad, prec: self.prec })
    }

    pub fn checked_div(&self, other: &RealBall) -> Result<Self> {
        self.check_prec(other);
        let b = other.mid.abs();
        if b <= other.rad {
            return Err(Error::DivisionByZero);
        }
        let a = &self.mid;
        let scale = pow2(self.prec);
        let (mid, rem) = (a * &scale).div_mod_floor(&other.mid);
        let num = (&self.rad * &b + &other.rad * a.abs()) * &scale;
        let den = &b * (&b - &other.rad);
        let mut rad = -((-num).div_floor(&den));
        if !rem.is_zero() {
            rad += 1;
        }
        Ok(RealBall { mid, rad, prec: self.prec })
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.prec).checked_div(self)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.prec);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Square root of a ball whose lower end is non-negative.
    pub fn sqrt(&self) -> Result<Self> {
        let lo = &self.mid - &self.rad;
        if lo.is_negative() {
            return Err(Error::Invariant("sqrt of a ball reaching below zero".into()));
        }
        let hi = &self.mid + &self.rad;
        let shift = self.prec as usize;
        let lo_r = (lo << shift).sqrt();
        let hi_scaled = hi << shift;
        let mut hi_r = hi_scaled.sqrt();
        if &hi_r * &hi_r != hi_scaled {
            hi_r += 1;
        }
        let mid: BigInt = (&lo_r + &hi_r).div_floor(&BigInt::from(2));
        let rad = &hi_r - &mid;
        Ok(RealBall { mid, rad, prec: self.prec })
    }

    /// Natural logarithm of a ball contained in `(0, inf)`.
    pub fn ln(&self) -> Result<Self> {
        let lo = &self.mid - &self.rad;
        if !lo.is_positive() {
            return Err(Error::Invariant("ln of a ball not certified positive".into()));
        }
        let hi = &self.mid + &self.rad;
        let a = ln_point(&lo, self.prec);
        if self.rad.is_zero() {
            return Ok(a);
        }
        let b = ln_point(&hi, self.prec);
        Ok(a.hull(&b))
    }

    /// Enclosure of pi.
    pub fn pi(prec: u32) -> Self {
        let w = prec + GUARD_BITS;
        let a = arctan_inv(5, w).mul_int(&BigInt::from(16));
        let b = arctan_inv(239, w).mul_int(&BigInt::from(4));
        (&a - &b).with_precision(prec)
    }
}

fn scaled_to_f64(x: &BigInt, prec: u32) -> f64 {
    if prec > 64 {
        let s = prec - 64;
        let top = floor_shr(x, s);
        top.to_f64().unwrap_or(f64::NAN) / 2f64.powi(64)
    } else {
        x.to_f64().unwrap_or(f64::NAN) / 2f64.powi(prec as i32)
    }
}

/// `2 * atanh(num / den)` for `0 <= num / den <= 1/3`, as a ball at `w` bits.
fn two_atanh(num: &BigInt, den: &BigInt, w: u32) -> RealBall {
    let z = RealBall::from_rat(&Rat::new(num.clone(), den.clone()), w);
    let z2 = z.square();
    let eps = RealBall::from_parts(BigInt::zero(), BigInt::one(), w);
    let mut sum = RealBall::zero(w);
    let mut power = z.clone();
    let mut k: u64 = 1;
    loop {
        sum = &sum + &power.div_int(&BigInt::from(k)).expect("odd divisor");
        power = &power * &z2;
        k += 2;
        // |power| < 2^-w  =>  remaining tail < (9/8) |power|
        if (&power.mid.abs() + &power.rad) <= eps.rad {
            let tail = (&power.mid.abs() + &power.rad) * 9 / 8 + 1;
            sum.rad += tail;
            break;
        }
    }
    sum.mul_int(&BigInt::from(2))
}

fn ln2(w: u32) -> RealBall {
    two_atanh(&BigInt::one(), &BigInt::from(3), w)
}

/// Enclosure of `ln(n / 2^prec)` for an integer `n > 0`.
fn ln_point(n: &BigInt, prec: u32) -> RealBall {
    let w = prec + GUARD_BITS;
    let b = n.bits() - 1;
    // n / 2^b lies in [1, 2); z = (y - 1) / (y + 1) lies in [0, 1/3).
    let base = BigInt::one() << b as usize;
    let z_num = n - &base;
    let z_den = n + &base;
    let mut out = two_atanh(&z_num, &z_den, w);
    let k = b as i64 - prec as i64;
    if k != 0 {
        out = &out + &ln2(w).mul_int(&BigInt::from(k));
    }
    out.with_precision(prec)
}

/// `arctan(1/n)` by its alternating series.
fn arctan_inv(n: u64, w: u32) -> RealBall {
    let n_big = BigInt::from(n);
    let n2 = BigInt::from(n * n);
    let eps = BigInt::one();
    let mut sum = RealBall::zero(w);
    let mut power = RealBall::one(w).div_int(&n_big).expect("n > 0");
    let mut k: u64 = 1;
    let mut negative = false;
    loop {
        let term = power.div_int(&BigInt::from(k)).expect("odd divisor");
        sum = if negative { &sum - &term } else { &sum + &term };
        power = power.div_int(&n2).expect("n > 0");
        k += 2;
        negative = !negative;
        if &power.mid.abs() + &power.rad <= eps {
            // alternating series: the first omitted term bounds the tail
            sum.rad += &power.mid.abs() + &power.rad + 1;
            break;
        }
    }
    sum
}

impl Neg for &RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        RealBall { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }
}

impl Neg for RealBall {
    type Output = RealBall;
    fn neg(self) -> RealBall {
        -&self
    }
}

impl Add for &RealBall {
    type Output = RealBall;
    fn add(self, other: &RealBall) -> RealBall {
        self.check_prec(other);
        RealBall { mid: &self.mid + &other.mid, rad: &self.rad + &other.rad, prec: self.prec }
    }
}

impl Sub for &RealBall {
    type Output = RealBall;
    fn sub(self, other: &RealBall) -> RealBall {
        self.check_prec(other);
        RealBall { mid: &self.mid - &other.mid, rad: &self.rad + &other.rad, prec: self.prec }
    }
}

impl Mul for &RealBall {
    type Output = RealBall;
    fn mul(self, other: &RealBall) -> RealBall {
        self.check_prec(other);
        let p = self.prec;
        let prod = &self.mid * &other.mid;
        let exact_mid = prod.is_multiple_of(&pow2(p));
        let mid = floor_shr(&prod, p);
        let err = self.mid.abs() * &other.rad + other.mid.abs() * &self.rad + &self.rad * &other.rad;
        let mut rad = ceil_shr(&err, p);
        if !exact_mid {
            rad += 1;
        }
        RealBall { mid, rad, prec: p }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RealBall {
            type Output = RealBall;
            fn $f(self, other: RealBall) -> RealBall {
                (&self).$f(&other)
            }
        }
        impl $tr<&RealBall> for RealBall {
            type Output = RealBall;
            fn $f(self, other: &RealBall) -> RealBall {
                (&self).$f(other)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e} +/- {:.3e}]", self.mid_f64(), self.width_f64() / 2.0)
    }
}

/// Doubling precision schedule `start, 2*start, ...` capped at `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionSchedule {
    pub start: u32,
    pub cap: u32,
}

impl Default for PrecisionSchedule {
    fn default() -> Self {
        PrecisionSchedule { start: 128, cap: 4096 }
    }
}

impl PrecisionSchedule {
    pub fn new(start: u32, cap: u32) -> Self {
        assert!(start > 0 && cap >= start, "invalid precision schedule");
        PrecisionSchedule { start, cap }
    }

    pub fn steps(&self) -> impl Iterator<Item = u32> {
        let cap = self.cap;
        let mut next = Some(self.start);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= cap { None } else { Some((cur * 2).min(cap)) };
            Some(cur)
        })
    }
}

/// The unique integer inside `b`, if `b` has radius below one half and
/// contains exactly one integer.
pub fn reconstruct_integer(b: &RealBall) -> Result<BigInt> {
    let half = pow2(b.prec) >> 1usize;
    if b.rad >= half {
        return Err(Error::AmbiguousBall);
    }
    let lo = &b.mid - &b.rad;
    let hi = &b.mid + &b.rad;
    let first = -((-lo).div_floor(&pow2(b.prec)));
    let last = floor_shr(&hi, b.prec);
    if first == last {
        Ok(first)
    } else {
        Err(Error::AmbiguousBall)
    }
}

/// Sign of a quantity, re-evaluated along `schedule` until the enclosure
/// excludes zero.
pub fn certified_sign<F>(schedule: PrecisionSchedule, mut eval: F) -> Result<i8>
where
    F: FnMut(u32) -> Result<RealBall>,
{
    for bits in schedule.steps() {
        if let Some(s) = eval(bits)?.sign() {
            return Ok(s);
        }
    }
    Err(Error::SignUnresolved { max_bits: schedule.cap })
}

/// Integer certified by evaluating along `schedule` until reconstruction succeeds.
pub fn certified_integer<F>(schedule: PrecisionSchedule, what: &'static str, mut eval: F) -> Result<BigInt>
where
    F: FnMut(u32) -> Result<RealBall>,
{
    for bits in schedule.steps() {
        if let Ok(n) = reconstruct_integer(&eval(bits)?) {
            return Ok(n);
        }
    }
    Err(Error::PrecisionExhausted { what, max_bits: schedule.cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn ball(center: Rat, radius: Rat) -> RealBall {
        RealBall::from_rat_with_radius(&center, &radius, 128)
    }

    #[test]
    fn reconstruct_examples() {
        let b = ball(rat(30_000_001, 10_000_000), rat(1, 100_000));
        assert_eq!(reconstruct_integer(&b).unwrap(), BigInt::from(3));
        let b = ball(rat(5, 2), rat(6, 10));
        assert_eq!(reconstruct_integer(&b), Err(Error::AmbiguousBall));
        // radius below 1/2 but no integer inside
        let b = ball(rat(5, 2), rat(1, 10));
        assert_eq!(reconstruct_integer(&b), Err(Error::AmbiguousBall));
        let b = ball(rat(-7, 1), rat(0, 1));
        assert_eq!(reconstruct_integer(&b).unwrap(), BigInt::from(-7));
    }

    #[test]
    fn sign_examples() {
        let s = PrecisionSchedule::default();
        let a = ball(rat(1, 2), rat(1, 10));
        assert_eq!(certified_sign(s, |_| Ok(a.clone())), Ok(1));
        let b = ball(rat(-32, 10), rat(1, 100));
        assert_eq!(certified_sign(s, |_| Ok(b.clone())), Ok(-1));
        let tiny = Rat::new(BigInt::one(), BigInt::from(10).pow(50));
        let z = RealBall::from_rat_with_radius(&rat(0, 1), &tiny, 4096);
        assert_eq!(
            certified_sign(s, |_| Ok(z.clone())),
            Err(Error::SignUnresolved { max_bits: 4096 })
        );
    }

    #[test]
    fn schedule_doubles_to_cap() {
        let steps: Vec<u32> = PrecisionSchedule::new(128, 1000).steps().collect();
        assert_eq!(steps, vec![128, 256, 512, 1000]);
        let steps: Vec<u32> = PrecisionSchedule::default().steps().collect();
        assert_eq!(steps, vec![128, 256, 512, 1024, 2048, 4096]);
    }

    #[test]
    fn pi_and_logs() {
        let pi = RealBall::pi(256);
        // 3.14159265358979323846264338327950288419716939937510
        let lo = rat(314159265358979323, 100000000000000000);
        let hi = rat(314159265358979324, 100000000000000000);
        assert!(lo < pi.lower() && pi.upper() < hi);
        assert!(pi.width_f64() < 1e-70);

        let l2 = RealBall::from_i64(2, 200).ln().unwrap();
        assert!(l2.contains_rat(&l2.midpoint()));
        assert!((l2.mid_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        let l10 = RealBall::from_rat(&rat(1, 10), 200).ln().unwrap();
        assert!((l10.mid_f64() + std::f64::consts::LN_10).abs() < 1e-15);
        assert!(l10.width_f64() < 1e-50);
        assert_eq!(RealBall::one(128).ln().unwrap().sign(), None);
    }

    #[test]
    fn sqrt_encloses() {
        let r = RealBall::from_i64(257, 128).sqrt().unwrap();
        let sq = r.square();
        assert!(sq.contains_rat(&rat(257, 1)));
        assert!(r.width_f64() < 1e-30);
    }

    #[test]
    fn division_encloses() {
        let a = RealBall::from_rat(&rat(22, 7), 128);
        let b = RealBall::from_rat(&rat(-3, 11), 128);
        let q = a.checked_div(&b).unwrap();
        assert!(q.contains_rat(&(rat(22, 7) / rat(-3, 11))));
        let z = ball(rat(0, 1), rat(1, 10));
        assert_eq!(a.checked_div(&z), Err(Error::DivisionByZero));
    }

    #[test]
    fn precision_drop_keeps_enclosure() {
        let x = RealBall::from_rat(&rat(1, 3), 512);
        let y = x.with_precision(64);
        assert!(y.contains_rat(&rat(1, 3)));
        assert!(x.is_subset_of(&y));
    }
}
