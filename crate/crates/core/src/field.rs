//! The cubic fields `K_m = Q(alpha)`, `f_m(x) = x^3 - m x^2 - (m+1) x - 1`.
//!
//! Elements are stored as rational coordinates over `{1, alpha, alpha^2}`.
//! Traces and norms are computed exactly from the multiplication matrix;
//! real embeddings are certified balls around the three real roots, labelled
//! `alpha_1 > alpha_2 > alpha_3` with `alpha = alpha_1`, `alpha' = alpha_2`,
//! `alpha'' = alpha_3`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{certified_integer, certified_sign, rat_int, PrecisionSchedule, Rat, RealBall};
use crate::linalg::{adjugate3, det3, Mat3};
use crate::nt::{is_squarefree, FactorBudget};

/// Largest `m` for which `D_m` fits the 64-bit factoring routines.
pub const MAX_M: i64 = 50_000;

/// `D_m = (m^2 + m - 3)^2 - 32`.
pub fn discriminant(m: i64) -> i64 {
    let a = m * m + m - 3;
    a * a - 32
}

/// Why `{1, alpha, alpha^2}` fails to be an integral basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum InvalidReason {
    /// `m != 3 (mod 7)` but `D_m` has a square factor.
    DiscNotSquarefree,
    /// `m = 24 (mod 49)`.
    CongruentTo24Mod49,
    /// `m = 3 (mod 7)` but `D_m / 49` has a square factor (or 49 does not divide `D_m`).
    ReducedDiscNotSquarefree,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::DiscNotSquarefree => write!(f, "m != 3 mod 7 and D_m is not squarefree"),
            InvalidReason::CongruentTo24Mod49 => write!(f, "m = 3 mod 7 and m = 24 mod 49"),
            InvalidReason::ReducedDiscNotSquarefree => write!(f, "m = 3 mod 7 and D_m/49 is not squarefree"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Validity {
    ValidCaseI,
    ValidCaseII,
    Invalid(InvalidReason),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        !matches!(self, Validity::Invalid(_))
    }
}

impl fmt::Display for Validity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Validity::ValidCaseI => write!(f, "valid (i)"),
            Validity::ValidCaseII => write!(f, "valid (ii)"),
            Validity::Invalid(r) => write!(f, "invalid: {r}"),
        }
    }
}

fn check_m(m: i64) -> Result<()> {
    if m < 4 {
        return Err(Error::DomainError(m));
    }
    if m > MAX_M {
        return Err(Error::OutOfRange(format!("m = {m} exceeds {MAX_M}")));
    }
    Ok(())
}

/// Decides whether `Z[alpha]` is the maximal order of `K_m`.
pub fn validate_m(m: i64, budget: FactorBudget) -> Result<Validity> {
    check_m(m)?;
    let d = discriminant(m) as u64;
    if m.rem_euclid(7) == 3 {
        if m.rem_euclid(49) == 24 {
            return Ok(Validity::Invalid(InvalidReason::CongruentTo24Mod49));
        }
        if !d.is_multiple_of(49) || !is_squarefree(d / 49, budget)? {
            return Ok(Validity::Invalid(InvalidReason::ReducedDiscNotSquarefree));
        }
        Ok(Validity::ValidCaseII)
    } else if is_squarefree(d, budget)? {
        Ok(Validity::ValidCaseI)
    } else {
        Ok(Validity::Invalid(InvalidReason::DiscNotSquarefree))
    }
}

/// Value of `f_m(n / 2^p)` scaled by `2^(3p)`.
fn f_scaled(m: &BigInt, n: &BigInt, p: u32) -> BigInt {
    let s = BigInt::one() << p as usize;
    let s2 = &s * &s;
    n * n * n - m * n * n * &s - (m + 1) * n * &s2 - &s2 * &s
}

/// Bisection on `[lo, hi] / 2^p` given a sign change.
fn bisect(m: &BigInt, lo: Rat, hi: Rat, p: u32) -> RealBall {
    let scale = Rat::from_integer(BigInt::one() << p as usize);
    let mut a = (lo * &scale).floor().to_integer();
    let mut b = (hi * &scale).ceil().to_integer();
    let sa = f_scaled(m, &a, p).signum();
    let sb = f_scaled(m, &b, p).signum();
    assert!(sa != sb && !sa.is_zero() && !sb.is_zero(), "no sign change in root bracket");
    while &b - &a > BigInt::one() {
        let c: BigInt = (&a + &b) >> 1usize;
        let sc = f_scaled(m, &c, p).signum();
        if sc.is_zero() {
            return RealBall::from_parts(c, BigInt::zero(), p);
        }
        if sc == sa {
            a = c;
        } else {
            b = c;
        }
    }
    RealBall::from_parts(a, BigInt::one(), p)
}

/// Certified enclosures of the roots of `f_m`, in decreasing order.
pub fn isolate_roots(m: i64, prec: u32) -> [RealBall; 3] {
    let mb = BigInt::from(m);
    let r = |n: i64, d: i64| Rat::new(BigInt::from(n), BigInt::from(d));
    // f(m) < 0 < f(m+2); f(-1) < 0 < f(-1/2); f(-1/2) > 0 > f(0) for m >= 4
    [
        bisect(&mb, r(m, 1), r(m + 2, 1), prec),
        bisect(&mb, r(-1, 2), r(0, 1), prec),
        bisect(&mb, r(-1, 1), r(-1, 2), prec),
    ]
}

/// Tunables shared by the field-level computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub struct FieldOptions {
    pub schedule: PrecisionSchedule,
    pub factor_budget: FactorBudget,
}


/// The field `K_m` with its discriminant, validity and real roots.
#[derive(Debug)]
pub struct FieldSpec {
    m: i64,
    disc: i64,
    validity: Validity,
    options: FieldOptions,
    roots: RwLock<BTreeMap<u32, [RealBall; 3]>>,
}

impl Clone for FieldSpec {
    fn clone(&self) -> Self {
        FieldSpec {
            m: self.m,
            disc: self.disc,
            validity: self.validity.clone(),
            options: self.options,
            roots: RwLock::new(self.roots.read().expect("root cache poisoned").clone()),
        }
    }
}

impl FieldSpec {
    pub fn new(m: i64) -> Result<Self> {
        Self::with_options(m, FieldOptions::default())
    }

    pub fn with_options(m: i64, options: FieldOptions) -> Result<Self> {
        let validity = validate_m(m, options.factor_budget)?;
        let spec = FieldSpec { m, disc: discriminant(m), validity, options, roots: RwLock::new(BTreeMap::new()) };
        spec.roots_at(options.schedule.start);
        Ok(spec)
    }

    /// Like [`FieldSpec::new`] but fails with `InvalidField` unless `Z[alpha]` is maximal.
    pub fn new_valid(m: i64) -> Result<Self> {
        let spec = Self::new(m)?;
        spec.require_valid()?;
        Ok(spec)
    }

    pub fn require_valid(&self) -> Result<()> {
        match &self.validity {
            Validity::Invalid(r) => Err(Error::InvalidField { m: self.m, reason: r.to_string() }),
            _ => Ok(()),
        }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn validity(&self) -> &Validity {
        &self.validity
    }

    pub fn options(&self) -> &FieldOptions {
        &self.options
    }

    pub fn schedule(&self) -> PrecisionSchedule {
        self.options.schedule
    }

    /// Coefficients of `f_m`, constant term first.
    pub fn f_coeffs(&self) -> [i64; 4] {
        [-1, -(self.m + 1), -self.m, 1]
    }

    /// Root enclosures `alpha_1 > alpha_2 > alpha_3` at `bits` of precision.
    pub fn roots_at(&self, bits: u32) -> [RealBall; 3] {
        if let Some(r) = self.roots.read().expect("root cache poisoned").get(&bits) {
            return r.clone();
        }
        let r = isolate_roots(self.m, bits);
        self.roots.write().expect("root cache poisoned").insert(bits, r.clone());
        r
    }

    pub fn elem(&self, coords: [Rat; 3]) -> FieldElem {
        FieldElem::new(self.m, coords)
    }

    pub fn int_elem(&self, coords: [i64; 3]) -> FieldElem {
        FieldElem::from_ints(self.m, coords)
    }

    pub fn alpha(&self) -> FieldElem {
        FieldElem::alpha(self.m)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::one(self.m)
    }

    /// Power basis `(1, alpha, alpha^2)`.
    pub fn power_basis(&self) -> [FieldElem; 3] {
        [self.int_elem([1, 0, 0]), self.int_elem([0, 1, 0]), self.int_elem([0, 0, 1])]
    }

    /// Certified value of the embedding `x -> x^(i)`, `i in {1, 2, 3}`.
    pub fn embed(&self, x: &FieldElem, i: usize, bits: u32) -> RealBall {
        assert!((1..=3).contains(&i), "embedding index must be 1, 2 or 3");
        let roots = self.roots_at(bits);
        x.eval_at(&roots[i - 1], bits)
    }

    /// All three embeddings at `bits`.
    pub fn embeddings(&self, x: &FieldElem, bits: u32) -> [RealBall; 3] {
        let roots = self.roots_at(bits);
        std::array::from_fn(|i| x.eval_at(&roots[i], bits))
    }

    /// The trace-dual basis of `(1, alpha, alpha^2)`, from the exact Gram matrix.
    pub fn dual_basis(&self) -> [FieldElem; 3] {
        let basis = self.power_basis();
        let gram: Mat3<Rat> = std::array::from_fn(|i| std::array::from_fn(|j| (&basis[i] * &basis[j]).trace()));
        let det = det3(&gram);
        let adj = adjugate3(&gram);
        std::array::from_fn(|j| {
            let coords = std::array::from_fn(|k| &adj[k][j] / &det);
            self.elem(coords)
        })
    }

    /// Closed form of the third dual-basis element.
    pub fn rho(&self) -> FieldElem {
        let m = self.m;
        let d = Rat::from_integer(BigInt::from(-self.disc));
        let c0 = rat_int(m * m * m + 5 * m * m + 5 * m + 4);
        let c1 = rat_int(2 * m * m * m + 7 * m * m + 7 * m + 9);
        let c2 = rat_int(-2 * (m * m + 3 * m + 3));
        self.elem([c0 / &d, c1 / &d, c2 / &d])
    }

    /// `sum over sigma in S_3` of `prod tau1(sigma(j))^e_j * tau2(sigma(j))^e_(j+3)`,
    /// certified as an exact integer. Negative exponents go through exact inverses.
    pub fn galois_trace(&self, tau1: &FieldElem, tau2: &FieldElem, e: [i64; 6]) -> Result<BigInt> {
        let need_inv = |range: std::ops::Range<usize>| e[range].iter().any(|&x| x < 0);
        let tau1_inv = if need_inv(0..3) { Some(tau1.inv()?) } else { None };
        let tau2_inv = if need_inv(3..6) { Some(tau2.inv()?) } else { None };
        certified_integer(self.schedule(), "galois trace", |bits| {
            let emb = |x: &FieldElem, inv: &Option<FieldElem>| {
                let pos = self.embeddings(x, bits);
                let neg = inv.as_ref().map(|y| self.embeddings(y, bits));
                (pos, neg)
            };
            let (t1, t1i) = emb(tau1, &tau1_inv);
            let (t2, t2i) = emb(tau2, &tau2_inv);
            let power = |pos: &[RealBall; 3], neg: &Option<[RealBall; 3]>, root: usize, k: i64| {
                if k >= 0 {
                    pos[root].pow(k as u32)
                } else {
                    neg.as_ref().expect("inverse prepared")[root].pow((-k) as u32)
                }
            };
            let mut sum = RealBall::zero(bits);
            for sigma in PERMUTATIONS {
                let mut term = RealBall::one(bits);
                for j in 0..3 {
                    term = &term * &power(&t1, &t1i, sigma[j], e[j]);
                    term = &term * &power(&t2, &t2i, sigma[j], e[j + 3]);
                }
                sum = &sum + &term;
            }
            Ok(sum)
        })
    }

    /// Fundamental units `alpha`, `alpha + 1` and the certified sign of `L`.
    pub fn unit_system(&self) -> Result<UnitSystem> {
        let eps1 = self.alpha();
        let eps2 = &eps1 + &self.one();
        let l_sign = certified_sign(self.schedule(), |bits| {
            let e1 = self.embeddings(&eps1, bits);
            let e2 = self.embeddings(&eps2, bits);
            let lq = |a: &RealBall, b: &RealBall| a.checked_div(b)?.abs().ln();
            let l = &(&lq(&e1[0], &e1[2])? * &lq(&e2[1], &e2[2])?) - &(&lq(&e1[1], &e1[2])? * &lq(&e2[0], &e2[2])?);
            Ok(l)
        })?;
        Ok(UnitSystem { eps1, eps2, l_sign })
    }

    /// Regulator `|ln|e1| ln|e2'| - ln|e1'| ln|e2||` of the units `alpha`, `alpha + 1`.
    pub fn regulator(&self, bits: u32) -> Result<RealBall> {
        let eps1 = self.alpha();
        let eps2 = &eps1 + &self.one();
        let e1 = self.embeddings(&eps1, bits);
        let e2 = self.embeddings(&eps2, bits);
        let l = |x: &RealBall| x.abs().ln();
        let det = &(&l(&e1[0])? * &l(&e2[1])?) - &(&l(&e1[1])? * &l(&e2[0])?);
        Ok(det.abs())
    }
}

pub(crate) const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Units `eps1 = alpha`, `eps2 = alpha + 1` and the sign of the log determinant `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSystem {
    pub eps1: FieldElem,
    pub eps2: FieldElem,
    pub l_sign: i8,
}

/// Element `c0 + c1 alpha + c2 alpha^2` of `K_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    m: i64,
    c: [Rat; 3],
}

impl FieldElem {
    pub fn new(m: i64, c: [Rat; 3]) -> Self {
        FieldElem { m, c }
    }

    pub fn from_ints(m: i64, c: [i64; 3]) -> Self {
        FieldElem { m, c: c.map(rat_int) }
    }

    pub fn from_rat(m: i64, q: Rat) -> Self {
        FieldElem { m, c: [q, Rat::zero(), Rat::zero()] }
    }

    pub fn zero(m: i64) -> Self {
        Self::from_ints(m, [0, 0, 0])
    }

    pub fn one(m: i64) -> Self {
        Self::from_ints(m, [1, 0, 0])
    }

    pub fn alpha(m: i64) -> Self {
        Self::from_ints(m, [0, 1, 0])
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn coords(&self) -> &[Rat; 3] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// In `Z[alpha]`, i.e. integral when `Z[alpha]` is maximal.
    pub fn is_integral(&self) -> bool {
        self.c.iter().all(|x| x.is_integer())
    }

    pub fn integer_coords(&self) -> Option<[BigInt; 3]> {
        if self.is_integral() {
            Some(self.c.clone().map(|x| x.to_integer()))
        } else {
            None
        }
    }

    pub fn scale(&self, q: &Rat) -> Self {
        FieldElem { m: self.m, c: self.c.clone().map(|x| x * q) }
    }

    /// Matrix of multiplication by `self` on coordinates: column `j` holds `self * alpha^j`.
    pub fn mult_matrix(&self) -> Mat3<Rat> {
        let cols: [[Rat; 3]; 3] = std::array::from_fn(|j| {
            let mut e = [0i64; 3];
            e[j] = 1;
            (self * &FieldElem::from_ints(self.m, e)).c
        });
        std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone()))
    }

    pub fn trace(&self) -> Rat {
        let a = self.mult_matrix();
        &a[0][0] + &a[1][1] + &a[2][2]
    }

    pub fn norm(&self) -> Rat {
        det3(&self.mult_matrix())
    }

    /// Coefficients `(e1, e2, e3)` of the characteristic polynomial
    /// `x^3 - e1 x^2 + e2 x - e3`.
    pub fn char_poly(&self) -> [Rat; 3] {
        let a = self.mult_matrix();
        let e1 = &a[0][0] + &a[1][1] + &a[2][2];
        let e2 = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0] + &a[0][0] * &a[2][2] - &a[0][2] * &a[2][0]
            + &a[1][1] * &a[2][2]
            - &a[1][2] * &a[2][1];
        [e1, e2, det3(&a)]
    }

    /// Exact test for total positivity: all conjugates are real, so they are all
    /// positive iff every elementary symmetric function is.
    pub fn is_totally_positive(&self) -> bool {
        self.char_poly().iter().all(|e| e.is_positive())
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = self.mult_matrix();
        let det = det3(&a);
        let adj = adjugate3(&a);
        // solve a * y = (1, 0, 0)
        let c = std::array::from_fn(|i| &adj[i][0] / &det);
        Ok(FieldElem { m: self.m, c })
    }

    pub fn pow(&self, e: i64) -> Result<FieldElem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = FieldElem::one(self.m);
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Evaluates `c0 + c1 r + c2 r^2` at a root enclosure.
    pub fn eval_at(&self, root: &RealBall, bits: u32) -> RealBall {
        let r = root.with_precision(bits);
        let c: Vec<RealBall> = self.c.iter().map(|x| RealBall::from_rat(x, bits)).collect();
        &(&(&c[2] * &r) + &c[1]) * &r + &c[0]
    }

    pub fn to_f64(&self, root: f64) -> f64 {
        let c: Vec<f64> = self.c.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        c[0] + c[1] * root + c[2] * root * root
    }

    fn check_same(&self, other: &FieldElem) {
        assert_eq!(self.m, other.m, "elements of different fields");
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*a + ({})*a^2", self.c[0], self.c[1], self.c[2])
    }
}

impl Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        self.check_same(o);
        FieldElem { m: self.m, c: std::array::from_fn(|i| &self.c[i] + &o.c[i]) }
    }
}

impl Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        self.check_same(o);
        FieldElem { m: self.m, c: std::array::from_fn(|i| &self.c[i] - &o.c[i]) }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { m: self.m, c: self.c.clone().map(|x| -x) }
    }
}

impl Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        self.check_same(o);
        let mut p: [Rat; 5] = std::array::from_fn(|_| Rat::zero());
        for i in 0..3 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                p[i + j] += &self.c[i] * &o.c[j];
            }
        }
        // alpha^3 = m alpha^2 + (m + 1) alpha + 1
        let m = rat_int(self.m);
        let m1 = rat_int(self.m + 1);
        for d in (3..5).rev() {
            let top = std::mem::take(&mut p[d]);
            if top.is_zero() {
                continue;
            }
            p[d - 1] += &top * &m;
            p[d - 2] += &top * &m1;
            p[d - 3] += top;
        }
        FieldElem { m: self.m, c: [p[0].clone(), p[1].clone(), p[2].clone()] }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $f(self, o: FieldElem) -> FieldElem {
                (&self).$f(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Discriminant of `f_m` recomputed as `-N(f_m'(alpha))` (resultant route).
pub fn discriminant_by_resultant(m: i64) -> Rat {
    let fp = FieldElem::from_ints(m, [-(m + 1), -2 * m, 3]);
    -fp.norm()
}
