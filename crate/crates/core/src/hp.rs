//! Partial zeta values of the principal class via the Halbritter-Pohst
//! M and C terms, and reflection from `s = 2` to `s = -1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dedekind::{dedekind_sum_b, dedekind_sum_b_reduced, DedekindSumInput, DEFAULT_TERM_BUDGET};
use crate::error::{Error, Result};
use crate::exact::{multinomial, rat, rat_int, reconstruct_integer, shared_table, Rat, RealBall};
use crate::field::{FieldElem, FieldSpec};
use crate::linalg::{det3, mul3, transpose3, Mat3};

/// `q * pi^pi_power * D^(d_half_power / 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPiD {
    pub q: Rat,
    pub pi_power: u32,
    pub d_half_power: i32,
}

impl QPiD {
    pub fn new(q: Rat, pi_power: u32, d_half_power: i32) -> Self {
        QPiD { q, pi_power, d_half_power }
    }

    pub fn zero(pi_power: u32, d_half_power: i32) -> Self {
        Self::new(Rat::zero(), pi_power, d_half_power)
    }

    pub fn shape(&self) -> (u32, i32) {
        (self.pi_power, self.d_half_power)
    }

    pub fn checked_add(&self, other: &QPiD) -> Result<QPiD> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch { pi_power: other.pi_power, d_half_power: other.d_half_power });
        }
        Ok(Self::new(&self.q + &other.q, self.pi_power, self.d_half_power))
    }

    pub fn scale(&self, c: &Rat) -> QPiD {
        Self::new(&self.q * c, self.pi_power, self.d_half_power)
    }

    /// Rewrites the `D` power to `target` by moving whole powers of `d` into `q`.
    pub fn with_d_half_power(&self, d: i64, target: i32) -> Result<QPiD> {
        let diff = self.d_half_power - target;
        if diff % 2 != 0 {
            return Err(Error::ShapeMismatch { pi_power: self.pi_power, d_half_power: self.d_half_power });
        }
        let factor = Rat::from_integer(BigInt::from(d)).pow(diff / 2);
        Ok(Self::new(&self.q * factor, self.pi_power, target))
    }

    pub fn to_f64(&self, d: i64) -> f64 {
        self.q.to_f64().unwrap_or(f64::NAN)
            * std::f64::consts::PI.powi(self.pi_power as i32)
            * (d as f64).powf(self.d_half_power as f64 / 2.0)
    }
}

impl fmt::Display for QPiD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * pi^{} * D^", self.q, self.pi_power)?;
        if self.d_half_power % 2 == 0 {
            write!(f, "({})", self.d_half_power / 2)
        } else {
            write!(f, "({}/2)", self.d_half_power)
        }
    }
}

/// Order in which the real embeddings play the roles of `x, x', x''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Labelling {
    /// `alpha > alpha' > alpha''`.
    #[default]
    Standard,
    /// `alpha'` and `alpha''` exchanged.
    Swapped,
}

impl Labelling {
    fn order(self) -> [usize; 3] {
        match self {
            Labelling::Standard => [0, 1, 2],
            Labelling::Swapped => [0, 2, 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HpOptions {
    pub labelling: Labelling,
    /// Cube budget for the direct Dedekind-sum evaluator; above it the reduced one is used.
    pub term_budget: u128,
}

impl Default for HpOptions {
    fn default() -> Self {
        HpOptions { labelling: Labelling::Standard, term_budget: DEFAULT_TERM_BUDGET }
    }
}

#[derive(Debug, Clone)]
pub struct HPMatrices {
    pub e: [Mat3<RealBall>; 2],
    pub b_rho: Mat3<RealBall>,
    pub eb: [Mat3<BigInt>; 2],
    pub n_rho: Rat,
    pub det_b_sign: i8,
    pub bits: u32,
}

fn conj(spec: &FieldSpec, x: &FieldElem, order: [usize; 3], bits: u32) -> [RealBall; 3] {
    let roots = spec.roots_at(bits);
    order.map(|i| x.eval_at(&roots[i], bits))
}

/// `E_1`, `E_2`, `B_rho` as balls and `E_nu B_rho` as certified integers,
/// for `W = O_K` with basis `1, alpha, alpha^2`.
pub fn build_matrices(spec: &FieldSpec, eps1: &FieldElem, eps2: &FieldElem, labelling: Labelling) -> Result<HPMatrices> {
    let order = labelling.order();
    let rho = spec.rho();
    let basis = spec.power_basis();
    let prod = eps1 * eps2;
    let row_units = |nu: usize| [spec.one(), if nu == 0 { eps1.clone() } else { eps2.clone() }, prod.clone()];

    // exact values, Tr(u_i rho w_j)
    let exact: [Mat3<BigInt>; 2] = std::array::from_fn(|nu| {
        let u = row_units(nu);
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let t = (&(&u[i] * &rho) * &basis[j]).trace();
                debug_assert!(t.is_integer());
                t.to_integer()
            })
        })
    });

    let schedule = spec.schedule();
    for bits in schedule.steps() {
        let rho_c = conj(spec, &rho, order, bits);
        let w_c: [[RealBall; 3]; 3] = std::array::from_fn(|j| conj(spec, &basis[j], order, bits));
        let b_rho: Mat3<RealBall> = std::array::from_fn(|l| std::array::from_fn(|j| &rho_c[l] * &w_c[j][l]));
        let e: [Mat3<RealBall>; 2] = std::array::from_fn(|nu| row_units(nu).map(|u| conj(spec, &u, order, bits)));
        let mut eb: [Mat3<BigInt>; 2] = Default::default();
        let mut ok = true;
        'outer: for nu in 0..2 {
            let p = mul3(&e[nu], &b_rho);
            for i in 0..3 {
                for j in 0..3 {
                    match reconstruct_integer(&p[i][j]) {
                        Ok(n) => eb[nu][i][j] = n,
                        Err(_) => {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
        let det_b_sign = det3(&b_rho).sign();
        let (true, Some(det_b_sign)) = (ok, det_b_sign) else { continue };
        if eb != exact {
            return Err(Error::Invariant("E B_rho disagrees with exact traces".into()));
        }
        return Ok(HPMatrices { e, b_rho, eb, n_rho: rho.norm(), det_b_sign, bits });
    }
    Err(Error::PrecisionExhausted { what: "E B_rho", max_bits: schedule.cap })
}

/// Sign of `L = ln|e1/e1''| ln|e2'/e2''| - ln|e1'/e1''| ln|e2/e2''|`.
pub fn l_sign(spec: &FieldSpec, eps1: &FieldElem, eps2: &FieldElem, labelling: Labelling) -> Result<i8> {
    let order = labelling.order();
    crate::exact::certified_sign(spec.schedule(), |bits| {
        let e1 = conj(spec, eps1, order, bits);
        let e2 = conj(spec, eps2, order, bits);
        let lq = |a: &RealBall, b: &RealBall| a.checked_div(b)?.abs().ln();
        Ok(&(&lq(&e1[0], &e1[2])? * &lq(&e2[1], &e2[2])?) - &(&lq(&e1[1], &e1[2])? * &lq(&e2[0], &e2[2])?))
    })
}

/// The four Halbritter-Pohst terms at one `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpTerms {
    pub m1: QPiD,
    pub m2: QPiD,
    pub c1: QPiD,
    pub c2: QPiD,
}

impl HpTerms {
    pub fn total(&self) -> Result<QPiD> {
        self.m1.checked_add(&self.m2)?.checked_add(&self.c1)?.checked_add(&self.c2)
    }
}

/// Everything that depends only on the field and the unit system.
pub struct HpEngine<'a> {
    spec: &'a FieldSpec,
    eps1: FieldElem,
    eps2: FieldElem,
    labelling: Labelling,
    mats: HPMatrices,
    l_sign: i8,
    options: HpOptions,
}

impl<'a> HpEngine<'a> {
    /// Engine for `W = O_K` and the units `alpha`, `alpha + 1`.
    pub fn new(spec: &'a FieldSpec, options: HpOptions) -> Result<Self> {
        spec.require_valid()?;
        let eps1 = spec.alpha();
        let eps2 = &eps1 + &spec.one();
        Self::with_units(spec, eps1, eps2, options)
    }

    pub fn with_units(spec: &'a FieldSpec, eps1: FieldElem, eps2: FieldElem, options: HpOptions) -> Result<Self> {
        let mats = build_matrices(spec, &eps1, &eps2, options.labelling)?;
        let l_sign = l_sign(spec, &eps1, &eps2, options.labelling)?;
        Ok(HpEngine { spec, eps1, eps2, labelling: options.labelling, mats, l_sign, options })
    }

    pub fn matrices(&self) -> &HPMatrices {
        &self.mats
    }

    pub fn l_sign(&self) -> i8 {
        self.l_sign
    }

    pub fn units(&self) -> (&FieldElem, &FieldElem) {
        (&self.eps1, &self.eps2)
    }

    fn check_k(k: u32) -> Result<()> {
        if k < 2 || k % 2 == 1 {
            return Err(Error::OutOfRange(format!("k = {k}: only even k >= 2 give a real (2 pi i)^(3k)")));
        }
        Ok(())
    }

    /// `sign(det E_nu)`, zero exactly when `det E_nu = 0`.
    pub fn det_e_sign(&self, nu: usize) -> i8 {
        let d = det3(&self.mats.eb[nu - 1]);
        match d.sign() {
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => self.mats.det_b_sign,
            num_bigint::Sign::Minus => -self.mats.det_b_sign,
        }
    }

    /// `N(rho)^k / |N(rho)|`, the rational left after `|det B_rho| = |N(rho)| sqrt(D)`.
    fn rho_factor(&self, k: u32) -> Rat {
        let n = &self.mats.n_rho;
        n.pow(k as i32) / n.abs()
    }

    /// Brings a `(3k, -1)` value to the normalized shape `(3k, 1 - 2k)`.
    fn normalize(&self, z: QPiD, k: u32) -> Result<QPiD> {
        z.with_d_half_power(self.spec.disc(), 1 - 2 * k as i32)
    }

    fn dedekind(&self, a: &Mat3<i64>, r: [usize; 3]) -> Result<Rat> {
        let input = DedekindSumInput::new(*a, r);
        match dedekind_sum_b(&input, self.options.term_budget) {
            Err(Error::BudgetExceeded { .. }) => dedekind_sum_b_reduced(&input),
            other => other,
        }
    }

    /// `M(k, nu, tau1, tau2)`, normalized to `pi^(3k) D^((1-2k)/2)`.
    pub fn m_term(&self, k: u32, nu: usize, tau1: &FieldElem, tau2: &FieldElem) -> Result<QPiD> {
        Self::check_k(k)?;
        assert!(nu == 1 || nu == 2);
        let n3 = 3 * k as i64;
        let s_e = self.det_e_sign(nu);
        if s_e == 0 {
            return Ok(QPiD::zero(3 * k, 1 - 2 * k as i32));
        }
        let eb = &self.mats.eb[nu - 1];
        let det_eb = det3(eb);
        let a: Mat3<i64> = transpose3(eb).map(|row| row.map(|x| x.to_i64().expect("small entries")));

        let mut sum = Rat::zero();
        let mut bsums: BTreeMap<[usize; 3], Rat> = BTreeMap::new();
        for m1 in 0..=n3 {
            for m2 in 0..=n3 {
                let c = multinomial(n3, m1, m2);
                if c.is_zero() {
                    continue;
                }
                let r = [m1 as usize, m2 as usize, (n3 - m1 - m2) as usize];
                let b = match bsums.get(&r) {
                    Some(b) => b.clone(),
                    None => {
                        let b = self.dedekind(&a, r)?;
                        bsums.insert(r, b.clone());
                        b
                    }
                };
                if (m1 % 2 == 1 || m2 % 2 == 1) && !b.is_zero() {
                    return Err(Error::Invariant(format!("Dedekind sum with r = {r:?} does not vanish")));
                }
                if b.is_zero() {
                    continue;
                }
                let inner = self.inner_sum(k as i64, m1, m2, tau1, tau2)?;
                sum += Rat::from_integer(c * inner) * b;
            }
        }
        let k3 = 3 * k;
        let sign = rat_int(self.l_sign as i64 * if nu == 1 { -1 } else { 1 } * s_e as i64);
        let i_power = if (k3 / 2).is_multiple_of(2) { 1 } else { -1 };
        let coeff = Rat::new(BigInt::from(i_power) * (BigInt::one() << k3 as usize), factorial(k3) * 6u32);
        let q = sign * coeff * self.rho_factor(k) / Rat::from_integer(&det_eb * &det_eb) * sum;
        self.normalize(QPiD::new(q, k3, -1), k)
    }

    /// The quadruple sum over `kappa_1, kappa_2, mu_1, mu_2` in `M`.
    fn inner_sum(&self, k: i64, m1: i64, m2: i64, tau1: &FieldElem, tau2: &FieldElem) -> Result<BigInt> {
        let mut inner = BigInt::zero();
        for k1 in 0..k {
            for k2 in 0..k {
                for u1 in 0..k {
                    for u2 in 0..k {
                        let c = multinomial(m1 - 1, k - 1 - (k1 + k2), k - 1 - (u1 + u2))
                            * multinomial(m2 - 1, k1, u1)
                            * multinomial(3 * k - 1 - (m1 + m2), k2, u2);
                        if c.is_zero() {
                            continue;
                        }
                        let e = [
                            k1 + k2,
                            u1 + u2,
                            3 * k - 2 - (m1 + k1 + k2 + u1 + u2),
                            k2,
                            u2,
                            3 * k - 1 - (m1 + m2 + k2 + u2),
                        ];
                        inner += c * self.spec.galois_trace(tau1, tau2, e)?;
                    }
                }
            }
        }
        Ok(inner)
    }

    /// The curly bracket of `C`: six signs plus `N(tau2)` times three signs.
    pub fn c_bracket(&self, tau1: &FieldElem, tau2: &FieldElem) -> Result<BigInt> {
        let order = self.labelling.order();
        let schedule = self.spec.schedule();
        let mut signs: [Option<i8>; 9] = [None; 9];
        for bits in schedule.steps() {
            let a = conj(self.spec, tau1, order, bits);
            let b = conj(self.spec, tau2, order, bits);
            let ab: [RealBall; 3] = std::array::from_fn(|i| &a[i] * &b[i]);
            let exprs = [
                &(&ab[0] - &ab[1]) * &(&a[0] - &a[1]),
                &(&ab[1] - &ab[2]) * &(&a[1] - &a[2]),
                &(&ab[2] - &ab[0]) * &(&a[2] - &a[0]),
                &(&a[2] * &(&a[0] - &a[1])) * &(&b[1] - &b[0]),
                &(&a[0] * &(&a[1] - &a[2])) * &(&b[2] - &b[1]),
                &(&a[1] * &(&a[2] - &a[0])) * &(&b[0] - &b[2]),
                &(&a[2] * &(&b[0] - &b[1])) * &(&ab[0] - &ab[1]),
                &(&a[0] * &(&b[1] - &b[2])) * &(&ab[1] - &ab[2]),
                &(&a[1] * &(&b[2] - &b[0])) * &(&ab[2] - &ab[0]),
            ];
            for (slot, x) in signs.iter_mut().zip(exprs.iter()) {
                if slot.is_none() {
                    *slot = x.sign();
                }
            }
            if signs.iter().all(Option::is_some) {
                let s: Vec<i64> = signs.iter().map(|x| x.expect("resolved") as i64).collect();
                let norm = tau2.norm();
                if !norm.is_integer() {
                    return Err(Error::Invariant("N(tau2) is not an integer".into()));
                }
                let first: i64 = s[..6].iter().sum();
                let second: i64 = s[6..].iter().sum();
                return Ok(BigInt::from(first) + norm.to_integer() * second);
            }
        }
        Err(Error::SignUnresolved { max_bits: schedule.cap })
    }

    /// `C(k, nu, tau1, tau2)`, normalized to `pi^(3k) D^((1-2k)/2)`.
    pub fn c_term(&self, k: u32, nu: usize, tau1: &FieldElem, tau2: &FieldElem) -> Result<QPiD> {
        Self::check_k(k)?;
        assert!(nu == 1 || nu == 2);
        let s_e = self.det_e_sign(nu);
        if s_e == 0 {
            return Ok(QPiD::zero(3 * k, 1 - 2 * k as i32));
        }
        let bracket = self.c_bracket(tau1, tau2)?;
        let k3 = 3 * k;
        let sign = rat_int(self.l_sign as i64 * if nu == 1 { 1 } else { -1 } * s_e as i64);
        let i_power = if (k3 / 2).is_multiple_of(2) { 1 } else { -1 };
        let denom = BigInt::from(12 * (k3 - 2)) * factorial(k - 1).pow(3);
        let coeff = Rat::new(BigInt::from(i_power) * (BigInt::one() << k3 as usize), denom);
        let bern = shared_table().number(k3 as usize - 2).clone();
        let q = sign * coeff * self.rho_factor(k) * bern * Rat::from_integer(bracket);
        self.normalize(QPiD::new(q, k3, -1), k)
    }

    /// `M(k,1,e1,e2)`, `M(k,2,e2,e1)`, `C(k,1,e1,e2)`, `C(k,2,e2,e1)`.
    pub fn terms(&self, k: u32) -> Result<HpTerms> {
        let (e1, e2) = (&self.eps1, &self.eps2);
        Ok(HpTerms {
            m1: self.m_term(k, 1, e1, e2)?,
            m2: self.m_term(k, 2, e2, e1)?,
            c1: self.c_term(k, 1, e1, e2)?,
            c2: self.c_term(k, 2, e2, e1)?,
        })
    }

    pub fn zeta_sum(&self, k: u32) -> Result<QPiD> {
        self.terms(k)?.total()
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `zeta_K(2, P)` for the principal class, `W = O_K`.
pub fn partial_zeta_2(spec: &FieldSpec) -> Result<QPiD> {
    let engine = HpEngine::new(spec, HpOptions::default())?;
    Ok(engine.zeta_sum(2)?.scale(&rat(1, 2)))
}

/// `zeta_K(-1, P)` from `zeta_K(2, P) = q pi^6 D^(-3/2)` by the functional equation.
pub fn reflect_to_minus1(z: &QPiD) -> Result<Rat> {
    if z.shape() != (6, -3) {
        return Err(Error::ShapeMismatch { pi_power: z.pi_power, d_half_power: z.d_half_power });
    }
    Ok(-&z.q / rat_int(8))
}

fn closed_form_poly(m: i64) -> BigInt {
    let m = BigInt::from(m);
    let p = m.pow(5) + 3 * m.pow(4) - 5 * m.pow(3) - 15 * m.pow(2) + 4 * &m + 12;
    m * p
}

/// Rational part of the closed form `zeta_K(2, P) = q pi^6 D^(-3/2)`.
pub fn closed_form_partial_2(m: i64) -> Rat {
    Rat::new(closed_form_poly(m), BigInt::from(945))
}

pub fn closed_form_partial_minus1(m: i64) -> Rat {
    -Rat::new(closed_form_poly(m), BigInt::from(7560))
}

fn poly(m: i64, coeffs: &[i64]) -> BigInt {
    let m = BigInt::from(m);
    coeffs.iter().fold(BigInt::zero(), |acc, &c| acc * &m + c)
}

/// Closed forms of `M(2,1,alpha,alpha+1)` and `M(2,2,alpha+1,alpha)` (rational parts).
pub fn closed_form_m_terms(m: i64) -> (Rat, Rat) {
    let p1 = poly(m, &[4, 54, 304, 979, 2119, 3234, 3327, 2067, 72, -714]);
    let p2 = poly(m, &[4, 54, 304, 985, 2137, 3204, 3237, 2091, 144, -714]);
    (-Rat::new(p1, BigInt::from(2835)), Rat::new(p2, BigInt::from(2835)))
}

/// Rational parts of `C(2,1,alpha,alpha+1)` and `C(2,2,alpha+1,alpha)`.
pub fn closed_form_c_terms() -> (Rat, Rat) {
    (rat(2, 45), rat(-2, 45))
}

/// Floating-point value of the closed form of `zeta_K(2, P)`.
pub fn closed_form_value_f64(m: i64) -> f64 {
    let d = crate::field::discriminant(m) as f64;
    closed_form_partial_2(m).to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI.powi(6) / d.powf(1.5)
}
