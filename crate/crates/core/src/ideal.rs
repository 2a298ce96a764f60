//! Ideals of `O_K = Z[alpha]`: prime decomposition, HNF lattices, valuations
//! and the divisor sum `sigma_1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::linalg::Mat3;
use crate::nt::factor::factor_u64;
use crate::nt::polymod::{self, PolyModP};

/// A prime of `O_K` above `p`, written `(p, g(alpha))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    /// Monic irreducible factor of `f_m mod p`, lowest degree first.
    pub g: PolyModP,
    pub e: u32,
    pub f: u32,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u128 {
        (self.p as u128).pow(self.f)
    }

    /// Residue-field membership: `h(alpha) in P` iff `g | h mod p`.
    fn contains_coords(&self, c: &[BigInt; 3]) -> bool {
        let p = BigInt::from(self.p);
        let h: Vec<i64> = c.iter().map(|x| x.mod_floor(&p).to_i64().expect("residue fits")).collect();
        let h = polymod::reduce_coeffs(&h, self.p);
        h.is_empty() || polymod::div_rem(&h, &self.g, self.p).1.is_empty()
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .g
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "a".to_string(),
                (1, c) => format!("{c}a"),
                (i, 1) => format!("a^{i}"),
                (i, c) => format!("{c}a^{i}"),
            })
            .collect();
        write!(f, "({}, {})", self.p, terms.join("+"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredIdeal {
    pub factors: Vec<(PrimeIdeal, u32)>,
    /// Absolute norm; factorization works on 64-bit norms only.
    pub norm: u64,
}

impl FactoredIdeal {
    pub fn unit() -> Self {
        FactoredIdeal { factors: Vec::new(), norm: 1 }
    }

    pub fn from_factors(mut factors: Vec<(PrimeIdeal, u32)>) -> Self {
        factors.retain(|(_, v)| *v > 0);
        factors.sort();
        let norm: u128 = factors.iter().map(|(p, v)| p.norm().pow(*v)).product();
        let norm = u64::try_from(norm).expect("ideal norm exceeds 64 bits");
        FactoredIdeal { factors, norm }
    }

    pub fn mul(&self, other: &FactoredIdeal) -> Self {
        let mut factors = self.factors.clone();
        for (q, v) in &other.factors {
            match factors.iter_mut().find(|(p, _)| p == q) {
                Some(entry) => entry.1 += v,
                None => factors.push((q.clone(), *v)),
            }
        }
        Self::from_factors(factors)
    }
}

impl fmt::Display for FactoredIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "(1)");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Prime ideals above `p`, one per irreducible factor of `f_m mod p`.
pub fn decompose_prime(spec: &FieldSpec, p: u64) -> Vec<PrimeIdeal> {
    let f = polymod::reduce_coeffs(&spec.f_coeffs(), p);
    polymod::factor_cubic(&f, p)
        .into_iter()
        .map(|(g, e)| {
            let f = (g.len() - 1) as u32;
            PrimeIdeal { p, g, e, f }
        })
        .collect()
}

/// `f_m'(alpha)`, a generator of the different.
pub fn different_generator(spec: &FieldSpec) -> FieldElem {
    let m = spec.m();
    spec.int_elem([-(m + 1), -2 * m, 3])
}

/// Sublattice of `Z^3` (coordinates in `1, alpha, alpha^2`) in upper-triangular
/// Hermite normal form, scaled by `1 / denom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealLattice {
    pub hnf: Mat3<i128>,
    pub denom: i128,
}

fn mul_coords(m: i128, a: &[i128; 3], b: &[i128; 3]) -> [i128; 3] {
    let mut c = [0i128; 5];
    for i in 0..3 {
        for j in 0..3 {
            c[i + j] += a[i] * b[j];
        }
    }
    // alpha^3 = m alpha^2 + (m+1) alpha + 1
    for k in (3..5).rev() {
        let t = c[k];
        c[k - 1] += m * t;
        c[k - 2] += (m + 1) * t;
        c[k - 3] += t;
    }
    [c[0], c[1], c[2]]
}

impl IdealLattice {
    /// Lattice spanned by `gens` together with `modulus * Z^3`.
    ///
    /// Every entry stays below `2 * modulus^2`, so `modulus` up to about `1e18` is safe.
    pub fn from_generators(gens: &[[i128; 3]], modulus: i128) -> Self {
        assert!(modulus > 0);
        let mut h: Mat3<i128> = [[modulus, 0, 0], [0, modulus, 0], [0, 0, modulus]];
        for g in gens {
            let mut v = g.map(|x| x.rem_euclid(modulus));
            for j in 0..3 {
                reduce_tail(&h, &mut v, j);
                if v[j] == 0 {
                    continue;
                }
                let (b, a) = (h[j][j], v[j]);
                let eg = b.extended_gcd(&a);
                let (g, s, t) = (eg.gcd, eg.x, eg.y);
                let row: [i128; 3] = std::array::from_fn(|k| s * h[j][k] + t * v[k]);
                v = std::array::from_fn(|k| (b / g) * v[k] - (a / g) * h[j][k]);
                h[j] = row;
                let (head, tail) = h.split_at_mut(j + 1);
                reduce_row(&mut head[j], tail, j);
            }
        }
        for i in (0..3).rev() {
            let (head, tail) = h.split_at_mut(i + 1);
            reduce_row(&mut head[i], tail, i);
        }
        IdealLattice { hnf: h, denom: 1 }
    }

    /// The principal ideal `x O_K` for integral `x != 0`.
    pub fn principal(x: &FieldElem) -> Result<Self> {
        let c = integral_coords(x)?;
        let n = x.norm().abs().to_integer().to_i128().ok_or_else(|| Error::OutOfRange("norm too large".into()))?;
        if n == 0 {
            return Err(Error::DivisionByZero);
        }
        let m = x.m() as i128;
        let nb = BigInt::from(n);
        let c: [i128; 3] = c.map(|v| v.mod_floor(&nb).to_i128().expect("reduced"));
        let gens: Vec<[i128; 3]> = basis_units().iter().map(|b| mul_coords(m, &c, b)).collect();
        Ok(Self::from_generators(&gens, n))
    }

    /// `P^j` for `j >= 1`.
    pub fn prime_power(m: i64, prime: &PrimeIdeal, j: u32) -> Self {
        assert!(j >= 1);
        let p = prime.p as i128;
        let mut g = [0i128; 3];
        for (i, &c) in prime.g.iter().enumerate().take(3) {
            g[i] = c as i128;
        }
        // g of degree 3 only when p is inert, where P = (p)
        let base_gens: Vec<[i128; 3]> = if prime.g.len() == 4 {
            vec![]
        } else {
            basis_units().iter().map(|b| mul_coords(m as i128, &g, b)).collect()
        };
        let base = Self::from_generators(&base_gens, p);
        let mut acc = base.clone();
        for k in 2..=j {
            let modulus = p.pow(k.div_ceil(prime.e));
            let gens: Vec<[i128; 3]> = acc
                .hnf
                .iter()
                .flat_map(|a| base.hnf.iter().map(move |b| (a, b)))
                .map(|(a, b)| {
                    let a = a.map(|x| x.rem_euclid(modulus));
                    let b = b.map(|x| x.rem_euclid(modulus));
                    mul_coords(m as i128, &a, &b).map(|x| x.rem_euclid(modulus))
                })
                .collect();
            acc = Self::from_generators(&gens, modulus);
        }
        acc
    }

    /// Index in `Z^3`, i.e. the ideal norm when `denom == 1`.
    pub fn det(&self) -> i128 {
        self.hnf[0][0] * self.hnf[1][1] * self.hnf[2][2]
    }

    pub fn contains(&self, x: &[BigInt; 3]) -> bool {
        let mut v: [BigInt; 3] = x.clone().map(|c| c * BigInt::from(self.denom));
        for j in 0..3 {
            let piv = BigInt::from(self.hnf[j][j]);
            if !(&v[j] % &piv).is_zero() {
                return false;
            }
            let q = &v[j] / &piv;
            for k in j..3 {
                v[k] -= &q * BigInt::from(self.hnf[j][k]);
            }
        }
        true
    }

    /// Closure under multiplication by `alpha`.
    pub fn is_ideal(&self, m: i64) -> bool {
        let alpha = [0, 1, 0];
        self.hnf.iter().all(|row| {
            let r = mul_coords(m as i128, row, &alpha);
            self.contains(&r.map(BigInt::from))
        })
    }
}

fn basis_units() -> [[i128; 3]; 3] {
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
}

/// Reduce `v` in columns `>= j` by the corresponding rows.
fn reduce_tail(h: &Mat3<i128>, v: &mut [i128; 3], j: usize) {
    for k in j..3 {
        let q = Integer::div_floor(&v[k], &h[k][k]);
        if q != 0 {
            for l in k..3 {
                v[l] -= q * h[k][l];
            }
        }
    }
}

fn reduce_row(row: &mut [i128; 3], below: &[[i128; 3]], j: usize) {
    for (off, b) in below.iter().enumerate() {
        let k = j + 1 + off;
        let q = Integer::div_floor(&row[k], &b[k]);
        if q != 0 {
            for l in k..3 {
                row[l] -= q * b[l];
            }
        }
    }
}

fn integral_coords(x: &FieldElem) -> Result<[BigInt; 3]> {
    x.integer_coords().ok_or_else(|| Error::OutOfRange("element is not integral".into()))
}

fn norm_u128(x: &FieldElem) -> Result<u128> {
    let n = x.norm();
    if !n.is_integer() {
        return Err(Error::OutOfRange("element is not integral".into()));
    }
    n.to_integer().abs().to_u128().ok_or_else(|| Error::OutOfRange("norm exceeds 128 bits".into()))
}

/// Largest `j` with `x in P^j`, by lattice membership in successive powers.
pub fn valuation(x: &FieldElem, prime: &PrimeIdeal) -> Result<u32> {
    let c = integral_coords(x)?;
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if !prime.contains_coords(&c) {
        return Ok(0);
    }
    let n = norm_u128(x)?;
    let mut bound = 0u32;
    let mut rest = n;
    while rest % prime.norm() == 0 {
        rest /= prime.norm();
        bound += 1;
    }
    let mut j = 1;
    while j < bound && IdealLattice::prime_power(x.m(), prime, j + 1).contains(&c) {
        j += 1;
    }
    Ok(j)
}

/// Prime factorization of the principal ideal `x O_K`.
pub fn factor_principal(spec: &FieldSpec, x: &FieldElem) -> Result<FactoredIdeal> {
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let c = integral_coords(x)?;
    let n = norm_u128(x)?;
    let n64 = u64::try_from(n).map_err(|_| Error::FactorizationTimeout { n })?;
    let mut factors = Vec::new();
    for (p, a) in factor_u64(n64, spec.options().factor_budget)? {
        let above: Vec<PrimeIdeal> = decompose_prime(spec, p).into_iter().filter(|q| q.contains_coords(&c)).collect();
        match above.as_slice() {
            [] => return Err(Error::Invariant(format!("no prime above {p} contains the element"))),
            // norm accounting pins the exponent
            [q] => {
                if a % q.f != 0 {
                    return Err(Error::Invariant(format!("residue degree {} does not divide {a}", q.f)));
                }
                factors.push((q.clone(), a / q.f));
            }
            _ => {
                let mut used = 0;
                for q in above {
                    let v = valuation(x, &q)?;
                    used += v * q.f;
                    factors.push((q, v));
                }
                if used != a {
                    return Err(Error::Invariant(format!("valuations above {p} account for {used} of {a}")));
                }
            }
        }
    }
    let ideal = FactoredIdeal::from_factors(factors);
    debug_assert_eq!(ideal.norm, n64);
    Ok(ideal)
}

pub fn sigma1(ideal: &FactoredIdeal) -> BigInt {
    ideal
        .factors
        .iter()
        .map(|(p, v)| {
            let q = BigInt::from(p.norm());
            // 1 + q + ... + q^v
            (num_traits::pow(q.clone(), *v as usize + 1) - 1u32) / (q - 1u32)
        })
        .product::<BigInt>()
        .max(BigInt::one())
}

pub fn is_prime_ideal(ideal: &FactoredIdeal) -> bool {
    matches!(ideal.factors.as_slice(), [(_, 1)])
}

/// The same predicate via `sigma_1(I) = 1 + N(I)`.
pub fn is_prime_ideal_by_sigma(ideal: &FactoredIdeal) -> bool {
    ideal.norm > 1 && sigma1(ideal) == BigInt::from(ideal.norm) + 1u32
}
