//! Generalized three-fold Dedekind sums
//!
//! ```text
//! B(3, r, A, 0) = sum_{k in [0, |det A|)^3} prod_i  B~_{r_i}( (1/det A) sum_j adj(A)_ij k_j )
//! ```
//!
//! with `adj(A) = det(A) A^-1` and `B~` the periodic Bernoulli function.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{shared_table, BernoulliTable, Rat};
use crate::linalg::{adjugate3, det3, Mat3};

/// Default cap on the number of summands of the direct evaluator.
pub const DEFAULT_TERM_BUDGET: u128 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedekindSumInput {
    pub a: Mat3<i64>,
    pub r: [usize; 3],
}

impl DedekindSumInput {
    pub fn new(a: Mat3<i64>, r: [usize; 3]) -> Self {
        DedekindSumInput { a, r }
    }

    pub fn det(&self) -> i128 {
        det3(&widen(&self.a))
    }
}

fn widen(a: &Mat3<i64>) -> Mat3<i128> {
    a.map(|row| row.map(i128::from))
}

/// Integer adjugate `det(A) A^-1`.
pub fn adjugate(a: &Mat3<i64>) -> Result<Mat3<i128>> {
    let w = widen(a);
    if det3(&w) == 0 {
        return Err(Error::SingularMatrix);
    }
    Ok(adjugate3(&w))
}

/// `B~_r(u / n)` for `u = 0..n`, as integer numerators over a common denominator.
struct ResidueTable {
    numer: Vec<BigInt>,
    denom: BigInt,
    max_abs: BigInt,
}

impl ResidueTable {
    fn new(table: &BernoulliTable, r: usize, n: u64) -> Self {
        let values: Vec<Rat> =
            (0..n).map(|u| table.periodic(r, &Rat::new(BigInt::from(u), BigInt::from(n)))).collect();
        let denom = values.iter().fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
        let numer: Vec<BigInt> = values.iter().map(|v| v.numer() * (&denom / v.denom())).collect();
        let max_abs = numer.iter().map(|x| x.magnitude().clone().into()).max().unwrap_or_default();
        ResidueTable { numer, denom, max_abs }
    }
}

/// Row-wise data shared by both evaluators: residue tables and the matrix
/// `sign(det) * adj(A)` reduced mod `|det|`, so every argument is `u / |det|`.
struct Prepared {
    n: u64,
    rows: Mat3<i128>,
    tables: [ResidueTable; 3],
}

fn prepare(input: &DedekindSumInput) -> Result<Prepared> {
    let adj = adjugate(&input.a)?;
    let det = input.det();
    let n = det.unsigned_abs();
    let n64 = u64::try_from(n).map_err(|_| Error::OutOfRange(format!("|det A| = {n}")))?;
    let sign = det.signum();
    let rows = adj.map(|row| row.map(|x| (sign * x).rem_euclid(n as i128)));
    let max_r = *input.r.iter().max().expect("three indices");
    let local;
    let table = if max_r <= shared_table().max_index() {
        shared_table()
    } else {
        local = BernoulliTable::new(max_r);
        &local
    };
    let tables = input.r.map(|r| ResidueTable::new(table, r, n64));
    Ok(Prepared { n: n64, rows, tables })
}

impl Prepared {
    fn denom(&self) -> BigInt {
        &self.tables[0].denom * &self.tables[1].denom * &self.tables[2].denom
    }

    /// Whether `count` products of table numerators fit an i128 accumulator.
    fn fits_i128(&self, count: u128) -> Option<[Vec<i128>; 3]> {
        let bound = &self.tables[0].max_abs * &self.tables[1].max_abs * &self.tables[2].max_abs * BigInt::from(count);
        if bound >= BigInt::from(i128::MAX) {
            return None;
        }
        Some(std::array::from_fn(|i| self.tables[i].numer.iter().map(|x| x.to_i128().expect("fits")).collect()))
    }
}

/// Direct evaluation over the whole `|det A|^3` cube.
pub fn dedekind_sum_b(input: &DedekindSumInput, budget: u128) -> Result<Rat> {
    let det = input.det();
    if det == 0 {
        return Err(Error::SingularMatrix);
    }
    let terms = det.unsigned_abs().pow(3);
    if terms > budget {
        return Err(Error::BudgetExceeded { terms, budget });
    }
    let prep = prepare(input)?;
    let n = prep.n as usize;
    let col = |j: usize| -> [usize; 3] { std::array::from_fn(|i| prep.rows[i][j] as usize) };
    let (c1, c2, c3) = (col(0), col(1), col(2));
    let step = |u: &mut [usize; 3], c: &[usize; 3]| {
        for i in 0..3 {
            u[i] += c[i];
            if u[i] >= n {
                u[i] -= n;
            }
        }
    };

    let total: BigInt = match prep.fits_i128(terms) {
        Some(t) => {
            let s: i128 = (0..n)
                .into_par_iter()
                .map(|k1| {
                    let mut base1: [usize; 3] = std::array::from_fn(|i| (c1[i] * k1) % n);
                    let mut acc = 0i128;
                    for _ in 0..n {
                        let mut u = base1;
                        for _ in 0..n {
                            acc += t[0][u[0]] * t[1][u[1]] * t[2][u[2]];
                            step(&mut u, &c3);
                        }
                        step(&mut base1, &c2);
                    }
                    acc
                })
                .sum();
            BigInt::from(s)
        }
        None => (0..n)
            .into_par_iter()
            .map(|k1| {
                let t = &prep.tables;
                let mut base1: [usize; 3] = std::array::from_fn(|i| (c1[i] * k1) % n);
                let mut acc = BigInt::zero();
                for _ in 0..n {
                    let mut u = base1;
                    for _ in 0..n {
                        acc += &t[0].numer[u[0]] * &t[1].numer[u[1]] * &t[2].numer[u[2]];
                        step(&mut u, &c3);
                    }
                    step(&mut base1, &c2);
                }
                acc
            })
            .reduce(BigInt::zero, |a, b| a + b),
    };
    Ok(Rat::new(total, prep.denom()))
}

/// Diagonalizes by unimodular row and column operations; `left` is kept equal to the
/// inverse of the accumulated row transform so that `M = left * D * (col ops)`.
fn diagonalize(mut m: Mat3<i128>) -> (Mat3<i128>, [i128; 3]) {
    let mut left: Mat3<i128> = crate::linalg::identity3();
    for t in 0..3 {
        loop {
            // smallest non-zero pivot in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..3 {
                for j in t..3 {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            // the reduced matrix may be singular; a zero block maps to 0
            let Some((pi, pj)) = best else {
                return (left, [m[0][0], m[1][1], m[2][2]]);
            };
            if pi != t {
                m.swap(pi, t);
                for row in left.iter_mut() {
                    row.swap(pi, t);
                }
            }
            if pj != t {
                for row in m.iter_mut() {
                    row.swap(pj, t);
                }
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..3 {
                let q = Integer::div_floor(&m[i][t], &p);
                if q != 0 {
                    // row_i -= q row_t ; left: col_t += q col_i
                    for j in 0..3 {
                        m[i][j] -= q * m[t][j];
                    }
                    for row in left.iter_mut() {
                        row[t] += q * row[i];
                    }
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..3 {
                let q = Integer::div_floor(&m[t][j], &p);
                if q != 0 {
                    for row in m.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                clean &= m[t][j] == 0;
            }
            if clean {
                break;
            }
        }
    }
    (left, [m[0][0], m[1][1], m[2][2]])
}

/// Same value as [`dedekind_sum_b`], summing over the image subgroup of
/// `k -> adj(A) k mod |det A|` weighted by its (constant) fibre size.
pub fn dedekind_sum_b_reduced(input: &DedekindSumInput) -> Result<Rat> {
    let prep = prepare(input)?;
    let n = prep.n as i128;
    let (left, diag) = diagonalize(prep.rows);
    // image of diag(d) on (Z/n)^3: coordinate i runs over multiples of gcd(d_i, n)
    let gens: [i128; 3] = diag.map(|d| d.gcd(&n));
    let sizes: [i128; 3] = gens.map(|g| n / g);
    let image_size: i128 = sizes.iter().product();
    let multiplicity = BigInt::from(n.pow(3) / image_size);

    let vec_of = |j: usize| -> [i128; 3] { std::array::from_fn(|i| (left[i][j] * gens[j]).rem_euclid(n)) };
    let (v1, v2, v3) = (vec_of(0), vec_of(1), vec_of(2));
    let t = &prep.tables;
    let total: BigInt = (0..sizes[0])
        .into_par_iter()
        .map(|a| {
            let mut acc = BigInt::zero();
            for b in 0..sizes[1] {
                for c in 0..sizes[2] {
                    let u: [usize; 3] =
                        std::array::from_fn(|i| ((a * v1[i] + b * v2[i] + c * v3[i]).rem_euclid(n)) as usize);
                    acc += &t[0].numer[u[0]] * &t[1].numer[u[1]] * &t[2].numer[u[2]];
                }
            }
            acc
        })
        .reduce(BigInt::zero, |a, b| a + b);
    Ok(Rat::new(total * multiplicity, prep.denom()))
}
