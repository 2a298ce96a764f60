//! Dense univariate polynomials over `F_p` (coefficients little-endian) and
//! factorization of cubics.

use super::factor::pow_mod;

/// Polynomial over `F_p`, lowest degree first, no trailing zeros.
pub type PolyModP = Vec<u64>;

fn trim(mut a: PolyModP) -> PolyModP {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn reduce_coeffs(coeffs: &[i64], p: u64) -> PolyModP {
    trim(coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect())
}

pub fn degree(a: &[u64]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

fn mul(a: &[u64], b: &[u64], p: u64) -> PolyModP {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

fn sub(a: &[u64], b: &[u64], p: u64) -> PolyModP {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

/// Quotient and remainder of `a / b` for non-zero `b`.
pub fn div_rem(a: &[u64], b: &[u64], p: u64) -> (PolyModP, PolyModP) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = inv_mod(b[db], p);
    let mut rem = a.to_vec();
    if rem.len() <= db {
        return (Vec::new(), trim(rem));
    }
    let mut quot = vec![0u64; rem.len() - db];
    for i in (db..rem.len()).rev() {
        let c = mul_mod(rem[i], lead_inv, p);
        quot[i - db] = c;
        if c == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let k = i - db + j;
            rem[k] = (rem[k] + p - mul_mod(c, bj, p)) % p;
        }
    }
    rem.truncate(db);
    (trim(quot), trim(rem))
}

pub fn make_monic(a: &[u64], p: u64) -> PolyModP {
    match a.last() {
        None => Vec::new(),
        Some(&lead) => {
            let inv = inv_mod(lead, p);
            a.iter().map(|&c| mul_mod(c, inv, p)).collect()
        }
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> PolyModP {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = div_rem(&a, &b, p).1;
        a = b;
        b = r;
    }
    make_monic(&a, p)
}

/// `base^e mod modulus`.
fn pow_mod_poly(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> PolyModP {
    let mut acc: PolyModP = vec![1];
    let mut b = div_rem(base, modulus, p).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = div_rem(&mul(&acc, &b, p), modulus, p).1;
        }
        b = div_rem(&mul(&b, &b, p), modulus, p).1;
        e >>= 1;
    }
    acc
}

pub fn eval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

/// Distinct roots in `F_p` of a non-zero polynomial, sorted.
pub fn roots(f: &[u64], p: u64) -> Vec<u64> {
    let f = make_monic(f, p);
    if p < 64 {
        return (0..p).filter(|&x| eval(&f, x, p) == 0).collect();
    }
    // product of the distinct linear factors: gcd(x^p - x, f)
    let xp = pow_mod_poly(&[0, 1], p, &f, p);
    let g = gcd(&sub(&xp, &[0, 1], p), &f, p);
    let mut out = Vec::new();
    split_linear(g, p, &mut out);
    out.sort_unstable();
    out
}

/// Equal-degree splitting of a monic squarefree product of linear factors.
fn split_linear(g: PolyModP, p: u64, out: &mut Vec<u64>) {
    match degree(&g) {
        None | Some(0) => {}
        Some(1) => out.push((p - g[0]) % p),
        Some(d) => {
            for a in 0..p {
                let h = pow_mod_poly(&[a, 1], (p - 1) / 2, &g, p);
                let h = gcd(&sub(&h, &[1], p), &g, p);
                let dh = degree(&h).unwrap_or(0);
                if dh > 0 && dh < d {
                    let q = div_rem(&g, &h, p).0;
                    split_linear(h, p, out);
                    split_linear(make_monic(&q, p), p, out);
                    return;
                }
            }
            unreachable!("no splitting element found for a product of distinct linear factors");
        }
    }
}

/// Irreducible factorization of a monic cubic over `F_p` as `(factor, multiplicity)`.
/// Linear factors come first, ordered by root.
pub fn factor_cubic(f: &[u64], p: u64) -> Vec<(PolyModP, u32)> {
    let f = make_monic(f, p);
    assert_eq!(degree(&f), Some(3), "factor_cubic expects a cubic");
    let mut rest = f;
    let mut out = Vec::new();
    for r in roots(&rest.clone(), p) {
        let lin = vec![(p - r) % p, 1];
        let mut e = 0;
        loop {
            let (q, rem) = div_rem(&rest, &lin, p);
            if !rem.is_empty() {
                break;
            }
            rest = q;
            e += 1;
        }
        out.push((lin, e));
    }
    // what remains has no roots, so it is 1 or an irreducible quadratic/cubic
    if degree(&rest).unwrap_or(0) > 0 {
        out.push((make_monic(&rest, p), 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_m(m: i64) -> Vec<i64> {
        vec![-1, -(m + 1), -m, 1]
    }

    #[test]
    fn f4_mod_3_splits_as_linear_times_quadratic() {
        let f = reduce_coeffs(&f_m(4), 3);
        let fac = factor_cubic(&f, 3);
        assert_eq!(fac, vec![(vec![2, 1], 1), (vec![1, 0, 1], 1)]);
    }

    #[test]
    fn large_prime_roots_are_roots() {
        let p = 1_000_003;
        for m in 4..30 {
            let f = reduce_coeffs(&f_m(m), p);
            for r in roots(&f, p) {
                assert_eq!(eval(&f, r, p), 0);
            }
            let fac = factor_cubic(&f, p);
            let total: usize = fac.iter().map(|(g, e)| (g.len() - 1) * *e as usize).sum();
            assert_eq!(total, 3);
        }
    }

    #[test]
    fn roots_agree_with_brute_force() {
        for &p in &[67u64, 101, 257, 1009] {
            for m in 4..20 {
                let f = reduce_coeffs(&f_m(m), p);
                let brute: Vec<u64> = (0..p).filter(|&x| eval(&f, x, p) == 0).collect();
                assert_eq!(roots(&f, p), brute, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn repeated_roots_get_multiplicity() {
        // (x - 5)^2 (x - 7) over F_101
        let p = 101;
        let f = mul(&mul(&[96, 1], &[96, 1], p), &[94, 1], p);
        assert_eq!(factor_cubic(&f, p), vec![(vec![96, 1], 2), (vec![94, 1], 1)]);
    }
}
