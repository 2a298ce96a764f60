//! Bernoulli numbers, Bernoulli polynomials and their periodic extensions.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rat;

const DEFAULT_MAX_INDEX: usize = 64;

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`) and binomial rows used to
/// expand `B_r(x) = sum_k C(r, k) B_k x^(r-k)`.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    numbers: Vec<Rat>,
    binomials: Vec<Vec<BigInt>>,
}

impl BernoulliTable {
    pub fn new(max_index: usize) -> Self {
        let mut binomials: Vec<Vec<BigInt>> = Vec::with_capacity(max_index + 2);
        for n in 0..=max_index + 1 {
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &binomials[n - 1][k - 1] + &binomials[n - 1][k];
            }
            binomials.push(row);
        }

        // sum_{k=0}^{n} C(n+1, k) B_k = 0 for n >= 1
        let mut numbers: Vec<Rat> = Vec::with_capacity(max_index + 1);
        numbers.push(Rat::one());
        for n in 1..=max_index {
            let mut acc = Rat::zero();
            for (k, b) in numbers.iter().enumerate() {
                acc += Rat::from_integer(binomials[n + 1][k].clone()) * b;
            }
            numbers.push(-acc / Rat::from_integer(BigInt::from(n + 1)));
        }
        BernoulliTable { numbers, binomials }
    }

    pub fn max_index(&self) -> usize {
        self.numbers.len() - 1
    }

    /// The Bernoulli number `B_r`.
    pub fn number(&self, r: usize) -> &Rat {
        &self.numbers[r]
    }

    /// Exact value of the Bernoulli polynomial `B_r(x)`.
    pub fn poly_eval(&self, r: usize, x: &Rat) -> Rat {
        assert!(r <= self.max_index(), "Bernoulli index {r} beyond table");
        // Horner in x over the coefficients C(r, k) B_k of x^(r-k).
        let mut acc = Rat::zero();
        for k in 0..=r {
            acc = acc * x + Rat::from_integer(self.binomials[r][k].clone()) * &self.numbers[k];
        }
        acc
    }

    /// `B_r(x - floor(x))`, with the convention that the value is 0 when
    /// `r == 1` and `x` is an integer.
    pub fn periodic(&self, r: usize, x: &Rat) -> Rat {
        if r == 1 && x.is_integer() {
            return Rat::zero();
        }
        let frac = x - Rat::from_integer(x.numer().div_floor(x.denom()));
        self.poly_eval(r, &frac)
    }
}

/// Process-wide table covering indices up to 64; built on first use.
pub fn shared_table() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| BernoulliTable::new(DEFAULT_MAX_INDEX))
}

fn with_table<T>(r: usize, f: impl FnOnce(&BernoulliTable) -> T) -> T {
    let shared = shared_table();
    if r <= shared.max_index() {
        f(shared)
    } else {
        f(&BernoulliTable::new(r))
    }
}

/// The Bernoulli polynomial `B_r(x)`, evaluated exactly.
pub fn bernoulli_poly_eval(r: usize, x: &Rat) -> Rat {
    with_table(r, |t| t.poly_eval(r, x))
}

/// The periodic Bernoulli function: `B_r({x})`, and 0 for `r = 1` at integers.
pub fn periodic_bernoulli(r: usize, x: &Rat) -> Rat {
    with_table(r, |t| t.periodic(r, x))
}
