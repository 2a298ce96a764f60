//! Elementary number theory over machine integers.

pub mod factor;
pub mod polymod;

pub use factor::{factor_u64, is_prime_u64, is_squarefree, primes_up_to, FactorBudget};
