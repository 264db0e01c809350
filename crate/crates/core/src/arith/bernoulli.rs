use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Rational, int};

/// Binomial coefficients C(n, k) for k = 0..=n.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// b_0, ..., b_n from Σ_{k=0}^{m} C(m+1, k) b_k = 0 (m ≥ 1), b_0 = 1.
///
/// This convention gives b_1 = -1/2; every odd index above 1 is zero.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(int(1));
    for m in 1..=n {
        let row = binomial_row(m + 1);
        let mut acc = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            if !bk.is_zero() {
                acc += bk * Rational::from_integer(row[k].clone());
            }
        }
        b.push(-acc / Rational::from_integer(row[m].clone()));
    }
    b
}

pub fn bernoulli(n: usize) -> Rational {
    bernoulli_numbers(n).pop().unwrap()
}
