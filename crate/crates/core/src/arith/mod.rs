//! Exact scalars: rationals, cyclotomic field elements and Bernoulli numbers.

mod bernoulli;
mod cyclotomic;
mod rational;

pub use bernoulli::{bernoulli, bernoulli_numbers, binomial_row};
pub use cyclotomic::{cyclotomic_polynomial, divisors, euler_phi, Cyclotomic};
pub use rational::{
    format_rational, int, is_integer, is_power_of_two, parse_rational, rat, serde_rational, Coeff,
    Rational,
};

/// Membership of `a` in Z[ζ_κ].
pub fn is_cyclotomic_integer(a: &Cyclotomic, kappa: usize) -> bool {
    a.is_cyclotomic_integer(kappa)
}
