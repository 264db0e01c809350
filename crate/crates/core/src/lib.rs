//! Exact characteristic-class calculus for equivariant Lefschetz formulas on
//! foliated manifolds.

pub mod arith;
pub mod error;
pub mod genera;
pub mod gring;
pub mod identities;
pub mod lefschetz;
pub mod series;
pub mod spaces;

pub use arith::{Coeff, Cyclotomic, Rational};
pub use error::{Error, Result};
