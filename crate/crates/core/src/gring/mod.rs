//! Graded-commutative cohomology models: rings with nilpotency and a degree
//! cap, sparse elements with Koszul signs, integration, currents and fiber
//! integration.

mod current;
mod element;
pub mod parse;
pub mod poly;
mod ring;

pub use current::{pair_current, Current, CurrentAtom};
pub use element::{format_monomial, RingElement};
pub use parse::{parse_element, parse_element_at, parse_scalar, parse_variables, Position};
pub use poly::{
    coth_sum_terms, rational_identity_check, rational_identity_witness, IdentityWitness, MultiPoly,
    RationalTerm,
};
pub use ring::{FiberSplit, GradedRing, GradedVariable, Monomial, RingBuilder, VarTag};
