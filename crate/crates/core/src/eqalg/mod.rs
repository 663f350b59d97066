//! Exact multivariate rational functions in named equivariant parameters.
//!
//! Polynomials are sparse maps from exponent vectors to big integers;
//! [`EqScalar`] keeps reduced fractions with a sign-normalized denominator so
//! that equality is structural. Characters of torus representations live in
//! [`character`] together with their Euler and Chern classes.

pub mod character;
mod parse;
pub mod poly;
pub mod scalar;
pub mod vars;

pub use character::{chern_part, euler_of_character, LinearForm, WeightCharacter};
pub use poly::{Mono, Poly};
pub use scalar::EqScalar;
pub use vars::Var;

#[cfg(test)]
mod tests;

/// `n/d` as an exact rational.
pub fn rational(n: i64, d: i64) -> num_rational::BigRational {
    num_rational::BigRational::new(n.into(), d.into())
}
