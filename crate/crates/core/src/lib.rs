//! Hardy-Littlewood constants for prime tuple patterns, and the arithmetic
//! of the multiplicative correction factor behind them.
//!
//! The crate provides:
//!
//! - segmented prime sieving, factorization, and primorials ([`primes`]);
//! - tuple pattern algebra: residue counts, admissibility, symmetry
//!   ([`patterns`]);
//! - the singular series `S(H) = prod_p (1 - nu_p/p)(1 - 1/p)^-k` evaluated
//!   as a truncated Euler product with a rigorous tail bound, plus the exact
//!   closed form for pair patterns ([`singular`]);
//! - the multiplicative factor `h(n) = prod_{p|n, p>2} (p-1)/(p-2)`: exact
//!   rational values, theoretical and empirical moments, extreme-value scans,
//!   and its limiting-distribution apparatus ([`hfun`]);
//! - numerical verification of the growth of `prod_{2<p<=q} (p-1)/(p-2)`
//!   and of pair-constant limits along structured diameter sequences
//!   ([`asymptotics`]);
//! - sieve censuses of actual prime tuples against the model predictions
//!   ([`census`]);
//! - the ratio decomposition and monotonicity checks for subpatterns of
//!   symmetric patterns ([`symmetric`]).
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm`
//! feature when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod asymptotics;
pub mod census;
pub mod constants;
pub mod error;
pub mod hfun;
pub mod math;
pub mod patterns;
pub mod primes;
pub mod rational;
pub mod singular;
pub mod symmetric;

pub use error::Error;
pub use patterns::Pattern;
pub use rational::Rational;
pub use singular::SingularEngine;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
