//! Exact mixed moments of the k-variate normal distribution with unit
//! variances, and the matching-count interpretation of their coefficients.
//!
//! Three engines compute the same quantity and check each other:
//!
//! * [`wick`]: sum over pairing types of the moment generating function
//!   expansion (the reference oracle), plus a literal matching enumerator;
//! * [`stein`]: the mixed recurrence from Gaussian integration by parts,
//!   memoised over the down-set of the target;
//! * [`pure`]: a single-direction recurrence with polynomial coefficients,
//!   discovered by exact fitting and run with a constant-size window.
//!
//! All arithmetic is exact ([`ExactRational`], [`Polynomial`]).

pub mod bench;
pub mod covariance;
pub mod engine;
pub mod error;
pub mod marriage;
pub mod poly;
pub mod pure;
pub mod rational;
pub mod stein;
pub mod table;
pub mod wick;

pub use covariance::{CovarianceSpec, Entry, MultiIndex};
pub use error::{Error, ParseError, Result};
pub use poly::{Monomial, Polynomial, Var};
pub use rational::ExactRational;
