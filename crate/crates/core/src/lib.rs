//! Exact computer algebra for q-expansions of modular forms, characteristic
//! classes of products of manifolds, and the genus computations built on them.
//!
//! Everything is carried out in exact rational arithmetic: truncated q-series
//! on a fractional exponent lattice ([`qseries`]), the named modular forms and
//! weight-12 basis fits ([`modforms`]), Pontryagin-class polynomials with
//! lambda-ring operations on virtual bundles ([`charring`]), a catalog of
//! example manifolds given by their Pontryagin numbers ([`manifolds`]), the
//! Witten genus and twisted signature machinery ([`genus`]), and an executable
//! check suite ([`verify`]).

pub mod charring;
pub mod error;
pub mod genus;
pub mod manifolds;
pub mod modforms;
pub mod qseries;
pub mod rational;
pub mod verify;

pub use error::Error;
pub use rational::Rat;

pub type Result<T> = std::result::Result<T, Error>;
