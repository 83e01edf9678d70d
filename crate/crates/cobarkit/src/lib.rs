//! Exact mod-p computations in and around the Steenrod algebra.
//!
//! The crate is organized bottom-up:
//!
//! * [`fp`] — arithmetic over the prime field, Lucas binomials, sparse
//!   F_p-linear algebra, and small combinatorial counts.
//! * [`steenrod`] — the Steenrod algebra on admissible monomials, with Adem
//!   normalization and the action on H^*(CP^infinity).
//! * [`dual`] — the Milnor dual Hopf algebra F_p[xi] (x) Lambda[tau], its
//!   coproduct and antipode, quotient Hopf algebras, and components of powers
//!   of the conjugate class xibar = sum_n chi(xi_n).
//! * [`thom`] — H_*(MU; F_p) and H_*(MSU; F_p) as comodule algebras at odd
//!   primes, the splitting of H_*(MSU) as A' (x) PH, and membership tests.
//! * [`cobar`] — the reduced cobar complex over the dual (and its quotients)
//!   with coefficients in the Thom comodules, Cotor dimension tables, and the
//!   change-of-rings comparison.
//! * [`adams`] — the Adams E_2-term for MSU at odd primes: the polynomial
//!   model, odd-degree vanishing, stable-column ranks, and the lambda_n /
//!   generator bookkeeping for the Hurewicz-image corollaries.
//!
//! Everything is exact: coefficients are reduced residues mod p, monomial
//! maps are ordered, and serialization is deterministic.

pub mod adams;
pub mod cobar;
pub mod dual;
pub mod fp;
pub mod steenrod;
pub mod thom;

use thiserror::Error;

/// Crate-wide error type.
///
/// `Validation`-flavored variants indicate bad input; `ResourceLimit` means a
/// computation was refused because an intermediate object would exceed the
/// configured size bound (the computation itself is exact and would succeed
/// given more room).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("operation requires an odd prime, got p = {0}")]
    OddPrimeRequired(u32),
    #[error("prime mismatch: p = {0} vs p = {1}")]
    PrimeMismatch(u32, u32),
    #[error("ambient mismatch: {0} vs {1}")]
    AmbientMismatch(String, String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource limit exceeded: {what} would have size {got}, cap is {cap}")]
    ResourceLimit {
        what: String,
        got: usize,
        cap: usize,
    },
}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
