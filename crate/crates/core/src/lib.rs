//! Sato-Tate angles of cusp-form coefficients and the spacing statistics of
//! their unfolded values.
//!
//! Coefficients come from two independent sources: exact q-expansions of eta
//! products ([`eta`]) and point counts on Weierstrass curves ([`curve`]). They
//! are cross-checked against each other and against the Hecke relations
//! ([`hecke`]), turned into angles and unfolded through the Sato-Tate measure
//! ([`angles`]), and the next^k nearest-neighbour spacings of the unfolded
//! values are compared with the Poisson law `s^k e^{-s} / k!` ([`spacing`]).
//! [`report`] drives the whole pipeline and writes plot data.

pub mod angles;
pub mod cli;
pub mod curve;
mod error;
pub mod eta;
pub mod hecke;
pub mod histogram;
pub mod presets;
pub mod primes;
pub mod report;
pub mod spacing;

pub use error::{Error, Result};
