//! Radial minimizers of the planar p-harmonic energy between annuli.
//!
//! The library constructs the minimizing radial profile for exponents
//! `1 <= p < 2`, classifies annulus pairs into the homeomorphic / collapsed /
//! no-minimizer phase regimes via the critical modulus function, and carries
//! several independent numerical verification devices: a dynamic-programming
//! oracle over discretized monotone profiles, a polar-grid perturbation probe,
//! the closed-curve energy `B(gamma)` with its symmetrization machinery, and
//! the explicit free-boundary construction showing the identity map is not
//! minimal for small `p`.

pub mod counterexample;
pub mod curve;
pub mod gauge;
pub mod geometry;
pub mod modulus;
pub mod numeric;
pub mod oracle;
pub mod radial;
pub mod verify;

mod ext;

pub use ext::ExtReal;

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent p = {0}: must satisfy p >= 1")]
    InvalidExponent(f64),
    #[error("exponent p = {0} out of range: operation requires 1 <= p < 2")]
    ExponentOutOfRange(f64),
    #[error("invalid annulus radii: inner {inner}, outer {outer}")]
    InvalidAnnulus { inner: f64, outer: f64 },
    #[error("argument {0} outside domain {1:?}")]
    OutOfDomain(f64, (f64, f64)),
    #[error("sampled function needs at least 2 strictly increasing nodes")]
    InvalidGrid,
    #[error("profile is not monotone non-decreasing at node {0}")]
    NonMonotoneProfile(usize),
    #[error("profile endpoint {got} differs from required {want} by more than {tol}")]
    EndpointMismatch { got: f64, want: f64, tol: f64 },
    #[error("quadrature failed to converge to tolerance {tol} (best error {err})")]
    QuadratureNonConvergence { tol: f64, err: f64 },
    #[error("root finding bracket [{0}, {1}] does not change sign")]
    BracketFailure(f64, f64),
    #[error("operation requires regime {want}, instance is {got}")]
    RegimeMismatch { want: &'static str, got: &'static str },
    #[error("no minimizer exists for this instance (p = 1, target too thick)")]
    NoMinimizer,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
