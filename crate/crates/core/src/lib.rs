//! Geometry of smooth Gaussian random fields built by filtering white noise.
//!
//! The crate computes Lipschitz-Killing curvatures (LKCs) of scale-space
//! parameter spaces `T x [sigma_l, sigma_u]` and of rotation-space parameter
//! spaces `T x S(sigma_2^-2, sigma_1^-2)` under the metric induced by the
//! field, feeds them through the Gaussian kinematic formula to obtain expected
//! Euler characteristics of excursion sets, and validates everything against
//! independent oracles: closed forms, brute-force quadrature and Monte-Carlo
//! simulation of the fields themselves.
//!
//! Module map:
//!
//! * [`kernel`] - radial filter kernels and their moment constants
//! * [`domain`] - Euclidean LKCs of the spatial search region
//! * [`scale`] - induced-metric LKCs of scale space (full strata pipeline)
//! * [`rotation`] - top-two LKCs of rotation space (eigenvalue-simplex integrals)
//! * [`gkf`] - expected Euler characteristic curves and thresholds
//! * [`sim`] - white-noise field simulation and empirical excursion statistics
//! * [`verify`] - a registry of runtime self-checks mirroring the test suite

pub mod domain;
pub mod error;
pub mod gkf;
pub mod kernel;
pub mod linalg;
pub mod quad;
pub mod rotation;
pub mod scale;
pub mod sim;
pub mod special;
pub mod verify;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
