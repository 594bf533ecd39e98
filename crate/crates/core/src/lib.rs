//! Spectral laboratory for singular perturbations whose limit problem
//! violates the Shapiro–Lopatinskii condition on part of the boundary.
//!
//! - [`opsym`]: operator polynomials, characteristic roots and the
//!   Shapiro–Lopatinskii check on the half-plane.
//! - [`spectral`]: frequency grids, quadrature inverse transforms and
//!   oscillation diagnostics.
//! - [`strip`]: the explicit strip model, the Hadamard example and the
//!   truncated-cosh sequence.
//! - [`layer`]: boundary-layer corrector and the symbols `P`, `Q`.
//! - [`annulus`]: per-mode solution of `(A + ε²B) v = F` on an annulus.

pub mod annulus;
pub mod forcing;
pub mod layer;
pub mod opsym;
pub mod spectral;
pub mod strip;

pub use forcing::Forcing;

/// Library version, echoed in run summaries.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
