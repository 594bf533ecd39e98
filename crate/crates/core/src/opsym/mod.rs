//! Symbolic constant-coefficient operators in two variables and the
//! Shapiro–Lopatinskii check on the half-plane.

mod parse;
mod poly;
mod roots;
mod sl;

use num_complex::Complex64;
use thiserror::Error;

pub use parse::parse_operator;
pub use poly::{ComplexBivarPoly, Exponent};
pub use roots::{cluster_roots, polynomial_roots, refine_multiple_root};
pub use sl::{
    apply_boundary, characteristic_roots, check_sl, decaying_solution_basis, is_elliptic,
    lopatinskii_matrix, BasisFunction, CharRoot, RootSystem, SignReport, SlStatus, SlVerdict,
    XiSign, DET_TOL, IMAG_AXIS_TOL, ROOT_CLUSTER_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unsupported variable '{name}' at position {position}")]
    UnsupportedVariable { name: String, position: usize },
    #[error("operator has non-finite coefficients")]
    NonFinite,
    #[error("operator is identically zero")]
    ZeroOperator,
    #[error("leading coefficient vanishes in the normal direction")]
    DegenerateDirection,
    #[error("characteristic root {root} lies on the imaginary axis")]
    ImaginaryRoot { root: Complex64 },
    #[error("eigenvalue iteration did not converge")]
    RootsNotConverged,
    #[error("{conditions} boundary conditions for {decaying} decaying roots")]
    CountMismatch { decaying: usize, conditions: usize },
}
