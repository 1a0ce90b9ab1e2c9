//! Central tolerance constants.
//!
//! Exact identities of multiplier arithmetic sit near machine epsilon;
//! identities routed through grid products accumulate a few more ulps, and
//! iterative solvers get their own explicit budgets.

/// Structure checks on pointwise operators (J² = -1, pairing orthogonality).
pub const STRUCTURE: f64 = 1e-12;

/// Identities of exact multiplier arithmetic (Hodge identity, adjointness).
pub const MULTIPLIER_EXACT: f64 = 1e-12;

/// Identities evaluated through dealiased grid products.
pub const GRID_PRODUCT: f64 = 1e-10;

/// Residual budget for the bracket axiom suites.
pub const BRACKET_AXIOMS: f64 = 1e-9;

/// Rank / kernel threshold for singular values in type computations.
pub const RANK_SV: f64 = 1e-10;

/// Eigenvalue sign threshold for Levi-form signatures.
pub const LEVI_EIG: f64 = 1e-10;

/// Hermitian symmetry tolerance on Levi data.
pub const HERMITIAN: f64 = 1e-14;

/// Default stopping tolerance of the gauge solvers.
pub const SOLVER_DEFAULT: f64 = 1e-10;
