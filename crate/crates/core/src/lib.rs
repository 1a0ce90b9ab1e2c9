//! Generalized-complex linear algebra, spectral fields, differential
//! brackets, a closed-torus Hodge package and two holomorphic gauge-fixing
//! solvers on flat complex tori.

pub mod error;
pub mod fields;

pub mod algebra;
pub mod brackets;
pub mod forms;
pub mod deformation;
pub mod hodge;
pub mod solver;
pub mod tol;

pub use error::{GcError, Result};
