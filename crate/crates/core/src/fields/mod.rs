//! Tensor-valued fields on flat complex tori represented by truncated
//! Fourier series, with exact differentiation, dealiased products and norm
//! evaluation.
//!
//! Nonlinear operations (products, wedges) are evaluated on the sampling
//! grid and truncated back to the coefficient box; the constraint
//! `3K <= N` makes single products alias-free.

mod fft;
mod field;
mod geometry;
mod io;
mod valence;

pub use fft::grid_fft;
pub use field::{norms, Dir, NormReport, SpectralField};
pub use geometry::TorusGeometry;
pub use io::{read_snapshot, write_snapshot};
pub use valence::{binom, merge_sign, removal_sign, subsets, Valence};
