//! Operator-valued positive definite functions on free groups.
//!
//! The crate builds, extends, parametrizes and verifies positive definite
//! functions `Φ: F_m → M_k(C)` known on a ball of words, and factors positive
//! noncommutative trigonometric polynomials as hermitian squares.
//!
//! - [`words`]: reduced words and lexicographic orders
//! - [`cayley`]: tree metric, the graphs `Γ_ν` and the cliques `C_ν`
//! - [`linalg`]: dense Hermitian kernels
//! - [`pdfun`]: the [`PdFunction`] model, Gram matrices, positivity checks
//! - [`completion`]: single-entry positive completion with a contraction parameter
//! - [`extend`]: step-by-step extension, parameters, maximal orthogonality
//! - [`quasimult`]: quasi-multiplicative functions
//! - [`ncpoly`]: noncommutative polynomials and sum-of-squares certificates
//! - [`sampling`]: seeded random fixtures
//! - [`json`]: the on-disk formats

pub mod cayley;
pub mod completion;
pub mod error;
pub mod extend;
pub mod json;
pub mod linalg;
pub mod ncpoly;
pub mod pdfun;
pub mod quasimult;
pub mod sampling;
pub mod words;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Tolerance, C64};
pub use pdfun::{Domain, PdFunction};
pub use words::{ClassCursor, GroupContext, Word};
