//! Finite-truncation model of the universal period mapping on the
//! H^{1/2} space of the circle.
//!
//! Functions on the circle are truncated Fourier series
//! ([`fourier::CircleFunction`]). Circle homeomorphisms act on them by
//! pullback, which in the orthonormal basis `e^{ik theta}/sqrt(k)` is a
//! symplectic block operator `[[A, B], [conj B, conj A]]`
//! ([`pullback::BlockOperator`]). The period matrix of a map is
//! `Z = conj(B) A^{-1}` ([`period::period_matrix`]), a point of the Siegel
//! disc. The [`quantum`] module holds the commutator `[J, M_f]` and the
//! welding kernels with their diagonal limits.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_map;
pub mod error;
pub mod fourier;
pub mod json;
pub mod linalg;
pub mod period;
pub mod pullback;
pub mod quantum;
pub mod suite;
pub mod symplectic;

pub use circle_map::{make_map, CircleMap, MapDescriptor};
pub use error::{Error, Result};
pub use fourier::{CircleFunction, SampleGrid, C64};
pub use period::{PeriodMatrix, SiegelReport};
pub use pullback::BlockOperator;
