//! Numerical library for the Askey-Wilson function transform scheme.
//!
//! The crate evaluates the six q-special-function families of the scheme
//! (Askey-Wilson, big/little q-Jacobi functions and their q-Bessel
//! degenerations), the second-order q-difference operators they satisfy, the
//! mixed continuous/discrete Plancherel measures, and the three transform
//! pairs built on top of them.  A verification CLI exercises the identities
//! (orthogonality relations, dualities, limit transitions) and emits CSV/JSON
//! reports.
//!
//! Module layout:
//! - [`qcore`]: q-shifted factorials, theta functions, the ± product shorthand
//! - [`hyperseries`]: generic rφs evaluator and the very-well-poised ₈W₇
//! - [`families`]: the six function families and their polynomial reductions
//! - [`difference_ops`]: the q-difference operators, eigen-residual checks,
//!   three-term-recurrence continuation and minimal-solution line evaluation
//! - [`measures`]: the weight Δ, constant K, residue masses, contour
//!   quadrature, q-integrals and bilateral sums
//! - [`transforms`]: the three transform pairs and the orthogonality checkers
//! - [`limits`]: limit transitions and duality checks between the families
//! - [`report`]: structured verification records with CSV/JSON serialization

// Parameter validation uses `!(x > 0.0)` deliberately so that NaN inputs are
// rejected alongside non-positive ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod difference_ops;
pub mod families;
pub mod hyperseries;
pub mod limits;
pub mod measures;
pub mod qcore;
pub mod report;
pub mod transforms;

pub use qcore::{QBase, QError, SeriesResult};
