//! Numerical laboratory for Hermite spline interpolation on arbitrary knot
//! vectors and least-squares estimation of k-monotone densities.
//!
//! The crate has four public areas:
//!
//! * [`spline`] — piecewise polynomials, the Hermite interpolation operator
//!   on 2k−2 nodes, perfect splines, and sup-norm error reports.
//! * [`counterexample`] — the determinantal machinery showing that the
//!   Hermite interpolation error is unbounded under knot coalescence
//!   (matrix `D`, the determinants δ₁/δ₂, and the 1/(21τ₁) blow-up).
//! * [`lse`] — the least-squares estimator of a k-monotone density via
//!   support reduction, with its Fenchel-condition audit.
//! * [`gap`] — Monte Carlo harness for knot-gap scaling experiments,
//!   the non-coalescence statistic, and the drift process Y_k.

pub mod counterexample;
pub mod error;
pub mod gap;
pub mod lse;
pub mod spline;

pub(crate) mod quad;

pub use error::{Error, Result};
