//! Least-squares estimation of a k-monotone density.
//!
//! The estimator minimizes `½∫g² − ∫g dG_n` over the cone of k-monotone
//! functions on `(0, T]`, represented as nonnegative mixtures of the
//! scaled kernels `x ↦ (k/θ)(1 − x/θ)_+^{k−1}`. A fit is optimal exactly
//! when the Fenchel conditions hold: `H̃_n ≥ Y_n` everywhere with equality
//! at the knots, where `H̃_n` is the k-fold integral of the fit and `Y_n`
//! the (k−1)-fold integral of the empirical distribution.

mod empirical;
mod fit;
mod kernel;
mod sample;
mod solver;

pub use empirical::{empirical_y, EmpiricalIntegrals};
pub use fit::{extract_knots, fenchel_audit, FenchelAudit, LseFit, LseFitExport};
pub use kernel::{gram, kernel, kernel_deriv};
pub use sample::{SampleSet, SampleSource};
pub use solver::{fit_lse, SolverConfig};
