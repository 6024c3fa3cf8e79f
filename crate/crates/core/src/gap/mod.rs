//! Monte Carlo harness for the knot-gap experiments: per-trial gap
//! statistics near a point, log-log rate estimation with bootstrap
//! intervals, the fundamental-inequality audit, the limit-distribution
//! constants, and simulation of the drift process Y_k.

mod audit;
mod density;
mod limits;
mod rate;
mod rng;
mod trial;
mod yk;

pub use audit::{default_tau_bar, inequality_audit, AuditOutcome, InequalityAudit};
pub use density::{Exponential, TruthDensity};
pub use limits::{limit_constants, LimitConstants};
pub use rate::{estimate_rate, RateEstimate};
pub use rng::{trial_rng, trial_seed};
pub use trial::{refit_trial, run_trial, select_window, window_size, GapTrialResult};
pub use yk::{simulate_yk, yk_drift, YkPath};
