//! Piecewise-polynomial splines and the Hermite interpolation operator.
//!
//! The interpolation operator takes value-and-slope data at `2k−2` nodes and
//! produces the unique spline of degree `2k−1` with simple knots at the
//! interior nodes. Everything is represented in a per-interval local power
//! basis `(x − left endpoint)^j`.

mod hermite;
mod interp_error;
mod knots;
mod perfect;
pub(crate) mod poly;
mod sup;
mod targets;

pub use hermite::{hermite_interpolate, HermiteData, HermiteOperator};
pub use interp_error::{interp_error, ErrorReport, SupEntry};
pub use knots::KnotVector;
pub use perfect::perfect_spline;
pub use poly::{PiecewisePoly, Polynomial};
pub use sup::golden_max;
pub use targets::{truncated_power, FnTarget, InterpTarget, TruncatedPower};
