//! Extremal phase diagram of generalized edge-triangle exponential random
//! graph models.
//!
//! As `beta2 -> -inf` along `beta1 = a * beta2 + b`, the limiting graphons are
//! found by minimizing `g(e) = a e + r(e)^gamma` along the lower boundary of
//! the edge-triangle density region. This crate evaluates that boundary,
//! the critical directions and exponents that organize its minimizers, the
//! case analysis that names the limiting graphon set, and the numeric and
//! Monte Carlo oracles used to check it.

// `!(x > 0.0)` is how domain checks reject NaN along with the bad range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod criticals;
pub mod curves;
pub mod error;
pub mod graphon;
pub mod lambert_w;
pub mod mcmc;
pub mod par;
pub mod table1;
pub mod variational;

pub use classifier::{classify, Classification, Direction, GraphonDescriptor, LimitSet, ParamPoint};
pub use error::{Error, Result};
pub use lambert_w::{lambert_w, Branch};
pub use par::Exec;
pub use variational::{Minimizer, MinimizerKind, Objective};
