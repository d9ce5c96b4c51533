//! Attitude reconstruction from gyroscope samples by Chebyshev fitting and
//! functional iteration on the Rodrigues vector.
//!
//! The pipeline for one window of `N` samples is
//!
//! 1. [`fitting::fit`] the samples with a Chebyshev series `ω̂(τ)`,
//! 2. [`iteration::iterate`] the Rodrigues rate equation on `ω̂`,
//! 3. turn the iterate into an attitude with [`kinematics::update_attitude`].
//!
//! [`scenarios`] supplies coning-motion truth and sensor errors for testing.

// `!(x > 0.0)` style guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebpoly;
pub mod error;
pub mod fitting;
pub mod iteration;
pub mod kinematics;
pub mod scenarios;

pub use chebpoly::{chebyshev_nodes, ChebSeries, ChebSeries3, TimeMap};
pub use error::{Error, Result};
pub use fitting::{fit, FitResult, SampleKind, SampleSet};
pub use iteration::{
    convergence_precondition, iterate, mainstream_two_sample, required_iterations, IterationConfig,
    IterationTrace, Method,
};
pub use kinematics::{attitude_error, quat_from_rodrigues, quat_from_rotvec, update_attitude, Dcm, Quaternion, Vec3};
pub use scenarios::{ode_oracle, ConingScenario, SensorNoise};
