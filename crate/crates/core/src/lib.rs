//! Fractional velocities of non-differentiable functions.
//!
//! The crate estimates one-sided fractional velocities
//! `lim_{ε→0} (f(x±ε) − f(x)) / ε^β` together with the growth and oscillation
//! conditions governing their existence, scans intervals for the set of points
//! where the velocity is non-zero, and compares velocities with the local
//! fractional derivative obtained from Riemann–Liouville operators.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diffops;
pub mod error;
pub mod estimator;
pub mod function;
pub mod limit;
pub mod quadrature;
pub mod regression;
pub mod rlcalc;
pub mod scalar;
pub mod scanner;
pub mod schedule;
pub mod special;
pub mod zoo;

pub use diffops::{
    difference, fractional_variation, interval_oscillation, sampled_oscillation, variation_tail_oscillation, Direction,
    OscillationEstimate,
};
pub use error::{Error, Result};
pub use estimator::{
    check_conditions, estimate_holder_exponent, estimate_velocity, taylor_residual, variation_bound_constants,
    velocity_limit, ConditionCheck, HolderEstimate, VelocityReport,
};
pub use function::{FnFunction, Interval, RealFunction, SampledFunction};
pub use limit::{estimate_limit, LimitEstimate, LimitRoute, LimitStatus};
pub use rlcalc::{
    check_lfd_equivalence, kg_lfd, kg_lfd_substitution, rl_derivative, rl_derivative_right, rl_integral,
    rl_integral_right, LfdOptions, LfdReport, QuadratureConfig, QuadratureScheme,
};
pub use scalar::Scalar;
pub use scanner::{
    null_measure_trend, scan_change_set, verify_mean_value, verify_rolle, verify_weak_darboux, ChangeSetReport,
    IntervalVerdict, Theorem,
};
pub use schedule::EpsilonSchedule;
pub use special::{beta_fn, gamma, ln_gamma};
pub use zoo::{AnalyticTestFunction, KnownVelocity, MarkedPoint, Regularity};

pub type Interval64 = Interval<f64>;
pub type EpsilonSchedule64 = EpsilonSchedule<f64>;
pub type LimitEstimate64 = LimitEstimate<f64>;
pub type OscillationEstimate64 = OscillationEstimate<f64>;
pub type VelocityReport64 = VelocityReport<f64>;
pub type HolderEstimate64 = HolderEstimate<f64>;
pub type AnalyticTestFunction64 = AnalyticTestFunction<f64>;
pub type SampledFunction64 = SampledFunction<f64>;
pub type ChangeSetReport64 = ChangeSetReport<f64>;
pub type IntervalVerdict64 = IntervalVerdict<f64>;
pub type LfdReport64 = LfdReport<f64>;
pub type LfdOptions64 = LfdOptions<f64>;
pub type QuadratureConfig64 = QuadratureConfig<f64>;
