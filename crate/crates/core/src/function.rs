//! Evaluable real functions on closed intervals.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{argument, Error, Result};
use crate::scalar::Scalar;

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(argument(
                "interval",
                format!("[{lo}, {hi}] is not a proper finite interval"),
            ));
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval<T>) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub(crate) fn domain_error(&self, x: T) -> Error {
        Error::Domain {
            x: x.to_f64_lossy(),
            lo: self.lo.to_f64_lossy(),
            hi: self.hi.to_f64_lossy(),
        }
    }
}

/// A real function with a closed domain of definition.
///
/// Implementations must be pure: repeated evaluation at the same point yields
/// bit-identical results, and evaluation is safe from concurrent callers.
pub trait RealFunction<T: Scalar>: Send + Sync {
    fn domain(&self) -> Interval<T>;

    /// Evaluates without a domain check.
    fn value(&self, x: T) -> T;

    /// Smallest scale at which the function carries information, if finite.
    ///
    /// Sampled data reports its minimum abscissa gap; truncated series report
    /// the wavelength of their highest retained harmonic. Increment schedules
    /// are floored at four times this value.
    fn resolution(&self) -> Option<T> {
        None
    }

    fn eval(&self, x: T) -> Result<T> {
        let dom = self.domain();
        if dom.contains(x) {
            Ok(self.value(x))
        } else {
            Err(dom.domain_error(x))
        }
    }
}

impl<T: Scalar, F: RealFunction<T> + ?Sized> RealFunction<T> for &F {
    fn domain(&self) -> Interval<T> {
        (**self).domain()
    }
    fn value(&self, x: T) -> T {
        (**self).value(x)
    }
    fn resolution(&self) -> Option<T> {
        (**self).resolution()
    }
}

impl<T: Scalar, F: RealFunction<T> + ?Sized> RealFunction<T> for Arc<F> {
    fn domain(&self) -> Interval<T> {
        (**self).domain()
    }
    fn value(&self, x: T) -> T {
        (**self).value(x)
    }
    fn resolution(&self) -> Option<T> {
        (**self).resolution()
    }
}

impl<T: Scalar, F: RealFunction<T> + ?Sized> RealFunction<T> for Box<F> {
    fn domain(&self) -> Interval<T> {
        (**self).domain()
    }
    fn value(&self, x: T) -> T {
        (**self).value(x)
    }
    fn resolution(&self) -> Option<T> {
        (**self).resolution()
    }
}

/// Shared closure `x -> f(x)`.
pub type EvalFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A closure restricted to an interval.
#[derive(Clone)]
pub struct FnFunction<T> {
    domain: Interval<T>,
    eval: EvalFn<T>,
}

impl<T: Scalar> FnFunction<T> {
    pub fn new(domain: Interval<T>, f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self {
            domain,
            eval: Arc::new(f),
        }
    }
}

impl<T: Scalar> std::fmt::Debug for FnFunction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnFunction").field("domain", &self.domain).finish()
    }
}

impl<T: Scalar> RealFunction<T> for FnFunction<T> {
    fn domain(&self) -> Interval<T> {
        self.domain
    }
    fn value(&self, x: T) -> T {
        (self.eval)(x)
    }
}

/// Piecewise-linear interpolant through tabulated samples.
#[derive(Debug, Clone)]
pub struct SampledFunction<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    min_gap: T,
}

impl<T: Scalar> SampledFunction<T> {
    pub const MIN_ROWS: usize = 16;

    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(argument("samples", "abscissa and ordinate columns differ in length"));
        }
        if xs.len() < Self::MIN_ROWS {
            return Err(argument(
                "samples",
                format!("{} rows given, at least {} required", xs.len(), Self::MIN_ROWS),
            ));
        }
        if let Some(i) = xs.iter().chain(ys.iter()).position(|v| !v.is_finite()) {
            return Err(argument(
                "samples",
                format!("non-finite value in row {}", i % xs.len() + 1),
            ));
        }
        let mut min_gap = T::infinity();
        for (i, w) in xs.windows(2).enumerate() {
            let gap = w[1] - w[0];
            if gap <= T::zero() {
                return Err(argument(
                    "samples",
                    format!("abscissae not strictly increasing at row {}", i + 2),
                ));
            }
            min_gap = min_gap.min(gap);
        }
        Ok(Self { xs, ys, min_gap })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Minimum abscissa gap.
    pub fn min_gap(&self) -> T {
        self.min_gap
    }
}

impl<T: Scalar> RealFunction<T> for SampledFunction<T> {
    fn domain(&self) -> Interval<T> {
        Interval {
            lo: self.xs[0],
            hi: self.xs[self.xs.len() - 1],
        }
    }

    fn value(&self, x: T) -> T {
        let n = self.xs.len();
        let i = self.xs.partition_point(|&v| v <= x);
        if i == 0 {
            return self.ys[0];
        }
        if i >= n {
            return self.ys[n - 1];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        let s = (x - x0) / (x1 - x0);
        y0 + (y1 - y0) * s
    }

    fn resolution(&self) -> Option<T> {
        Some(self.min_gap)
    }
}
