//! Geometric increment schedules `ε_k = eps0·ratio^k`.

use serde::Serialize;

use crate::diffops::Direction;
use crate::error::{argument, Error, Result};
use crate::function::RealFunction;
use crate::scalar::Scalar;

/// Minimum number of increments any resolved schedule keeps.
pub const MIN_STEPS: usize = 8;

/// Increments below `SOFT_FLOOR·eps_mach·max(1,|x|)` are dropped.
pub const SOFT_FLOOR: f64 = 1e3;

/// Increments at or below `HARD_FLOOR·eps_mach·max(1,|x|)` are rejected.
pub const HARD_FLOOR: f64 = 10.0;

/// Schedules never probe below this multiple of the function resolution.
pub const RESOLUTION_FLOOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonSchedule<T> {
    pub eps0: T,
    pub ratio: T,
    pub count: usize,
}

impl<T: Scalar> Default for EpsilonSchedule<T> {
    /// `2^-4·(1/2)^k`, 40 steps.
    fn default() -> Self {
        Self {
            eps0: T::lit(0.0625),
            ratio: T::lit(0.5),
            count: 40,
        }
    }
}

impl<T: Scalar> EpsilonSchedule<T> {
    pub fn new(eps0: T, ratio: T, count: usize) -> Result<Self> {
        if !(eps0 > T::zero() && eps0.is_finite()) {
            return Err(argument("eps0", format!("{eps0} must be positive and finite")));
        }
        if !(ratio > T::zero() && ratio < T::one()) {
            return Err(argument("ratio", format!("{ratio} outside (0, 1)")));
        }
        if count < MIN_STEPS {
            return Err(argument(
                "count",
                format!("{count} steps, at least {MIN_STEPS} required"),
            ));
        }
        Ok(Self { eps0, ratio, count })
    }

    /// The nominal increments, strictly decreasing.
    pub fn increments(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.count);
        let mut e = self.eps0;
        for _ in 0..self.count {
            out.push(e);
            e = e * self.ratio;
        }
        out
    }

    /// Smallest nominal increment.
    pub fn last(&self) -> T {
        self.eps0 * self.ratio.powi(self.count as i32 - 1)
    }

    /// Increments usable at `x` in direction `dir`.
    ///
    /// Leading increments that leave the domain are skipped, trailing ones
    /// below the precision floor or four times the function resolution are
    /// dropped. At least [`MIN_STEPS`] increments must survive.
    pub fn resolve<F: RealFunction<T> + ?Sized>(&self, f: &F, x: T, dir: Direction) -> Result<Vec<T>> {
        let dom = f.domain();
        if !dom.contains(x) {
            return Err(dom.domain_error(x));
        }
        let scale = x.abs().max(T::one()) * T::epsilon();
        let hard = scale * T::lit(HARD_FLOOR);
        if self.last() <= hard && self.eps0 <= hard {
            return Err(self.underflow(x, hard));
        }
        let mut floor = scale * T::lit(SOFT_FLOOR);
        if let Some(res) = f.resolution() {
            floor = floor.max(res * T::lit(RESOLUTION_FLOOR));
        }
        let room = match dir {
            Direction::Forward => dom.hi - x,
            Direction::Backward => x - dom.lo,
        };
        let all = self.increments();
        let inside: Vec<T> = all.iter().copied().filter(|&e| e <= room).collect();
        if inside.len() < MIN_STEPS {
            let probe = match dir {
                Direction::Forward => x + self.eps0,
                Direction::Backward => x - self.eps0,
            };
            return Err(dom.domain_error(probe));
        }
        let kept: Vec<T> = inside.into_iter().filter(|&e| e > floor).collect();
        if kept.len() < MIN_STEPS {
            return Err(self.underflow(x, floor));
        }
        Ok(kept)
    }

    fn underflow(&self, x: T, floor: T) -> Error {
        Error::ScheduleUnderflow {
            eps: self.last().to_f64_lossy(),
            x: x.to_f64_lossy(),
            floor: floor.to_f64_lossy(),
        }
    }
}
