//! Finite-increment operators: differences, fractional variations and
//! one-sided oscillations.

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::function::{Interval, RealFunction};
use crate::scalar::Scalar;
use crate::schedule::EpsilonSchedule;

/// Side of the point probed by an increment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Doubling stops once the relative change falls below this value.
pub const REFINE_REL_TOL: f64 = 1e-3;

/// Sample cap for adaptive oscillation estimates.
pub const MAX_OSC_SAMPLES: usize = 1 << 16;

/// Initial sample count used by the estimators.
pub const DEFAULT_OSC_SAMPLES: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationEstimate<T> {
    pub value: T,
    pub n_samples: usize,
    pub refined: bool,
}

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if eps > T::zero() && eps.is_finite() {
        Ok(())
    } else {
        Err(argument("eps", format!("{eps} must be positive and finite")))
    }
}

pub(crate) fn check_order<T: Scalar>(beta: T) -> Result<()> {
    if beta > T::zero() && beta <= T::one() {
        Ok(())
    } else {
        Err(argument("beta", format!("{beta} outside (0, 1]")))
    }
}

/// The probed interval `[x, x+eps]` or `[x−eps, x]`, checked against the domain.
pub fn probe_interval<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    eps: T,
    dir: Direction,
) -> Result<Interval<T>> {
    check_eps(eps)?;
    let dom = f.domain();
    let (lo, hi) = match dir {
        Direction::Forward => (x, x + eps),
        Direction::Backward => (x - eps, x),
    };
    for p in [lo, hi] {
        if !dom.contains(p) {
            return Err(dom.domain_error(p));
        }
    }
    Ok(Interval { lo, hi })
}

/// `f(x+eps) − f(x)` forward, `f(x) − f(x−eps)` backward.
pub fn difference<T: Scalar, F: RealFunction<T> + ?Sized>(f: &F, x: T, eps: T, dir: Direction) -> Result<T> {
    let iv = probe_interval(f, x, eps, dir)?;
    Ok(f.value(iv.hi) - f.value(iv.lo))
}

/// Difference divided by `eps^beta`.
///
/// The divisor uses the increment actually realised in floating point,
/// `fl(x+eps) − x`, so that pure power laws are reproduced exactly.
pub fn fractional_variation<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    eps: T,
    beta: T,
    dir: Direction,
) -> Result<T> {
    check_order(beta)?;
    let iv = probe_interval(f, x, eps, dir)?;
    Ok((f.value(iv.hi) - f.value(iv.lo)) / iv.width().powf(beta))
}

/// `sup − inf` of `f` over `n` uniform samples of `iv`, both endpoints included.
pub fn sampled_oscillation<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    iv: Interval<T>,
    n: usize,
) -> Result<OscillationEstimate<T>> {
    if n < 2 {
        return Err(argument("n_samples", format!("{n} samples, at least 2 required")));
    }
    let dom = f.domain();
    if !dom.contains_interval(&iv) {
        return Err(dom.domain_error(if dom.contains(iv.lo) { iv.hi } else { iv.lo }));
    }
    let (lo, hi) = sample_range(f, iv, n, 0, 1);
    Ok(OscillationEstimate {
        value: hi - lo,
        n_samples: n,
        refined: false,
    })
}

/// Extremes over sample indices `start, start+step, …` of the `n`-point grid.
fn sample_range<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    iv: Interval<T>,
    n: usize,
    start: usize,
    step: usize,
) -> (T, T) {
    let last = T::from_count(n - 1);
    let w = iv.width();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut i = start;
    while i < n {
        let t = if i + 1 == n {
            iv.hi
        } else {
            iv.lo + w * (T::from_count(i) / last)
        };
        let y = f.value(t);
        lo = lo.min(y);
        hi = hi.max(y);
        i += step;
    }
    (lo, hi)
}

/// One-sided oscillation of `f` over the probed interval.
///
/// Starts from `n_samples` uniform points and refines by nested doubling
/// (`n → 2n−1`) until the relative change drops below [`REFINE_REL_TOL`] or
/// the next level would exceed [`MAX_OSC_SAMPLES`]. Because sample sets are
/// nested, the value never decreases under refinement.
pub fn interval_oscillation<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    eps: T,
    dir: Direction,
    n_samples: usize,
) -> Result<OscillationEstimate<T>> {
    if n_samples < 2 {
        return Err(argument(
            "n_samples",
            format!("{n_samples} samples, at least 2 required"),
        ));
    }
    let iv = probe_interval(f, x, eps, dir)?;
    let mut n = n_samples.min(MAX_OSC_SAMPLES);
    let (mut lo, mut hi) = sample_range(f, iv, n, 0, 1);
    let rel = T::lit(REFINE_REL_TOL);
    loop {
        let next = 2 * n - 1;
        if next > MAX_OSC_SAMPLES {
            return Ok(OscillationEstimate {
                value: hi - lo,
                n_samples: n,
                refined: false,
            });
        }
        let old = hi - lo;
        let (l, h) = sample_range(f, iv, next, 1, 2);
        lo = lo.min(l);
        hi = hi.max(h);
        n = next;
        let new = hi - lo;
        if new - old <= rel * new {
            return Ok(OscillationEstimate {
                value: new,
                n_samples: n,
                refined: true,
            });
        }
    }
}

/// Number of schedule entries treated as the tail: the last `⌈N/2⌉`.
pub fn tail_len(n: usize) -> usize {
    n.div_ceil(2)
}

/// `sup − inf` of the fractional variation over the tail of the resolved schedule.
///
/// `refined` reports whether dropping every other tail entry changes the value
/// by less than [`REFINE_REL_TOL`] relative.
pub fn variation_tail_oscillation<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    dir: Direction,
    schedule: &EpsilonSchedule<T>,
) -> Result<OscillationEstimate<T>> {
    check_order(beta)?;
    let eps = schedule.resolve(f, x, dir)?;
    let values = eps
        .iter()
        .map(|&e| fractional_variation(f, x, e, beta, dir))
        .collect::<Result<Vec<T>>>()?;
    Ok(tail_oscillation(&values))
}

pub(crate) fn tail_oscillation<T: Scalar>(values: &[T]) -> OscillationEstimate<T> {
    let tail = &values[values.len() - tail_len(values.len())..];
    let range = |it: &mut dyn Iterator<Item = T>| {
        let (lo, hi) = it.fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    let full = range(&mut tail.iter().copied());
    let sparse = range(&mut tail.iter().rev().step_by(2).copied());
    OscillationEstimate {
        value: full,
        n_samples: tail.len(),
        refined: full - sparse <= T::lit(REFINE_REL_TOL) * full,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FnFunction;
    use crate::zoo::{make_chirp, make_power_cusp};

    fn square() -> FnFunction<f64> {
        FnFunction::new(Interval::new(-4.0, 4.0).unwrap(), |x| x * x)
    }

    #[test]
    fn difference_examples() {
        assert_eq!(difference(&square(), 1.0, 0.5, Direction::Forward).unwrap(), 1.25);
        assert_eq!(difference(&square(), 1.0, 0.5, Direction::Backward).unwrap(), 0.75);
        let c = FnFunction::new(Interval::new(-1.0, 1.0).unwrap(), |_| 7.0);
        assert_eq!(difference(&c, 0.3, 0.2, Direction::Backward).unwrap(), 0.0);
        let cusp = make_power_cusp(0.0, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(difference(&cusp, 0.0, 0.25, Direction::Forward).unwrap(), 0.5);
    }

    #[test]
    fn difference_errors() {
        assert!(difference(&square(), 1.0, 0.0, Direction::Forward).is_err());
        assert!(difference(&square(), 1.0, -0.1, Direction::Forward).is_err());
        assert!(difference(&square(), 3.9, 0.5, Direction::Forward).is_err());
        assert!(fractional_variation(&square(), 1.0, 0.5, 1.5, Direction::Forward).is_err());
        assert!(fractional_variation(&square(), 1.0, 0.5, 0.0, Direction::Forward).is_err());
    }

    #[test]
    fn variation_examples() {
        let chirp = make_chirp(0.5, 0.0).unwrap();
        for k in 4..30 {
            let e = 2f64.powi(-k);
            let v = fractional_variation(&chirp, 0.0, e, 0.5, Direction::Forward).unwrap();
            assert!((v - (1.0 / e).sin()).abs() < 1e-12);
        }
        let line = FnFunction::new(Interval::new(-1.0, 1.0).unwrap(), |x| x);
        assert_eq!(
            fractional_variation(&line, 0.0, 0.01, 1.0, Direction::Forward).unwrap(),
            1.0
        );
        let cusp = make_power_cusp(0.0, 0.5, 2.0, 0.0).unwrap();
        assert_eq!(
            fractional_variation(&cusp, 0.0, 1e-6, 0.5, Direction::Forward).unwrap(),
            2.0
        );
    }

    #[test]
    fn oscillation_examples() {
        let line = FnFunction::new(Interval::new(-1.0, 2.0).unwrap(), |x| x);
        for n in [2, 5, 100] {
            assert_eq!(
                interval_oscillation(&line, 0.0, 1.0, Direction::Forward, n)
                    .unwrap()
                    .value,
                1.0
            );
        }
        let c = FnFunction::new(Interval::new(-1.0, 2.0).unwrap(), |_| 3.0);
        let est = interval_oscillation(&c, 0.0, 1.0, Direction::Backward, 9).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.refined);
        assert!(interval_oscillation(&line, 0.0, 1.0, Direction::Forward, 1).is_err());
        assert!(interval_oscillation(&line, 1.5, 1.0, Direction::Forward, 9).is_err());
    }

    #[test]
    fn oscillation_of_chirp_variation_is_two() {
        let chirp = make_chirp(0.5f64, 0.0).unwrap();
        let est =
            variation_tail_oscillation(&chirp, 0.0, 0.5, Direction::Forward, &EpsilonSchedule::default()).unwrap();
        assert!((est.value - 2.0).abs() < 0.05, "{}", est.value);
    }

    #[test]
    fn tail_oscillation_vanishes_on_pure_powers() {
        let cusp = make_power_cusp(0.25, 0.3, -2.0, 1.0).unwrap();
        for dir in Direction::BOTH {
            let est = variation_tail_oscillation(&cusp, 0.25, 0.3, dir, &EpsilonSchedule::default()).unwrap();
            assert!(est.value <= 1e-9, "{}", est.value);
        }
    }

    #[test]
    fn chirp_tail_oscillation_shrinks_below_critical_order() {
        let chirp = make_chirp(0.5, 0.0).unwrap();
        let at = |count| {
            let s = EpsilonSchedule::new(0.0625, 0.5, count).unwrap();
            variation_tail_oscillation(&chirp, 0.0, 0.25, Direction::Forward, &s)
                .unwrap()
                .value
        };
        let (a, b, c) = (at(12), at(24), at(39));
        assert!(a > b && b > c, "{a} {b} {c}");
        assert!(c < 0.05);
    }
}
