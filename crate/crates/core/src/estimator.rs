//! Limit estimates built from finite-increment primitives: fractional
//! velocities, existence conditions, Hölder exponents and Taylor residuals.

use serde::Serialize;

use crate::diffops::{
    check_order, fractional_variation, interval_oscillation, probe_interval, tail_len, Direction, DEFAULT_OSC_SAMPLES,
};
use crate::error::{argument, Error, Result};
use crate::function::RealFunction;
use crate::limit::{estimate_limit_windowed, estimate_limit_with_noise, window_len, LimitEstimate, LimitStatus};
use crate::regression::fit_line;
use crate::scalar::Scalar;
use crate::schedule::{EpsilonSchedule, MIN_STEPS};

/// Consecutive tail ratios of `osc/ε^β` at or above this value fail the C1 test.
pub const C1_RATIO_CUTOFF: f64 = 10.0;

/// Hölder fits with a coefficient of determination below this are low confidence.
pub const LOW_CONFIDENCE_R2: f64 = 0.5;

/// Reported Hölder exponents are clamped to `(0, MAX_REPORTED_EXPONENT]`.
pub const MAX_REPORTED_EXPONENT: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityReport<T> {
    pub x: T,
    pub beta: T,
    pub dir: Direction,
    pub limit: LimitEstimate<T>,
    pub c1_constant: T,
    pub c1_holds: bool,
    pub c2_oscillation: T,
    pub c2_holds: bool,
    /// Increments actually used, after flooring and noise truncation.
    pub increments: Vec<T>,
    pub variations: Vec<T>,
}

impl<T: Scalar> VelocityReport<T> {
    pub fn status(&self) -> LimitStatus {
        self.limit.status
    }

    pub fn value(&self) -> Option<T> {
        self.limit.converged_value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck<T> {
    pub c1_holds: bool,
    pub c1_constant: T,
    pub c1_ratio_cutoff: T,
    pub c2_holds: bool,
    pub c2_value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate<T> {
    pub x: T,
    pub dir: Direction,
    pub exponent: T,
    pub constant: T,
    pub r_squared: T,
    pub scale_range: (T, T),
    pub n_scales: usize,
    pub low_confidence: bool,
    /// The unclamped slope exceeded 1.
    pub super_linear: bool,
}

fn check_tol<T: Scalar>(tol: T) -> Result<()> {
    if tol > T::zero() && tol.is_finite() {
        Ok(())
    } else {
        Err(argument("tol", format!("{tol} must be positive and finite")))
    }
}

/// Drops trailing increments whose rounding noise in the variation exceeds a
/// quarter of `tol`, keeping at least [`MIN_STEPS`].
fn truncate_noise<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    dir: Direction,
    eps: &mut Vec<T>,
    tol: T,
) -> Result<()> {
    let fx = f.value(x).abs();
    let limit = tol / T::lit(4.0);
    let mut keep = eps.len();
    while keep > MIN_STEPS {
        let e = eps[keep - 1];
        let iv = probe_interval(f, x, e, dir)?;
        let other = match dir {
            Direction::Forward => f.value(iv.hi),
            Direction::Backward => f.value(iv.lo),
        };
        if noise_bound(fx, other, iv.width(), beta) <= limit {
            break;
        }
        keep -= 1;
    }
    eps.truncate(keep);
    Ok(())
}

struct Prepared<T> {
    eps: Vec<T>,
    values: Vec<T>,
    /// Rounding-noise bound of each variation.
    noise: Vec<T>,
}

fn noise_bound<T: Scalar>(fx: T, other: T, width: T, beta: T) -> T {
    T::lit(4.0) * T::epsilon() * (fx.abs() + other.abs()) / width.powf(beta)
}

fn prepare<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    dir: Direction,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<Prepared<T>> {
    check_order(beta)?;
    check_tol(tol)?;
    let mut eps = schedule.resolve(f, x, dir)?;
    truncate_noise(f, x, beta, dir, &mut eps, tol)?;
    let values = eps
        .iter()
        .map(|&e| fractional_variation(f, x, e, beta, dir))
        .collect::<Result<Vec<T>>>()?;
    let fx = f.value(x);
    let noise = eps
        .iter()
        .map(|&e| {
            let iv = probe_interval(f, x, e, dir)?;
            let other = match dir {
                Direction::Forward => f.value(iv.hi),
                Direction::Backward => f.value(iv.lo),
            };
            Ok(noise_bound(fx, other, iv.width(), beta))
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(Prepared { eps, values, noise })
}

/// `max_k osc_{ε_k}/ε_k^β` and the C1 verdict.
///
/// C1 holds when every normalised oscillation is finite, consecutive tail
/// ratios stay below [`C1_RATIO_CUTOFF`] and the tail does not grow by that
/// factor overall.
fn c1_check<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    dir: Direction,
    eps: &[T],
) -> Result<(T, bool)> {
    let normalised = eps
        .iter()
        .map(|&e| {
            let osc = interval_oscillation(f, x, e, dir, DEFAULT_OSC_SAMPLES)?;
            let iv = probe_interval(f, x, e, dir)?;
            Ok(osc.value / iv.width().powf(beta))
        })
        .collect::<Result<Vec<T>>>()?;
    let constant = normalised.iter().copied().fold(T::zero(), T::max);
    let cutoff = T::lit(C1_RATIO_CUTOFF);
    let tail = &normalised[normalised.len() - tail_len(normalised.len())..];
    let finite = normalised.iter().all(|v| v.is_finite());
    let ratios_ok = tail
        .windows(2)
        .all(|w| (w[0] == T::zero() && w[1] == T::zero()) || w[1] < cutoff * w[0]);
    let tail_max = tail.iter().copied().fold(T::zero(), T::max);
    let growth_ok = tail_max == T::zero() || tail_max < cutoff * tail[0];
    Ok((constant, finite && ratios_ok && growth_ok))
}

/// Extrapolated oscillation of the variation as `ε → 0`.
///
/// The oscillation over consecutive increment pairs is itself treated as a
/// sequence and its limit estimated with tolerance `2·tol`. When no limit is
/// found the raw tail `sup − inf` is returned instead.
fn c2_estimate<T: Scalar>(p: &Prepared<T>, tol: T) -> Result<T> {
    let values = &p.values;
    let osc: Vec<T> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let noise: Vec<T> = p.noise.windows(2).map(|w| w[0] + w[1]).collect();
    let window = window_len(values.len()).saturating_sub(1).max(3);
    if osc.len() >= 4 {
        let lim = estimate_limit_windowed(&osc, &p.eps[1..], Some(&noise), tol + tol, window)?;
        if lim.status == LimitStatus::Converged {
            return Ok(lim.value.abs());
        }
    }
    Ok(crate::diffops::tail_oscillation(values).value)
}

/// Estimates the one-sided fractional velocity of order `beta` at `x`.
pub fn estimate_velocity<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    dir: Direction,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<VelocityReport<T>> {
    let p = prepare(f, x, beta, dir, schedule, tol)?;
    let limit = estimate_limit_with_noise(&p.values, &p.eps, &p.noise, tol)?;
    let (c1_constant, c1_holds) = c1_check(f, x, beta, dir, &p.eps)?;
    let c2 = c2_estimate(&p, tol)?;
    Ok(VelocityReport {
        x,
        beta,
        dir,
        limit,
        c1_constant,
        c1_holds,
        c2_oscillation: c2,
        c2_holds: c2 <= tol,
        increments: p.eps,
        variations: p.values,
    })
}

/// Only the limit of the fractional variation, without condition diagnostics.
pub fn velocity_limit<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    dir: Direction,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<LimitEstimate<T>> {
    let p = prepare(f, x, beta, dir, schedule, tol)?;
    estimate_limit_with_noise(&p.values, &p.eps, &p.noise, tol)
}

/// Evaluates the growth (C1) and vanishing-oscillation (C2) conditions.
pub fn check_conditions<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    dir: Direction,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<ConditionCheck<T>> {
    let p = prepare(f, x, beta, dir, schedule, tol)?;
    let (c1_constant, c1_holds) = c1_check(f, x, beta, dir, &p.eps)?;
    let c2 = c2_estimate(&p, tol)?;
    Ok(ConditionCheck {
        c1_holds,
        c1_constant,
        c1_ratio_cutoff: T::lit(C1_RATIO_CUTOFF),
        c2_holds: c2 <= tol,
        c2_value: c2,
    })
}

/// Fits `log osc_ε ≈ exponent·log ε + log constant` over the schedule.
pub fn estimate_holder_exponent<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    dir: Direction,
    schedule: &EpsilonSchedule<T>,
) -> Result<HolderEstimate<T>> {
    let eps = schedule.resolve(f, x, dir)?;
    let mut xs = Vec::with_capacity(eps.len());
    let mut ys = Vec::with_capacity(eps.len());
    for &e in &eps {
        let osc = interval_oscillation(f, x, e, dir, DEFAULT_OSC_SAMPLES)?;
        if osc.value > T::zero() {
            xs.push(e.ln());
            ys.push(osc.value.ln());
        }
    }
    if xs.is_empty() {
        return Err(Error::LocallyConstant { x: x.to_f64_lossy() });
    }
    if xs.len() < 2 {
        return Err(Error::Precondition(format!(
            "only one non-zero oscillation near x = {x}; exponent undefined"
        )));
    }
    let fit = fit_line(&xs, &ys).ok_or_else(|| Error::Precondition("degenerate scale set".into()))?;
    let max_exp = T::lit(MAX_REPORTED_EXPONENT);
    let exponent = fit.slope.max(T::epsilon()).min(max_exp);
    Ok(HolderEstimate {
        x,
        dir,
        exponent,
        constant: fit.intercept.exp(),
        r_squared: fit.r_squared,
        scale_range: (eps[eps.len() - 1], eps[0]),
        n_scales: xs.len(),
        low_confidence: fit.r_squared < T::lit(LOW_CONFIDENCE_R2),
        super_linear: fit.slope > T::one(),
    })
}

/// Bracketing constants `(min, max)` of `|Δ_ε|/ε^β` over the schedule tail.
///
/// Requires a converged, non-zero velocity at `(x, beta, dir)`.
pub fn variation_bound_constants<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    dir: Direction,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<(T, T)> {
    let p = prepare(f, x, beta, dir, schedule, tol)?;
    let limit = estimate_limit_with_noise(&p.values, &p.eps, &p.noise, tol)?;
    match limit.converged_value() {
        Some(v) if v.abs() > tol => {}
        Some(_) => return Err(Error::NotApplicable(format!("velocity at x = {x} is zero"))),
        None => {
            return Err(Error::NotApplicable(format!(
                "velocity at x = {x} is {:?}",
                limit.status
            )))
        }
    }
    let tail = &p.values[p.values.len() - tail_len(p.values.len())..];
    let lower = tail.iter().fold(T::infinity(), |a, v| a.min(v.abs()));
    let upper = tail.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    Ok((lower, upper))
}

/// `|Δ_ε f(x) − v·ε^β| / ε^β`, the normalised expansion residual.
pub fn taylor_residual<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    x: T,
    beta: T,
    v: T,
    eps: T,
    dir: Direction,
) -> Result<T> {
    Ok((fractional_variation(f, x, eps, beta, dir)? - v).abs())
}
