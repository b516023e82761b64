//! Numerical limit detection for sequences indexed by a shrinking increment.

use serde::Serialize;

use crate::error::{argument, Result};
use crate::regression::fit_line;
use crate::scalar::Scalar;

/// Any tail value above this magnitude classifies the sequence as divergent.
pub const DIVERGENCE_CUTOFF: f64 = 1e12;

/// Minimum fitted envelope decay exponent accepted as convergence to zero.
pub const MIN_ENVELOPE_DECAY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitStatus {
    Converged,
    Diverged,
    Oscillatory,
}

/// How a converged limit was recognised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitRoute {
    /// The raw tail is Cauchy within tolerance.
    Direct,
    /// The Aitken-accelerated tail (single or iterated, over half the
    /// window) is Cauchy within tolerance.
    Accelerated,
    /// A power-law envelope of the tail decays below tolerance.
    Envelope,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate<T> {
    /// Meaningful only when converged.
    pub value: T,
    pub status: LimitStatus,
    pub residual: T,
    pub tolerance: T,
    pub route: Option<LimitRoute>,
    pub tail_values: Vec<T>,
}

impl<T: Scalar> LimitEstimate<T> {
    pub fn is_converged(&self) -> bool {
        self.status == LimitStatus::Converged
    }

    /// The value when converged.
    pub fn converged_value(&self) -> Option<T> {
        self.is_converged().then_some(self.value)
    }
}

/// Tail window length for a sequence of `n` values.
pub fn window_len(n: usize) -> usize {
    (n / 4).max(4).min(n)
}

fn spread<T: Scalar>(v: &[T]) -> T {
    let (lo, hi) = v.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    hi - lo
}

/// Aitken Δ² transform; entries with a vanishing second difference pass through.
pub fn aitken<T: Scalar>(v: &[T]) -> Vec<T> {
    v.windows(3)
        .map(|w| {
            let d1 = w[2] - w[1];
            let d2 = w[2] - w[1] - (w[1] - w[0]);
            let scale = w[0].abs().max(w[1].abs()).max(w[2].abs());
            if d2.abs() <= scale * T::epsilon() * T::lit(64.0) {
                w[2]
            } else {
                w[2] - d1 * d1 / d2
            }
        })
        .collect()
}

/// Fitted decay exponent `p` of `|v| ≲ C·ε^p` from block maxima, with the
/// extrapolated bound `max_j |v_j|·(ε_last/ε_j)^p`.
fn envelope<T: Scalar>(values: &[T], eps: &[T]) -> Option<(T, T)> {
    let block = (values.len() / 4).clamp(1, 4);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (vb, eb) in values.chunks(block).zip(eps.chunks(block)) {
        if vb.len() < block {
            break;
        }
        let m = vb.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        if m > T::zero() {
            let log_eps = eb.iter().map(|e| e.ln()).sum::<T>() / T::from_count(eb.len());
            xs.push(log_eps);
            ys.push(m.ln());
        }
    }
    if xs.len() < 3 {
        return None;
    }
    let fit = fit_line(&xs, &ys)?;
    let p = fit.slope;
    if !(p >= T::lit(MIN_ENVELOPE_DECAY)) {
        return None;
    }
    let last = *eps.last()?;
    let bound = values
        .iter()
        .zip(eps)
        .map(|(v, &e)| v.abs() * (last / e).powf(p))
        .fold(T::zero(), T::max);
    Some((p, bound))
}

/// Classifies the limit of `values[k]` as `eps[k] → 0`.
///
/// Checks, in order: divergence of the tail window, a Cauchy tail, a Cauchy
/// Aitken-accelerated tail, and a decaying power-law envelope over the last
/// half. Equality with `tol` counts as converged.
pub fn estimate_limit<T: Scalar>(values: &[T], eps: &[T], tol: T) -> Result<LimitEstimate<T>> {
    estimate_limit_windowed(values, eps, None, tol, window_len(values.len()))
}

/// As [`estimate_limit`], with a bound on the rounding noise of each value.
///
/// The accelerated route ignores trailing values whose noise, amplified by
/// the Δ² transform, could exceed a quarter of `tol`.
pub fn estimate_limit_with_noise<T: Scalar>(values: &[T], eps: &[T], noise: &[T], tol: T) -> Result<LimitEstimate<T>> {
    estimate_limit_windowed(values, eps, Some(noise), tol, window_len(values.len()))
}

/// Noise amplification of the Δ² transform for the observed contraction of
/// successive differences.
fn aitken_amplification<T: Scalar>(values: &[T]) -> T {
    let d: Vec<T> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let usable = (d.len() * 3 / 4).max(2).min(d.len());
    let mut ratios: Vec<T> = d[..usable]
        .windows(2)
        .filter(|w| w[0] != T::zero())
        .map(|w| (w[1] / w[0]).abs())
        .filter(|r| r.is_finite())
        .collect();
    let cap = T::lit(0.95);
    let r = if ratios.is_empty() {
        cap
    } else {
        ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
        ratios[ratios.len() / 2].min(cap)
    };
    let gap = T::one() - r;
    T::lit(4.0) / (gap * gap)
}

pub(crate) fn estimate_limit_windowed<T: Scalar>(
    values: &[T],
    eps: &[T],
    noise: Option<&[T]>,
    tol: T,
    window: usize,
) -> Result<LimitEstimate<T>> {
    if values.len() != eps.len() || noise.is_some_and(|z| z.len() != values.len()) {
        return Err(argument("eps", "length differs from the value sequence"));
    }
    if values.len() < 4 {
        return Err(argument(
            "values",
            format!("{} values, at least 4 required", values.len()),
        ));
    }
    if !(tol > T::zero()) {
        return Err(argument("tol", format!("{tol} must be positive")));
    }
    let n = values.len();
    let m = window.clamp(2, n);
    let tail = &values[n - m..];
    let build = |value, status, residual, route| LimitEstimate {
        value,
        status,
        residual,
        tolerance: tol,
        route,
        tail_values: tail.to_vec(),
    };

    let cutoff = T::lit(DIVERGENCE_CUTOFF);
    if tail.iter().any(|v| !(v.abs() <= cutoff)) {
        let peak = tail.iter().fold(
            T::zero(),
            |a, v| if v.is_nan() { T::infinity() } else { a.max(v.abs()) },
        );
        return Ok(build(T::nan(), LimitStatus::Diverged, peak, None));
    }

    let direct = spread(tail);
    if direct <= tol {
        return Ok(build(
            tail[m - 1],
            LimitStatus::Converged,
            direct,
            Some(LimitRoute::Direct),
        ));
    }

    // Single, then iterated Δ² transform; each pass only sees values whose
    // amplified noise stays below a quarter of the tolerance.
    let limit = tol / T::lit(4.0);
    let ma = (m / 2).max(4).min(m);
    let mut amp = T::one();
    let mut source: Vec<T> = values.to_vec();
    for pass in 1..=2 {
        amp = amp * aitken_amplification(&source);
        let usable = match noise {
            None => n,
            Some(z) => z.iter().take_while(|&&e| e * amp <= limit).count(),
        };
        if usable < ma + 2 * pass {
            break;
        }
        let mut acc = values[..usable].to_vec();
        for _ in 0..pass {
            acc = aitken(&acc);
        }
        let acc_tail = &acc[acc.len() - ma..];
        if acc_tail.iter().all(|v| v.is_finite()) {
            let s = spread(acc_tail);
            if s <= tol {
                return Ok(build(
                    acc_tail[ma - 1],
                    LimitStatus::Converged,
                    s,
                    Some(LimitRoute::Accelerated),
                ));
            }
        }
        source = aitken(&values[..usable]);
        if source.len() < 4 {
            break;
        }
    }

    let half = n.div_ceil(2);
    if let Some((_, bound)) = envelope(&values[n - half..], &eps[n - half..]) {
        if bound <= tol {
            return Ok(build(
                T::zero(),
                LimitStatus::Converged,
                bound,
                Some(LimitRoute::Envelope),
            ));
        }
    }

    Ok(build(T::nan(), LimitStatus::Oscillatory, direct, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic(n: usize) -> Vec<f64> {
        (0..n).map(|k| 2f64.powi(-(k as i32) - 4)).collect()
    }

    #[test]
    fn constant_sequence_converges_directly() {
        let eps = dyadic(20);
        let est = estimate_limit(&[3.0; 20], &eps, 1e-9).unwrap();
        assert_eq!(est.status, LimitStatus::Converged);
        assert_eq!(est.route, Some(LimitRoute::Direct));
        assert_eq!(est.value, 3.0);
        assert_eq!(est.tail_values.len(), 5);
    }

    #[test]
    fn tie_at_tolerance_is_converged() {
        let eps = dyadic(8);
        let v = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.5];
        let est = estimate_limit(&v, &eps, 0.5).unwrap();
        assert_eq!(est.status, LimitStatus::Converged);
        assert_eq!(est.residual, 0.5);
    }

    #[test]
    fn geometric_sequence_is_accelerated() {
        let eps = dyadic(30);
        let v: Vec<f64> = eps.iter().map(|e| 2.0 + 5.0 * e.sqrt()).collect();
        let est = estimate_limit(&v, &eps, 1e-9).unwrap();
        assert_eq!(est.status, LimitStatus::Converged);
        assert_eq!(est.route, Some(LimitRoute::Accelerated));
        assert!((est.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn modulated_power_decay_uses_the_envelope() {
        let eps = dyadic(39);
        let v: Vec<f64> = eps.iter().map(|e| e.powf(0.25) * (1.0 / e).sin()).collect();
        let est = estimate_limit(&v, &eps, 1e-3).unwrap();
        assert_eq!(est.status, LimitStatus::Converged);
        assert_eq!(est.route, Some(LimitRoute::Envelope));
        assert_eq!(est.value, 0.0);
        assert!(est.residual <= 1e-3);
    }

    #[test]
    fn bounded_oscillation_is_oscillatory() {
        let eps = dyadic(39);
        let v: Vec<f64> = eps.iter().map(|e| (1.0 / e).sin()).collect();
        let est = estimate_limit(&v, &eps, 1e-3).unwrap();
        assert_eq!(est.status, LimitStatus::Oscillatory);
        assert!(est.residual > 1e-3);
    }

    #[test]
    fn blow_up_diverges() {
        let eps = dyadic(40);
        let v: Vec<f64> = eps.iter().map(|e| 1.0 / e).collect();
        assert_eq!(estimate_limit(&v, &eps, 1e-3).unwrap().status, LimitStatus::Diverged);
    }

    #[test]
    fn short_sequences_are_rejected() {
        assert!(estimate_limit(&[1.0, 1.0, 1.0], &[0.1, 0.05, 0.025], 1e-3).is_err());
    }
}
