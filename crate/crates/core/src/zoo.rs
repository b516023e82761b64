//! Analytic test functions with known point-wise regularity.
//!
//! Every member carries ground-truth metadata at marked points: the Hölder
//! exponent and the one-sided fractional velocities at that exponent. The
//! metadata is stored, never recomputed, so estimators can be checked against
//! it.

use std::fmt;
use std::sync::Arc;

use serde::ser::{Serialize, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::error::{argument, Result};
use crate::function::{EvalFn, Interval, RealFunction};
use crate::scalar::Scalar;

/// Point-wise regularity of a function at a marked point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularity<T> {
    /// Hölder exponent in (0, 1].
    Holder(T),
    /// Continuously differentiable at the point.
    Smooth,
}

impl<T: Scalar> Regularity<T> {
    /// Order at which the velocity metadata is recorded: the exponent, or 1
    /// for smooth points.
    pub fn critical_order(&self) -> T {
        match *self {
            Regularity::Holder(b) => b,
            Regularity::Smooth => T::one(),
        }
    }
}

impl<T: Serialize> Serialize for Regularity<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Regularity::Holder(b) => b.serialize(s),
            Regularity::Smooth => s.serialize_str("smooth"),
        }
    }
}

/// Ground-truth fractional velocity at the critical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KnownVelocity<T> {
    Value(T),
    Undefined,
}

impl<T: Copy> KnownVelocity<T> {
    pub fn value(&self) -> Option<T> {
        match *self {
            KnownVelocity::Value(v) => Some(v),
            KnownVelocity::Undefined => None,
        }
    }
}

impl<T: Serialize> Serialize for KnownVelocity<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KnownVelocity::Value(v) => v.serialize(s),
            KnownVelocity::Undefined => s.serialize_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, DeriveSerialize)]
pub struct MarkedPoint<T> {
    pub x: T,
    pub holder_exponent: Regularity<T>,
    pub velocity_plus: KnownVelocity<T>,
    pub velocity_minus: KnownVelocity<T>,
}

impl<T: Scalar> MarkedPoint<T> {
    pub fn critical_order(&self) -> T {
        self.holder_exponent.critical_order()
    }

    fn smooth(x: T, derivative: T) -> Self {
        Self {
            x,
            holder_exponent: Regularity::Smooth,
            velocity_plus: KnownVelocity::Value(derivative),
            velocity_minus: KnownVelocity::Value(derivative),
        }
    }
}

/// Evaluable function with ground-truth regularity metadata.
#[derive(Clone, DeriveSerialize)]
pub struct AnalyticTestFunction<T: Scalar> {
    pub id: String,
    pub domain: Interval<T>,
    pub marks: Vec<MarkedPoint<T>>,
    /// Default limit-detection tolerance for this member.
    pub default_tol: T,
    #[serde(skip)]
    eval: EvalFn<T>,
    #[serde(skip)]
    resolution: Option<T>,
}

impl<T: Scalar> fmt::Debug for AnalyticTestFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticTestFunction")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("marks", &self.marks)
            .finish()
    }
}

impl<T: Scalar> RealFunction<T> for AnalyticTestFunction<T> {
    fn domain(&self) -> Interval<T> {
        self.domain
    }

    fn value(&self, x: T) -> T {
        (self.eval)(x)
    }

    fn resolution(&self) -> Option<T> {
        self.resolution
    }
}

impl<T: Scalar> AnalyticTestFunction<T> {
    fn new(
        id: String,
        domain: Interval<T>,
        marks: Vec<MarkedPoint<T>>,
        default_tol: T,
        eval: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        debug_assert!(marks.iter().all(|m| domain.contains(m.x)));
        Self {
            id,
            domain,
            marks,
            default_tol,
            eval: Arc::new(eval),
            resolution: None,
        }
    }

    /// Restricts or extends the domain; marks outside the new domain are dropped.
    pub fn with_domain(mut self, domain: Interval<T>) -> Self {
        self.marks.retain(|m| domain.contains(m.x));
        self.domain = domain;
        self
    }
}

/// Tolerance for closed-form members.
pub fn smooth_tolerance<T: Scalar>() -> T {
    T::lit(1e-6)
}

/// Tolerance for series-defined and strongly oscillating members.
pub fn series_tolerance<T: Scalar>() -> T {
    T::lit(1e-3)
}

/// `sign(d)·|d|^beta`
#[inline]
fn signed_power<T: Scalar>(d: T, beta: T) -> T {
    if d >= T::zero() {
        d.powf(beta)
    } else {
        -(-d).powf(beta)
    }
}

fn check_open_unit(name: &'static str, beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(argument(name, format!("{beta} outside (0, 1)")))
    }
}

/// `f(x) = c0 + K·sign(x−a)·|x−a|^beta` on `[a−2, a+2]`.
pub fn make_power_cusp<T: Scalar>(a: T, beta: T, k: T, c0: T) -> Result<AnalyticTestFunction<T>> {
    check_open_unit("beta", beta.to_f64_lossy())?;
    let domain = Interval::new(a - T::lit(2.0), a + T::lit(2.0))?;
    let one = T::one();
    let smooth_slope = k * beta; // |x−a| = 1
    let marks = vec![
        MarkedPoint {
            x: a,
            holder_exponent: Regularity::Holder(beta),
            velocity_plus: KnownVelocity::Value(k),
            velocity_minus: KnownVelocity::Value(k),
        },
        MarkedPoint::smooth(a - one, smooth_slope),
        MarkedPoint::smooth(a + one, smooth_slope),
    ];
    let id = format!("cusp(a={a},beta={beta},K={k},c0={c0})");
    Ok(AnalyticTestFunction::new(
        id,
        domain,
        marks,
        smooth_tolerance(),
        move |x| c0 + k * signed_power(x - a, beta),
    ))
}

/// `f(x) = c0 + K·|x−a|^beta` on `[a−2, a+2]`; a hump for negative `K`.
///
/// The forward velocity at `a` is `K`, the backward one `−K`.
pub fn make_abs_cusp<T: Scalar>(a: T, beta: T, k: T, c0: T) -> Result<AnalyticTestFunction<T>> {
    check_open_unit("beta", beta.to_f64_lossy())?;
    let domain = Interval::new(a - T::lit(2.0), a + T::lit(2.0))?;
    let one = T::one();
    let slope = k * beta;
    let marks = vec![
        MarkedPoint {
            x: a,
            holder_exponent: Regularity::Holder(beta),
            velocity_plus: KnownVelocity::Value(k),
            velocity_minus: KnownVelocity::Value(-k),
        },
        MarkedPoint::smooth(a - one, -slope),
        MarkedPoint::smooth(a + one, slope),
    ];
    let id = format!("abscusp(a={a},beta={beta},K={k},c0={c0})");
    Ok(AnalyticTestFunction::new(
        id,
        domain,
        marks,
        smooth_tolerance(),
        move |x| c0 + k * (x - a).abs().powf(beta),
    ))
}

/// Sum of equal-order cusps `Σ K·sign(x−a_i)·|x−a_i|^beta`.
pub fn make_cusp_sum<T: Scalar>(locations: &[T], beta: T, k: T) -> Result<AnalyticTestFunction<T>> {
    check_open_unit("beta", beta.to_f64_lossy())?;
    if locations.is_empty() {
        return Err(argument("locations", "at least one cusp location required"));
    }
    if locations.windows(2).any(|w| w[1] <= w[0]) || locations.iter().any(|v| !v.is_finite()) {
        return Err(argument("locations", "must be finite and strictly increasing"));
    }
    let first = locations[0];
    let last = locations[locations.len() - 1];
    let domain = Interval::new(first - T::lit(2.0), last + T::lit(2.0))?;
    let marks = locations
        .iter()
        .map(|&a| MarkedPoint {
            x: a,
            holder_exponent: Regularity::Holder(beta),
            velocity_plus: KnownVelocity::Value(k),
            velocity_minus: KnownVelocity::Value(k),
        })
        .collect();
    let locs: Vec<T> = locations.to_vec();
    let id = format!(
        "cusps(at={},beta={beta},K={k})",
        locs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
    );
    Ok(AnalyticTestFunction::new(
        id,
        domain,
        marks,
        smooth_tolerance(),
        move |x| {
            locs.iter()
                .fold(T::zero(), |acc, &a| acc + k * signed_power(x - a, beta))
        },
    ))
}

/// `f(x) = (x−a)^gamma·sin(1/(x−a))` for `x > a`, `0` otherwise, on `[a−1, a+1]`.
pub fn make_chirp<T: Scalar>(gamma: T, a: T) -> Result<AnalyticTestFunction<T>> {
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(argument("gamma", format!("{gamma} must be positive")));
    }
    let domain = Interval::new(a - T::one(), a + T::one())?;
    let (exponent, plus) = if gamma < T::one() {
        (Regularity::Holder(gamma), KnownVelocity::Undefined)
    } else if gamma == T::one() {
        (Regularity::Holder(T::one()), KnownVelocity::Undefined)
    } else {
        (Regularity::Holder(T::one()), KnownVelocity::Value(T::zero()))
    };
    let marks = vec![MarkedPoint {
        x: a,
        holder_exponent: exponent,
        velocity_plus: plus,
        velocity_minus: KnownVelocity::Value(T::zero()),
    }];
    let id = format!("chirp(gamma={gamma},a={a})");
    Ok(AnalyticTestFunction::new(
        id,
        domain,
        marks,
        series_tolerance(),
        move |x| {
            let d = x - a;
            if d > T::zero() {
                d.powf(gamma) * d.recip().sin()
            } else {
                T::zero()
            }
        },
    ))
}

/// Weierstrass partial sum `Σ_{n<n_terms} amp^n·cos(freq^n·π·x)` on `[−2, 2]`.
///
/// The Hölder exponent `ln(1/amp)/ln(freq)` holds everywhere; marks are placed
/// at a few sample points. The function resolution is the wavelength of the
/// highest retained harmonic.
pub fn make_weierstrass<T: Scalar>(amp: T, freq: u32, n_terms: usize) -> Result<AnalyticTestFunction<T>> {
    if !(amp > T::zero() && amp < T::one()) {
        return Err(argument("amp", format!("{amp} outside (0, 1)")));
    }
    if freq < 2 {
        return Err(argument("freq", format!("{freq} must be at least 2")));
    }
    let b = T::from_u32(freq).expect("frequency representable");
    if amp * b < T::one() {
        return Err(argument(
            "amp",
            format!("amp·freq = {} < 1 gives a continuously differentiable sum", amp * b),
        ));
    }
    if n_terms < 8 {
        return Err(argument("n_terms", format!("{n_terms} terms, at least 8 required")));
    }
    let exponent = amp.recip().ln() / b.ln();
    let mut terms = Vec::with_capacity(n_terms);
    let (mut a_n, mut b_n) = (T::one(), T::one());
    for _ in 0..n_terms {
        terms.push((a_n, b_n * T::PI()));
        a_n = a_n * amp;
        b_n = b_n * b;
    }
    let highest = terms[n_terms - 1].1 / T::PI();
    let domain = Interval::new(T::lit(-2.0), T::lit(2.0))?;
    let marks = [0.2, 0.5, 0.7]
        .iter()
        .map(|&x| MarkedPoint {
            x: T::lit(x),
            holder_exponent: Regularity::Holder(exponent),
            velocity_plus: KnownVelocity::Undefined,
            velocity_minus: KnownVelocity::Undefined,
        })
        .collect();
    let id = format!("weierstrass(amp={amp},freq={freq},n={n_terms})");
    let mut f = AnalyticTestFunction::new(id, domain, marks, series_tolerance(), move |x| {
        terms.iter().map(|&(c, w)| c * (w * x).cos()).sum()
    });
    f.resolution = Some(T::lit(2.0) / highest);
    Ok(f)
}

/// Polynomial `Σ coeffs[i]·x^i` on the given domain.
pub fn make_polynomial<T: Scalar>(coeffs: &[T], domain: Interval<T>) -> Result<AnalyticTestFunction<T>> {
    if coeffs.is_empty() {
        return Err(argument("coeffs", "at least one coefficient required"));
    }
    let c: Vec<T> = coeffs.to_vec();
    let derivative: Vec<T> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &v)| v * T::from_count(i))
        .collect();
    let marks = [0.25, 0.5, 0.75]
        .iter()
        .map(|&s| {
            let x = domain.lo + domain.width() * T::lit(s);
            MarkedPoint::smooth(x, horner(&derivative, x))
        })
        .collect();
    let id = format!(
        "poly(coeffs={})",
        c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
    );
    Ok(AnalyticTestFunction::new(
        id,
        domain,
        marks,
        smooth_tolerance(),
        move |x| horner(&c, x),
    ))
}

fn horner<T: Scalar>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
}

/// The reference collection used by property suites and `zoo list`.
pub fn catalog<T: Scalar>() -> Vec<AnalyticTestFunction<T>> {
    let l = T::lit;
    let wide = Interval {
        lo: l(-1.0),
        hi: l(2.0),
    };
    vec![
        make_power_cusp(l(0.0), l(0.5), l(1.0), l(0.0)),
        make_power_cusp(l(0.25), l(0.3), l(-2.0), l(1.0)),
        make_power_cusp(l(0.0), l(0.7), l(3.0), l(0.0)),
        make_abs_cusp(l(0.5), l(0.5), l(-1.0), l(0.0)),
        make_cusp_sum(&[l(0.25), l(0.5), l(0.75)], l(0.5), l(1.0)),
        make_chirp(l(0.5), l(0.0)),
        make_weierstrass(l(0.5), 3, 24),
        make_polynomial(&[l(2.0)], wide),
        make_polynomial(&[l(0.0), l(1.0)], wide),
        make_polynomial(&[l(0.0), l(0.0), l(1.0)], wide),
        make_polynomial(&[l(1.0), l(-2.0), l(0.5), l(1.0)], wide),
    ]
    .into_iter()
    .map(|f| f.expect("catalog parameters are valid"))
    .collect()
}
