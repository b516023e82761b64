//! Riemann–Liouville integrals and derivatives, and the local fractional
//! derivative obtained as their limit at a base point.

use serde::{Deserialize, Serialize};

use crate::diffops::Direction;
use crate::error::{argument, Error, Result};
use crate::estimator::velocity_limit;
use crate::function::RealFunction;
use crate::limit::{estimate_limit, LimitEstimate};
use crate::quadrature::{gauss_jacobi, gauss_legendre, graded_product, jacobi_product, GaussRule};
use crate::scalar::Scalar;
use crate::schedule::EpsilonSchedule;
use crate::special::gamma;

/// Node doubling stops once successive estimates agree to this relative level.
pub const QUADRATURE_TARGET: f64 = 1e-11;

/// Relative change at the node cap above which quadrature is reported as failed.
pub const QUADRATURE_FAILURE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureScheme {
    /// Graded mesh, linear interpolation of `f`, exact kernel moments.
    GradedProduct,
    /// Gauss–Jacobi rule with the kernel absorbed into the weight.
    JacobiWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureConfig<T> {
    /// Starting node count; doubled until converged.
    pub n_nodes: usize,
    pub scheme: QuadratureScheme,
    /// Mesh grading; `None` selects `2/min(β, 1−β)`.
    pub grading_exponent: Option<T>,
    pub max_nodes: usize,
}

impl<T: Scalar> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            n_nodes: 32,
            scheme: QuadratureScheme::GradedProduct,
            grading_exponent: None,
            max_nodes: 1 << 16,
        }
    }
}

impl<T: Scalar> QuadratureConfig<T> {
    pub fn new(n_nodes: usize, scheme: QuadratureScheme, grading_exponent: Option<T>) -> Result<Self> {
        if n_nodes < 8 {
            return Err(argument("n_nodes", format!("{n_nodes} nodes, at least 8 required")));
        }
        if let Some(g) = grading_exponent {
            if !(g >= T::one() && g.is_finite()) {
                return Err(argument("grading_exponent", format!("{g} must be at least 1")));
            }
        }
        let max_nodes = match scheme {
            QuadratureScheme::GradedProduct => 1 << 16,
            QuadratureScheme::JacobiWeighted => 512,
        };
        Ok(Self {
            n_nodes,
            scheme,
            grading_exponent,
            max_nodes: max_nodes.max(n_nodes),
        })
    }

    pub fn jacobi() -> Self {
        Self::new(8, QuadratureScheme::JacobiWeighted, None).expect("valid configuration")
    }
}

fn check_open_order<T: Scalar>(name: &'static str, beta: T) -> Result<()> {
    if beta > T::zero() && beta < T::one() {
        Ok(())
    } else {
        Err(argument(name, format!("{beta} outside (0, 1)")))
    }
}

/// `(1/Γ(p)) ∫_a^x f(t)(x−t)^{p−1} dt` for a plain closure, with node doubling.
fn left_integral<T: Scalar>(f: &dyn Fn(T) -> T, a: T, p: T, x: T, q: &QuadratureConfig<T>) -> Result<T> {
    let target = T::lit(QUADRATURE_TARGET);
    let failure = T::lit(QUADRATURE_FAILURE);
    let raw = match q.scheme {
        QuadratureScheme::GradedProduct => {
            let grading = q
                .grading_exponent
                .unwrap_or_else(|| T::lit(2.0) / p.min(T::one() - p))
                .max(T::one());
            let mut n = q.n_nodes.next_multiple_of(2);
            let (mut coarse, _) = graded_product(f, a, x, p, n, grading);
            let mut previous: Option<T> = None;
            loop {
                let fine_n = 2 * n;
                let (fine, mag) = graded_product(f, a, x, p, fine_n, grading);
                let extrapolated = fine + (fine - coarse) / T::lit(3.0);
                let change = previous.map(|v| (extrapolated - v).abs());
                let scale = mag.max(extrapolated.abs());
                if let Some(c) = change {
                    if c <= target * scale {
                        break extrapolated;
                    }
                    if fine_n * 2 > q.max_nodes {
                        if c <= failure * scale {
                            break extrapolated;
                        }
                        return Err(quadrature_error(x, c, scale, fine_n));
                    }
                }
                previous = Some(extrapolated);
                coarse = fine;
                n = fine_n;
            }
        }
        QuadratureScheme::JacobiWeighted => {
            let mut n = q.n_nodes;
            let (mut prev, _) = jacobi_product(f, a, x, p, n)?;
            loop {
                let (cur, mag) = jacobi_product(f, a, x, p, 2 * n)?;
                let c = (cur - prev).abs();
                let scale = mag.max(cur.abs());
                if c <= target * scale {
                    break cur;
                }
                if 4 * n > q.max_nodes {
                    if c <= failure * scale {
                        break cur;
                    }
                    return Err(quadrature_error(x, c, scale, 2 * n));
                }
                prev = cur;
                n *= 2;
            }
        }
    };
    Ok(raw / gamma(p))
}

fn quadrature_error<T: Scalar>(x: T, change: T, scale: T, nodes: usize) -> Error {
    let rel = if scale > T::zero() { change / scale } else { change };
    Error::Quadrature {
        x: x.to_f64_lossy(),
        change: rel.to_f64_lossy(),
        nodes,
    }
}

fn check_span<T: Scalar, F: RealFunction<T> + ?Sized>(f: &F, lo: T, hi: T) -> Result<()> {
    let dom = f.domain();
    for p in [lo, hi] {
        if !dom.contains(p) {
            return Err(dom.domain_error(p));
        }
    }
    if !(lo < hi) {
        return Err(argument("x", format!("integration range [{lo}, {hi}] is empty")));
    }
    Ok(())
}

/// Left integral `I^β_{a+} f(x) = (1/Γ(β)) ∫_a^x f(t)(x−t)^{β−1} dt`.
pub fn rl_integral<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    beta: T,
    x: T,
    q: &QuadratureConfig<T>,
) -> Result<T> {
    check_open_order("beta", beta)?;
    check_span(f, a, x)?;
    left_integral(&|t| f.value(t), a, beta, x, q)
}

/// Right integral `I^β_{b−} f(x) = (1/Γ(β)) ∫_x^b f(t)(t−x)^{β−1} dt`.
pub fn rl_integral_right<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    b: T,
    beta: T,
    x: T,
    q: &QuadratureConfig<T>,
) -> Result<T> {
    check_open_order("beta", beta)?;
    check_span(f, x, b)?;
    left_integral(&|s| f.value(-s), -b, beta, -x, q)
}

/// `d/dx I^{1−β}_{a+} g(x)` by a central difference of step `h`.
fn left_derivative<T: Scalar>(g: &dyn Fn(T) -> T, a: T, beta: T, x: T, h: T, q: &QuadratureConfig<T>) -> Result<T> {
    let p = T::one() - beta;
    let up = left_integral(g, a, p, x + h, q)?;
    let down = left_integral(g, a, p, x - h, q)?;
    Ok((up - down) / (h + h))
}

fn check_step<T: Scalar>(a: T, x: T, h: T) -> Result<()> {
    if !(h > T::zero()) || !(x - a > h + h) {
        return Err(argument(
            "h_diff",
            format!(
                "step {h} must be positive and below (x−a)/2 = {}",
                (x - a) / T::lit(2.0)
            ),
        ));
    }
    Ok(())
}

fn default_step<T: Scalar>(span: T) -> T {
    span * T::lit(1.0 / 1024.0)
}

/// Left derivative `D^β_{a+} f(x) = d/dx I^{1−β}_{a+} f(x)`.
///
/// `h_diff` defaults to `(x−a)/1024`.
pub fn rl_derivative<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    beta: T,
    x: T,
    q: &QuadratureConfig<T>,
    h_diff: Option<T>,
) -> Result<T> {
    check_open_order("beta", beta)?;
    let h = h_diff.unwrap_or_else(|| default_step(x - a));
    check_step(a, x, h)?;
    check_span(f, a, x + h)?;
    left_derivative(&|t| f.value(t), a, beta, x, h, q)
}

/// Right derivative `D^β_{b−} f(x) = −d/dx I^{1−β}_{b−} f(x)`.
pub fn rl_derivative_right<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    b: T,
    beta: T,
    x: T,
    q: &QuadratureConfig<T>,
    h_diff: Option<T>,
) -> Result<T> {
    check_open_order("beta", beta)?;
    let h = h_diff.unwrap_or_else(|| default_step(b - x));
    check_step(-b, -x, h)?;
    check_span(f, x - h, b)?;
    left_derivative(&|s| f.value(-s), -b, beta, -x, h, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LfdOptions<T> {
    /// Offsets `ε_k` of the approach points `a ± ε_k`.
    pub approach: EpsilonSchedule<T>,
    pub quadrature: QuadratureConfig<T>,
    /// Fixed difference step; `None` uses `ε_k/8` at each approach point.
    pub h_diff: Option<T>,
    /// Tolerance of the limit over approach points.
    pub tol: T,
}

impl<T: Scalar> Default for LfdOptions<T> {
    fn default() -> Self {
        Self {
            approach: EpsilonSchedule {
                eps0: T::lit(0.0625),
                ratio: T::lit(0.5),
                count: 24,
            },
            quadrature: QuadratureConfig::default(),
            h_diff: None,
            tol: T::lit(1e-4),
        }
    }
}

/// Base point, shifted integrand and approach offsets in the frame where the
/// limit is taken from the right.
struct Frame<T> {
    base: T,
    offsets: Vec<T>,
}

fn approach_frame<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    beta: T,
    dir: Direction,
    opts: &LfdOptions<T>,
) -> Result<Frame<T>> {
    check_open_order("beta", beta)?;
    let dom = f.domain();
    let room = match dir {
        Direction::Forward => dom.hi - a,
        Direction::Backward => a - dom.lo,
    };
    let mut offsets = opts.approach.resolve(f, a, dir)?;
    let eighth = T::lit(0.125);
    offsets.retain(|&e| e + opts.h_diff.unwrap_or(e * eighth) <= room);
    if offsets.len() < crate::schedule::MIN_STEPS {
        return Err(argument("approach", "too few approach points fit inside the domain"));
    }
    let base = match dir {
        Direction::Forward => a,
        Direction::Backward => -a,
    };
    Ok(Frame { base, offsets })
}

/// `f(t) − f(a)` forward; `f(a) − f(−s)` backward, so that both one-sided
/// derivatives become left derivatives at the mirrored base.
fn shifted<'a, T: Scalar, F: RealFunction<T> + ?Sized>(f: &'a F, a: T, dir: Direction) -> impl Fn(T) -> T + 'a {
    let fa = f.value(a);
    move |t| match dir {
        Direction::Forward => f.value(t) - fa,
        Direction::Backward => fa - f.value(-t),
    }
}

/// Local fractional derivative at `a` as the limit of `D^β(f − f(a))` at the
/// approach points.
pub fn kg_lfd<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    beta: T,
    dir: Direction,
    opts: &LfdOptions<T>,
) -> Result<LimitEstimate<T>> {
    let frame = approach_frame(f, a, beta, dir, opts)?;
    let g = shifted(f, a, dir);
    let values = frame
        .offsets
        .iter()
        .map(|&e| {
            let h = opts.h_diff.unwrap_or(e * T::lit(0.125));
            let x = frame.base + e;
            if !(e > h + h) {
                return Err(argument("h_diff", format!("step {h} too large for offset {e}")));
            }
            left_derivative(&g, frame.base, beta, x, h, &opts.quadrature)
        })
        .collect::<Result<Vec<T>>>()?;
    estimate_limit(&values, &frame.offsets, opts.tol)
}

/// Depth of the dyadic panels towards the base point in [`kg_lfd_substitution`].
const SUBSTITUTION_PANELS: usize = 60;

/// Local fractional derivative computed after the substitution
/// `t = a + h·u`, which turns the integral into
/// `h^{1−β}/Γ(1−β) ∫_0^1 (f(a+hu) − f(a))(1−u)^{−β} du`.
///
/// The `u`-integral uses Gauss–Legendre on dyadic panels towards `u = 0` and a
/// Gauss–Jacobi panel on `[1/2, 1]`; the result is differenced in `h`.
pub fn kg_lfd_substitution<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    beta: T,
    dir: Direction,
    opts: &LfdOptions<T>,
) -> Result<LimitEstimate<T>> {
    let frame = approach_frame(f, a, beta, dir, opts)?;
    let g = shifted(f, a, dir);
    let legendre = gauss_legendre::<T>(16)?;
    let jacobi = gauss_jacobi::<T>(32, -beta, T::zero())?;
    let p = T::one() - beta;
    let norm = gamma(p);
    let big_f = |h: T| substituted_integral(&g, frame.base, beta, h, &legendre, &jacobi) * h.powf(p) / norm;
    let values: Vec<T> = frame
        .offsets
        .iter()
        .map(|&e| {
            let d = opts.h_diff.unwrap_or(e * T::lit(0.125));
            (big_f(e + d) - big_f(e - d)) / (d + d)
        })
        .collect();
    estimate_limit(&values, &frame.offsets, opts.tol)
}

fn substituted_integral<T: Scalar>(
    g: &dyn Fn(T) -> T,
    base: T,
    beta: T,
    h: T,
    legendre: &GaussRule<T>,
    jacobi: &GaussRule<T>,
) -> T {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let integrand = |u: T| g(base + h * u) * (T::one() - u).powf(-beta);
    // [1/2, 1]: u = 3/4 + v/4, weight (1−v)^{−β} absorbed.
    let end = T::lit(4.0).powf(beta - T::one()) * jacobi.apply(|v| g(base + h * (T::lit(0.75) + quarter * v)));
    let mut total = end;
    let mut hi = half;
    for _ in 0..SUBSTITUTION_PANELS {
        let lo = hi * half;
        let (mid, rad) = ((hi + lo) * half, (hi - lo) * half);
        total = total + rad * legendre.apply(|v| integrand(mid + rad * v));
        hi = lo;
    }
    let rad = hi * half;
    total + rad * legendre.apply(|v| integrand(rad + rad * v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfdReport<T> {
    pub a: T,
    pub beta: T,
    pub dir: Direction,
    pub lfd: LimitEstimate<T>,
    pub velocity: LimitEstimate<T>,
    /// `Γ(1+β)·velocity`
    pub velocity_scaled: T,
    pub equivalence_gap: Option<T>,
    pub combined_tolerance: T,
    pub pass: bool,
    /// The same limit computed through the substitution path.
    pub substitution: LimitEstimate<T>,
    pub substitution_gap: Option<T>,
}

/// Compares the local fractional derivative with `Γ(1+β)` times the
/// fractional velocity at `a`.
///
/// Fails with [`Error::NotBetaDifferentiable`] unless the velocity converges.
pub fn check_lfd_equivalence<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    beta: T,
    dir: Direction,
    opts: &LfdOptions<T>,
    velocity_schedule: &EpsilonSchedule<T>,
    velocity_tol: T,
) -> Result<LfdReport<T>> {
    check_open_order("beta", beta)?;
    let velocity = velocity_limit(f, a, beta, dir, velocity_schedule, velocity_tol)?;
    let Some(v) = velocity.converged_value() else {
        return Err(Error::NotBetaDifferentiable {
            x: a.to_f64_lossy(),
            beta: beta.to_f64_lossy(),
            status: format!("{:?}", velocity.status).to_lowercase(),
        });
    };
    let scaled = gamma(T::one() + beta) * v;
    let lfd = kg_lfd(f, a, beta, dir, opts)?;
    let substitution = kg_lfd_substitution(f, a, beta, dir, opts)?;
    let combined = velocity_tol + opts.tol;
    let gap = lfd.converged_value().map(|l| (l - scaled).abs());
    let substitution_gap = match (lfd.converged_value(), substitution.converged_value()) {
        (Some(p), Some(s)) => Some((p - s).abs()),
        _ => None,
    };
    Ok(LfdReport {
        a,
        beta,
        dir,
        pass: gap.is_some_and(|g| g <= combined),
        lfd,
        velocity,
        velocity_scaled: scaled,
        equivalence_gap: gap,
        combined_tolerance: combined,
        substitution,
        substitution_gap,
    })
}
