//! Gaussian rules and product integration against weakly singular kernels.

use crate::error::{argument, Error, Result};
use crate::scalar::Scalar;
use crate::special::ln_gamma;

/// Nodes and weights of a rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussRule<T> {
    /// `Σ w_i g(x_i)`
    pub fn apply(&self, mut g: impl FnMut(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix and the first component of
/// each normalised eigenvector (implicit QL with Wilkinson shifts).
fn tridiagonal_eigen<T: Scalar>(diag: &[T], off: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.resize(n, T::zero());
    let mut z = vec![T::zero(); n];
    z[0] = T::one();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::Precondition("tridiagonal eigenproblem did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok((d, z))
}

/// Gauss–Jacobi rule for the weight `(1−x)^alpha·(1+x)^beta` on `[-1, 1]`.
pub fn gauss_jacobi<T: Scalar>(n: usize, alpha: T, beta: T) -> Result<GaussRule<T>> {
    if n == 0 {
        return Err(argument("n_nodes", "at least one node required"));
    }
    if !(alpha > -T::one() && beta > -T::one()) {
        return Err(argument(
            "alpha",
            format!("Jacobi exponents ({alpha}, {beta}) must exceed −1"),
        ));
    }
    let (a, b) = (alpha, beta);
    let ab = a + b;
    let two = T::lit(2.0);
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    diag.push((b - a) / (ab + two));
    for k in 1..n {
        let kf = T::from_count(k);
        let s = two * kf + ab;
        diag.push((b * b - a * a) / (s * (s + two)));
        let num = T::lit(4.0) * kf * (kf + a) * (kf + b) * (kf + ab);
        off.push((num / (s * s * (s + T::one()) * (s - T::one()))).sqrt());
    }
    let ln_mu0 = (ab + T::one()) * two.ln() + ln_gamma(a + T::one()) + ln_gamma(b + T::one()) - ln_gamma(ab + two);
    let mu0 = ln_mu0.exp();
    let (nodes, first) = tridiagonal_eigen(&diag, &off)?;
    let mut pairs: Vec<(T, T)> = nodes.into_iter().zip(first.into_iter().map(|v| mu0 * v * v)).collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite nodes"));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Scalar>(n: usize) -> Result<GaussRule<T>> {
    gauss_jacobi(n, T::zero(), T::zero())
}

/// `∫_{s0}^{s0+w} s^{p−1} ds` and `∫ (s−s0)·s^{p−1} ds` over the same range.
fn kernel_moments<T: Scalar>(s0: T, w: T, p: T) -> (T, T) {
    let s1 = s0 + w;
    if s0 == T::zero() {
        let m0 = s1.powf(p) / p;
        return (m0, s1.powf(p + T::one()) / (p + T::one()));
    }
    let log_ratio = (-w / s1).ln_1p();
    let m0 = -s1.powf(p) * (p * log_ratio).exp_m1() / p;
    let m1 = -s1.powf(p + T::one()) * ((p + T::one()) * log_ratio).exp_m1() / (p + T::one());
    (m0, m1 - s0 * m0)
}

/// A two-sided graded partition of `[a, x]` with `n` (even) cells.
///
/// Each node carries its distance from `a` and from `x`, both computed
/// without cancellation.
struct GradedMesh<T> {
    /// Node abscissae, ascending.
    t: Vec<T>,
    /// Distance to `x` for each node.
    s: Vec<T>,
    /// Cell widths.
    w: Vec<T>,
}

impl<T: Scalar> GradedMesh<T> {
    fn new(a: T, x: T, n: usize, grading: T) -> Self {
        let len = x - a;
        let half = T::lit(0.5);
        let nf = T::from_count(n);
        let mid = n / 2;
        let mut t = Vec::with_capacity(n + 1);
        let mut s = Vec::with_capacity(n + 1);
        let mut from_a = Vec::with_capacity(n + 1);
        for j in 0..=n {
            if j <= mid {
                let tau = len * half * (T::lit(2.0) * T::from_count(j) / nf).powf(grading);
                t.push(a + tau);
                s.push(len - tau);
                from_a.push(tau);
            } else {
                let sig = len * half * (T::lit(2.0) * T::from_count(n - j) / nf).powf(grading);
                t.push(x - sig);
                s.push(sig);
                from_a.push(len - sig);
            }
        }
        let w = (0..n)
            .map(|j| {
                if j < mid {
                    from_a[j + 1] - from_a[j]
                } else {
                    s[j] - s[j + 1]
                }
            })
            .collect();
        Self { t, s, w }
    }
}

/// `∫_a^x f(t)·(x−t)^{p−1} dt` on a graded mesh with `f` interpolated
/// linearly and the kernel integrated exactly. Returns the value and the
/// same integral of `|f|`.
pub(crate) fn graded_product<T: Scalar>(f: &dyn Fn(T) -> T, a: T, x: T, p: T, n: usize, grading: T) -> (T, T) {
    let mesh = GradedMesh::new(a, x, n, grading);
    let fv: Vec<T> = mesh.t.iter().map(|&t| f(t)).collect();
    let mut total = T::zero();
    let mut magnitude = T::zero();
    for j in 0..n {
        // Node j+1 is the one closer to x.
        let (f0, f1) = (fv[j + 1], fv[j]);
        let (m0, d) = kernel_moments(mesh.s[j + 1], mesh.w[j], p);
        let slope = if mesh.w[j] > T::zero() {
            (f1 - f0) / mesh.w[j]
        } else {
            T::zero()
        };
        total = total + f0 * m0 + slope * d;
        magnitude = magnitude + f0.abs().max(f1.abs()) * m0;
    }
    (total, magnitude)
}

/// `∫_a^x f(t)·(x−t)^{p−1} dt` by an `n`-point Gauss–Jacobi rule.
pub(crate) fn jacobi_product<T: Scalar>(f: &dyn Fn(T) -> T, a: T, x: T, p: T, n: usize) -> Result<(T, T)> {
    let rule = gauss_jacobi(n, p - T::one(), T::zero())?;
    let half = (x - a) / T::lit(2.0);
    let scale = half.powf(p);
    let mut total = T::zero();
    let mut magnitude = T::zero();
    for (&v, &w) in rule.nodes.iter().zip(&rule.weights) {
        let y = f(a + half * (T::one() + v));
        total = total + w * y;
        magnitude = magnitude + w * y.abs();
    }
    Ok((scale * total, scale * magnitude))
}
