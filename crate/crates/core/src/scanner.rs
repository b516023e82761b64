//! Interval-level analysis: the set of change on a grid, its measure under
//! refinement, and checks of the interval theorems.

use rayon::prelude::*;
use serde::Serialize;

use crate::diffops::{check_order, Direction};
use crate::error::{argument, Error, Result};
use crate::estimator::velocity_limit;
use crate::function::{Interval, RealFunction};
use crate::limit::{LimitEstimate, LimitStatus};
use crate::scalar::Scalar;
use crate::schedule::EpsilonSchedule;

/// Stated in every report: isolation is checked as grid adjacency only.
pub const ISOLATION_SURROGATE: &str = "isolation checked as absence of grid-adjacent flagged points";

/// Default flag threshold as a multiple of the velocity tolerance.
pub const FLAG_THRESHOLD_FACTOR: f64 = 10.0;

/// Default flag threshold for a tolerance.
pub fn default_flag_threshold<T: Scalar>(tol: T) -> T {
    tol * T::lit(FLAG_THRESHOLD_FACTOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointVelocity<T> {
    pub dir: Direction,
    pub status: LimitStatus,
    pub value: T,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEvaluation<T> {
    pub x: T,
    pub velocities: Vec<PointVelocity<T>>,
}

impl<T: Scalar> GridEvaluation<T> {
    pub fn flagged(&self) -> bool {
        self.velocities.iter().any(|v| v.flagged)
    }

    pub fn get(&self, dir: Direction) -> Option<&PointVelocity<T>> {
        self.velocities.iter().find(|v| v.dir == dir)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlaggedPoint<T> {
    pub x: T,
    pub velocity: T,
    pub dir: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChangeSetReport<T> {
    pub interval: Interval<T>,
    pub beta: T,
    pub grid_points: usize,
    pub flag_threshold: T,
    pub flagged: Vec<FlaggedPoint<T>>,
    /// Distinct flagged abscissae over the grid size.
    pub flagged_fraction: T,
    pub isolated: bool,
    pub isolation_note: &'static str,
    pub evaluations: Vec<GridEvaluation<T>>,
}

impl<T: Scalar> ChangeSetReport<T> {
    /// Indices of grid points with at least one flagged direction.
    pub fn flagged_indices(&self) -> Vec<usize> {
        self.evaluations
            .iter()
            .enumerate()
            .filter(|(_, e)| e.flagged())
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendPoint<T> {
    pub n: usize,
    pub flagged_count: usize,
    pub flagged_fraction: T,
    pub isolated: bool,
}

/// Uniform grid `lo + (hi−lo)·i/(n−1)` with exact endpoints.
pub fn uniform_grid<T: Scalar>(iv: Interval<T>, n: usize) -> Vec<T> {
    let last = T::from_count(n - 1);
    (0..n)
        .map(|i| {
            if i + 1 == n {
                iv.hi
            } else {
                iv.lo + iv.width() * (T::from_count(i) / last)
            }
        })
        .collect()
}

fn check_interval<T: Scalar, F: RealFunction<T> + ?Sized>(f: &F, iv: Interval<T>) -> Result<()> {
    let dom = f.domain();
    if !(iv.lo < iv.hi) {
        return Err(argument("interval", format!("[{}, {}] is empty", iv.lo, iv.hi)));
    }
    for p in [iv.lo, iv.hi] {
        if !dom.contains(p) {
            return Err(dom.domain_error(p));
        }
    }
    Ok(())
}

/// Per-direction limits at one grid point.
type PointLimits<T> = Vec<(Direction, LimitEstimate<T>)>;

/// Velocities at every grid point: forward except at the right end, backward
/// except at the left end.
fn grid_velocities<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    grid: &[T],
    beta: T,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<Vec<PointLimits<T>>> {
    let n = grid.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = grid[i];
            let mut out = Vec::with_capacity(2);
            for dir in Direction::BOTH {
                let one_sided_end = match dir {
                    Direction::Forward => i + 1 == n,
                    Direction::Backward => i == 0,
                };
                if !one_sided_end {
                    out.push((dir, velocity_limit(f, x, beta, dir, schedule, tol)?));
                }
            }
            Ok(out)
        })
        .collect()
}

/// Flags grid points whose converged velocity exceeds `flag_threshold` in magnitude.
pub fn scan_change_set<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    interval: Interval<T>,
    beta: T,
    n: usize,
    flag_threshold: T,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<ChangeSetReport<T>> {
    check_order(beta)?;
    check_interval(f, interval)?;
    if n < 3 {
        return Err(argument("grid", format!("{n} points, at least 3 required")));
    }
    if !(flag_threshold >= T::zero()) {
        return Err(argument(
            "flag_threshold",
            format!("{flag_threshold} must be non-negative"),
        ));
    }
    let grid = uniform_grid(interval, n);
    let raw = grid_velocities(f, &grid, beta, schedule, tol)?;
    let mut flagged = Vec::new();
    let evaluations: Vec<GridEvaluation<T>> = grid
        .iter()
        .zip(raw)
        .map(|(&x, vels)| GridEvaluation {
            x,
            velocities: vels
                .into_iter()
                .map(|(dir, lim)| {
                    let hit = lim.is_converged() && lim.value.abs() > flag_threshold;
                    if hit {
                        flagged.push(FlaggedPoint {
                            x,
                            velocity: lim.value,
                            dir,
                        });
                    }
                    PointVelocity {
                        dir,
                        status: lim.status,
                        value: lim.value,
                        flagged: hit,
                    }
                })
                .collect(),
        })
        .collect();
    let marked: Vec<bool> = evaluations.iter().map(GridEvaluation::flagged).collect();
    let count = marked.iter().filter(|&&b| b).count();
    let isolated = !marked.windows(2).any(|w| w[0] && w[1]);
    Ok(ChangeSetReport {
        interval,
        beta,
        grid_points: n,
        flag_threshold,
        flagged,
        flagged_fraction: T::from_count(count) / T::from_count(n),
        isolated,
        isolation_note: ISOLATION_SURROGATE,
        evaluations,
    })
}

/// Flagged fractions over a strictly increasing list of grid sizes.
pub fn null_measure_trend<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    interval: Interval<T>,
    beta: T,
    refinements: &[usize],
    flag_threshold: T,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<Vec<TrendPoint<T>>> {
    if refinements.is_empty() || refinements.windows(2).any(|w| w[1] <= w[0]) {
        return Err(argument("refinements", "must be non-empty and strictly increasing"));
    }
    refinements
        .iter()
        .map(|&n| {
            let r = scan_change_set(f, interval, beta, n, flag_threshold, schedule, tol)?;
            Ok(TrendPoint {
                n,
                flagged_count: r.flagged_indices().len(),
                flagged_fraction: r.flagged_fraction,
                isolated: r.isolated,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Rolle,
    WeakDarboux,
    WeakMeanValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness<T> {
    pub c: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forward_velocity: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backward_velocity: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<Endpoint>,
}

impl<T> Witness<T> {
    fn at(c: T) -> Self {
        Self {
            c,
            forward_velocity: None,
            backward_velocity: None,
            target: None,
            endpoint: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalVerdict<T> {
    pub theorem: Theorem,
    pub holds: bool,
    pub witness: Option<Witness<T>>,
    pub notes: String,
}

fn bounds<T: Scalar, F: RealFunction<T> + ?Sized>(f: &F, a: T, b: T) -> Result<Interval<T>> {
    let iv = Interval::new(a, b)?;
    check_interval(f, iv)?;
    Ok(iv)
}

fn list_points<T: Scalar>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// Looks for `c` with `Δ+ ≤ 0 ≤ Δ−` (or the mirrored signs) among interior
/// grid points. Points in the set of change are preferred as witnesses.
pub fn verify_rolle<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    b: T,
    beta: T,
    n: usize,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<IntervalVerdict<T>> {
    check_order(beta)?;
    let iv = bounds(f, a, b)?;
    if n < 3 {
        return Err(argument("grid", format!("{n} points, at least 3 required")));
    }
    let gap = (f.value(a) - f.value(b)).abs();
    if gap > tol {
        return Err(Error::Precondition(format!(
            "|f(a) − f(b)| = {gap} exceeds tolerance {tol}"
        )));
    }
    let grid = uniform_grid(iv, n);
    let vels = grid_velocities(f, &grid, beta, schedule, tol)?;
    let threshold = default_flag_threshold(tol);
    let mut unresolved = Vec::new();
    let mut first_any = None;
    let mut first_change = None;
    for (i, pair) in vels.iter().enumerate().take(n - 1).skip(1) {
        let (fwd, bwd) = (&pair[0].1, &pair[1].1);
        let (Some(p), Some(m)) = (fwd.converged_value(), bwd.converged_value()) else {
            unresolved.push(grid[i]);
            continue;
        };
        let max_like = p <= tol && m >= -tol;
        let min_like = p >= -tol && m <= tol;
        if max_like || min_like {
            let w = Witness {
                forward_velocity: Some(p),
                backward_velocity: Some(m),
                ..Witness::at(grid[i])
            };
            first_any.get_or_insert(w);
            if first_change.is_none() && (p.abs() > threshold || m.abs() > threshold) {
                first_change = Some(w);
            }
        }
    }
    let witness = first_change.or(first_any);
    let mut notes = match (&witness, first_change.is_some()) {
        (Some(_), true) => "witness in the set of change".to_string(),
        (Some(_), false) => "witness with vanishing velocity".to_string(),
        (None, _) => "no grid point satisfies the sign conditions".to_string(),
    };
    if !unresolved.is_empty() {
        notes.push_str(&format!("; unresolved velocity at x={}", list_points(&unresolved)));
    }
    Ok(IntervalVerdict {
        theorem: Theorem::Rolle,
        holds: witness.is_some(),
        witness,
        notes,
    })
}

/// Checks whether `r = (f(b)−f(a))/(b−a)^β` is attained as the forward
/// velocity at `a` or the backward velocity at `b`; interior attainment on the
/// grid is reported in the notes.
pub fn verify_mean_value<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    b: T,
    beta: T,
    n: usize,
    schedule: &EpsilonSchedule<T>,
    tol: T,
) -> Result<IntervalVerdict<T>> {
    check_order(beta)?;
    let iv = bounds(f, a, b)?;
    if !(beta < T::one()) {
        return Err(Error::Precondition("weak mean value check requires beta < 1".into()));
    }
    let diff = f.value(b) - f.value(a);
    if diff.abs() <= tol {
        return Err(Error::Precondition(format!("f(a) = f(b) within tolerance {tol}")));
    }
    let r = diff / iv.width().powf(beta);
    let left = velocity_limit(f, a, beta, Direction::Forward, schedule, tol)?;
    let right = velocity_limit(f, b, beta, Direction::Backward, schedule, tol)?;
    let attains = |l: &LimitEstimate<T>| l.converged_value().is_some_and(|v| (v - r).abs() <= tol);

    let mut interior = Vec::new();
    if n >= 3 {
        let grid = uniform_grid(iv, n);
        let vels = grid_velocities(f, &grid, beta, schedule, tol)?;
        for (i, pair) in vels.iter().enumerate().take(n - 1).skip(1) {
            if pair.iter().any(|(_, l)| attains(l)) {
                interior.push(grid[i]);
            }
        }
    }
    let interior_note = if interior.is_empty() {
        "no interior grid point attains r".to_string()
    } else {
        format!("interior attainment at x={}", list_points(&interior))
    };

    let witness = if attains(&left) {
        Some(Witness {
            forward_velocity: Some(left.value),
            target: Some(r),
            endpoint: Some(Endpoint::Left),
            ..Witness::at(a)
        })
    } else if attains(&right) {
        Some(Witness {
            backward_velocity: Some(right.value),
            target: Some(r),
            endpoint: Some(Endpoint::Right),
            ..Witness::at(b)
        })
    } else {
        None
    };
    let head = match witness.as_ref().and_then(|w| w.endpoint) {
        Some(Endpoint::Left) => "witness c = a",
        Some(Endpoint::Right) => "witness c = b",
        None => "no weak-MV witness",
    };
    Ok(IntervalVerdict {
        theorem: Theorem::WeakMeanValue,
        holds: witness.is_some(),
        witness,
        notes: format!("{head}; r={r}; {interior_note}"),
    })
}

/// Intermediate value check on grid velocities.
///
/// For `β < 1` only the value zero can be required: when both endpoint
/// velocities vanish, an interior zero-velocity grid point is sought. For
/// `β = 1` the `target` (default: midpoint of the endpoint derivatives) must be
/// attained within the grid resolution of the velocity values.
#[allow(clippy::too_many_arguments)]
pub fn verify_weak_darboux<T: Scalar, F: RealFunction<T> + ?Sized>(
    f: &F,
    a: T,
    b: T,
    beta: T,
    n: usize,
    schedule: &EpsilonSchedule<T>,
    tol: T,
    target: Option<T>,
) -> Result<IntervalVerdict<T>> {
    check_order(beta)?;
    let iv = bounds(f, a, b)?;
    if n < 3 {
        return Err(argument("grid", format!("{n} points, at least 3 required")));
    }
    let grid = uniform_grid(iv, n);
    let vels = grid_velocities(f, &grid, beta, schedule, tol)?;
    // The first entry is forward, except at the right end where only the
    // backward velocity exists.
    let values: Vec<Option<T>> = vels.iter().map(|pair| pair[0].1.converged_value()).collect();
    let unresolved: Vec<T> = values
        .iter()
        .zip(&grid)
        .filter(|(v, _)| v.is_none())
        .map(|(_, &x)| x)
        .collect();
    let unresolved_note = if unresolved.is_empty() {
        String::new()
    } else {
        format!("; unresolved velocity at x={}", list_points(&unresolved))
    };
    let (va, vb) = (values[0], values[n - 1]);

    if beta < T::one() {
        let threshold = default_flag_threshold(tol);
        let zero = |v: Option<T>| v.is_some_and(|v| v.abs() <= threshold);
        let found = (1..n - 1).find(|&i| zero(values[i]));
        let witness = found.map(|i| Witness {
            forward_velocity: values[i],
            target: Some(T::zero()),
            ..Witness::at(grid[i])
        });
        let (holds, head) = if zero(va) && zero(vb) {
            (
                witness.is_some(),
                "endpoint velocities vanish; zero velocity sought in the interior",
            )
        } else {
            (
                witness.is_some(),
                "only the value zero is an admissible intermediate velocity",
            )
        };
        return Ok(IntervalVerdict {
            theorem: Theorem::WeakDarboux,
            holds,
            witness,
            notes: format!("{head}{unresolved_note}"),
        });
    }

    let (Some(da), Some(db)) = (va, vb) else {
        return Ok(IntervalVerdict {
            theorem: Theorem::WeakDarboux,
            holds: false,
            witness: None,
            notes: format!("endpoint derivative unresolved{unresolved_note}"),
        });
    };
    let goal = target.unwrap_or((da + db) / T::lit(2.0));
    let (lo, hi) = (da.min(db), da.max(db));
    if goal < lo - tol || goal > hi + tol {
        return Err(argument("target", format!("{goal} is not between {da} and {db}")));
    }
    let resolved: Vec<(T, T)> = values
        .iter()
        .zip(&grid)
        .filter_map(|(v, &x)| v.map(|v| (x, v)))
        .collect();
    let step = resolved
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs())
        .fold(T::zero(), T::max);
    let best = resolved.iter().copied().min_by(|p, q| {
        (p.1 - goal)
            .abs()
            .partial_cmp(&(q.1 - goal).abs())
            .expect("finite velocities")
    });
    let witness = best
        .filter(|&(_, v)| (v - goal).abs() <= step + tol)
        .map(|(x, v)| Witness {
            forward_velocity: Some(v),
            target: Some(goal),
            ..Witness::at(x)
        });
    Ok(IntervalVerdict {
        theorem: Theorem::WeakDarboux,
        holds: witness.is_some(),
        witness,
        notes: format!("target {goal} sought within grid resolution {step}{unresolved_note}"),
    })
}
