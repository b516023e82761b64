//! Dispatch of a validated [`RunConfig`] to the library.

use serde::Serialize;
use serde_json::Value;

use fracvel::scanner::default_flag_threshold;
use fracvel::schedule::MIN_STEPS;
use fracvel::zoo::catalog;
use fracvel::{
    check_lfd_equivalence, estimate_holder_exponent, estimate_velocity, scan_change_set, verify_mean_value,
    verify_rolle, verify_weak_darboux, AnalyticTestFunction64, Direction, EpsilonSchedule64, Interval,
    IntervalVerdict64, LfdOptions64, LimitRoute, LimitStatus, RealFunction, VelocityReport64,
};

use crate::config::{Command, Format, RunConfig, TheoremChoice};
use crate::funcspec::LoadedFunction;
use crate::output::{csv_float, document, render_csv, render_json, to_value};
use crate::{CliError, CliResult};

/// Default grid size for `scan` and `verify`.
pub const DEFAULT_GRID: usize = 101;

/// Rendered output plus any analysis-level failures (exit status 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub failures: Vec<String>,
}

#[derive(Serialize)]
struct VelocityEntry<'a> {
    direction: Direction,
    x: f64,
    beta: f64,
    status: LimitStatus,
    value: Option<f64>,
    residual: f64,
    tolerance: f64,
    route: Option<LimitRoute>,
    c1_holds: bool,
    c1_constant: f64,
    c2_oscillation: f64,
    c2_holds: bool,
    increments: &'a [f64],
    variations: &'a [f64],
}

impl<'a> From<&'a VelocityReport64> for VelocityEntry<'a> {
    fn from(r: &'a VelocityReport64) -> Self {
        Self {
            direction: r.dir,
            x: r.x,
            beta: r.beta,
            status: r.limit.status,
            value: r.limit.converged_value(),
            residual: r.limit.residual,
            tolerance: r.limit.tolerance,
            route: r.limit.route,
            c1_holds: r.c1_holds,
            c1_constant: r.c1_constant,
            c2_oscillation: r.c2_oscillation,
            c2_holds: r.c2_holds,
            increments: &r.increments,
            variations: &r.variations,
        }
    }
}

#[derive(Serialize)]
struct ErrorEntry {
    direction: Direction,
    error: String,
}

/// JSON payload fields, CSV rows and CSV header of one command.
type Rendered = (Vec<(&'static str, Value)>, Vec<Vec<String>>, &'static [&'static str]);

/// Records a per-direction failure; usage errors abort the run.
fn fail_dir(dir: Direction, e: fracvel::Error, failures: &mut Vec<String>) -> CliResult<Value> {
    let err = CliError::from(e);
    if let CliError::Usage(_) = err {
        return Err(err);
    }
    failures.push(format!("{}: {err}", dir.as_str()));
    to_value(&ErrorEntry {
        direction: dir,
        error: err.to_string(),
    })
}

/// Schedule spanning the sampled range down to just above four sample gaps.
fn sampled_schedule(gap: f64, width: f64) -> EpsilonSchedule64 {
    let ratio = std::f64::consts::FRAC_1_SQRT_2;
    let eps0 = width / 8.0;
    let span = ((4.0 * gap) / eps0).ln() / ratio.ln();
    let count = ((span - 1e-9).floor().max(0.0) as usize + 1).max(MIN_STEPS);
    EpsilonSchedule64 { eps0, ratio, count }
}

fn schedule(cfg: &RunConfig, f: &LoadedFunction) -> CliResult<EpsilonSchedule64> {
    if let (Some(gap), false) = (f.sample_gap, cfg.schedule_overridden()) {
        return Ok(sampled_schedule(gap, f.function.domain().width()));
    }
    let d = EpsilonSchedule64::default();
    Ok(EpsilonSchedule64::new(
        cfg.eps0.unwrap_or(d.eps0),
        cfg.ratio.unwrap_or(d.ratio),
        cfg.steps.unwrap_or(d.count),
    )?)
}

fn point_in_domain(f: &LoadedFunction, x: f64) -> CliResult<()> {
    let dom = f.function.domain();
    if dom.contains(x) {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "invalid value for --x: {x} outside the domain [{}, {}] of {}",
            dom.lo, dom.hi, f.id
        )))
    }
}

fn interval_in_domain(f: &LoadedFunction, (lo, hi): (f64, f64)) -> CliResult<Interval<f64>> {
    let iv = Interval::new(lo, hi)?;
    if !f.function.domain().contains_interval(&iv) {
        let dom = f.function.domain();
        return Err(CliError::usage(format!(
            "invalid value for --interval: [{lo}, {hi}] not inside the domain [{}, {}] of {}",
            dom.lo, dom.hi, f.id
        )));
    }
    Ok(iv)
}

fn zoo_list(format: Format) -> CliResult<Outcome> {
    let members: Vec<AnalyticTestFunction64> = catalog();
    let text = match format {
        Format::Json => {
            let mut s = String::new();
            for m in &members {
                s.push_str(&render_json(&to_value(m)?));
            }
            s
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = members
                .iter()
                .map(|m| {
                    vec![
                        m.id.clone(),
                        csv_float(Some(m.domain.lo)),
                        csv_float(Some(m.domain.hi)),
                        m.marks.len().to_string(),
                    ]
                })
                .collect();
            render_csv(&["id", "lo", "hi", "marks"], &rows)?
        }
    };
    Ok(Outcome {
        text,
        failures: Vec::new(),
    })
}

/// Runs the configured command and renders its report.
pub fn execute(cfg: &RunConfig) -> CliResult<Outcome> {
    if cfg.command == Command::ZooList {
        return zoo_list(cfg.format);
    }
    let spec = cfg
        .function
        .as_ref()
        .ok_or_else(|| CliError::usage("missing required parameter --fn"))?;
    let f = spec.load()?;
    let tol = cfg.tol.unwrap_or(f.default_tol);
    let sched = schedule(cfg, &f)?;
    let func: &dyn RealFunction<f64> = f.function.as_ref();
    let dirs = cfg.direction.directions();
    let mut failures = Vec::new();
    let (payload, rows, header): Rendered = match cfg.command {
        Command::ZooList => unreachable!(),
        Command::Analyze => {
            let x = cfg.x.expect("validated");
            let beta = cfg.beta.expect("validated");
            point_in_domain(&f, x)?;
            let mut results = Vec::new();
            let mut rows = Vec::new();
            for &dir in &dirs {
                match estimate_velocity(func, x, beta, dir, &sched, tol) {
                    Ok(r) => {
                        results.push(to_value(&VelocityEntry::from(&r))?);
                        for (e, v) in r.increments.iter().zip(&r.variations) {
                            rows.push(vec![dir.as_str().to_string(), csv_float(Some(*e)), csv_float(Some(*v))]);
                        }
                    }
                    Err(e) => results.push(fail_dir(dir, e, &mut failures)?),
                }
            }
            (
                vec![("results", Value::Array(results))],
                rows,
                &["direction", "eps", "variation"],
            )
        }
        Command::Holder => {
            let x = cfg.x.expect("validated");
            point_in_domain(&f, x)?;
            let mut results = Vec::new();
            let mut rows = Vec::new();
            for &dir in &dirs {
                match estimate_holder_exponent(func, x, dir, &sched) {
                    Ok(h) => {
                        rows.push(vec![
                            dir.as_str().to_string(),
                            csv_float(Some(h.exponent)),
                            csv_float(Some(h.constant)),
                            csv_float(Some(h.r_squared)),
                            h.n_scales.to_string(),
                            h.low_confidence.to_string(),
                        ]);
                        results.push(to_value(&h)?);
                    }
                    Err(e) => results.push(fail_dir(dir, e, &mut failures)?),
                }
            }
            (
                vec![("results", Value::Array(results))],
                rows,
                &[
                    "direction",
                    "exponent",
                    "constant",
                    "r_squared",
                    "n_scales",
                    "low_confidence",
                ],
            )
        }
        Command::Scan => {
            let iv = interval_in_domain(&f, cfg.interval.expect("validated"))?;
            let beta = cfg.beta.expect("validated");
            let threshold = cfg.threshold.unwrap_or_else(|| default_flag_threshold(tol));
            let report = scan_change_set(func, iv, beta, cfg.grid.unwrap_or(DEFAULT_GRID), threshold, &sched, tol)?;
            let mut rows = Vec::new();
            for e in &report.evaluations {
                for v in &e.velocities {
                    let value = (v.status == LimitStatus::Converged).then_some(v.value);
                    rows.push(vec![
                        csv_float(Some(e.x)),
                        csv_float(value),
                        v.dir.as_str().to_string(),
                        v.flagged.to_string(),
                    ]);
                }
            }
            (
                vec![("report", to_value(&report)?)],
                rows,
                &["x", "velocity", "direction", "flagged"],
            )
        }
        Command::Lfd => {
            let a = cfg.x.expect("validated");
            let beta = cfg.beta.expect("validated");
            point_in_domain(&f, a)?;
            let opts = LfdOptions64::default();
            let mut results = Vec::new();
            let mut rows = Vec::new();
            for &dir in &dirs {
                match check_lfd_equivalence(func, a, beta, dir, &opts, &sched, tol) {
                    Ok(r) => {
                        if !r.pass {
                            failures.push(format!(
                                "{}: equivalence gap {} exceeds {}",
                                dir.as_str(),
                                r.equivalence_gap.map_or("undefined".into(), |g| g.to_string()),
                                r.combined_tolerance
                            ));
                        }
                        rows.push(vec![
                            dir.as_str().to_string(),
                            csv_float(r.lfd.converged_value()),
                            csv_float(Some(r.velocity_scaled)),
                            csv_float(r.equivalence_gap),
                            r.pass.to_string(),
                        ]);
                        results.push(to_value(&r)?);
                    }
                    Err(e) => results.push(fail_dir(dir, e, &mut failures)?),
                }
            }
            (
                vec![("results", Value::Array(results))],
                rows,
                &["direction", "lfd", "velocity_scaled", "equivalence_gap", "pass"],
            )
        }
        Command::Verify => {
            let (a, b) = cfg.interval.expect("validated");
            interval_in_domain(&f, (a, b))?;
            let beta = cfg.beta.expect("validated");
            let n = cfg.grid.unwrap_or(DEFAULT_GRID);
            let verdict: IntervalVerdict64 = match cfg.theorem.expect("validated") {
                TheoremChoice::Rolle => verify_rolle(func, a, b, beta, n, &sched, tol)?,
                TheoremChoice::WeakMeanValue => verify_mean_value(func, a, b, beta, n, &sched, tol)?,
                TheoremChoice::WeakDarboux => verify_weak_darboux(func, a, b, beta, n, &sched, tol, cfg.target)?,
            };
            if !verdict.holds {
                failures.push(format!("{:?} does not hold: {}", verdict.theorem, verdict.notes));
            }
            let theorem = to_value(&verdict.theorem)?.as_str().unwrap_or_default().to_string();
            let rows = vec![vec![
                theorem,
                verdict.holds.to_string(),
                csv_float(verdict.witness.map(|w| w.c)),
                verdict.notes.clone(),
            ]];
            (
                vec![("verdict", to_value(&verdict)?)],
                rows,
                &["theorem", "holds", "c", "notes"],
            )
        }
    };
    let text = match cfg.format {
        Format::Json => {
            let mut payload = payload;
            payload.insert(0, ("tolerance", to_value(&tol)?));
            payload.insert(1, ("schedule", to_value(&sched)?));
            render_json(&document(cfg.command.as_str(), Some(&f.id), payload))
        }
        Format::Csv => render_csv(header, &rows)?,
    };
    Ok(Outcome { text, failures })
}
