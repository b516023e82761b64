//! The `kind:key=val,...` function mini-language.
//!
//! List-valued parameters separate their entries with `;`, e.g.
//! `cusps:at=0.25;0.5;0.75,beta=0.5` or `poly:coeffs=1;0;-2,lo=-1,hi=1`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use fracvel::zoo::{
    make_abs_cusp, make_chirp, make_cusp_sum, make_polynomial, make_power_cusp, make_weierstrass, series_tolerance,
};
use fracvel::{Interval, RealFunction};

use crate::samples::load_samples;
use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Cusp { a: f64, beta: f64, k: f64, c0: f64 },
    AbsCusp { a: f64, beta: f64, k: f64, c0: f64 },
    Cusps { at: Vec<f64>, beta: f64, k: f64 },
    Chirp { gamma: f64, a: f64 },
    Weierstrass { amp: f64, freq: u32, terms: usize },
    Poly { coeffs: Vec<f64>, lo: f64, hi: f64 },
    File(PathBuf),
}

/// A constructed function with its identifier and default tolerance.
pub struct LoadedFunction {
    pub id: String,
    pub function: Box<dyn RealFunction<f64>>,
    pub default_tol: f64,
    /// Minimum abscissa gap for sampled data.
    pub sample_gap: Option<f64>,
}

struct Params {
    kind: &'static str,
    map: BTreeMap<String, String>,
}

impl Params {
    fn parse(kind: &'static str, body: &str, allowed: &[&str]) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--fn {kind}: expected key=value, got `{item}`")))?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(CliError::usage(format!(
                    "--fn {kind}: unknown parameter `{k}` (expected one of {})",
                    allowed.join(", ")
                )));
            }
            if map.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::usage(format!("--fn {kind}: parameter `{k}` given twice")));
            }
        }
        Ok(Self { kind, map })
    }

    fn num(&self, key: &str, default: Option<f64>) -> CliResult<f64> {
        match self.map.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| CliError::usage(format!("--fn {}: `{key}={v}` is not a number", self.kind))),
            None => default.ok_or_else(|| CliError::usage(format!("--fn {}: missing parameter `{key}`", self.kind))),
        }
    }

    fn int<U: FromStr>(&self, key: &str, default: U) -> CliResult<U> {
        match self.map.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| CliError::usage(format!("--fn {}: `{key}={v}` is not a non-negative integer", self.kind))),
            None => Ok(default),
        }
    }

    fn list(&self, key: &str) -> CliResult<Vec<f64>> {
        let v = self
            .map
            .get(key)
            .ok_or_else(|| CliError::usage(format!("--fn {}: missing parameter `{key}`", self.kind)))?;
        v.split(';')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("--fn {}: `{t}` in `{key}` is not a number", self.kind)))
            })
            .collect()
    }
}

impl FromStr for FunctionSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let s = s.trim();
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        Ok(match kind.trim() {
            "file" => {
                if body.trim().is_empty() {
                    return Err(CliError::usage("--fn file: missing path"));
                }
                Self::File(PathBuf::from(body.trim()))
            }
            "cusp" | "abscusp" => {
                let name = if kind == "cusp" { "cusp" } else { "abscusp" };
                let p = Params::parse(name, body, &["a", "beta", "K", "c0"])?;
                let (a, beta, k, c0) = (
                    p.num("a", Some(0.0))?,
                    p.num("beta", Some(0.5))?,
                    p.num("K", Some(1.0))?,
                    p.num("c0", Some(0.0))?,
                );
                if name == "cusp" {
                    Self::Cusp { a, beta, k, c0 }
                } else {
                    Self::AbsCusp { a, beta, k, c0 }
                }
            }
            "cusps" => {
                let p = Params::parse("cusps", body, &["at", "beta", "K"])?;
                Self::Cusps {
                    at: p.list("at")?,
                    beta: p.num("beta", Some(0.5))?,
                    k: p.num("K", Some(1.0))?,
                }
            }
            "chirp" => {
                let p = Params::parse("chirp", body, &["gamma", "a"])?;
                Self::Chirp {
                    gamma: p.num("gamma", Some(0.5))?,
                    a: p.num("a", Some(0.0))?,
                }
            }
            "weierstrass" => {
                let p = Params::parse("weierstrass", body, &["amp", "freq", "terms"])?;
                Self::Weierstrass {
                    amp: p.num("amp", Some(0.5))?,
                    freq: p.int("freq", 3u32)?,
                    terms: p.int("terms", 24usize)?,
                }
            }
            "poly" => {
                let p = Params::parse("poly", body, &["coeffs", "lo", "hi"])?;
                Self::Poly {
                    coeffs: p.list("coeffs")?,
                    lo: p.num("lo", Some(-1.0))?,
                    hi: p.num("hi", Some(1.0))?,
                }
            }
            other => {
                return Err(CliError::usage(format!(
                    "--fn: unknown kind `{other}` (expected cusp, abscusp, cusps, chirp, weierstrass, poly or file)"
                )))
            }
        })
    }
}

fn usage(e: fracvel::Error) -> CliError {
    CliError::usage(format!("--fn: {e}"))
}

impl FunctionSpec {
    /// Builds the function; sampled data is read from disk here.
    pub fn load(&self) -> CliResult<LoadedFunction> {
        let analytic = |f: fracvel::AnalyticTestFunction64| LoadedFunction {
            id: f.id.clone(),
            default_tol: f.default_tol,
            function: Box::new(f),
            sample_gap: None,
        };
        Ok(match self {
            Self::Cusp { a, beta, k, c0 } => analytic(make_power_cusp(*a, *beta, *k, *c0).map_err(usage)?),
            Self::AbsCusp { a, beta, k, c0 } => analytic(make_abs_cusp(*a, *beta, *k, *c0).map_err(usage)?),
            Self::Cusps { at, beta, k } => analytic(make_cusp_sum(at, *beta, *k).map_err(usage)?),
            Self::Chirp { gamma, a } => analytic(make_chirp(*gamma, *a).map_err(usage)?),
            Self::Weierstrass { amp, freq, terms } => analytic(make_weierstrass(*amp, *freq, *terms).map_err(usage)?),
            Self::Poly { coeffs, lo, hi } => {
                let dom = Interval::new(*lo, *hi).map_err(usage)?;
                analytic(make_polynomial(coeffs, dom).map_err(usage)?)
            }
            Self::File(path) => {
                let f = load_samples(path)?;
                LoadedFunction {
                    id: format!("file({})", path.display()),
                    sample_gap: Some(f.min_gap()),
                    default_tol: series_tolerance(),
                    function: Box::new(f),
                }
            }
        })
    }
}
