//! Argument parsing and validation.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::funcspec::FunctionSpec;
use crate::{CliError, CliResult};
use fracvel::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    ZooList,
    Analyze,
    Holder,
    Scan,
    Lfd,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ZooList => "zoo-list",
            Self::Analyze => "analyze",
            Self::Holder => "holder",
            Self::Scan => "scan",
            Self::Lfd => "lfd",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionChoice {
    Fwd,
    Bwd,
    #[default]
    Both,
}

impl DirectionChoice {
    pub fn directions(self) -> Vec<Direction> {
        match self {
            Self::Fwd => vec![Direction::Forward],
            Self::Bwd => vec![Direction::Backward],
            Self::Both => Direction::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremChoice {
    Rolle,
    WeakDarboux,
    WeakMeanValue,
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub function: Option<FunctionSpec>,
    pub x: Option<f64>,
    pub beta: Option<f64>,
    pub interval: Option<(f64, f64)>,
    pub grid: Option<usize>,
    pub eps0: Option<f64>,
    pub ratio: Option<f64>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub direction: DirectionChoice,
    pub theorem: Option<TheoremChoice>,
    pub target: Option<f64>,
    pub threshold: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn schedule_overridden(&self) -> bool {
        self.eps0.is_some() || self.ratio.is_some() || self.steps.is_some()
    }
}

/// Result of parsing: a run, or help/version text to print.
#[derive(Debug)]
pub enum Parsed {
    Run(Box<RunConfig>),
    Info(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "fracvel",
    version,
    about = "Fractional velocities, Hölder exponents and local fractional derivatives"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Analytic test functions
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Fractional velocity and the existence conditions at a point
    Analyze(Flags),
    /// Point-wise Hölder exponent from oscillation scaling
    Holder(Flags),
    /// Grid scan for points with non-zero velocity
    Scan(Flags),
    /// Local fractional derivative against the scaled velocity
    Lfd(Flags),
    /// Rolle, weak Darboux or weak mean-value check on an interval
    Verify(Flags),
}

#[derive(Debug, Subcommand)]
enum ZooAction {
    /// Print every catalogue member as one JSON line
    List(OutputFlags),
}

#[derive(Debug, Clone, Default, Args)]
struct OutputFlags {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    /// Function: cusp, abscusp, cusps, chirp, weierstrass, poly (`kind:key=val,...`) or file:PATH.csv
    #[arg(long = "fn", value_name = "SPEC")]
    function: Option<String>,
    /// Evaluation point (base point for lfd)
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Order in (0, 1]
    #[arg(long)]
    beta: Option<f64>,
    /// Interval for scan and verify
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true, value_parser = parse_pair)]
    interval: Option<(f64, f64)>,
    /// Grid points for scan and verify
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Largest increment of the schedule
    #[arg(long)]
    eps0: Option<f64>,
    /// Ratio between successive increments
    #[arg(long)]
    ratio: Option<f64>,
    /// Number of increments
    #[arg(long)]
    steps: Option<usize>,
    /// Limit-detection tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    direction: Option<DirectionChoice>,
    #[arg(long, value_enum)]
    theorem: Option<TheoremChoice>,
    /// Target value for the weak Darboux check
    #[arg(long, allow_hyphen_values = true)]
    target: Option<f64>,
    /// Flag threshold for scan (default 10·tol)
    #[arg(long)]
    threshold: Option<f64>,
    /// JSON file with the same fields as the flags
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputFlags,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "fn")]
    function: Option<String>,
    x: Option<f64>,
    beta: Option<f64>,
    interval: Option<(f64, f64)>,
    grid: Option<usize>,
    eps0: Option<f64>,
    ratio: Option<f64>,
    steps: Option<usize>,
    tol: Option<f64>,
    direction: Option<DirectionChoice>,
    theorem: Option<TheoremChoice>,
    target: Option<f64>,
    threshold: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected LO,HI, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn read_config(path: &Path) -> CliResult<FileConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("--config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("--config {}: {e}", path.display())))
}

fn merge(command: Command, flags: Flags) -> CliResult<RunConfig> {
    let file = match &flags.config {
        Some(p) => read_config(p)?,
        None => FileConfig::default(),
    };
    let function = match (&flags.function, &file.function) {
        (Some(a), Some(b)) if a.trim() != b.trim() => {
            return Err(CliError::usage(format!(
                "conflicting function sources: --fn `{a}` and config `{b}`"
            )))
        }
        (Some(a), _) | (None, Some(a)) => Some(a.parse::<FunctionSpec>()?),
        (None, None) => None,
    };
    Ok(RunConfig {
        command,
        function,
        x: flags.x.or(file.x),
        beta: flags.beta.or(file.beta),
        interval: flags.interval.or(file.interval),
        grid: flags.grid.or(file.grid),
        eps0: flags.eps0.or(file.eps0),
        ratio: flags.ratio.or(file.ratio),
        steps: flags.steps.or(file.steps),
        tol: flags.tol.or(file.tol),
        direction: flags.direction.or(file.direction).unwrap_or_default(),
        theorem: flags.theorem.or(file.theorem),
        target: flags.target.or(file.target),
        threshold: flags.threshold.or(file.threshold),
        format: flags.output.format.or(file.format).unwrap_or_default(),
        out: flags.output.out.or(file.out),
    })
}

fn bad(flag: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("invalid value for --{flag}: {reason}"))
}

fn missing(flag: &str) -> CliError {
    CliError::usage(format!("missing required parameter --{flag}"))
}

fn validate(cfg: &RunConfig) -> CliResult<()> {
    if let Some(b) = cfg.beta {
        if !(b > 0.0 && b <= 1.0) {
            return Err(bad("beta", "beta must be in (0,1]"));
        }
    }
    if let Some(x) = cfg.x {
        if !x.is_finite() {
            return Err(bad("x", "x must be finite"));
        }
    }
    if let Some((lo, hi)) = cfg.interval {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(bad("interval", "need finite lo < hi"));
        }
    }
    if let Some(n) = cfg.grid {
        if n < 3 {
            return Err(bad("grid", "at least 3 points required"));
        }
    }
    if let Some(e) = cfg.eps0 {
        if !(e > 0.0 && e.is_finite()) {
            return Err(bad("eps0", "eps0 must be positive"));
        }
    }
    if let Some(r) = cfg.ratio {
        if !(r > 0.0 && r < 1.0) {
            return Err(bad("ratio", "ratio must be in (0,1)"));
        }
    }
    if let Some(s) = cfg.steps {
        if s < fracvel::schedule::MIN_STEPS {
            return Err(bad(
                "steps",
                format!("at least {} steps required", fracvel::schedule::MIN_STEPS),
            ));
        }
    }
    if let Some(t) = cfg.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(bad("tol", "tol must be positive"));
        }
    }
    if let Some(t) = cfg.threshold {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(bad("threshold", "threshold must be non-negative"));
        }
    }
    if let Some(t) = cfg.target {
        if !t.is_finite() {
            return Err(bad("target", "target must be finite"));
        }
    }
    let need_fn = cfg.command != Command::ZooList;
    if need_fn && cfg.function.is_none() {
        return Err(missing("fn"));
    }
    let (need_x, need_interval) = match cfg.command {
        Command::ZooList => (false, false),
        Command::Analyze | Command::Holder | Command::Lfd => (true, false),
        Command::Scan | Command::Verify => (false, true),
    };
    if need_x && cfg.x.is_none() {
        return Err(missing("x"));
    }
    if need_interval && cfg.interval.is_none() {
        return Err(missing("interval"));
    }
    let need_beta = !matches!(cfg.command, Command::ZooList | Command::Holder);
    if need_beta && cfg.beta.is_none() {
        return Err(missing("beta"));
    }
    if cfg.command == Command::Lfd && cfg.beta == Some(1.0) {
        return Err(bad("beta", "lfd requires beta in (0,1)"));
    }
    if cfg.command == Command::Verify && cfg.theorem.is_none() {
        return Err(missing("theorem"));
    }
    if cfg.target.is_some() && cfg.theorem != Some(TheoremChoice::WeakDarboux) {
        return Err(bad("target", "only used with --theorem weak-darboux"));
    }
    Ok(())
}

/// Parses an argument vector (program name first) into a validated run.
pub fn parse_args<I, A>(argv: I) -> CliResult<Parsed>
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Parsed::Info(e.to_string())),
                _ => Err(CliError::usage(e.to_string().trim_end().trim_start_matches("error: "))),
            }
        }
    };
    let cfg = match cli.command {
        CliCommand::Zoo {
            action: ZooAction::List(out),
        } => RunConfig {
            command: Command::ZooList,
            function: None,
            x: None,
            beta: None,
            interval: None,
            grid: None,
            eps0: None,
            ratio: None,
            steps: None,
            tol: None,
            direction: DirectionChoice::default(),
            theorem: None,
            target: None,
            threshold: None,
            format: out.format.unwrap_or_default(),
            out: out.out,
        },
        CliCommand::Analyze(f) => merge(Command::Analyze, f)?,
        CliCommand::Holder(f) => merge(Command::Holder, f)?,
        CliCommand::Scan(f) => merge(Command::Scan, f)?,
        CliCommand::Lfd(f) => merge(Command::Lfd, f)?,
        CliCommand::Verify(f) => merge(Command::Verify, f)?,
    };
    validate(&cfg)?;
    Ok(Parsed::Run(Box::new(cfg)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CliResult<RunConfig> {
        let argv = std::iter::once("fracvel").chain(args.iter().copied());
        match parse_args(argv)? {
            Parsed::Run(c) => Ok(*c),
            Parsed::Info(_) => panic!("unexpected info output"),
        }
    }

    #[test]
    fn analyze_flags() {
        let c = run(&["analyze", "--fn", "cusp:a=0,beta=0.5,K=1", "--x", "0", "--beta", "0.5"]).unwrap();
        assert_eq!(c.command, Command::Analyze);
        assert_eq!(c.x, Some(0.0));
        assert_eq!(c.beta, Some(0.5));
        assert_eq!(c.direction, DirectionChoice::Both);
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn beta_out_of_range() {
        let e = run(&["analyze", "--fn", "cusp", "--x", "0", "--beta", "1.5"]).unwrap_err();
        assert_eq!(e.exit_code(), crate::EXIT_USAGE);
        assert!(e.to_string().contains("beta must be in (0,1]"), "{e}");
    }

    #[test]
    fn scan_with_file() {
        let c = run(&[
            "scan",
            "--fn",
            "file:data.csv",
            "--interval",
            "0,1",
            "--beta",
            "0.5",
            "--grid",
            "101",
        ])
        .unwrap();
        assert_eq!(c.command, Command::Scan);
        assert_eq!(c.interval, Some((0.0, 1.0)));
        assert_eq!(c.grid, Some(101));
        assert_eq!(c.function, Some(FunctionSpec::File(PathBuf::from("data.csv"))));
    }

    #[test]
    fn negative_values_accepted() {
        let c = run(&["analyze", "--fn", "cusp:a=-0.5", "--x", "-0.5", "--beta", "0.5"]).unwrap();
        assert_eq!(c.x, Some(-0.5));
        let c = run(&["scan", "--fn", "cusp", "--interval", "-1,1", "--beta", "0.5"]).unwrap();
        assert_eq!(c.interval, Some((-1.0, 1.0)));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let e = run(&["analyze", "--bogus", "1"]).unwrap_err();
        assert_eq!(e.exit_code(), crate::EXIT_USAGE);
        assert!(e.to_string().contains("--bogus"));
    }

    #[test]
    fn missing_parameter_named() {
        let e = run(&["analyze", "--fn", "cusp", "--beta", "0.5"]).unwrap_err();
        assert!(e.to_string().contains("--x"), "{e}");
        let e = run(&["verify", "--fn", "cusp", "--interval", "0,1", "--beta", "0.5"]).unwrap_err();
        assert!(e.to_string().contains("--theorem"), "{e}");
    }

    #[test]
    fn schedule_flags_validated() {
        assert!(run(&["analyze", "--fn", "cusp", "--x", "0", "--beta", "0.5", "--ratio", "1.2"]).is_err());
        assert!(run(&["analyze", "--fn", "cusp", "--x", "0", "--beta", "0.5", "--steps", "3"]).is_err());
        assert!(run(&["analyze", "--fn", "cusp", "--x", "0", "--beta", "0.5", "--tol", "0"]).is_err());
    }

    #[test]
    fn help_is_info() {
        let argv = ["fracvel", "--help"];
        assert!(matches!(parse_args(argv).unwrap(), Parsed::Info(_)));
    }

    #[test]
    fn pair_parser() {
        assert_eq!(parse_pair("0, 1.5"), Ok((0.0, 1.5)));
        assert!(parse_pair("0;1").is_err());
        assert!(parse_pair("a,1").is_err());
    }
}
