//! Command-line front end: `run`, `list-cases` and `verify`.
//!
//! Exit statuses: 0 success, 1 failed self-check, 2 usage error,
//! 3 runtime failure of the solver, 4 file error.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};

use crate::cases::{find_case, CaseSpec, CASE_NAMES};
use crate::error::{Error, Result};
use crate::io::{snapshot_path, summarize, write_csv};
use crate::scheme::{run, run_with_snapshots, SchemeConfig, SchemeKind, DEFAULT_CFL};
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fdsj", version, about = "Jordan-chain flux difference splitting for weakly hyperbolic systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one case and write the final state as CSV.
    Run(RunArgs),
    /// Print the available case names.
    ListCases,
    /// Run the built-in invariant checks.
    Verify,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[arg(value_parser = PossibleValuesParser::new(CASE_NAMES))]
    case: String,
    #[arg(long, default_value = "fdsj")]
    scheme: SchemeKind,
    #[arg(long, default_value_t = 400)]
    cells: usize,
    #[arg(long, default_value_t = DEFAULT_CFL)]
    cfl: f64,
    /// Entropy-fix width; defaults to the case's value.
    #[arg(long)]
    eps: Option<f64>,
    /// Final time; defaults to the case's value.
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// Output CSV; defaults to `<case>-<scheme>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra output times, comma separated.
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<f64>,
}

/// A fully resolved `run` invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub case: CaseSpec,
    pub scheme: SchemeKind,
    pub n_cells: usize,
    pub cfl: f64,
    pub epsilon: f64,
    pub t_final: f64,
    pub output_path: PathBuf,
    pub snapshot_times: Vec<f64>,
}

impl RunConfig {
    fn from_args(a: RunArgs) -> Result<Self> {
        let case = find_case(&a.case)?;
        let epsilon = a.eps.unwrap_or(case.scheme_config::<f64>(a.scheme).entropy_fix_epsilon);
        let t_final = a.t_final.unwrap_or(case.t_final);
        let output_path = a
            .out
            .unwrap_or_else(|| PathBuf::from(format!("{}-{}.csv", case.name, a.scheme)));
        let cfg = RunConfig {
            case,
            scheme: a.scheme,
            n_cells: a.cells,
            cfl: a.cfl,
            epsilon,
            t_final,
            output_path,
            snapshot_times: a.snapshots,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 4 {
            return Err(Error::InvalidInput(format!("--cells {} must be at least 4", self.n_cells)));
        }
        self.scheme_config()?;
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::InvalidInput(format!("--t-final {} must be finite and non-negative", self.t_final)));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= self.t_final)) {
            return Err(Error::InvalidInput(format!(
                "snapshot time {t} outside [0, {}]",
                self.t_final
            )));
        }
        Ok(())
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig<f64>> {
        SchemeConfig::new(self.scheme, self.epsilon, self.cfl)
    }
}

/// Status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::File { .. } => EXIT_IO,
        Error::InvalidInput(_) | Error::UnknownCase(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let model = cfg.case.model;
    let scheme = cfg.scheme_config()?;
    let start = Instant::now();
    let initial = cfg.case.initial_grid::<f64>(cfg.n_cells)?;

    let mut snaps = cfg.snapshot_times.clone();
    snaps.sort_by(f64::total_cmp);
    snaps.dedup();
    let snapshots = run_with_snapshots(&model, &initial, &scheme, &snaps)?;
    let from = snapshots.last().unwrap_or(&initial);
    let fin = run(&model, from, &scheme, cfg.t_final)?;
    let wall = start.elapsed().as_secs_f64();

    for (t, s) in snaps.iter().zip(&snapshots) {
        write_csv(s, &model, snapshot_path(&cfg.output_path, *t))?;
    }
    write_csv(&fin, &model, &cfg.output_path)?;

    let summary = summarize(&fin, &model);
    let _ = writeln!(
        out,
        "case={} scheme={} cells={} t={} wall={wall:.3}s {} near_vacuum={}",
        cfg.case.name,
        cfg.scheme,
        cfg.n_cells,
        fin.time,
        summary.ranges(),
        summary.near_vacuum
    );
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                if !text.contains("possible values") {
                    let _ = writeln!(err, "valid cases: {}", CASE_NAMES.join(", "));
                }
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match cli.command {
        Command::ListCases => {
            for name in CASE_NAMES {
                let _ = writeln!(out, "{name}");
            }
            EXIT_OK
        }
        Command::Verify => {
            let checks = run_suite();
            for c in &checks {
                let _ = writeln!(out, "{}", c.line());
            }
            if checks.iter().all(|c| c.passed) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Command::Run(a) => match RunConfig::from_args(a).and_then(|cfg| execute(&cfg, out)) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                exit_code(&e)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("fdsj").chain(args.iter().copied()))
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        match cli.command {
            Command::Run(a) => RunConfig::from_args(a),
            _ => Err(Error::InvalidInput("not a run".into())),
        }
    }

    #[test]
    fn defaults_filled() {
        let cfg = parse(&["run", "pressureless-riemann", "--cells", "400", "--out", "r.csv"]).unwrap();
        assert_eq!(cfg.case.name, "pressureless-riemann");
        assert_eq!(cfg.scheme, SchemeKind::Fdsj);
        assert_eq!(cfg.n_cells, 400);
        assert_eq!(cfg.cfl, DEFAULT_CFL);
        assert_eq!(cfg.t_final, 0.2);
        assert_eq!(cfg.output_path, PathBuf::from("r.csv"));
        assert!(cfg.snapshot_times.is_empty());
    }

    #[test]
    fn overrides_and_snapshots() {
        let cfg = parse(&[
            "run", "modburgers-sonic", "--scheme", "llf", "--eps", "0.3", "--t-final", "0.1", "--snapshots", "0.05,0.02",
        ])
        .unwrap();
        assert_eq!(cfg.scheme, SchemeKind::Llf);
        assert_eq!(cfg.epsilon, 0.3);
        assert_eq!(cfg.t_final, 0.1);
        assert_eq!(cfg.snapshot_times, vec![0.05, 0.02]);
        assert_eq!(cfg.output_path, PathBuf::from("modburgers-sonic-llf.csv"));
    }

    #[test]
    fn case_default_epsilon_only_for_fdsj() {
        assert_eq!(parse(&["run", "modburgers-sonic"]).unwrap().epsilon, 0.4);
        assert_eq!(parse(&["run", "modburgers-sonic", "--scheme", "llf"]).unwrap().epsilon, 0.0);
    }

    #[test]
    fn validation_errors() {
        for bad in [
            &["run", "modburgers-sonic", "--cfl", "1.5"][..],
            &["run", "modburgers-sonic", "--cfl", "0"],
            &["run", "modburgers-sonic", "--cells", "3"],
            &["run", "modburgers-sonic", "--eps", "-1"],
            &["run", "modburgers-sonic", "--t-final", "-1"],
            &["run", "modburgers-sonic", "--snapshots", "0.5"],
            &["run", "nosuchcase"],
            &["run", "modburgers-sonic", "--bogus"],
        ] {
            assert!(parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn usage_errors_list_cases() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(["fdsj", "run", "nosuchcase"], &mut out, &mut err);
        assert_eq!(code, EXIT_USAGE);
        let err = String::from_utf8(err).unwrap();
        for name in CASE_NAMES {
            assert!(err.contains(name), "{err}");
        }

        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(main_with_args(["fdsj", "--frobnicate"], &mut out, &mut err), EXIT_USAGE);
        assert!(String::from_utf8(err).unwrap().contains("pressureless-riemann"));
    }

    #[test]
    fn list_cases_prints_all() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(main_with_args(["fdsj", "list-cases"], &mut out, &mut err), EXIT_OK);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().collect::<Vec<_>>(), CASE_NAMES);
    }

    #[test]
    fn exit_codes_by_error() {
        assert_eq!(exit_code(&Error::BlowUp { cell: 0, time: 0.1 }), EXIT_RUNTIME);
        assert_eq!(exit_code(&Error::UnknownCase("x".into())), EXIT_USAGE);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(exit_code(&Error::File { path: "a".into(), source: io }), EXIT_IO);
    }
}
