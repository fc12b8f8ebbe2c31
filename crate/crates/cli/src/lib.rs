//! `sho-gps`: spectra, radial moments, densities, reference-table checks and
//! grid-convergence scans for the spiked harmonic oscillator.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gps_core::golden::evaluate_table;
use gps_core::solver::{energies, states};
use gps_core::{Channel, Error as CoreError, GridSettings};

use config::{load_config_file, ConfigError, OutputFormat, Overrides, RunConfig, CONFIG_ENV};
use report::{
    ConvergeReport, DensityPoint, DensityReport, EnergyEntry, ExpectEntry, ExpectReport,
    MomentEntry, Render, SpectrumReport, TablesReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sho-gps",
    version,
    about = "Spiked harmonic oscillator spectra by Legendre pseudospectral collocation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Singularity exponent of the lambda r^-alpha term.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha_s: Option<f64>,
    /// Coupling lambda (may be negative).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Angular momentum quantum number.
    #[arg(long, global = true)]
    pub ell: Option<u32>,
    /// Number of states to report.
    #[arg(long, global = true)]
    pub states: Option<usize>,
    /// Polynomial order N of the collocation grid.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    /// Outer radius of the mapped domain.
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    /// Map parameter: the map length scale is map_alpha * rmax / 2.
    #[arg(long, global = true)]
    pub map_alpha: Option<f64>,
    /// Output format: json or csv.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    /// Significant digits in display strings (truncated, not rounded).
    #[arg(long, global = true)]
    pub digits: Option<usize>,
    /// Flat key = value config file; flags override its values.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            alpha_s: self.alpha_s,
            lambda: self.lambda,
            ell: self.ell,
            n_states: self.states,
            grid_n: self.grid_n,
            r_max: self.rmax,
            alpha_m: self.map_alpha,
            output_format: self.format,
            precision_digits: self.digits,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of one channel.
    Solve,
    /// Radial moments <r^k> for the lowest states.
    Expect {
        /// Powers k, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "-1,1"
        )]
        powers: Vec<i32>,
    },
    /// Radial probability density |u(r)|^2 of one state on a uniform grid.
    Density {
        /// 0-based state index within the channel.
        #[arg(long, default_value_t = 0)]
        state: usize,
        /// Number of output rows.
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, default_value_t = 0.0)]
        r_lo: f64,
        /// Defaults to min(10, rmax).
        #[arg(long)]
        r_hi: Option<f64>,
    },
    /// Recompute a reference table (1-7, or "all") and compare.
    Tables {
        #[arg(value_parser = parse_table_selector)]
        which: TableSelector,
    },
    /// Lowest eigenvalue across a sweep of grid and map parameters.
    Converge {
        /// Grid orders to sweep; defaults to the configured one.
        #[arg(long, value_delimiter = ',')]
        grid_n_list: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        rmax_list: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        map_alpha_list: Vec<f64>,
        /// Exit with status 1 if the spread exceeds this.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSelector {
    One(u8),
    All,
}

fn parse_table_selector(s: &str) -> Result<TableSelector, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(TableSelector::All);
    }
    match s.parse::<u8>() {
        Ok(t @ 1..=7) => Ok(TableSelector::One(t)),
        _ => Err(format!("expected a table number 1-7 or \"all\", got {s:?}")),
    }
}

/// Failure carrying the process exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self {
            code: EXIT_BAD_INPUT,
            message: e.0,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Domain { .. }
            | CoreError::InvalidParameter(_)
            | CoreError::NonPositiveRadius(_)
            | CoreError::GoldenData { .. } => EXIT_BAD_INPUT,
            _ => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn bad_input(message: String) -> CliError {
    CliError {
        code: EXIT_BAD_INPUT,
        message,
    }
}

/// Text for stdout and the exit status.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

/// Parses `args` and runs the command; prints and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn resolve_config(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &global.config {
        cfg.apply(&load_config_file(path)?);
    }
    cfg.apply(&global.overrides());
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = resolve_config(&cli.global)?;
    match &cli.command {
        Command::Solve => cmd_solve(&cfg),
        Command::Expect { powers } => cmd_expect(&cfg, powers),
        Command::Density {
            state,
            points,
            r_lo,
            r_hi,
        } => cmd_density(
            &cfg,
            *state,
            *points,
            *r_lo,
            r_hi.unwrap_or(cfg.r_max.min(10.0)),
        ),
        Command::Tables { which } => cmd_tables(&cfg, *which),
        Command::Converge {
            grid_n_list,
            rmax_list,
            map_alpha_list,
            tolerance,
        } => cmd_converge(&cfg, grid_n_list, rmax_list, map_alpha_list, *tolerance),
    }
}

fn channel(cfg: &RunConfig) -> Channel {
    Channel::new(cfg.alpha_s, cfg.lambda, cfg.ell)
}

fn ok(stdout: String) -> Result<Outcome, CliError> {
    Ok(Outcome {
        stdout,
        code: EXIT_OK,
    })
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let disc = cfg.grid().discretization()?;
    let values = energies(&channel(cfg), &disc, cfg.n_states)?;
    let report = SpectrumReport {
        config: cfg.clone(),
        states: values
            .iter()
            .enumerate()
            .map(|(i, &e)| EnergyEntry::new(i, e, cfg.precision_digits))
            .collect(),
    };
    ok(report.render(cfg.format_or(OutputFormat::Json)))
}

pub fn cmd_expect(cfg: &RunConfig, powers: &[i32]) -> Result<Outcome, CliError> {
    if powers.is_empty() {
        return Err(bad_input("at least one power is required".into()));
    }
    let disc = cfg.grid().discretization()?;
    let st = states(&channel(cfg), &disc, cfg.n_states)?;
    let report = ExpectReport {
        config: cfg.clone(),
        powers: powers.to_vec(),
        states: st
            .iter()
            .map(|s| ExpectEntry {
                state: EnergyEntry::new(s.index_n(), s.energy(), cfg.precision_digits),
                moments: powers
                    .iter()
                    .map(|&k| MomentEntry::new(k, s.expectation_r_power(k), cfg.precision_digits))
                    .collect(),
            })
            .collect(),
    };
    ok(report.render(cfg.format_or(OutputFormat::Json)))
}

pub fn cmd_density(
    cfg: &RunConfig,
    state: usize,
    points: usize,
    r_lo: f64,
    r_hi: f64,
) -> Result<Outcome, CliError> {
    if state >= cfg.grid_n - 1 {
        return Err(bad_input(format!(
            "state index {state} exceeds the {} available",
            cfg.grid_n - 1
        )));
    }
    let disc = cfg.grid().discretization()?;
    let st = states(&channel(cfg), &disc, state + 1)?;
    let s = &st[state];
    let samples = s.density_samples(points, r_lo, r_hi)?;
    let report = DensityReport {
        config: cfg.clone(),
        state: EnergyEntry::new(state, s.energy(), cfg.precision_digits),
        node_count: s.node_count(),
        points: samples
            .into_iter()
            .map(|(r, d)| DensityPoint::new(r, d))
            .collect(),
    };
    ok(report.render(cfg.format_or(OutputFormat::Csv)))
}

pub fn cmd_tables(cfg: &RunConfig, which: TableSelector) -> Result<Outcome, CliError> {
    let tables: Vec<u8> = match which {
        TableSelector::One(t) => vec![t],
        TableSelector::All => (1..=7).collect(),
    };
    let reports = tables
        .iter()
        .map(|&t| evaluate_table(t, &cfg.grid()))
        .collect::<Result<Vec<_>, _>>()?;
    let report = TablesReport::from_reports(&reports);
    let code = if report.passed {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    };
    Ok(Outcome {
        stdout: report.render(cfg.format_or(OutputFormat::Csv)),
        code,
    })
}

pub fn cmd_converge(
    cfg: &RunConfig,
    grid_n: &[usize],
    r_max: &[f64],
    alpha_m: &[f64],
    tolerance: Option<f64>,
) -> Result<Outcome, CliError> {
    let or_default = |v: &[f64], d: f64| if v.is_empty() { vec![d] } else { v.to_vec() };
    let grid_n = if grid_n.is_empty() {
        vec![cfg.grid_n]
    } else {
        grid_n.to_vec()
    };
    let r_max = or_default(r_max, cfg.r_max);
    let alpha_m = or_default(alpha_m, cfg.alpha_m);

    let mut points = Vec::new();
    for &n in &grid_n {
        for &rm in &r_max {
            for &am in &alpha_m {
                let settings = GridSettings::new(n, rm, am);
                let cell = RunConfig {
                    grid_n: n,
                    r_max: rm,
                    alpha_m: am,
                    n_states: 1,
                    ..cfg.clone()
                };
                cell.validate()?;
                let e0 = energies(&channel(cfg), &settings.discretization()?, 1)?[0];
                points.push((settings, e0));
            }
        }
    }
    let report = ConvergeReport::new(cfg, &points);
    let code = match tolerance {
        Some(tol) if report.max_drift > tol => EXIT_MISMATCH,
        _ => EXIT_OK,
    };
    Ok(Outcome {
        stdout: report.render(cfg.format_or(OutputFormat::Csv)),
        code,
    })
}
