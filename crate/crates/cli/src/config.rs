//! Run configuration: built-in defaults, then an optional flat `key = value`
//! file, then command-line flags.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use gps_core::GridSettings;
use serde::{Deserialize, Serialize};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "SHO_GPS_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alpha_s: f64,
    pub lambda: f64,
    pub ell: u32,
    pub n_states: usize,
    pub grid_n: usize,
    pub r_max: f64,
    pub alpha_m: f64,
    /// `None` lets each command pick its natural format.
    pub output_format: Option<OutputFormat>,
    pub precision_digits: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = GridSettings::default();
        Self {
            alpha_s: 1.0,
            lambda: 0.0,
            ell: 0,
            n_states: 1,
            grid_n: grid.n,
            r_max: grid.r_max,
            alpha_m: grid.alpha_m,
            output_format: None,
            precision_digits: 12,
        }
    }
}

/// Values that may be overridden from a file or flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha_s: Option<f64>,
    pub lambda: Option<f64>,
    pub ell: Option<u32>,
    pub n_states: Option<usize>,
    pub grid_n: Option<usize>,
    pub r_max: Option<f64>,
    pub alpha_m: Option<f64>,
    pub output_format: Option<OutputFormat>,
    pub precision_digits: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => { $( if let Some(v) = o.$field { self.$field = v; } )* };
        }
        take!(
            alpha_s,
            lambda,
            ell,
            n_states,
            grid_n,
            r_max,
            alpha_m,
            precision_digits
        );
        if o.output_format.is_some() {
            self.output_format = o.output_format;
        }
    }

    pub fn grid(&self) -> GridSettings {
        GridSettings::new(self.grid_n, self.r_max, self.alpha_m)
    }

    pub fn format_or(&self, fallback: OutputFormat) -> OutputFormat {
        self.output_format.unwrap_or(fallback)
    }

    /// Checks ranges that the solver would otherwise reject later.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError(m));
        if !(self.alpha_s.is_finite() && self.alpha_s > 0.0) {
            return fail(format!("alpha-s must be positive, got {}", self.alpha_s));
        }
        if !self.lambda.is_finite() {
            return fail(format!("lambda must be finite, got {}", self.lambda));
        }
        if self.grid_n < 2 {
            return fail(format!("grid-n must be at least 2, got {}", self.grid_n));
        }
        if self.n_states == 0 || self.n_states > self.grid_n - 1 {
            return fail(format!(
                "states must be between 1 and grid-n - 1 = {}, got {}",
                self.grid_n - 1,
                self.n_states
            ));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return fail(format!("rmax must be positive, got {}", self.r_max));
        }
        if !(self.alpha_m.is_finite() && self.alpha_m > 0.0) {
            return fail(format!("map-alpha must be positive, got {}", self.alpha_m));
        }
        if !(1..=17).contains(&self.precision_digits) {
            return fail(format!(
                "digits must be between 1 and 17, got {}",
                self.precision_digits
            ));
        }
        Ok(())
    }
}

/// Parses a flat config file. Keys mirror the long flags (`alpha-s`,
/// `grid-n`, ...); underscores are accepted in place of dashes. Blank lines
/// and `#` comments are ignored.
pub fn parse_config(text: &str) -> Result<Overrides, ConfigError> {
    let mut o = Overrides::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| ConfigError(format!("config line {}: {m}", i + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        fn parse<T: FromStr>(v: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            v.parse()
                .map_err(|e: T::Err| format!("bad value {v:?}: {e}"))
        }
        match key.as_str() {
            "alpha-s" => o.alpha_s = Some(parse(value).map_err(err)?),
            "lambda" => o.lambda = Some(parse(value).map_err(err)?),
            "ell" => o.ell = Some(parse(value).map_err(err)?),
            "states" => o.n_states = Some(parse(value).map_err(err)?),
            "grid-n" => o.grid_n = Some(parse(value).map_err(err)?),
            "rmax" => o.r_max = Some(parse(value).map_err(err)?),
            "map-alpha" => o.alpha_m = Some(parse(value).map_err(err)?),
            "format" => o.output_format = Some(parse(value).map_err(err)?),
            "digits" => o.precision_digits = Some(parse(value).map_err(err)?),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    Ok(o)
}

pub fn load_config_file(path: &Path) -> Result<Overrides, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}
