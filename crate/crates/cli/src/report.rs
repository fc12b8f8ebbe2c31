//! Serializable command reports. JSON carries full-precision decimal strings
//! alongside truncated display strings; CSV has one header row.

use std::fmt::Write as _;

use gps_core::format::{full_precision, truncate_like, truncate_significant};
use gps_core::golden::{CellOutcome, TableReport};
use gps_core::GridSettings;
use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, RunConfig};

pub trait Render: Serialize {
    fn csv(&self) -> String;

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.csv(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEntry {
    pub index: usize,
    /// Shortest decimal that round-trips to the computed `f64`.
    pub energy: String,
    /// Truncated to the requested significant digits.
    pub display: String,
}

impl EnergyEntry {
    pub fn new(index: usize, energy: f64, digits: usize) -> Self {
        Self {
            index,
            energy: full_precision(energy),
            display: truncate_significant(energy, digits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub config: RunConfig,
    pub states: Vec<EnergyEntry>,
}

impl Render for SpectrumReport {
    fn csv(&self) -> String {
        let mut out = String::from("index,energy,display\n");
        for s in &self.states {
            let _ = writeln!(out, "{},{},{}", s.index, s.energy, s.display);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub k: i32,
    pub value: String,
    pub display: String,
}

impl MomentEntry {
    pub fn new(k: i32, value: f64, digits: usize) -> Self {
        Self {
            k,
            value: full_precision(value),
            display: truncate_significant(value, digits),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectEntry {
    #[serde(flatten)]
    pub state: EnergyEntry,
    pub moments: Vec<MomentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectReport {
    pub config: RunConfig,
    pub powers: Vec<i32>,
    pub states: Vec<ExpectEntry>,
}

impl Render for ExpectReport {
    fn csv(&self) -> String {
        let mut out = String::from("index,energy,k,value,display\n");
        for s in &self.states {
            for m in &s.moments {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    s.state.index, s.state.energy, m.k, m.value, m.display
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub r: f64,
    pub density: f64,
}

impl DensityPoint {
    pub fn new(r: f64, density: f64) -> Self {
        Self { r, density }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub config: RunConfig,
    pub state: EnergyEntry,
    /// Sign changes of the state at the collocation nodes.
    pub node_count: usize,
    pub points: Vec<DensityPoint>,
}

impl Render for DensityReport {
    fn csv(&self) -> String {
        let mut out = String::from("r,density\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", full_precision(p.r), full_precision(p.density));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub table: u8,
    pub alpha_s: f64,
    pub lambda: String,
    pub ell: u32,
    pub state: usize,
    pub quantity: String,
    pub quoted: String,
    pub computed: String,
    /// Computed value truncated to the quoted number of digits.
    pub computed_display: String,
    pub abs_diff: f64,
    /// Distance outside the truncation interval of the quoted digits.
    pub excess: f64,
    pub allowed: f64,
    /// `pass`, `FAIL` or `excluded`.
    pub status: String,
}

impl CellRow {
    fn new(o: &CellOutcome) -> Self {
        let status = if !o.gated() {
            "excluded"
        } else if o.within {
            "pass"
        } else {
            "FAIL"
        };
        Self {
            table: o.cell.table,
            alpha_s: o.cell.alpha_s,
            lambda: o.cell.lambda_text.clone(),
            ell: o.cell.ell,
            state: o.cell.state,
            quantity: o.cell.quantity.label().to_string(),
            quoted: o.cell.quoted.clone(),
            computed: full_precision(o.computed),
            computed_display: truncate_like(o.computed, &o.cell.quoted),
            abs_diff: o.abs_diff,
            excess: o.excess,
            allowed: o.allowed,
            status: status.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSummary {
    pub table: u8,
    pub gated: usize,
    pub failed: usize,
    pub excluded: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesReport {
    pub grid: GridSettings,
    pub tables: Vec<TableSummary>,
    pub cells: Vec<CellRow>,
    pub passed: bool,
}

impl TablesReport {
    pub fn from_reports(reports: &[TableReport]) -> Self {
        let tables: Vec<TableSummary> = reports
            .iter()
            .map(|r| TableSummary {
                table: r.table,
                gated: r.gated_count(),
                failed: r.failures().count(),
                excluded: r.outcomes.len() - r.gated_count(),
                passed: r.passed(),
            })
            .collect();
        Self {
            grid: reports.first().map(|r| r.settings).unwrap_or_default(),
            passed: tables.iter().all(|t| t.passed),
            tables,
            cells: reports
                .iter()
                .flat_map(|r| r.outcomes.iter().map(CellRow::new))
                .collect(),
        }
    }
}

impl Render for TablesReport {
    /// Cell rows, then `#`-prefixed summary lines.
    fn csv(&self) -> String {
        let mut out = String::from(
            "table,alpha_s,lambda,ell,state,quantity,quoted,computed,computed_display,abs_diff,excess,allowed,status\n",
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{:.3e},{:.3e},{:.3e},{}",
                c.table,
                c.alpha_s,
                c.lambda,
                c.ell,
                c.state,
                c.quantity,
                c.quoted,
                c.computed,
                c.computed_display,
                c.abs_diff,
                c.excess,
                c.allowed,
                c.status
            );
        }
        for t in &self.tables {
            let _ = writeln!(
                out,
                "# table {}: {}/{} gated cells within tolerance, {} excluded: {}",
                t.table,
                t.gated - t.failed,
                t.gated,
                t.excluded,
                if t.passed { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergePoint {
    pub grid_n: usize,
    pub r_max: f64,
    pub alpha_m: f64,
    pub energy: String,
    pub display: String,
    /// Distance from the first sweep point.
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeReport {
    pub config: RunConfig,
    pub points: Vec<ConvergePoint>,
    /// Spread `max E0 - min E0` over the sweep.
    pub max_drift: f64,
}

impl ConvergeReport {
    pub fn new(cfg: &RunConfig, points: &[(GridSettings, f64)]) -> Self {
        let reference = points.first().map_or(0.0, |p| p.1);
        let lo = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        Self {
            config: cfg.clone(),
            points: points
                .iter()
                .map(|(s, e)| ConvergePoint {
                    grid_n: s.n,
                    r_max: s.r_max,
                    alpha_m: s.alpha_m,
                    energy: full_precision(*e),
                    display: truncate_significant(*e, cfg.precision_digits),
                    drift: (e - reference).abs(),
                })
                .collect(),
            max_drift: if points.is_empty() { 0.0 } else { hi - lo },
        }
    }
}

impl Render for ConvergeReport {
    fn csv(&self) -> String {
        let mut out = String::from("grid_n,r_max,alpha_m,energy,display,drift\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.3e}",
                p.grid_n, p.r_max, p.alpha_m, p.energy, p.display, p.drift
            );
        }
        let _ = writeln!(out, "# max_drift {:.3e}", self.max_drift);
        out
    }
}
