//! Embedded reference tables and the comparison gate used by `tables`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::last_place_unit;
use crate::solver::{energies, states, Channel, GridSettings};

const GOLDEN_TSV: &str = include_str!("../data/golden.tsv");

/// Relative tolerance for quoted eigenvalues.
pub const ENERGY_REL_TOL: f64 = 5e-10;
/// Relative tolerance for quoted radial moments.
pub const MOMENT_REL_TOL: f64 = 5e-8;
/// Absolute tolerance against exactly known eigenvalues.
pub const EXACT_ABS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// Eigenvalue, quoted with truncated digits.
    E,
    /// `<r^-1>`.
    Rinv,
    /// `<r>`.
    R,
    /// Eigenvalue known in closed form.
    Exact,
}

impl Quantity {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "E" => Some(Self::E),
            "rinv" => Some(Self::Rinv),
            "r" => Some(Self::R),
            "exact" => Some(Self::Exact),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::E => "E",
            Self::Rinv => "<1/r>",
            Self::R => "<r>",
            Self::Exact => "E(exact)",
        }
    }

    fn needs_states(&self) -> bool {
        matches!(self, Self::Rinv | Self::R)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenCell {
    pub table: u8,
    pub alpha_s: f64,
    /// The coupling as written in the data file.
    pub lambda_text: String,
    pub lambda: f64,
    pub ell: u32,
    pub state: usize,
    pub quantity: Quantity,
    pub quoted: String,
    pub excluded: bool,
}

impl GoldenCell {
    pub fn quoted_value(&self) -> f64 {
        self.quoted.parse().expect("validated when parsed")
    }

    pub fn channel(&self) -> Channel {
        Channel::new(self.alpha_s, self.lambda, self.ell)
    }
}

/// All embedded cells, in file order.
pub fn golden_cells() -> Result<Vec<GoldenCell>> {
    parse_golden(GOLDEN_TSV)
}

pub fn table_cells(table: u8) -> Result<Vec<GoldenCell>> {
    Ok(golden_cells()?
        .into_iter()
        .filter(|c| c.table == table)
        .collect())
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenCell>> {
    let mut cells = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::GoldenData { line, message };
        let f: Vec<&str> = raw.split('\t').collect();
        if f.len() != 8 {
            return Err(bad(format!(
                "expected 8 tab-separated fields, found {}",
                f.len()
            )));
        }
        let num = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(format!("{what} {s:?}: {e}")))
        };
        let table = f[0]
            .parse::<u8>()
            .map_err(|e| bad(format!("table {:?}: {e}", f[0])))?;
        let alpha_s = num(f[1], "alpha_s")?;
        let lambda = eval_expr(f[2]).map_err(|m| bad(format!("lambda {:?}: {m}", f[2])))?;
        let ell = f[3]
            .parse()
            .map_err(|e| bad(format!("ell {:?}: {e}", f[3])))?;
        let state = f[4]
            .parse()
            .map_err(|e| bad(format!("state {:?}: {e}", f[4])))?;
        let quantity =
            Quantity::parse(f[5]).ok_or_else(|| bad(format!("unknown quantity {:?}", f[5])))?;
        num(f[6], "quoted value")?;
        let excluded = match f[7] {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("exclude flag must be 0 or 1, got {other:?}"))),
        };
        cells.push(GoldenCell {
            table,
            alpha_s,
            lambda_text: f[2].to_string(),
            lambda,
            ell,
            state,
            quantity,
            quoted: f[6].to_string(),
            excluded,
        });
    }
    Ok(cells)
}

/// Evaluates `+ - * /`, parentheses, `sqrt(...)` and decimal literals.
pub fn eval_expr(src: &str) -> std::result::Result<f64, String> {
    let mut p = ExprParser {
        s: src.as_bytes(),
        pos: 0,
    };
    let v = p.sum()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(format!("unexpected trailing input at byte {}", p.pos));
    }
    Ok(v)
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            v = if op == b'+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            v = if op == b'*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self
                    .s
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_digit() || matches!(c, b'.' | b'e' | b'E'))
                {
                    // allow a sign directly after an exponent marker
                    if matches!(self.s[self.pos], b'e' | b'E')
                        && matches!(self.s.get(self.pos + 1), Some(b'+' | b'-'))
                    {
                        self.pos += 1;
                    }
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                text.parse()
                    .map_err(|e| format!("bad number {text:?}: {e}"))
            }
            Some(_) if self.s[self.pos..].starts_with(b"sqrt") => {
                self.pos += 4;
                self.expect(b'(')?;
                let v = self.sum()?;
                self.expect(b')')?;
                Ok(v.sqrt())
            }
            Some(c) => Err(format!("unexpected {:?} at byte {}", c as char, self.pos)),
            None => Err("unexpected end of input".to_string()),
        }
    }

    fn expect(&mut self, c: u8) -> std::result::Result<(), String> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected {:?} at byte {}", c as char, self.pos))
        }
    }
}

/// How far `computed` falls outside the interval of values that print as
/// `quoted` under truncation toward zero, `|t| <= |x| < |t| + unit`.
/// Zero when the truncated digits agree exactly.
pub fn truncation_excess(computed: f64, quoted: f64, unit: f64) -> f64 {
    if quoted != 0.0 && computed != 0.0 && quoted.signum() != computed.signum() {
        return (computed - quoted).abs();
    }
    let (c, t) = (computed.abs(), quoted.abs());
    (c - (t + unit)).max(t - c).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    pub cell: GoldenCell,
    pub computed: f64,
    /// `|computed - quoted|`.
    pub abs_diff: f64,
    /// Distance outside the truncation interval (absolute difference for exact cells).
    pub excess: f64,
    /// Allowed excess for this cell.
    pub allowed: f64,
    pub within: bool,
}

impl CellOutcome {
    fn new(cell: GoldenCell, computed: f64) -> Self {
        let quoted = cell.quoted_value();
        let abs_diff = (computed - quoted).abs();
        let (excess, allowed) = match cell.quantity {
            Quantity::Exact => (abs_diff, EXACT_ABS_TOL),
            Quantity::E => (
                truncation_excess(computed, quoted, last_place_unit(&cell.quoted)),
                ENERGY_REL_TOL * quoted.abs(),
            ),
            Quantity::R | Quantity::Rinv => (
                truncation_excess(computed, quoted, last_place_unit(&cell.quoted)),
                MOMENT_REL_TOL * quoted.abs(),
            ),
        };
        Self {
            cell,
            computed,
            abs_diff,
            excess,
            allowed,
            within: excess <= allowed,
        }
    }

    /// Counts toward pass/fail.
    pub fn gated(&self) -> bool {
        !self.cell.excluded
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: u8,
    pub settings: GridSettings,
    pub outcomes: Vec<CellOutcome>,
}

impl TableReport {
    pub fn gated_count(&self) -> usize {
        self.outcomes.iter().filter(|o| o.gated()).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellOutcome> {
        self.outcomes.iter().filter(|o| o.gated() && !o.within)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Key grouping cells that share one Hamiltonian.
fn channel_key(c: &GoldenCell) -> (u64, u64, u32) {
    (c.alpha_s.to_bits(), c.lambda.to_bits(), c.ell)
}

/// Recomputes the given cells; channels are solved in parallel and the
/// output keeps the input order.
pub fn evaluate_cells(cells: &[GoldenCell], settings: &GridSettings) -> Result<Vec<CellOutcome>> {
    let disc = settings.discretization()?;
    let mut groups: BTreeMap<(u64, u64, u32), (Channel, usize, bool)> = BTreeMap::new();
    for c in cells {
        let entry = groups
            .entry(channel_key(c))
            .or_insert((c.channel(), 0, false));
        entry.1 = entry.1.max(c.state + 1);
        entry.2 |= c.quantity.needs_states();
    }
    let solved: Vec<((u64, u64, u32), ChannelValues)> = groups
        .into_par_iter()
        .map(|(key, (channel, k, need_states))| {
            let values = if need_states {
                let st = states(&channel, &disc, k)?;
                ChannelValues {
                    energies: st.iter().map(|s| s.energy()).collect(),
                    rinv: st.iter().map(|s| s.expectation_r_power(-1)).collect(),
                    r: st.iter().map(|s| s.expectation_r_power(1)).collect(),
                }
            } else {
                ChannelValues {
                    energies: energies(&channel, &disc, k)?,
                    rinv: Vec::new(),
                    r: Vec::new(),
                }
            };
            Ok((key, values))
        })
        .collect::<Result<_>>()?;
    let solved: BTreeMap<_, _> = solved.into_iter().collect();

    Ok(cells
        .iter()
        .map(|c| {
            let v = &solved[&channel_key(c)];
            let computed = match c.quantity {
                Quantity::E | Quantity::Exact => v.energies[c.state],
                Quantity::Rinv => v.rinv[c.state],
                Quantity::R => v.r[c.state],
            };
            CellOutcome::new(c.clone(), computed)
        })
        .collect())
}

struct ChannelValues {
    energies: Vec<f64>,
    rinv: Vec<f64>,
    r: Vec<f64>,
}

pub fn evaluate_table(table: u8, settings: &GridSettings) -> Result<TableReport> {
    if !(1..=7).contains(&table) {
        return Err(Error::InvalidParameter(format!(
            "tables are numbered 1 to 7, got {table}"
        )));
    }
    let cells = table_cells(table)?;
    Ok(TableReport {
        table,
        settings: *settings,
        outcomes: evaluate_cells(&cells, settings)?,
    })
}
