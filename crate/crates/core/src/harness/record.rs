use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{CampaignConfig, Check};
use crate::channel::ChannelFamily;
use crate::entropy::{EntropySummary, RenyiOrder};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Violation,
    SolverUncertain,
}

impl Status {
    /// Violation iff converged and `margin < -tolerance`; uncertain whenever unconverged.
    pub fn judge(margin: f64, tolerance: f64, converged: bool) -> Self {
        if !converged || margin.is_nan() {
            Status::SolverUncertain
        } else if margin < -tolerance {
            Status::Violation
        } else {
            Status::Pass
        }
    }
}

/// One grid point of a campaign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub check: Check,
    pub d_a: usize,
    pub d_b: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<RenyiOrder>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelFamily>,
    /// McCarthy exponent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    pub seed: u64,
}

/// Outcome of one sampled inequality instance.
///
/// `margin` is the slack of the inequality: positive when it holds. For the continuity
/// bounds `observed = |H_sigma - H_rho|` and `margin = bound - observed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub cell: usize,
    pub sample: usize,
    pub check: Check,
    pub seed: u64,
    pub d_a: usize,
    pub d_b: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<RenyiOrder>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realized_epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_rho: Option<EntropySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_sigma: Option<EntropySummary>,
    /// Left-hand quantity: entropy, divergence or trace power of the first input.
    pub value_rho: f64,
    pub value_sigma: f64,
    pub observed: f64,
    pub bound: f64,
    pub margin: f64,
    pub status: Status,
    /// `bound_low` at the same inputs, on classical records.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub general_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jabbour_datta: Option<f64>,
    /// Whether the Jabbour–Datta formula is monotone at the realized distance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jabbour_datta_in_range: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SampleRecord {
    pub(crate) fn blank(cell: &Cell, sample: usize, seed: u64) -> Self {
        Self {
            cell: cell.index,
            sample,
            check: cell.check,
            seed,
            d_a: cell.d_a,
            d_b: cell.d_b,
            order: cell.order,
            epsilon: cell.epsilon,
            realized_epsilon: None,
            h_rho: None,
            h_sigma: None,
            value_rho: f64::NAN,
            value_sigma: f64::NAN,
            observed: f64::NAN,
            bound: f64::NAN,
            margin: f64::NAN,
            status: Status::SolverUncertain,
            general_bound: None,
            jabbour_datta: None,
            jabbour_datta_in_range: None,
            note: None,
        }
    }

    pub fn converged(&self) -> bool {
        self.status != Status::SolverUncertain
    }

    /// Jabbour–Datta failed to bound a converged record inside its monotone range.
    pub fn jabbour_datta_violated(&self, tolerance: f64) -> bool {
        match (self.jabbour_datta, self.jabbour_datta_in_range) {
            (Some(jd), Some(true)) => self.converged() && jd - self.observed < -tolerance,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    #[serde(flatten)]
    pub cell: Cell,
    pub samples: usize,
    pub violations: usize,
    pub uncertain: usize,
    /// Smallest margin among converged records.
    pub min_margin: Option<f64>,
    pub max_observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jabbour_datta_violations: Option<usize>,
    /// Which classical bound is smaller at the requested distance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tighter: Option<String>,
    /// Duality records with residual at most `duality_tolerance`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_tolerance: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub records: usize,
    pub violations: usize,
    pub uncertain: usize,
    pub uncertain_rate: f64,
}

/// Overall verdict, ordered by severity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    SolverUncertain,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema: u32,
    pub kind: String,
    pub config: CampaignConfig,
    pub totals: Totals,
    pub verdict: Verdict,
    pub failures: Vec<String>,
    pub cells: Vec<CellSummary>,
    pub records: Vec<SampleRecord>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    cell: usize,
    sample: usize,
    check: Check,
    seed: u64,
    d_a: usize,
    d_b: usize,
    order: Option<String>,
    epsilon: Option<f64>,
    realized_epsilon: Option<f64>,
    h_rho: f64,
    h_sigma: f64,
    observed: f64,
    bound: f64,
    margin: f64,
    status: Status,
    note: Option<&'a str>,
}

impl CampaignReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(CsvRow {
                cell: r.cell,
                sample: r.sample,
                check: r.check,
                seed: r.seed,
                d_a: r.d_a,
                d_b: r.d_b,
                order: r.order.map(|o| o.to_string()),
                epsilon: r.epsilon,
                realized_epsilon: r.realized_epsilon,
                h_rho: r.value_rho,
                h_sigma: r.value_sigma,
                observed: r.observed,
                bound: r.bound,
                margin: r.margin,
                status: r.status,
                note: r.note.as_deref(),
            })?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<stem>.json` and `<stem>.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{stem}.json")), self.to_json()?)?;
        fs::write(dir.join(format!("{stem}.csv")), self.to_csv()?)?;
        Ok(())
    }
}

pub(crate) fn summarize(
    kind: &str,
    config: &CampaignConfig,
    cells: &[Cell],
    records: Vec<SampleRecord>,
    tighter: impl Fn(&Cell) -> Option<String>,
) -> CampaignReport {
    let mut summaries: Vec<CellSummary> = cells
        .iter()
        .map(|c| CellSummary {
            cell: *c,
            samples: 0,
            violations: 0,
            uncertain: 0,
            min_margin: None,
            max_observed: None,
            jabbour_datta_violations: None,
            tighter: tighter(c),
            within_tolerance: None,
            flags: cell_flags(c),
        })
        .collect();
    let compare_jd = config.checks.contains(&Check::JabbourCompare);
    for r in &records {
        let s = &mut summaries[r.cell];
        s.samples += 1;
        match r.status {
            Status::Violation => s.violations += 1,
            Status::SolverUncertain => {
                s.uncertain += 1;
                continue;
            }
            Status::Pass => {}
        }
        s.min_margin = Some(s.min_margin.map_or(r.margin, |m| m.min(r.margin)));
        s.max_observed = Some(s.max_observed.map_or(r.observed, |m| m.max(r.observed)));
        if compare_jd && r.jabbour_datta.is_some() {
            let add = usize::from(r.jabbour_datta_violated(config.violation_tolerance));
            s.jabbour_datta_violations = Some(s.jabbour_datta_violations.unwrap_or(0) + add);
        }
        if r.check == Check::Duality {
            let add = usize::from(r.observed <= config.duality_tolerance);
            s.within_tolerance = Some(s.within_tolerance.unwrap_or(0) + add);
        }
    }

    let total = records.len();
    let violations: usize = summaries.iter().map(|s| s.violations).sum();
    let uncertain: usize = summaries.iter().map(|s| s.uncertain).sum();
    let uncertain_rate = if total == 0 {
        0.0
    } else {
        uncertain as f64 / total as f64
    };
    let mut failures = Vec::new();
    let mut verdict = Verdict::Pass;
    if violations > 0 {
        failures.push(format!("{violations} records violate their inequality"));
        verdict = Verdict::Violation;
    }
    let jd: usize = summaries
        .iter()
        .filter_map(|s| s.jabbour_datta_violations)
        .sum();
    if jd > 0 {
        failures.push(format!(
            "{jd} records exceed the Jabbour–Datta bound inside its range"
        ));
        verdict = Verdict::Violation;
    }
    let duality: Vec<&SampleRecord> = records
        .iter()
        .filter(|r| r.check == Check::Duality && r.converged())
        .collect();
    if !duality.is_empty() {
        let within = duality
            .iter()
            .filter(|r| r.observed <= config.duality_tolerance)
            .count();
        let frac = within as f64 / duality.len() as f64;
        if frac < config.duality_quantile {
            failures.push(format!(
                "only {within} of {} duality residuals are within {:e}",
                duality.len(),
                config.duality_tolerance
            ));
            verdict = Verdict::Violation;
        }
    }
    if uncertain_rate > config.uncertain_cap {
        failures.push(format!(
            "{uncertain} of {total} records are solver-uncertain, above the {} cap",
            config.uncertain_cap
        ));
        verdict = verdict.max(Verdict::SolverUncertain);
    }
    CampaignReport {
        schema: SCHEMA_VERSION,
        kind: kind.to_string(),
        config: config.clone(),
        totals: Totals {
            records: total,
            violations,
            uncertain,
            uncertain_rate,
        },
        verdict,
        failures,
        cells: summaries,
        records,
    }
}

fn cell_flags(c: &Cell) -> Vec<String> {
    let mut flags = Vec::new();
    if let Some(e) = c.epsilon {
        if c.check == Check::Cor1 && crate::bounds::bound_high_beyond_unit(e) {
            flags.push("sqrt(2 eps) >= 1: outside the proven range".to_string());
        }
        if c.check.is_classical() && c.d_a > 1 && e > 1.0 - 1.0 / c.d_a as f64 {
            flags.push("eps > 1 - 1/d_A: Jabbour–Datta formula not monotone here".to_string());
        }
        if c.check.is_classical() && c.d_a == 1 {
            flags.push("d_A = 1: Jabbour–Datta defined as 0".to_string());
        }
    }
    flags
}
