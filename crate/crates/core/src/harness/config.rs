use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelFamily;
use crate::entropy::{RenyiOrder, SolverConfig};
use crate::error::{invalid, Error, Result};
use crate::state::{Ensemble, PerturbationMode};

/// One family of inequalities a campaign can verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    /// General `alpha < 1` continuity bound.
    Thm1,
    /// Classical-A strengthening of the `alpha < 1` bound.
    Thm1Classical,
    /// `alpha > 1` bound through the dual order.
    Cor1,
    /// `log2(1 + eps d_A^2)` for the min-entropy.
    Thm3Hmin,
    Duality,
    Dpi,
    Mccarthy,
    /// The earlier classical bound, evaluated next to [`Check::Thm1Classical`].
    JabbourCompare,
    Leditzky,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Thm1,
        Check::Thm1Classical,
        Check::Cor1,
        Check::Thm3Hmin,
        Check::Duality,
        Check::Dpi,
        Check::Mccarthy,
        Check::JabbourCompare,
        Check::Leditzky,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Thm1 => "thm1",
            Check::Thm1Classical => "thm1-classical",
            Check::Cor1 => "cor1",
            Check::Thm3Hmin => "thm3-hmin",
            Check::Duality => "duality",
            Check::Dpi => "dpi",
            Check::Mccarthy => "mccarthy",
            Check::JabbourCompare => "jabbour-compare",
            Check::Leditzky => "leditzky",
        }
    }

    pub fn is_classical(self) -> bool {
        matches!(self, Check::Thm1Classical | Check::JabbourCompare)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                invalid(format!(
                    "unknown check '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

impl Serialize for Check {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Check {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything a campaign needs; deserializes from JSON with every field optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub dims: Vec<(usize, usize)>,
    pub orders: Vec<RenyiOrder>,
    pub epsilons: Vec<f64>,
    pub samples_per_cell: usize,
    pub ensemble: Ensemble,
    pub perturbation: PerturbationMode,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Slack allowed on the continuity bounds before a record counts as a violation.
    pub violation_tolerance: f64,
    pub dpi_tolerance: f64,
    pub mccarthy_tolerance: f64,
    /// Tolerance for the McCarthy cases that hold with equality.
    pub equality_tolerance: f64,
    /// Duality residual expected on `duality_quantile` of the converged records.
    pub duality_tolerance: f64,
    pub duality_quantile: f64,
    /// Duality residual no converged record may exceed.
    pub duality_worst_tolerance: f64,
    /// Largest tolerated fraction of solver-uncertain records.
    pub uncertain_cap: f64,
    pub mccarthy_exponents: Vec<f64>,
    pub channels: Vec<ChannelFamily>,
    pub solver: SolverConfig,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
}

pub const DEFAULT_DIMS: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (2, 4)];
pub const DEFAULT_LOW_ORDERS: [f64; 5] = [0.5, 0.6, 0.75, 0.9, 0.99];
pub const DEFAULT_HIGH_ORDERS: [f64; 5] = [1.01, 1.5, 2.0, 5.0, f64::INFINITY];
pub const DEFAULT_EPSILONS: [f64; 6] = [0.01, 0.05, 0.1, 0.25, 0.5, 0.9];

fn orders(values: &[f64]) -> Vec<RenyiOrder> {
    values
        .iter()
        .map(|&a| RenyiOrder::new(a).expect("valid order"))
        .collect()
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let mut all = orders(&DEFAULT_LOW_ORDERS);
        all.extend(orders(&DEFAULT_HIGH_ORDERS));
        Self {
            dims: DEFAULT_DIMS.to_vec(),
            orders: all,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            samples_per_cell: 200,
            ensemble: Ensemble::HilbertSchmidt,
            perturbation: PerturbationMode::Mixing,
            seed: 0,
            checks: vec![Check::Thm1, Check::Cor1, Check::Thm3Hmin],
            violation_tolerance: 1e-6,
            dpi_tolerance: 1e-7,
            mccarthy_tolerance: 1e-8,
            equality_tolerance: 1e-10,
            duality_tolerance: 1e-5,
            duality_quantile: 0.99,
            duality_worst_tolerance: 1e-4,
            uncertain_cap: 0.02,
            mccarthy_exponents: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            channels: ChannelFamily::ALL.to_vec(),
            solver: SolverConfig::default(),
            jobs: 1,
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Orders at which `check` is defined.
    pub fn orders_for(&self, check: Check) -> Vec<RenyiOrder> {
        match check {
            Check::Thm1 | Check::Thm1Classical | Check::JabbourCompare | Check::Leditzky => self
                .orders
                .iter()
                .copied()
                .filter(|o| o.below_one())
                .collect(),
            Check::Cor1 => self
                .orders
                .iter()
                .copied()
                .filter(|o| !o.below_one())
                .collect(),
            Check::Duality | Check::Dpi => self.orders.clone(),
            Check::Thm3Hmin | Check::Mccarthy => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.orders.is_empty() || self.epsilons.is_empty() {
            return Err(invalid("dims, orders and epsilons must all be nonempty"));
        }
        if self.checks.is_empty() {
            return Err(invalid("the check set must be nonempty"));
        }
        if self.samples_per_cell == 0 {
            return Err(invalid("samples_per_cell must be at least 1"));
        }
        if self.jobs == 0 {
            return Err(invalid("jobs must be at least 1"));
        }
        for &(a, b) in &self.dims {
            if a == 0 || b == 0 || a * b > 64 {
                return Err(invalid(format!(
                    "dims ({a}, {b}) must be positive with d_A * d_B <= 64"
                )));
            }
        }
        for &e in &self.epsilons {
            if !(0.0..=1.0).contains(&e) {
                return Err(invalid(format!("epsilon {e} outside [0, 1]")));
            }
        }
        if let Some(&x) = self
            .mccarthy_exponents
            .iter()
            .find(|x| !(0.0..=1.0).contains(*x))
        {
            return Err(invalid(format!("McCarthy exponent {x} outside [0, 1]")));
        }
        let tols = [
            self.violation_tolerance,
            self.dpi_tolerance,
            self.mccarthy_tolerance,
            self.equality_tolerance,
            self.duality_tolerance,
            self.duality_worst_tolerance,
        ];
        if tols.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(invalid("tolerances must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.uncertain_cap)
            || !(0.0..=1.0).contains(&self.duality_quantile)
        {
            return Err(invalid(
                "uncertain_cap and duality_quantile must lie in [0, 1]",
            ));
        }
        for &check in &self.checks {
            let empty = match check {
                Check::Mccarthy => self.mccarthy_exponents.is_empty(),
                Check::Dpi => self.channels.is_empty() || self.orders_for(check).is_empty(),
                Check::Thm3Hmin => false,
                _ => self.orders_for(check).is_empty(),
            };
            if empty {
                return Err(invalid(format!(
                    "check {check} has no applicable orders or parameters"
                )));
            }
        }
        Ok(())
    }
}
