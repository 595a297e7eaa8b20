//! Local search for state pairs that come close to saturating a continuity bound.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::Check;
use super::record::{Cell, SampleRecord, Status};
use super::suites::{solve, Solved};
use crate::bounds::{bound_high, bound_jabbour_datta, bound_low, bound_low_classical};
use crate::distance::trace_distance;
use crate::entropy::direct_search::params_to_density;
use crate::entropy::{RenyiOrder, SolverConfig};
use crate::error::{invalid, Result};
use crate::operator::CMatrix;
use crate::optimize::nelder_mead;
use crate::state::{derive_seed, rng_from_seed, BipartiteState, DensityOperator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub dims: (usize, usize),
    pub order: RenyiOrder,
    pub epsilon: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Search over states diagonal in the product basis and score the classical bound.
    pub classical: bool,
    /// Nelder–Mead iterations per restart.
    pub max_iterations: u64,
    pub solver: SolverConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            dims: (2, 2),
            order: RenyiOrder::new(0.95).expect("valid order"),
            epsilon: 0.1,
            restarts: 3,
            seed: 0,
            classical: false,
            max_iterations: 400,
            solver: SolverConfig::default(),
        }
    }
}

/// Best pair found; `ratio = |H_sigma - H_rho| / bound` at the realized distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub record: SampleRecord,
    /// `None` when the bound vanishes, e.g. at `epsilon = 0`.
    pub ratio: Option<f64>,
    /// Same difference over the Jabbour–Datta bound, for classical probes.
    pub jabbour_datta_ratio: Option<f64>,
    pub evaluations: usize,
}

struct Evaluated {
    rho: Solved,
    sigma: Solved,
    realized: f64,
    bound: f64,
}

impl Evaluated {
    fn ratio(&self) -> Option<f64> {
        if !(self.rho.converged && self.sigma.converged) || self.bound <= 0.0 {
            return None;
        }
        Some((self.sigma.value - self.rho.value).abs() / self.bound)
    }
}

struct Probe<'a> {
    config: &'a ProbeConfig,
    n: usize,
}

impl Probe<'_> {
    fn width(&self) -> usize {
        if self.config.classical {
            self.n
        } else {
            self.n * self.n
        }
    }

    fn state(&self, x: &[f64]) -> Result<BipartiteState> {
        let (d_a, d_b) = self.config.dims;
        let m = if self.config.classical {
            let w: Vec<f64> = x.iter().map(|v| v * v + 1e-300).collect();
            let total: f64 = w.iter().sum();
            let mut m = CMatrix::zeros(self.n, self.n);
            for (i, v) in w.iter().enumerate() {
                m[(i, i)] = Complex64::new(v / total, 0.0);
            }
            m
        } else {
            params_to_density(x, self.n)
        };
        let c = self.config.classical;
        BipartiteState::with_flags(DensityOperator::from_matrix_unchecked(m), d_a, d_b, c, c)
    }

    fn bound(&self, eps: f64) -> Result<f64> {
        let (d_a, order) = (self.config.dims.0, self.config.order);
        if self.config.classical {
            bound_low_classical(eps, d_a, order)
        } else if order.below_one() {
            bound_low(eps, d_a, order)
        } else {
            bound_high(eps, d_a, order)
        }
    }

    fn pair(&self, x: &[f64]) -> Result<(BipartiteState, BipartiteState, f64)> {
        let w = self.width();
        let rho = self.state(&x[..w])?;
        let tau = self.state(&x[w..])?;
        let dist = trace_distance(rho.density().hermitian(), tau.density().hermitian())?;
        let t = if dist > 0.0 {
            (self.config.epsilon / dist).min(1.0)
        } else {
            0.0
        };
        let sigma = rho.density().mix(tau.density(), t)?;
        let c = self.config.classical;
        let sigma = BipartiteState::with_flags(sigma, rho.d_a(), rho.d_b(), c, c)?;
        Ok((rho, sigma, (t * dist).min(1.0)))
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluated> {
        let (rho, sigma, realized) = self.pair(x)?;
        let solver = &self.config.solver;
        Ok(Evaluated {
            rho: solve(&rho, self.config.order, solver),
            sigma: solve(&sigma, self.config.order, solver),
            realized,
            bound: self.bound(realized)?,
        })
    }
}

/// Maximizes `|H_sigma - H_rho| / bound` over `rho` and the mixing direction by
/// Nelder–Mead from `restarts` seeded starting points. Reporting only: a ratio above 1
/// would point at a solver problem, not a proof.
pub fn run_extremal_probe(config: &ProbeConfig) -> Result<ProbeOutcome> {
    let (d_a, d_b) = config.dims;
    if d_a == 0 || d_b == 0 || d_a * d_b > 64 {
        return Err(invalid(
            "probe dimensions must be positive with d_A * d_B <= 64",
        ));
    }
    if !(0.0..=1.0).contains(&config.epsilon) {
        return Err(invalid(format!(
            "epsilon must lie in [0, 1], got {}",
            config.epsilon
        )));
    }
    if config.restarts == 0 {
        return Err(invalid("restarts must be at least 1"));
    }
    if config.classical && !config.order.below_one() {
        return Err(invalid("the classical probe needs alpha < 1"));
    }
    let check = if config.classical {
        Check::Thm1Classical
    } else if config.order.below_one() {
        Check::Thm1
    } else {
        Check::Cor1
    };
    let cell = Cell {
        index: 0,
        check,
        d_a,
        d_b,
        order: Some(config.order),
        epsilon: Some(config.epsilon),
        channel: None,
        exponent: None,
        seed: config.seed,
    };
    let mut record = SampleRecord::blank(&cell, 0, config.seed);
    if config.epsilon == 0.0 {
        record.status = Status::Pass;
        record.note = Some("ratio undefined at epsilon = 0".into());
        return Ok(ProbeOutcome {
            record,
            ratio: None,
            jabbour_datta_ratio: None,
            evaluations: 0,
        });
    }

    let probe = Probe {
        config,
        n: d_a * d_b,
    };
    let width = 2 * probe.width();
    let objective = |x: &[f64]| match probe.evaluate(x) {
        Ok(ev) => -ev.ratio().unwrap_or(0.0),
        Err(_) => 0.0,
    };
    let mut best: Option<(f64, Vec<f64>, u64)> = None;
    let mut evaluations = 0;
    for r in 0..config.restarts {
        let seed = derive_seed(config.seed, r as u64);
        let mut rng = rng_from_seed(seed);
        let x0: Vec<f64> = (0..width).map(|_| rng.sample(StandardNormal)).collect();
        let min = nelder_mead(objective, &x0, 0.3, config.max_iterations, 1e-10)?;
        evaluations += min.iterations;
        if best.as_ref().is_none_or(|(v, _, _)| min.value < *v) {
            best = Some((min.value, min.x, seed));
        }
    }
    let (_, x, seed) = best.expect("at least one restart");
    let ev = probe.evaluate(&x)?;
    let ratio = ev.ratio();
    record.seed = seed;
    record.realized_epsilon = Some(ev.realized);
    record.value_rho = ev.rho.value;
    record.value_sigma = ev.sigma.value;
    record.observed = (ev.sigma.value - ev.rho.value).abs();
    record.bound = ev.bound;
    record.margin = ev.bound - record.observed;
    record.status = Status::judge(record.margin, 1e-6, ev.rho.converged && ev.sigma.converged);
    record.h_rho = ev.rho.summary;
    record.h_sigma = ev.sigma.summary;
    let jabbour_datta_ratio = if config.classical {
        let jd = bound_jabbour_datta(ev.realized, d_a, config.order)?;
        record.jabbour_datta = Some(jd);
        record.jabbour_datta_in_range = Some(d_a > 1 && ev.realized <= 1.0 - 1.0 / d_a as f64);
        (jd > 0.0).then(|| record.observed / jd)
    } else {
        None
    };
    Ok(ProbeOutcome {
        record,
        ratio,
        jabbour_datta_ratio,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_epsilon_is_a_sentinel() {
        let out = run_extremal_probe(&ProbeConfig {
            epsilon: 0.0,
            ..ProbeConfig::default()
        })
        .unwrap();
        assert_eq!(out.ratio, None);
        assert_eq!(out.evaluations, 0);
    }

    #[test]
    fn quantum_probe_ratio_is_within_bound() {
        let config = ProbeConfig {
            restarts: 1,
            max_iterations: 60,
            ..ProbeConfig::default()
        };
        let out = run_extremal_probe(&config).unwrap();
        let ratio = out.ratio.unwrap();
        assert!(ratio > 0.0 && ratio <= 1.0 + 1e-6, "{ratio}");
        assert!(out.record.realized_epsilon.unwrap() <= 0.1 + 1e-12);
    }

    #[test]
    fn classical_probe_reports_both_ratios() {
        let config = ProbeConfig {
            order: RenyiOrder::HALF,
            classical: true,
            restarts: 2,
            max_iterations: 150,
            ..ProbeConfig::default()
        };
        let out = run_extremal_probe(&config).unwrap();
        assert!(out.ratio.unwrap() <= 1.0 + 1e-9);
        assert!(out.jabbour_datta_ratio.unwrap() <= 1.0 + 1e-9);
        let rerun = run_extremal_probe(&config).unwrap();
        assert_eq!(out, rerun);
    }
}
