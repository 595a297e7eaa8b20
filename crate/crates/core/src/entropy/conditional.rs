//! Solver dispatch and cross-validation for the conditional entropies.

use serde::{Deserialize, Serialize};

use super::classical::classical_b_entropy;
use super::direct_search::{direct_search, params_to_density};
use super::fixed_point::{entropy_gap, fixed_point, StationaryMap};
use super::grid::grid_oracle;
use super::hmin::hmin_barrier;
use super::order::RenyiOrder;
use super::result::{EntropyResult, SolverKind};
use super::unconditional::renyi_entropy;
use crate::distance::fidelity;
use crate::error::{invalid, Error, Result};
use crate::operator::{eig_matrix, identity_kron, CMatrix, PsdOperator};
use crate::optimize::nelder_mead;
use crate::state::{derive_seed, BipartiteState, DensityOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectSearchPolicy {
    Never,
    /// Only when the fixed point does not reach the stationarity tolerance.
    Fallback,
    Always,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub fixed_point: bool,
    pub direct_search: DirectSearchPolicy,
    /// Bloch-ball brute force; only used when `d_B = 2`.
    pub grid_oracle: bool,
    /// Use the exact formula when B carries a classical flag.
    pub closed_form: bool,
    pub max_iterations: usize,
    pub fixed_point_tol: f64,
    pub stationarity_tol: f64,
    pub agreement_tol: f64,
    pub restarts: usize,
    pub grid_resolution: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            fixed_point: true,
            direct_search: DirectSearchPolicy::Fallback,
            grid_oracle: false,
            closed_form: true,
            max_iterations: 10_000,
            fixed_point_tol: 1e-10,
            stationarity_tol: 1e-8,
            agreement_tol: 1e-4,
            restarts: 5,
            grid_resolution: 201,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn fixed_point_only() -> Self {
        Self {
            direct_search: DirectSearchPolicy::Never,
            closed_form: false,
            ..Self::default()
        }
    }

    pub fn direct_search_only() -> Self {
        Self {
            fixed_point: false,
            direct_search: DirectSearchPolicy::Always,
            closed_form: false,
            ..Self::default()
        }
    }

    pub fn grid_only() -> Self {
        Self {
            fixed_point: false,
            direct_search: DirectSearchPolicy::Never,
            grid_oracle: true,
            closed_form: false,
            ..Self::default()
        }
    }
}

fn density(m: CMatrix) -> DensityOperator {
    DensityOperator::from_matrix_unchecked(m)
}

/// Optimality residual at `eta`: for `alpha < 1` a bound in bits on the distance from the
/// supremum, otherwise the trace distance between `eta` and its stationarity image.
fn stationarity(rho: &BipartiteState, alpha: f64, eta: &CMatrix) -> Result<f64> {
    if alpha < 1.0 {
        return entropy_gap(rho, alpha, eta);
    }
    let eig = eig_matrix(eta.clone())?;
    let (_, image) = StationaryMap::new(rho, alpha).apply(&eig)?;
    let diff = image - eta;
    Ok(0.5
        * eig_matrix(diff)?
            .values
            .iter()
            .map(|l| l.abs())
            .sum::<f64>())
}

/// `H~_alpha^up(A|B)`, the supremum over `eta_B` of `-D~_alpha(rho || I ⊗ eta)`.
///
/// Runs every enabled solver, returns the best value, and certifies it by a stationarity
/// residual or by agreement between two solvers. Uncertified results come back as
/// [`Error::NotConverged`] carrying the best candidate.
pub fn conditional_entropy_up(
    rho: &BipartiteState,
    order: RenyiOrder,
    config: &SolverConfig,
) -> Result<EntropyResult> {
    if config.closed_form && rho.classical_b() {
        let (value, eta) = classical_b_entropy(rho, order.value())?;
        return Ok(EntropyResult::closed_form(value, eta));
    }
    if order.is_infinite() {
        return hmin(rho);
    }
    if rho.d_b() == 1 {
        let value = renyi_entropy(&rho.marginal_a(), order)?;
        return Ok(EntropyResult::closed_form(
            value,
            DensityOperator::maximally_mixed(1),
        ));
    }
    let alpha = order.value();
    let mut runs: Vec<EntropyResult> = Vec::new();
    let mut fp_converged = false;
    if config.fixed_point {
        let out = fixed_point(
            rho,
            alpha,
            config.max_iterations,
            config.fixed_point_tol,
            config.stationarity_tol,
        )?;
        let residual = out.gap.unwrap_or(out.residual);
        fp_converged = residual < config.stationarity_tol;
        runs.push(EntropyResult {
            value: out.q.log2() / (1.0 - alpha),
            optimizer: density(out.eta),
            solver: SolverKind::FixedPoint,
            iterations: out.iterations,
            residual,
            converged: fp_converged,
            certificate: None,
            solver_values: Vec::new(),
        });
    }
    let want_search = match config.direct_search {
        DirectSearchPolicy::Always => true,
        DirectSearchPolicy::Fallback => !fp_converged,
        DirectSearchPolicy::Never => false,
    };
    if want_search {
        let out = direct_search(rho, alpha, config.restarts, config.seed)?;
        let residual = stationarity(rho, alpha, &out.eta)?;
        runs.push(EntropyResult {
            value: out.value,
            optimizer: density(out.eta),
            solver: SolverKind::DirectSearch,
            iterations: out.iterations,
            residual,
            converged: residual < config.stationarity_tol,
            certificate: None,
            solver_values: Vec::new(),
        });
    }
    if config.grid_oracle && rho.d_b() == 2 {
        let out = grid_oracle(rho, alpha, config.grid_resolution)?;
        runs.push(EntropyResult {
            value: out.value,
            optimizer: density(out.eta),
            solver: SolverKind::GridOracle,
            iterations: out.points,
            residual: out.spacing,
            converged: false,
            certificate: None,
            solver_values: Vec::new(),
        });
    }
    if runs.is_empty() {
        return Err(invalid("no solver enabled for this state"));
    }
    let solver_values: Vec<(SolverKind, f64)> = runs.iter().map(|r| (r.solver, r.value)).collect();
    let best_idx = (0..runs.len())
        .max_by(|&a, &b| runs[a].value.total_cmp(&runs[b].value).then(b.cmp(&a)))
        .expect("nonempty");
    let mut best = runs.swap_remove(best_idx);
    let agrees = solver_values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best_idx)
        .any(|(_, &(_, v))| (v - best.value).abs() <= config.agreement_tol);
    let grid_alone = best.solver == SolverKind::GridOracle && !agrees;
    best.converged = !grid_alone && (best.converged || agrees);
    best.solver_values = solver_values;
    if best.converged {
        Ok(best)
    } else {
        Err(not_converged(best))
    }
}

fn not_converged(best: EntropyResult) -> Error {
    Error::NotConverged {
        value: best.value,
        residual: best.residual,
        best: Box::new(best),
    }
}

/// `H_min(A|B)` from the barrier SDP.
pub fn hmin(rho: &BipartiteState) -> Result<EntropyResult> {
    let out = hmin_barrier(rho)?;
    let value = out.value();
    let converged = out.converged();
    let residual = out.residual();
    let tr = out.certificate.primal;
    let result = EntropyResult {
        value,
        optimizer: density(out.x.clone() / num_complex::Complex64::new(tr, 0.0)),
        solver: SolverKind::Sdp,
        iterations: out.iterations,
        residual,
        converged,
        certificate: Some(out.certificate),
        solver_values: vec![(SolverKind::Sdp, value)],
    };
    if converged {
        Ok(result)
    } else {
        Err(not_converged(result))
    }
}

/// `H_max(A|B)`, the order-1/2 conditional entropy.
pub fn hmax(rho: &BipartiteState, config: &SolverConfig) -> Result<EntropyResult> {
    conditional_entropy_up(rho, RenyiOrder::HALF, config)
}

/// `max_sigma 2 log2 F(rho, I ⊗ sigma)` by direct search, computed through the fidelity.
pub fn hmax_fidelity_form(rho: &BipartiteState, config: &SolverConfig) -> Result<EntropyResult> {
    let (d_a, d_b) = rho.dims();
    let cost = |x: &[f64]| -> f64 {
        let sigma = params_to_density(x, d_b);
        let rhs = PsdOperator::from_matrix_unchecked(identity_kron(d_a, &sigma));
        match fidelity(rho.psd(), &rhs) {
            Ok(f) if f > 0.0 => -2.0 * f.log2(),
            _ => 1e6,
        }
    };
    let n = d_b * d_b;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0;
    for r in 0..config.restarts.max(1) {
        let x0: Vec<f64> = if r == 0 {
            let mut v = vec![0.0; n];
            v[..d_b].iter_mut().for_each(|z| *z = 1.0);
            v
        } else {
            use rand_distr::{Distribution, StandardNormal};
            let mut rng = crate::state::rng_from_seed(derive_seed(config.seed ^ 0xF1DE, r as u64));
            (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let first = nelder_mead(cost, &x0, 0.25, (2000 * n) as u64, 1e-15)?;
        let polished = nelder_mead(cost, &first.x, 0.02, (2000 * n) as u64, 1e-16)?;
        iterations += first.iterations + polished.iterations;
        if best.as_ref().is_none_or(|b| polished.value < b.0) {
            best = Some((polished.value, polished.x));
        }
    }
    let (v, x) = best.expect("at least one restart");
    let eta = params_to_density(&x, d_b);
    let residual = stationarity(rho, 0.5, &eta)?;
    Ok(EntropyResult {
        value: -v,
        optimizer: density(eta),
        solver: SolverKind::DirectSearch,
        iterations,
        residual,
        converged: residual < config.stationarity_tol,
        certificate: None,
        solver_values: vec![(SolverKind::DirectSearch, -v)],
    })
}
