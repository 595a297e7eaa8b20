//! Derivative-free search over `eta = L L^† / tr(L L^†)` with `L` lower triangular.

use nalgebra::Cholesky;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::divergence::{kernel_weight, trace_power};
use crate::error::Result;
use crate::operator::{eig_matrix, sandwich_b, CMatrix, ZERO};
use crate::optimize::nelder_mead;
use crate::state::{derive_seed, rng_from_seed, BipartiteState};

/// Stand-in objective for infeasible points, kept finite so the simplex statistics stay defined.
const PENALTY: f64 = 1e6;

#[derive(Clone, Debug)]
pub(crate) struct SearchOutcome {
    pub value: f64,
    pub eta: CMatrix,
    pub iterations: usize,
}

/// `H` as a function of `eta`: `(1/(1-alpha)) log2 tr((eta^{-a'/2} rho eta^{-a'/2})^alpha)`.
pub(crate) struct Objective<'a> {
    rho: &'a BipartiteState,
    rho_b: CMatrix,
    alpha: f64,
}

impl<'a> Objective<'a> {
    pub fn new(rho: &'a BipartiteState, alpha: f64) -> Self {
        Self {
            rho,
            rho_b: rho.marginal_b().matrix().clone(),
            alpha,
        }
    }

    pub fn at(&self, eta: &CMatrix) -> Result<f64> {
        let alpha = self.alpha;
        let eig = eig_matrix(eta.clone())?;
        if alpha > 1.0 && kernel_weight(&self.rho_b, &eig) > super::divergence::KERNEL_TOL {
            return Ok(f64::NEG_INFINITY);
        }
        let gamma = -(alpha - 1.0) / alpha / 2.0;
        let k = eig.apply_on_support(|l| l.powf(gamma));
        let omega = sandwich_b(self.rho.matrix(), &k, self.rho.d_a());
        let q = trace_power(omega, alpha)?;
        if q <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(q.log2() / (1.0 - alpha))
    }
}

pub(crate) fn params_to_density(x: &[f64], d: usize) -> CMatrix {
    let l = lower_from_params(x, d);
    let mut eta = &l * l.adjoint();
    let tr: f64 = (0..d).map(|i| eta[(i, i)].re).sum();
    if tr > 0.0 {
        eta /= Complex64::new(tr, 0.0);
    }
    eta
}

fn lower_from_params(x: &[f64], d: usize) -> CMatrix {
    let mut l = CMatrix::from_element(d, d, ZERO);
    let mut k = d;
    for i in 0..d {
        l[(i, i)] = Complex64::new(x[i], 0.0);
        for j in 0..i {
            l[(i, j)] = Complex64::new(x[k], x[k + 1]);
            k += 2;
        }
    }
    l
}

fn params_from_lower(l: &CMatrix) -> Vec<f64> {
    let d = l.nrows();
    let mut x: Vec<f64> = (0..d).map(|i| l[(i, i)].re).collect();
    for i in 0..d {
        for j in 0..i {
            x.push(l[(i, j)].re);
            x.push(l[(i, j)].im);
        }
    }
    x
}

/// Cholesky factor of `m + 1e-3 I`, rescaled to unit Frobenius norm.
fn start_from(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let reg = m + CMatrix::identity(d, d) * Complex64::new(1e-3, 0.0);
    match Cholesky::new(reg) {
        Some(c) => {
            let l = c.l();
            let norm = l.norm();
            params_from_lower(&(l / Complex64::new(norm, 0.0)))
        }
        None => params_from_lower(&CMatrix::identity(d, d)),
    }
}

/// Maximizes `H` over `eta` with `restarts` Nelder–Mead runs; restart 0 starts at `rho_B`.
pub(crate) fn direct_search(
    rho: &BipartiteState,
    alpha: f64,
    restarts: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    let d = rho.d_b();
    let n = d * d;
    let objective = Objective::new(rho, alpha);
    let cost = |x: &[f64]| -> f64 {
        let eta = params_to_density(x, d);
        match objective.at(&eta) {
            Ok(h) if h.is_finite() => -h,
            _ => PENALTY,
        }
    };
    let max_iters = (2000 * n) as u64;
    let mut best: Option<SearchOutcome> = None;
    let mut total_iters = 0;
    for r in 0..restarts.max(1) {
        let x0 = if r == 0 {
            start_from(rho.marginal_b().matrix())
        } else {
            let mut rng = rng_from_seed(derive_seed(seed, r as u64));
            (0..n)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect::<Vec<f64>>()
        };
        let first = nelder_mead(cost, &x0, 0.25, max_iters, 1e-15)?;
        let polished = nelder_mead(cost, &first.x, 0.02, max_iters, 1e-16)?;
        total_iters += first.iterations + polished.iterations;
        let (x, v) = if polished.value <= first.value {
            (polished.x, polished.value)
        } else {
            (first.x, first.value)
        };
        if v >= PENALTY {
            continue;
        }
        if best.as_ref().is_none_or(|b| -v > b.value) {
            best = Some(SearchOutcome {
                value: -v,
                eta: params_to_density(&x, d),
                iterations: 0,
            });
        }
    }
    let mut out = best.ok_or(crate::error::Error::Numerical {
        iterations: total_iters,
        message: "direct search found no feasible eta".into(),
    })?;
    out.iterations = total_iters;
    Ok(out)
}
