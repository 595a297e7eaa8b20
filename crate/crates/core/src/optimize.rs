//! Thin wrappers over argmin's Nelder–Mead and L-BFGS for closures.

use argmin::core::{CostFunction, Error as ArgminError, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::neldermead::NelderMead;
use argmin::solver::quasinewton::LBFGS;

use crate::error::{Error, Result};

struct Closure<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Closure<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, ArgminError> {
        Ok((self.0)(x))
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` from an axis-aligned simplex of size `step` around `x0`.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iters: u64,
    sd_tolerance: f64,
) -> Result<Minimum> {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(sd_tolerance)
        .map_err(argmin_error)?;
    let res = Executor::new(Closure(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
        .map_err(argmin_error)?;
    let state = res.state();
    let x = state
        .get_best_param()
        .cloned()
        .unwrap_or_else(|| x0.to_vec());
    Ok(Minimum {
        x,
        value: state.get_best_cost(),
        iterations: state.get_iter() as usize,
    })
}

struct Smooth<F>(F);

impl<F: Fn(&[f64]) -> (f64, Vec<f64>)> CostFunction for Smooth<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, ArgminError> {
        Ok((self.0)(x).0)
    }
}

impl<F: Fn(&[f64]) -> (f64, Vec<f64>)> Gradient for Smooth<F> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, x: &Vec<f64>) -> std::result::Result<Vec<f64>, ArgminError> {
        Ok((self.0)(x).1)
    }
}

/// Minimizes a smooth `f` returning `(value, gradient)` with L-BFGS from `x0`.
pub fn lbfgs(
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
    x0: &[f64],
    max_iters: u64,
    grad_tolerance: f64,
) -> Result<Minimum> {
    let solver = LBFGS::new(MoreThuenteLineSearch::new(), 8)
        .with_tolerance_grad(grad_tolerance)
        .and_then(|s| s.with_tolerance_cost(0.0))
        .map_err(argmin_error)?;
    let res = Executor::new(Smooth(f), solver)
        .configure(|s| s.param(x0.to_vec()).max_iters(max_iters))
        .run()
        .map_err(argmin_error)?;
    let state = res.state();
    let x = state
        .get_best_param()
        .cloned()
        .unwrap_or_else(|| x0.to_vec());
    Ok(Minimum {
        x,
        value: state.get_best_cost(),
        iterations: state.get_iter() as usize,
    })
}

fn argmin_error(e: ArgminError) -> Error {
    Error::Numerical {
        iterations: 0,
        message: format!("optimizer failed: {e}"),
    }
}
