//! Closed forms when the conditioning system is classical.
//!
//! For `rho = sum_b rho_{A,b} ⊗ |b><b|` the optimal `eta` is diagonal with weights
//! `S_b^{1/alpha}`, `S_b = tr(rho_{A,b}^alpha)`, giving
//! `H = (alpha/(1-alpha)) log2 sum_b S_b^{1/alpha}`.

use num_complex::Complex64;

use super::divergence::sum_powers;
use crate::error::Result;
use crate::operator::{eigenvalues_matrix, CMatrix};
use crate::state::{BipartiteState, DensityOperator};

fn block(rho: &BipartiteState, b: usize) -> CMatrix {
    let (d_a, d_b) = rho.dims();
    let m = rho.matrix();
    CMatrix::from_fn(d_a, d_a, |i, j| m[(i * d_b + b, j * d_b + b)])
}

fn diagonal_state(weights: &[f64]) -> DensityOperator {
    let total: f64 = weights.iter().sum();
    let d = weights.len();
    let mut m = CMatrix::zeros(d, d);
    for (i, w) in weights.iter().enumerate() {
        m[(i, i)] = Complex64::new(w / total, 0.0);
    }
    DensityOperator::from_matrix_unchecked(m)
}

/// `H_alpha^up(A|B)` for a state whose B system is classical; `alpha = inf` allowed.
pub(crate) fn classical_b_entropy(
    rho: &BipartiteState,
    alpha: f64,
) -> Result<(f64, DensityOperator)> {
    let d_b = rho.d_b();
    let mut weights = Vec::with_capacity(d_b);
    for b in 0..d_b {
        let vals = eigenvalues_matrix(block(rho, b))?;
        let w = if alpha.is_infinite() {
            vals.last().copied().unwrap_or(0.0).max(0.0)
        } else {
            sum_powers(&vals, alpha).powf(1.0 / alpha)
        };
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    let value = if alpha.is_infinite() {
        -total.log2()
    } else {
        alpha / (1.0 - alpha) * total.log2()
    };
    Ok((value, diagonal_state(&weights)))
}

/// `-log2 sum_b max_a p(a, b)`.
pub fn classical_hmin(table: &[Vec<f64>]) -> f64 {
    let d_b = table.first().map_or(0, Vec::len);
    let guess: f64 = (0..d_b)
        .map(|b| table.iter().map(|row| row[b]).fold(0.0, f64::max))
        .sum();
    -guess.log2()
}
