use super::divergence::sum_powers;
use super::order::RenyiOrder;
use crate::error::Result;
use crate::operator::{eigenvalues_matrix, SUPPORT_CUTOFF};
use crate::state::{BipartiteState, DensityOperator};

/// `H_alpha(rho) = (1/(1-alpha)) log2 tr rho^alpha`; `-log2 lambda_max` at infinity.
pub fn renyi_entropy(rho: &DensityOperator, order: RenyiOrder) -> Result<f64> {
    let vals = eigenvalues_matrix(rho.matrix().clone())?;
    if order.is_infinite() {
        return Ok(-vals.last().copied().unwrap_or(1.0).log2());
    }
    let alpha = order.value();
    Ok(sum_powers(&vals, alpha).log2() / (1.0 - alpha))
}

/// `-sum lambda log2 lambda` over eigenvalues above the support cutoff.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let vals = eigenvalues_matrix(rho.matrix().clone())?;
    let top = vals.last().copied().unwrap_or(0.0);
    let cut = SUPPORT_CUTOFF * top.max(1.0);
    Ok(-vals
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| l * l.log2())
        .sum::<f64>())
}

/// `H(A|B) = H(AB) - H(B)`.
pub fn von_neumann_conditional(rho: &BipartiteState) -> Result<f64> {
    Ok(von_neumann_entropy(rho.density())? - von_neumann_entropy(&rho.marginal_b())?)
}
