use super::conditional::{conditional_entropy_up, SolverConfig};
use super::order::RenyiOrder;
use crate::error::Result;
use crate::operator::PsdOperator;
use crate::purification::purify;
use crate::state::{BipartiteState, DensityOperator};

/// Both sides of the duality relation for a purification of `rho`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityCheck {
    pub order: RenyiOrder,
    pub dual: RenyiOrder,
    /// `H~_alpha^up(A|B)`.
    pub h_ab: f64,
    /// `H~_beta^up(A|C)`.
    pub h_ac: f64,
    pub d_c: usize,
}

impl DualityCheck {
    pub fn residual(&self) -> f64 {
        (self.h_ab + self.h_ac).abs()
    }
}

/// The `A|C` marginal of a purification of `rho_AB`, with `C` of dimension `rank(rho)`.
pub fn complementary_state(rho: &BipartiteState) -> Result<BipartiteState> {
    let (d_a, d_b) = rho.dims();
    let psi = purify(rho.psd())?;
    let ac = psi.marginal_ac(d_a, d_b)?;
    let d_c = psi.d_c();
    let state = DensityOperator::new(PsdOperator::from_hermitian_unchecked(ac))?;
    BipartiteState::new(state, d_a, d_c)
}

pub fn duality_check(
    rho: &BipartiteState,
    order: RenyiOrder,
    config: &SolverConfig,
) -> Result<DualityCheck> {
    let dual = order.dual();
    let h_ab = conditional_entropy_up(rho, order, config)?.value;
    let ac = complementary_state(rho)?;
    let h_ac = conditional_entropy_up(&ac, dual, config)?.value;
    Ok(DualityCheck {
        order,
        dual,
        h_ab,
        h_ac,
        d_c: ac.d_b(),
    })
}

/// `|H~_alpha^up(A|B) + H~_beta^up(A|C)|` with `1/alpha + 1/beta = 2`.
pub fn duality_residual(rho: &BipartiteState, order: RenyiOrder) -> Result<f64> {
    Ok(duality_check(rho, order, &SolverConfig::default())?.residual())
}
