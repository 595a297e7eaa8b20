//! Sandwiched Rényi divergence and conditional entropies.

mod classical;
mod conditional;
pub(crate) mod direct_search;
mod divergence;
mod duality;
mod fixed_point;
mod grid;
mod hmin;
mod order;
mod result;
mod unconditional;

pub use classical::classical_hmin;
pub use conditional::{
    conditional_entropy_up, hmax, hmax_fidelity_form, hmin, DirectSearchPolicy, SolverConfig,
};
pub use divergence::{q_alpha, sandwiched_divergence};
pub use duality::{complementary_state, duality_check, duality_residual, DualityCheck};
pub use order::{dual_order, RenyiOrder, VALID_ORDERS};
pub use result::{EntropyResult, EntropySummary, SdpCertificate, SolverKind};
pub use unconditional::{renyi_entropy, von_neumann_conditional, von_neumann_entropy};
