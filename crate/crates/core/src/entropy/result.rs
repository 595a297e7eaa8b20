use std::fmt;

use serde::{Deserialize, Serialize};

use crate::state::DensityOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    FixedPoint,
    DirectSearch,
    GridOracle,
    Sdp,
    ClosedForm,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::FixedPoint => "fixed-point",
            SolverKind::DirectSearch => "direct-search",
            SolverKind::GridOracle => "grid-oracle",
            SolverKind::Sdp => "sdp",
            SolverKind::ClosedForm => "closed-form",
        })
    }
}

/// Optimality certificate for the min-entropy program.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpCertificate {
    /// `max(0, -lambda_min(I ⊗ X - rho))`.
    pub feasibility_violation: f64,
    /// `tr X` at the returned primal point.
    pub primal: f64,
    /// `tr(rho Y)` for a dual-feasible `Y`; a lower bound on the optimal `tr X`.
    pub dual: f64,
}

impl SdpCertificate {
    pub fn gap(&self) -> f64 {
        self.primal - self.dual
    }
}

/// A conditional entropy value together with the optimizer that produced it.
#[derive(Clone, Debug)]
pub struct EntropyResult {
    /// Bits.
    pub value: f64,
    /// The optimizing state on B.
    pub optimizer: DensityOperator,
    pub solver: SolverKind,
    pub iterations: usize,
    /// Optimality residual. For `alpha < 1` a bound in bits on the distance from the
    /// supremum; for `alpha > 1` the trace distance between `eta` and its stationarity
    /// image; for the SDP the duality gap.
    pub residual: f64,
    pub converged: bool,
    pub certificate: Option<SdpCertificate>,
    /// Values from every solver that ran, for cross-validation reports.
    pub solver_values: Vec<(SolverKind, f64)>,
}

impl EntropyResult {
    pub(crate) fn closed_form(value: f64, optimizer: DensityOperator) -> Self {
        Self {
            value,
            optimizer,
            solver: SolverKind::ClosedForm,
            iterations: 0,
            residual: 0.0,
            converged: true,
            certificate: None,
            solver_values: vec![(SolverKind::ClosedForm, value)],
        }
    }

    pub fn summary(&self) -> EntropySummary {
        EntropySummary {
            value: self.value,
            solver: self.solver,
            iterations: self.iterations,
            residual: self.residual,
            converged: self.converged,
            certificate: self.certificate,
        }
    }
}

/// Serializable view of an [`EntropyResult`] without the optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    pub value: f64,
    pub solver: SolverKind,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SdpCertificate>,
}
