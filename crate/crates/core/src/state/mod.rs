//! Density operators, bipartite states and their structured constructors.

mod io;
mod perturb;
mod sampling;

pub use io::{parse_state_json, read_state_file, ProbabilityTableFile, StateFile};
pub use perturb::{perturb_within, PerturbationMode, PerturbationSpec, Perturbed};
pub use sampling::{
    derive_seed, ginibre, haar_unitary, random_bipartite_classical, random_density, random_psd,
    random_traceless_hermitian, rng_from_seed, sample_random_state, ClassicalStructure, Ensemble,
    StateRng,
};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::operator::{
    partial_trace, tensor, CMatrix, HermitianOperator, PsdOperator, Subsystem, ZERO,
};

/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-9;
/// Off-diagonal block tolerance for classical flags.
pub const CLASSICAL_TOL: f64 = 1e-10;

/// A positive semidefinite operator with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: PsdOperator,
}

impl DensityOperator {
    pub fn new(op: PsdOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Normalization(tr));
        }
        Ok(Self { op })
    }

    pub fn from_hermitian(h: HermitianOperator) -> Result<Self> {
        Self::new(PsdOperator::new(h)?)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: PsdOperator::from_hermitian_unchecked(
                HermitianOperator::identity(dim).scaled(1.0 / dim as f64),
            ),
        }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("pure state vector must be nonzero and finite"));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Ok(Self::from_matrix_unchecked(&v * v.adjoint()))
    }

    /// Hermitizes and rescales to unit trace; for operators PSD by construction.
    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        let tr: f64 = mat.diagonal().iter().map(|z| z.re).sum();
        let mat = mat / Complex64::new(tr, 0.0);
        Self {
            op: PsdOperator::from_matrix_unchecked(mat),
        }
    }

    pub fn psd(&self) -> &PsdOperator {
        &self.op
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        self.op.hermitian()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `(1 - t) self + t other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let mat =
            self.matrix() * Complex64::new(1.0 - t, 0.0) + other.matrix() * Complex64::new(t, 0.0);
        Ok(Self {
            op: PsdOperator::from_matrix_unchecked(mat),
        })
    }
}

impl AsRef<PsdOperator> for DensityOperator {
    fn as_ref(&self) -> &PsdOperator {
        &self.op
    }
}

/// A density operator on `A ⊗ B` with composite index `a * d_B + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    state: DensityOperator,
    d_a: usize,
    d_b: usize,
    classical_a: bool,
    classical_b: bool,
}

impl BipartiteState {
    pub fn new(state: DensityOperator, d_a: usize, d_b: usize) -> Result<Self> {
        Self::with_flags(state, d_a, d_b, false, false)
    }

    /// Validates the block structure implied by each classical flag.
    pub fn with_flags(
        state: DensityOperator,
        d_a: usize,
        d_b: usize,
        classical_a: bool,
        classical_b: bool,
    ) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_a * d_b != state.dim() {
            return Err(invalid(format!(
                "dims ({d_a}, {d_b}) do not factor a state of dimension {}",
                state.dim()
            )));
        }
        let s = Self {
            state,
            d_a,
            d_b,
            classical_a,
            classical_b,
        };
        if classical_a {
            let off = s.off_block_norm(Subsystem::A);
            if off > CLASSICAL_TOL {
                return Err(invalid(format!(
                    "state flagged A-classical has off-diagonal A blocks of size {off:.3e}"
                )));
            }
        }
        if classical_b {
            let off = s.off_block_norm(Subsystem::B);
            if off > CLASSICAL_TOL {
                return Err(invalid(format!(
                    "state flagged B-classical has off-diagonal B blocks of size {off:.3e}"
                )));
            }
        }
        Ok(s)
    }

    pub(crate) fn from_parts_unchecked(
        state: DensityOperator,
        d_a: usize,
        d_b: usize,
        classical_a: bool,
        classical_b: bool,
    ) -> Self {
        Self {
            state,
            d_a,
            d_b,
            classical_a,
            classical_b,
        }
    }

    /// Largest entry coupling different basis labels of `which`.
    fn off_block_norm(&self, which: Subsystem) -> f64 {
        let m = self.state.matrix();
        let n = m.nrows();
        let db = self.d_b;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let differs = match which {
                    Subsystem::A => i / db != j / db,
                    Subsystem::B => i % db != j % db,
                };
                if differs {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn density(&self) -> &DensityOperator {
        &self.state
    }

    pub fn psd(&self) -> &PsdOperator {
        self.state.psd()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.state.matrix()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn classical_a(&self) -> bool {
        self.classical_a
    }

    pub fn classical_b(&self) -> bool {
        self.classical_b
    }

    pub fn marginal_a(&self) -> DensityOperator {
        let h = partial_trace(self.state.hermitian(), self.dims(), Subsystem::A)
            .expect("dims validated at construction");
        DensityOperator::from_matrix_unchecked(h.into_matrix())
    }

    pub fn marginal_b(&self) -> DensityOperator {
        let h = partial_trace(self.state.hermitian(), self.dims(), Subsystem::B)
            .expect("dims validated at construction");
        DensityOperator::from_matrix_unchecked(h.into_matrix())
    }

    /// Same operator with the classical flags cleared.
    pub fn forget_flags(&self) -> Self {
        Self {
            classical_a: false,
            classical_b: false,
            ..self.clone()
        }
    }
}

/// Diagonal state built from a joint probability table `p[a][b]`.
pub fn make_cq_state(table: &[Vec<f64>]) -> Result<BipartiteState> {
    let d_a = table.len();
    if d_a == 0 {
        return Err(invalid("probability table is empty"));
    }
    let d_b = table[0].len();
    if d_b == 0 || table.iter().any(|row| row.len() != d_b) {
        return Err(invalid(
            "probability table rows must be nonempty and of equal length",
        ));
    }
    if table.iter().flatten().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(invalid(
            "probability table entries must be finite and nonnegative",
        ));
    }
    let total: f64 = table.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(total));
    }
    let diag: Vec<f64> = table.iter().flatten().copied().collect();
    let state = DensityOperator {
        op: PsdOperator::from_hermitian_unchecked(HermitianOperator::from_real_diagonal(&diag)),
    };
    Ok(BipartiteState::from_parts_unchecked(
        state, d_a, d_b, true, true,
    ))
}

/// Projector onto `(1/sqrt d) sum_i |i>|i>` on `d x d`.
pub fn max_entangled(d: usize) -> Result<BipartiteState> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let mut psi = DVector::from_element(d * d, ZERO);
    for i in 0..d {
        psi[i * d + i] = Complex64::new(1.0, 0.0);
    }
    let state = DensityOperator::pure(&psi)?;
    Ok(BipartiteState::from_parts_unchecked(
        state,
        d,
        d,
        d == 1,
        d == 1,
    ))
}

/// `rho_a ⊗ rho_b`; each flag is set when the corresponding factor is diagonal.
pub fn product(rho_a: &DensityOperator, rho_b: &DensityOperator) -> Result<BipartiteState> {
    let t = tensor(rho_a.hermitian(), rho_b.hermitian())?;
    let state = DensityOperator {
        op: PsdOperator::from_hermitian_unchecked(t),
    };
    Ok(BipartiteState::from_parts_unchecked(
        state,
        rho_a.dim(),
        rho_b.dim(),
        is_diagonal(rho_a.matrix()),
        is_diagonal(rho_b.matrix()),
    ))
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() <= CLASSICAL_TOL))
}
