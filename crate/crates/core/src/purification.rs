//! Purifications and Uhlmann-aligned purification pairs.

use nalgebra::{DVector, SVD};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::operator::{
    check_same_dim, matrix_power, CMatrix, HermitianOperator, PsdOperator, ZERO,
};

const TRACE_TOL: f64 = 1e-9;

/// A unit vector on `system ⊗ C`, with composite index `s * d_c + c`.
#[derive(Clone, Debug)]
pub struct Purification {
    vector: DVector<Complex64>,
    d_sys: usize,
    d_c: usize,
}

impl Purification {
    /// The amplitude matrix `M[s, c]`; the purified operator is `M M^†`.
    fn from_amplitudes(m: &CMatrix) -> Self {
        let (d_sys, d_c) = m.shape();
        let vector = DVector::from_fn(d_sys * d_c, |i, _| m[(i / d_c, i % d_c)]);
        Self { vector, d_sys, d_c }
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.vector
    }

    pub fn d_sys(&self) -> usize {
        self.d_sys
    }

    pub fn d_c(&self) -> usize {
        self.d_c
    }

    fn amplitudes(&self) -> CMatrix {
        CMatrix::from_fn(self.d_sys, self.d_c, |s, c| self.vector[s * self.d_c + c])
    }

    /// Projector onto the purifying vector, on `system ⊗ C`.
    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::from_matrix_unchecked(&self.vector * self.vector.adjoint())
    }

    /// `tr_C |psi><psi|`.
    pub fn reduced(&self) -> HermitianOperator {
        let m = self.amplitudes();
        HermitianOperator::from_matrix_unchecked(&m * m.adjoint())
    }

    /// For a purified bipartite state on `A ⊗ B`, the marginal on `A ⊗ C`.
    pub fn marginal_ac(&self, d_a: usize, d_b: usize) -> Result<HermitianOperator> {
        if d_a * d_b != self.d_sys {
            return Err(invalid(format!(
                "dims ({d_a}, {d_b}) do not factor the purified system of dimension {}",
                self.d_sys
            )));
        }
        let d_c = self.d_c;
        let n = d_a * d_c;
        let mut out = CMatrix::zeros(n, n);
        for a in 0..d_a {
            for c in 0..d_c {
                for a2 in 0..d_a {
                    for c2 in 0..d_c {
                        let mut s = ZERO;
                        for b in 0..d_b {
                            let i = (a * d_b + b) * d_c + c;
                            let j = (a2 * d_b + b) * d_c + c2;
                            s += self.vector[i] * self.vector[j].conj();
                        }
                        out[(a * d_c + c, a2 * d_c + c2)] = s;
                    }
                }
            }
        }
        Ok(HermitianOperator::from_matrix_unchecked(out))
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        check_same_dim(self.vector.len(), other.vector.len())?;
        Ok(self.vector.dotc(&other.vector))
    }
}

fn check_unit_trace(rho: &PsdOperator) -> Result<()> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::Normalization(tr));
    }
    Ok(())
}

/// Purifies a density operator onto a system of dimension `rank(rho)`.
pub fn purify(rho: &PsdOperator) -> Result<Purification> {
    check_unit_trace(rho)?;
    let eig = rho.eigen()?;
    let cut = eig.cutoff();
    let support: Vec<usize> = (0..eig.values.len())
        .rev()
        .filter(|&i| eig.values[i] > cut)
        .collect();
    let n = rho.dim();
    let m = CMatrix::from_fn(n, support.len(), |s, c| {
        let k = support[c];
        eig.vectors[(s, k)] * eig.values[k].sqrt()
    });
    Ok(Purification::from_amplitudes(&m))
}

/// Purifications of `rho` and `sigma` on a common purifying system of dimension `dim(rho)`
/// whose overlap equals the root fidelity `F(rho, sigma)`.
///
/// With amplitude matrices `M_rho = sqrt(rho)` and `M_sigma = sqrt(sigma) W`, the overlap is
/// `tr(sqrt(rho) sqrt(sigma) W)`; taking `W = V U^†` from the SVD `sqrt(rho) sqrt(sigma) = U S V^†`
/// makes it `tr S`.
pub fn close_purifications(
    rho: &PsdOperator,
    sigma: &PsdOperator,
) -> Result<(Purification, Purification)> {
    check_same_dim(rho.dim(), sigma.dim())?;
    check_unit_trace(rho)?;
    check_unit_trace(sigma)?;
    let sr = matrix_power(rho, 0.5)?;
    let ss = matrix_power(sigma, 0.5)?;
    let prod = sr.matrix() * ss.matrix();
    let svd = SVD::try_new(prod, true, true, f64::EPSILON, 10_000).ok_or(Error::Numerical {
        iterations: 10_000,
        message: "SVD did not converge".into(),
    })?;
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => {
            return Err(Error::Numerical {
                iterations: 0,
                message: "SVD returned no singular vectors".into(),
            })
        }
    };
    let w = v_t.adjoint() * u.adjoint();
    let m_sigma = ss.matrix() * w;
    Ok((
        Purification::from_amplitudes(sr.matrix()),
        Purification::from_amplitudes(&m_sigma),
    ))
}
