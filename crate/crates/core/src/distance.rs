//! Trace distance, fidelity and the Jordan decomposition.

use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::operator::{
    check_same_dim, eig_matrix, eigenvalues_matrix, matrix_power, HermitianOperator, PsdOperator,
};

/// `(1/2) ||a - b||_1`.
pub fn trace_distance(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    check_same_dim(a.dim(), b.dim())?;
    let diff = a.matrix() - b.matrix();
    Ok(0.5
        * eigenvalues_matrix(diff)?
            .iter()
            .map(|l| l.abs())
            .sum::<f64>())
}

/// Root fidelity `|| sqrt(rho) sqrt(sigma) ||_1`. Inputs need not be normalized.
pub fn fidelity(rho: &PsdOperator, sigma: &PsdOperator) -> Result<f64> {
    check_same_dim(rho.dim(), sigma.dim())?;
    let sr = matrix_power(rho, 0.5)?;
    let ss = matrix_power(sigma, 0.5)?;
    let prod = sr.matrix() * ss.matrix();
    let svd = SVD::try_new(prod, false, false, f64::EPSILON, 10_000).ok_or(Error::Numerical {
        iterations: 10_000,
        message: "SVD did not converge".into(),
    })?;
    Ok(svd.singular_values.iter().sum())
}

/// Splits a Hermitian operator into orthogonal positive and negative parts, `delta = pos - neg`.
pub fn jordan_decomposition(delta: &HermitianOperator) -> Result<(PsdOperator, PsdOperator)> {
    let eig = eig_matrix(delta.matrix().clone())?;
    let pos = eig.apply(|l| l.max(0.0));
    let neg = eig.apply(|l| (-l).max(0.0));
    Ok((
        PsdOperator::from_matrix_unchecked(pos),
        PsdOperator::from_matrix_unchecked(neg),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::CMatrix;
    use num_complex::Complex64;

    fn diag(d: &[f64]) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(d)
    }

    fn psd(d: &[f64]) -> PsdOperator {
        PsdOperator::new(diag(d)).unwrap()
    }

    #[test]
    fn trace_distance_examples() {
        let r = diag(&[0.3, 0.7]);
        assert_eq!(trace_distance(&r, &r).unwrap(), 0.0);
        assert!(
            (trace_distance(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap() - 1.0).abs() < 1e-15
        );
        assert!(
            (trace_distance(&diag(&[0.75, 0.25]), &diag(&[0.5, 0.5])).unwrap() - 0.25).abs()
                < 1e-15
        );
        assert!(trace_distance(&diag(&[1.0]), &diag(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let r = psd(&[0.6, 0.4]);
        assert!((fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            fidelity(&psd(&[1.0, 0.0]), &psd(&[0.0, 1.0]))
                .unwrap()
                .abs()
                < 1e-15
        );
        let f = fidelity(&psd(&[1.0, 0.0]), &psd(&[0.5, 0.5])).unwrap();
        assert!((f - 0.5f64.sqrt()).abs() < 1e-12);
        // unnormalized: F(rho, rho) = tr(rho)
        let r = psd(&[1.5, 0.5]);
        assert!((fidelity(&r, &r).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_examples() {
        let (p, n) = jordan_decomposition(&diag(&[1.0, -1.0])).unwrap();
        assert_eq!(p.matrix(), diag(&[1.0, 0.0]).matrix());
        assert_eq!(n.matrix(), diag(&[0.0, 1.0]).matrix());

        let (p, n) = jordan_decomposition(&HermitianOperator::zeros(3)).unwrap();
        assert_eq!(p.trace(), 0.0);
        assert_eq!(n.trace(), 0.0);

        let (p, n) = jordan_decomposition(&diag(&[0.3, -0.1, -0.2])).unwrap();
        let close = |a: &CMatrix, b: &CMatrix| (a - b).iter().all(|z: &Complex64| z.norm() < 1e-15);
        assert!(close(p.matrix(), diag(&[0.3, 0.0, 0.0]).matrix()));
        assert!(close(n.matrix(), diag(&[0.0, 0.1, 0.2]).matrix()));
    }

    #[test]
    fn jordan_parts_carry_the_trace_distance() {
        let rho = diag(&[0.5, 0.3, 0.2]);
        let sigma = diag(&[0.2, 0.3, 0.5]);
        let (p, n) = jordan_decomposition(&rho.sub(&sigma).unwrap()).unwrap();
        let eps = trace_distance(&rho, &sigma).unwrap();
        assert!((p.trace() - eps).abs() < 1e-15);
        assert!((n.trace() - eps).abs() < 1e-15);
    }
}
