//! Sandwiched quasi-entropy and divergence.

use super::order::RenyiOrder;
use crate::error::{invalid, Result};
use crate::operator::{
    check_same_dim, eig_matrix, eigenvalues_matrix, CMatrix, Eigen, PsdOperator,
};

/// Weight of `p` on `ker(q)` above which the kernel condition counts as violated.
pub(crate) const KERNEL_TOL: f64 = 1e-10;

/// `tr((q^{-a'/2} p q^{-a'/2})^alpha)`, or `+inf` when `alpha > 1` and `ker q ⊄ ker p`.
pub fn q_alpha(p: &PsdOperator, q: &PsdOperator, order: RenyiOrder) -> Result<f64> {
    check_same_dim(p.dim(), q.dim())?;
    if order.is_infinite() {
        return Err(invalid("q_alpha needs a finite order"));
    }
    let alpha = order.value();
    let q_eig = q.eigen()?;
    if alpha > 1.0 && kernel_weight(p.matrix(), q_eig) > KERNEL_TOL * p.trace().abs().max(1.0) {
        return Ok(f64::INFINITY);
    }
    let k = q_eig.apply_on_support(|l| l.powf(-order.alpha_prime() / 2.0));
    let x = &k * p.matrix() * &k;
    trace_power(x, alpha)
}

/// `(1/(alpha-1)) log2(q_alpha / tr p)`, with the max-relative-entropy limit at infinity.
pub fn sandwiched_divergence(p: &PsdOperator, q: &PsdOperator, order: RenyiOrder) -> Result<f64> {
    check_same_dim(p.dim(), q.dim())?;
    let tr_p = p.trace();
    if tr_p <= 0.0 {
        return Err(invalid("sandwiched divergence needs tr(p) > 0"));
    }
    if order.is_infinite() {
        let q_eig = q.eigen()?;
        if kernel_weight(p.matrix(), q_eig) > KERNEL_TOL * tr_p.max(1.0) {
            return Ok(f64::INFINITY);
        }
        let k = q_eig.apply_on_support(|l| l.powf(-0.5));
        let x = &k * p.matrix() * &k;
        let top = eigenvalues_matrix(x)?.last().copied().unwrap_or(0.0);
        return Ok(top.log2());
    }
    let alpha = order.value();
    let qa = q_alpha(p, q, order)?;
    if qa.is_infinite() || qa <= 0.0 {
        // alpha > 1 kernel failure, or alpha < 1 with p ⟂ q.
        return Ok(f64::INFINITY);
    }
    Ok((qa / tr_p).log2() / (alpha - 1.0))
}

/// `sum_i lambda_i^alpha` over eigenvalues of `x` above the support cutoff.
pub(crate) fn trace_power(x: CMatrix, alpha: f64) -> Result<f64> {
    let vals = eigenvalues_matrix(x)?;
    Ok(sum_powers(&vals, alpha))
}

pub(crate) fn sum_powers(vals: &[f64], alpha: f64) -> f64 {
    let top = vals.iter().copied().fold(0.0, f64::max);
    let cut = crate::operator::SUPPORT_CUTOFF * top.max(1.0);
    vals.iter()
        .filter(|&&l| l > cut)
        .map(|&l| power(l, alpha))
        .sum()
}

/// `l^alpha` with exact shortcuts for the orders the campaigns use most.
#[inline]
pub(crate) fn power(l: f64, alpha: f64) -> f64 {
    if alpha == 0.5 {
        l.sqrt()
    } else if alpha == 2.0 {
        l * l
    } else if alpha == 0.75 {
        let s = l.sqrt();
        s * s.sqrt()
    } else {
        l.powf(alpha)
    }
}

/// `tr(P_ker(q) p)`.
pub(crate) fn kernel_weight(p: &CMatrix, q_eig: &Eigen) -> f64 {
    let cut = q_eig.cutoff();
    let mut w = 0.0;
    for (j, &l) in q_eig.values.iter().enumerate() {
        if l > cut {
            continue;
        }
        let v = q_eig.vectors.column(j);
        w += (v.adjoint() * p * v)[(0, 0)].re;
    }
    w
}

/// Eigen-decomposes `x` and returns `(sum lambda^alpha, x^alpha)` on the support.
pub(crate) fn power_with_trace(x: CMatrix, alpha: f64) -> Result<(f64, CMatrix)> {
    let eig = eig_matrix(x)?;
    let total = sum_powers(eig.values.as_slice(), alpha);
    let cut = crate::operator::SUPPORT_CUTOFF * eig.max().max(1.0);
    let m = eig.apply(|l| if l > cut { l.powf(alpha) } else { 0.0 });
    Ok((total, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HermitianOperator;
    use crate::state::{random_psd, rng_from_seed};

    fn psd(d: &[f64]) -> PsdOperator {
        PsdOperator::new(HermitianOperator::from_real_diagonal(d)).unwrap()
    }

    fn ord(a: f64) -> RenyiOrder {
        RenyiOrder::new(a).unwrap()
    }

    #[test]
    fn q_alpha_examples() {
        let mut rng = rng_from_seed(3);
        let mut r = random_psd(3, 3, &mut rng).unwrap();
        r = PsdOperator::new(r.hermitian().scaled(1.0 / r.trace())).unwrap();
        for a in [0.5, 0.75, 2.0, 5.0] {
            assert!(
                (q_alpha(&r, &r, ord(a)).unwrap() - 1.0).abs() < 1e-10,
                "alpha {a}"
            );
        }
        let v = q_alpha(&psd(&[0.5, 0.5]), &psd(&[1.0, 1.0]), ord(2.0)).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let v = q_alpha(&psd(&[0.75, 0.25]), &psd(&[1.0, 1.0]), ord(0.5)).unwrap();
        assert!((v - (0.75f64.sqrt() + 0.5)).abs() < 1e-14);
        assert!((v - 1.3660).abs() < 1e-4);
    }

    #[test]
    fn divergence_examples() {
        let r = psd(&[0.3, 0.7]);
        for a in [0.5, 0.9, 2.0] {
            assert!(sandwiched_divergence(&r, &r, ord(a)).unwrap().abs() < 1e-12);
        }
        assert!(
            sandwiched_divergence(&r, &r, RenyiOrder::INFINITY)
                .unwrap()
                .abs()
                < 1e-12
        );
        let v = sandwiched_divergence(&psd(&[1.0, 0.0]), &psd(&[0.0, 1.0]), ord(2.0)).unwrap();
        assert_eq!(v, f64::INFINITY);
        let v = sandwiched_divergence(&psd(&[1.0, 0.0]), &psd(&[0.0, 1.0]), ord(0.5)).unwrap();
        assert_eq!(v, f64::INFINITY);
        let v = sandwiched_divergence(&psd(&[0.75, 0.25]), &psd(&[0.5, 0.5]), ord(2.0)).unwrap();
        assert!((v - 1.25f64.log2()).abs() < 1e-14);
        assert!((v - 0.3219).abs() < 1e-4);
    }

    #[test]
    fn infinity_is_max_relative_entropy() {
        let v = sandwiched_divergence(&psd(&[0.75, 0.25]), &psd(&[0.5, 0.5]), RenyiOrder::INFINITY)
            .unwrap();
        assert!((v - 1.5f64.log2()).abs() < 1e-14);
        let far =
            sandwiched_divergence(&psd(&[0.75, 0.25]), &psd(&[0.5, 0.5]), ord(200.0)).unwrap();
        assert!((far - v).abs() < 1e-2);
    }

    #[test]
    fn zero_trace_is_rejected() {
        assert!(sandwiched_divergence(&psd(&[0.0, 0.0]), &psd(&[0.5, 0.5]), ord(2.0)).is_err());
    }

    #[test]
    fn alpha_below_one_ignores_kernel_of_q() {
        let v = sandwiched_divergence(&psd(&[0.5, 0.5]), &psd(&[1.0, 0.0]), ord(0.5)).unwrap();
        // tr((q^{1/2} p q^{1/2})^{1/2}) = sqrt(1/2), so D = -2 log2 sqrt(1/2) = 1.
        assert!((v - 1.0).abs() < 1e-14);
    }
}
