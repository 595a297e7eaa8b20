//! Min-entropy as `-log2 min { tr X : I ⊗ X ⪰ rho }` by a log-barrier Newton method.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use super::result::SdpCertificate;
use crate::error::{Error, Result};
use crate::operator::{
    eig_matrix, eigenvalues_matrix, hermitize, identity_kron, trace_out_a, CMatrix,
};
use crate::state::BipartiteState;

const MU_START: f64 = 1.0;
const MU_FACTOR: f64 = 0.2;
const MU_END: f64 = 1e-10;
const MAX_NEWTON: usize = 100;
const FEASIBILITY_TOL: f64 = 1e-8;
const GAP_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub(crate) struct HminOutcome {
    pub x: CMatrix,
    pub iterations: usize,
    pub certificate: SdpCertificate,
}

impl HminOutcome {
    pub fn value(&self) -> f64 {
        -self.certificate.primal.log2()
    }

    pub fn converged(&self) -> bool {
        self.certificate.feasibility_violation <= FEASIBILITY_TOL
            && self.certificate.gap() <= GAP_TOL * self.certificate.primal.max(1.0)
    }

    pub fn residual(&self) -> f64 {
        self.certificate
            .feasibility_violation
            .max(self.certificate.gap().max(0.0))
    }
}

/// Orthonormal Hermitian basis of `d x d` matrices.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let mut e = CMatrix::zeros(d, d);
        e[(i, i)] = Complex64::new(1.0, 0.0);
        out.push(e);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut e = CMatrix::zeros(d, d);
            e[(i, j)] = Complex64::new(s, 0.0);
            e[(j, i)] = Complex64::new(s, 0.0);
            out.push(e);
            let mut e = CMatrix::zeros(d, d);
            e[(i, j)] = Complex64::new(0.0, -s);
            e[(j, i)] = Complex64::new(0.0, s);
            out.push(e);
        }
    }
    out
}

fn re_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    // Re tr(a b) for Hermitian a, b.
    a.iter()
        .zip(b.transpose().iter())
        .map(|(x, y)| (x * y).re)
        .sum()
}

fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

struct Barrier<'a> {
    rho: &'a CMatrix,
    d_a: usize,
    basis: Vec<CMatrix>,
}

impl Barrier<'_> {
    fn slack(&self, x: &CMatrix) -> CMatrix {
        identity_kron(self.d_a, x) - self.rho
    }

    /// `log det` of a Hermitian matrix, or `None` if it is not positive definite.
    fn log_det(m: &CMatrix) -> Option<f64> {
        let c = Cholesky::new(m.clone())?;
        let l = c.l();
        Some((0..m.nrows()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
    }

    fn value(&self, x: &CMatrix, mu: f64) -> Option<f64> {
        let ls = Self::log_det(&self.slack(x))?;
        let lx = Self::log_det(x)?;
        Some(trace_re(x) - mu * (ls + lx))
    }

    fn inverse(m: &CMatrix) -> Option<CMatrix> {
        let mut inv = Cholesky::new(m.clone())?.inverse();
        hermitize(&mut inv);
        Some(inv)
    }

    fn newton_direction(&self, x: &CMatrix, mu: f64) -> Option<(CMatrix, f64)> {
        let d_b = x.nrows();
        let s_inv = Self::inverse(&self.slack(x))?;
        let x_inv = Self::inverse(x)?;
        let ts = trace_out_a(&s_inv, self.d_a, d_b);
        let g_mat = CMatrix::identity(d_b, d_b) - (ts + &x_inv) * Complex64::new(mu, 0.0);
        let m = self.basis.len();
        let grad = DVector::from_fn(m, |k, _| re_inner(&self.basis[k], &g_mat));
        let c: Vec<CMatrix> = self
            .basis
            .iter()
            .map(|e| {
                trace_out_a(
                    &(&s_inv * identity_kron(self.d_a, e) * &s_inv),
                    self.d_a,
                    d_b,
                )
            })
            .collect();
        let xe: Vec<CMatrix> = self.basis.iter().map(|e| &x_inv * e * &x_inv).collect();
        let mut hess = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            for l in k..m {
                let v = mu * (re_inner(&c[k], &self.basis[l]) + re_inner(&xe[k], &self.basis[l]));
                hess[(k, l)] = v;
                hess[(l, k)] = v;
            }
        }
        let step = match Cholesky::new(hess.clone()) {
            Some(ch) => ch.solve(&(-&grad)),
            None => hess.lu().solve(&(-&grad))?,
        };
        let decrement = -grad.dot(&step);
        let mut dx = CMatrix::zeros(d_b, d_b);
        for (k, e) in self.basis.iter().enumerate() {
            dx += e * Complex64::new(step[k], 0.0);
        }
        Some((dx, decrement))
    }
}

pub(crate) fn hmin_barrier(rho: &BipartiteState) -> Result<HminOutcome> {
    let (d_a, d_b) = rho.dims();
    let top = rho.psd().eigen()?.max();
    let barrier = Barrier {
        rho: rho.matrix(),
        d_a,
        basis: hermitian_basis(d_b),
    };
    let mut x = CMatrix::identity(d_b, d_b) * Complex64::new(2.0 * top.max(1e-300), 0.0);
    let mut mu = MU_START;
    let mut iterations = 0;
    let mut best: Option<(CMatrix, SdpCertificate)> = None;
    let score = |c: &SdpCertificate| c.feasibility_violation.max(c.gap().abs());
    loop {
        for _ in 0..MAX_NEWTON {
            let Some((dx, decrement)) = barrier.newton_direction(&x, mu) else {
                break;
            };
            iterations += 1;
            if !(decrement > 0.0) || decrement / 2.0 < 1e-14 * mu.max(1e-3) {
                break;
            }
            let f0 = barrier
                .value(&x, mu)
                .ok_or_else(|| numerical(iterations, "iterate left the feasible cone"))?;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let cand = &x + &dx * Complex64::new(t, 0.0);
                if let Some(f1) = barrier.value(&cand, mu) {
                    if f1 <= f0 - 0.25 * t * decrement {
                        x = cand;
                        hermitize(&mut x);
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let cert = certify(rho, &x, mu)?;
        if best.as_ref().is_none_or(|(_, b)| score(&cert) <= score(b)) {
            best = Some((x.clone(), cert));
        }
        if mu < MU_END {
            break;
        }
        mu *= MU_FACTOR;
    }
    let (x, certificate) = best.expect("at least one stage");
    Ok(HminOutcome {
        x,
        iterations,
        certificate,
    })
}

fn numerical(iterations: usize, msg: &str) -> Error {
    Error::Numerical {
        iterations,
        message: msg.into(),
    }
}

/// Primal value, feasibility violation, and the dual value `tr(rho Y)`.
///
/// `Y = (I ⊗ T) mu S^{-1} (I ⊗ T)` with `T = (tr_A mu S^{-1})^{-1/2}`, so `tr_A Y = I`
/// holds exactly and the gap `tr(S Y)` is `mu dim` up to the square of the centering error.
fn certify(rho: &BipartiteState, x: &CMatrix, mu: f64) -> Result<SdpCertificate> {
    let (d_a, d_b) = rho.dims();
    let slack = identity_kron(d_a, x) - rho.matrix();
    let min_eig = eigenvalues_matrix(slack.clone())?
        .first()
        .copied()
        .unwrap_or(0.0);
    let feasibility_violation = (-min_eig).max(0.0);
    let primal = trace_re(x);
    let dual = match Barrier::inverse(&slack) {
        Some(s_inv) => {
            let y0 = s_inv * Complex64::new(mu, 0.0);
            let k = eig_matrix(trace_out_a(&y0, d_a, d_b))?;
            if k.min() <= 0.0 {
                0.0
            } else {
                let t = identity_kron(d_a, &k.apply(|l| l.powf(-0.5)));
                let mut y = &t * y0 * &t;
                hermitize(&mut y);
                re_inner(rho.matrix(), &y)
            }
        }
        None => 0.0,
    };
    Ok(SdpCertificate {
        feasibility_violation,
        primal,
        dual,
    })
}
