//! Fixed-point iteration for the optimal `eta_B`.
//!
//! Stationarity of `eta -> tr((eta^{-a'/2} rho eta^{-a'/2})^alpha)` on the simplex gives
//! `eta ∝ tr_A(omega^alpha)` with `omega = (I ⊗ eta^{-a'/2}) rho (I ⊗ eta^{-a'/2})`.
//!
//! For `alpha > 1` the plain map oscillates at large `alpha`; once an oscillation shows up
//! the step is replaced by the weighted geometric mean `eta #_theta T(eta)`.
//!
//! For `alpha < 1` the objective is concave in `eta`. The map is multiplicative, so it
//! contracts slowly near `alpha = 1/2` and can stall on a face of the simplex where a
//! rotation of the kernel would still pay off. The iteration therefore runs under Anderson
//! extrapolation in log coordinates and is checked with the Frank–Wolfe gap
//! `lambda_max(G) - tr(eta G)`, which bounds `q* - q` from above. A point the map cannot
//! certify is finished by L-BFGS on a factor `X` with `eta ∝ X X^†`.
//!
//! Optima near `alpha = 1/2` can carry eigenvalues far below `1e-10`. `G` is steep there
//! and the gap cannot get small in floating point even when `q` has converged to the last
//! digit; such points are certified against the dual bound from a purification instead.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::divergence::power_with_trace;
use super::duality::complementary_state;
use crate::error::Result;
use crate::operator::{eig_matrix, hermitize, sandwich_b, trace_out_a, CMatrix, Eigen};
use crate::optimize::lbfgs;
use crate::state::BipartiteState;

#[derive(Clone, Debug)]
pub(crate) struct FixedPointOutcome {
    /// `tr(omega^alpha)` at `eta`.
    pub q: f64,
    pub eta: CMatrix,
    pub iterations: usize,
    /// Trace distance between `eta` and its image.
    pub residual: f64,
    /// For `alpha < 1`: upper bound, in bits, on the distance from the supremum.
    pub gap: Option<f64>,
}

pub(crate) struct StationaryMap<'a> {
    rho: &'a CMatrix,
    d_a: usize,
    alpha: f64,
}

impl<'a> StationaryMap<'a> {
    pub fn new(rho: &'a BipartiteState, alpha: f64) -> Self {
        Self {
            rho: rho.matrix(),
            d_a: rho.d_a(),
            alpha,
        }
    }

    /// Returns `(tr omega^alpha, T(eta))` for `eta` with eigen-decomposition `eig`.
    pub fn apply(&self, eig: &Eigen) -> Result<(f64, CMatrix)> {
        let gamma = -(self.alpha - 1.0) / self.alpha / 2.0;
        // A positive power is continuous at zero; cutting small eigenvalues would turn
        // them into an absorbing kernel.
        let k = if gamma > 0.0 {
            eig.apply(|l| l.max(0.0).powf(gamma))
        } else {
            eig.apply_on_support(|l| l.powf(gamma))
        };
        let omega = sandwich_b(self.rho, &k, self.d_a);
        let (q, w) = power_with_trace(omega, self.alpha)?;
        let db = k.nrows();
        let mut t = trace_out_a(&w, self.d_a, db);
        hermitize(&mut t);
        normalize(&mut t);
        Ok((q, t))
    }

    #[cfg(test)]
    fn q(&self, eta: &CMatrix) -> Result<f64> {
        Ok(self.apply(&eig_matrix(eta.clone())?)?.0)
    }
}

fn normalize(m: &mut CMatrix) {
    let tr: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
    if tr > 0.0 {
        *m /= Complex64::new(tr, 0.0);
    }
}

/// `a #_theta b = a^{1/2} (a^{-1/2} b a^{-1/2})^theta a^{1/2}` on the support of `a`.
pub(crate) fn geometric_mean(a: &Eigen, b: &CMatrix, theta: f64) -> Result<CMatrix> {
    let half = a.apply_on_support(f64::sqrt);
    let inv_half = a.apply_on_support(|l| 1.0 / l.sqrt());
    let mid = eig_matrix(&inv_half * b * &inv_half)?;
    let mid_pow = mid.apply_on_support(|l| l.powf(theta));
    let mut out = &half * mid_pow * &half;
    hermitize(&mut out);
    normalize(&mut out);
    Ok(out)
}

fn trace_norm_half(m: CMatrix) -> Result<f64> {
    let eig = eig_matrix(m)?;
    Ok(0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>())
}

fn overlap(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub(crate) fn fixed_point(
    rho: &BipartiteState,
    alpha: f64,
    max_iter: usize,
    tol: f64,
    gap_tol: f64,
) -> Result<FixedPointOutcome> {
    if alpha < 1.0 {
        concave_ascent(rho, alpha, max_iter, tol, gap_tol)
    } else {
        damped_iteration(rho, alpha, max_iter, tol)
    }
}

fn damped_iteration(
    rho: &BipartiteState,
    alpha: f64,
    max_iter: usize,
    tol: f64,
) -> Result<FixedPointOutcome> {
    let map = StationaryMap::new(rho, alpha);
    let mut eta = rho.marginal_b().matrix().clone();
    let mut theta = 1.0;
    let mut prev_step: Option<CMatrix> = None;
    let mut best: Option<FixedPointOutcome> = None;
    for it in 1..=max_iter.max(1) {
        let eig = eig_matrix(eta.clone())?;
        let (q, image) = map.apply(&eig)?;
        let residual = trace_norm_half(&image - &eta)?;
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(FixedPointOutcome {
                q,
                eta: eta.clone(),
                iterations: it,
                residual,
                gap: None,
            });
        }
        if residual < tol {
            break;
        }
        let next = if theta < 1.0 {
            geometric_mean(&eig, &image, theta)?
        } else {
            image
        };
        let step = &next - &eta;
        if let Some(prev) = &prev_step {
            if overlap(&step, prev) < 0.0 {
                theta = if theta >= 1.0 && alpha > 1.0 {
                    1.0 / alpha
                } else {
                    theta * 0.5
                };
            }
        }
        prev_step = Some(step);
        eta = next;
    }
    Ok(best.expect("max_iter is at least one"))
}

const ANDERSON_MEMORY: usize = 5;

/// Eigenvalues of a unit-trace `eta` below this are roundoff, and their logarithms noise.
const LOG_FLOOR: f64 = 1e-13;

/// Largest operator-norm distance, in log coordinates, between an extrapolated point and
/// the plain image.
const TRUST_RADIUS: f64 = 1.0;

/// Iterations between optimality checks while the map has not converged.
const CHECK_EVERY: usize = 200;

/// Iterations between optimality checks once it has.
const SETTLED_CHECK_EVERY: usize = 10;

/// Iterations of the map after which an uncertified point is handed to [`polish`].
const POLISH_AFTER: usize = 1000;

const POLISH_ITERATIONS: u64 = 500;

const POLISH_ROUNDS: usize = 6;

/// Slope floor for eigenvalues held exactly.
const EXACT_FLOOR: f64 = 1e-300;

const DUAL_ITERATIONS: usize = 10_000;

const DUAL_TOL: f64 = 1e-12;

fn flatten(m: &CMatrix) -> DVector<f64> {
    DVector::from_iterator(2 * m.len(), m.iter().flat_map(|z| [z.re, z.im]))
}

fn unflatten(v: &DVector<f64>, n: usize) -> CMatrix {
    let mut m = CMatrix::from_fn(n, n, |r, c| {
        let k = 2 * (c * n + r);
        Complex64::new(v[k], v[k + 1])
    });
    hermitize(&mut m);
    m
}

/// `log m`, with eigenvalues floored at [`LOG_FLOOR`].
fn log_coordinates(m: &CMatrix) -> Result<DVector<f64>> {
    Ok(flatten(
        &eig_matrix(m.clone())?.apply(|l| l.max(LOG_FLOOR).ln()),
    ))
}

fn from_log_coordinates(v: &DVector<f64>, n: usize) -> Result<CMatrix> {
    let mut out = eig_matrix(unflatten(v, n))?.apply(f64::exp);
    normalize(&mut out);
    Ok(out)
}

fn within_trust_region(v: DVector<f64>, anchor: &DVector<f64>, n: usize) -> Result<DVector<f64>> {
    let norm = eig_matrix(unflatten(&(&v - anchor), n))?
        .values
        .iter()
        .fold(0.0_f64, |m, l| m.max(l.abs()));
    Ok(if norm > TRUST_RADIUS {
        anchor + (v - anchor) * (TRUST_RADIUS / norm)
    } else {
        v
    })
}

/// Anderson mixing over the last few `(x, G(x) - x)` pairs.
struct Anderson {
    history: VecDeque<(DVector<f64>, DVector<f64>)>,
}

impl Anderson {
    fn new() -> Self {
        Self {
            history: VecDeque::with_capacity(ANDERSON_MEMORY + 1),
        }
    }

    fn reset(&mut self) {
        self.history.clear();
    }

    /// Records `(x, g(x))` and returns the extrapolated point once there is history.
    fn step(&mut self, x: DVector<f64>, gx: DVector<f64>) -> Option<DVector<f64>> {
        let fv = &gx - &x;
        self.history.push_back((x, fv));
        if self.history.len() > ANDERSON_MEMORY + 1 {
            self.history.pop_front();
        }
        let m = self.history.len() - 1;
        if m == 0 {
            return None;
        }
        let (xk, fk) = self.history.back().expect("nonempty");
        let len = xk.len();
        let mut df = DMatrix::zeros(len, m);
        let mut dx = DMatrix::zeros(len, m);
        for j in 0..m {
            let (x0, f0) = &self.history[j];
            let (x1, f1) = &self.history[j + 1];
            df.set_column(j, &(f1 - f0));
            dx.set_column(j, &(x1 - x0));
        }
        let gamma = df.clone().svd(true, true).solve(fk, 1e-12).ok()?;
        if gamma.iter().any(|g| !g.is_finite()) {
            return None;
        }
        Some(xk + fk - (dx + df) * gamma)
    }
}

/// Divided difference of `x^p`.
fn power_slope(a: f64, b: f64, p: f64) -> f64 {
    if (a - b).abs() <= 1e-9 * a.max(b) {
        p * (0.5 * (a + b)).powf(p - 1.0)
    } else {
        (a.powf(p) - b.powf(p)) / (a - b)
    }
}

/// Euclidean gradient of `eta -> tr((eta^g rho eta^g)^alpha)`, written through
/// `M = rho^{1/2} (I ⊗ eta^{2g}) rho^{1/2}` so that a near-singular `eta` needs no inverse.
struct Gradient {
    rho_half: CMatrix,
    d_a: usize,
    alpha: f64,
}

impl Gradient {
    fn new(rho: &BipartiteState, alpha: f64) -> Result<Self> {
        let rho_half = eig_matrix(rho.matrix().clone())?.apply_on_support(f64::sqrt);
        Ok(Self {
            rho_half,
            d_a: rho.d_a(),
            alpha,
        })
    }

    /// `(q, G)` with `dq = tr(G d eta)`.
    fn at(&self, eta: &CMatrix) -> Result<(f64, CMatrix)> {
        self.at_eigen(&eig_matrix(eta.clone())?, LOG_FLOOR)
    }

    /// As [`Gradient::at`] for `eta` given by its eigenpairs, which keeps tiny eigenvalues
    /// to full relative precision. Slopes are taken at eigenvalues no smaller than `floor`.
    fn at_eigen(&self, eig: &Eigen, floor: f64) -> Result<(f64, CMatrix)> {
        let p = (1.0 - self.alpha) / self.alpha;
        let n = eig.values.len();
        let s = eig.apply(|l| l.max(0.0).powf(p));
        let lifted = CMatrix::from_fn(self.d_a * n, self.d_a * n, |r, c| {
            if r / n == c / n {
                s[(r % n, c % n)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut m = &self.rho_half * lifted * &self.rho_half;
        hermitize(&mut m);
        let m_eig = eig_matrix(m)?;
        // Roundoff in the kernel of a rank-deficient `rho` would otherwise add `eps^alpha`.
        let cut = m_eig.cutoff();
        let q = m_eig
            .values
            .iter()
            .filter(|&&l| l > cut)
            .map(|l| l.powf(self.alpha))
            .sum();
        let m_pow = m_eig.apply_on_support(|l| l.powf(self.alpha - 1.0));
        let w = &self.rho_half * m_pow * &self.rho_half;
        let y = eig.vectors.adjoint() * trace_out_a(&w, self.d_a, n) * &eig.vectors;
        let lam: Vec<f64> = eig.values.iter().map(|l| l.max(floor)).collect();
        let inner = CMatrix::from_fn(n, n, |i, j| {
            y[(i, j)] * (self.alpha * power_slope(lam[i], lam[j], p))
        });
        let mut g = &eig.vectors * inner * eig.vectors.adjoint();
        hermitize(&mut g);
        Ok((q, g))
    }
}

/// `(q, bits)` at `eta`, where `bits` bounds its shortfall from the supremum.
///
/// Slopes are taken at the exact eigenvalues: clamping them would understate `G` along
/// tiny eigenvalues and with it the gap. Roundoff in a kernel therefore makes the bound
/// loose, never wrong.
fn certificate(gradient: &Gradient, eta: &CMatrix, alpha: f64) -> Result<(f64, f64)> {
    let mut eig = eig_matrix(eta.clone())?;
    eig.values.iter_mut().for_each(|l| *l = l.max(0.0));
    let (q, g) = gradient.at_eigen(&eig, EXACT_FLOOR)?;
    Ok((q, gap_in_bits(q, eigen_gap(&eig, &g)?, alpha)))
}

/// Upper bound on the supremum, in bits, from the dual problem on a purification:
/// `H_alpha(A|B) <= D_beta(rho_AC || I ⊗ sigma)` for every `sigma_C`, with
/// `1/alpha + 1/beta = 2`. `None` at `alpha = 1/2`, where `beta` is infinite, and when the
/// dual iterate does not cover the support of `rho_C`.
fn dual_bound(rho: &BipartiteState, alpha: f64) -> Result<Option<f64>> {
    if alpha <= 0.5 {
        return Ok(None);
    }
    let ac = complementary_state(rho)?;
    let beta = alpha / (2.0 * alpha - 1.0);
    let out = damped_iteration(&ac, beta, DUAL_ITERATIONS, DUAL_TOL)?;
    let eig = eig_matrix(out.eta)?;
    if eig.values.iter().any(|&l| l <= eig.cutoff()) {
        return Ok(None);
    }
    let (q, _) = StationaryMap::new(&ac, beta).apply(&eig)?;
    Ok(Some(q.log2() / (beta - 1.0)))
}

fn entropy_bits(q: f64, alpha: f64) -> f64 {
    q.log2() / (1.0 - alpha)
}

/// Frank–Wolfe gap at `eta` given by its eigenpairs.
fn eigen_gap(eig: &Eigen, g: &CMatrix) -> Result<f64> {
    let diag = (eig.vectors.adjoint() * g * &eig.vectors).diagonal();
    let inner: f64 = (0..diag.len())
        .map(|i| eig.values[i].max(0.0) * diag[i].re)
        .sum();
    let top = eig_matrix(g.clone())?
        .values
        .iter()
        .fold(f64::NEG_INFINITY, |m, &l| m.max(l));
    Ok((top - inner).max(0.0))
}

/// Converts a gap in `q` into a bound on the entropy shortfall.
fn gap_in_bits(q: f64, gap: f64, alpha: f64) -> f64 {
    (gap / q).ln_1p() / std::f64::consts::LN_2 / (1.0 - alpha)
}

fn factor_to_state(x: &[f64], n: usize) -> (CMatrix, CMatrix, f64) {
    let f = CMatrix::from_fn(n, n, |r, c| {
        let k = 2 * (c * n + r);
        Complex64::new(x[k], x[k + 1])
    });
    let mut eta = &f * f.adjoint();
    hermitize(&mut eta);
    let t: f64 = (0..n).map(|i| eta[(i, i)].re).sum();
    eta /= Complex64::new(t, 0.0);
    (f, eta, t)
}

/// L-BFGS on `-ln q` over `eta = X X^† / tr(X X^†)`. Unlike the multiplicative map this
/// can rotate the kernel of `eta`, so it reaches optima on the boundary of the simplex.
fn polish(gradient: &Gradient, eta: &CMatrix) -> Result<(f64, CMatrix)> {
    let n = eta.nrows();
    let start = flatten(&eig_matrix(eta.clone())?.apply(|l| l.max(0.0).sqrt()));
    let f = |x: &[f64]| {
        let (factor, eta, t) = factor_to_state(x, n);
        match gradient.at(&eta) {
            Ok((q, g)) if q > 0.0 => {
                let mu = overlap(&eta, &g);
                let shifted = &g - CMatrix::identity(n, n) * Complex64::new(mu, 0.0);
                let a = shifted * factor * Complex64::new(-2.0 / (t * q), 0.0);
                (-q.ln(), a.iter().flat_map(|z| [z.re, z.im]).collect())
            }
            _ => (f64::INFINITY, vec![0.0; x.len()]),
        }
    };
    let m = lbfgs(f, start.as_slice(), POLISH_ITERATIONS, 1e-13)?;
    let (_, eta, _) = factor_to_state(&m.x, n);
    Ok((gradient.at(&eta)?.0, eta))
}

fn concave_ascent(
    rho: &BipartiteState,
    alpha: f64,
    max_iter: usize,
    tol: f64,
    gap_tol: f64,
) -> Result<FixedPointOutcome> {
    let map = StationaryMap::new(rho, alpha);
    let gradient = Gradient::new(rho, alpha)?;
    let mut eta = rho.marginal_b().matrix().clone();
    let mut iterations = 0;
    let mut best: Option<FixedPointOutcome> = None;
    // Computed on the first round the gap alone does not certify.
    let mut upper: Option<Option<f64>> = None;
    // The map sets tiny eigenvalues to their stationary size, which the gap is sensitive
    // to; the polish rotates the kernel, which the map cannot. They alternate.
    for round in 0..POLISH_ROUNDS {
        let budget = if round == 0 { max_iter } else { POLISH_AFTER };
        let mut out = map_phase(&map, &gradient, eta, budget.max(1), tol, gap_tol)?;
        iterations += out.iterations;
        out.iterations = iterations;
        let mut bits = out.gap.expect("set by map_phase");
        if bits > gap_tol {
            if upper.is_none() {
                upper = Some(dual_bound(rho, alpha)?);
            }
            if let Some(Some(u)) = upper {
                bits = bits.min((u - entropy_bits(out.q, alpha)).max(0.0));
                out.gap = Some(bits);
            }
        }
        if best
            .as_ref()
            .is_none_or(|b| bits < b.gap.expect("set by map_phase"))
        {
            best = Some(out.clone());
        }
        if bits <= gap_tol || iterations >= max_iter {
            break;
        }
        let (q_polished, polished) = polish(&gradient, &out.eta)?;
        if q_polished < out.q * (1.0 - 4.0 * f64::EPSILON) {
            break;
        }
        eta = polished;
    }
    Ok(best.expect("at least one round runs"))
}

/// Anderson-accelerated map iteration from `eta`, stopped once certified, once the map
/// has converged, or after [`POLISH_AFTER`] iterations.
fn map_phase(
    map: &StationaryMap<'_>,
    gradient: &Gradient,
    mut eta: CMatrix,
    max_iter: usize,
    tol: f64,
    gap_tol: f64,
) -> Result<FixedPointOutcome> {
    let n = eta.nrows();
    let mut anderson = Anderson::new();
    // `(q, T(x))` at the point an extrapolation started from.
    let mut fallback: Option<(f64, CMatrix)> = None;
    let mut since_check = 0;
    let mut settled_bits = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let eig = eig_matrix(eta.clone())?;
        let (q, image) = map.apply(&eig)?;
        // The plain map never lowers q here; an extrapolation that does is undone.
        if let Some((q_source, plain)) = fallback.take() {
            if q < q_source {
                anderson.reset();
                eta = plain;
                continue;
            }
        }
        residual = trace_norm_half(&image - &eta)?;
        since_check += 1;
        let settled = residual < tol;
        let first_settled = settled && settled_bits == f64::INFINITY;
        if first_settled
            || since_check
                >= if settled {
                    SETTLED_CHECK_EVERY
                } else {
                    CHECK_EVERY
                }
        {
            since_check = 0;
            let (_, bits) = certificate(gradient, &eta, map.alpha)?;
            if bits <= gap_tol || it >= POLISH_AFTER {
                break;
            }
            // Below `tol` the trace distance no longer sees tiny eigenvalues, which keep
            // converging; stop once the gap stops shrinking.
            if settled {
                if bits > 0.5 * settled_bits {
                    break;
                }
                settled_bits = bits;
            }
        }
        let gx = log_coordinates(&image)?;
        let candidate = anderson
            .step(log_coordinates(&eta)?, gx.clone())
            .map(|v| within_trust_region(v, &gx, n))
            .transpose()?;
        eta = match candidate {
            Some(v) => {
                fallback = Some((q, image));
                from_log_coordinates(&v, n)?
            }
            None => image,
        };
    }
    let (q, bits) = certificate(gradient, &eta, map.alpha)?;
    Ok(FixedPointOutcome {
        q,
        eta,
        iterations: it,
        residual,
        gap: Some(bits),
    })
}

/// Bound, in bits, on how far `eta` is from the supremum for `alpha < 1`: the Frank–Wolfe
/// gap, or the distance to the dual bound when that is tighter.
pub(crate) fn entropy_gap(rho: &BipartiteState, alpha: f64, eta: &CMatrix) -> Result<f64> {
    let (q, bits) = certificate(&Gradient::new(rho, alpha)?, eta, alpha)?;
    Ok(match dual_bound(rho, alpha)? {
        Some(u) => bits.min((u - entropy_bits(q, alpha)).max(0.0)),
        None => bits,
    })
}
