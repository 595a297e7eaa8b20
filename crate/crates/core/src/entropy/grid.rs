//! Brute-force oracle over the Bloch ball for a qubit conditioning system.
//!
//! With `eta = (I + r·sigma)/2`, `eta^{-a'}` is `c0 I + c1 n·sigma`, so on the support of
//! `rho` the sandwiched operator is `c0 P0 + c1 sum_k n_k P_k` with
//! `P_k = rho^{1/2} (I ⊗ sigma_k) rho^{1/2}` fixed. Each grid point then costs one small
//! eigenvalue problem.

use num_complex::Complex64;

use super::divergence::{sum_powers, KERNEL_TOL};
use crate::error::{invalid, Result};
use crate::operator::{eigenvalues_matrix, hermitize, identity_kron, CMatrix, SUPPORT_CUTOFF};
use crate::state::BipartiteState;

#[derive(Clone, Debug)]
pub(crate) struct GridOutcome {
    pub value: f64,
    pub eta: CMatrix,
    pub points: usize,
    pub spacing: f64,
}

fn paulis() -> [CMatrix; 4] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    ]
}

pub(crate) fn bloch_density(r: [f64; 3]) -> CMatrix {
    let s = paulis();
    let mut eta = s[0].clone();
    for k in 0..3 {
        eta += &s[k + 1] * Complex64::new(r[k], 0.0);
    }
    eta * Complex64::new(0.5, 0.0)
}

/// Sandwiched operator pieces restricted to the support of `rho`.
struct Basis {
    dim: usize,
    /// Row-major `P_0..P_3`.
    p: [Vec<Complex64>; 4],
    gram: [[f64; 4]; 4],
    bloch_b: [f64; 3],
}

impl Basis {
    fn new(rho: &BipartiteState) -> Result<Self> {
        let eig = rho.psd().eigen()?;
        let cut = eig.cutoff();
        let support: Vec<usize> = (0..eig.values.len())
            .filter(|&i| eig.values[i] > cut)
            .collect();
        let n = rho.matrix().nrows();
        let r = support.len();
        let b = CMatrix::from_fn(n, r, |i, j| {
            let k = support[j];
            eig.vectors[(i, k)] * eig.values[k].sqrt()
        });
        let s = paulis();
        let mut p: [Vec<Complex64>; 4] = Default::default();
        for (a, sigma) in s.iter().enumerate() {
            let mut m = b.adjoint() * identity_kron(rho.d_a(), sigma) * &b;
            hermitize(&mut m);
            p[a] = m.transpose().iter().copied().collect();
        }
        let mut gram = [[0.0; 4]; 4];
        for a in 0..4 {
            for c in 0..4 {
                gram[a][c] = p[a]
                    .iter()
                    .zip(p[c].iter())
                    .map(|(x, y)| (x.conj() * y).re)
                    .sum();
            }
        }
        let rho_b = rho.marginal_b();
        let mb = rho_b.matrix();
        let bloch_b = [
            2.0 * mb[(0, 1)].re,
            -2.0 * mb[(0, 1)].im,
            (mb[(0, 0)] - mb[(1, 1)]).re,
        ];
        Ok(Self {
            dim: r,
            p,
            gram,
            bloch_b,
        })
    }

    fn combine(&self, c: &[f64; 4], out: &mut [Complex64]) {
        for (i, z) in out.iter_mut().enumerate() {
            *z = self.p[0][i] * c[0]
                + self.p[1][i] * c[1]
                + self.p[2][i] * c[2]
                + self.p[3][i] * c[3];
        }
    }
}

/// Maximizes `H` over a `resolution^3` lattice clipped to the closed Bloch ball.
pub(crate) fn grid_oracle(
    rho: &BipartiteState,
    alpha: f64,
    resolution: usize,
) -> Result<GridOutcome> {
    if rho.d_b() != 2 {
        return Err(invalid(format!(
            "grid oracle needs d_B = 2, got {}",
            rho.d_b()
        )));
    }
    if resolution < 2 {
        return Err(invalid("grid resolution must be at least 2"));
    }
    let basis = Basis::new(rho)?;
    let r = basis.dim;
    let steps = resolution - 1;
    let scale = steps as f64;
    // Lattice coordinate u in {-steps, -steps+2, ..., steps} stands for u / steps.
    let coords: Vec<i64> = (0..resolution as i64)
        .map(|i| 2 * i - steps as i64)
        .collect();
    let radius2 = (steps * steps) as i64;
    let expo = (1.0 - alpha) / alpha;
    let f = |e: f64| {
        if e > SUPPORT_CUTOFF {
            e.powf(expo)
        } else {
            0.0
        }
    };
    // (c0, c1/|r|) for every squared radius on the lattice.
    let shell: Vec<(f64, f64)> = (0..=radius2)
        .map(|m2| {
            let rr = (m2 as f64).sqrt() / scale;
            let (e_plus, e_minus) = if m2 == radius2 {
                (1.0, 0.0)
            } else {
                ((1.0 + rr) / 2.0, (1.0 - rr) / 2.0)
            };
            let (fp, fm) = (f(e_plus), f(e_minus));
            let c1 = if m2 == 0 {
                0.0
            } else {
                (fp - fm) / 2.0 / (rr * scale)
            };
            ((fp + fm) / 2.0, c1)
        })
        .collect();
    let mut x = vec![Complex64::new(0.0, 0.0); r * r];
    let mut best_q = if alpha < 1.0 { 0.0 } else { f64::INFINITY };
    let mut best_r = None;
    let mut points = 0;
    let mut hint = None;
    for &ux in &coords {
        for &uy in &coords {
            let mxy = ux * ux + uy * uy;
            if mxy > radius2 {
                continue;
            }
            for &uz in &coords {
                let m2 = mxy + uz * uz;
                if m2 > radius2 {
                    continue;
                }
                points += 1;
                let pure = m2 == radius2;
                if pure && alpha > 1.0 {
                    let b = &basis.bloch_b;
                    let dot = (ux as f64 * b[0] + uy as f64 * b[1] + uz as f64 * b[2]) / scale;
                    if (1.0 - dot) / 2.0 > KERNEL_TOL {
                        continue;
                    }
                }
                let (c0, c1) = shell[m2 as usize];
                let c = [c0, c1 * ux as f64, c1 * uy as f64, c1 * uz as f64];
                let q = if alpha == 2.0 {
                    let mut s = 0.0;
                    for a in 0..4 {
                        for b in 0..4 {
                            s += c[a] * c[b] * basis.gram[a][b];
                        }
                    }
                    s
                } else {
                    basis.combine(&c, &mut x);
                    let fast = if r == 4 && !pure {
                        eigenvalues4_near(&x, hint)
                    } else {
                        None
                    };
                    match fast {
                        Some(vals) => {
                            hint = Some([vals[0], vals[1]]);
                            sum_powers(&vals, alpha)
                        }
                        None => {
                            let m = CMatrix::from_row_slice(r, r, &x);
                            sum_powers(&eigenvalues_matrix(m)?, alpha)
                        }
                    }
                };
                let better = if alpha < 1.0 {
                    q > best_q
                } else {
                    q > 0.0 && q < best_q
                };
                if better {
                    best_q = q;
                    best_r = Some([ux as f64 / scale, uy as f64 / scale, uz as f64 / scale]);
                }
            }
        }
    }
    let best = best_r.ok_or_else(|| invalid("grid oracle found no admissible point"))?;
    Ok(GridOutcome {
        value: best_q.log2() / (1.0 - alpha),
        eta: bloch_density(best),
        points,
        spacing: 2.0 / scale,
    })
}

/// Eigenvalues of a row-major 4x4 Hermitian matrix via its characteristic polynomial.
///
/// Returns `None` when two eigenvalues are small relative to the largest, or a root of
/// multiplicity three or more slows Newton down; both lose accuracy in the polynomial
/// coefficients, and callers fall back to a full eigensolver.
#[cfg(test)]
fn eigenvalues4(x: &[Complex64]) -> Option<[f64; 4]> {
    eigenvalues4_near(x, None)
}

/// Eigenvalues of a 4x4 Hermitian matrix, seeded with the two largest eigenvalues of a nearby matrix as starting points.
pub(crate) fn eigenvalues4_near(x: &[Complex64], hint: Option<[f64; 2]>) -> Option<[f64; 4]> {
    let a: &[Complex64; 16] = x.try_into().ok()?;
    let at = |i: usize, j: usize| a[i * 4 + j];
    let d = [a[0].re, a[5].re, a[10].re, a[15].re];
    // Characteristic coefficients as sums of principal minors.
    let e1 = d[0] + d[1] + d[2] + d[3];
    let mut e2 = 0.0;
    let mut frob = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
    for i in 0..4 {
        for j in (i + 1)..4 {
            let n = at(i, j).norm_sqr();
            e2 += d[i] * d[j] - n;
            frob += 2.0 * n;
        }
    }
    let mut e3 = 0.0;
    for (i, j, l) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        let (u, v, w) = (at(i, j), at(j, l), at(i, l));
        e3 += d[i] * d[j] * d[l] + 2.0 * (u * v * w.conj()).re
            - d[i] * v.norm_sqr()
            - d[j] * w.norm_sqr()
            - d[l] * u.norm_sqr();
    }
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
        at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0)
    };
    let e4 = (minor(0, 1, 0, 1) * minor(2, 3, 2, 3) - minor(0, 1, 0, 2) * minor(2, 3, 1, 3)
        + minor(0, 1, 0, 3) * minor(2, 3, 1, 2)
        + minor(0, 1, 1, 2) * minor(2, 3, 0, 3)
        - minor(0, 1, 1, 3) * minor(2, 3, 0, 2)
        + minor(0, 1, 2, 3) * minor(2, 3, 0, 1))
    .re;
    let scale = frob.sqrt();
    if !(scale > 0.0) {
        return None;
    }

    let quartic = |t: f64| {
        (
            (((t - e1) * t + e2) * t - e3) * t + e4,
            (((4.0 * t - 3.0 * e1) * t + 2.0 * e2) * t - e3),
        )
    };
    // t bounds every root from above iff all Taylor coefficients of the polynomial at t are >= 0.
    let above_quartic = |t: f64| {
        let (p, dp) = quartic(t);
        p >= 0.0 && dp >= 0.0 && (6.0 * t - 3.0 * e1) * t + e2 >= 0.0 && 4.0 * t >= e1
    };
    let start = match hint {
        Some([h1, _]) if h1 * 1.02 < scale && above_quartic(h1 * 1.02) => h1 * 1.02,
        _ => scale * (1.0 + 1e-12),
    };
    let r1 = newton_from_above(quartic, start, scale)?;
    let b2 = r1 - e1;
    let b1 = e2 + r1 * b2;
    let b0 = -e3 + r1 * b1;
    let cubic = |t: f64| (((t + b2) * t + b1) * t + b0, (3.0 * t + 2.0 * b2) * t + b1);
    let above_cubic = |t: f64| {
        let (p, dp) = cubic(t);
        p >= 0.0 && dp >= 0.0 && 3.0 * t + b2 >= 0.0
    };
    let start = match hint {
        Some([_, h2]) if h2 * 1.02 < r1 && above_cubic(h2 * 1.02) => h2 * 1.02,
        _ => r1,
    };
    let r2 = newton_from_above(cubic, start, scale)?;
    let c1 = b2 + r2;
    let c0 = b1 + r2 * c1;
    let sum = -c1;
    let disc = (sum * sum - 4.0 * c0).max(0.0).sqrt();
    let r3 = (sum + disc) / 2.0;
    if !(r3 >= 1e-4 * r1 && r2 >= r3) {
        return None;
    }
    let r4 = c0 / r3;
    let vals = [r1, r2, r3, r4];
    vals.iter().all(|v| v.is_finite()).then_some(vals)
}

/// Largest root of a real-rooted polynomial by Newton's method started above it.
fn newton_from_above(p: impl Fn(f64) -> (f64, f64), start: f64, scale: f64) -> Option<f64> {
    let mut t = start;
    // A double root halves the error per step; slower progress means higher multiplicity.
    for _ in 0..70 {
        let (f, fp) = p(t);
        if f <= 0.0 || fp <= 0.0 {
            return Some(t);
        }
        let dt = f / fp;
        t -= dt;
        if dt <= 1e-15 * scale {
            return Some(t);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::direct_search::Objective;
    use crate::state::{random_psd, rng_from_seed, sample_random_state, Ensemble};

    #[test]
    fn fast_eigenvalues_match_dense_solver() {
        let mut rng = rng_from_seed(11);
        let mut fallbacks = 0;
        for trial in 0..500 {
            let rank = 1 + trial % 4;
            let p = random_psd(4, rank, &mut rng).unwrap();
            let x: Vec<Complex64> = p.matrix().transpose().iter().copied().collect();
            let dense = eigenvalues_matrix(p.matrix().clone()).unwrap();
            match eigenvalues4(&x) {
                Some(vals) => {
                    for alpha in [0.5, 0.75, 3.0] {
                        let a = sum_powers(&vals, alpha);
                        let b = sum_powers(&dense, alpha);
                        assert!(
                            (a - b).abs() <= 1e-10 * b.max(1.0),
                            "trial {trial}: {a} vs {b} {vals:?} {dense:?}"
                        );
                    }
                }
                None => fallbacks += 1,
            }
        }
        assert!(
            fallbacks >= 250,
            "ranks 1 and 2 must fall back, got {fallbacks}"
        );
    }

    #[test]
    fn grid_values_match_direct_evaluation() {
        for seed in 0..5 {
            let rho = sample_random_state(2, 2, Ensemble::HilbertSchmidt, seed).unwrap();
            for alpha in [0.5, 0.75, 2.0, 3.0] {
                let out = grid_oracle(&rho, alpha, 11).unwrap();
                let direct = Objective::new(&rho, alpha).at(&out.eta).unwrap();
                assert!(
                    (out.value - direct).abs() < 1e-10,
                    "{} vs {direct}",
                    out.value
                );
            }
        }
    }

    #[test]
    fn maximally_mixed_center_point() {
        let rho =
            BipartiteState::new(crate::state::DensityOperator::maximally_mixed(4), 2, 2).unwrap();
        let out = grid_oracle(&rho, 0.75, 21).unwrap();
        assert!((out.value - 1.0).abs() < 1e-12);
        assert!(crate::operator::eig_matrix(out.eta).is_ok());
    }
}
