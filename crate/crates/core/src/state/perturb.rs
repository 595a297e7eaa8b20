//! Perturbations that stay within a trace-distance budget.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sampling::{
    random_bipartite_classical, random_density, random_traceless_hermitian, rng_from_seed,
    ClassicalStructure, Ensemble,
};
use super::{BipartiteState, DensityOperator};
use crate::distance::trace_distance;
use crate::error::{invalid, Error, Result};
use crate::operator::eig_matrix;

const BISECTION_TOL: f64 = 1e-6;
const BISECTION_MAX_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PerturbationMode {
    /// `sigma = (1 - t) rho + t tau` with `tau` Hilbert–Schmidt random.
    #[default]
    Mixing,
    /// `sigma = normalize(clip(rho + s H))` with `H` traceless, `s` found by bisection.
    HermitianDirection,
    /// Mixing with a `tau` that shares `rho`'s classical structure.
    ClassicalOnly,
}

impl fmt::Display for PerturbationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbationMode::Mixing => "mixing",
            PerturbationMode::HermitianDirection => "hermitian-direction",
            PerturbationMode::ClassicalOnly => "classical-only",
        })
    }
}

impl FromStr for PerturbationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mixing" => Ok(PerturbationMode::Mixing),
            "hermitian-direction" => Ok(PerturbationMode::HermitianDirection),
            "classical-only" => Ok(PerturbationMode::ClassicalOnly),
            other => Err(invalid(format!(
                "unknown perturbation mode '{other}' (expected mixing, hermitian-direction or classical-only)"
            ))),
        }
    }
}

impl Serialize for PerturbationMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PerturbationMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub mode: PerturbationMode,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64, mode: PerturbationMode, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(invalid(format!(
                "epsilon must lie in [0, 1], got {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            mode,
            seed,
        })
    }
}

/// A perturbed state and its actual trace distance from the original.
#[derive(Clone, Debug)]
pub struct Perturbed {
    pub sigma: BipartiteState,
    pub realized: f64,
}

/// Returns `sigma` with `trace_distance(rho, sigma) <= spec.epsilon`.
pub fn perturb_within(rho: &BipartiteState, spec: &PerturbationSpec) -> Result<Perturbed> {
    if !(0.0..=1.0).contains(&spec.epsilon) {
        return Err(invalid(format!(
            "epsilon must lie in [0, 1], got {}",
            spec.epsilon
        )));
    }
    if spec.epsilon == 0.0 {
        return Ok(Perturbed {
            sigma: rho.clone(),
            realized: 0.0,
        });
    }
    let (d_a, d_b) = rho.dims();
    let mut rng = rng_from_seed(spec.seed);
    match spec.mode {
        PerturbationMode::Mixing => {
            let tau = random_density(d_a * d_b, Ensemble::HilbertSchmidt, &mut rng)?;
            let sigma = mix_toward(rho.density(), &tau, spec.epsilon)?;
            finish(rho, sigma, false, false)
        }
        PerturbationMode::ClassicalOnly => {
            let structure = ClassicalStructure::from_flags(rho.classical_a(), rho.classical_b())
                .ok_or_else(|| {
                    invalid("classical-only perturbation needs a state with a classical flag")
                })?;
            let tau = random_bipartite_classical(d_a, d_b, structure, &mut rng)?;
            let sigma = mix_toward(rho.density(), tau.density(), spec.epsilon)?;
            finish(rho, sigma, rho.classical_a(), rho.classical_b())
        }
        PerturbationMode::HermitianDirection => {
            let dir = random_traceless_hermitian(d_a * d_b, &mut rng)?;
            let sigma = along_direction(rho.density(), dir.matrix(), spec.epsilon)?;
            finish(rho, sigma, false, false)
        }
    }
}

fn finish(
    rho: &BipartiteState,
    sigma: DensityOperator,
    classical_a: bool,
    classical_b: bool,
) -> Result<Perturbed> {
    let realized = trace_distance(rho.density().hermitian(), sigma.hermitian())?;
    let (d_a, d_b) = rho.dims();
    Ok(Perturbed {
        sigma: BipartiteState::from_parts_unchecked(sigma, d_a, d_b, classical_a, classical_b),
        realized,
    })
}

fn mix_toward(
    rho: &DensityOperator,
    tau: &DensityOperator,
    epsilon: f64,
) -> Result<DensityOperator> {
    let full = trace_distance(rho.hermitian(), tau.hermitian())?;
    let t = if full > epsilon { epsilon / full } else { 1.0 };
    rho.mix(tau, t)
}

/// Clipped, renormalized `rho + s * dir`.
fn clipped_step(
    rho: &DensityOperator,
    dir: &crate::operator::CMatrix,
    s: f64,
) -> Result<DensityOperator> {
    let shifted = rho.matrix() + dir * Complex64::new(s, 0.0);
    let eig = eig_matrix(shifted)?;
    let clipped = eig.apply(|l| l.max(0.0));
    Ok(DensityOperator::from_matrix_unchecked(clipped))
}

fn along_direction(
    rho: &DensityOperator,
    dir: &crate::operator::CMatrix,
    epsilon: f64,
) -> Result<DensityOperator> {
    let dist = |s: f64| -> Result<(f64, DensityOperator)> {
        let sigma = clipped_step(rho, dir, s)?;
        Ok((trace_distance(rho.hermitian(), sigma.hermitian())?, sigma))
    };
    // Invariant: d(lo) <= epsilon. `hi` brackets from above once d(hi) > epsilon.
    let mut lo = (0.0, 0.0, rho.clone());
    let mut hi = epsilon;
    loop {
        let (d, sigma) = dist(hi)?;
        if d > epsilon {
            break;
        }
        lo = (hi, d, sigma);
        if epsilon - d <= BISECTION_TOL || hi > 1e6 {
            return Ok(lo.2);
        }
        hi *= 2.0;
    }
    for _ in 0..BISECTION_MAX_STEPS {
        if epsilon - lo.1 <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo.0 + hi);
        let (d, sigma) = dist(mid)?;
        if d <= epsilon {
            lo = (mid, d, sigma);
        } else {
            hi = mid;
        }
    }
    Ok(lo.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::HermitianOperator;
    use crate::state::{make_cq_state, sample_random_state, Ensemble};

    #[test]
    fn zero_epsilon_returns_rho_exactly() {
        let rho = sample_random_state(2, 2, Ensemble::HilbertSchmidt, 1).unwrap();
        for mode in [
            PerturbationMode::Mixing,
            PerturbationMode::HermitianDirection,
        ] {
            let p = perturb_within(&rho, &PerturbationSpec::new(0.0, mode, 4).unwrap()).unwrap();
            assert_eq!(p.sigma, rho);
            assert_eq!(p.realized, 0.0);
        }
    }

    #[test]
    fn mixing_hits_the_budget_when_tau_is_far() {
        let rho = sample_random_state(2, 2, Ensemble::HaarPure, 2).unwrap();
        let p = perturb_within(
            &rho,
            &PerturbationSpec::new(0.05, PerturbationMode::Mixing, 3).unwrap(),
        )
        .unwrap();
        assert!((p.realized - 0.05).abs() < 1e-12);
    }

    #[test]
    fn hermitian_direction_on_pure_qubit() {
        let rho = BipartiteState::new(
            DensityOperator::from_hermitian(HermitianOperator::from_real_diagonal(&[1.0, 0.0]))
                .unwrap(),
            2,
            1,
        )
        .unwrap();
        for seed in 0..20 {
            let spec =
                PerturbationSpec::new(0.3, PerturbationMode::HermitianDirection, seed).unwrap();
            let p = perturb_within(&rho, &spec).unwrap();
            let brute =
                trace_distance(rho.density().hermitian(), p.sigma.density().hermitian()).unwrap();
            assert_eq!(brute, p.realized);
            assert!(p.realized <= 0.3 + 1e-10);
            assert!(p.realized >= 0.15, "seed {seed}: realized {}", p.realized);
        }
    }

    #[test]
    fn classical_only_keeps_diagonal() {
        let rho = make_cq_state(&[vec![0.7, 0.1], vec![0.0, 0.2]]).unwrap();
        let spec = PerturbationSpec::new(0.2, PerturbationMode::ClassicalOnly, 8).unwrap();
        let p = perturb_within(&rho, &spec).unwrap();
        assert!(p.sigma.classical_a() && p.sigma.classical_b());
        let m = p.sigma.matrix();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(m[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        assert!(p.realized <= 0.2 + 1e-10);
    }

    #[test]
    fn classical_only_requires_flags() {
        let rho = sample_random_state(2, 2, Ensemble::HilbertSchmidt, 1).unwrap();
        let spec = PerturbationSpec::new(0.2, PerturbationMode::ClassicalOnly, 8).unwrap();
        assert!(perturb_within(&rho, &spec).is_err());
    }

    #[test]
    fn rejects_out_of_range_epsilon() {
        assert!(PerturbationSpec::new(1.5, PerturbationMode::Mixing, 0).is_err());
        assert!(PerturbationSpec::new(-0.1, PerturbationMode::Mixing, 0).is_err());
    }
}
