//! Seeded random states.
//!
//! Every sampler draws from [`StateRng`], a ChaCha8 stream generator seeded
//! from a single `u64`. Campaign records store that seed, so any sample can
//! be regenerated bit-for-bit.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{BipartiteState, DensityOperator};
use crate::error::{invalid, Error, Result};
use crate::operator::{CMatrix, HermitianOperator, PsdOperator, ONE};

pub type StateRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic child seed for `index` under `master` (SplitMix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random-state ensembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ensemble {
    HaarPure,
    HilbertSchmidt,
    Bures,
    RankLimited(usize),
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ensemble::HaarPure => f.write_str("haar-pure"),
            Ensemble::HilbertSchmidt => f.write_str("hilbert-schmidt"),
            Ensemble::Bures => f.write_str("bures"),
            Ensemble::RankLimited(k) => write!(f, "rank-limited:{k}"),
        }
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar-pure" => Ok(Ensemble::HaarPure),
            "hilbert-schmidt" => Ok(Ensemble::HilbertSchmidt),
            "bures" => Ok(Ensemble::Bures),
            other => {
                let k = other
                    .strip_prefix("rank-limited:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| {
                        invalid(format!(
                            "unknown ensemble '{other}' (expected haar-pure, hilbert-schmidt, bures or rank-limited:K)"
                        ))
                    })?;
                Ok(Ensemble::RankLimited(k))
            }
        }
    }
}

impl Serialize for Ensemble {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ensemble {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn gaussian(rng: &mut StateRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut StateRng) -> CMatrix {
    // column-major fill order is part of the reproducibility contract
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s diagonal removed.
pub fn haar_unitary(n: usize, rng: &mut StateRng) -> CMatrix {
    let qr = ginibre(n, n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    q
}

/// Normalized density operator of dimension `n` from `ensemble`.
pub fn random_density(n: usize, ensemble: Ensemble, rng: &mut StateRng) -> Result<DensityOperator> {
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let m = match ensemble {
        Ensemble::HaarPure => {
            let v = DVector::from_fn(n, |_, _| gaussian(rng));
            return DensityOperator::pure(&v);
        }
        Ensemble::HilbertSchmidt => ginibre(n, n, rng),
        Ensemble::Bures => {
            let u = haar_unitary(n, rng);
            let g = ginibre(n, n, rng);
            (CMatrix::identity(n, n) + u) * g
        }
        Ensemble::RankLimited(k) => {
            if k == 0 || k > n {
                return Err(invalid(format!("rank {k} must lie in 1..={n}")));
            }
            ginibre(n, k, rng)
        }
    };
    Ok(DensityOperator::from_matrix_unchecked(&m * m.adjoint()))
}

/// Random bipartite state on `d_a x d_b`, deterministic in `seed`.
pub fn sample_random_state(
    d_a: usize,
    d_b: usize,
    ensemble: Ensemble,
    seed: u64,
) -> Result<BipartiteState> {
    if d_a == 0 || d_b == 0 {
        return Err(invalid("dimensions must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let state = random_density(d_a * d_b, ensemble, &mut rng)?;
    Ok(BipartiteState::from_parts_unchecked(
        state, d_a, d_b, false, false,
    ))
}

/// Which subsystems of a random classical state are classical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalStructure {
    /// Diagonal in the product basis.
    Both,
    /// `sum_a p(a) |a><a| ⊗ rho_B^a`.
    AOnly,
    /// `sum_b p(b) rho_A^b ⊗ |b><b|`.
    BOnly,
}

impl ClassicalStructure {
    pub fn flags(self) -> (bool, bool) {
        match self {
            ClassicalStructure::Both => (true, true),
            ClassicalStructure::AOnly => (true, false),
            ClassicalStructure::BOnly => (false, true),
        }
    }

    pub fn from_flags(classical_a: bool, classical_b: bool) -> Option<Self> {
        match (classical_a, classical_b) {
            (true, true) => Some(ClassicalStructure::Both),
            (true, false) => Some(ClassicalStructure::AOnly),
            (false, true) => Some(ClassicalStructure::BOnly),
            (false, false) => None,
        }
    }
}

/// Random state that is exactly block diagonal in the classical basis or bases.
///
/// Diagonal entries are `|g|^2` for complex Gaussian `g` (uniform on the simplex after
/// normalization); quantum blocks are unnormalized `G G^†` Ginibre samples.
pub fn random_bipartite_classical(
    d_a: usize,
    d_b: usize,
    structure: ClassicalStructure,
    rng: &mut StateRng,
) -> Result<BipartiteState> {
    if d_a == 0 || d_b == 0 {
        return Err(invalid("dimensions must be at least 1"));
    }
    let n = d_a * d_b;
    let mut m = CMatrix::zeros(n, n);
    match structure {
        ClassicalStructure::Both => {
            for i in 0..n {
                m[(i, i)] = Complex64::new(gaussian(rng).norm_sqr(), 0.0);
            }
        }
        ClassicalStructure::AOnly => {
            for a in 0..d_a {
                let g = ginibre(d_b, d_b, rng);
                let block = &g * g.adjoint();
                m.view_mut((a * d_b, a * d_b), (d_b, d_b)).copy_from(&block);
            }
        }
        ClassicalStructure::BOnly => {
            for b in 0..d_b {
                let g = ginibre(d_a, d_a, rng);
                let block = &g * g.adjoint();
                for i in 0..d_a {
                    for j in 0..d_a {
                        m[(i * d_b + b, j * d_b + b)] = block[(i, j)];
                    }
                }
            }
        }
    }
    let (ca, cb) = structure.flags();
    let state = DensityOperator::from_matrix_unchecked(m);
    Ok(BipartiteState::from_parts_unchecked(
        state, d_a, d_b, ca, cb,
    ))
}

/// Unnormalized PSD operator `G G^†` with `G` Ginibre of shape `n x rank`.
pub fn random_psd(n: usize, rank: usize, rng: &mut StateRng) -> Result<PsdOperator> {
    if rank == 0 || rank > n {
        return Err(invalid(format!("rank {rank} must lie in 1..={n}")));
    }
    let g = ginibre(n, rank, rng);
    Ok(PsdOperator::from_matrix_unchecked(&g * g.adjoint()))
}

/// Random traceless Hermitian direction scaled so that `(1/2)||H||_1 = 1`.
pub fn random_traceless_hermitian(n: usize, rng: &mut StateRng) -> Result<HermitianOperator> {
    if n < 2 {
        return Ok(HermitianOperator::zeros(n.max(1)));
    }
    let g = ginibre(n, n, rng);
    let mut h = &g + g.adjoint();
    let shift = h.trace() / Complex64::new(n as f64, 0.0);
    for i in 0..n {
        h[(i, i)] -= shift;
    }
    let h = HermitianOperator::from_matrix_unchecked(h);
    let half_norm = 0.5
        * crate::operator::eigenvalues_matrix(h.matrix().clone())?
            .iter()
            .map(|l| l.abs())
            .sum::<f64>();
    if half_norm == 0.0 {
        return Ok(HermitianOperator::zeros(n));
    }
    Ok(h.scaled(1.0 / half_norm))
}
