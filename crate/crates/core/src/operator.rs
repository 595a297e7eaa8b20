//! Dense Hermitian linear algebra.
//!
//! Composite indices of bipartite operators follow `i = a * d_B + b`: the first
//! factor is the slow index, which is also what [`DMatrix::kronecker`] produces.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance on `|h_ij - conj(h_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative tolerance on negative eigenvalues of PSD operators.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues at or below `SUPPORT_CUTOFF * max(lambda_max, 1)` count as kernel.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Largest composite dimension [`tensor`] will build.
pub const MAX_DIM: usize = 4096;

const EIG_MAX_ITER: usize = 10_000;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity within [`HERMITIAN_TOL`] and symmetrizes the residual drift.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(invalid(format!(
                "matrix is not square: {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 {
            return Err(invalid("operator dimension must be at least 1"));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        let asym = max_asymmetry(&mat);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::from_matrix_unchecked(mat))
    }

    /// Row-major construction.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid(
                "matrix rows must all have length equal to the row count",
            ));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            mat: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(diag[i], 0.0)
                } else {
                    ZERO
                }
            }),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    /// Symmetrizes without checking; for operators produced by Hermiticity-preserving arithmetic.
    pub(crate) fn from_matrix_unchecked(mut mat: CMatrix) -> Self {
        hermitize(&mut mat);
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            mat: &self.mat * Complex64::new(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            mat: &self.mat - &other.mat,
        })
    }

    /// Row-major `(re, im)` pairs.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| [self.mat[(i, j)].re, self.mat[(i, j)].im])
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn check_same_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn max_asymmetry(mat: &CMatrix) -> f64 {
    let n = mat.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitize(mat: &mut CMatrix) {
    let n = mat.nrows();
    for i in 0..n {
        mat[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (mat[(i, j)] + mat[(j, i)].conj()) * 0.5;
            mat[(i, j)] = avg;
            mat[(j, i)] = avg.conj();
        }
    }
}

/// Spectral decomposition `h = V diag(values) V^†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    fn sorted(values: DVector<f64>, vectors: CMatrix) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        if order.iter().enumerate().all(|(i, &k)| i == k) {
            return Self { values, vectors };
        }
        let values = DVector::from_fn(n, |i, _| values[order[i]]);
        let vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Kernel threshold for this spectrum.
    pub fn cutoff(&self) -> f64 {
        SUPPORT_CUTOFF * self.max().max(1.0)
    }

    /// Number of eigenvalues above [`Self::cutoff`].
    pub fn rank(&self) -> usize {
        let cut = self.cutoff();
        self.values.iter().filter(|&&l| l > cut).count()
    }

    /// `V diag(f(lambda)) V^†`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= s;
            }
        }
        let mut out = &scaled * self.vectors.adjoint();
        hermitize(&mut out);
        out
    }

    /// Spectral function with the support convention: kernel eigenvalues map to zero.
    pub fn apply_on_support(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let cut = self.cutoff();
        self.apply(|l| if l > cut { f(l) } else { 0.0 })
    }
}

/// Eigendecomposition of a Hermitian operator.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<Eigen> {
    eig_matrix(h.matrix().clone())
}

pub(crate) fn eig_matrix(mat: CMatrix) -> Result<Eigen> {
    let eig = SymmetricEigen::try_new(mat, f64::EPSILON, EIG_MAX_ITER).ok_or(Error::Numerical {
        iterations: EIG_MAX_ITER,
        message: "Hermitian eigensolver did not converge".into(),
    })?;
    Ok(Eigen::sorted(eig.eigenvalues, eig.eigenvectors))
}

pub(crate) fn eigenvalues_matrix(mat: CMatrix) -> Result<Vec<f64>> {
    let n = mat.nrows();
    let vals = SymmetricEigen::try_new(mat, f64::EPSILON, EIG_MAX_ITER)
        .ok_or(Error::Numerical {
            iterations: EIG_MAX_ITER,
            message: "Hermitian eigensolver did not converge".into(),
        })?
        .eigenvalues;
    let mut v: Vec<f64> = (0..n).map(|i| vals[i]).collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Positive semidefinite operator with a lazily cached spectrum.
#[derive(Clone, Debug)]
pub struct PsdOperator {
    base: HermitianOperator,
    eigen: OnceLock<Eigen>,
}

impl PartialEq for PsdOperator {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl PsdOperator {
    /// Rejects operators whose smallest eigenvalue is below `-PSD_TOL * max(lambda_max, 1)`.
    pub fn new(base: HermitianOperator) -> Result<Self> {
        let eig = eig_hermitian(&base)?;
        let min = eig.min();
        if min < -PSD_TOL * eig.max().max(1.0) {
            return Err(Error::NotPsd(min));
        }
        let eigen = OnceLock::new();
        let _ = eigen.set(eig);
        Ok(Self { base, eigen })
    }

    pub(crate) fn from_hermitian_unchecked(base: HermitianOperator) -> Self {
        Self {
            base,
            eigen: OnceLock::new(),
        }
    }

    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self::from_hermitian_unchecked(HermitianOperator::from_matrix_unchecked(mat))
    }

    pub(crate) fn with_eigen(base: HermitianOperator, eig: Eigen) -> Self {
        let eigen = OnceLock::new();
        let _ = eigen.set(eig);
        Self { base, eigen }
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn trace(&self) -> f64 {
        self.base.trace()
    }

    /// Cached spectrum; computed on first access.
    pub fn eigen(&self) -> Result<&Eigen> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let e = eig_hermitian(&self.base)?;
        Ok(self.eigen.get_or_init(|| e))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.eigen()?.rank())
    }
}

/// Raises `p` to a real power on its support; kernel eigenvalues map to zero.
pub fn matrix_power(p: &PsdOperator, exponent: f64) -> Result<PsdOperator> {
    if !exponent.is_finite() {
        return Err(invalid(format!(
            "matrix power exponent must be finite, got {exponent}"
        )));
    }
    let eig = p.eigen()?;
    let cut = eig.cutoff();
    let map = |l: f64| if l > cut { l.powf(exponent) } else { 0.0 };
    let mat = eig.apply(map);
    let mapped = Eigen::sorted(eig.values.map(map), eig.vectors.clone());
    Ok(PsdOperator::with_eigen(
        HermitianOperator::from_matrix_unchecked(mat),
        mapped,
    ))
}

/// Kronecker product `a ⊗ b` with `a` as the slow index.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    let dim = a.dim().saturating_mul(b.dim());
    if dim > MAX_DIM {
        return Err(invalid(format!(
            "tensor product dimension {dim} exceeds the maximum {MAX_DIM}"
        )));
    }
    Ok(HermitianOperator::from_matrix_unchecked(
        a.matrix().kronecker(b.matrix()),
    ))
}

/// Which factor of a bipartite system a partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Traces out the subsystem not named by `keep`.
pub fn partial_trace(
    op: &HermitianOperator,
    dims: (usize, usize),
    keep: Subsystem,
) -> Result<HermitianOperator> {
    let (da, db) = dims;
    if da == 0 || db == 0 || da * db != op.dim() {
        return Err(invalid(format!(
            "dims ({da}, {db}) do not factor an operator of dimension {}",
            op.dim()
        )));
    }
    let mat = match keep {
        Subsystem::A => trace_out_b(op.matrix(), da, db),
        Subsystem::B => trace_out_a(op.matrix(), da, db),
    };
    Ok(HermitianOperator::from_matrix_unchecked(mat))
}

/// `tr_A` of a `(da*db)`-dimensional matrix; the result lives on B.
pub(crate) fn trace_out_a(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(db, db);
    for a in 0..da {
        let off = a * db;
        for j in 0..db {
            for i in 0..db {
                out[(i, j)] += m[(off + i, off + j)];
            }
        }
    }
    out
}

/// `tr_B` of a `(da*db)`-dimensional matrix; the result lives on A.
pub(crate) fn trace_out_b(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(da, da);
    for j in 0..da {
        for i in 0..da {
            let mut s = ZERO;
            for b in 0..db {
                s += m[(i * db + b, j * db + b)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// `I_A ⊗ k`.
pub(crate) fn identity_kron(da: usize, k: &CMatrix) -> CMatrix {
    CMatrix::identity(da, da).kronecker(k)
}

/// `(I_A ⊗ k) m (I_A ⊗ k)` for Hermitian `k`, computed blockwise.
pub(crate) fn sandwich_b(m: &CMatrix, k: &CMatrix, da: usize) -> CMatrix {
    let db = k.nrows();
    let n = da * db;
    let mut out = CMatrix::zeros(n, n);
    for a in 0..da {
        for a2 in 0..da {
            let block = m.view((a * db, a2 * db), (db, db));
            let prod = k * block * k;
            out.view_mut((a * db, a2 * db), (db, db)).copy_from(&prod);
        }
    }
    hermitize(&mut out);
    out
}
