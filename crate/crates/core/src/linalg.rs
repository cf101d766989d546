//! Dense complex linear algebra for small bipartite systems.
//!
//! Every state lives on `C^{dim_a} ⊗ C^{dim_b}` with the basis ordered
//! `|i_A i_B⟩ ↦ i_A·dim_b + i_B` (A-index major). Multi-copy products keep
//! the A|B cut: all A factors are grouped first, then all B factors, so an
//! n-copy state is again an ordinary bipartite state.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Elementwise bound on `|ρ − ρ†|`.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Bound on `|tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-9;
/// Bound on `|‖ψ‖ − 1|` for pure states.
pub const PURE_NORM_TOL: f64 = 1e-12;
/// Largest matrix side any constructor will build.
pub const DEFAULT_SIZE_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

/// Outcome of checking a matrix against the density-matrix invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity defect {:e}, trace defect {:e}, min eigenvalue {:e} ({})",
            self.hermiticity_defect,
            self.trace_defect,
            self.min_eigenvalue,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Standard Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest elementwise `|m_ij − conj(m_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenpairs of the Hermitian part of `m`, eigenvalues ascending; column `i`
/// of the returned matrix belongs to eigenvalue `i`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Checks `m` against the density-matrix invariants on a `dim_a × dim_b` system.
pub fn validate(dim_a: usize, dim_b: usize, m: &CMatrix) -> Diagnostics {
    let side = dim_a * dim_b;
    if m.nrows() != side || m.ncols() != side || side == 0 {
        return Diagnostics {
            hermiticity_defect: f64::INFINITY,
            trace_defect: f64::INFINITY,
            min_eigenvalue: f64::NEG_INFINITY,
            pass: false,
        };
    }
    let hermiticity_defect = hermiticity_defect(m);
    let trace_defect = (trace(m) - Complex64::new(1.0, 0.0)).norm();
    let min_eigenvalue = hermitian_eigenvalues(m)[0];
    let pass = hermiticity_defect <= HERMITICITY_TOL && trace_defect <= TRACE_TOL && min_eigenvalue >= PSD_FLOOR;
    Diagnostics { hermiticity_defect, trace_defect, min_eigenvalue, pass }
}

/// A bipartite mixed state with explicit local dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` and wraps it.
    pub fn new(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Result<Self> {
        let diag = validate(dim_a, dim_b, &matrix);
        if !diag.pass {
            return Err(Error::InvalidState(diag));
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    /// Wraps `matrix` without checking the invariants. Used for diagnostic
    /// loading; every operation downstream assumes a valid state.
    pub fn new_unchecked(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), dim_a * dim_b);
        Self { dim_a, dim_b, matrix }
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let d = dim_a * dim_b;
        Self::new_unchecked(dim_a, dim_b, CMatrix::identity(d, d).unscale(d as f64))
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Side length `dim_a·dim_b`.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn validate(&self) -> Diagnostics {
        validate(self.dim_a, self.dim_b, &self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `U ρ U†` for a unitary `U` on the full space.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Self {
        let m = unitary * &self.matrix * unitary.adjoint();
        Self::new_unchecked(self.dim_a, self.dim_b, hermitian_part(&m))
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.dim_a != other.dim_a || self.dim_b != other.dim_b {
            return Err(Error::DimensionMismatch {
                left: format!("{}x{}", self.dim_a, self.dim_b),
                right: format!("{}x{}", other.dim_a, other.dim_b),
            });
        }
        Ok(())
    }
}

/// A normalized bipartite pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                left: format!("{dim_a}x{dim_b}"),
                right: format!("{} amplitudes", amplitudes.len()),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dim_a, dim_b, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(dim_a: usize, dim_b: usize, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(dim_a, dim_b, amplitudes.unscale(norm))
    }

    /// `|a⟩ ⊗ |b⟩`.
    pub fn product(a: &CVector, b: &CVector) -> Result<Self> {
        Self::normalized(a.len(), b.len(), a.kronecker(b))
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// Amplitudes reshaped to the `dim_a × dim_b` coefficient matrix.
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |i, j| self.amplitudes[i * self.dim_b + j])
    }

    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::new_unchecked(self.dim_a, self.dim_b, m)
    }
}

/// Schmidt coefficients of a pure state, non-increasing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchmidtForm {
    coefficients: Vec<f64>,
}

impl SchmidtForm {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|&c| !(c >= 0.0)) {
            return Err(Error::InvalidParameter("negative Schmidt coefficient".into()));
        }
        if coefficients.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter("Schmidt coefficients must be non-increasing".into()));
        }
        let total: f64 = coefficients.iter().map(|c| c * c).sum();
        if (total - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::NotNormalized { norm: total.sqrt() });
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Squared coefficients: the spectrum of either reduced state.
    pub fn squares(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c * c).collect()
    }

    /// Number of non-zero coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }
}

pub fn schmidt_decompose(psi: &PureState) -> SchmidtForm {
    let mut coefficients: Vec<f64> = psi.coefficient_matrix().singular_values().iter().copied().collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    SchmidtForm { coefficients }
}

fn check_side(side: usize, cap: usize) -> Result<()> {
    if side > cap {
        return Err(Error::SizeCap { side, cap });
    }
    Ok(())
}

/// Kronecker product of two bipartite operators, regrouped so that the A
/// factors and the B factors are each contiguous.
pub(crate) fn tensor_regrouped(
    a: &CMatrix,
    (da1, db1): (usize, usize),
    b: &CMatrix,
    (da2, db2): (usize, usize),
) -> CMatrix {
    let db = db1 * db2;
    let side = da1 * da2 * db;
    let mut out = CMatrix::zeros(side, side);
    let index = |ia1: usize, ib1: usize, ia2: usize, ib2: usize| (ia1 * da2 + ia2) * db + ib1 * db2 + ib2;
    for ja1 in 0..da1 {
        for jb1 in 0..db1 {
            let c1 = ja1 * db1 + jb1;
            for ia1 in 0..da1 {
                for ib1 in 0..db1 {
                    let x = a[(ia1 * db1 + ib1, c1)];
                    if x == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for ja2 in 0..da2 {
                        for jb2 in 0..db2 {
                            let col = index(ja1, jb1, ja2, jb2);
                            let c2 = ja2 * db2 + jb2;
                            for ia2 in 0..da2 {
                                for ib2 in 0..db2 {
                                    out[(index(ia1, ib1, ia2, ib2), col)] = x * b[(ia2 * db2 + ib2, c2)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `a ⊗ b` across the A|B cut, with the default size cap.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    tensor_with_cap(a, b, DEFAULT_SIZE_CAP)
}

pub fn tensor_with_cap(a: &DensityMatrix, b: &DensityMatrix, cap: usize) -> Result<DensityMatrix> {
    check_side(a.dim() * b.dim(), cap)?;
    let m = tensor_regrouped(&a.matrix, (a.dim_a, a.dim_b), &b.matrix, (b.dim_a, b.dim_b));
    Ok(DensityMatrix::new_unchecked(a.dim_a * b.dim_a, a.dim_b * b.dim_b, m))
}

/// Side length of `n` copies of a `dim`-sided operator, or `None` on overflow.
pub fn power_side(dim: usize, n: u32) -> Option<usize> {
    dim.checked_pow(n)
}

pub fn tensor_power(rho: &DensityMatrix, n: u32) -> Result<DensityMatrix> {
    tensor_power_with_cap(rho, n, DEFAULT_SIZE_CAP)
}

pub fn tensor_power_with_cap(rho: &DensityMatrix, n: u32, cap: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("tensor power needs n >= 1".into()));
    }
    check_side(power_side(rho.dim(), n).unwrap_or(usize::MAX), cap)?;
    let mut acc = rho.clone();
    for _ in 1..n {
        acc = tensor_with_cap(&acc, rho, cap)?;
    }
    Ok(acc)
}

/// Traces out `party`, returning the reduced state of the other one.
pub fn partial_trace(rho: &DensityMatrix, party: Party) -> CMatrix {
    let (da, db) = (rho.dim_a, rho.dim_b);
    let m = &rho.matrix;
    match party {
        Party::B => CMatrix::from_fn(da, da, |i, k| (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()),
        Party::A => CMatrix::from_fn(db, db, |j, l| (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()),
    }
}

/// Transpose on the B indices of an operator on `C^{dim_a} ⊗ C^{dim_b}`.
pub fn partial_transpose_matrix(m: &CMatrix, dim_a: usize, dim_b: usize) -> CMatrix {
    let side = dim_a * dim_b;
    CMatrix::from_fn(side, side, |r, c| {
        let (ia, ib) = (r / dim_b, r % dim_b);
        let (ja, jb) = (c / dim_b, c % dim_b);
        m[(ia * dim_b + jb, ja * dim_b + ib)]
    })
}

pub fn partial_transpose(rho: &DensityMatrix) -> CMatrix {
    partial_transpose_matrix(&rho.matrix, rho.dim_a, rho.dim_b)
}

/// Sum of singular values. Hermitian input takes the eigenvalue route.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    if hermiticity_defect(m) <= HERMITICITY_TOL * scale.max(1.0) {
        hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
    } else {
        m.singular_values().iter().sum()
    }
}

/// `T(ρ, σ) = tr|ρ − σ| / 2`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.same_shape(sigma)?;
    let diff = &rho.matrix - &sigma.matrix;
    Ok((0.5 * trace_norm(&diff)).clamp(0.0, 1.0))
}

/// `(1 − p)ρ + pσ` for `p ∈ [−1, 1]`. Outside `[0, 1]` the result is checked
/// for positivity.
pub fn mix(rho: &DensityMatrix, sigma: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    rho.same_shape(sigma)?;
    if !(-1.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("mixing weight {p} outside [-1, 1]")));
    }
    let m = rho.matrix.scale(1.0 - p) + sigma.matrix.scale(p);
    if !(0.0..=1.0).contains(&p) {
        let min_eigenvalue = hermitian_eigenvalues(&m)[0];
        if min_eigenvalue < PSD_FLOOR {
            return Err(Error::NotPositive { min_eigenvalue });
        }
    }
    Ok(DensityMatrix::new_unchecked(rho.dim_a, rho.dim_b, m))
}
