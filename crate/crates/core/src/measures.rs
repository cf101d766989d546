//! Computable entanglement quantities and certified surrogates for the
//! distillable entanglement (lower bounds) and entanglement cost (upper
//! bounds). All values are in ebits (base-2 logarithms).

use serde::Serialize;

use crate::eof_search::{eof_upper_general, EofSearch};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, kron, partial_transpose, schmidt_decompose, CMatrix, DensityMatrix,
    PureState, PSD_FLOOR,
};
use crate::states::{bell_basis, pauli_y};

/// Whether a number is a closed-form value or a bound in a known direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Exact,
    LowerBound,
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub kind: MeasureKind,
    pub method: String,
}

impl MeasureValue {
    pub fn new(value: f64, kind: MeasureKind, method: impl Into<String>) -> Self {
        debug_assert!(value >= 0.0, "measure values are non-negative");
        Self { value, kind, method: method.into() }
    }
}

/// `x log2 x` with `0 log 0 = 0`.
fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    (-probs.iter().map(|&p| xlog2x(p)).sum::<f64>()).max(0.0)
}

/// `h₂(x) = −x log2 x − (1 − x) log2 (1 − x)`.
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy(&[x, 1.0 - x])
}

/// Clamps the numerical-drift window `[PSD_FLOOR, 0)` to zero.
fn clamp_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&v| {
            if v >= 0.0 {
                Ok(v)
            } else if v >= PSD_FLOOR {
                Ok(0.0)
            } else {
                Err(Error::NegativeEigenvalue(v))
            }
        })
        .collect()
}

/// Base-2 entropy of a PSD unit-trace matrix.
pub fn von_neumann_entropy(m: &CMatrix) -> Result<f64> {
    Ok(shannon_entropy(&clamp_spectrum(&hermitian_eigenvalues(m))?))
}

pub fn entropy_of_entanglement(psi: &PureState) -> MeasureValue {
    let squares = schmidt_decompose(psi).squares();
    MeasureValue::new(shannon_entropy(&squares), MeasureKind::Exact, "entropy_of_entanglement")
}

/// PPT test: `margin` is the smallest eigenvalue of the partial transpose.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PptTest {
    pub ppt: bool,
    pub margin: f64,
}

pub fn is_ppt(rho: &DensityMatrix) -> PptTest {
    let margin = hermitian_eigenvalues(&partial_transpose(rho))[0];
    PptTest { ppt: margin >= PSD_FLOOR, margin }
}

/// `log2 ‖ρ^{T_B}‖₁`. Exactly zero on PPT states; an upper bound on the
/// distillable entanglement.
pub fn log_negativity(rho: &DensityMatrix) -> MeasureValue {
    let spectrum = hermitian_eigenvalues(&partial_transpose(rho));
    let value = if spectrum[0] >= PSD_FLOOR {
        0.0
    } else {
        let norm: f64 = spectrum.iter().map(|v| v.abs()).sum();
        norm.log2().max(0.0)
    };
    MeasureValue::new(value, MeasureKind::Exact, "log_negativity")
}

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim_a() != 2 || rho.dim_b() != 2 {
        return Err(Error::DimensionMismatch { left: format!("{}x{}", rho.dim_a(), rho.dim_b()), right: "2x2".into() });
    }
    Ok(())
}

/// Eigenvalues of `√ρ ρ̃ √ρ` at or below this are rounding noise.
const SPECTRAL_NOISE: f64 = 1e-14;

/// Two-qubit concurrence `max(0, s₁ − s₂ − s₃ − s₄)`.
///
/// The `sᵢ` are the square roots of the eigenvalues of `ρ ρ̃` with
/// `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)`; they are computed from the similar Hermitian
/// matrix `√ρ ρ̃ √ρ`.
pub fn concurrence_2x2(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = kron(&pauli_y(), &pauli_y());
    let flipped = &yy * rho.matrix().conjugate() * &yy;
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let root = clamp_spectrum(&values)?;
    let sqrt_diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        root.len(),
        root.iter().map(|v| num_complex::Complex64::new(v.sqrt(), 0.0)),
    ));
    let sqrt_rho = &vectors * sqrt_diag * vectors.adjoint();
    let r = &sqrt_rho * flipped * &sqrt_rho;
    // eigenvalues at rounding level would contribute ~1e-8 through the root
    let mut s: Vec<f64> =
        hermitian_eigenvalues(&r).iter().map(|&v| if v <= SPECTRAL_NOISE { 0.0 } else { v.sqrt() }).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// `h₂((1 + √(1 − C²))/2)`.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

/// Closed-form two-qubit entanglement of formation; an upper bound on the
/// entanglement cost.
pub fn eof_2x2(rho: &DensityMatrix) -> Result<MeasureValue> {
    let c = concurrence_2x2(rho)?;
    Ok(MeasureValue::new(eof_from_concurrence(c), MeasureKind::Exact, "eof_2x2"))
}

/// Weights of a two-qubit state on the Bell basis (Φ+, Φ−, Ψ+, Ψ−).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BellDiagonalProbs([f64; 4]);

impl BellDiagonalProbs {
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidProbabilities(format!("{probs:?} has a negative entry")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbabilities(format!("{probs:?} sums to {total}")));
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> [f64; 4] {
        self.0
    }

    /// Weight on Φ+.
    pub fn fidelity(&self) -> f64 {
        self.0[0]
    }
}

/// Yield of the one-way hashing protocol, `max(0, 1 − H(p))`.
pub fn hashing_yield(probs: &BellDiagonalProbs) -> MeasureValue {
    let value = (1.0 - shannon_entropy(&probs.0)).max(0.0);
    MeasureValue::new(value, MeasureKind::LowerBound, "hashing")
}

/// Bell-basis diagonal of a two-qubit state. Twirling keeps exactly these
/// weights and removes the off-diagonal Bell coherences.
pub fn twirl_to_bell_diagonal(rho: &DensityMatrix) -> Result<BellDiagonalProbs> {
    require_two_qubits(rho)?;
    let mut probs = [0.0; 4];
    for (slot, b) in probs.iter_mut().zip(bell_basis()) {
        let v = b.amplitudes();
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if w < PSD_FLOOR {
            return Err(Error::NegativeEigenvalue(w));
        }
        *slot = w.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    BellDiagonalProbs::new(probs.map(|p| p / total))
}

/// Certified lower bound on the distillable entanglement.
///
/// Two qubits: twirl, then hash. Hashing depends only on the multiset of Bell
/// weights, so relabeling the Bell basis by local Paulis cannot improve it.
/// Larger systems get the vacuous bound 0.
pub fn ed_lower(rho: &DensityMatrix) -> MeasureValue {
    if rho.dim_a() == 2 && rho.dim_b() == 2 {
        if let Ok(probs) = twirl_to_bell_diagonal(rho) {
            let y = hashing_yield(&probs);
            return MeasureValue::new(y.value, MeasureKind::LowerBound, "hashing_after_twirl");
        }
    }
    MeasureValue::new(0.0, MeasureKind::LowerBound, "vacuous")
}

/// Upper bound on the entanglement cost via the entanglement of formation.
pub fn ec_upper(rho: &DensityMatrix) -> MeasureValue {
    ec_upper_with(rho, &EofSearch::default())
}

pub fn ec_upper_with(rho: &DensityMatrix, search: &EofSearch) -> MeasureValue {
    let (value, method) = if rho.dim_a() == 2 && rho.dim_b() == 2 {
        (eof_2x2(rho).expect("two-qubit input").value, "eof_2x2")
    } else {
        let search = EofSearch { k: None, ..search.clone() };
        (eof_upper_general(rho, &search).expect("default k covers any rank").value, "eof_upper_general")
    };
    MeasureValue::new(value, MeasureKind::UpperBound, method)
}
