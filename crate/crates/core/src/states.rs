//! Named states and one-parameter families used throughout the harness.

use crate::error::{Error, Result};
use crate::linalg::{mix, CMatrix, CVector, DensityMatrix, PureState};
use num_complex::Complex64;

fn ket(dim_a: usize, dim_b: usize, terms: &[(usize, usize, f64)]) -> PureState {
    let mut v = CVector::zeros(dim_a * dim_b);
    for &(i, j, amp) in terms {
        v[i * dim_b + j] = Complex64::new(amp, 0.0);
    }
    PureState::normalized(dim_a, dim_b, v).expect("non-zero ket")
}

/// `(|00⟩ + |11⟩)/√2`, one ebit.
pub fn phi_plus() -> PureState {
    ket(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)])
}

pub fn phi_minus() -> PureState {
    ket(2, 2, &[(0, 0, 1.0), (1, 1, -1.0)])
}

pub fn psi_plus() -> PureState {
    ket(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)])
}

pub fn psi_minus() -> PureState {
    ket(2, 2, &[(0, 1, 1.0), (1, 0, -1.0)])
}

pub fn phi_plus_state() -> DensityMatrix {
    phi_plus().projector()
}

/// The Bell basis in the order (Φ+, Φ−, Ψ+, Ψ−).
pub fn bell_basis() -> [PureState; 4] {
    [phi_plus(), phi_minus(), psi_plus(), psi_minus()]
}

fn check_weight(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("family weight {p} outside [0, 1]")));
    }
    Ok(())
}

/// Two-qubit Werner state `p|Ψ−⟩⟨Ψ−| + (1 − p) I/4`. NPPT iff `p > 1/3`.
pub fn werner(singlet_weight: f64) -> Result<DensityMatrix> {
    check_weight(singlet_weight)?;
    mix(&DensityMatrix::maximally_mixed(2, 2), &psi_minus().projector(), singlet_weight)
}

/// `p|ψ⟩⟨ψ| + (1 − p) I/6` on 2×3 with `ψ = (|00⟩ + |11⟩)/√2`. The partial
/// transpose has minimum eigenvalue `(1 − p)/6 − p/2`, so the path crosses
/// into NPPT at `p = 1/4`.
pub fn isotropic_2x3(weight: f64) -> Result<DensityMatrix> {
    check_weight(weight)?;
    let psi = ket(2, 3, &[(0, 0, 1.0), (1, 1, 1.0)]);
    mix(&DensityMatrix::maximally_mixed(2, 3), &psi.projector(), weight)
}

/// A continuous path `t ↦ ρ(t)` of bipartite states.
pub trait StatePath {
    fn state(&self, t: f64) -> Result<DensityMatrix>;
    fn dims(&self) -> (usize, usize);
}

#[derive(Clone, Copy, Debug)]
pub struct WernerPath;

impl StatePath for WernerPath {
    fn state(&self, t: f64) -> Result<DensityMatrix> {
        werner(t)
    }

    fn dims(&self) -> (usize, usize) {
        (2, 2)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Isotropic2x3Path;

impl StatePath for Isotropic2x3Path {
    fn state(&self, t: f64) -> Result<DensityMatrix> {
        isotropic_2x3(t)
    }

    fn dims(&self) -> (usize, usize) {
        (2, 3)
    }
}

/// The straight segment `(1 − t)·from + t·to`.
#[derive(Clone, Debug)]
pub struct Segment {
    pub from: DensityMatrix,
    pub to: DensityMatrix,
}

impl StatePath for Segment {
    fn state(&self, t: f64) -> Result<DensityMatrix> {
        check_weight(t)?;
        mix(&self.from, &self.to, t)
    }

    fn dims(&self) -> (usize, usize) {
        (self.from.dim_a(), self.from.dim_b())
    }
}

/// Pauli Y.
pub fn pauli_y() -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[z, -i, i, z])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, partial_transpose};

    #[test]
    fn bell_basis_is_orthonormal() {
        let basis = bell_basis();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ip = a.amplitudes().dotc(b.amplitudes());
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - want).abs() < 1e-15 && ip.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn isotropic_2x3_threshold_is_one_quarter() {
        for (p, sign) in [(0.2, 1.0), (0.3, -1.0)] {
            let min = hermitian_eigenvalues(&partial_transpose(&isotropic_2x3(p).unwrap()))[0];
            assert!((min - ((1.0 - p) / 6.0 - p / 2.0)).abs() < 1e-14);
            assert_eq!(min.signum(), sign);
        }
    }

    #[test]
    fn family_weights_are_range_checked() {
        assert!(werner(1.2).is_err());
        assert!(isotropic_2x3(-0.1).is_err());
    }
}
