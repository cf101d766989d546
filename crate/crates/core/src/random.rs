//! Seeded random states and unitaries.
//!
//! Mixed states come from the Ginibre ensemble: `G G† / tr(G G†)` with `G`
//! a square matrix of i.i.d. standard complex normals. The generator is
//! ChaCha8 so a seed reproduces the same states on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{hermitian_part, CMatrix, CVector, DensityMatrix, PureState};
use num_complex::Complex64;

pub type StateRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub fn ginibre_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // fill order fixed by from_fn (column-major), part of the seed contract
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Full-rank random mixed state on `dim_a × dim_b`.
pub fn ginibre_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> DensityMatrix {
    let d = dim_a * dim_b;
    let g = ginibre_matrix(d, d, rng);
    let w = &g * g.adjoint();
    let tr: f64 = w.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new_unchecked(dim_a, dim_b, hermitian_part(&w.unscale(tr)))
}

pub fn random_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(len, |_, _| complex_normal(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> PureState {
    PureState::normalized(dim_a, dim_b, random_vector(dim_a * dim_b, rng)).expect("non-zero Gaussian vector")
}

/// Haar-random isometry (`rows ≥ cols`, orthonormal columns).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre_matrix(rows, cols, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q.columns(0, cols).into_owned();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    random_isometry(d, d, rng)
}

/// Random `U_A ⊗ U_B`.
pub fn random_local_unitary<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> CMatrix {
    haar_unitary(dim_a, rng).kronecker(&haar_unitary(dim_b, rng))
}

pub fn random_product_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> PureState {
    let a = random_vector(dim_a, rng);
    let b = random_vector(dim_b, rng);
    PureState::product(&a, &b).expect("unit factors")
}

/// Convex mixture of `terms` random product states with random weights;
/// separable by construction.
pub fn random_separable_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, terms: usize, rng: &mut R) -> DensityMatrix {
    let d = dim_a * dim_b;
    let weights: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut m = CMatrix::zeros(d, d);
    for w in weights {
        let psi = random_product_state(dim_a, dim_b, rng);
        m += psi.projector().matrix().scale(w / total);
    }
    DensityMatrix::new_unchecked(dim_a, dim_b, hermitian_part(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ginibre_states_are_valid_and_reproducible() {
        let a = ginibre_state(2, 3, &mut rng_from_seed(5));
        let b = ginibre_state(2, 3, &mut rng_from_seed(5));
        assert_eq!(a, b);
        assert!(a.validate().pass);
        assert!(a.eigenvalues()[0] > 0.0);
    }

    #[test]
    fn isometries_have_orthonormal_columns() {
        let mut rng = rng_from_seed(6);
        let v = random_isometry(5, 3, &mut rng);
        assert!((v.adjoint() * &v - CMatrix::identity(3, 3)).norm() < 1e-12);
        let u = haar_unitary(4, &mut rng);
        assert!((&u * u.adjoint() - CMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn separable_mixtures_are_valid() {
        let mut rng = rng_from_seed(7);
        let rho = random_separable_state(3, 3, 4, &mut rng);
        assert!(rho.validate().pass);
    }
}
