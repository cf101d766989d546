//! Upper bounds on the entanglement of formation by searching over
//! pure-state decompositions.
//!
//! Write `ρ = Σᵢ λᵢ |eᵢ⟩⟨eᵢ|` (rank `r`) and `vᵢ = √λᵢ |eᵢ⟩`. Every
//! `k`-element decomposition of `ρ` is `x_j = Σᵢ U_{ji} vᵢ` for a `k × r`
//! isometry `U`, with weights `q_j = ‖x_j‖²`. The search minimizes the average
//! entanglement `Σ_j q_j E(x_j / √q_j)` over the Stiefel manifold: seeded
//! restarts, each refined by Riemannian conjugate-gradient steps
//! (Polak-Ribière+) with Armijo backtracking and a polar retraction. Any point visited is a valid
//! decomposition, so the running minimum is always an upper bound.
//!
//! Each start first descends the average linear entropy
//! `Σ_j q_j (1 − Tr ω̂_j²)`, which is smooth where the von Neumann entropy
//! has its `x ln x` singularity and vanishes on the same product
//! decompositions, then switches to the entropy itself. Only entropy values
//! enter the running minimum.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, DensityMatrix};
use crate::measures::{MeasureKind, MeasureValue};
use crate::random::{random_isometry, rng_from_seed};

/// Eigenvalues at or below this are dropped from the decomposition basis.
const RANK_TOL: f64 = 1e-12;
/// Gradient steps spent on one start before a fresh random restart.
const RESTART_LEN: usize = 500;
const ARMIJO: f64 = 1e-4;
/// Linear-entropy steps at the beginning of each start.
const WARMUP_LEN: usize = 150;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Objective {
    Entropy,
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EofSearch {
    /// Decomposition size; `None` means `(dim_a·dim_b)²`.
    pub k: Option<usize>,
    /// Number of gradient iterations across all restarts.
    pub budget: usize,
    pub seed: u64,
}

impl Default for EofSearch {
    fn default() -> Self {
        Self { k: None, budget: 2000, seed: 0 }
    }
}

/// Result of a search together with the best-so-far value after each
/// iteration.
#[derive(Clone, Debug)]
pub struct EofTrace {
    pub best: f64,
    pub history: Vec<f64>,
}

struct Problem {
    dim_a: usize,
    dim_b: usize,
    /// `d × r`, columns `√λᵢ eᵢ`.
    basis: CMatrix,
}

impl Problem {
    /// Average entanglement (nats, or linear entropy) and its gradient with
    /// respect to `U*`.
    fn evaluate(&self, u: &CMatrix, want_grad: bool, objective: Objective) -> (f64, Option<CMatrix>) {
        let x = &self.basis * u.transpose();
        let (da, db) = (self.dim_a, self.dim_b);
        let mut total = 0.0;
        let mut gx = if want_grad { Some(CMatrix::zeros(x.nrows(), x.ncols())) } else { None };
        for j in 0..x.ncols() {
            let m = CMatrix::from_fn(da, db, |a, b| x[(a * db + b, j)]);
            let omega = &m * m.adjoint();
            let q: f64 = omega.diagonal().iter().map(|z| z.re).sum();
            if q <= 0.0 {
                continue;
            }
            if objective == Objective::Linear {
                let purity = omega.norm_squared();
                total += q - purity / q;
                if let Some(gx) = gx.as_mut() {
                    // ∂/∂x* = x − 2ωx/q + Tr(ω²)/q² · x
                    let g = m.scale(1.0 + purity / (q * q)) - (&omega * &m).scale(2.0 / q);
                    for a in 0..da {
                        for b in 0..db {
                            gx[(a * db + b, j)] = g[(a, b)];
                        }
                    }
                }
                continue;
            }
            let (mu, w) = hermitian_eigen(&omega);
            let mu: Vec<f64> = mu.iter().map(|v| v.max(0.0)).collect();
            total += q * q.ln() - mu.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>();
            if let Some(gx) = gx.as_mut() {
                // ∂/∂x* = −(ln ω ⊗ 1) x + ln q · x
                let logs = DVector::from_iterator(mu.len(), mu.iter().map(|v| Complex64::new(v.max(1e-300).ln(), 0.0)));
                let log_omega = &w * CMatrix::from_diagonal(&logs) * w.adjoint();
                let g = m.scale(q.ln()) - log_omega * &m;
                for a in 0..da {
                    for b in 0..db {
                        gx[(a * db + b, j)] = g[(a, b)];
                    }
                }
            }
        }
        (total.max(0.0), gx.map(|gx| (self.basis.adjoint() * gx).transpose()))
    }
}

/// `Y (Y†Y)^{-1/2}`.
fn polar(y: &CMatrix) -> Option<CMatrix> {
    let (values, vectors) = hermitian_eigen(&(y.adjoint() * y));
    if values.iter().any(|&v| !(v > 1e-300)) {
        return None;
    }
    let inv_sqrt = DVector::from_iterator(values.len(), values.iter().map(|v| Complex64::new(v.sqrt().recip(), 0.0)));
    Some(y * (&vectors * CMatrix::from_diagonal(&inv_sqrt) * vectors.adjoint()))
}

/// Projection onto the tangent space of the Stiefel manifold at `u`; applied
/// to the Euclidean gradient it gives the Riemannian one.
fn tangent_projection(u: &CMatrix, g: &CMatrix) -> CMatrix {
    let s = u.adjoint() * g;
    g - u * (&s + s.adjoint()).scale(0.5)
}

/// `Re tr(a† b)`.
fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Runs the search and returns every best-so-far value.
pub fn eof_search_trace(rho: &DensityMatrix, search: &EofSearch) -> Result<EofTrace> {
    let d = rho.dim();
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let kept: Vec<usize> = (0..values.len()).filter(|&i| values[i] > RANK_TOL).collect();
    let rank = kept.len().max(1);
    let k = search.k.unwrap_or(d * d);
    if k < rank {
        return Err(Error::DecompositionTooSmall { k, rank });
    }
    let basis = CMatrix::from_fn(d, rank, |row, col| {
        let i = kept.get(col).copied().unwrap_or(values.len() - 1);
        vectors[(row, i)] * values[i].max(0.0).sqrt()
    });
    let problem = Problem { dim_a: rho.dim_a(), dim_b: rho.dim_b(), basis };

    let mut start = CMatrix::zeros(k, rank);
    for i in 0..rank {
        start[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let (f0, _) = problem.evaluate(&start, false, Objective::Entropy);
    let mut best = f0;
    let mut history = Vec::with_capacity(search.budget);
    if rank == 1 {
        // every decomposition of a pure state is the state itself
        history.resize(search.budget, best / std::f64::consts::LN_2);
        return Ok(EofTrace { best: best / std::f64::consts::LN_2, history });
    }

    let mut rng = rng_from_seed(search.seed);
    let mut u = start;
    let mut objective = Objective::Linear;
    let mut f = problem.evaluate(&u, false, objective).0;
    let mut step = 1.0;
    let mut since_restart = 0;
    let mut stalls = 0;
    // previous Riemannian gradient and search direction
    let mut memory: Option<(CMatrix, CMatrix)> = None;
    for _ in 0..search.budget {
        if since_restart >= RESTART_LEN || (objective == Objective::Entropy && stalls >= 25) {
            u = random_isometry(k, rank, &mut rng);
            objective = Objective::Linear;
            f = problem.evaluate(&u, false, objective).0;
            step = 1.0;
            since_restart = 0;
            stalls = 0;
            memory = None;
        } else if objective == Objective::Linear && (since_restart >= WARMUP_LEN || stalls >= 25) {
            objective = Objective::Entropy;
            f = problem.evaluate(&u, false, objective).0;
            step = 1.0;
            stalls = 0;
            memory = None;
        }
        since_restart += 1;
        let (_, grad) = problem.evaluate(&u, true, objective);
        let rg = tangent_projection(&u, &grad.expect("gradient requested"));
        let g2 = rg.norm_squared();
        let mut direction = -rg.clone();
        if let Some((prev_rg, prev_dir)) = &memory {
            // Polak-Ribière+, old vectors moved to the current tangent space
            let moved_rg = tangent_projection(&u, prev_rg);
            let beta = (inner(&rg, &(&rg - moved_rg)) / prev_rg.norm_squared()).max(0.0);
            if beta.is_finite() {
                direction += tangent_projection(&u, prev_dir).scale(beta);
            }
        }
        let mut slope = inner(&rg, &direction);
        if !(slope < 0.0) {
            direction = -rg.clone();
            slope = -g2;
        }
        let mut accepted = false;
        if g2 > 1e-28 {
            let mut t = step;
            while t > 1e-14 {
                if let Some(candidate) = polar(&(&u + direction.scale(t))) {
                    let fc = problem.evaluate(&candidate, false, objective).0;
                    if fc <= f + ARMIJO * t * slope {
                        stalls = if f - fc < 1e-12 * f.max(1e-3) { stalls + 1 } else { 0 };
                        u = candidate;
                        f = fc;
                        step = (2.0 * t).min(1e3);
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
        }
        if accepted {
            memory = Some((rg, direction));
        } else {
            stalls = usize::MAX / 2;
            memory = None;
        }
        let entropy = match objective {
            Objective::Entropy => f,
            Objective::Linear => problem.evaluate(&u, false, Objective::Entropy).0,
        };
        best = best.min(entropy);
        history.push(best / std::f64::consts::LN_2);
    }
    Ok(EofTrace { best: best / std::f64::consts::LN_2, history })
}

/// Upper bound on the entanglement of formation (hence on the entanglement
/// cost). Deterministic in `(seed, budget)`; never increases with budget.
pub fn eof_upper_general(rho: &DensityMatrix, search: &EofSearch) -> Result<MeasureValue> {
    let trace = eof_search_trace(rho, search)?;
    Ok(MeasureValue::new(trace.best.max(0.0), MeasureKind::UpperBound, "eof_upper_general"))
}
