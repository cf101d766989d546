//! Finite-n rate bookkeeping for the standard asymptotic conversions.

use serde::Serialize;

use crate::binomial::LnFactorials;
use crate::error::{Error, Result};
use crate::linalg::{mix, DensityMatrix};
use crate::measures::{
    ec_upper, ed_lower, hashing_yield, shannon_entropy, twirl_to_bell_diagonal, MeasureKind, MeasureValue,
};
use crate::states::phi_plus_state;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YieldPoint {
    pub n: usize,
    pub yield_per_copy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YieldCurve {
    pub protocol: String,
    pub asymptote: f64,
    pub points: Vec<YieldPoint>,
}

fn check_distribution(probs: &[f64]) -> Result<()> {
    if probs.is_empty() || probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::InvalidProbabilities(format!("{probs:?} is not a probability vector")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!("{probs:?} sums to {total}")));
    }
    Ok(())
}

/// Expected ebits per copy from measuring the type class of `n` copies of a
/// pure state with Schmidt weights `λ`:
/// `E[log2 (n! / Π kᵢ!)] / n` with `k ~ Multinomial(n, λ)`.
///
/// By linearity only the binomial marginals `kᵢ ~ Binomial(n, λᵢ)` enter, so
/// the cost is `O(n·len(λ))`. The yield stays below `H(λ)` and approaches it
/// as `n` grows.
pub fn concentration_yield(schmidt_squares: &[f64], n: usize) -> Result<f64> {
    check_distribution(schmidt_squares)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let table = LnFactorials::up_to(n);
    Ok(concentration_yield_with(&table, schmidt_squares, n))
}

fn concentration_yield_with(table: &LnFactorials, lambda: &[f64], n: usize) -> f64 {
    let mut expected = table.ln_factorial(n);
    for &p in lambda {
        let e: f64 = (0..=n)
            .map(|k| {
                let w = table.ln_pmf(n, p, k).exp();
                if w == 0.0 {
                    0.0
                } else {
                    w * table.ln_factorial(k)
                }
            })
            .sum();
        expected -= e;
    }
    (expected / (n as f64 * std::f64::consts::LN_2)).max(0.0)
}

/// Concentration yields for increasing `n`; the asymptote is `H(λ)`.
pub fn concentration_curve(schmidt_squares: &[f64], n_list: &[usize]) -> Result<YieldCurve> {
    check_distribution(schmidt_squares)?;
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("n values must be positive and strictly increasing".into()));
    }
    let table = LnFactorials::up_to(*n_list.last().expect("non-empty"));
    let points = n_list
        .iter()
        .map(|&n| YieldPoint { n, yield_per_copy: concentration_yield_with(&table, schmidt_squares, n) })
        .collect();
    Ok(YieldCurve { protocol: "type_class_concentration".into(), asymptote: shannon_entropy(schmidt_squares), points })
}

/// Certified achievable rate for `ρ → σ^{⊗rate}`: distill with a certified
/// lower bound, then form `σ` at an upper bound on its cost.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConversionRate {
    pub rate: f64,
    pub kind: MeasureKind,
    pub distillation: MeasureValue,
    pub cost: MeasureValue,
}

pub fn conversion_rate(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<ConversionRate> {
    let distillation = ed_lower(rho);
    if distillation.value <= 0.0 {
        return Err(Error::UndefinedRate(format!(
            "source is outside the certified-distillable region ({} = 0)",
            distillation.method
        )));
    }
    let cost = ec_upper(sigma);
    if cost.value <= 0.0 {
        return Err(Error::UndefinedRate("target has zero cost bound".into()));
    }
    Ok(ConversionRate { rate: distillation.value / cost.value, kind: MeasureKind::LowerBound, distillation, cost })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaRow {
    pub epsilon: f64,
    pub certified_yield: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaScan {
    pub rows: Vec<EtaRow>,
    /// Largest `|Δyield / Δε|` between neighbouring grid points.
    pub lipschitz: f64,
}

/// Hashing yield of `(1 − ε)|Φ+⟩⟨Φ+| + εξ` after twirling, for each `ε`:
/// a certified lower bound on the distillation ratio near `Φ+`.
pub fn eta_continuity_scan(xi: &DensityMatrix, eps_grid: &[f64]) -> Result<EtaScan> {
    let phi = phi_plus_state();
    phi.same_shape(xi)?;
    let rows = eps_grid
        .iter()
        .map(|&epsilon| {
            if !(0.0..=1.0).contains(&epsilon) {
                return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside [0, 1]")));
            }
            let state = mix(&phi, xi, epsilon)?;
            let certified_yield = hashing_yield(&twirl_to_bell_diagonal(&state)?).value;
            Ok(EtaRow { epsilon, certified_yield })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let lipschitz = sorted
        .windows(2)
        .filter(|w| w[1].epsilon > w[0].epsilon)
        .map(|w| (w[1].certified_yield - w[0].certified_yield).abs() / (w[1].epsilon - w[0].epsilon))
        .fold(0.0, f64::max);
    Ok(EtaScan { rows, lipschitz })
}

/// `count` points from `lo` to `hi`, evenly spaced in `log10`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..count).map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)).collect()
        }
    }
}

/// Parameters of the catalytic chain `ρ ⊗ Ψ^{⊗δ} → … → ρ_p^{⊗(1+δk)} ⊗ Ψ^{⊗δ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CatalyticRate {
    pub delta: f64,
    pub ec_sigma: f64,
    pub ed_rho_p: f64,
    /// `(δ/E_c(σ)) / (1 + δ/E_c(σ))`.
    pub p: f64,
    /// `1/E_c(σ) − 1/E_d(ρ_p)`.
    pub k: f64,
    /// `1 + δk`.
    pub factor: f64,
}

pub fn catalytic_rate(delta: f64, ec_sigma: f64, ed_rho_p: f64) -> Result<CatalyticRate> {
    for (name, v) in [("delta", delta), ("ec_sigma", ec_sigma), ("ed_rho_p", ed_rho_p)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be positive and finite (got {v})")));
        }
    }
    let ratio = delta / ec_sigma;
    let k = 1.0 / ec_sigma - 1.0 / ed_rho_p;
    Ok(CatalyticRate { delta, ec_sigma, ed_rho_p, p: ratio / (1.0 + ratio), k, factor: 1.0 + delta * k })
}
