//! Finite-N asymptotic mixing.
//!
//! `ρ_p^{⊗n}` with `ρ_p = (1 − p)ρ + pσ` expands as
//! `Σ_l Binomial(n, p)(l) · S(ρ^{⊗(n−l)} ⊗ σ^{⊗l})`, where `S(·)` averages
//! all placements of the `l` copies of `σ`. Keeping only the terms inside a
//! window around `np` and renormalizing gives a state `Π` that two parties can
//! prepare from at most `n − l_lo` copies of `ρ` and `l_hi` copies of `σ`,
//! using shared randomness to pick `l`. Its trace distance to `ρ_p^{⊗n}` is at
//! most the discarded tail mass `t_n`.

use serde::Serialize;

use crate::binomial::{log_sum_exp, LnFactorials};
use crate::error::{Error, Result};
use crate::linalg::{
    mix, power_side, tensor_power_with_cap, tensor_regrouped, trace_distance, CMatrix, DensityMatrix, DEFAULT_SIZE_CAP,
};

/// Default slack when comparing the trace distance with the tail mass.
pub const BOUND_SLACK: f64 = 1e-9;

/// Inclusive range `[lo, hi]` of σ-counts kept in the mixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
}

impl Window {
    pub fn contains(&self, l: usize) -> bool {
        (self.lo..=self.hi).contains(&l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BinomialWindow {
    pub window: Window,
    pub half_width: f64,
    /// Binomial mass outside the window, summed directly from the tails.
    pub tail_mass: f64,
}

/// `n^{2/3}`.
pub fn default_half_width(n: usize) -> f64 {
    (n as f64).powf(2.0 / 3.0)
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Window `[max(0, ⌈np − w⌉), min(n, ⌊np + w⌋)]` and its tail mass.
pub fn binomial_window(n: usize, p: f64, half_width: Option<f64>) -> Result<BinomialWindow> {
    binomial_window_with(&LnFactorials::up_to(n), n, p, half_width)
}

pub fn binomial_window_with(table: &LnFactorials, n: usize, p: f64, half_width: Option<f64>) -> Result<BinomialWindow> {
    check_probability(p)?;
    let w = half_width.unwrap_or_else(|| default_half_width(n));
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::InvalidParameter(format!("half width {w} must be finite and non-negative")));
    }
    let center = n as f64 * p;
    let lo = (center - w).ceil().max(0.0) as i64;
    let hi = (center + w).floor().min(n as f64) as i64;
    if lo > hi {
        return Err(Error::EmptyWindow { lo, hi });
    }
    let window = Window { lo: lo as usize, hi: hi as usize };
    let tails = (0..window.lo).chain(window.hi + 1..=n).map(|l| table.ln_pmf(n, p, l));
    let tail_mass = log_sum_exp(tails).exp().min(1.0);
    Ok(BinomialWindow { window, half_width: w, tail_mass })
}

/// Recipe for a truncated mixture.
#[derive(Clone, Debug)]
pub struct MixtureSpec {
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    pub p: f64,
    pub n: usize,
    pub window: Window,
    pub size_cap: usize,
}

impl MixtureSpec {
    /// Spec with the window `binomial_window(n, p, half_width)`.
    pub fn new(rho: DensityMatrix, sigma: DensityMatrix, p: f64, n: usize, half_width: Option<f64>) -> Result<Self> {
        let window = binomial_window(n, p, half_width)?.window;
        Self::with_window(rho, sigma, p, n, window)
    }

    pub fn with_window(rho: DensityMatrix, sigma: DensityMatrix, p: f64, n: usize, window: Window) -> Result<Self> {
        rho.same_shape(&sigma)?;
        check_probability(p)?;
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one copy".into()));
        }
        if window.lo > window.hi || window.hi > n {
            return Err(Error::EmptyWindow { lo: window.lo as i64, hi: window.hi as i64 });
        }
        Ok(Self { rho, sigma, p, n, window, size_cap: DEFAULT_SIZE_CAP })
    }

    pub fn size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    fn check_cap(&self) -> Result<()> {
        let side = power_side(self.rho.dim(), self.n as u32).unwrap_or(usize::MAX);
        if side > self.size_cap {
            return Err(Error::SizeCap { side, cap: self.size_cap });
        }
        Ok(())
    }
}

/// Copies consumed by the most expensive block of a mixture.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceCount {
    pub rho_copies: usize,
    pub sigma_copies: usize,
}

#[derive(Clone, Debug)]
pub struct TruncatedMixture {
    pub pi: DensityMatrix,
    pub tail_mass: f64,
    pub window: Window,
    /// `(l, weight)` with weights renormalized over the window.
    pub weights: Vec<(usize, f64)>,
    pub resources: ResourceCount,
}

/// All `n`-bit masks with exactly `l` bits set, ascending.
fn placements(n: usize, l: usize) -> impl Iterator<Item = u64> {
    (0..1u64 << n).filter(move |m| m.count_ones() as usize == l)
}

fn symmetric_block_matrix(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, l: usize) -> CMatrix {
    let dims = (rho.dim_a(), rho.dim_b());
    let mut sum: Option<CMatrix> = None;
    let mut count = 0usize;
    for mask in placements(n, l) {
        let factor = |k: usize| if mask >> k & 1 == 1 { sigma.matrix() } else { rho.matrix() };
        let mut acc = factor(0).clone();
        let mut acc_dims = dims;
        for k in 1..n {
            acc = tensor_regrouped(&acc, acc_dims, factor(k), dims);
            acc_dims = (acc_dims.0 * dims.0, acc_dims.1 * dims.1);
        }
        match sum.as_mut() {
            Some(s) => *s += acc,
            None => sum = Some(acc),
        }
        count += 1;
    }
    sum.expect("at least one placement").unscale(count as f64)
}

/// `S(ρ^{⊗(n−l)} ⊗ σ^{⊗l})`: the uniform average over all `C(n, l)`
/// placements of the σ factors.
pub fn symmetric_block(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, l: usize) -> Result<DensityMatrix> {
    symmetric_block_with_cap(rho, sigma, n, l, DEFAULT_SIZE_CAP)
}

pub fn symmetric_block_with_cap(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    l: usize,
    cap: usize,
) -> Result<DensityMatrix> {
    rho.same_shape(sigma)?;
    if n == 0 || l > n {
        return Err(Error::InvalidParameter(format!("need 0 <= l <= n and n >= 1 (n = {n}, l = {l})")));
    }
    let side = power_side(rho.dim(), n as u32).unwrap_or(usize::MAX);
    if side > cap {
        return Err(Error::SizeCap { side, cap });
    }
    let m = symmetric_block_matrix(rho, sigma, n, l);
    Ok(DensityMatrix::new_unchecked(rho.dim_a().pow(n as u32), rho.dim_b().pow(n as u32), m))
}

/// `Π = Σ_{l ∈ window} Binomial(n, p)(l) · S_l / (1 − t_n)`.
pub fn build_truncated_mixture(spec: &MixtureSpec) -> Result<TruncatedMixture> {
    spec.check_cap()?;
    let (n, p, window) = (spec.n, spec.p, spec.window);
    let table = LnFactorials::up_to(n);
    let ln_weights: Vec<(usize, f64)> = (window.lo..=window.hi).map(|l| (l, table.ln_pmf(n, p, l))).collect();
    let ln_kept = log_sum_exp(ln_weights.iter().map(|w| w.1));
    if ln_kept == f64::NEG_INFINITY {
        return Err(Error::ZeroWindowMass);
    }
    let tails = (0..window.lo).chain(window.hi + 1..=n).map(|l| table.ln_pmf(n, p, l));
    let tail_mass = log_sum_exp(tails).exp().min(1.0);

    let side = power_side(spec.rho.dim(), n as u32).expect("checked against cap");
    let mut pi = CMatrix::zeros(side, side);
    let mut weights = Vec::new();
    let mut resources = ResourceCount::default();
    for (l, ln_w) in ln_weights {
        let w = (ln_w - ln_kept).exp();
        if w == 0.0 {
            continue;
        }
        pi += symmetric_block_matrix(&spec.rho, &spec.sigma, n, l).scale(w);
        weights.push((l, w));
        resources.rho_copies = resources.rho_copies.max(n - l);
        resources.sigma_copies = resources.sigma_copies.max(l);
    }
    let dims = (spec.rho.dim_a().pow(n as u32), spec.rho.dim_b().pow(n as u32));
    Ok(TruncatedMixture { pi: DensityMatrix::new_unchecked(dims.0, dims.1, pi), tail_mass, window, weights, resources })
}

/// Outcome of comparing `T(ρ_p^{⊗n}, Π)` with the tail mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    pub n: usize,
    pub p: f64,
    pub window: Window,
    pub trace_distance: f64,
    pub tail_mass: f64,
    pub slack: f64,
    pub pass: bool,
}

pub fn verify_mixing_bound(spec: &MixtureSpec) -> Result<MixingReport> {
    verify_mixing_bound_with(spec, BOUND_SLACK)
}

pub fn verify_mixing_bound_with(spec: &MixtureSpec, slack: f64) -> Result<MixingReport> {
    let mixture = build_truncated_mixture(spec)?;
    let rho_p = mix(&spec.rho, &spec.sigma, spec.p)?;
    let target = tensor_power_with_cap(&rho_p, spec.n as u32, spec.size_cap)?;
    let t = trace_distance(&target, &mixture.pi)?;
    Ok(MixingReport {
        n: spec.n,
        p: spec.p,
        window: spec.window,
        trace_distance: t,
        tail_mass: mixture.tail_mass,
        slack,
        pass: t <= mixture.tail_mass + slack,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub n: usize,
    pub window_lo: usize,
    pub window_hi: usize,
    pub tail_mass: f64,
    /// `2 exp(−2 n^{1/3})`.
    pub hoeffding_bound: f64,
}

/// Tail mass with the default `n^{2/3}` window for each `n`; scalar only.
pub fn tail_mass_scan(p: f64, n_list: &[usize]) -> Result<Vec<TailRow>> {
    let table = LnFactorials::up_to(n_list.iter().copied().max().unwrap_or(0));
    n_list
        .iter()
        .map(|&n| {
            let bw = binomial_window_with(&table, n, p, None)?;
            Ok(TailRow {
                n,
                window_lo: bw.window.lo,
                window_hi: bw.window.hi,
                tail_mass: bw.tail_mass,
                hoeffding_bound: 2.0 * (-2.0 * (n as f64).cbrt()).exp(),
            })
        })
        .collect()
}

/// Conjugates an `n`-copy operator by a relabeling of the copies: copy `k`
/// moves to slot `perm[k]` on both sides of the cut.
pub fn permute_copies(m: &CMatrix, dim_a: usize, dim_b: usize, perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let side_b = dim_b.pow(n as u32);
    let relabel = |idx: usize, d: usize| {
        let mut digits = vec![0; n];
        let mut rest = idx;
        for k in (0..n).rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        let mut moved = vec![0; n];
        for k in 0..n {
            moved[perm[k]] = digits[k];
        }
        moved.iter().fold(0, |acc, &x| acc * d + x)
    };
    let map: Vec<usize> =
        (0..m.nrows()).map(|idx| relabel(idx / side_b, dim_a) * side_b + relabel(idx % side_b, dim_b)).collect();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    out
}
