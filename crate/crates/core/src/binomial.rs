//! Log-space binomial arithmetic.

/// Table of `ln k!` for `k = 0..=n`.
#[derive(Clone, Debug)]
pub struct LnFactorials(Vec<f64>);

impl LnFactorials {
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self(table)
    }

    pub fn max_n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }

    /// `ln P[X = k]` for `X ~ Binomial(n, p)`; `-inf` where the mass is zero.
    pub fn ln_pmf(&self, n: usize, p: f64, k: usize) -> f64 {
        self.ln_choose(n, k) + xlny(k as f64, p) + xlny((n - k) as f64, 1.0 - p)
    }
}

/// `x ln y` with `0 ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `ln Σ exp(terms)`, stable for large negative terms.
pub fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}
