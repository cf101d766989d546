//! JSON state files.
//!
//! ```json
//! {"dim_a": 2, "dim_b": 2, "entries": [[[0.5, 0.0], [0.0, 0.0], ...], ...]}
//! ```
//!
//! `entries` is the list of matrix rows in the A-major product basis; each
//! complex entry is a `[re, im]` pair.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix};
use num_complex::Complex64;

#[derive(Debug, Serialize, Deserialize)]
pub struct StateDocument {
    pub dim_a: usize,
    pub dim_b: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl StateDocument {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let entries = (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
        Self { dim_a: rho.dim_a(), dim_b: rho.dim_b(), entries }
    }

    fn matrix(&self) -> Result<CMatrix> {
        let side = self.dim_a * self.dim_b;
        if side == 0 {
            return Err(Error::Format("dimensions must be positive".into()));
        }
        if self.entries.len() != side || self.entries.iter().any(|row| row.len() != side) {
            return Err(Error::Format(format!("entries must be a {side}x{side} array")));
        }
        if self.entries.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Format("non-finite entry".into()));
        }
        Ok(CMatrix::from_fn(side, side, |r, c| {
            let [re, im] = self.entries[r][c];
            Complex64::new(re, im)
        }))
    }

    /// Converts to a state; invariant violations are rejected unless `force`.
    pub fn into_state(self, force: bool) -> Result<DensityMatrix> {
        let m = self.matrix()?;
        if force {
            Ok(DensityMatrix::new_unchecked(self.dim_a, self.dim_b, m))
        } else {
            DensityMatrix::new(self.dim_a, self.dim_b, m)
        }
    }
}

pub fn parse_state(text: &str, force: bool) -> Result<DensityMatrix> {
    serde_json::from_str::<StateDocument>(text)?.into_state(force)
}

pub fn read_state(path: impl AsRef<Path>, force: bool) -> Result<DensityMatrix> {
    parse_state(&std::fs::read_to_string(path)?, force)
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&StateDocument::from_state(rho)).expect("plain data serializes")
}

pub fn write_state(path: impl AsRef<Path>, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(path, state_to_json(rho) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{ginibre_state, rng_from_seed};
    use crate::states::phi_plus_state;

    #[test]
    fn round_trip_is_bit_exact() {
        let rho = ginibre_state(2, 3, &mut rng_from_seed(3));
        let back = parse_state(&state_to_json(&rho), false).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn rejects_invalid_states_unless_forced() {
        let mut doc = StateDocument::from_state(&phi_plus_state());
        doc.entries[0][0] = [0.4, 0.0];
        let text = serde_json::to_string(&doc).unwrap();
        assert!(matches!(parse_state(&text, false), Err(Error::InvalidState(_))));
        let forced = parse_state(&text, true).unwrap();
        assert!(!forced.validate().pass);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(matches!(parse_state("{\"dim_a\": 2}", false), Err(Error::Format(_))));
        let ragged = r#"{"dim_a":1,"dim_b":2,"entries":[[[1,0],[0,0]],[[0,0]]]}"#;
        assert!(matches!(parse_state(ragged, true), Err(Error::Format(_))));
    }
}
