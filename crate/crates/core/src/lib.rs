//! Numerics for the continuity of asymptotic entanglement measures.
//!
//! The crate pairs exact linear algebra on small bipartite systems with
//! computable entanglement quantities that bracket every asymptotic measure:
//! certified lower bounds on distillable entanglement and upper bounds on
//! entanglement cost. On top of those it builds the finite-N asymptotic
//! mixing construction, rate bookkeeping for the standard conversion
//! protocols, and a harness that checks the Lipschitz corridor around balls
//! of distillable states.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binomial;
pub mod continuity;
pub mod eof_search;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod mixing;
pub mod protocols;
pub mod random;
pub mod state_file;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{DensityMatrix, Party, PureState, SchmidtForm};
pub use measures::{MeasureKind, MeasureValue};
