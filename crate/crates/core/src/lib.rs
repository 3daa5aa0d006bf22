//! Relative-error spectral norm estimation for large sparse or dense matrices.
//!
//! The estimate of `‖A‖²` comes from power iteration on `AᵀA`, optionally
//! preceded by a row-norm sampling sketch that shrinks `A` to `r x d` while
//! preserving its spectral norm to within `(1 ± ε)`. The caller supplies a
//! relative tolerance `ε` and failure probability `δ`; the crate works out
//! sample and iteration counts from them.
//!
//! ```
//! use specnorm_core::{estimate, EstimateRequest, Matrix, Method};
//!
//! let a = Matrix::from_rows(&[[3.0, 0.0], [0.0, 4.0], [0.0, 0.0]]).unwrap();
//! let report = estimate(&a, &EstimateRequest::new(0.1, 0.05, Method::Direct, 7)).unwrap();
//! assert!(report.estimate_sq <= 16.0 && report.estimate_sq >= 0.9 * 16.0);
//! ```
//!
//! Also provided: a cyclic Jacobi eigensolver ([`oracle`]) for exact answers
//! at small `d`, and a Monte Carlo [`harness`] that checks the probabilistic
//! guarantees empirically.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod error;
pub mod estimator;
pub mod harness;
pub mod matrix;
pub mod oracle;
pub mod power;
pub mod rng;
pub mod sketch;

pub use error::{Error, ErrorKind, Result};
pub use estimator::{
    choose_method, effective_rank, estimate, estimate_with_oracle, CostModel, ErrorBudget,
    EstimateReport, EstimateRequest, Method,
};
pub use matrix::Matrix;
pub use oracle::{exact_norm_sq, gram_matrix, Oracle, SpectrumResult, SymmetricMatrix};
pub use power::{
    estimate_norm_sq, isotropic_start, iteration_count, power_step, PowerOutcome, PowerParams,
    PowerState,
};
pub use sketch::{draw_sketch, required_samples, SamplingPlan, SketchParams};
