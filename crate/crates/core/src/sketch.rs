//! Row-norm sampling sketch.
//!
//! Row `i` of `A` is drawn with probability `p_i = ‖a_i‖² / ‖A‖_F²` and
//! rescaled by `1/√(r p_i)`. Drawing `r` rows i.i.d. (with replacement) gives
//! an `r x d` matrix `Ã` with `E[ÃᵀÃ] = AᵀA`; with enough rows
//! ([`required_samples`]) the spectral norms agree to relative error `ε`
//! with probability at least `1 - δ`.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{check_count, check_unit_interval, Error, Result};
use crate::matrix::Matrix;
use crate::rng;

/// Row-sampling distribution for a fixed matrix.
///
/// Draws use binary search on a cumulative table of squared row norms:
/// `O(n)` to build, `O(log n)` per draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    probabilities: Vec<f64>,
    row_norms_sq: Vec<f64>,
    cumulative: Vec<f64>,
    source_frobenius_sq: f64,
    last_nonzero: usize,
}

impl SamplingPlan {
    /// Builds the plan in `O(nnz + n)`. Fails on the zero matrix.
    pub fn new(m: &Matrix) -> Result<Self> {
        let row_norms_sq = m.row_norms_squared();
        let mut cumulative = Vec::with_capacity(row_norms_sq.len());
        let mut acc = 0.0;
        for &w in &row_norms_sq {
            acc += w;
            cumulative.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let probabilities = row_norms_sq.iter().map(|w| w / acc).collect();
        let last_nonzero = row_norms_sq
            .iter()
            .rposition(|&w| w > 0.0)
            .expect("positive total implies a nonzero row");
        Ok(SamplingPlan {
            probabilities,
            row_norms_sq,
            cumulative,
            source_frobenius_sq: acc,
            last_nonzero,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn source_frobenius_sq(&self) -> f64 {
        self.source_frobenius_sq
    }

    pub fn n_rows(&self) -> usize {
        self.probabilities.len()
    }

    /// Draws one row index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.source_frobenius_sq;
        // first index whose cumulative weight exceeds u; zero rows repeat the
        // previous cumulative value so they can never be the first
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.last_nonzero)
    }
}

/// Parameters of one sketch draw.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SketchParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Number of sampled rows.
    pub r: usize,
    pub seed: u64,
}

impl SketchParams {
    /// Sample count from the concentration bound for `d` columns.
    pub fn for_tolerance(d: usize, epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        Ok(SketchParams {
            epsilon,
            delta,
            r: required_samples(d, epsilon, delta)?,
            seed,
        })
    }

    /// An explicit sample count; `epsilon` and `delta` are recorded as NaN.
    pub fn with_samples(r: usize, seed: u64) -> Result<Self> {
        check_count("r", r)?;
        Ok(SketchParams {
            epsilon: f64::NAN,
            delta: f64::NAN,
            r,
            seed,
        })
    }
}

/// `ceil((4d/ε²) ln(2d/δ))`.
pub fn required_samples(d: usize, epsilon: f64, delta: f64) -> Result<usize> {
    check_count("d", d)?;
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    let d = d as f64;
    let r = libm::ceil(4.0 * d / (epsilon * epsilon) * libm::log(2.0 * d / delta));
    Ok((r as usize).max(1))
}

/// Draws `Ã` with `params.r` rows `a_i / √(r p_i)`, `i ~ plan`.
///
/// The sketch keeps the storage kind of `m`. Every row of `Ã` has squared
/// norm `‖A‖_F² / r`.
pub fn draw_sketch(m: &Matrix, plan: &SamplingPlan, params: &SketchParams) -> Result<Matrix> {
    check_count("r", params.r)?;
    if plan.n_rows() != m.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: m.n_rows(),
            got: plan.n_rows(),
        });
    }
    let r = params.r;
    let d = m.n_cols();
    let mut rng = rng::seeded(params.seed, rng::SKETCH_STREAM);
    let total = plan.source_frobenius_sq;

    if m.is_sparse() {
        let mut entries = Vec::new();
        for k in 0..r {
            let i = plan.sample(&mut rng);
            let scale = libm::sqrt(total / (r as f64 * plan.row_norms_sq[i]));
            m.for_each_in_row(i, |j, v| entries.push((k, j, v * scale)));
        }
        Matrix::from_triplets(r, d, entries)
    } else {
        let mut data = Vec::with_capacity(r * d);
        for _ in 0..r {
            let i = plan.sample(&mut rng);
            let scale = libm::sqrt(total / (r as f64 * plan.row_norms_sq[i]));
            m.for_each_in_row(i, |_, v| data.push(v * scale));
        }
        Matrix::from_dense(r, d, data)
    }
}
