//! The top-level estimator.
//!
//! Two randomized routes are available:
//!
//! * **direct**: power iteration on `A` itself, `O(nnz(A)/ε · log(d/εδ))`.
//! * **sketch**: draw a row-norm sketch `Ã` with `(ε/2, δ/2)`, then run power
//!   iteration on `Ã` with `(ε/3, δ/2)`. Since `(1-ε/3)(1-ε/2) ≥ 1-ε` and
//!   `1+ε/2 ≤ 1+ε`, the result lies in `[(1-ε)‖A‖², (1+ε)‖A‖²]` with
//!   probability at least `1-δ`. Costs `O(d²/ε³ · log²(d/εδ))` after the
//!   `O(nnz)` sampling pass.
//!
//! [`Method::Auto`] picks the cheaper of the two from a unit-constant cost
//! model; [`Method::Exact`] defers to the Jacobi oracle.

use core::fmt;
use core::str::FromStr;

use crate::error::{check_unit_interval, Error, Result};
use crate::matrix::Matrix;
use crate::oracle::Oracle;
use crate::power::{estimate_norm_sq, PowerParams};
use crate::rng;
use crate::sketch::{draw_sketch, required_samples, SamplingPlan, SketchParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Method {
    Auto,
    Sketch,
    Direct,
    Exact,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Sketch => "sketch",
            Method::Direct => "direct",
            Method::Exact => "exact",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod;

impl fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one of auto, sketch, direct, exact")
    }
}

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Method::Auto),
            "sketch" => Ok(Method::Sketch),
            "direct" => Ok(Method::Direct),
            "exact" => Ok(Method::Exact),
            _ => Err(UnknownMethod),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateRequest {
    pub epsilon: f64,
    pub delta: f64,
    pub method: Method,
    pub seed: u64,
}

impl EstimateRequest {
    pub fn new(epsilon: f64, delta: f64, method: Method, seed: u64) -> Self {
        EstimateRequest {
            epsilon,
            delta,
            method,
            seed,
        }
    }
}

/// How the `(ε, δ)` budget is split between the sketch and power stages.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ErrorBudget {
    pub sketch_epsilon: f64,
    pub sketch_delta: f64,
    pub power_epsilon: f64,
    pub power_delta: f64,
}

impl ErrorBudget {
    pub fn split(epsilon: f64, delta: f64) -> Self {
        ErrorBudget {
            sketch_epsilon: epsilon / 2.0,
            sketch_delta: delta / 2.0,
            power_epsilon: epsilon / 3.0,
            power_delta: delta / 2.0,
        }
    }
}

/// Unit-constant cost estimates for the two randomized routes.
///
/// `sketch_cost` includes the `n + r ln r` sampling overhead on top of the
/// `d²/ε³ · ln²(d/εδ)` iteration term, with `r` the sample count the sketch
/// route would actually draw.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostModel {
    pub nnz: usize,
    pub direct_cost: f64,
    pub sketch_cost: f64,
}

impl CostModel {
    pub fn evaluate(nnz: usize, n: usize, d: usize, epsilon: f64, delta: f64) -> Self {
        let log_term = libm::log(d as f64 / (epsilon * delta));
        let direct_cost = nnz as f64 / epsilon * log_term;
        let iterate = (d as f64) * (d as f64) / (epsilon * epsilon * epsilon) * log_term * log_term;
        let budget = ErrorBudget::split(epsilon, delta);
        let r = required_samples(d.max(1), budget.sketch_epsilon, budget.sketch_delta)
            .map(|r| r as f64)
            .unwrap_or(f64::INFINITY);
        let sampling = n as f64 + r * libm::log(r).max(0.0);
        CostModel {
            nnz,
            direct_cost,
            sketch_cost: iterate + sampling,
        }
    }

    /// Ties go to direct.
    pub fn cheaper(&self) -> Method {
        if self.direct_cost <= self.sketch_cost {
            Method::Direct
        } else {
            Method::Sketch
        }
    }
}

/// Picks [`Method::Direct`] or [`Method::Sketch`], never [`Method::Exact`].
pub fn choose_method(nnz: usize, n: usize, d: usize, epsilon: f64, delta: f64) -> Method {
    CostModel::evaluate(nnz, n, d, epsilon, delta).cheaper()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateReport {
    /// `σ̃²`.
    pub estimate_sq: f64,
    /// `‖A‖_F² / σ̃²`, clamped to `[1, min(n, d)]`; 0 for the zero matrix.
    pub effective_rank: f64,
    pub method_used: Method,
    pub r_used: Option<usize>,
    pub iterations_used: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub budget: ErrorBudget,
    pub cost_model: CostModel,
    /// Set when `A = 0`.
    pub degenerate: bool,
}

/// `‖A‖_F² / norm_sq`.
pub fn effective_rank(m: &Matrix, norm_sq: f64) -> Result<f64> {
    if !(norm_sq > 0.0) {
        return Err(Error::NotPositive {
            name: "norm_sq",
            value: norm_sq,
        });
    }
    Ok(m.frobenius_sq() / norm_sq)
}

/// Estimates `‖m‖²` to relative error `ε` with failure probability `δ`.
pub fn estimate(m: &Matrix, req: &EstimateRequest) -> Result<EstimateReport> {
    estimate_with_oracle(m, req, &Oracle::default())
}

/// As [`estimate`], with an explicit oracle for [`Method::Exact`].
pub fn estimate_with_oracle(
    m: &Matrix,
    req: &EstimateRequest,
    oracle: &Oracle,
) -> Result<EstimateReport> {
    check_unit_interval("epsilon", req.epsilon)?;
    check_unit_interval("delta", req.delta)?;

    let tall;
    let m = if m.n_cols() > m.n_rows() {
        tall = m.transpose();
        &tall
    } else {
        m
    };
    let (n, d) = m.shape();
    let frobenius_sq = m.frobenius_sq();
    let nnz = m.nnz();
    let cost_model = CostModel::evaluate(nnz, n, d, req.epsilon, req.delta);
    let budget = ErrorBudget::split(req.epsilon, req.delta);
    let method_used = match req.method {
        Method::Auto => cost_model.cheaper(),
        other => other,
    };

    let mut report = EstimateReport {
        estimate_sq: 0.0,
        effective_rank: 0.0,
        method_used,
        r_used: None,
        iterations_used: 0,
        seed: req.seed,
        epsilon: req.epsilon,
        delta: req.delta,
        budget,
        cost_model,
        degenerate: frobenius_sq == 0.0,
    };
    if report.degenerate {
        return Ok(report);
    }

    // sketch and start vector draw from independent streams of one seed
    let sketch_seed = rng::derive_seed(req.seed, rng::SKETCH_STREAM);
    let power_seed = rng::derive_seed(req.seed, rng::START_STREAM);
    report.estimate_sq = match method_used {
        Method::Exact => oracle.exact_norm_sq(m)?,
        Method::Direct => {
            let params = PowerParams::new(d, req.epsilon, req.delta, power_seed)?;
            let out = estimate_norm_sq(m, &params)?;
            report.iterations_used = out.state.iteration;
            out.estimate_sq
        }
        Method::Sketch => {
            let plan = SamplingPlan::new(m)?;
            let sketch_params =
                SketchParams::for_tolerance(d, budget.sketch_epsilon, budget.sketch_delta, sketch_seed)?;
            let sketch = draw_sketch(m, &plan, &sketch_params)?;
            let params = PowerParams::new(d, budget.power_epsilon, budget.power_delta, power_seed)?;
            let out = estimate_norm_sq(&sketch, &params)?;
            report.r_used = Some(sketch_params.r);
            report.iterations_used = out.state.iteration;
            out.estimate_sq
        }
        Method::Auto => unreachable!("auto resolved above"),
    };

    if report.estimate_sq > 0.0 {
        let rho = frobenius_sq / report.estimate_sq;
        report.effective_rank = rho.clamp(1.0, n.min(d) as f64);
    } else {
        return Err(Error::IterateAnnihilated);
    }
    Ok(report)
}
