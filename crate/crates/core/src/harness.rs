//! Monte Carlo checks of the probabilistic guarantees.
//!
//! Each experiment runs independent seeded trials, counts how often the
//! guaranteed event occurs, and compares the empirical rate with the proven
//! lower bound on its probability. An experiment fails only on a decisive
//! violation: `rate < bound - slack * √(bound (1 - bound) / trials)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_count, check_unit_interval, Error, Result};
use crate::estimator::{estimate, EstimateRequest, Method};
use crate::matrix::Matrix;
use crate::oracle::Oracle;
use crate::power::{isotropic_start, OVERLAP_CONSTANT};
use crate::rng;
use crate::sketch::{draw_sketch, required_samples, SamplingPlan, SketchParams};

/// Binomial standard errors tolerated below a bound.
pub const DEFAULT_SLACK: f64 = 3.0;
pub const MIN_LEMMA1_TRIALS: usize = 100;
pub const MIN_LEMMA3_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialStats {
    pub trials: usize,
    pub successes: usize,
    pub empirical_rate: f64,
    pub bound: f64,
    pub slack: f64,
    pub passed: bool,
}

impl TrialStats {
    pub fn evaluate(successes: usize, trials: usize, bound: f64, slack: f64) -> Self {
        assert!(successes <= trials && trials > 0);
        let empirical_rate = successes as f64 / trials as f64;
        let p = bound.clamp(0.0, 1.0);
        let se = libm::sqrt(p * (1.0 - p) / trials as f64);
        TrialStats {
            trials,
            successes,
            empirical_rate,
            bound,
            slack,
            passed: empirical_rate >= bound - slack * se,
        }
    }

    /// Pools tallies of the same experiment run in chunks.
    pub fn merge(&self, other: &TrialStats) -> TrialStats {
        TrialStats::evaluate(
            self.successes + other.successes,
            self.trials + other.trials,
            self.bound,
            self.slack,
        )
    }
}

/// Random test-matrix generators.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MatrixFamily {
    /// i.i.d. standard normal entries, dense.
    Gaussian { n: usize, d: usize },
    /// Each entry nonzero with probability `density`, normal values, sparse.
    SparseGaussian { n: usize, d: usize, density: f64 },
    /// `U diag(i^{-α}) Vᵀ` with random orthonormal `U`, `V`.
    PowerLaw { n: usize, d: usize, alpha: f64 },
    /// Gaussian with the first row multiplied by `weight`.
    DominantRow { n: usize, d: usize, weight: f64 },
    /// `σ_i = 1 - ε(i-1)/(100(d-1))`, unrotated diagonal: every direction is
    /// already within `(1-ε)` of the top.
    NearFlat { n: usize, d: usize, epsilon: f64 },
    /// `σ₁² = 1`, `σ₂² = 1 - ε` exactly, the rest geometrically smaller;
    /// rotated by random orthonormal factors.
    BoundaryGap { n: usize, d: usize, epsilon: f64 },
}

fn gaussian_values(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// `n x k` (row-major) matrix with orthonormal columns, by two passes of
/// modified Gram-Schmidt on a Gaussian matrix.
pub fn random_orthonormal_columns(n: usize, k: usize, seed: u64) -> Vec<f64> {
    assert!(k <= n, "cannot fit {k} orthonormal columns in R^{n}");
    let mut rng = rng::seeded(seed, rng::MATRIX_STREAM);
    let mut cols: Vec<Vec<f64>> = (0..k).map(|_| gaussian_values(&mut rng, n)).collect();
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let proj: f64 = cols[j].iter().zip(&cols[i]).map(|(a, b)| a * b).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (v, q) in tail[0].iter_mut().zip(&head[i]) {
                    *v -= proj * q;
                }
            }
        }
        let norm = libm::sqrt(cols[j].iter().map(|v| v * v).sum());
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    let mut out = vec![0.0; n * k];
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            out[i * k + j] = v;
        }
    }
    out
}

fn with_singular_values(n: usize, d: usize, sigma: &[f64], seed: u64) -> Result<Matrix> {
    let u = random_orthonormal_columns(n, d, rng::derive_seed(seed, 0));
    let v = random_orthonormal_columns(d, d, rng::derive_seed(seed, 1));
    let mut data = vec![0.0; n * d];
    for i in 0..n {
        for j in 0..d {
            data[i * d + j] = (0..d).map(|k| u[i * d + k] * sigma[k] * v[j * d + k]).sum();
        }
    }
    Matrix::from_dense(n, d, data)
}

impl MatrixFamily {
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            MatrixFamily::Gaussian { n, d }
            | MatrixFamily::SparseGaussian { n, d, .. }
            | MatrixFamily::PowerLaw { n, d, .. }
            | MatrixFamily::DominantRow { n, d, .. }
            | MatrixFamily::NearFlat { n, d, .. }
            | MatrixFamily::BoundaryGap { n, d, .. } => (n, d),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MatrixFamily::Gaussian { .. } => "gaussian",
            MatrixFamily::SparseGaussian { .. } => "sparse-gaussian",
            MatrixFamily::PowerLaw { .. } => "power-law",
            MatrixFamily::DominantRow { .. } => "dominant-row",
            MatrixFamily::NearFlat { .. } => "near-flat",
            MatrixFamily::BoundaryGap { .. } => "boundary-gap",
        }
    }

    pub fn generate(&self, seed: u64) -> Result<Matrix> {
        let (n, d) = self.shape();
        check_count("n", n)?;
        check_count("d", d)?;
        let mut rng = rng::seeded(seed, rng::MATRIX_STREAM);
        match *self {
            MatrixFamily::Gaussian { .. } => Matrix::from_dense(n, d, gaussian_values(&mut rng, n * d)),
            MatrixFamily::SparseGaussian { density, .. } => {
                let mut entries = Vec::new();
                for i in 0..n {
                    for j in 0..d {
                        if rng.random::<f64>() < density {
                            entries.push((i, j, rng.sample(StandardNormal)));
                        }
                    }
                }
                Matrix::from_triplets(n, d, entries)
            }
            MatrixFamily::DominantRow { weight, .. } => {
                let mut data = gaussian_values(&mut rng, n * d);
                data[..d].iter_mut().for_each(|v| *v *= weight);
                Matrix::from_dense(n, d, data)
            }
            MatrixFamily::PowerLaw { alpha, .. } => {
                let k = n.min(d);
                let sigma: Vec<f64> = (1..=k).map(|i| libm::pow(i as f64, -alpha)).collect();
                if n >= d {
                    with_singular_values(n, d, &sigma, seed)
                } else {
                    Ok(with_singular_values(d, n, &sigma, seed)?.transpose())
                }
            }
            MatrixFamily::NearFlat { epsilon, .. } => {
                let k = n.min(d);
                let denom = if k > 1 { (k - 1) as f64 } else { 1.0 };
                Matrix::from_triplets(
                    n,
                    d,
                    (0..k).map(|i| (i, i, 1.0 - epsilon * i as f64 / (100.0 * denom))),
                )
            }
            MatrixFamily::BoundaryGap { epsilon, .. } => {
                let k = n.min(d);
                let mut sigma_sq = vec![1.0];
                let mut s = 1.0 - epsilon;
                while sigma_sq.len() < k {
                    sigma_sq.push(s);
                    s *= 0.5;
                }
                let sigma: Vec<f64> = sigma_sq.iter().map(|v| libm::sqrt(*v)).collect();
                if n >= d {
                    with_singular_values(n, d, &sigma, seed)
                } else {
                    Ok(with_singular_values(d, n, &sigma, seed)?.transpose())
                }
            }
        }
    }
}

/// Sketch concentration: `‖ÃᵀÃ - AᵀA‖ ≤ ε‖A‖²` with probability `≥ 1-δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lemma1Config {
    pub family: MatrixFamily,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Multiplies the required sample count; 1 tests the bound as stated.
    pub sample_factor: f64,
}

pub fn lemma1_experiment(cfg: &Lemma1Config, oracle: &Oracle) -> Result<TrialStats> {
    check_unit_interval("epsilon", cfg.epsilon)?;
    check_unit_interval("delta", cfg.delta)?;
    if cfg.trials < MIN_LEMMA1_TRIALS {
        return Err(Error::TooFewTrials {
            min: MIN_LEMMA1_TRIALS,
            got: cfg.trials,
        });
    }
    let (_, d) = cfg.family.shape();
    let base = required_samples(d, cfg.epsilon, cfg.delta)?;
    let r = libm::ceil(base as f64 * cfg.sample_factor).max(1.0) as usize;
    let mut successes = 0;
    for t in 0..cfg.trials as u64 {
        let a = cfg.family.generate(rng::derive_seed(cfg.seed, 2 * t))?;
        let plan = SamplingPlan::new(&a)?;
        let params = SketchParams {
            epsilon: cfg.epsilon,
            delta: cfg.delta,
            r,
            seed: rng::derive_seed(cfg.seed, 2 * t + 1),
        };
        let sketch = draw_sketch(&a, &plan, &params)?;
        let gram = oracle.gram_matrix(&a)?;
        let norm_sq = gram.eigenvalues()?.largest();
        let deviation = oracle.gram_matrix(&sketch)?.sub(&gram)?.spectral_norm()?;
        if deviation <= cfg.epsilon * norm_sq {
            successes += 1;
        }
    }
    Ok(TrialStats::evaluate(successes, cfg.trials, 1.0 - cfg.delta, DEFAULT_SLACK))
}

/// `1 - (2/π + 2) δ'^{1/3}`.
pub fn lemma3_bound(delta_prime: f64) -> f64 {
    1.0 - OVERLAP_CONSTANT * libm::cbrt(delta_prime)
}

/// Start-vector overlap: `α₁² ≥ δ'/d` with probability `≥ 1 - (2/π+2)δ'^{1/3}`.
///
/// By isotropy the dominant eigenvector can be taken as `e₁`, so `α₁` is
/// the first coordinate of the start vector.
pub fn lemma3_experiment(d: usize, delta_prime: f64, trials: usize, seed: u64) -> Result<TrialStats> {
    check_count("d", d)?;
    check_unit_interval("delta_prime", delta_prime)?;
    if trials < MIN_LEMMA3_TRIALS {
        return Err(Error::TooFewTrials {
            min: MIN_LEMMA3_TRIALS,
            got: trials,
        });
    }
    let threshold = delta_prime / d as f64;
    let mut successes = 0;
    for t in 0..trials as u64 {
        let x = isotropic_start(d, rng::derive_seed(seed, t))?;
        if x[0] * x[0] >= threshold {
            successes += 1;
        }
    }
    Ok(TrialStats::evaluate(successes, trials, lemma3_bound(delta_prime), DEFAULT_SLACK))
}

/// End to end: `σ̃² ∈ [(1-ε)‖A‖², (1+ε)‖A‖²]` with probability `≥ 1-δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Theorem1Config {
    pub family: MatrixFamily,
    pub epsilon: f64,
    pub delta: f64,
    pub method: Method,
    pub trials: usize,
    pub seed: u64,
}

pub fn theorem1_experiment(cfg: &Theorem1Config, oracle: &Oracle) -> Result<TrialStats> {
    check_unit_interval("epsilon", cfg.epsilon)?;
    check_unit_interval("delta", cfg.delta)?;
    check_count("trials", cfg.trials)?;
    let mut successes = 0;
    for t in 0..cfg.trials as u64 {
        let a = cfg.family.generate(rng::derive_seed(cfg.seed, 2 * t))?.transpose_if_wide();
        let truth = oracle.exact_norm_sq(&a)?;
        let req = EstimateRequest::new(cfg.epsilon, cfg.delta, cfg.method, rng::derive_seed(cfg.seed, 2 * t + 1));
        let got = estimate(&a, &req)?.estimate_sq;
        if got >= (1.0 - cfg.epsilon) * truth && got <= (1.0 + cfg.epsilon) * truth {
            successes += 1;
        }
    }
    Ok(TrialStats::evaluate(successes, cfg.trials, 1.0 - cfg.delta, DEFAULT_SLACK))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Experiment {
    Lemma1,
    Lemma3,
    Theorem1,
    All,
}

impl core::str::FromStr for Experiment {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s {
            "lemma1" => Ok(Experiment::Lemma1),
            "lemma3" => Ok(Experiment::Lemma3),
            "theorem1" => Ok(Experiment::Theorem1),
            "all" => Ok(Experiment::All),
            _ => Err(()),
        }
    }
}

/// One line of a harness report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentResult {
    pub name: String,
    /// Human-readable statement of the bound being checked.
    pub claim: String,
    pub stats: TrialStats,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HarnessReport {
    pub seed: u64,
    pub results: Vec<ExperimentResult>,
    pub passed: bool,
}

/// Trial counts for [`run_suite`]; `None` fields use the standard counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuiteTrials {
    pub lemma1: Option<usize>,
    pub lemma3: Option<usize>,
    pub theorem1: Option<usize>,
}

impl SuiteTrials {
    pub fn uniform(trials: usize) -> Self {
        SuiteTrials {
            lemma1: Some(trials),
            lemma3: Some(trials),
            theorem1: Some(trials),
        }
    }
}

fn push(results: &mut Vec<ExperimentResult>, name: String, claim: String, stats: TrialStats) {
    results.push(ExperimentResult { name, claim, stats });
}

/// Runs the standard experiment suite.
pub fn run_suite(which: Experiment, trials: SuiteTrials, seed: u64) -> Result<HarnessReport> {
    use alloc::format;

    let oracle = Oracle::default();
    let mut results = Vec::new();
    let want = |e: Experiment| which == Experiment::All || which == e;

    if want(Experiment::Lemma1) {
        let n_trials = trials.lemma1.unwrap_or(200);
        let cases = [
            ("gaussian", MatrixFamily::Gaussian { n: 100, d: 10 }, 1.0),
            ("dominant-row", MatrixFamily::DominantRow { n: 100, d: 10, weight: 30.0 }, 1.0),
            ("gaussian-4x-samples", MatrixFamily::Gaussian { n: 100, d: 10 }, 4.0),
        ];
        for (k, (label, family, factor)) in cases.into_iter().enumerate() {
            let cfg = Lemma1Config {
                family,
                epsilon: 0.5,
                delta: 0.2,
                trials: n_trials,
                seed: rng::derive_seed(seed, 100 + k as u64),
                sample_factor: factor,
            };
            let stats = lemma1_experiment(&cfg, &oracle)?;
            push(
                &mut results,
                format!("lemma1/{label}"),
                format!(
                    "P[‖ÃᵀÃ - AᵀA‖ ≤ {}‖A‖²] ≥ {} with r = {}·ceil((4d/ε²)ln(2d/δ))",
                    cfg.epsilon,
                    1.0 - cfg.delta,
                    factor
                ),
                stats,
            );
        }
    }

    if want(Experiment::Lemma3) {
        let n_trials = trials.lemma3.unwrap_or(100_000);
        let mut k = 0;
        for &d in &[5usize, 50, 500] {
            for &dp in &[1e-3, 1e-2] {
                let stats = lemma3_experiment(d, dp, n_trials, rng::derive_seed(seed, 200 + k))?;
                k += 1;
                push(
                    &mut results,
                    format!("lemma3/d={d},delta'={dp}"),
                    format!("P[α₁² ≥ δ'/d] ≥ 1 - (2/π+2)δ'^(1/3) = {:.6}", lemma3_bound(dp)),
                    stats,
                );
            }
        }
    }

    if want(Experiment::Theorem1) {
        let n_trials = trials.theorem1.unwrap_or(400);
        let (eps, delta) = (0.1, 0.05);
        let cases = [
            (MatrixFamily::Gaussian { n: 200, d: 30 }, Method::Auto),
            (MatrixFamily::SparseGaussian { n: 500, d: 40, density: 0.1 }, Method::Auto),
            (MatrixFamily::PowerLaw { n: 200, d: 30, alpha: 0.5 }, Method::Auto),
            (MatrixFamily::NearFlat { n: 30, d: 30, epsilon: eps }, Method::Auto),
            (MatrixFamily::BoundaryGap { n: 200, d: 30, epsilon: eps }, Method::Auto),
        ];
        for (k, (family, method)) in cases.into_iter().enumerate() {
            let cfg = Theorem1Config {
                family,
                epsilon: eps,
                delta,
                method,
                trials: n_trials,
                seed: rng::derive_seed(seed, 300 + k as u64),
            };
            let stats = theorem1_experiment(&cfg, &oracle)?;
            push(
                &mut results,
                format!("theorem1/{}", family.name()),
                format!("P[(1-ε)‖A‖² ≤ σ̃² ≤ (1+ε)‖A‖²] ≥ {} at ε = {eps}, method {method}", 1.0 - delta),
                stats,
            );
        }
    }

    let passed = results.iter().all(|r| r.stats.passed);
    Ok(HarnessReport {
        seed,
        results,
        passed,
    })
}
