//! Power iteration on the Gram operator `XᵀX`.
//!
//! Starting from an isotropic unit vector `x_0`, each step sets
//! `x_n = XᵀX x_{n-1} / ‖XᵀX x_{n-1}‖` and the running estimate is
//! `λ_n² = ‖XᵀX x_n‖`. Because `x_n` is a unit vector, `λ_n² ≤ ‖X‖²` always,
//! and for a PSD operator the sequence is nondecreasing.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_count, check_unit_interval, Error, Result};
use crate::matrix::Matrix;
use crate::rng;

/// `2/π + 2`, the constant in the start-vector overlap bound
/// `P[α₁² ≥ δ'/d] ≥ 1 - (2/π + 2) δ'^{1/3}`.
pub const OVERLAP_CONSTANT: f64 = core::f64::consts::FRAC_2_PI + 2.0;

/// `(2/π + 2)³`, the constant `c` in the convergence bound
/// `λ_n² ≥ ‖X‖²(1-ε) / √(1 + (cd/δ³)(1-ε)^{2(n+1)})`.
pub const CONVERGENCE_CONSTANT: f64 = OVERLAP_CONSTANT * OVERLAP_CONSTANT * OVERLAP_CONSTANT;

/// Number of trailing iterations compared by the adaptive stop rule.
pub const ADAPTIVE_WINDOW: usize = 5;

/// Uniformly random unit vector in `R^d`: `d` standard normals, normalized.
pub fn isotropic_start(d: usize, seed: u64) -> Result<Vec<f64>> {
    check_count("d", d)?;
    let mut rng = rng::seeded(seed, rng::START_STREAM);
    Ok(isotropic_start_from(d, &mut rng))
}

pub(crate) fn isotropic_start_from<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut x = vec![0.0; d];
    loop {
        for v in x.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm_sq: f64 = x.iter().map(|v| v * v).sum();
        if norm_sq > 0.0 {
            let inv = 1.0 / libm::sqrt(norm_sq);
            x.iter_mut().for_each(|v| *v *= inv);
            return x;
        }
    }
}

/// Power steps sufficient for `λ_n² ≥ (1-ε)‖X‖²` with probability `≥ 1-δ`.
///
/// Runs the convergence bound at `ε' = ε/2` and asks that
/// `(cd/δ³)(1-ε')^{2(n+1)} ≤ κ` with `κ = (1-ε')^{-2} - 1`; then the bound is
/// at least `(1-ε')² ≥ 1-ε`. Solving for `n`:
///
/// `n = ceil([ln(cd) + 3 ln(1/δ) + ln(1/κ)] / (2 ln(1/(1-ε/2))))`.
pub fn iteration_count(d: usize, epsilon: f64, delta: f64) -> Result<usize> {
    check_count("d", d)?;
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    let shrink = 1.0 - epsilon / 2.0;
    let kappa = 1.0 / (shrink * shrink) - 1.0;
    let numerator = libm::log(CONVERGENCE_CONSTANT * d as f64)
        + 3.0 * libm::log(1.0 / delta)
        + libm::log(1.0 / kappa);
    let denominator = -2.0 * libm::log(shrink);
    let n = libm::ceil(numerator / denominator);
    Ok(if n < 1.0 { 1 } else { n as usize })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerParams {
    pub epsilon: f64,
    pub delta: f64,
    pub max_iterations: usize,
    /// Stop once `λ²` changes by less than `adaptive_tol` (relative) over
    /// [`ADAPTIVE_WINDOW`] consecutive steps.
    pub adaptive_stop: bool,
    pub adaptive_tol: f64,
    pub seed: u64,
}

impl PowerParams {
    /// Fixed-count run of [`iteration_count`]`(d, ε, δ)` steps.
    pub fn new(d: usize, epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        Ok(PowerParams {
            epsilon,
            delta,
            max_iterations: iteration_count(d, epsilon, delta)?,
            adaptive_stop: false,
            adaptive_tol: 1e-10,
            seed,
        })
    }

    pub fn with_adaptive_stop(mut self, tol: f64) -> Self {
        self.adaptive_stop = true;
        self.adaptive_tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        check_unit_interval("epsilon", self.epsilon)?;
        check_unit_interval("delta", self.delta)?;
        check_count("max_iterations", self.max_iterations)?;
        if self.adaptive_stop && !(self.adaptive_tol > 0.0) {
            return Err(Error::NotPositive {
                name: "adaptive_tol",
                value: self.adaptive_tol,
            });
        }
        Ok(())
    }
}

/// Current unit iterate `x_n` and its estimate `λ_n² = ‖XᵀX x_n‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerState {
    pub iterate: Vec<f64>,
    pub iteration: usize,
    pub estimate_sq: f64,
    image: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

impl PowerState {
    /// State at iteration 0; `x0` is normalized here.
    pub fn start(m: &Matrix, x0: &[f64]) -> Result<Self> {
        let len = norm(x0);
        if !(len > 0.0) {
            return Err(Error::IterateAnnihilated);
        }
        let iterate: Vec<f64> = x0.iter().map(|v| v / len).collect();
        let image = m.gram_apply(&iterate)?;
        Ok(PowerState {
            estimate_sq: norm(&image),
            iterate,
            iteration: 0,
            image,
        })
    }
}

/// One power step: normalize `XᵀX x_n` into `x_{n+1}` and recompute `λ²`.
pub fn power_step(m: &Matrix, s: &PowerState) -> Result<PowerState> {
    if s.iterate.len() != m.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: m.n_cols(),
            got: s.iterate.len(),
        });
    }
    let len = norm(&s.image);
    if !(len > 0.0) {
        return Err(Error::IterateAnnihilated);
    }
    let iterate: Vec<f64> = s.image.iter().map(|v| v / len).collect();
    let mut image = vec![0.0; m.n_cols()];
    m.gram_apply_into(&iterate, &mut image)?;
    Ok(PowerState {
        estimate_sq: norm(&image),
        iterate,
        iteration: s.iteration + 1,
        image,
    })
}

/// Result of [`estimate_norm_sq`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerOutcome {
    pub estimate_sq: f64,
    pub state: PowerState,
    /// Set for the zero matrix, where no iteration is possible.
    pub degenerate: bool,
}

/// Estimates `‖m‖²` by power iteration from an isotropic start.
///
/// Never overshoots: the result is at most `‖m‖²`. With probability at
/// least `1-δ` over the start it is at least `(1-ε)‖m‖²` when run for
/// [`iteration_count`] steps.
pub fn estimate_norm_sq(m: &Matrix, params: &PowerParams) -> Result<PowerOutcome> {
    params.validate()?;
    let x0 = isotropic_start(m.n_cols(), params.seed)?;
    if m.frobenius_sq() == 0.0 {
        let d = m.n_cols();
        return Ok(PowerOutcome {
            estimate_sq: 0.0,
            state: PowerState {
                iterate: x0,
                iteration: 0,
                estimate_sq: 0.0,
                image: vec![0.0; d],
            },
            degenerate: true,
        });
    }
    let mut state = PowerState::start(m, &x0)?;
    let mut history = [0.0f64; ADAPTIVE_WINDOW + 1];
    history[0] = state.estimate_sq;
    for _ in 0..params.max_iterations {
        state = power_step(m, &state)?;
        if params.adaptive_stop {
            let n = state.iteration;
            let oldest = history[n % (ADAPTIVE_WINDOW + 1)];
            history[n % (ADAPTIVE_WINDOW + 1)] = state.estimate_sq;
            if n >= ADAPTIVE_WINDOW
                && (state.estimate_sq - oldest).abs() <= params.adaptive_tol * state.estimate_sq
            {
                break;
            }
        }
    }
    Ok(PowerOutcome {
        estimate_sq: state.estimate_sq,
        state,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((OVERLAP_CONSTANT - 2.636_619_772_367_581).abs() < 1e-14);
        assert!((CONVERGENCE_CONSTANT - 18.329_157_951_292_68).abs() < 1e-12);
    }

    #[test]
    fn start_is_unit() {
        for seed in 0..50 {
            let x = isotropic_start(5, seed).unwrap();
            assert!((norm(&x) - 1.0).abs() < 1e-12);
        }
        let x = isotropic_start(1, 3).unwrap();
        assert_eq!(x[0].abs(), 1.0);
        assert!(isotropic_start(0, 3).is_err());
        assert_eq!(isotropic_start(8, 11).unwrap(), isotropic_start(8, 11).unwrap());
    }

    #[test]
    fn iteration_count_reference_value() {
        // 18.7262 / 0.102587 = 182.54
        assert_eq!(iteration_count(100, 0.1, 0.05).unwrap(), 183);
    }

    #[test]
    fn iteration_count_extremes_and_errors() {
        let n = iteration_count(1, 1.0 - 1e-12, 0.5).unwrap();
        assert!((1..20).contains(&n), "{n}");
        assert!(iteration_count(10, 0.0, 0.1).is_err());
        assert!(iteration_count(10, 0.1, 1.0).is_err());
        assert!(iteration_count(0, 0.1, 0.1).is_err());
    }

    #[test]
    fn iteration_count_monotone() {
        let eps = [0.01, 0.05, 0.1, 0.3, 0.7];
        let deltas = [0.001, 0.01, 0.1, 0.5];
        let dims = [1, 2, 10, 100, 10_000];
        for &d in &dims {
            for &dl in &deltas {
                for w in eps.windows(2) {
                    assert!(iteration_count(d, w[0], dl).unwrap() >= iteration_count(d, w[1], dl).unwrap());
                }
            }
            for &e in &eps {
                for w in deltas.windows(2) {
                    assert!(iteration_count(d, e, w[0]).unwrap() >= iteration_count(d, e, w[1]).unwrap());
                }
            }
        }
        for &e in &eps {
            for w in dims.windows(2) {
                assert!(iteration_count(w[0], e, 0.1).unwrap() <= iteration_count(w[1], e, 0.1).unwrap());
            }
        }
    }

    #[test]
    fn identity_is_a_fixed_point() {
        let m = Matrix::identity(4).unwrap();
        let mut s = PowerState::start(&m, &isotropic_start(4, 1).unwrap()).unwrap();
        let x0 = s.iterate.clone();
        for _ in 0..5 {
            s = power_step(&m, &s).unwrap();
            assert!((s.estimate_sq - 1.0).abs() < 1e-15);
            for (a, b) in s.iterate.iter().zip(&x0) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_one_step() {
        let m = Matrix::diagonal(&[2.0, 1.0]).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let s0 = PowerState::start(&m, &[h, h]).unwrap();
        let s1 = power_step(&m, &s0).unwrap();
        // x1 = (4,1)/√17, AᵀA x1 = (16,1)/√17
        let r = 17f64.sqrt();
        assert!((s1.iterate[0] - 4.0 / r).abs() < 1e-15);
        assert!((s1.iterate[1] - 1.0 / r).abs() < 1e-15);
        assert!((s1.estimate_sq - 3.888_141_851_684_880).abs() < 1e-12);
        assert_eq!(s1.iteration, 1);

        let mut s = s1;
        let mut prev = s.estimate_sq;
        for _ in 0..60 {
            s = power_step(&m, &s).unwrap();
            assert!(s.estimate_sq >= prev - 1e-12 && s.estimate_sq <= 4.0 + 1e-12);
            prev = s.estimate_sq;
        }
        assert!((prev - 4.0).abs() < 1e-12);
    }

    #[test]
    fn annihilated_iterate() {
        // start orthogonal to the row space
        let m = Matrix::from_rows(&[[1.0, 0.0]]).unwrap();
        let s = PowerState::start(&m, &[0.0, 1.0]).unwrap();
        assert_eq!(s.estimate_sq, 0.0);
        assert_eq!(power_step(&m, &s).unwrap_err(), Error::IterateAnnihilated);
    }

    #[test]
    fn estimate_examples() {
        let id = Matrix::identity(6).unwrap();
        let params = PowerParams::new(6, 0.1, 0.1, 4).unwrap();
        let out = estimate_norm_sq(&id, &params).unwrap();
        assert!((out.estimate_sq - 1.0).abs() < 1e-15);

        // uvᵀ with ‖u‖² = 14, ‖v‖² = 5
        let u = [1.0, 2.0, 3.0];
        let v = [2.0, -1.0];
        let rows: Vec<Vec<f64>> = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let params = PowerParams {
            max_iterations: 1,
            ..PowerParams::new(2, 0.1, 0.1, 9).unwrap()
        };
        let out = estimate_norm_sq(&m, &params).unwrap();
        assert!((out.estimate_sq - 70.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        let m = Matrix::zeros(3, 3).unwrap();
        let out = estimate_norm_sq(&m, &PowerParams::new(3, 0.1, 0.1, 0).unwrap()).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.estimate_sq, 0.0);
    }

    #[test]
    fn adaptive_stop_terminates_early() {
        let m = Matrix::diagonal(&[3.0, 1.0, 0.5]).unwrap();
        let fixed = PowerParams {
            max_iterations: 500,
            ..PowerParams::new(3, 0.1, 0.1, 2).unwrap()
        };
        let adaptive = fixed.with_adaptive_stop(1e-12);
        let a = estimate_norm_sq(&m, &adaptive).unwrap();
        let f = estimate_norm_sq(&m, &fixed).unwrap();
        assert!(a.state.iteration < 500);
        assert_eq!(f.state.iteration, 500);
        assert!((a.estimate_sq - 9.0).abs() < 1e-9);
        let bad = PowerParams { adaptive_tol: 0.0, ..adaptive };
        assert!(estimate_norm_sq(&m, &bad).is_err());
    }
}
