use proptest::prelude::*;
use specnorm_core::{
    draw_sketch, estimate, gram_matrix, isotropic_start, power_step, EstimateRequest, Matrix,
    Method, Oracle, PowerState, SamplingPlan, SketchParams,
};

fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(n, d)| {
        prop::collection::vec(
            prop_oneof![1 => Just(0.0), 3 => -10.0f64..10.0],
            n * d,
        )
        .prop_map(move |data| Matrix::from_dense(n, d, data).unwrap())
    })
}

fn nonzero_matrix(max_dim: usize) -> impl Strategy<Value = Matrix> {
    matrix_strategy(max_dim).prop_filter("nonzero", |m| m.frobenius_sq() > 1e-6)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn sparse_and_dense_matvec_agree(m in matrix_strategy(9), seed in any::<u64>()) {
        let x = isotropic_start(m.n_cols(), seed).unwrap();
        let dense = m.matvec(&x).unwrap();
        let sparse = m.to_sparse().matvec(&x).unwrap();
        let scale: f64 = dense.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        for (a, b) in dense.iter().zip(&sparse) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
        let gd = m.gram_apply(&x).unwrap();
        let gs = m.to_sparse().gram_apply(&x).unwrap();
        let scale: f64 = gd.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        for (a, b) in gd.iter().zip(&gs) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn row_norms_sum_to_frobenius(m in matrix_strategy(9)) {
        let total: f64 = m.row_norms_squared().iter().sum();
        let entrywise: f64 = m.to_row_major().iter().map(|v| v * v).sum();
        prop_assert!(rel_close(total, entrywise, 1e-12) || entrywise == 0.0);
        prop_assert!(rel_close(m.frobenius_sq(), entrywise, 1e-12) || entrywise == 0.0);
    }

    #[test]
    fn gram_apply_bounded_by_top_eigenvalue(m in matrix_strategy(7), seed in any::<u64>()) {
        let x = isotropic_start(m.n_cols(), seed).unwrap();
        let gx = m.gram_apply(&x).unwrap();
        let len = gx.iter().map(|v| v * v).sum::<f64>().sqrt();
        let top = Oracle::default().exact_norm_sq(&m).unwrap();
        prop_assert!(len <= top * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn transpose_if_wide_preserves_norm(m in matrix_strategy(7)) {
        let tall = m.clone().transpose_if_wide();
        prop_assert!(tall.n_rows() >= tall.n_cols());
        let a = Oracle::default().exact_norm_sq(&m).unwrap();
        let b = Oracle::default().exact_norm_sq(&tall).unwrap();
        prop_assert!(rel_close(a, b, 1e-9) || a.max(b) < 1e-12);
    }

    #[test]
    fn sketch_rows_have_equal_norm(m in nonzero_matrix(8), r in 1usize..40, seed in any::<u64>()) {
        let plan = SamplingPlan::new(&m).unwrap();
        let s = draw_sketch(&m, &plan, &SketchParams::with_samples(r, seed).unwrap()).unwrap();
        prop_assert_eq!(s.shape(), (r, m.n_cols()));
        let want = m.frobenius_sq() / r as f64;
        for got in s.row_norms_squared() {
            prop_assert!(rel_close(got, want, 1e-10), "{} vs {}", got, want);
        }
        let p: f64 = plan.probabilities().iter().sum();
        prop_assert!((p - 1.0).abs() < 1e-12);
        for (pi, w) in plan.probabilities().iter().zip(m.row_norms_squared()) {
            prop_assert_eq!(*pi == 0.0, w == 0.0);
        }
    }

    #[test]
    fn sketch_is_seed_deterministic(m in nonzero_matrix(8), seed in any::<u64>()) {
        let plan = SamplingPlan::new(&m).unwrap();
        let params = SketchParams::with_samples(25, seed).unwrap();
        prop_assert_eq!(draw_sketch(&m, &plan, &params).unwrap(), draw_sketch(&m, &plan, &params).unwrap());
    }

    #[test]
    fn sketch_scales_with_matrix(m in nonzero_matrix(8), c in 0.01f64..100.0, seed in any::<u64>()) {
        let params = SketchParams::with_samples(30, seed).unwrap();
        let s = draw_sketch(&m, &SamplingPlan::new(&m).unwrap(), &params).unwrap();
        let cm = m.scaled(c);
        let cs = draw_sketch(&cm, &SamplingPlan::new(&cm).unwrap(), &params).unwrap();
        for (a, b) in s.to_row_major().iter().zip(cs.to_row_major()) {
            prop_assert!((c * a - b).abs() <= 1e-12 * (c * a).abs().max(1e-300));
        }
    }

    #[test]
    fn power_steps_monotone_and_bounded(m in nonzero_matrix(7), seed in any::<u64>()) {
        let top = Oracle::default().exact_norm_sq(&m).unwrap();
        let mut s = PowerState::start(&m, &isotropic_start(m.n_cols(), seed).unwrap()).unwrap();
        prop_assume!(s.estimate_sq > 0.0);
        for _ in 0..30 {
            let next = power_step(&m, &s).unwrap();
            prop_assert!(next.estimate_sq >= s.estimate_sq - 1e-12 * top);
            prop_assert!(next.estimate_sq <= top * (1.0 + 1e-9));
            let len = next.iterate.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((len - 1.0).abs() < 1e-10);
            s = next;
        }
    }

    #[test]
    fn estimate_is_deterministic(m in nonzero_matrix(8), seed in any::<u64>()) {
        let req = EstimateRequest::new(0.2, 0.1, Method::Direct, seed);
        prop_assert_eq!(estimate(&m, &req).unwrap(), estimate(&m, &req).unwrap());
    }

    #[test]
    fn effective_rank_in_range(m in nonzero_matrix(8), seed in any::<u64>()) {
        let rep = estimate(&m, &EstimateRequest::new(0.2, 0.1, Method::Auto, seed)).unwrap();
        let k = m.n_rows().min(m.n_cols()) as f64;
        prop_assert!(rep.effective_rank >= 1.0 && rep.effective_rank <= k);
    }

    #[test]
    fn gram_matrix_symmetric(m in matrix_strategy(8)) {
        let g = gram_matrix(&m).unwrap();
        let d = g.dim();
        for i in 0..d {
            for j in 0..d {
                prop_assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
    }
}
