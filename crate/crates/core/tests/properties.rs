use proptest::prelude::*;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavl1::dwt::{
    adjoint_measurement, apply_measurement, forward_dwt, inverse_dwt, CoeffLayout,
    CoefficientVector, MeasurementSet, Wavelet, WaveletFamily,
};
use wavl1::framelet::FrameletDictionary;
use wavl1::linalg::{dot, max_abs_diff, norm2};
use wavl1::solver::{
    objective, row_group_soft_threshold, solve_weighted_l1, weighted_soft_threshold, Lambda,
    Penalty, SolverConfig,
};
use wavl1::tree::{is_closed_tree, random_closed_tree, theta_sq};
use wavl1::weights::{alpha_weights, irw_update, uniform_norm_weights};

fn vec_from(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn wavelet() -> impl Strategy<Value = Wavelet> {
    prop::sample::select(Wavelet::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_is_orthonormal(w in wavelet(), levels in 2u32..=9, depth_cut in 0u32..3, seed in any::<u64>()) {
        let n = 1usize << levels;
        let depth = levels.saturating_sub(depth_cut).max(1);
        let fam = WaveletFamily::new(w);
        let x = vec_from(seed, n);
        let c = forward_dwt(&x, &fam, depth).unwrap();
        prop_assert!((norm2(c.values()) - norm2(&x)).abs() < 1e-10);
        prop_assert!(max_abs_diff(&inverse_dwt(&c, &fam).unwrap(), &x) < 1e-10);
    }

    #[test]
    fn sampling_operator_adjoint(w in wavelet(), levels in 3u32..=8, seed in any::<u64>()) {
        let n = 1usize << levels;
        let layout = CoeffLayout::for_signal(n, levels).unwrap();
        let fam = WaveletFamily::new(w);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=n);
        let mut idx = sample(&mut rng, n, m).into_vec();
        idx.sort_unstable();
        let c = CoefficientVector::new(vec_from(seed ^ 1, n), layout, w).unwrap();
        let r = vec_from(seed ^ 2, m);
        let lhs = dot(&apply_measurement(&c, &idx, &fam).unwrap(), &r);
        let rhs = dot(c.values(), adjoint_measurement(&r, &idx, layout, &fam).unwrap().values());
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn soft_threshold_satisfies_optimality(v in prop::collection::vec(-5.0f64..5.0, 1..40), t in 0.0f64..3.0) {
        let ts = vec![t; v.len()];
        let x = weighted_soft_threshold(&v, &ts).unwrap();
        for (xi, vi) in x.iter().zip(&v) {
            if *xi == 0.0 {
                prop_assert!(vi.abs() <= t + 1e-12);
            } else {
                prop_assert!((vi - xi - t * xi.signum()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn row_threshold_shrinks_along_the_row(v in prop::collection::vec(-3.0f64..3.0, 1..6), t in 0.0f64..3.0) {
        let k = v.len();
        let x = row_group_soft_threshold(&v, k, &[t]).unwrap();
        let radius = (norm2(&v) - t).max(0.0);
        prop_assert!((norm2(&x) - radius).abs() < 1e-12);
        if radius > 0.0 {
            let s = radius / norm2(&v);
            for (xi, vi) in x.iter().zip(&v) {
                prop_assert!((xi - s * vi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_trees_are_closed(levels in 1u32..=7, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let max = 1usize << levels;
        let s = 1 + ((max - 1) as f64 * frac) as usize;
        let tree = random_closed_tree(s, levels, 1, seed).unwrap();
        prop_assert_eq!(tree.len(), s);
        prop_assert!(is_closed_tree(&tree.nodes()));
        prop_assert!(tree.k_of_t() <= (theta_sq(levels, 1) as f64) * s as f64);
    }

    #[test]
    fn weight_laws(dim in 1usize..=2, levels in 1u32..=6, seed in any::<u64>()) {
        let layout = CoeffLayout::full(dim, levels).unwrap();
        let norm = uniform_norm_weights(layout);
        prop_assert!(norm.values().iter().all(|w| *w >= 1.0));
        let alpha = alpha_weights(layout, 1.0).unwrap();
        prop_assert_eq!(alpha.values(), norm.values());
        let c = CoefficientVector::new(vec_from(seed, layout.len()), layout, Wavelet::Haar).unwrap();
        let irw = irw_update(&c, 0.1, 1).unwrap();
        for (i, &ci) in c.values().iter().enumerate() {
            for (j, &cj) in c.values().iter().enumerate().take(8) {
                if ci.abs() < cj.abs() {
                    prop_assert!(irw.values()[i] > irw.values()[j]);
                }
            }
        }
    }

    #[test]
    fn framelet_analysis_is_parseval(levels in 3u32..=7, patch_pow in 0u32..=3, seed in any::<u64>()) {
        let n = 1usize << levels;
        let dict = FrameletDictionary::haar(n, 1 << patch_pow.min(levels)).unwrap();
        let f = vec_from(seed, n);
        let c = dict.analysis_flat(&f).unwrap();
        prop_assert!((norm2(&c) - norm2(&f)).abs() < 1e-10);
        prop_assert!(max_abs_diff(&dict.synthesis_flat(&c).unwrap(), &f) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solver_descends_below_zero(w in wavelet(), seed in any::<u64>(), rel in 0.005f64..0.5) {
        let n = 64;
        let layout = CoeffLayout::for_signal(n, 6).unwrap();
        let fam = WaveletFamily::new(w);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, n, 32).into_vec();
        idx.sort_unstable();
        let grid = vec_from(seed ^ 3, n);
        let meas = MeasurementSet::from_grids(idx, &[&grid]).unwrap();
        let weights = uniform_norm_weights(layout);
        let config = SolverConfig { lambda: Lambda::Relative(rel), max_iters: 2000, ..SolverConfig::default() };
        let r = solve_weighted_l1(&meas, &weights, &config, &fam, layout).unwrap();
        let at = |c: &[f64]| objective(&meas, c, &weights, r.lambda, &fam, layout, Penalty::Elementwise).unwrap();
        prop_assert!(at(r.coeffs.values()) <= at(&vec![0.0; n]) + 1e-12);
        let trace = &r.objective_trace;
        prop_assert!(trace.windows(2).all(|p| p[1] <= p[0] + 1e-12 * p[0].abs().max(1.0)));
    }
}
