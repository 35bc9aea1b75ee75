//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavl1::dwt::{
    adjoint_measurement, apply_measurement, forward_dwt, forward_dwt_2d, inverse_dwt, CoeffLayout,
    CoefficientVector, MeasurementSet, Wavelet, WaveletFamily,
};
use wavl1::framelet::FrameletDictionary;
use wavl1::harness::{
    compare_trials, ComparisonRow, Experiment, ExperimentKind, NoiseLevel, RecoveryMode,
};
use wavl1::linalg::{dot, max_abs_diff, norm2, DenseMatrix};
use wavl1::solver::{
    objective, row_group_soft_threshold, solve_mmv, solve_weighted_l1, weighted_soft_threshold,
    Lambda, Penalty, SolverConfig,
};
use wavl1::tree::{k_tree_profile, verify_inequalities, EnumerationLimits};
use wavl1::weights::{uniform_norm_weights, wavelet_rw_update, WeightScheme};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let t = Instant::now();
    let mut v = f();
    let took = t.elapsed();
    if let Some(b) = budget {
        if took > b {
            v.pass = false;
            v.detail
                .push_str(&format!("; over the {:.0} s budget", b.as_secs_f64()));
        }
    }
    (v, took)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn sorted_sample(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    let mut idx = sample(rng, n, m).into_vec();
    idx.sort_unstable();
    idx
}

fn transform_round_trips() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut err, mut norm_err) = (0.0f64, 0.0f64);
    for w in Wavelet::ALL {
        let fam = WaveletFamily::new(w);
        for n in [64usize, 256, 1024] {
            let j = n.trailing_zeros();
            for _ in 0..100 {
                let x = random_vec(&mut rng, n);
                let c = forward_dwt(&x, &fam, j).unwrap();
                norm_err = norm_err.max((norm2(c.values()) - norm2(&x)).abs());
                err = err.max(max_abs_diff(&inverse_dwt(&c, &fam).unwrap(), &x));
            }
        }
        for _ in 0..100 {
            let x = random_vec(&mut rng, 32 * 32);
            let c = forward_dwt_2d(&x, 32, &fam, 5).unwrap();
            norm_err = norm_err.max((norm2(c.values()) - norm2(&x)).abs());
            err = err.max(max_abs_diff(&inverse_dwt(&c, &fam).unwrap(), &x));
        }
    }
    Verdict::new(
        err < 1e-10 && norm_err < 1e-9,
        format!("max round-trip error {err:.2e}, max norm deviation {norm_err:.2e}"),
    )
}

/// Dense `A` from unit coefficient vectors pushed through the inverse
/// transform and sampled.
fn dense_measurement(layout: CoeffLayout, fam: &WaveletFamily, idx: &[usize]) -> DenseMatrix {
    let scale = 1.0 / (idx.len() as f64).sqrt();
    let cols: Vec<Vec<f64>> = (0..layout.len())
        .map(|j| {
            let mut e = vec![0.0; layout.len()];
            e[j] = 1.0;
            let grid =
                inverse_dwt(&CoefficientVector::new(e, layout, fam.kind()).unwrap(), fam).unwrap();
            idx.iter().map(|&i| grid[i] * scale).collect()
        })
        .collect();
    DenseMatrix::from_columns(idx.len(), &cols)
}

fn operator_fidelity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut dense_err = 0.0f64;
    let layouts = [
        CoeffLayout::for_signal(64, 6).unwrap(),
        CoeffLayout::for_signal(256, 8).unwrap(),
        CoeffLayout::for_signal(256, 4).unwrap(),
        CoeffLayout::for_image(16, 4).unwrap(),
    ];
    for w in Wavelet::ALL {
        let fam = WaveletFamily::new(w);
        for layout in layouts {
            let m = layout.len() / 4;
            let idx = sorted_sample(&mut rng, layout.len(), m);
            let a = dense_measurement(layout, &fam, &idx);
            let c = random_vec(&mut rng, layout.len());
            let cv = CoefficientVector::new(c.clone(), layout, w).unwrap();
            dense_err = dense_err.max(max_abs_diff(
                &apply_measurement(&cv, &idx, &fam).unwrap(),
                &a.matvec(&c),
            ));
            let r = random_vec(&mut rng, m);
            let at = adjoint_measurement(&r, &idx, layout, &fam).unwrap();
            dense_err = dense_err.max(max_abs_diff(at.values(), &a.transpose().matvec(&r)));
        }
    }
    let mut adj_err = 0.0f64;
    let layout = CoeffLayout::for_signal(256, 8).unwrap();
    for k in 0..20 {
        let w = Wavelet::ALL[k % 4];
        let fam = WaveletFamily::new(w);
        let idx = sorted_sample(&mut rng, 256, 64);
        let c = CoefficientVector::new(random_vec(&mut rng, 256), layout, w).unwrap();
        let r = random_vec(&mut rng, 64);
        let lhs = dot(&apply_measurement(&c, &idx, &fam).unwrap(), &r);
        let rhs = dot(
            c.values(),
            adjoint_measurement(&r, &idx, layout, &fam)
                .unwrap()
                .values(),
        );
        adj_err = adj_err.max((lhs - rhs).abs());
    }
    Verdict::new(
        dense_err < 1e-10 && adj_err < 1e-10,
        format!("dense oracle deviation {dense_err:.2e}, adjoint identity deviation {adj_err:.2e} over 20 pairs"),
    )
}

/// Minimizer of `f` over a uniform grid on `[lo, hi]` with spacing `h`.
fn grid_argmin(f: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> f64 {
    let steps = ((hi - lo) / h).round() as usize;
    (0..=steps)
        .map(|i| lo + i as f64 * h)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap()
}

fn prox_oracles() -> Verdict {
    const H: f64 = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut scalar_err, mut row_err, mut angle_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let v = rng.random_range(-3.0..3.0);
        let t = rng.random_range(0.0..2.0);
        let got = weighted_soft_threshold(&[v], &[t]).unwrap()[0];
        let best = grid_argmin(|x| t * x.abs() + 0.5 * (x - v).powi(2), -4.0, 4.0, H);
        scalar_err = scalar_err.max((got - best).abs());
    }
    // the row problem reduces to a 1D problem in the radius along v/‖v‖
    for _ in 0..1000 {
        let k = rng.random_range(1..=4usize);
        let v: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
        let t = rng.random_range(0.0..2.0);
        let got = row_group_soft_threshold(&v, k, &[t]).unwrap();
        let nv = norm2(&v);
        let radius = grid_argmin(|r| t * r + 0.5 * (r - nv).powi(2), 0.0, 5.0, H);
        row_err = row_err.max((norm2(&got) - radius).abs());
        if norm2(&got) > 0.0 {
            let cos = dot(&got, &v) / (norm2(&got) * nv);
            angle_err = angle_err.max(1.0 - cos);
        }
    }
    Verdict::new(
        scalar_err <= H && row_err <= H && angle_err < 1e-12,
        format!(
            "1000+1000 instances: scalar {scalar_err:.1e}, row radius {row_err:.1e}, row direction {angle_err:.1e}"
        ),
    )
}

fn tree_inequalities() -> Verdict {
    let mut failures = Vec::new();
    for j in 1..=6u32 {
        let report = verify_inequalities(j, 1, 12).unwrap();
        if !report.all_pass() {
            failures.push(format!("J={j} report"));
        }
        let nodes = 1usize << j;
        let s_max = 12.min(nodes);
        let k = k_tree_profile(s_max, j, EnumerationLimits::default()).unwrap();
        let theta2 = 1u64 << (j - 1);
        let block = 1u128 << (2 * (j - 1));
        for s in 1..=s_max {
            if k[s] > theta2 * s as u64 {
                failures.push(format!("J={j} s={s}: K_T above Θ²s"));
            }
            if 3 * s <= s_max && k[3 * s] < 3 * k[s] {
                failures.push(format!("J={j} s={s}: K_T(3s) < 3K_T(s)"));
            }
            // K/(Θ²s) ≤ (2B+1)/(3B), cross-multiplied
            if 3 * block * k[s] as u128 > (2 * block + 1) * (theta2 as u128 * s as u128) {
                failures.push(format!("J={j} s={s}: ratio bound"));
            }
        }
        if (j as usize + 1) <= s_max && k[j as usize + 1] != 1u64 << j {
            failures.push(format!("J={j}: K_T(J+1) = {} not 2^J", k[j as usize + 1]));
        }
    }
    Verdict::new(
        failures.is_empty(),
        if failures.is_empty() {
            "J = 1..6, s ≤ 12 exhaustive; all inequalities and K_T(J+1) = 2^J hold".to_string()
        } else {
            failures.join(", ")
        },
    )
}

fn first_iteration_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for dim in [1usize, 2] {
        for levels in 1..=8u32 {
            for depth in 1..=levels {
                let layout = CoeffLayout::new(dim, levels, depth).unwrap();
                let base = uniform_norm_weights(layout);
                let zero = CoefficientVector::zeros(layout, Wavelet::Haar);
                let w = wavelet_rw_update(&zero, &base, 1).unwrap();
                worst = worst.max(max_abs_diff(w.values(), base.values()));
                cases += 1;
            }
        }
    }
    Verdict::new(
        worst <= 1e-12,
        format!("{cases} layouts (d = 1, 2; J ≤ 8; every depth), max deviation {worst:.1e}"),
    )
}

fn rows_of<'a>(
    rows: &'a [ComparisonRow],
    scheme: &str,
    mode: RecoveryMode,
) -> Vec<&'a ComparisonRow> {
    rows.iter()
        .filter(|r| r.scheme == scheme && r.mode == mode)
        .collect()
}

fn synthetic_tree_recovery() -> Verdict {
    let exp = Experiment::new(ExperimentKind::SynthTree, 1);
    let weighted = WeightScheme::AlphaPower(1.0);
    let rows = compare_trials(&exp, &[WeightScheme::Unweighted, weighted], 20).unwrap();
    let u = rows_of(&rows, "none", RecoveryMode::Single);
    let w = rows_of(&rows, &weighted.to_string(), RecoveryMode::Single);
    let err_wins = u
        .iter()
        .zip(&w)
        .filter(|(u, w)| w.metrics.coef_error_l2.unwrap() < u.metrics.coef_error_l2.unwrap())
        .count();
    let support_wins = u
        .iter()
        .zip(&w)
        .filter(|(u, w)| w.metrics.support_overlap.unwrap() >= u.metrics.support_overlap.unwrap())
        .count();
    Verdict::new(
        u.len() == 20 && err_wins >= 18 && support_wins >= 16,
        format!("J=9 s=90 m=179: lower coefficient error in {err_wins}/20 seeds, support overlap at least as good in {support_wins}/20"),
    )
}

fn runge_inpainting() -> Verdict {
    let exp = Experiment::new(ExperimentKind::Inpaint1d, 1);
    let rows = compare_trials(
        &exp,
        &[WeightScheme::Unweighted, WeightScheme::UniformNorm],
        10,
    )
    .unwrap();
    let u = rows_of(&rows, "none", RecoveryMode::Single);
    let w = rows_of(&rows, "norm", RecoveryMode::Single);
    let wins = u
        .iter()
        .zip(&w)
        .filter(|(u, w)| w.metrics.rmse < u.metrics.rmse)
        .count();
    let small = w.iter().filter(|w| w.metrics.rmse < 0.05).count();
    let worst = w.iter().map(|w| w.metrics.rmse).fold(0.0, f64::max);
    let best_u = u
        .iter()
        .map(|u| u.metrics.rmse)
        .fold(f64::INFINITY, f64::min);
    Verdict::new(
        u.len() == 10 && wins == 10 && small >= 8,
        format!(
            "weighted RMSE lower in {wins}/10 seeds, below 0.05 in {small}/10 (worst weighted {worst:.4}, best unweighted {best_u:.4})"
        ),
    )
}

fn heavisine_denoising() -> Verdict {
    let mut exp = Experiment::new(ExperimentKind::Denoise1d, 1);
    exp.params.noise = Some(NoiseLevel::Psnr(26.0));
    let rows = compare_trials(&exp, &[WeightScheme::UniformNorm], 10).unwrap();
    let noisy = rows_of(&rows, "noisy", RecoveryMode::Noisy);
    let w = rows_of(&rows, "norm", RecoveryMode::Single);
    let gains: Vec<f64> = noisy
        .iter()
        .zip(&w)
        .map(|(n, w)| w.metrics.psnr - n.metrics.psnr)
        .collect();
    let hits = gains.iter().filter(|&&g| g >= 1.0).count();
    let min_gain = gains.iter().copied().fold(f64::INFINITY, f64::min);
    Verdict::new(
        gains.len() == 10 && hits >= 8,
        format!("gain ≥ 1 dB in {hits}/10 seeds (smallest gain {min_gain:.2} dB)"),
    )
}

fn framelet_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut parseval, mut trip) = (0.0f64, 0.0f64);
    for (n, l) in [(64usize, 4usize), (256, 8), (1024, 8)] {
        let dict = FrameletDictionary::haar(n, l).unwrap();
        let f = random_vec(&mut rng, n);
        let c = dict.analysis_flat(&f).unwrap();
        parseval = parseval.max((norm2(&c) - norm2(&f)).abs());
        trip = trip.max(max_abs_diff(&dict.synthesis_flat(&c).unwrap(), &f));
    }
    let dict = FrameletDictionary::haar(64, 4).unwrap();
    let f = random_vec(&mut rng, 64);
    let c = dict.analysis(&f).unwrap();
    let mut inner = 0.0f64;
    for j in 0..4 {
        for i in 0..64 {
            inner = inner.max((c.get(i, j) - dot(&f, &dict.atom(i, j).unwrap())).abs());
        }
    }
    Verdict::new(
        parseval < 1e-8 && trip < 1e-8 && inner < 1e-10,
        format!("Parseval {parseval:.1e}, round trip {trip:.1e}, atom inner products {inner:.1e}"),
    )
}

fn mmv_consistency() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let layout = CoeffLayout::for_signal(128, 7).unwrap();
    let fam = WaveletFamily::new(Wavelet::Db2);
    let weights = uniform_norm_weights(layout);
    let config = SolverConfig {
        lambda: Lambda::Relative(0.01),
        ..SolverConfig::default()
    };
    let grid = random_vec(&mut rng, 128);
    let idx = sorted_sample(&mut rng, 128, 48);
    let single = MeasurementSet::from_grids(idx.clone(), &[&grid]).unwrap();
    let a = solve_weighted_l1(&single, &weights, &config, &fam, layout).unwrap();
    let b = solve_mmv(&single, &weights, &config, &fam, layout).unwrap();
    let k1 = max_abs_diff(a.coeffs.values(), b.coeffs.values());

    let doubled = MeasurementSet::from_grids(idx, &[&grid, &grid]).unwrap();
    let d = solve_mmv(&doubled, &weights, &config, &fam, layout).unwrap();
    let symmetric = d.coeffs.column(0) == d.coeffs.column(1);

    let exp = Experiment::new(ExperimentKind::MmvInpaint, 1);
    let rows = compare_trials(&exp, &[WeightScheme::UniformNorm], 10).unwrap();
    let joint = rows_of(&rows, "norm", RecoveryMode::Joint);
    let indep = rows_of(&rows, "norm", RecoveryMode::Independent);
    let wins = joint
        .iter()
        .zip(&indep)
        .filter(|(j, i)| j.metrics.coef_error_l2.unwrap() <= i.metrics.coef_error_l2.unwrap())
        .count();
    Verdict::new(
        k1 < 1e-10 && symmetric && joint.len() == 10 && wins >= 8,
        format!(
            "k=1 deviation {k1:.1e}, duplicated columns identical: {symmetric}, joint error ≤ independent in {wins}/10 seeds (N=256, m=96, k=3)"
        ),
    )
}

fn dense_objective(a: &DenseMatrix, f: &[f64], w: &[f64], lambda: f64, x: &[f64]) -> f64 {
    let misfit: f64 = a
        .matvec(x)
        .iter()
        .zip(f)
        .map(|(p, q)| (p - q).powi(2))
        .sum();
    misfit + lambda * x.iter().zip(w).map(|(v, w)| w * v.abs()).sum::<f64>()
}

/// Best objective seen by subgradient descent with steps `a/√(k+1)`.
fn subgradient_oracle(a: &DenseMatrix, f: &[f64], w: &[f64], lambda: f64, iters: usize) -> f64 {
    let n = a.cols();
    let gram = a.transpose().matmul(a);
    let atf = a.transpose().matvec(f);
    let ff = dot(f, f);
    let mut x = vec![0.0; n];
    let mut gx = vec![0.0; n];
    let mut best = ff;
    let mut g = vec![0.0; n];
    for k in 0..iters {
        for i in 0..n {
            gx[i] = dot(gram.row(i), &x);
        }
        // ‖Ax − f‖² = xᵀGx − 2xᵀAᵀf + fᵀf
        let value = dot(&x, &gx) - 2.0 * dot(&x, &atf)
            + ff
            + lambda * x.iter().zip(w).map(|(v, w)| w * v.abs()).sum::<f64>();
        best = best.min(value);
        for i in 0..n {
            g[i] =
                2.0 * (gx[i] - atf[i]) + lambda * w[i] * x[i].signum() * (x[i] != 0.0) as u8 as f64;
        }
        let step = 0.05 / ((k + 1) as f64).sqrt();
        for i in 0..n {
            x[i] -= step * g[i];
        }
    }
    best
}

/// Cyclic coordinate descent with exact coordinate minimization.
fn coordinate_descent(a: &DenseMatrix, f: &[f64], w: &[f64], lambda: f64) -> Vec<f64> {
    let n = a.cols();
    let cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = f.to_vec();
    for _ in 0..200_000 {
        let mut moved = 0.0f64;
        for j in 0..n {
            let aj = &cols[j];
            let sq = dot(aj, aj);
            if sq == 0.0 {
                continue;
            }
            let rho = dot(aj, &r) + sq * x[j];
            // argmin sq·t² − 2ρt + λw|t|
            let t = lambda * w[j] / 2.0;
            let new = (rho.abs() - t).max(0.0) * rho.signum() / sq;
            let delta = new - x[j];
            if delta != 0.0 {
                for (ri, ai) in r.iter_mut().zip(aj) {
                    *ri -= delta * ai;
                }
                x[j] = new;
                moved = moved.max(delta.abs());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    x
}

fn small_instance_optimality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst_sub, mut worst_cd, mut worst_obj) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for k in 0..20 {
        let w = Wavelet::ALL[k % 4];
        let fam = WaveletFamily::new(w);
        let layout = CoeffLayout::for_signal(32, 5).unwrap();
        let mut truth = vec![0.0; 32];
        for i in sample(&mut rng, 32, 5).iter() {
            truth[i] = rng.random_range(-2.0..2.0);
        }
        let grid = inverse_dwt(&CoefficientVector::new(truth, layout, w).unwrap(), &fam).unwrap();
        let idx = sorted_sample(&mut rng, 32, 16);
        let meas = MeasurementSet::from_grids(idx.clone(), &[&grid]).unwrap();
        let weights = uniform_norm_weights(layout);
        let config = SolverConfig {
            lambda: Lambda::Relative(rng.random_range(0.01..0.3)),
            ..SolverConfig::default()
        };
        let res = solve_weighted_l1(&meas, &weights, &config, &fam, layout).unwrap();
        let a = dense_measurement(layout, &fam, &idx);
        let f = meas.normalized();
        let ours = dense_objective(&a, &f, weights.values(), res.lambda, res.coeffs.values());
        let reported = objective(
            &meas,
            res.coeffs.values(),
            &weights,
            res.lambda,
            &fam,
            layout,
            Penalty::Elementwise,
        )
        .unwrap();
        worst_obj = worst_obj.max((ours - reported).abs());
        let sub = subgradient_oracle(&a, &f, weights.values(), res.lambda, 1_000_000);
        worst_sub = worst_sub.max(ours - sub);
        let cd = coordinate_descent(&a, &f, weights.values(), res.lambda);
        let cd_obj = dense_objective(&a, &f, weights.values(), res.lambda, &cd);
        worst_cd = worst_cd.max((ours - cd_obj).abs());
    }
    Verdict::new(
        worst_sub <= 1e-6 && worst_cd <= 1e-6 && worst_obj < 1e-12,
        format!(
            "20 instances N=32 m=16: max (ours − subgradient best) {worst_sub:.2e}, max |ours − coordinate descent| {worst_cd:.2e}"
        ),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Verdict;
    let criteria: [(&str, Option<u64>, Check); 11] = [
        ("transform round trips", Some(10), transform_round_trips),
        ("measurement operator and adjoint", None, operator_fidelity),
        ("proximal operators", None, prox_oracles),
        ("closed-tree inequalities", Some(60), tree_inequalities),
        ("first reweighting step", None, first_iteration_equivalence),
        (
            "synthetic closed-tree recovery",
            Some(300),
            synthetic_tree_recovery,
        ),
        ("Runge inpainting", Some(120), runge_inpainting),
        ("HeaviSine denoising", Some(120), heavisine_denoising),
        ("framelet identities", None, framelet_properties),
        ("joint recovery", None, mmv_consistency),
        ("small-instance optimality", None, small_instance_optimality),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let (v, took) = timed(budget.map(Duration::from_secs), check);
        println!(
            "criterion {:>2} {:<34} {} ({:.1} s) {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
