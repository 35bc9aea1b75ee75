//! Weighted ℓ1 and row-group (MMV) recovery of wavelet coefficients from
//! point samples, with the reweighting outer loop.

pub mod apg;
mod prox;

use serde::{Deserialize, Serialize};

use crate::dwt::{CoeffLayout, CoefficientVector, MeasurementSet, SamplingOperator, WaveletFamily};
use crate::error::{data, dimension, parameter, Result};
use crate::weights::{irw_update, static_weights, wavelet_rw_update, WeightScheme, WeightVector};

pub use apg::{Outcome, Penalty, Problem};
pub use prox::{row_group_soft_threshold, weighted_soft_threshold};

/// Regularization parameter: an absolute value, or a fraction of the largest
/// weighted correlation `max_ν |(Aᵀf̃)_ν|/ω_ν` (row norms for several
/// columns), above which the solution is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lambda {
    Fixed(f64),
    Relative(f64),
}

impl Lambda {
    fn value(self) -> f64 {
        match self {
            Lambda::Fixed(v) | Lambda::Relative(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRule {
    Fixed,
    Backtracking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub lambda: Lambda,
    pub max_iters: usize,
    pub tol: f64,
    pub step_rule: StepRule,
    pub rw_outer_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: Lambda::Relative(0.01),
            max_iters: 5000,
            tol: 1e-8,
            step_rule: StepRule::Fixed,
            rw_outer_iters: 5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let l = self.lambda.value();
        if !(l > 0.0 && l.is_finite()) {
            return Err(parameter(format!("lambda must be positive, got {l}")));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(parameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(parameter("max_iters must be at least 1"));
        }
        if self.rw_outer_iters == 0 {
            return Err(parameter("rw_outer_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub coeffs: CoefficientVector,
    /// Objective after each iteration of the last inner solve.
    pub objective_trace: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// The λ actually used.
    pub lambda: f64,
    /// Final objective of each inner solve (one entry without reweighting).
    pub outer_objectives: Vec<f64>,
    /// Weights of the last inner solve.
    pub weights: WeightVector,
}

/// `max_ν ‖(Aᵀf̃)_ν‖/ω_ν`, the smallest λ with a zero solution.
pub fn max_weighted_correlation(
    op: &SamplingOperator,
    target: &[f64],
    columns: usize,
    weights: &[f64],
    penalty: Penalty,
) -> f64 {
    let problem = Problem {
        op,
        target,
        columns,
        weights,
        lambda: 0.0,
        penalty,
    };
    let n = weights.len();
    let mut atf = vec![0.0; n * columns];
    problem.adjoint(target, &mut atf);
    match penalty {
        Penalty::Elementwise => atf
            .iter()
            .enumerate()
            .map(|(i, v)| v.abs() / weights[i % n])
            .fold(0.0, f64::max),
        Penalty::RowGroup => (0..n)
            .map(|i| {
                let norm = (0..columns)
                    .map(|c| atf[c * n + i].powi(2))
                    .sum::<f64>()
                    .sqrt();
                norm / weights[i]
            })
            .fold(0.0, f64::max),
    }
}

struct Setup {
    op: SamplingOperator,
    target: Vec<f64>,
    columns: usize,
    layout: CoeffLayout,
    family: WaveletFamily,
}

fn setup(meas: &MeasurementSet, family: &WaveletFamily, layout: CoeffLayout) -> Result<Setup> {
    if meas.grid_len() != layout.len() {
        return Err(dimension(format!(
            "measurements live on a grid of {} points, layout has {}",
            meas.grid_len(),
            layout.len()
        )));
    }
    if let Some(v) = meas.values().iter().find(|v| !v.is_finite()) {
        return Err(data(format!("non-finite measurement value {v}")));
    }
    Ok(Setup {
        op: SamplingOperator::new(family.clone(), layout, meas.indices().to_vec())?,
        target: meas.normalized(),
        columns: meas.columns(),
        layout,
        family: family.clone(),
    })
}

fn check_weights(weights: &WeightVector, layout: CoeffLayout) -> Result<()> {
    if weights.len() != layout.len() {
        return Err(dimension(format!(
            "{} weights for {} coefficients",
            weights.len(),
            layout.len()
        )));
    }
    Ok(())
}

fn resolve_lambda(s: &Setup, weights: &[f64], penalty: Penalty, rule: Lambda) -> f64 {
    match rule {
        Lambda::Fixed(v) => v,
        Lambda::Relative(r) => {
            let top = max_weighted_correlation(&s.op, &s.target, s.columns, weights, penalty);
            if top > 0.0 {
                r * top
            } else {
                r
            }
        }
    }
}

fn run(
    s: &Setup,
    weights: &WeightVector,
    penalty: Penalty,
    lambda: f64,
    config: &SolverConfig,
    x0: Option<&[f64]>,
) -> Outcome {
    let problem = Problem {
        op: &s.op,
        target: &s.target,
        columns: s.columns,
        weights: weights.values(),
        lambda,
        penalty,
    };
    apg::minimize(&problem, config, x0)
}

fn finish(
    s: &Setup,
    out: Outcome,
    lambda: f64,
    outer: Vec<f64>,
    weights: WeightVector,
) -> Result<SolveResult> {
    let final_objective = out.objective_trace.last().copied();
    let mut outer = outer;
    if outer.is_empty() {
        outer.extend(final_objective);
    }
    Ok(SolveResult {
        coeffs: CoefficientVector::with_columns(out.x, s.columns, s.layout, s.family.kind())?,
        objective_trace: out.objective_trace,
        iterations_used: out.iterations_used,
        converged: out.converged,
        lambda,
        outer_objectives: outer,
        weights,
    })
}

fn solve_static(
    meas: &MeasurementSet,
    weights: &WeightVector,
    config: &SolverConfig,
    family: &WaveletFamily,
    layout: CoeffLayout,
    penalty: Penalty,
) -> Result<SolveResult> {
    config.validate()?;
    check_weights(weights, layout)?;
    let s = setup(meas, family, layout)?;
    let lambda = resolve_lambda(&s, weights.values(), penalty, config.lambda);
    let out = run(&s, weights, penalty, lambda, config, None);
    finish(&s, out, lambda, Vec::new(), weights.clone())
}

/// Minimizes `λ‖c‖_{ω,1} + ‖Ac − f̃‖²` for a single measurement column.
pub fn solve_weighted_l1(
    meas: &MeasurementSet,
    weights: &WeightVector,
    config: &SolverConfig,
    family: &WaveletFamily,
    layout: CoeffLayout,
) -> Result<SolveResult> {
    if meas.columns() != 1 {
        return Err(dimension(format!(
            "expected one measurement column, got {}",
            meas.columns()
        )));
    }
    solve_static(meas, weights, config, family, layout, Penalty::Elementwise)
}

/// Minimizes `λ‖C‖_{ω,1,2} + ‖AC − F̃‖²_F`, coupling the columns through the
/// ℓ2 norms of the coefficient rows.
pub fn solve_mmv(
    meas: &MeasurementSet,
    weights: &WeightVector,
    config: &SolverConfig,
    family: &WaveletFamily,
    layout: CoeffLayout,
) -> Result<SolveResult> {
    solve_static(meas, weights, config, family, layout, Penalty::RowGroup)
}

/// Every column solved on its own, sharing one λ chosen from all columns.
pub fn solve_independent(
    meas: &MeasurementSet,
    weights: &WeightVector,
    config: &SolverConfig,
    family: &WaveletFamily,
    layout: CoeffLayout,
) -> Result<SolveResult> {
    solve_static(meas, weights, config, family, layout, Penalty::Elementwise)
}

/// Alternates weighted solves with weight updates, `rw_outer_iters` solves
/// in total. The first weights come from the zero vector, later solves are
/// warm started, and λ is fixed from the first weights. Several columns use
/// the row-group penalty and row-norm weight updates.
pub fn solve_reweighted(
    meas: &MeasurementSet,
    scheme: WeightScheme,
    config: &SolverConfig,
    family: &WaveletFamily,
    layout: CoeffLayout,
) -> Result<SolveResult> {
    config.validate()?;
    let penalty = if meas.columns() > 1 {
        Penalty::RowGroup
    } else {
        Penalty::Elementwise
    };
    let s = setup(meas, family, layout)?;
    let base = static_weights(WeightScheme::UniformNorm, layout)?;
    let update = |c: &CoefficientVector, t: usize| match scheme {
        WeightScheme::Irw { epsilon } => irw_update(c, epsilon, t),
        WeightScheme::WaveletRw => wavelet_rw_update(c, &base, t),
        other => Err(parameter(format!("{other} is not a reweighting scheme"))),
    };

    let zero = CoefficientVector::with_columns(
        vec![0.0; layout.len() * s.columns],
        s.columns,
        layout,
        family.kind(),
    )?;
    let mut weights = update(&zero, 1)?;
    let lambda = resolve_lambda(&s, weights.values(), penalty, config.lambda);
    let mut outer = Vec::with_capacity(config.rw_outer_iters);
    let mut out = run(&s, &weights, penalty, lambda, config, None);
    outer.push(out.objective_trace.last().copied().unwrap_or(f64::NAN));
    for t in 2..=config.rw_outer_iters {
        let current =
            CoefficientVector::with_columns(out.x.clone(), s.columns, layout, family.kind())?;
        weights = update(&current, t)?;
        out = run(&s, &weights, penalty, lambda, config, Some(&out.x));
        outer.push(out.objective_trace.last().copied().unwrap_or(f64::NAN));
    }
    finish(&s, out, lambda, outer, weights)
}

/// Dispatches on the scheme: a single weighted solve for the static schemes,
/// the outer loop for the iterative ones. Several columns use the row-group
/// penalty.
pub fn solve_with_scheme(
    meas: &MeasurementSet,
    scheme: WeightScheme,
    config: &SolverConfig,
    family: &WaveletFamily,
    layout: CoeffLayout,
) -> Result<SolveResult> {
    if scheme.is_iterative() {
        return solve_reweighted(meas, scheme, config, family, layout);
    }
    let weights = static_weights(scheme, layout)?;
    if meas.columns() > 1 {
        solve_mmv(meas, &weights, config, family, layout)
    } else {
        solve_weighted_l1(meas, &weights, config, family, layout)
    }
}

/// `‖c − prox(c − step·∇)‖∞` of a returned solution, with `step` the fixed
/// step size of the problem.
pub fn fixed_point_residual(
    meas: &MeasurementSet,
    result: &SolveResult,
    family: &WaveletFamily,
    penalty: Penalty,
) -> Result<f64> {
    let layout = result.coeffs.layout();
    let s = setup(meas, family, layout)?;
    let problem = Problem {
        op: &s.op,
        target: &s.target,
        columns: s.columns,
        weights: result.weights.values(),
        lambda: result.lambda,
        penalty,
    };
    let step = 1.0 / problem.lipschitz();
    Ok(problem.fixed_point_residual(result.coeffs.values(), step))
}

/// Objective `λ·P(c) + ‖Ac − f̃‖²` of arbitrary coefficients.
pub fn objective(
    meas: &MeasurementSet,
    coeffs: &[f64],
    weights: &WeightVector,
    lambda: f64,
    family: &WaveletFamily,
    layout: CoeffLayout,
    penalty: Penalty,
) -> Result<f64> {
    check_weights(weights, layout)?;
    let s = setup(meas, family, layout)?;
    if coeffs.len() != layout.len() * s.columns {
        return Err(dimension("coefficient count does not match measurements"));
    }
    let problem = Problem {
        op: &s.op,
        target: &s.target,
        columns: s.columns,
        weights: weights.values(),
        lambda,
        penalty,
    };
    Ok(problem.objective(coeffs))
}
