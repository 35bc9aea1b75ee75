//! Per-coefficient weights for the weighted ℓ1 norm.
//!
//! The base weights are the uniform norms of the atoms, `2^{jd/2}` on level
//! `j`. Two reweighting rules build on them: the classic
//! `1/(|c| + ε)` update and the scale-aware update, which anchors each
//! weight to its parent's base weight.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dwt::{CoeffLayout, CoefficientVector, IndexKind};
use crate::error::{dimension, parameter, Error, Result};

/// Default `ε` of the classic reweighting rule.
pub const DEFAULT_IRW_EPSILON: f64 = 0.1;

/// How a weight vector was produced. Also the CLI's `--weights` grammar:
/// `none`, `norm`, `alpha:<v>`, `irw[:<ε>]`, `wrw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    Unweighted,
    UniformNorm,
    AlphaPower(f64),
    Irw { epsilon: f64 },
    WaveletRw,
}

impl WeightScheme {
    /// Whether the scheme runs the reweighting outer loop.
    pub fn is_iterative(&self) -> bool {
        matches!(self, WeightScheme::Irw { .. } | WeightScheme::WaveletRw)
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Unweighted => f.write_str("none"),
            WeightScheme::UniformNorm => f.write_str("norm"),
            WeightScheme::AlphaPower(a) => write!(f, "alpha:{a}"),
            WeightScheme::Irw { epsilon } if *epsilon == DEFAULT_IRW_EPSILON => f.write_str("irw"),
            WeightScheme::Irw { epsilon } => write!(f, "irw:{epsilon}"),
            WeightScheme::WaveletRw => f.write_str("wrw"),
        }
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let number = |a: &str| -> Result<f64> {
            a.parse::<f64>()
                .map_err(|_| parameter(format!("bad number `{a}` in weight scheme `{s}`")))
        };
        match (head, arg) {
            ("none" | "unweighted", None) => Ok(WeightScheme::Unweighted),
            ("norm", None) => Ok(WeightScheme::UniformNorm),
            ("alpha", Some(a)) => {
                let alpha = number(a)?;
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(parameter(format!("alpha must be positive, got {alpha}")));
                }
                Ok(WeightScheme::AlphaPower(alpha))
            }
            ("irw", None) => Ok(WeightScheme::Irw {
                epsilon: DEFAULT_IRW_EPSILON,
            }),
            ("irw", Some(a)) => {
                let epsilon = number(a)?;
                if !(epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(parameter(format!(
                        "epsilon must be positive, got {epsilon}"
                    )));
                }
                Ok(WeightScheme::Irw { epsilon })
            }
            ("wrw", None) => Ok(WeightScheme::WaveletRw),
            _ => Err(parameter(format!("unknown weight scheme `{s}`"))),
        }
    }
}

/// Parses a comma-separated scheme list such as `none,norm,alpha:2,irw,wrw`.
pub fn parse_scheme_list(s: &str) -> Result<Vec<WeightScheme>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Positive, finite per-coefficient weights with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    scheme: WeightScheme,
    iteration: usize,
}

impl WeightVector {
    pub fn new(values: Vec<f64>, scheme: WeightScheme, iteration: usize) -> Result<Self> {
        if let Some((i, w)) = values
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(parameter(format!(
                "weight {i} is {w}; weights must be positive and finite"
            )));
        }
        Ok(Self {
            values,
            scheme,
            iteration,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `‖Ψ_ν‖∞ = 2^{jd/2}` for the level `j` of each coefficient.
fn level_norm(level: u32, dim: usize) -> f64 {
    2f64.powf(level as f64 * dim as f64 / 2.0)
}

pub fn unweighted(layout: CoeffLayout) -> WeightVector {
    WeightVector {
        values: vec![1.0; layout.len()],
        scheme: WeightScheme::Unweighted,
        iteration: 0,
    }
}

/// Uniform-norm weights `2^{jd/2}` for scaling and wavelet coefficients alike.
pub fn uniform_norm_weights(layout: CoeffLayout) -> WeightVector {
    let dim = layout.dim();
    let values = (0..layout.len())
        .map(|p| level_norm(layout.level_of(p).1, dim))
        .collect();
    WeightVector {
        values,
        scheme: WeightScheme::UniformNorm,
        iteration: 0,
    }
}

/// Wavelet weights raised to `α`; scaling weights stay unpowered.
pub fn alpha_weights(layout: CoeffLayout, alpha: f64) -> Result<WeightVector> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(parameter(format!("alpha must be positive, got {alpha}")));
    }
    let dim = layout.dim();
    let values = (0..layout.len())
        .map(|p| match layout.level_of(p) {
            (IndexKind::Scaling, j) => level_norm(j, dim),
            (IndexKind::Wavelet, j) => level_norm(j, dim).powf(alpha),
        })
        .collect();
    Ok(WeightVector {
        values,
        scheme: WeightScheme::AlphaPower(alpha),
        iteration: 0,
    })
}

/// Static weights for a non-iterative scheme. The iterative schemes start
/// from their update rule applied to zero coefficients.
pub fn static_weights(scheme: WeightScheme, layout: CoeffLayout) -> Result<WeightVector> {
    match scheme {
        WeightScheme::Unweighted => Ok(unweighted(layout)),
        WeightScheme::UniformNorm => Ok(uniform_norm_weights(layout)),
        WeightScheme::AlphaPower(a) => alpha_weights(layout, a),
        WeightScheme::Irw { .. } | WeightScheme::WaveletRw => Err(parameter(format!(
            "`{scheme}` weights depend on previous coefficients"
        ))),
    }
}

/// Magnitude per coefficient row: `|c_ν|` for one column, the ℓ2 norm of the
/// row for several.
fn row_magnitudes(coeffs: &CoefficientVector) -> Vec<f64> {
    let n = coeffs.len();
    if coeffs.columns() == 1 {
        return coeffs.values().iter().map(|c| c.abs()).collect();
    }
    (0..n)
        .map(|i| {
            (0..coeffs.columns())
                .map(|c| coeffs.column(c)[i].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Classic reweighting: `ω_ν = 1/(|c_ν| + ε)`.
pub fn irw_update(
    prev: &CoefficientVector,
    epsilon: f64,
    iteration: usize,
) -> Result<WeightVector> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(parameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let values = row_magnitudes(prev)
        .into_iter()
        .map(|c| 1.0 / (c + epsilon))
        .collect();
    WeightVector::new(values, WeightScheme::Irw { epsilon }, iteration)
}

/// Scale-aware reweighting:
/// `ω_ν = ω⁰_{p(ν)} + 1/(|c_ν| + ε_ν)` with `ε_ν = 1/(ω⁰_ν − ω⁰_{p(ν)})`.
///
/// Where `ω⁰_ν ≤ ω⁰_{p(ν)}` (the coarsest wavelet level of a 1D full-depth
/// layout) `ε_ν` is infinite and the weight stays at `ω⁰_ν`. Scaling
/// coefficients keep their base weight.
pub fn wavelet_rw_update(
    prev: &CoefficientVector,
    base: &WeightVector,
    iteration: usize,
) -> Result<WeightVector> {
    let layout = prev.layout();
    if base.len() != layout.len() {
        return Err(dimension(format!(
            "base weights have {} entries for {} coefficients",
            base.len(),
            layout.len()
        )));
    }
    let w0 = base.values();
    let mags = row_magnitudes(prev);
    let values = (0..layout.len())
        .map(|p| match layout.parent_position(p) {
            None => w0[p],
            Some(pp) => {
                let gap = w0[p] - w0[pp];
                if gap <= 0.0 {
                    w0[p]
                } else {
                    w0[pp] + 1.0 / (mags[p] + 1.0 / gap)
                }
            }
        })
        .collect();
    WeightVector::new(values, WeightScheme::WaveletRw, iteration)
}
