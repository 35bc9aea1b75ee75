use crate::error::{dimension, parameter, Result};

#[inline]
pub(crate) fn soft(v: f64, t: f64) -> f64 {
    let a = v.abs() - t;
    if a > 0.0 {
        a.copysign(v)
    } else {
        0.0
    }
}

/// Scales the rows of an `n × k` column-major matrix in place by
/// `max(‖row‖ − t, 0)/‖row‖`. With one column this is plain soft
/// thresholding.
pub(crate) fn group_soft_in_place(
    v: &mut [f64],
    columns: usize,
    thresholds: impl Fn(usize) -> f64,
) {
    if columns == 1 {
        for (i, x) in v.iter_mut().enumerate() {
            *x = soft(*x, thresholds(i));
        }
        return;
    }
    let n = v.len() / columns;
    for i in 0..n {
        let norm = (0..columns)
            .map(|c| v[c * n + i].powi(2))
            .sum::<f64>()
            .sqrt();
        let t = thresholds(i);
        let scale = if norm > t { (norm - t) / norm } else { 0.0 };
        for c in 0..columns {
            v[c * n + i] *= scale;
        }
    }
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    match thresholds.iter().find(|t| !(**t >= 0.0)) {
        Some(t) => Err(parameter(format!("threshold {t} is not non-negative"))),
        None => Ok(()),
    }
}

/// Proximal map of `Σ tᵢ|xᵢ|`: `sign(vᵢ)·max(|vᵢ| − tᵢ, 0)`.
pub fn weighted_soft_threshold(v: &[f64], thresholds: &[f64]) -> Result<Vec<f64>> {
    if v.len() != thresholds.len() {
        return Err(dimension(format!(
            "{} values but {} thresholds",
            v.len(),
            thresholds.len()
        )));
    }
    check_thresholds(thresholds)?;
    Ok(v.iter()
        .zip(thresholds)
        .map(|(&x, &t)| soft(x, t))
        .collect())
}

/// Proximal map of `Σ tᵢ‖rowᵢ‖₂` for an `n × k` matrix stored column by
/// column in `v`.
pub fn row_group_soft_threshold(v: &[f64], columns: usize, thresholds: &[f64]) -> Result<Vec<f64>> {
    if columns == 0 || v.len() != thresholds.len() * columns {
        return Err(dimension(format!(
            "{} values do not form {} rows x {columns} columns",
            v.len(),
            thresholds.len()
        )));
    }
    check_thresholds(thresholds)?;
    let mut out = v.to_vec();
    group_soft_in_place(&mut out, columns, |i| thresholds[i]);
    Ok(out)
}
