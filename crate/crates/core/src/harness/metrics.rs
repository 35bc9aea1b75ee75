use serde::{Deserialize, Serialize};

use crate::error::{dimension, Result};

/// Coefficients above this magnitude count as significant.
pub const SUPPORT_THRESHOLD: f64 = 0.01;

/// PSNR peak for 8-bit images.
pub const IMAGE_PEAK: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    /// dB; `+∞` when `perfect`.
    pub psnr: f64,
    pub perfect: bool,
    pub peak: f64,
    pub coef_error_l2: Option<f64>,
    pub support_overlap: Option<f64>,
}

/// `max |x|`, the PSNR peak for signals.
pub fn signal_peak(reference: &[f64]) -> f64 {
    reference.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() || a.is_empty() {
        return Err(dimension(format!(
            "lengths {} and {} do not match",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// `‖a − b‖₂/√N`.
pub fn rmse(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    let ss: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    Ok((ss / a.len() as f64).sqrt())
}

/// `20 log₁₀(peak/rmse)`.
pub fn psnr(reference: &[f64], reconstruction: &[f64], peak: f64) -> Result<f64> {
    let e = rmse(reference, reconstruction)?;
    Ok(if e == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (peak / e).log10()
    })
}

/// Share of the entries with `|truth| > threshold` whose estimate also
/// exceeds the threshold; 1 when there are none.
pub fn support_overlap(truth: &[f64], estimate: &[f64], threshold: f64) -> Result<f64> {
    same_len(truth, estimate)?;
    let mut big = 0usize;
    let mut hit = 0usize;
    for (t, e) in truth.iter().zip(estimate) {
        if t.abs() > threshold {
            big += 1;
            if e.abs() > threshold {
                hit += 1;
            }
        }
    }
    Ok(if big == 0 {
        1.0
    } else {
        hit as f64 / big as f64
    })
}

/// Grid metrics, plus coefficient metrics when `(truth, estimate)`
/// coefficients are given.
pub fn evaluate(
    reference: &[f64],
    reconstruction: &[f64],
    peak: f64,
    coeffs: Option<(&[f64], &[f64])>,
) -> Result<MetricsReport> {
    let e = rmse(reference, reconstruction)?;
    let (coef_error_l2, support) = match coeffs {
        Some((t, c)) => {
            same_len(t, c)?;
            let err = t
                .iter()
                .zip(c)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            (Some(err), Some(support_overlap(t, c, SUPPORT_THRESHOLD)?))
        }
        None => (None, None),
    };
    Ok(MetricsReport {
        rmse: e,
        psnr: if e == 0.0 {
            f64::INFINITY
        } else {
            20.0 * (peak / e).log10()
        },
        perfect: e == 0.0,
        peak,
        coef_error_l2,
        support_overlap: support,
    })
}
