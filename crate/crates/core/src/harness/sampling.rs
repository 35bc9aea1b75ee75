use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dwt::MeasurementSet;
use crate::error::{dimension, parameter, Result};

/// How many grid points to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleSize {
    /// Share of the grid in `(0, 1]`, rounded to the nearest count.
    Fraction(f64),
    Count(usize),
}

impl SampleSize {
    pub fn resolve(self, grid_len: usize) -> Result<usize> {
        let m = match self {
            SampleSize::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(parameter(format!("sample fraction {f} outside (0, 1]")));
                }
                ((f * grid_len as f64).round() as usize).max(1)
            }
            SampleSize::Count(m) => m,
        };
        if m == 0 || m > grid_len {
            return Err(parameter(format!(
                "sample count {m} outside 1..={grid_len}"
            )));
        }
        Ok(m)
    }
}

/// `m` distinct grid positions drawn uniformly without replacement, sorted.
pub fn sample_indices(grid_len: usize, size: SampleSize, seed: u64) -> Result<Vec<usize>> {
    let m = size.resolve(grid_len)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut idx = sample(&mut rng, grid_len, m).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

pub fn subsample(signal: &[f64], size: SampleSize, seed: u64) -> Result<MeasurementSet> {
    subsample_columns(&[signal], size, seed)
}

/// One mask shared by every column.
pub fn subsample_columns(grids: &[&[f64]], size: SampleSize, seed: u64) -> Result<MeasurementSet> {
    let n = grids.first().map_or(0, |g| g.len());
    if n == 0 {
        return Err(dimension("empty signal"));
    }
    let idx = sample_indices(n, size, seed)?;
    MeasurementSet::from_grids(idx, grids)
}

/// Additive Gaussian noise, given directly or as a target PSNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseLevel {
    Sigma(f64),
    /// The noise is rescaled so the noisy signal has exactly this PSNR.
    Psnr(f64),
}

/// Adds zero-mean Gaussian noise. A PSNR target is met exactly: the drawn
/// noise is rescaled so its RMS equals `peak·10^{−psnr/20}`.
pub fn add_noise(signal: &[f64], level: NoiseLevel, peak: f64, seed: u64) -> Result<Vec<f64>> {
    add_noise_on_stream(signal, level, peak, seed, 0)
}

/// `add_noise` with an independent draw per `stream`, for several columns
/// sharing a seed.
pub(crate) fn add_noise_on_stream(
    signal: &[f64],
    level: NoiseLevel,
    peak: f64,
    seed: u64,
    stream: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(16 + stream);
    let z: Vec<f64> = (0..signal.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let scale = match level {
        NoiseLevel::Sigma(s) => {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(parameter(format!("noise sigma {s} must be non-negative")));
            }
            s
        }
        NoiseLevel::Psnr(db) => {
            if !db.is_finite() || !(peak > 0.0) {
                return Err(parameter(format!("PSNR target {db} dB with peak {peak}")));
            }
            let target = peak * 10f64.powf(-db / 20.0);
            let rms = (z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64).sqrt();
            target / rms
        }
    };
    Ok(signal.iter().zip(&z).map(|(s, z)| s + scale * z).collect())
}
