use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dwt::{inverse_dwt, CoeffLayout, CoefficientVector, IndexKind, Wavelet, WaveletFamily};
use crate::error::{parameter, Result};
use crate::tree::{random_closed_tree, ClosedTree};

/// Donoho's HeaviSine, `4 sin(4πt) − sign(t − 0.3) − sign(0.72 − t)`, on
/// `t = i/N`.
pub fn heavisine(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            4.0 * (4.0 * PI * t).sin() - sign(t - 0.3) - sign(0.72 - t)
        })
        .collect()
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn runge_at(x: f64) -> f64 {
    1.0 / (1.0 + 25.0 * x * x)
}

/// `1/(1 + 25x²)` on the periodic grid `x_i = −1 + 2i/N`.
pub fn runge(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| runge_at(-1.0 + 2.0 * i as f64 / n as f64))
        .collect()
}

/// An 8-bit test image: a smooth gradient with a few discs and a striped
/// patch, quantized to integers in `0..=255`.
pub fn synthetic_image(side: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = side as f64;
    let discs: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(0.15..0.85) * s,
                rng.random_range(0.15..0.85) * s,
                rng.random_range(0.06..0.18) * s,
                rng.random_range(-90.0..90.0),
            )
        })
        .collect();
    let freq = rng.random_range(3.0..6.0);
    let mut img = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let (y, x) = (r as f64, c as f64);
            let mut v = 60.0 + 120.0 * (x + 0.5 * y) / (1.5 * s);
            for &(cy, cx, rad, amp) in &discs {
                if (y - cy).powi(2) + (x - cx).powi(2) <= rad * rad {
                    v += amp;
                }
            }
            if x > 0.6 * s && y > 0.6 * s {
                v += 30.0 * (2.0 * PI * freq * x / s).sin();
            }
            img.push(v.clamp(0.0, 255.0).round());
        }
    }
    img
}

/// Law of the nonzero coefficients of a synthetic tree signal: zero mean,
/// standard deviation `sigma0·2^{−decay·j}` at wavelet level `j` (the
/// scaling root counts as level 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeCoefficientLaw {
    pub sigma0: f64,
    pub decay: f64,
}

impl Default for TreeCoefficientLaw {
    fn default() -> Self {
        Self {
            sigma0: 4.0,
            decay: 0.5,
        }
    }
}

impl TreeCoefficientLaw {
    pub fn std_at(&self, level: u32) -> f64 {
        self.sigma0 * 2f64.powf(-self.decay * f64::from(level))
    }
}

fn draw(rng: &mut ChaCha8Rng, law: TreeCoefficientLaw, layout: CoeffLayout, pos: usize) -> f64 {
    let level = match layout.level_of(pos) {
        (IndexKind::Scaling, _) => 0,
        (IndexKind::Wavelet, j) => j,
    };
    let normal = Normal::new(0.0, law.std_at(level)).expect("positive std");
    loop {
        let v = normal.sample(rng);
        if v != 0.0 {
            return v;
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthTree {
    /// Grid values, row-major for `d = 2`.
    pub signal: Vec<f64>,
    pub coeffs: CoefficientVector,
    pub tree: ClosedTree,
}

/// A signal whose coefficients are supported on a random closed tree of
/// `s` nodes, full-depth decomposition on `2^{dJ}` points.
pub fn synth_tree_signal(
    s: usize,
    levels: u32,
    dim: usize,
    seed: u64,
    wavelet: Wavelet,
    law: TreeCoefficientLaw,
) -> Result<SynthTree> {
    if !(law.sigma0 > 0.0 && law.sigma0.is_finite()) {
        return Err(parameter(format!(
            "sigma0 must be positive, got {}",
            law.sigma0
        )));
    }
    if !law.decay.is_finite() {
        return Err(parameter(format!(
            "decay must be finite, got {}",
            law.decay
        )));
    }
    let layout = CoeffLayout::full(dim, levels)?;
    let tree = random_closed_tree(s, levels, dim, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    let mut values = vec![0.0; layout.len()];
    for &p in tree.positions() {
        values[p] = draw(&mut rng, law, layout, p);
    }
    let coeffs = CoefficientVector::new(values, layout, wavelet)?;
    let signal = inverse_dwt(&coeffs, &WaveletFamily::from(wavelet))?;
    Ok(SynthTree {
        signal,
        coeffs,
        tree,
    })
}

/// `k` columns sharing one random closed-tree row support, entries drawn
/// independently from `law`.
pub fn synth_row_sparse(
    s: usize,
    levels: u32,
    columns: usize,
    seed: u64,
    wavelet: Wavelet,
    law: TreeCoefficientLaw,
) -> Result<(Vec<Vec<f64>>, CoefficientVector)> {
    if columns == 0 {
        return Err(parameter("at least one column is required"));
    }
    let first = synth_tree_signal(s, levels, 1, seed, wavelet, law)?;
    let layout = first.coeffs.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4);
    let mut values = first.coeffs.values().to_vec();
    for _ in 1..columns {
        let mut col = vec![0.0; layout.len()];
        for &p in first.tree.positions() {
            col[p] = draw(&mut rng, law, layout, p);
        }
        values.extend(col);
    }
    let coeffs = CoefficientVector::with_columns(values, columns, layout, wavelet)?;
    let grids = inverse_dwt(&coeffs, &WaveletFamily::from(wavelet))?;
    let n = layout.len();
    Ok((grids.chunks(n).map(<[f64]>::to_vec).collect(), coeffs))
}
