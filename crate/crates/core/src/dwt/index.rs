use serde::{Deserialize, Serialize};

use crate::error::{dimension, parameter, Error, Result};

use super::Wavelet;

/// Whether a coefficient belongs to the scaling or the wavelet part of the
/// expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndexKind {
    Scaling,
    Wavelet,
}

/// Address of one expansion coefficient: kind, level `j`, shift
/// `(k1, k2)` and detail band.
///
/// For `d = 1` the second shift component is always 0 and wavelets carry
/// band 1. For `d = 2` the bands 1, 2, 3 are the three detail orientations.
/// Scaling indices carry band 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    pub kind: IndexKind,
    pub level: u32,
    pub shift: [usize; 2],
    pub band: u8,
}

impl MultiIndex {
    pub fn scaling(level: u32, shift: [usize; 2]) -> Self {
        Self {
            kind: IndexKind::Scaling,
            level,
            shift,
            band: 0,
        }
    }

    /// The root of the wavelet tree: the single scaling coefficient of a
    /// full-depth decomposition.
    pub fn root() -> Self {
        Self::scaling(0, [0, 0])
    }

    pub fn wavelet_1d(level: u32, k: usize) -> Self {
        Self {
            kind: IndexKind::Wavelet,
            level,
            shift: [k, 0],
            band: 1,
        }
    }

    pub fn wavelet_2d(level: u32, k1: usize, k2: usize, band: u8) -> Self {
        Self {
            kind: IndexKind::Wavelet,
            level,
            shift: [k1, k2],
            band,
        }
    }

    pub fn is_wavelet(&self) -> bool {
        self.kind == IndexKind::Wavelet
    }
}

/// The index map ρ between [`MultiIndex`] values and linear storage.
///
/// A layout describes a `dim`-dimensional grid of side `2^levels` decomposed
/// `depth` times. Scaling coefficients sit on level `levels - depth`; wavelet
/// levels run from there to `levels - 1`.
///
/// 1D storage is `[scaling | coarsest details | ... | finest details]`, so the
/// wavelet `(j, k)` lives at `2^j + k`. 2D storage is the usual pyramid image
/// in row-major order: the level-`j` bands occupy the quadrants at offset
/// `2^j` (band 1: column offset, band 2: row offset, band 3: both).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoeffLayout {
    dim: usize,
    levels: u32,
    depth: u32,
}

impl CoeffLayout {
    pub fn new(dim: usize, levels: u32, depth: u32) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Unsupported(format!(
                "dimension {dim} (only 1 and 2)"
            )));
        }
        if levels == 0 || levels as usize * dim > 40 {
            return Err(parameter(format!("levels {levels} out of range")));
        }
        if depth > levels {
            return Err(parameter(format!(
                "depth {depth} exceeds log2 of the grid side ({levels})"
            )));
        }
        Ok(Self { dim, levels, depth })
    }

    /// Full-depth decomposition: a single scaling coefficient at level 0.
    pub fn full(dim: usize, levels: u32) -> Result<Self> {
        Self::new(dim, levels, levels)
    }

    /// Layout for a 1D signal of length `n`.
    pub fn for_signal(n: usize, depth: u32) -> Result<Self> {
        Self::new(1, log2_exact(n)?, depth)
    }

    /// Layout for a square image of the given side.
    pub fn for_image(side: usize, depth: u32) -> Result<Self> {
        Self::new(2, log2_exact(side)?, depth)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Side of the grid, `2^levels`.
    pub fn side(&self) -> usize {
        1 << self.levels
    }

    /// Number of coefficients, `2^(dim * levels)`.
    pub fn len(&self) -> usize {
        1 << (self.dim as u32 * self.levels)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Level of the scaling coefficients.
    pub fn coarsest_level(&self) -> u32 {
        self.levels - self.depth
    }

    /// Kind and level of the coefficient stored at `pos`.
    pub fn level_of(&self, pos: usize) -> (IndexKind, u32) {
        let idx = self.index_of(pos);
        (idx.kind, idx.level)
    }

    pub fn index_of(&self, pos: usize) -> MultiIndex {
        assert!(pos < self.len(), "position {pos} outside layout");
        let j0 = self.coarsest_level();
        if self.dim == 1 {
            if pos < (1 << j0) {
                return MultiIndex::scaling(j0, [pos, 0]);
            }
            let j = usize::BITS - 1 - pos.leading_zeros();
            MultiIndex::wavelet_1d(j, pos - (1 << j))
        } else {
            let side = self.side();
            let (r, c) = (pos / side, pos % side);
            let lim = 1usize << j0;
            if r < lim && c < lim {
                return MultiIndex::scaling(j0, [r, c]);
            }
            let m = r.max(c);
            let j = usize::BITS - 1 - m.leading_zeros();
            let half = 1usize << j;
            let (r_hi, c_hi) = (r >= half, c >= half);
            let band = match (r_hi, c_hi) {
                (false, true) => 1,
                (true, false) => 2,
                _ => 3,
            };
            MultiIndex::wavelet_2d(j, r % half, c % half, band)
        }
    }

    pub fn position(&self, idx: &MultiIndex) -> Result<usize> {
        let j0 = self.coarsest_level();
        let bad = || parameter(format!("{idx:?} is not part of {self:?}"));
        match idx.kind {
            IndexKind::Scaling => {
                if idx.level != j0 || idx.band != 0 {
                    return Err(bad());
                }
                let lim = 1usize << j0;
                if idx.shift[0] >= lim || idx.shift[1] >= if self.dim == 1 { 1 } else { lim } {
                    return Err(bad());
                }
                Ok(if self.dim == 1 {
                    idx.shift[0]
                } else {
                    idx.shift[0] * self.side() + idx.shift[1]
                })
            }
            IndexKind::Wavelet => {
                if idx.level < j0 || idx.level >= self.levels {
                    return Err(bad());
                }
                let half = 1usize << idx.level;
                let [k1, k2] = idx.shift;
                if self.dim == 1 {
                    if idx.band != 1 || k1 >= half || k2 != 0 {
                        return Err(bad());
                    }
                    Ok(half + k1)
                } else {
                    if k1 >= half || k2 >= half {
                        return Err(bad());
                    }
                    let (r, c) = match idx.band {
                        1 => (k1, half + k2),
                        2 => (half + k1, k2),
                        3 => (half + k1, half + k2),
                        _ => return Err(bad()),
                    };
                    Ok(r * self.side() + c)
                }
            }
        }
    }

    /// Position of the parent of the coefficient at `pos`. Wavelets on the
    /// coarsest level have the co-located scaling coefficient as parent;
    /// scaling coefficients have none.
    pub fn parent_position(&self, pos: usize) -> Option<usize> {
        let idx = self.index_of(pos);
        if !idx.is_wavelet() {
            return None;
        }
        let j0 = self.coarsest_level();
        let parent = if idx.level == j0 {
            MultiIndex::scaling(j0, idx.shift)
        } else if self.dim == 1 {
            MultiIndex::wavelet_1d(idx.level - 1, idx.shift[0] / 2)
        } else {
            MultiIndex::wavelet_2d(idx.level - 1, idx.shift[0] / 2, idx.shift[1] / 2, idx.band)
        };
        Some(self.position(&parent).expect("parent lies in layout"))
    }

    /// Level of every stored coefficient, in storage order.
    pub fn levels_by_position(&self) -> Vec<(IndexKind, u32)> {
        (0..self.len()).map(|p| self.level_of(p)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, MultiIndex)> + '_ {
        (0..self.len()).map(move |p| (p, self.index_of(p)))
    }
}

/// `log2(n)` when `n` is a power of two (and at least 2).
pub fn log2_exact(n: usize) -> Result<u32> {
    if n < 2 || !n.is_power_of_two() {
        return Err(dimension(format!("length {n} is not a power of two >= 2")));
    }
    Ok(n.trailing_zeros())
}

/// Flat coefficient storage tied to its layout and filter bank.
///
/// `columns > 1` holds the `N × k` matrix of a multiple-measurement problem,
/// stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<f64>,
    columns: usize,
    layout: CoeffLayout,
    wavelet: Wavelet,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>, layout: CoeffLayout, wavelet: Wavelet) -> Result<Self> {
        Self::with_columns(values, 1, layout, wavelet)
    }

    pub fn with_columns(
        values: Vec<f64>,
        columns: usize,
        layout: CoeffLayout,
        wavelet: Wavelet,
    ) -> Result<Self> {
        if columns == 0 || values.len() != layout.len() * columns {
            return Err(dimension(format!(
                "{} values do not fill {} column(s) of length {}",
                values.len(),
                columns,
                layout.len()
            )));
        }
        Ok(Self {
            values,
            columns,
            layout,
            wavelet,
        })
    }

    pub fn zeros(layout: CoeffLayout, wavelet: Wavelet) -> Self {
        Self {
            values: vec![0.0; layout.len()],
            columns: 1,
            layout,
            wavelet,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn column(&self, c: usize) -> &[f64] {
        let n = self.layout.len();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn layout(&self) -> CoeffLayout {
        self.layout
    }

    pub fn wavelet(&self) -> Wavelet {
        self.wavelet
    }

    /// Coefficient at `idx` in column `c`.
    pub fn get(&self, idx: &MultiIndex, c: usize) -> Result<f64> {
        let p = self.layout.position(idx)?;
        Ok(self.values[c * self.layout.len() + p])
    }

    pub fn len(&self) -> usize {
        self.layout.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}
