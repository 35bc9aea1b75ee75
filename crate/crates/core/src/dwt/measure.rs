use crate::error::{dimension, parameter, Result};
use crate::linalg::LinearOperator;

use super::transform::{analyze_in_place, synthesize_in_place};
use super::{CoeffLayout, CoefficientVector, WaveletFamily};

/// The sampling matrix `A = (1/√m) · S · W⁻¹` applied matrix-free: synthesize
/// the grid values from coefficients, keep the sampled positions, scale.
#[derive(Debug, Clone)]
pub struct SamplingOperator {
    family: WaveletFamily,
    layout: CoeffLayout,
    indices: Vec<usize>,
    scale: f64,
}

impl SamplingOperator {
    pub fn new(family: WaveletFamily, layout: CoeffLayout, indices: Vec<usize>) -> Result<Self> {
        validate_sample_indices(&indices, layout.len())?;
        let scale = 1.0 / (indices.len() as f64).sqrt();
        Ok(Self {
            family,
            layout,
            indices,
            scale,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn layout(&self) -> CoeffLayout {
        self.layout
    }

    pub fn family(&self) -> &WaveletFamily {
        &self.family
    }

    pub fn sample_count(&self) -> usize {
        self.indices.len()
    }
}

impl LinearOperator for SamplingOperator {
    fn domain_len(&self) -> usize {
        self.layout.len()
    }

    fn range_len(&self) -> usize {
        self.indices.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut grid = x.to_vec();
        synthesize_in_place(&self.family, self.layout, &mut grid);
        for (out, &i) in y.iter_mut().zip(&self.indices) {
            *out = grid[i] * self.scale;
        }
    }

    fn adjoint(&self, y: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        for (&v, &i) in y.iter().zip(&self.indices) {
            x[i] = v * self.scale;
        }
        analyze_in_place(&self.family, self.layout, x);
    }
}

/// Rejects empty, out-of-range or repeated sample positions.
pub fn validate_sample_indices(indices: &[usize], grid_len: usize) -> Result<()> {
    if indices.is_empty() {
        return Err(parameter("at least one sample is required"));
    }
    let mut seen = vec![false; grid_len];
    for &i in indices {
        if i >= grid_len {
            return Err(parameter(format!(
                "sample index {i} outside grid of {grid_len}"
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(parameter(format!("duplicate sample index {i}")));
        }
    }
    Ok(())
}

/// `A·c`: the coefficients' grid values at `sample_indices`, scaled by `1/√m`.
pub fn apply_measurement(
    coeffs: &CoefficientVector,
    sample_indices: &[usize],
    family: &WaveletFamily,
) -> Result<Vec<f64>> {
    if coeffs.wavelet() != family.kind() {
        return Err(parameter(
            "coefficient family does not match operator family",
        ));
    }
    let op = SamplingOperator::new(family.clone(), coeffs.layout(), sample_indices.to_vec())?;
    let mut out = vec![0.0; sample_indices.len() * coeffs.columns()];
    for (c, dst) in out.chunks_mut(sample_indices.len()).enumerate() {
        op.apply(coeffs.column(c), dst);
    }
    Ok(out)
}

/// `Aᵀ·r` for a length-`m` residual.
pub fn adjoint_measurement(
    residual: &[f64],
    sample_indices: &[usize],
    layout: CoeffLayout,
    family: &WaveletFamily,
) -> Result<CoefficientVector> {
    if residual.len() != sample_indices.len() {
        return Err(dimension(format!(
            "residual has {} entries for {} samples",
            residual.len(),
            sample_indices.len()
        )));
    }
    let op = SamplingOperator::new(family.clone(), layout, sample_indices.to_vec())?;
    let mut out = vec![0.0; layout.len()];
    op.adjoint(residual, &mut out);
    CoefficientVector::new(out, layout, family.kind())
}

/// Samples of one or more signals at shared grid positions.
///
/// `values` holds `k` columns of length `m` back to back. The solver works
/// with `f̃ = f/√m`, see [`MeasurementSet::normalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    indices: Vec<usize>,
    values: Vec<f64>,
    columns: usize,
    grid_len: usize,
}

impl MeasurementSet {
    pub fn new(indices: Vec<usize>, values: Vec<f64>, grid_len: usize) -> Result<Self> {
        Self::with_columns(indices, values, 1, grid_len)
    }

    pub fn with_columns(
        indices: Vec<usize>,
        values: Vec<f64>,
        columns: usize,
        grid_len: usize,
    ) -> Result<Self> {
        validate_sample_indices(&indices, grid_len)?;
        if columns == 0 || values.len() != indices.len() * columns {
            return Err(dimension(format!(
                "{} values for {} samples in {columns} columns",
                values.len(),
                indices.len()
            )));
        }
        Ok(Self {
            indices,
            values,
            columns,
            grid_len,
        })
    }

    /// Picks `indices` out of each grid-length column of `grids`.
    pub fn from_grids(indices: Vec<usize>, grids: &[&[f64]]) -> Result<Self> {
        let grid_len = grids.first().map_or(0, |g| g.len());
        if grids.iter().any(|g| g.len() != grid_len) {
            return Err(dimension("grids differ in length"));
        }
        validate_sample_indices(&indices, grid_len)?;
        let values = grids
            .iter()
            .flat_map(|g| indices.iter().map(move |&i| g[i]))
            .collect();
        Self::with_columns(indices, values, grids.len(), grid_len)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, c: usize) -> &[f64] {
        let m = self.indices.len();
        &self.values[c * m..(c + 1) * m]
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn sample_count(&self) -> usize {
        self.indices.len()
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    /// `f/√m`.
    pub fn normalized(&self) -> Vec<f64> {
        let s = 1.0 / (self.indices.len() as f64).sqrt();
        self.values.iter().map(|v| v * s).collect()
    }

    /// Same positions, replaced values.
    pub fn with_values(&self, values: Vec<f64>, columns: usize) -> Result<Self> {
        Self::with_columns(self.indices.clone(), values, columns, self.grid_len)
    }

    /// Keeps only column `c`.
    pub fn single_column(&self, c: usize) -> Result<Self> {
        if c >= self.columns {
            return Err(parameter(format!("column {c} of {}", self.columns)));
        }
        self.with_values(self.column(c).to_vec(), 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dwt::{forward_dwt, inverse_dwt, Wavelet};
    use crate::linalg::{dense_from_operator, dot, max_abs_diff};
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_sample_of_root_atom() {
        let fam = WaveletFamily::new(Wavelet::Haar);
        let layout = CoeffLayout::full(1, 2).unwrap();
        let c = CoefficientVector::new(vec![1.0, 0.0, 0.0, 0.0], layout, Wavelet::Haar).unwrap();
        let y = apply_measurement(&c, &[0], &fam).unwrap();
        assert!((y[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn full_sampling_scales_reconstruction() {
        let fam = WaveletFamily::new(Wavelet::Db2);
        let layout = CoeffLayout::full(1, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vals: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = CoefficientVector::new(vals, layout, Wavelet::Db2).unwrap();
        let all: Vec<usize> = (0..64).collect();
        let y = apply_measurement(&c, &all, &fam).unwrap();
        let x = inverse_dwt(&c, &fam).unwrap();
        let expect: Vec<f64> = x.iter().map(|v| v / 8.0).collect();
        assert!(max_abs_diff(&y, &expect) < 1e-14);

        let r: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let back = adjoint_measurement(&r, &all, layout, &fam).unwrap();
        let fwd = forward_dwt(&r, &fam, 6).unwrap();
        let expect: Vec<f64> = fwd.values().iter().map(|v| v / 8.0).collect();
        assert!(max_abs_diff(back.values(), &expect) < 1e-14);
    }

    #[test]
    fn matches_dense_matrix_built_from_unit_coefficients() {
        let fam = WaveletFamily::new(Wavelet::Db3);
        let layout = CoeffLayout::full(1, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let idx = sample(&mut rng, 256, 50).into_vec();
        // oracle columns: inverse_dwt of unit coefficient, restricted, /√m
        let cols: Vec<Vec<f64>> = (0..256)
            .map(|j| {
                let mut e = vec![0.0; 256];
                e[j] = 1.0;
                let cv = CoefficientVector::new(e, layout, Wavelet::Db3).unwrap();
                let g = inverse_dwt(&cv, &fam).unwrap();
                idx.iter().map(|&i| g[i] / (50f64).sqrt()).collect()
            })
            .collect();
        let a = crate::linalg::DenseMatrix::from_columns(50, &cols);
        let op = SamplingOperator::new(fam.clone(), layout, idx.clone()).unwrap();
        assert!(dense_from_operator(&op).max_abs_diff(&a) < 1e-12);
        let c: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut y = vec![0.0; 50];
        op.apply(&c, &mut y);
        assert!(max_abs_diff(&y, &a.matvec(&c)) < 1e-10);
    }

    #[test]
    fn adjoint_identity_on_random_pairs() {
        let fam = WaveletFamily::new(Wavelet::Coif);
        let layout = CoeffLayout::full(1, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let idx = sample(&mut rng, 256, 64).into_vec();
        let op = SamplingOperator::new(fam, layout, idx).unwrap();
        for _ in 0..20 {
            let c: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
            let r: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut ac = vec![0.0; 64];
            let mut atr = vec![0.0; 256];
            op.apply(&c, &mut ac);
            op.adjoint(&r, &mut atr);
            assert!((dot(&ac, &r) - dot(&c, &atr)).abs() < 1e-10);
        }
        let mut z = vec![1.0; 256];
        op.adjoint(&[0.0; 64], &mut z);
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(matches!(
            validate_sample_indices(&[1, 1], 4),
            Err(crate::Error::Parameter(_))
        ));
        assert!(matches!(
            validate_sample_indices(&[4], 4),
            Err(crate::Error::Parameter(_))
        ));
        assert!(validate_sample_indices(&[], 4).is_err());
    }
}
