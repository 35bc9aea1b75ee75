//! Convolutional framelets built from a global and a local orthonormal
//! wavelet basis (Haar by default), and inpainting in that dictionary.
//!
//! Coefficient matrices are `N × ℓ` and stored column by column, so entry
//! `(i, j)` lives at `j·N + i`.

use crate::dwt::{
    analyze_in_place, synthesize_in_place, CoeffLayout, IndexKind, MeasurementSet, Wavelet,
    WaveletFamily,
};
use crate::error::{data, dimension, parameter, Error, Result};
use crate::linalg::{DenseMatrix, LinearOperator};
use crate::solver::apg::{self, Penalty, Problem};
use crate::solver::{Lambda, SolverConfig};

/// Largest signal for which [`FrameletDictionary::explicit_atoms`] builds
/// the full atom matrix.
pub const EXPLICIT_LIMIT: usize = 256;

/// `(v ∗ w)[k] = Σ_p v[k−p mod N]·w[p]`.
pub fn circular_convolve(v: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if v.len() != w.len() {
        return Err(dimension(format!(
            "lengths {} and {} differ",
            v.len(),
            w.len()
        )));
    }
    let n = v.len();
    Ok((0..n)
        .map(|k| (0..n).map(|p| v[(k + n - p) % n] * w[p]).sum())
        .collect())
}

/// Row `k` holds `F_k, F_{k+1}, …, F_{k+ℓ−1}`, indices taken mod `N`.
pub fn build_patch_matrix(signal: &[f64], patch_len: usize) -> Result<DenseMatrix> {
    let n = signal.len();
    if patch_len == 0 || patch_len > n {
        return Err(parameter(format!(
            "patch length {patch_len} outside 1..={n}"
        )));
    }
    let mut p = DenseMatrix::zeros(n, patch_len);
    for k in 0..n {
        for q in 0..patch_len {
            p.set(k, q, signal[(k + q) % n]);
        }
    }
    Ok(p)
}

/// An orthonormal wavelet basis of `ℝⁿ`, full depth. Length one is the
/// trivial basis `[1]`.
#[derive(Debug, Clone)]
struct Basis {
    family: WaveletFamily,
    layout: Option<CoeffLayout>,
    len: usize,
}

impl Basis {
    fn new(len: usize, wavelet: Wavelet) -> Result<Self> {
        let layout = if len == 1 {
            None
        } else {
            let levels = crate::dwt::log2_exact(len)?;
            Some(CoeffLayout::full(1, levels)?)
        };
        let family = WaveletFamily::from(wavelet);
        if let Some(l) = layout {
            if family.filter_len() > l.len() {
                return Err(parameter(format!(
                    "{wavelet} filters are longer than the length {len}"
                )));
            }
        }
        Ok(Self {
            family,
            layout,
            len,
        })
    }

    /// `Gᵀx`.
    fn analyze(&self, buf: &mut [f64]) {
        if let Some(l) = self.layout {
            analyze_in_place(&self.family, l, buf);
        }
    }

    /// `G c`.
    fn synthesize(&self, buf: &mut [f64]) {
        if let Some(l) = self.layout {
            synthesize_in_place(&self.family, l, buf);
        }
    }

    fn column(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.len];
        e[i] = 1.0;
        self.synthesize(&mut e);
        e
    }

    fn matrix(&self) -> DenseMatrix {
        let cols: Vec<Vec<f64>> = (0..self.len).map(|i| self.column(i)).collect();
        DenseMatrix::from_columns(self.len, &cols)
    }

    /// Tree depth of basis function `i`: its wavelet level, zero for the
    /// scaling function.
    fn depth(&self, i: usize) -> u32 {
        match self.layout.map(|l| l.level_of(i)) {
            Some((IndexKind::Wavelet, j)) => j,
            _ => 0,
        }
    }
}

/// The atoms `φ_ij = G_i ∗ L̄_j / √ℓ`, with `L̄_j` the local basis function
/// padded by zeros to length `N`.
#[derive(Debug, Clone)]
pub struct FrameletDictionary {
    global: Basis,
    local: Basis,
    /// `L`, row-major `ℓ × ℓ`.
    local_matrix: DenseMatrix,
}

impl FrameletDictionary {
    /// Haar global and local bases.
    pub fn haar(signal_len: usize, patch_len: usize) -> Result<Self> {
        Self::with_bases(signal_len, patch_len, Wavelet::Haar, Wavelet::Haar)
    }

    pub fn with_bases(
        signal_len: usize,
        patch_len: usize,
        global: Wavelet,
        local: Wavelet,
    ) -> Result<Self> {
        if signal_len < 2 {
            return Err(dimension(format!(
                "signal length {signal_len} is too short"
            )));
        }
        if patch_len == 0 || patch_len > signal_len || !patch_len.is_power_of_two() {
            return Err(parameter(format!(
                "patch length {patch_len} must be a power of two no larger than {signal_len}"
            )));
        }
        let global = Basis::new(signal_len, global)?;
        let local = Basis::new(patch_len, local)?;
        let local_matrix = local.matrix();
        Ok(Self {
            global,
            local,
            local_matrix,
        })
    }

    pub fn signal_len(&self) -> usize {
        self.global.len
    }

    pub fn patch_len(&self) -> usize {
        self.local.len
    }

    /// `N·ℓ`.
    pub fn atom_count(&self) -> usize {
        self.signal_len() * self.patch_len()
    }

    /// `G`, columns are the global basis functions.
    pub fn global_basis(&self) -> DenseMatrix {
        self.global.matrix()
    }

    /// `L`, columns are the local basis functions.
    pub fn local_basis(&self) -> DenseMatrix {
        self.local_matrix.clone()
    }

    pub fn global_depth(&self, i: usize) -> u32 {
        self.global.depth(i)
    }

    pub fn local_depth(&self, j: usize) -> u32 {
        self.local.depth(j)
    }

    /// `φ_ij` built directly from its definition.
    pub fn atom(&self, i: usize, j: usize) -> Result<Vec<f64>> {
        let (n, l) = (self.signal_len(), self.patch_len());
        if i >= n || j >= l {
            return Err(parameter(format!("atom ({i}, {j}) outside {n} x {l}")));
        }
        let mut padded = vec![0.0; n];
        for (q, v) in padded.iter_mut().take(l).enumerate() {
            *v = self.local_matrix.get(q, j);
        }
        let s = 1.0 / (l as f64).sqrt();
        Ok(circular_convolve(&self.global.column(i), &padded)?
            .into_iter()
            .map(|v| v * s)
            .collect())
    }

    /// `N × Nℓ` matrix whose column `j·N + i` is `φ_ij`. Only for
    /// `N ≤ EXPLICIT_LIMIT`.
    pub fn explicit_atoms(&self) -> Result<DenseMatrix> {
        let n = self.signal_len();
        if n > EXPLICIT_LIMIT {
            return Err(Error::Resource(format!(
                "explicit atom matrix limited to N <= {EXPLICIT_LIMIT}, got {n}"
            )));
        }
        let mut cols = Vec::with_capacity(self.atom_count());
        for j in 0..self.patch_len() {
            for i in 0..n {
                cols.push(self.atom(i, j)?);
            }
        }
        Ok(DenseMatrix::from_columns(n, &cols))
    }

    fn analyze_flat(&self, signal: &[f64], out: &mut [f64]) {
        let (n, l) = (self.signal_len(), self.patch_len());
        let s = 1.0 / (l as f64).sqrt();
        // row k of P·L is Lᵀ applied to the patch at k
        let mut patch = vec![0.0; l];
        for k in 0..n {
            for (q, v) in patch.iter_mut().enumerate() {
                *v = signal[(k + q) % n];
            }
            self.local.analyze(&mut patch);
            for (j, v) in patch.iter().enumerate() {
                out[j * n + k] = v * s;
            }
        }
        for col in out.chunks_mut(n) {
            self.global.analyze(col);
        }
    }

    fn synthesize_flat(&self, coeffs: &[f64], out: &mut [f64]) {
        let (n, l) = (self.signal_len(), self.patch_len());
        let s = 1.0 / (l as f64).sqrt();
        let mut v = coeffs.to_vec();
        for col in v.chunks_mut(n) {
            self.global.synthesize(col);
        }
        out.iter_mut().for_each(|x| *x = 0.0);
        let mut w = vec![0.0; l];
        for r in 0..n {
            for (j, x) in w.iter_mut().enumerate() {
                *x = v[j * n + r];
            }
            self.local.synthesize(&mut w);
            for (p, x) in w.iter().enumerate() {
                out[(r + p) % n] += x * s;
            }
        }
    }

    /// The framelet coefficients `c_ij = ⟨F, φ_ij⟩`, equal to `GᵀPL/√ℓ`.
    pub fn analysis(&self, signal: &[f64]) -> Result<DenseMatrix> {
        let flat = self.analysis_flat(signal)?;
        Ok(self.to_matrix(&flat))
    }

    /// Column-major `N·ℓ` form of [`analysis`](Self::analysis).
    pub fn analysis_flat(&self, signal: &[f64]) -> Result<Vec<f64>> {
        if signal.len() != self.signal_len() {
            return Err(dimension(format!(
                "signal of length {} for a dictionary of length {}",
                signal.len(),
                self.signal_len()
            )));
        }
        let mut out = vec![0.0; self.atom_count()];
        self.analyze_flat(signal, &mut out);
        Ok(out)
    }

    /// `Σ c_ij φ_ij`.
    pub fn synthesis(&self, coeffs: &DenseMatrix) -> Result<Vec<f64>> {
        if coeffs.rows() != self.signal_len() || coeffs.cols() != self.patch_len() {
            return Err(dimension(format!(
                "{} x {} coefficients for a {} x {} dictionary",
                coeffs.rows(),
                coeffs.cols(),
                self.signal_len(),
                self.patch_len()
            )));
        }
        self.synthesis_flat(&self.to_flat(coeffs))
    }

    pub fn synthesis_flat(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.atom_count() {
            return Err(dimension(format!(
                "{} coefficients for {} atoms",
                coeffs.len(),
                self.atom_count()
            )));
        }
        let mut out = vec![0.0; self.signal_len()];
        self.synthesize_flat(coeffs, &mut out);
        Ok(out)
    }

    pub fn to_matrix(&self, flat: &[f64]) -> DenseMatrix {
        let n = self.signal_len();
        let cols: Vec<Vec<f64>> = flat.chunks(n).map(<[f64]>::to_vec).collect();
        DenseMatrix::from_columns(n, &cols)
    }

    pub fn to_flat(&self, m: &DenseMatrix) -> Vec<f64> {
        (0..m.cols()).flat_map(|j| m.column(j)).collect()
    }

    /// `‖φ_ij‖₂` computed from the atoms, `N × ℓ`.
    pub fn atom_norms(&self) -> DenseMatrix {
        let (n, l) = (self.signal_len(), self.patch_len());
        let mut out = DenseMatrix::zeros(n, l);
        let mut c = vec![0.0; self.atom_count()];
        for j in 0..l {
            for i in 0..n {
                c[j * n + i] = 1.0;
                let atom = self.synthesis_flat(&c).expect("sizes match");
                c[j * n + i] = 0.0;
                out.set(i, j, atom.iter().map(|v| v * v).sum::<f64>().sqrt());
            }
        }
        out
    }
}

/// `ω_ij = 2^{γ_i·λ_j/2}` with `γ_i`, `λ_j` the Haar depths of the global
/// and local basis functions.
pub fn framelet_weights(dict: &FrameletDictionary) -> Result<DenseMatrix> {
    if dict.global.family.kind() != Wavelet::Haar || dict.local.family.kind() != Wavelet::Haar {
        return Err(Error::Unsupported(
            "framelet weights need Haar bases".into(),
        ));
    }
    let (n, l) = (dict.signal_len(), dict.patch_len());
    let mut w = DenseMatrix::zeros(n, l);
    for i in 0..n {
        for j in 0..l {
            let e = dict.global_depth(i) * dict.local_depth(j);
            w.set(i, j, 2f64.powf(f64::from(e) / 2.0));
        }
    }
    Ok(w)
}

/// `C ↦ S·synthesis(C)/√m`.
pub struct FrameletSampling<'a> {
    dict: &'a FrameletDictionary,
    indices: &'a [usize],
    scale: f64,
}

impl<'a> FrameletSampling<'a> {
    pub fn new(dict: &'a FrameletDictionary, indices: &'a [usize]) -> Result<Self> {
        crate::dwt::validate_sample_indices(indices, dict.signal_len())?;
        Ok(Self {
            dict,
            indices,
            scale: 1.0 / (indices.len() as f64).sqrt(),
        })
    }
}

impl LinearOperator for FrameletSampling<'_> {
    fn domain_len(&self) -> usize {
        self.dict.atom_count()
    }

    fn range_len(&self) -> usize {
        self.indices.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut grid = vec![0.0; self.dict.signal_len()];
        self.dict.synthesize_flat(x, &mut grid);
        for (o, &i) in y.iter_mut().zip(self.indices) {
            *o = grid[i] * self.scale;
        }
    }

    fn adjoint(&self, y: &[f64], x: &mut [f64]) {
        let mut grid = vec![0.0; self.dict.signal_len()];
        for (&v, &i) in y.iter().zip(self.indices) {
            grid[i] = v * self.scale;
        }
        self.dict.analyze_flat(&grid, x);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameletSolveResult {
    /// `N × ℓ` coefficients, column-major.
    pub coeffs: Vec<f64>,
    /// `synthesis(coeffs)`.
    pub signal: Vec<f64>,
    pub objective_trace: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    pub lambda: f64,
}

/// Minimizes `λ‖C‖_{ω,1} + ‖S·synthesis(C)/√m − f̃‖²`. `weights` is `N × ℓ`;
/// pass `None` for unit weights.
pub fn solve_framelet_inpaint(
    meas: &MeasurementSet,
    dict: &FrameletDictionary,
    weights: Option<&DenseMatrix>,
    config: &SolverConfig,
) -> Result<FrameletSolveResult> {
    config.validate()?;
    if meas.columns() != 1 {
        return Err(dimension(
            "framelet inpainting takes one measurement column",
        ));
    }
    if meas.grid_len() != dict.signal_len() {
        return Err(dimension(format!(
            "measurements on a grid of {}, dictionary of length {}",
            meas.grid_len(),
            dict.signal_len()
        )));
    }
    if let Some(v) = meas.values().iter().find(|v| !v.is_finite()) {
        return Err(data(format!("non-finite measurement value {v}")));
    }
    let w = match weights {
        Some(m) => {
            if m.rows() != dict.signal_len() || m.cols() != dict.patch_len() {
                return Err(dimension("weight matrix does not match the dictionary"));
            }
            let flat = dict.to_flat(m);
            if flat.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(parameter("weights must be positive and finite"));
            }
            flat
        }
        None => vec![1.0; dict.atom_count()],
    };
    let op = FrameletSampling::new(dict, meas.indices())?;
    let target = meas.normalized();
    let lambda = match config.lambda {
        Lambda::Fixed(v) => v,
        Lambda::Relative(r) => {
            let mut atf = vec![0.0; dict.atom_count()];
            op.adjoint(&target, &mut atf);
            let top = atf
                .iter()
                .zip(&w)
                .map(|(a, w)| a.abs() / w)
                .fold(0.0, f64::max);
            if top > 0.0 {
                r * top
            } else {
                r
            }
        }
    };
    let problem = Problem {
        op: &op,
        target: &target,
        columns: 1,
        weights: &w,
        lambda,
        penalty: Penalty::Elementwise,
    };
    let out = apg::minimize(&problem, config, None);
    let signal = dict.synthesis_flat(&out.x)?;
    Ok(FrameletSolveResult {
        coeffs: out.x,
        signal,
        objective_trace: out.objective_trace,
        iterations_used: out.iterations_used,
        converged: out.converged,
        lambda,
    })
}
