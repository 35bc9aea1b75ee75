use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dwt::{
    forward_dwt, inverse_dwt, CoeffLayout, CoefficientVector, IndexKind, MeasurementSet, Wavelet,
    WaveletFamily,
};
use crate::error::{dimension, parameter, Error, Result};
use crate::framelet::{framelet_weights, solve_framelet_inpaint, FrameletDictionary};
use crate::solver::{solve_with_scheme, Lambda, SolverConfig};
use crate::weights::WeightScheme;

use super::metrics::{evaluate, signal_peak, MetricsReport, IMAGE_PEAK};
use super::sampling::{add_noise_on_stream, subsample_columns, NoiseLevel, SampleSize};
use super::signals::{
    heavisine, runge, synth_row_sparse, synth_tree_signal, synthetic_image, TreeCoefficientLaw,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SynthTree,
    Inpaint1d,
    Denoise1d,
    Inpaint2d,
    Denoise2d,
    MmvInpaint,
    FrameletInpaint,
    TreeStats,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::SynthTree,
        ExperimentKind::Inpaint1d,
        ExperimentKind::Denoise1d,
        ExperimentKind::Inpaint2d,
        ExperimentKind::Denoise2d,
        ExperimentKind::MmvInpaint,
        ExperimentKind::FrameletInpaint,
        ExperimentKind::TreeStats,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SynthTree => "synth_tree",
            ExperimentKind::Inpaint1d => "inpaint_1d",
            ExperimentKind::Denoise1d => "denoise_1d",
            ExperimentKind::Inpaint2d => "inpaint_2d",
            ExperimentKind::Denoise2d => "denoise_2d",
            ExperimentKind::MmvInpaint => "mmv_inpaint",
            ExperimentKind::FrameletInpaint => "framelet_inpaint",
            ExperimentKind::TreeStats => "tree_stats",
        }
    }

    pub fn is_denoise(self) -> bool {
        matches!(self, ExperimentKind::Denoise1d | ExperimentKind::Denoise2d)
    }

    pub fn dim(self) -> usize {
        match self {
            ExperimentKind::Inpaint2d | ExperimentKind::Denoise2d => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| parameter(format!("unknown experiment kind `{s}`")))
    }
}

/// Built-in reference data when no input is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalSource {
    Heavisine,
    Runge,
    /// [`synthetic_image`] for 2D kinds.
    Texture,
    /// Coefficients on a random closed tree (row-sparse for several bands).
    Tree,
}

/// Relative regularization factors tried by the default sweep.
pub const DEFAULT_LAMBDA_GRID: [f64; 10] =
    [3e-1, 1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaChoice {
    /// Try each relative factor and keep the best result per scheme.
    Sweep(Vec<f64>),
    Given(Lambda),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentParams {
    /// Signal length, or image side for 2D kinds.
    pub n: usize,
    /// Tree size for synthetic coefficients.
    pub s: usize,
    pub samples: SampleSize,
    pub noise: Option<NoiseLevel>,
    pub wavelet: Wavelet,
    /// Decomposition depth; full depth when absent.
    pub depth: Option<u32>,
    /// Number of measurement columns for `mmv_inpaint`.
    pub bands: usize,
    pub signal: SignalSource,
    pub law: TreeCoefficientLaw,
    pub patch_len: usize,
    pub lambda: LambdaChoice,
    pub solver: SolverConfig,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self::defaults_for(ExperimentKind::SynthTree)
    }
}

impl ExperimentParams {
    pub fn defaults_for(kind: ExperimentKind) -> Self {
        let base = Self {
            n: 512,
            s: 90,
            samples: SampleSize::Count(179),
            noise: None,
            wavelet: Wavelet::Haar,
            depth: None,
            bands: 1,
            signal: SignalSource::Tree,
            law: TreeCoefficientLaw::default(),
            patch_len: 8,
            lambda: LambdaChoice::Sweep(DEFAULT_LAMBDA_GRID.to_vec()),
            solver: SolverConfig::default(),
        };
        match kind {
            ExperimentKind::SynthTree | ExperimentKind::TreeStats => base,
            ExperimentKind::Inpaint1d => Self {
                n: 1024,
                samples: SampleSize::Count(80),
                wavelet: Wavelet::Coif,
                signal: SignalSource::Runge,
                ..base
            },
            ExperimentKind::Denoise1d => Self {
                n: 1024,
                samples: SampleSize::Fraction(1.0),
                noise: Some(NoiseLevel::Psnr(26.0184)),
                wavelet: Wavelet::Db3,
                signal: SignalSource::Heavisine,
                ..base
            },
            ExperimentKind::Inpaint2d => Self {
                n: 256,
                samples: SampleSize::Fraction(0.15),
                wavelet: Wavelet::Db3,
                signal: SignalSource::Texture,
                ..base
            },
            ExperimentKind::Denoise2d => Self {
                n: 256,
                samples: SampleSize::Fraction(1.0),
                noise: Some(NoiseLevel::Psnr(26.0184)),
                wavelet: Wavelet::Db3,
                signal: SignalSource::Texture,
                ..base
            },
            ExperimentKind::MmvInpaint => Self {
                n: 256,
                s: 10,
                samples: SampleSize::Count(96),
                wavelet: Wavelet::Db2,
                bands: 3,
                ..base
            },
            ExperimentKind::FrameletInpaint => Self {
                n: 1024,
                samples: SampleSize::Count(80),
                signal: SignalSource::Heavisine,
                ..base
            },
        }
    }
}

/// A fully specified experiment; every random choice derives from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub params: ExperimentParams,
}

impl Experiment {
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            params: ExperimentParams::defaults_for(kind),
        }
    }

    pub fn with_params(kind: ExperimentKind, seed: u64, params: ExperimentParams) -> Self {
        Self { kind, seed, params }
    }
}

/// Clean data a trial is measured against.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    /// One grid per band; images are row-major.
    pub columns: Vec<Vec<f64>>,
    pub dim: usize,
    pub peak: f64,
    /// Ground-truth coefficients when the data was synthesized from them.
    pub coeffs: Option<CoefficientVector>,
}

impl Reference {
    pub fn signal(values: Vec<f64>) -> Self {
        let peak = signal_peak(&values);
        Self {
            columns: vec![values],
            dim: 1,
            peak,
            coeffs: None,
        }
    }

    /// 8-bit image bands (one for grayscale, three for RGB).
    pub fn image(bands: Vec<Vec<f64>>) -> Self {
        Self {
            columns: bands,
            dim: 2,
            peak: IMAGE_PEAK,
            coeffs: None,
        }
    }

    pub fn grid_len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    fn layout(&self, depth: Option<u32>) -> Result<CoeffLayout> {
        let n = self.grid_len();
        let side = if self.dim == 2 {
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                return Err(dimension(format!("{n} pixels do not form a square image")));
            }
            side
        } else {
            n
        };
        let levels = crate::dwt::log2_exact(side)?;
        CoeffLayout::new(self.dim, levels, depth.unwrap_or(levels))
    }

    /// The built-in reference of an experiment.
    pub fn for_experiment(exp: &Experiment) -> Result<Self> {
        let p = &exp.params;
        let dim = exp.kind.dim();
        match (exp.kind, p.signal) {
            (ExperimentKind::TreeStats, _) => Err(Error::Unsupported(
                "tree_stats has no reference data".into(),
            )),
            (ExperimentKind::MmvInpaint, SignalSource::Tree) => {
                let levels = crate::dwt::log2_exact(p.n)?;
                let (grids, coeffs) =
                    synth_row_sparse(p.s, levels, p.bands, exp.seed, p.wavelet, p.law)?;
                let peak = grids.iter().map(|g| signal_peak(g)).fold(0.0, f64::max);
                Ok(Self {
                    columns: grids,
                    dim: 1,
                    peak,
                    coeffs: Some(coeffs),
                })
            }
            (_, SignalSource::Tree) => {
                let levels = crate::dwt::log2_exact(p.n)?;
                let t = synth_tree_signal(p.s, levels, dim, exp.seed, p.wavelet, p.law)?;
                let peak = signal_peak(&t.signal);
                Ok(Self {
                    columns: vec![t.signal],
                    dim,
                    peak,
                    coeffs: Some(t.coeffs),
                })
            }
            (_, SignalSource::Texture) if dim == 2 => {
                crate::dwt::log2_exact(p.n)?;
                Ok(Self::image(vec![synthetic_image(p.n, exp.seed)]))
            }
            (_, SignalSource::Texture) => Err(parameter("texture references are two-dimensional")),
            (_, _) if dim == 2 => Err(parameter("1D test functions cannot feed a 2D experiment")),
            (_, SignalSource::Heavisine) => {
                crate::dwt::log2_exact(p.n)?;
                Ok(Self::signal(heavisine(p.n)))
            }
            (_, SignalSource::Runge) => {
                crate::dwt::log2_exact(p.n)?;
                Ok(Self::signal(runge(p.n)))
            }
        }
    }
}

/// Everything the schemes of one comparison share: reference, layout and
/// the exact measurements.
#[derive(Debug, Clone)]
pub struct Trial {
    pub experiment: Experiment,
    pub reference: Reference,
    pub layout: CoeffLayout,
    pub family: WaveletFamily,
    pub measurements: MeasurementSet,
    /// The full noisy grids when noise was added.
    pub noisy: Option<Vec<Vec<f64>>>,
}

impl Trial {
    /// Built-in reference data for the experiment.
    pub fn prepare(exp: &Experiment) -> Result<Self> {
        Self::with_reference(exp, Reference::for_experiment(exp)?)
    }

    pub fn with_reference(exp: &Experiment, reference: Reference) -> Result<Self> {
        if exp.kind == ExperimentKind::TreeStats {
            return Err(Error::Unsupported("tree_stats does not run trials".into()));
        }
        if reference.columns.is_empty()
            || reference
                .columns
                .iter()
                .any(|c| c.len() != reference.grid_len())
        {
            return Err(dimension(
                "reference columns must be non-empty and of equal length",
            ));
        }
        if reference.columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("reference contains non-finite values".into()));
        }
        let p = &exp.params;
        p.solver.validate()?;
        let layout = reference.layout(p.depth)?;
        let family = WaveletFamily::from(p.wavelet);
        if let Some(c) = &reference.coeffs {
            if c.layout() != layout || c.wavelet() != p.wavelet {
                return Err(parameter(
                    "reference coefficients do not match the experiment layout",
                ));
            }
        }
        let noisy = match p.noise {
            Some(level) => Some(
                reference
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(c, col)| {
                        add_noise_on_stream(col, level, reference.peak, exp.seed, c as u64)
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let source = noisy.as_ref().unwrap_or(&reference.columns);
        let grids: Vec<&[f64]> = source.iter().map(Vec::as_slice).collect();
        let measurements = subsample_columns(&grids, p.samples, exp.seed)?;
        Ok(Self {
            experiment: exp.clone(),
            reference,
            layout,
            family,
            measurements,
            noisy,
        })
    }

    fn score(&self, m: &MetricsReport) -> f64 {
        m.coef_error_l2.unwrap_or(m.rmse)
    }

    fn metrics(&self, grids: &[f64], coeffs: Option<&[f64]>) -> Result<MetricsReport> {
        let reference: Vec<f64> = self.reference.columns.concat();
        let truth = match (&self.reference.coeffs, coeffs) {
            (Some(t), Some(c)) => Some((t.values(), c)),
            _ => None,
        };
        evaluate(&reference, grids, self.reference.peak, truth)
    }

    fn lambda_rules(&self) -> Vec<Lambda> {
        match &self.experiment.params.lambda {
            LambdaChoice::Sweep(grid) => grid.iter().map(|&f| Lambda::Relative(f)).collect(),
            LambdaChoice::Given(l) => vec![*l],
        }
    }

    fn config(&self, lambda: Lambda) -> SolverConfig {
        SolverConfig {
            lambda,
            ..self.experiment.params.solver.clone()
        }
    }

    /// Runs `scheme` over the λ rules and keeps the best result.
    pub fn run_scheme(&self, scheme: WeightScheme, mode: RecoveryMode) -> Result<SchemeOutcome> {
        let rules = self.lambda_rules();
        if rules.iter().any(
            |l| !matches!(l, Lambda::Fixed(v) | Lambda::Relative(v) if *v > 0.0 && v.is_finite()),
        ) {
            return Err(parameter("lambda values must be positive"));
        }
        let attempts: Vec<Result<SchemeOutcome>> = rules
            .par_iter()
            .map(|&rule| self.run_once(scheme, mode, rule))
            .collect();
        let mut best: Option<SchemeOutcome> = None;
        for a in attempts {
            let a = a?;
            if best
                .as_ref()
                .is_none_or(|b| self.score(&a.metrics) < self.score(&b.metrics))
            {
                best = Some(a);
            }
        }
        best.ok_or_else(|| parameter("empty lambda grid"))
    }

    fn run_once(
        &self,
        scheme: WeightScheme,
        mode: RecoveryMode,
        rule: Lambda,
    ) -> Result<SchemeOutcome> {
        let config = self.config(rule);
        let (recon, coeffs, lambdas, iterations) = match mode {
            RecoveryMode::Single | RecoveryMode::Joint => {
                if mode == RecoveryMode::Single && self.measurements.columns() != 1 {
                    return Err(dimension("single-vector recovery needs one column"));
                }
                let r = solve_with_scheme(
                    &self.measurements,
                    scheme,
                    &config,
                    &self.family,
                    self.layout,
                )?;
                let recon = inverse_dwt(&r.coeffs, &self.family)?;
                (
                    recon,
                    r.coeffs.into_values(),
                    vec![r.lambda],
                    r.iterations_used,
                )
            }
            RecoveryMode::Independent => {
                let mut recon = Vec::new();
                let mut coeffs = Vec::new();
                let mut lambdas = Vec::new();
                let mut iterations = 0;
                for c in 0..self.measurements.columns() {
                    let single = self.measurements.single_column(c)?;
                    let r = solve_with_scheme(&single, scheme, &config, &self.family, self.layout)?;
                    recon.extend(inverse_dwt(&r.coeffs, &self.family)?);
                    coeffs.extend_from_slice(r.coeffs.values());
                    lambdas.push(r.lambda);
                    iterations += r.iterations_used;
                }
                (recon, coeffs, lambdas, iterations)
            }
            RecoveryMode::Framelet => {
                let dict = FrameletDictionary::haar(
                    self.reference.grid_len(),
                    self.experiment.params.patch_len,
                )?;
                let weights = match scheme {
                    WeightScheme::Unweighted => None,
                    WeightScheme::UniformNorm => Some(framelet_weights(&dict)?),
                    other => {
                        return Err(Error::Unsupported(format!(
                            "framelet recovery supports `none` and `norm`, not `{other}`"
                        )))
                    }
                };
                let r =
                    solve_framelet_inpaint(&self.measurements, &dict, weights.as_ref(), &config)?;
                (r.signal, r.coeffs, vec![r.lambda], r.iterations_used)
            }
            RecoveryMode::HardThreshold | RecoveryMode::Noisy => {
                return Err(parameter(format!("{mode} is not a solver mode")))
            }
        };
        let coef_view = match mode {
            RecoveryMode::Framelet => None,
            _ => Some(coeffs.as_slice()),
        };
        let metrics = self.metrics(&recon, coef_view)?;
        Ok(SchemeOutcome {
            scheme: Some(scheme),
            mode,
            lambda_rule: Some(rule),
            lambdas,
            iterations,
            metrics,
            reconstruction: recon,
            coeffs,
        })
    }

    /// The noisy input itself and the hard-threshold baseline.
    pub fn baselines(&self) -> Result<Vec<SchemeOutcome>> {
        let Some(noisy) = &self.noisy else {
            return Ok(Vec::new());
        };
        let flat = noisy.concat();
        let mut out = vec![SchemeOutcome {
            scheme: None,
            mode: RecoveryMode::Noisy,
            lambda_rule: None,
            lambdas: Vec::new(),
            iterations: 0,
            metrics: self.metrics(&flat, None)?,
            reconstruction: flat,
            coeffs: Vec::new(),
        }];
        let mut recon = Vec::new();
        let mut coeffs = Vec::new();
        for col in noisy {
            let (r, c) = hard_threshold_denoise(col, &self.family, self.layout)?;
            recon.extend(r);
            coeffs.extend(c);
        }
        out.push(SchemeOutcome {
            scheme: None,
            mode: RecoveryMode::HardThreshold,
            lambda_rule: None,
            lambdas: Vec::new(),
            iterations: 0,
            metrics: self.metrics(&recon, Some(&coeffs))?,
            reconstruction: recon,
            coeffs,
        });
        Ok(out)
    }

    /// Recovery modes run for each scheme by [`compare_schemes`].
    pub fn modes(&self) -> Vec<RecoveryMode> {
        match self.experiment.kind {
            ExperimentKind::MmvInpaint => vec![RecoveryMode::Joint, RecoveryMode::Independent],
            ExperimentKind::FrameletInpaint => vec![RecoveryMode::Framelet, RecoveryMode::Single],
            _ if self.measurements.columns() > 1 => vec![RecoveryMode::Joint],
            _ => vec![RecoveryMode::Single],
        }
    }

    /// Every scheme in every mode of this trial, then the baselines, on the
    /// same measurements.
    pub fn compare(&self, schemes: &[WeightScheme]) -> Result<Vec<SchemeOutcome>> {
        let jobs: Vec<(WeightScheme, RecoveryMode)> = schemes
            .iter()
            .flat_map(|&s| self.modes().into_iter().map(move |m| (s, m)))
            .collect();
        let mut out = jobs
            .par_iter()
            .map(|&(s, m)| self.run_scheme(s, m))
            .collect::<Result<Vec<_>>>()?;
        out.extend(self.baselines()?);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMode {
    /// One measurement vector.
    Single,
    /// All columns together under the row-group penalty.
    Joint,
    /// Each column on its own.
    Independent,
    /// Haar framelet dictionary instead of the wavelet basis.
    Framelet,
    /// Universal hard threshold of the noisy coefficients.
    HardThreshold,
    /// The noisy input, unprocessed.
    Noisy,
}

impl RecoveryMode {
    pub fn name(self) -> &'static str {
        match self {
            RecoveryMode::Single => "single",
            RecoveryMode::Joint => "joint",
            RecoveryMode::Independent => "independent",
            RecoveryMode::Framelet => "framelet",
            RecoveryMode::HardThreshold => "hard_threshold",
            RecoveryMode::Noisy => "noisy",
        }
    }
}

impl fmt::Display for RecoveryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    /// `None` for the baselines.
    pub scheme: Option<WeightScheme>,
    pub mode: RecoveryMode,
    /// The λ rule that won the sweep.
    pub lambda_rule: Option<Lambda>,
    /// λ actually used, one per solve.
    pub lambdas: Vec<f64>,
    pub iterations: usize,
    pub metrics: MetricsReport,
    /// Concatenated grids, one per band.
    pub reconstruction: Vec<f64>,
    /// Concatenated coefficient columns (wavelet or framelet).
    pub coeffs: Vec<f64>,
}

impl SchemeOutcome {
    pub fn label(&self) -> String {
        match self.scheme {
            Some(s) => s.to_string(),
            None => self.mode.to_string(),
        }
    }
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub seed: u64,
    pub scheme: String,
    pub mode: RecoveryMode,
    pub lambda_factor: Option<f64>,
    pub lambda: Option<f64>,
    pub metrics: MetricsReport,
}

impl ComparisonRow {
    fn from_outcome(seed: u64, o: &SchemeOutcome) -> Self {
        let factor = match o.lambda_rule {
            Some(Lambda::Relative(f)) => Some(f),
            _ => None,
        };
        Self {
            seed,
            scheme: o.label(),
            mode: o.mode,
            lambda_factor: factor,
            lambda: o.lambdas.first().copied(),
            metrics: o.metrics,
        }
    }
}

/// Runs every scheme on one trial with identical measurements; one row per
/// scheme and mode, plus the baselines for denoising kinds.
pub fn compare_schemes(exp: &Experiment, schemes: &[WeightScheme]) -> Result<Vec<ComparisonRow>> {
    let trial = Trial::prepare(exp)?;
    Ok(trial
        .compare(schemes)?
        .iter()
        .map(|o| ComparisonRow::from_outcome(exp.seed, o))
        .collect())
}

/// [`compare_schemes`] over seeds `seed, seed+1, …`, in parallel. Rows are
/// ordered by seed.
pub fn compare_trials(
    exp: &Experiment,
    schemes: &[WeightScheme],
    trials: usize,
) -> Result<Vec<ComparisonRow>> {
    if trials == 0 {
        return Err(parameter("at least one trial is required"));
    }
    let tables = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let e = Experiment {
                seed: exp.seed.wrapping_add(t),
                ..exp.clone()
            };
            compare_schemes(&e, schemes)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tables.concat())
}

fn analyze(grid: &[f64], family: &WaveletFamily, layout: CoeffLayout) -> Result<CoefficientVector> {
    if grid.len() != layout.len() {
        return Err(dimension(format!(
            "{} values for a layout of {}",
            grid.len(),
            layout.len()
        )));
    }
    if layout.dim() == 1 {
        forward_dwt(grid, family, layout.depth())
    } else {
        crate::dwt::forward_dwt_2d(grid, layout.side(), family, layout.depth())
    }
}

fn mad_sigma(coeffs: &CoefficientVector) -> f64 {
    let layout = coeffs.layout();
    let finest = layout.levels() - 1;
    let mut details: Vec<f64> = coeffs
        .values()
        .iter()
        .enumerate()
        .filter(|(p, _)| layout.level_of(*p) == (IndexKind::Wavelet, finest))
        .map(|(_, v)| v.abs())
        .collect();
    if details.is_empty() {
        return 0.0;
    }
    details.sort_by(f64::total_cmp);
    let mid = details.len() / 2;
    let median = if details.len() % 2 == 0 {
        0.5 * (details[mid - 1] + details[mid])
    } else {
        details[mid]
    };
    median / 0.6745
}

/// Noise level of a grid from the finest details, `median|d|/0.6745`.
pub fn estimate_noise_sigma(
    noisy: &[f64],
    family: &WaveletFamily,
    layout: CoeffLayout,
) -> Result<f64> {
    Ok(mad_sigma(&analyze(noisy, family, layout)?))
}

/// Universal hard threshold: `σ̂ = median|finest details|/0.6745`, details
/// with `|c| ≤ σ̂√(2 ln N)` are zeroed. Returns the grid and coefficients.
pub fn hard_threshold_denoise(
    noisy: &[f64],
    family: &WaveletFamily,
    layout: CoeffLayout,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let coeffs = analyze(noisy, family, layout)?;
    let tau = mad_sigma(&coeffs) * (2.0 * (layout.len() as f64).ln()).sqrt();
    let mut values = coeffs.into_values();
    for (p, v) in values.iter_mut().enumerate() {
        if layout.level_of(p).0 == IndexKind::Wavelet && v.abs() <= tau {
            *v = 0.0;
        }
    }
    let kept = CoefficientVector::new(values, layout, family.kind())?;
    let grid = inverse_dwt(&kept, family)?;
    Ok((grid, kept.into_values()))
}
