use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use wavl1::dwt::Wavelet;
use wavl1::harness::{ExperimentKind, SignalSource};
use wavl1::solver::StepRule;
use wavl1::weights::{parse_scheme_list, WeightScheme};

use crate::settings::{parse_lambda, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "wavl1",
    version,
    about = "Weighted l1 wavelet reconstruction of signals and images"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct a signal (CSV) or image (PGM/PPM) from a random subset of its samples
    Inpaint(RunArgs),
    /// Remove Gaussian noise from a signal or image
    Denoise(RunArgs),
    /// Recover a synthetic signal whose wavelet coefficients live on a closed tree
    Synth(SynthArgs),
    /// Inpaint a 1D signal over a Haar framelet dictionary
    FrameletInpaint(FrameletArgs),
    /// Tabulate K_T(s) and check the closed-tree inequalities
    TreeStats(TreeArgs),
    /// Compare weighting schemes over several seeded trials of a built-in experiment
    Compare(CompareArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Inpaint(_) => "inpaint",
            Command::Denoise(_) => "denoise",
            Command::Synth(_) => "synth",
            Command::FrameletInpaint(_) => "framelet-inpaint",
            Command::TreeStats(_) => "tree-stats",
            Command::Compare(_) => "compare",
        }
    }
}

fn wavelet(s: &str) -> Result<Wavelet, String> {
    s.parse().map_err(|e: wavl1::Error| e.to_string())
}

fn scheme(s: &str) -> Result<String, String> {
    s.parse::<WeightScheme>().map_err(|e| e.to_string())?;
    Ok(s.to_string())
}

fn schemes(s: &str) -> Result<String, String> {
    match parse_scheme_list(s) {
        Ok(v) if !v.is_empty() => Ok(s.to_string()),
        Ok(_) => Err("empty scheme list".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn lambda(s: &str) -> Result<String, String> {
    parse_lambda(s).map_err(|e| e.to_string())?;
    Ok(s.to_string())
}

fn fraction(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(f) if f > 0.0 && f <= 1.0 => Ok(f),
        _ => Err(format!("`{s}` is not a fraction in (0, 1]")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn signal(s: &str) -> Result<SignalSource, String> {
    match s {
        "heavisine" => Ok(SignalSource::Heavisine),
        "runge" => Ok(SignalSource::Runge),
        "texture" => Ok(SignalSource::Texture),
        "tree" => Ok(SignalSource::Tree),
        _ => Err(format!(
            "unknown signal `{s}` (heavisine, runge, texture, tree)"
        )),
    }
}

fn kind(s: &str) -> Result<ExperimentKind, String> {
    s.parse().map_err(|e: wavl1::Error| e.to_string())
}

fn step_rule(s: &str) -> Result<StepRule, String> {
    match s {
        "fixed" => Ok(StepRule::Fixed),
        "backtracking" => Ok(StepRule::Backtracking),
        _ => Err(format!("unknown step rule `{s}` (fixed, backtracking)")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Directory for outputs and the run manifest [default: wavl1-out]
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// haar, db2, db3 or coif
    #[arg(long, value_parser = wavelet)]
    pub wavelet: Option<Wavelet>,
    /// Decomposition depth (full depth when omitted)
    #[arg(long)]
    pub depth: Option<u32>,
    /// Fraction of samples kept, in (0, 1]
    #[arg(long, value_parser = fraction, conflicts_with = "m")]
    pub fraction: Option<f64>,
    /// Number of samples kept
    #[arg(long)]
    pub m: Option<usize>,
    /// Add Gaussian noise calibrated to this PSNR (dB)
    #[arg(long, value_parser = positive, conflicts_with = "noise_sigma")]
    pub noise_psnr: Option<f64>,
    /// Add Gaussian noise with this standard deviation
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// `sweep`, `rel:<factor>` (fraction of the zero-solution threshold) or an absolute value
    #[arg(long, value_parser = lambda)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
    /// fixed or backtracking
    #[arg(long, value_parser = step_rule)]
    pub step_rule: Option<StepRule>,
    /// Solves per reweighting run (irw, wrw)
    #[arg(long)]
    pub rw_outer_iters: Option<usize>,
    /// Flat JSON settings, or a manifest from an earlier run; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Common {
    fn settings(&self) -> Settings {
        Settings {
            output_dir: self.output_dir.clone(),
            wavelet: self.wavelet,
            depth: self.depth,
            fraction: self.fraction,
            m: self.m,
            noise_psnr: self.noise_psnr,
            noise_sigma: self.noise_sigma,
            lambda: self.lambda.clone(),
            seed: self.seed,
            max_iters: self.max_iters,
            tol: self.tol,
            step_rule: self.step_rule,
            rw_outer_iters: self.rw_outer_iters,
            ..Settings::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// CSV signal (header row, `value` or last column) or PGM/PPM image
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// none, norm, alpha:<v>, irw[:<eps>] or wrw [default: norm]
    #[arg(long, value_parser = scheme)]
    pub weights: Option<String>,
    /// Built-in signal when no input is given: heavisine, runge, texture or tree
    #[arg(long, value_parser = signal)]
    pub signal: Option<SignalSource>,
    /// Length (or image side) of the built-in signal
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_parser = scheme)]
    pub weights: Option<String>,
    /// Grid length, a power of two [default: 512]
    #[arg(long)]
    pub n: Option<usize>,
    /// Tree size, counting the scaling root [default: 90]
    #[arg(long)]
    pub s: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct FrameletArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// none or norm
    #[arg(long, value_parser = scheme)]
    pub weights: Option<String>,
    #[arg(long, value_parser = signal)]
    pub signal: Option<SignalSource>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Patch length, a power of two [default: 8]
    #[arg(long)]
    pub patch_len: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct TreeArgs {
    /// Number of levels J
    #[arg(long = "J")]
    pub levels: Option<u32>,
    /// Dimension d
    #[arg(long = "d")]
    pub dim: Option<usize>,
    /// Largest tree size
    #[arg(long)]
    pub s_max: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// synth_tree, inpaint_1d, denoise_1d, inpaint_2d, denoise_2d, mmv_inpaint or framelet_inpaint
    #[arg(long, value_parser = kind)]
    pub kind: Option<ExperimentKind>,
    /// Comma-separated weight schemes [default: none,norm]
    #[arg(long, value_parser = schemes)]
    pub schemes: Option<String>,
    /// Number of trials; trial t uses seed + t [default: 1]
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_parser = signal)]
    pub signal: Option<SignalSource>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    /// Measurement columns for mmv_inpaint
    #[arg(long)]
    pub bands: Option<usize>,
    #[arg(long)]
    pub patch_len: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

impl RunArgs {
    pub fn settings(&self) -> Settings {
        Settings {
            input: self.input.clone(),
            weights: self.weights.clone(),
            signal: self.signal,
            n: self.n,
            ..self.common.settings()
        }
    }
}

impl SynthArgs {
    pub fn settings(&self) -> Settings {
        Settings {
            weights: self.weights.clone(),
            n: self.n,
            s: self.s,
            ..self.common.settings()
        }
    }
}

impl FrameletArgs {
    pub fn settings(&self) -> Settings {
        Settings {
            input: self.input.clone(),
            weights: self.weights.clone(),
            signal: self.signal,
            n: self.n,
            patch_len: self.patch_len,
            ..self.common.settings()
        }
    }
}

impl TreeArgs {
    pub fn settings(&self) -> Settings {
        Settings {
            levels: self.levels,
            dim: self.dim,
            s_max: self.s_max,
            output_dir: self.output_dir.clone(),
            ..Settings::default()
        }
    }
}

impl CompareArgs {
    pub fn settings(&self) -> Settings {
        Settings {
            kind: self.kind,
            schemes: self.schemes.clone(),
            trials: self.trials,
            signal: self.signal,
            n: self.n,
            s: self.s,
            bands: self.bands,
            patch_len: self.patch_len,
            ..self.common.settings()
        }
    }
}
