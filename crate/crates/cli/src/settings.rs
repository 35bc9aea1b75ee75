//! Run settings: flags layered over a flat JSON config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use wavl1::dwt::Wavelet;
use wavl1::harness::{ExperimentKind, LambdaChoice, SignalSource, DEFAULT_LAMBDA_GRID};
use wavl1::solver::{Lambda, StepRule};

use crate::error::{CliError, Result};

macro_rules! settings {
    ($($(#[$doc:meta])* $field:ident: $ty:ty,)*) => {
        /// Every knob of every subcommand. Unset fields fall back to the
        /// config file, then to the experiment defaults.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct Settings {
            $($(#[$doc])* pub $field: Option<$ty>,)*
        }

        impl Settings {
            /// `top` wins field by field.
            pub fn overlay(self, top: Settings) -> Settings {
                Settings { $($field: top.$field.or(self.$field),)* }
            }
        }
    };
}

settings! {
    input: PathBuf,
    output_dir: PathBuf,
    wavelet: Wavelet,
    weights: String,
    /// `sweep`, `rel:<factor>` or an absolute value.
    lambda: String,
    fraction: f64,
    m: usize,
    noise_psnr: f64,
    noise_sigma: f64,
    seed: u64,
    depth: u32,
    signal: SignalSource,
    n: usize,
    s: usize,
    bands: usize,
    patch_len: usize,
    max_iters: usize,
    tol: f64,
    step_rule: StepRule,
    rw_outer_iters: usize,
    kind: ExperimentKind,
    schemes: String,
    trials: usize,
    levels: u32,
    dim: usize,
    s_max: usize,
}

impl Settings {
    /// Layers flags over a config, dropping config fields that an
    /// alternative flag replaces.
    pub fn resolve_layers(config: Settings, flags: Settings) -> Settings {
        let mut base = config;
        if flags.fraction.is_some() || flags.m.is_some() {
            base.fraction = None;
            base.m = None;
        }
        if flags.noise_psnr.is_some() || flags.noise_sigma.is_some() {
            base.noise_psnr = None;
            base.noise_sigma = None;
        }
        base.overlay(flags)
    }

    /// A flat settings object, or the `resolved_params` of a manifest.
    pub fn load(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: invalid JSON: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("resolved_params") {
            value = inner.take();
        }
        serde_json::from_value(value)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("settings serialize");
        if let Some(map) = v.as_object_mut() {
            map.retain(|_, x| !x.is_null());
        }
        v
    }

    pub fn lambda_choice(&self) -> Result<Option<LambdaChoice>> {
        self.lambda.as_deref().map(parse_lambda).transpose()
    }
}

pub fn parse_lambda(s: &str) -> Result<LambdaChoice> {
    let s = s.trim();
    let bad = || {
        CliError::Usage(format!(
            "bad --lambda `{s}`: expected `sweep`, `rel:<factor>` or a positive number"
        ))
    };
    let positive = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0 && v.is_finite())
            .ok_or_else(bad)
    };
    if s == "sweep" {
        Ok(LambdaChoice::Sweep(DEFAULT_LAMBDA_GRID.to_vec()))
    } else if let Some(f) = s.strip_prefix("rel:") {
        Ok(LambdaChoice::Given(Lambda::Relative(positive(f)?)))
    } else {
        Ok(LambdaChoice::Given(Lambda::Fixed(positive(s)?)))
    }
}

pub fn lambda_string(choice: &LambdaChoice) -> String {
    match choice {
        LambdaChoice::Sweep(_) => "sweep".into(),
        LambdaChoice::Given(Lambda::Relative(f)) => format!("rel:{f}"),
        LambdaChoice::Given(Lambda::Fixed(v)) => v.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub resolved_params: serde_json::Value,
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    pub artifacts: Vec<Artifact>,
}

impl RunManifest {
    /// Hashes each artifact in `dir` and writes `manifest.json` next to them.
    pub fn write(
        command: &str,
        config_path: Option<&Path>,
        resolved: &Settings,
        dir: &Path,
        names: &[String],
    ) -> Result<RunManifest> {
        let artifacts = names
            .iter()
            .map(|name| {
                let path = dir.join(name);
                let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
                Ok(Artifact {
                    name: name.clone(),
                    sha256: hex::encode(Sha256::digest(&bytes)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let manifest = RunManifest {
            command: command.to_string(),
            config_path: config_path.map(Path::to_path_buf),
            resolved_params: resolved.to_json(),
            seed: resolved.seed,
            output_dir: dir.to_path_buf(),
            artifacts,
        };
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}
