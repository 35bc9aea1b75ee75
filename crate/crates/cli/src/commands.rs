use std::path::{Path, PathBuf};

use wavl1::dwt::IndexKind;
use wavl1::harness::{
    compare_trials, estimate_noise_sigma, Experiment, ExperimentKind, ExperimentParams,
    LambdaChoice, NoiseLevel, RecoveryMode, Reference, SampleSize, SchemeOutcome, SignalSource,
    Trial,
};
use wavl1::solver::Lambda;
use wavl1::tree::verify_inequalities;
use wavl1::weights::{parse_scheme_list, static_weights, WeightScheme};

use crate::args::Command;
use crate::error::{CliError, Result};
use crate::image::Image;
use crate::settings::{lambda_string, RunManifest, Settings};
use crate::table::{num, opt_num, read_signal, signal_table, Table};

const DEFAULT_OUTPUT_DIR: &str = "wavl1-out";

/// Stdout that tolerates a closed pipe.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

pub fn dispatch(cmd: Command) -> Result<()> {
    let name = cmd.name();
    let (flags, config_path) = match &cmd {
        Command::Inpaint(a) | Command::Denoise(a) => (a.settings(), a.common.config.clone()),
        Command::Synth(a) => (a.settings(), a.common.config.clone()),
        Command::FrameletInpaint(a) => (a.settings(), a.common.config.clone()),
        Command::TreeStats(a) => (a.settings(), a.config.clone()),
        Command::Compare(a) => (a.settings(), a.common.config.clone()),
    };
    let config = match &config_path {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let st = Settings::resolve_layers(config, flags);
    let ctx = Context {
        command: name,
        config_path: config_path.as_deref(),
        dir: st
            .output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
    };
    match cmd {
        Command::Inpaint(_) => run_recovery(&ctx, Task::Inpaint, st),
        Command::Denoise(_) => run_recovery(&ctx, Task::Denoise, st),
        Command::Synth(_) => run_recovery(&ctx, Task::Synth, st),
        Command::FrameletInpaint(_) => run_recovery(&ctx, Task::Framelet, st),
        Command::TreeStats(_) => tree_stats(&ctx, st),
        Command::Compare(_) => compare(&ctx, st),
    }
}

struct Context<'a> {
    command: &'static str,
    config_path: Option<&'a Path>,
    dir: PathBuf,
}

impl Context<'_> {
    fn prepare_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))
    }

    fn finish(&self, resolved: Settings, files: &[String]) -> Result<()> {
        let resolved = Settings {
            output_dir: Some(self.dir.clone()),
            ..resolved
        };
        RunManifest::write(self.command, self.config_path, &resolved, &self.dir, files)?;
        say!(
            "wrote {} and manifest.json to {}",
            files.join(", "),
            self.dir.display()
        );
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Task {
    Inpaint,
    Denoise,
    Synth,
    Framelet,
}

enum Input {
    Signal(Vec<f64>),
    Image(Image),
}

fn load_input(path: &Path) -> Result<Input> {
    let head = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    if head.starts_with(b"P5") || head.starts_with(b"P6") {
        let img = Image::read(path)?;
        Ok(Input::Image(match img.dyadic_crop() {
            Some(c) => {
                eprintln!(
                    "warning: {}x{} image center-cropped to {}x{}",
                    img.width, img.height, c.width, c.height
                );
                c
            }
            None => img,
        }))
    } else {
        Ok(Input::Signal(read_signal(path)?))
    }
}

fn kind_for(task: Task, dim: usize) -> Result<ExperimentKind> {
    Ok(match (task, dim) {
        (Task::Inpaint, 1) => ExperimentKind::Inpaint1d,
        (Task::Inpaint, _) => ExperimentKind::Inpaint2d,
        (Task::Denoise, 1) => ExperimentKind::Denoise1d,
        (Task::Denoise, _) => ExperimentKind::Denoise2d,
        (Task::Synth, _) => ExperimentKind::SynthTree,
        (Task::Framelet, 1) => ExperimentKind::FrameletInpaint,
        (Task::Framelet, _) => {
            return Err(CliError::Usage(
                "framelet-inpaint handles 1D signals only".into(),
            ))
        }
    })
}

fn samples(st: &Settings) -> Option<SampleSize> {
    st.m.map(SampleSize::Count)
        .or(st.fraction.map(SampleSize::Fraction))
}

fn noise(st: &Settings) -> Option<NoiseLevel> {
    st.noise_sigma
        .map(NoiseLevel::Sigma)
        .or(st.noise_psnr.map(NoiseLevel::Psnr))
}

/// Settings shared by every experiment-backed command.
fn apply_common(p: &mut ExperimentParams, st: &Settings) -> Result<()> {
    if let Some(w) = st.wavelet {
        p.wavelet = w;
    }
    if st.depth.is_some() {
        p.depth = st.depth;
    }
    if let Some(s) = samples(st) {
        p.samples = s;
    }
    if let Some(l) = noise(st) {
        p.noise = Some(l);
    }
    if let Some(l) = st.lambda_choice()? {
        p.lambda = l;
    }
    if let Some(v) = st.max_iters {
        p.solver.max_iters = v;
    }
    if let Some(v) = st.tol {
        p.solver.tol = v;
    }
    if let Some(v) = st.step_rule {
        p.solver.step_rule = v;
    }
    if let Some(v) = st.rw_outer_iters {
        p.solver.rw_outer_iters = v;
    }
    if let Some(v) = st.s {
        p.s = v;
    }
    if let Some(v) = st.patch_len {
        p.patch_len = v;
    }
    Ok(())
}

/// The parameters a rerun needs, echoed from the final experiment.
fn echo(st: &Settings, p: &ExperimentParams, seed: u64) -> Settings {
    let (fraction, m) = match p.samples {
        SampleSize::Fraction(f) => (Some(f), None),
        SampleSize::Count(c) => (None, Some(c)),
    };
    let (noise_psnr, noise_sigma) = match p.noise {
        Some(NoiseLevel::Psnr(v)) => (Some(v), None),
        Some(NoiseLevel::Sigma(v)) => (None, Some(v)),
        None => (None, None),
    };
    Settings {
        input: st.input.clone(),
        wavelet: Some(p.wavelet),
        depth: p.depth,
        fraction,
        m,
        noise_psnr,
        noise_sigma,
        lambda: Some(lambda_string(&p.lambda)),
        seed: Some(seed),
        max_iters: Some(p.solver.max_iters),
        tol: Some(p.solver.tol),
        step_rule: Some(p.solver.step_rule),
        rw_outer_iters: Some(p.solver.rw_outer_iters),
        ..Settings::default()
    }
}

fn metrics_table(outcomes: &[SchemeOutcome]) -> Table {
    let mut t = Table::new([
        "scheme",
        "mode",
        "lambda_factor",
        "lambda",
        "iterations",
        "rmse",
        "psnr",
        "perfect",
        "peak",
        "coef_error_l2",
        "support_overlap",
    ]);
    for o in outcomes {
        let factor = match o.lambda_rule {
            Some(Lambda::Relative(f)) => Some(f),
            _ => None,
        };
        let m = &o.metrics;
        t.push(vec![
            o.label(),
            o.mode.to_string(),
            opt_num(factor),
            opt_num(o.lambdas.first().copied()),
            o.iterations.to_string(),
            num(m.rmse),
            num(m.psnr),
            m.perfect.to_string(),
            num(m.peak),
            opt_num(m.coef_error_l2),
            opt_num(m.support_overlap),
        ]);
    }
    t
}

fn band_names(k: usize) -> Vec<String> {
    if k == 1 {
        vec!["value".into()]
    } else {
        (0..k).map(|b| format!("band{b}")).collect()
    }
}

/// Writes concatenated band grids as CSV (1D) or PGM/PPM (2D) and returns
/// the file name.
fn write_grids(dir: &Path, stem: &str, trial: &Trial, flat: &[f64], maxval: u8) -> Result<String> {
    let k = trial.reference.columns.len();
    let name = if trial.layout.dim() == 1 {
        let name = format!("{stem}.csv");
        signal_table(&band_names(k), flat).write(&dir.join(&name))?;
        name
    } else {
        let name = format!("{stem}.{}", if k == 1 { "pgm" } else { "ppm" });
        Image::from_bands(trial.layout.side(), flat, k, maxval)?.write(&dir.join(&name))?;
        name
    };
    Ok(name)
}

fn run_recovery(ctx: &Context, task: Task, st: Settings) -> Result<()> {
    let seed = st.seed.unwrap_or(1);
    let input = st.input.as_deref().map(load_input).transpose()?;
    if task == Task::Synth && input.is_some() {
        return Err(CliError::Usage(
            "synth generates its own signal; --input is not accepted".into(),
        ));
    }
    let dim = match (&input, st.signal) {
        (Some(Input::Image(_)), _) | (None, Some(SignalSource::Texture)) => 2,
        _ => 1,
    };
    let kind = kind_for(task, dim)?;
    let mut p = ExperimentParams::defaults_for(kind);
    // inputs are clean unless noise is requested; denoising an input
    // without --noise-* treats the input itself as the observation
    if input.is_some() {
        p.noise = None;
    }
    apply_common(&mut p, &st)?;
    if let Some(sig) = st.signal {
        if input.is_some() {
            return Err(CliError::Usage(
                "--signal and --input are mutually exclusive".into(),
            ));
        }
        p.signal = sig;
    }
    if let Some(n) = st.n {
        if input.is_some() {
            return Err(CliError::Usage("--n is taken from the input".into()));
        }
        p.n = n;
    }
    let observed = task == Task::Denoise && input.is_some() && p.noise.is_none();
    if observed {
        match p.lambda {
            LambdaChoice::Sweep(_) if st.lambda.is_some() => {
                return Err(CliError::Usage(
                    "--lambda sweep needs a clean reference; pass --noise-psnr or --noise-sigma to add noise to the input"
                        .into(),
                ))
            }
            LambdaChoice::Sweep(_) | LambdaChoice::Given(_) => {}
        }
    }
    let scheme: WeightScheme = st.weights.as_deref().unwrap_or("norm").parse()?;

    let mut maxval = 255;
    let reference = match input {
        Some(Input::Signal(v)) => Reference::signal(v),
        Some(Input::Image(img)) => {
            maxval = img.maxval;
            Reference::image(img.bands())
        }
        None => Reference::for_experiment(&Experiment::with_params(kind, seed, p.clone()))?,
    };
    let exp = Experiment::with_params(kind, seed, p);
    let mut trial = Trial::with_reference(&exp, reference)?;
    if observed && st.lambda.is_none() {
        let lambda = observed_lambda(&trial, scheme)?;
        trial.experiment.params.lambda = LambdaChoice::Given(Lambda::Fixed(lambda));
    }
    let mode = if task == Task::Framelet {
        RecoveryMode::Framelet
    } else {
        trial.modes()[0]
    };
    let mut outcomes = vec![trial.run_scheme(scheme, mode)?];
    if task == Task::Denoise {
        outcomes.extend(trial.baselines()?);
    }

    ctx.prepare_dir()?;
    let stem = if task == Task::Denoise {
        "denoised"
    } else {
        "recon"
    };
    let mut files = vec![write_grids(
        &ctx.dir,
        stem,
        &trial,
        &outcomes[0].reconstruction,
        maxval,
    )?];
    if let Some(noisy) = &trial.noisy {
        files.push(write_grids(
            &ctx.dir,
            "noisy",
            &trial,
            &noisy.concat(),
            maxval,
        )?);
    }
    if st.input.is_none() {
        files.push(write_grids(
            &ctx.dir,
            "reference",
            &trial,
            &trial.reference.columns.concat(),
            maxval,
        )?);
    }
    if let Some(truth) = &trial.reference.coeffs {
        files.push(write_coeffs(
            &ctx.dir,
            &trial,
            truth.values(),
            &outcomes[0].coeffs,
        )?);
    }
    let metrics = metrics_table(&outcomes);
    metrics.write(&ctx.dir.join("metrics.csv"))?;
    files.push("metrics.csv".into());
    for o in &outcomes {
        say!(
            "{:<16} {:<15} rmse {:.6e}  psnr {:.4} dB",
            o.label(),
            o.mode.name(),
            o.metrics.rmse,
            o.metrics.psnr
        );
    }

    let p = &trial.experiment.params;
    let mut resolved = echo(&st, p, seed);
    resolved.weights = Some(scheme.to_string());
    if st.input.is_none() {
        resolved.signal = Some(p.signal);
        resolved.n = Some(p.n);
    }
    if p.signal == SignalSource::Tree && st.input.is_none() {
        resolved.s = Some(p.s);
    }
    if task == Task::Framelet {
        resolved.patch_len = Some(p.patch_len);
    }
    ctx.finish(resolved, &files)
}

/// λ for denoising an input with no clean reference: the weighted
/// soft threshold `λω_νm/2` of the finest level equals the universal
/// threshold `σ̂√(2 ln N)`, with `σ̂` estimated from the finest details
/// (scaled by `√k` for `k` bands, whose row norms are thresholded).
fn observed_lambda(trial: &Trial, scheme: WeightScheme) -> Result<f64> {
    let layout = trial.layout;
    let bands = trial.reference.columns.len();
    let mut sq = 0.0;
    for col in &trial.reference.columns {
        sq += estimate_noise_sigma(col, &trial.family, layout)?.powi(2);
    }
    let sigma = (sq / bands as f64).sqrt() * (bands as f64).sqrt();
    let base = if scheme.is_iterative() {
        WeightScheme::UniformNorm
    } else {
        scheme
    };
    let w_max = static_weights(base, layout)?
        .values()
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let m = trial.measurements.sample_count() as f64;
    let lambda = 2.0 * sigma * (2.0 * (layout.len() as f64).ln()).sqrt() / (m * w_max);
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CliError::Data(
            "the input has no measurable noise; pass --lambda".into(),
        ));
    }
    Ok(lambda)
}

fn write_coeffs(dir: &Path, trial: &Trial, truth: &[f64], recovered: &[f64]) -> Result<String> {
    let mut t = Table::new(["index", "kind", "level", "truth", "recovered"]);
    for (i, (a, b)) in truth.iter().zip(recovered).enumerate() {
        let (kind, level) = trial.layout.level_of(i % trial.layout.len());
        let kind = match kind {
            IndexKind::Scaling => "scaling",
            IndexKind::Wavelet => "wavelet",
        };
        t.push(vec![
            i.to_string(),
            kind.into(),
            level.to_string(),
            num(*a),
            num(*b),
        ]);
    }
    t.write(&dir.join("coeffs.csv"))?;
    Ok("coeffs.csv".into())
}

fn tree_stats(ctx: &Context, st: Settings) -> Result<()> {
    let levels = st.levels.unwrap_or(5);
    let dim = st.dim.unwrap_or(1);
    let s_max = st.s_max.unwrap_or(8);
    if levels == 0 || s_max < 2 {
        return Err(CliError::Usage(
            "--J must be at least 1 and --s-max at least 2".into(),
        ));
    }
    let report = verify_inequalities(levels, dim, s_max)?;
    let mut t = Table::new([
        "s",
        "k_tree",
        "theta_sq_s",
        "ratio",
        "ratio_bound",
        "theta_ok",
        "triple_ok",
        "ratio_ok",
    ]);
    for r in &report.rows {
        t.push(vec![
            r.s.to_string(),
            num(r.k_tree),
            num(r.theta_sq_s),
            num(r.ratio),
            num(r.ratio_bound),
            r.theta_ok.to_string(),
            r.triple_ok.map(|b| b.to_string()).unwrap_or_default(),
            r.ratio_ok.to_string(),
        ]);
    }
    ctx.prepare_dir()?;
    t.write(&ctx.dir.join("tree_stats.csv"))?;
    match report.chain_identity_ok {
        Some(ok) => say!("K_T(J+1) = 2^J: {ok}"),
        None => say!("K_T(J+1) = 2^J: J+1 beyond --s-max"),
    }
    say!("all checks pass: {}", report.all_pass());
    let resolved = Settings {
        levels: Some(levels),
        dim: Some(dim),
        s_max: Some(s_max),
        ..Settings::default()
    };
    ctx.finish(resolved, &["tree_stats.csv".into()])
}

fn compare(ctx: &Context, st: Settings) -> Result<()> {
    let kind = st
        .kind
        .ok_or_else(|| CliError::Usage("compare needs --kind".into()))?;
    if kind == ExperimentKind::TreeStats {
        return Err(CliError::Usage(
            "use the tree-stats subcommand for tree_stats".into(),
        ));
    }
    if st.input.is_some() {
        return Err(CliError::Usage(
            "compare runs built-in experiments only".into(),
        ));
    }
    let seed = st.seed.unwrap_or(1);
    let trials = st.trials.unwrap_or(1);
    let scheme_text = st.schemes.clone().unwrap_or_else(|| "none,norm".into());
    let schemes = parse_scheme_list(&scheme_text)?;
    if schemes.is_empty() {
        return Err(CliError::Usage("empty scheme list".into()));
    }
    let mut p = ExperimentParams::defaults_for(kind);
    apply_common(&mut p, &st)?;
    if let Some(v) = st.signal {
        p.signal = v;
    }
    if let Some(v) = st.n {
        p.n = v;
    }
    if let Some(v) = st.bands {
        p.bands = v;
    }
    let exp = Experiment::with_params(kind, seed, p);
    let rows = compare_trials(&exp, &schemes, trials)?;

    let mut t = Table::new([
        "seed",
        "scheme",
        "mode",
        "lambda_factor",
        "lambda",
        "rmse",
        "psnr",
        "perfect",
        "peak",
        "coef_error_l2",
        "support_overlap",
    ]);
    for r in &rows {
        let m = &r.metrics;
        t.push(vec![
            r.seed.to_string(),
            r.scheme.clone(),
            r.mode.to_string(),
            opt_num(r.lambda_factor),
            opt_num(r.lambda),
            num(m.rmse),
            num(m.psnr),
            m.perfect.to_string(),
            num(m.peak),
            opt_num(m.coef_error_l2),
            opt_num(m.support_overlap),
        ]);
    }
    ctx.prepare_dir()?;
    t.write(&ctx.dir.join("compare.csv"))?;

    // mean per scheme and mode, in table order
    let mut keys: Vec<(String, RecoveryMode)> = Vec::new();
    for r in &rows {
        if !keys.iter().any(|(s, m)| *s == r.scheme && *m == r.mode) {
            keys.push((r.scheme.clone(), r.mode));
        }
    }
    for (scheme, mode) in keys {
        let sel: Vec<_> = rows
            .iter()
            .filter(|r| r.scheme == scheme && r.mode == mode)
            .collect();
        let mean = |f: &dyn Fn(&wavl1::harness::ComparisonRow) -> f64| {
            sel.iter().map(|r| f(r)).sum::<f64>() / sel.len() as f64
        };
        let rmse = mean(&|r| r.metrics.rmse);
        let line = match sel[0].metrics.coef_error_l2 {
            Some(_) => format!(
                "coef error {:.6e}",
                mean(&|r| r.metrics.coef_error_l2.unwrap_or(f64::NAN))
            ),
            None => format!("psnr {:.4} dB", mean(&|r| r.metrics.psnr)),
        };
        say!(
            "{scheme:<16} {:<15} mean rmse {rmse:.6e}  mean {line}",
            mode.name()
        );
    }

    let mut resolved = echo(&st, &exp.params, seed);
    resolved.kind = Some(kind);
    resolved.schemes = Some(scheme_text);
    resolved.trials = Some(trials);
    resolved.signal = Some(exp.params.signal);
    resolved.n = Some(exp.params.n);
    resolved.s = Some(exp.params.s);
    resolved.bands = Some(exp.params.bands);
    resolved.patch_len = Some(exp.params.patch_len);
    ctx.finish(resolved, &["compare.csv".into()])
}
