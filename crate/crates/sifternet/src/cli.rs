//! Batch front end: configuration resolution (flags over config file over
//! defaults) and the five subcommand implementations. The binary in
//! `main.rs` only parses arguments and dispatches here, so every command is
//! directly callable from tests.
//!
//! Exit statuses: 0 success, 2 configuration error, 3 data error, 4 partial
//! failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attacks::{Corner, PatchTrigger, TriggerKind, TriggerSpec};
use crate::binarize::BinarizeMode;
use crate::eval::{
    evaluate_with_jobs, poison_dataset, sweep_iterations, write_items_csv, write_sweep_csv,
    CentroidClassifier,
};
use crate::hopfield::capacity::{analyze_capacity, theoretical_capacity};
use crate::hopfield::ising::IsingLattice;
use crate::imageio::{self, ImageFormat};
use crate::purifier::io::{load_purifier, save_purifier};
use crate::purifier::{train_purifier, PurifierConfig, ScrambleMode, TrainedPurifier};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("partial failure: {0}")]
    Partial(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Partial(_) => 4,
        }
    }
}

fn config_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

fn data_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Data(msg.to_string())
}

// ---------------------------------------------------------------------------
// Configuration file schema (all fields optional; defaults fill the gaps)
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    verbosity: Option<u8>,
    #[serde(default)]
    purifier: FilePurifier,
    #[serde(default)]
    trigger: FileTrigger,
    #[serde(default)]
    data: FileData,
    #[serde(default)]
    eval: FileEval,
    #[serde(default)]
    capacity: FileCapacity,
    #[serde(default)]
    ising: FileIsing,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePurifier {
    binarize: Option<String>,
    threshold: Option<u8>,
    k_size: Option<usize>,
    remove_time: Option<usize>,
    seeds_per_class: Option<usize>,
    scramble: Option<bool>,
    scramble_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTrigger {
    kind: Option<String>,
    patch_width: Option<usize>,
    patch_height: Option<usize>,
    patch_value: Option<u8>,
    anchor: Option<String>,
    overlay: Option<PathBuf>,
    alpha: Option<f64>,
    target_label: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileData {
    seed_manifest: Option<PathBuf>,
    train_manifest: Option<PathBuf>,
    test_manifest: Option<PathBuf>,
    purifier_path: Option<PathBuf>,
    ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEval {
    backdoor_gain: Option<f64>,
    sweep_remove_times: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCapacity {
    n: Option<Vec<usize>>,
    p: Option<Vec<usize>>,
    trials: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileIsing {
    width: Option<usize>,
    height: Option<usize>,
    coupling: Option<f64>,
    field: Option<f64>,
    temperature: Option<f64>,
    steps: Option<usize>,
    sample_every: Option<usize>,
}

/// Flag-level overrides; `None` means the flag was not given.
#[derive(Debug, Default, Clone)]
pub struct CliOverrides {
    pub seed: Option<u64>,
    pub remove_time: Option<usize>,
    pub k_size: Option<usize>,
    pub binarize: Option<String>,
    pub threshold: Option<u8>,
    pub seeds_per_class: Option<usize>,
    pub trigger: Option<String>,
    pub alpha: Option<f64>,
    pub ratio: Option<f64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

// ---------------------------------------------------------------------------
// Resolved configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct TriggerSettings {
    pub kind: String,
    pub patch_width: usize,
    pub patch_height: usize,
    pub patch_value: u8,
    pub anchor: String,
    pub overlay: Option<PathBuf>,
    pub alpha: f64,
    pub target_label: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PurifierSettings {
    pub binarize: String,
    pub threshold: u8,
    pub k_size: usize,
    pub remove_time: usize,
    pub seeds_per_class: usize,
    pub scramble: bool,
    pub scramble_seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DataSettings {
    pub seed_manifest: Option<PathBuf>,
    pub train_manifest: Option<PathBuf>,
    pub test_manifest: Option<PathBuf>,
    pub purifier_path: Option<PathBuf>,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalSettings {
    pub backdoor_gain: f64,
    pub sweep_remove_times: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsingSettings {
    pub width: usize,
    pub height: usize,
    pub coupling: f64,
    pub field: f64,
    pub temperature: f64,
    pub steps: usize,
    pub sample_every: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacitySettings {
    pub n: Vec<usize>,
    pub p: Vec<usize>,
    pub trials: usize,
}

/// Fully resolved run configuration; every field has a value before a
/// subcommand executes.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
    pub verbosity: u8,
    pub purifier: PurifierSettings,
    pub trigger: TriggerSettings,
    pub data: DataSettings,
    pub eval: EvalSettings,
    pub capacity: CapacitySettings,
    pub ising: IsingSettings,
}

impl RunConfig {
    /// Resolution order: flags over config file over defaults.
    pub fn resolve(
        config_path: Option<&Path>,
        overrides: &CliOverrides,
    ) -> Result<RunConfig, CliError> {
        let file: FileConfig = match config_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };

        let binarize = overrides
            .binarize
            .clone()
            .or(file.purifier.binarize)
            .unwrap_or_else(|| "global".to_string());
        if binarize != "global" && binarize != "localdiff" {
            return Err(config_err(format!(
                "binarize must be `global` or `localdiff`, got `{binarize}`"
            )));
        }
        let trigger_kind = overrides
            .trigger
            .clone()
            .or(file.trigger.kind)
            .unwrap_or_else(|| "patch".to_string());
        if trigger_kind != "patch" && trigger_kind != "blend" {
            return Err(config_err(format!(
                "trigger must be `patch` or `blend`, got `{trigger_kind}`"
            )));
        }
        let anchor = file
            .trigger
            .anchor
            .unwrap_or_else(|| "bottom-right".to_string());
        parse_anchor(&anchor)?;

        let config = RunConfig {
            seed: overrides.seed.or(file.seed).unwrap_or(0),
            out: overrides
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            jobs: overrides.jobs.or(file.jobs).unwrap_or(1).max(1),
            verbosity: file.verbosity.unwrap_or(0),
            purifier: PurifierSettings {
                binarize,
                threshold: overrides
                    .threshold
                    .or(file.purifier.threshold)
                    .unwrap_or(127),
                k_size: overrides.k_size.or(file.purifier.k_size).unwrap_or(21),
                remove_time: overrides
                    .remove_time
                    .or(file.purifier.remove_time)
                    .unwrap_or(200),
                seeds_per_class: overrides
                    .seeds_per_class
                    .or(file.purifier.seeds_per_class)
                    .unwrap_or(3),
                scramble: file.purifier.scramble.unwrap_or(false),
                scramble_seed: file.purifier.scramble_seed.unwrap_or(0),
            },
            trigger: TriggerSettings {
                kind: trigger_kind,
                patch_width: file.trigger.patch_width.unwrap_or(3),
                patch_height: file.trigger.patch_height.unwrap_or(3),
                patch_value: file.trigger.patch_value.unwrap_or(255),
                anchor,
                overlay: file.trigger.overlay,
                alpha: overrides.alpha.or(file.trigger.alpha).unwrap_or(0.065),
                target_label: file.trigger.target_label.unwrap_or(0),
            },
            data: DataSettings {
                seed_manifest: file.data.seed_manifest,
                train_manifest: file.data.train_manifest,
                test_manifest: file.data.test_manifest,
                purifier_path: file.data.purifier_path,
                ratio: overrides.ratio.or(file.data.ratio).unwrap_or(0.1),
            },
            eval: EvalSettings {
                backdoor_gain: file.eval.backdoor_gain.unwrap_or(0.0),
                sweep_remove_times: file.eval.sweep_remove_times.unwrap_or_default(),
            },
            capacity: CapacitySettings {
                n: file.capacity.n.unwrap_or_else(|| vec![500]),
                p: file
                    .capacity
                    .p
                    .unwrap_or_else(|| vec![25, 50, 70, 100, 150]),
                trials: file.capacity.trials.unwrap_or(10),
            },
            ising: IsingSettings {
                width: file.ising.width.unwrap_or(32),
                height: file.ising.height.unwrap_or(32),
                coupling: file.ising.coupling.unwrap_or(1.0),
                field: file.ising.field.unwrap_or(1.0),
                temperature: file.ising.temperature.unwrap_or(0.0),
                steps: file.ising.steps.unwrap_or(100_000),
                sample_every: file.ising.sample_every.unwrap_or(1000).max(1),
            },
        };
        if !(0.0..=1.0).contains(&config.data.ratio) {
            return Err(config_err(format!(
                "ratio {} outside [0, 1]",
                config.data.ratio
            )));
        }
        if !(0.0..=1.0).contains(&config.trigger.alpha) {
            return Err(config_err(format!(
                "alpha {} outside [0, 1]",
                config.trigger.alpha
            )));
        }
        Ok(config)
    }

    /// The fully resolved configuration as canonical TOML, for
    /// reproducibility records.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("resolved config serializes")
    }

    pub fn purifier_config(&self) -> Result<PurifierConfig, CliError> {
        let binarize = match self.purifier.binarize.as_str() {
            "global" => BinarizeMode::Global {
                threshold: self.purifier.threshold,
            },
            "localdiff" => BinarizeMode::LocalDiff {
                k_size: self.purifier.k_size,
            },
            other => return Err(config_err(format!("unknown binarize mode `{other}`"))),
        };
        let config = PurifierConfig {
            binarize,
            remove_time: self.purifier.remove_time,
            seed: self.seed,
            seeds_per_class: self.purifier.seeds_per_class,
            scramble: if self.purifier.scramble {
                ScrambleMode::Permutation {
                    seed: self.purifier.scramble_seed,
                }
            } else {
                ScrambleMode::Off
            },
        };
        config.validate().map_err(config_err)?;
        Ok(config)
    }

    pub fn trigger_spec(&self) -> Result<TriggerSpec, CliError> {
        let kind = match self.trigger.kind.as_str() {
            "patch" => TriggerKind::Patch(PatchTrigger {
                width: self.trigger.patch_width,
                height: self.trigger.patch_height,
                value: self.trigger.patch_value,
                anchor: parse_anchor(&self.trigger.anchor)?,
            }),
            "blend" => {
                let overlay_path = self
                    .trigger
                    .overlay
                    .as_ref()
                    .ok_or_else(|| config_err("blend trigger needs trigger.overlay"))?;
                let overlay = imageio::read_image(overlay_path).map_err(data_err)?;
                TriggerKind::Blend {
                    overlay,
                    alpha: self.trigger.alpha,
                }
            }
            other => return Err(config_err(format!("unknown trigger kind `{other}`"))),
        };
        Ok(TriggerSpec {
            kind,
            target_label: self.trigger.target_label,
        })
    }

    fn purifier_path(&self) -> PathBuf {
        self.data
            .purifier_path
            .clone()
            .unwrap_or_else(|| self.out.join("purifier.sift"))
    }

    fn ensure_out(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| data_err(format!("{}: {e}", self.out.display())))
    }

    fn log(&self, msg: impl std::fmt::Display) {
        if self.verbosity > 0 {
            eprintln!("{msg}");
        }
    }
}

fn parse_anchor(s: &str) -> Result<Corner, CliError> {
    match s {
        "top-left" => Ok(Corner::TopLeft),
        "top-right" => Ok(Corner::TopRight),
        "bottom-left" => Ok(Corner::BottomLeft),
        "bottom-right" => Ok(Corner::BottomRight),
        other => Err(config_err(format!("unknown anchor `{other}`"))),
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct TrainSummary {
    pub purifier_path: PathBuf,
    pub channels: usize,
    pub patterns_per_channel: usize,
    pub per_class_counts: Vec<usize>,
    pub wall_secs: f64,
}

/// Trains a purifier from the seed manifest and writes the container plus a
/// training log.
pub fn cmd_train(config: &RunConfig) -> Result<TrainSummary, CliError> {
    let manifest = config
        .data
        .seed_manifest
        .as_ref()
        .ok_or_else(|| config_err("train needs data.seed_manifest"))?;
    config.ensure_out()?;
    let start = Instant::now();
    let dataset = imageio::load_dataset(manifest).map_err(data_err)?;
    let seeds = dataset.to_seed_dataset().map_err(data_err)?;
    let selected = seeds
        .select_seeds(config.purifier.seeds_per_class, config.seed)
        .map_err(data_err)?;
    let purifier_config = config.purifier_config()?;
    let purifier = train_purifier(&selected, &purifier_config).map_err(data_err)?;

    let path = config.purifier_path();
    save_purifier(&purifier, &path).map_err(data_err)?;

    let mut per_class_counts = vec![0usize; selected.class_count()];
    for (_, label) in selected.images() {
        per_class_counts[*label] += 1;
    }
    let summary = TrainSummary {
        purifier_path: path,
        channels: purifier.channels(),
        patterns_per_channel: selected.len(),
        per_class_counts,
        wall_secs: start.elapsed().as_secs_f64(),
    };
    let log_path = config.out.join("train_log.json");
    std::fs::write(
        &log_path,
        serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )
    .map_err(|e| data_err(format!("{}: {e}", log_path.display())))?;
    config.log(format!(
        "trained {} patterns per channel across {} channels",
        summary.patterns_per_channel, summary.channels
    ));
    Ok(summary)
}

#[derive(Debug, Serialize)]
pub struct PurifySummary {
    pub out_dir: PathBuf,
    pub purified: Vec<String>,
    pub skipped: Vec<(String, String)>,
}

fn load_purifier_for(config: &RunConfig) -> Result<TrainedPurifier, CliError> {
    let path = config.purifier_path();
    load_purifier(&path).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

/// Purifies one file or every image in a directory. Files whose shape does
/// not match the purifier are skipped, logged, and reported through a
/// partial-failure exit status.
pub fn cmd_purify(config: &RunConfig, input: &Path) -> Result<PurifySummary, CliError> {
    let purifier = load_purifier_for(config)?;
    config.ensure_out()?;
    let out_dir = config.out.join("purified");
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| data_err(format!("{}: {e}", out_dir.display())))?;

    let mut inputs: Vec<PathBuf> = if input.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(input)
            .map_err(|e| data_err(format!("{}: {e}", input.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| ImageFormat::from_path(p).is_some())
            .collect();
        files.sort();
        files
    } else {
        vec![input.to_path_buf()]
    };
    if inputs.is_empty() {
        return Err(data_err(format!(
            "no image files under {}",
            input.display()
        )));
    }
    inputs.dedup();

    // Read everything first; files that fail to decode or do not match the
    // purifier's shape are skipped. Ordinals index the sorted valid inputs.
    let mut valid: Vec<(String, crate::binarize::Image)> = Vec::new();
    let mut skipped: Vec<(String, String)> = Vec::new();
    for (idx, path) in inputs.iter().enumerate() {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("item_{idx}"));
        match imageio::read_image(path) {
            Ok(img)
                if img.width() == purifier.width()
                    && img.height() == purifier.height()
                    && img.channels() == purifier.channels() =>
            {
                valid.push((name, img));
            }
            Ok(img) => skipped.push((
                name,
                format!(
                    "shape {}x{}x{} does not match purifier {}x{}x{}",
                    img.width(),
                    img.height(),
                    img.channels(),
                    purifier.width(),
                    purifier.height(),
                    purifier.channels()
                ),
            )),
            Err(e) => skipped.push((name, e.to_string())),
        }
    }

    let images: Vec<crate::binarize::Image> = valid.iter().map(|(_, img)| img.clone()).collect();
    let outputs = purifier
        .purify_batch_jobs(&images, config.jobs)
        .map_err(data_err)?;

    let mut purified = Vec::new();
    for ((name, _), out) in valid.iter().zip(&outputs) {
        let format = ImageFormat::from_path(Path::new(name))
            .unwrap_or_else(|| ImageFormat::natural_for(out));
        match imageio::write_image(out, &out_dir.join(name), format) {
            Ok(()) => purified.push(name.clone()),
            Err(e) => skipped.push((name.clone(), e.to_string())),
        }
    }
    let mut manifest = String::from("path,status\n");
    for name in &purified {
        let _ = writeln!(manifest, "{name},ok");
    }
    for (name, reason) in &skipped {
        config.log(format!("skipped {name}: {reason}"));
        let _ = writeln!(manifest, "{name},skipped");
    }
    let manifest_path = out_dir.join("manifest.csv");
    std::fs::write(&manifest_path, manifest)
        .map_err(|e| data_err(format!("{}: {e}", manifest_path.display())))?;

    let summary = PurifySummary {
        out_dir,
        purified,
        skipped,
    };
    if !summary.skipped.is_empty() {
        return Err(CliError::Partial(format!(
            "{} of {} files skipped: {}",
            summary.skipped.len(),
            summary.skipped.len() + summary.purified.len(),
            summary
                .skipped
                .iter()
                .map(|(name, reason)| format!("{name} ({reason})"))
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    Ok(summary)
}

#[derive(Debug, Serialize)]
pub struct EvalOutputs {
    pub report_json: PathBuf,
    pub items_csv: PathBuf,
    pub sweep_csv: Option<PathBuf>,
    pub acc: f64,
    pub asr: f64,
}

/// Poisons the test set, purifies, classifies, and writes the report files.
pub fn cmd_eval(config: &RunConfig) -> Result<EvalOutputs, CliError> {
    let purifier = load_purifier_for(config)?;
    let test_manifest = config
        .data
        .test_manifest
        .as_ref()
        .ok_or_else(|| config_err("eval needs data.test_manifest"))?;
    let train_manifest = config
        .data
        .train_manifest
        .as_ref()
        .ok_or_else(|| config_err("eval needs data.train_manifest"))?;
    config.ensure_out()?;

    let clean_test = imageio::load_dataset(test_manifest).map_err(data_err)?;
    if clean_test.is_empty() {
        return Err(data_err("test dataset is empty"));
    }
    let train = imageio::load_dataset(train_manifest).map_err(data_err)?;
    let spec = config.trigger_spec()?;
    let poisoned_test =
        poison_dataset(&clean_test, &spec, config.data.ratio, config.seed).map_err(data_err)?;

    let purifier_config = config.purifier_config()?;
    let mut classifier =
        CentroidClassifier::fit(&train, purifier_config.binarize).map_err(data_err)?;
    if config.eval.backdoor_gain > 0.0 {
        let TriggerKind::Patch(patch) = &spec.kind else {
            return Err(config_err(
                "backdoor_gain requires a patch trigger".to_string(),
            ));
        };
        classifier = classifier
            .with_patch_backdoor(patch, spec.target_label, config.eval.backdoor_gain)
            .map_err(data_err)?;
    }

    let report = evaluate_with_jobs(
        &purifier,
        &classifier,
        &clean_test,
        &poisoned_test,
        config.jobs,
    )
    .map_err(data_err)?;
    let report_json = config.out.join("report.json");
    std::fs::write(
        &report_json,
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )
    .map_err(|e| data_err(format!("{}: {e}", report_json.display())))?;
    let items_csv = config.out.join("items.csv");
    write_items_csv(&report, &items_csv).map_err(data_err)?;

    let sweep_csv = if config.eval.sweep_remove_times.is_empty() {
        None
    } else {
        let rows = sweep_iterations(
            &purifier,
            &config.eval.sweep_remove_times,
            &classifier,
            &clean_test,
            &poisoned_test,
        )
        .map_err(data_err)?;
        let path = config.out.join("sweep.csv");
        write_sweep_csv(&rows, &path).map_err(data_err)?;
        Some(path)
    };

    config.log(format!("acc {:.4} asr {:.4}", report.acc, report.asr));
    Ok(EvalOutputs {
        report_json,
        items_csv,
        sweep_csv,
        acc: report.acc,
        asr: report.asr,
    })
}

/// Runs the stability experiment over the configured (n, P) grid and writes
/// one CSV row per setting.
pub fn cmd_capacity(config: &RunConfig) -> Result<PathBuf, CliError> {
    config.ensure_out()?;
    let mut csv = String::from(
        "n,p,alpha,mean_unstable_fraction,crosstalk_variance_empirical,\
         crosstalk_variance_predicted,union_bound_failure_prob,theoretical_capacity\n",
    );
    for &n in &config.capacity.n {
        let reports = analyze_capacity(n, &config.capacity.p, config.capacity.trials, config.seed)
            .map_err(data_err)?;
        for report in reports {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                report.neuron_count,
                report.pattern_count,
                report.load_factor,
                report.mean_unstable_fraction(),
                report.crosstalk_variance_empirical,
                report.crosstalk_variance_predicted,
                report.union_bound_failure_prob,
                theoretical_capacity(n)
            );
        }
    }
    let path = config.out.join("capacity.csv");
    std::fs::write(&path, csv).map_err(|e| data_err(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Runs a seeded Glauber trajectory and logs (step, energy, magnetization)
/// every `sample_every` steps, including step 0.
pub fn cmd_ising(config: &RunConfig) -> Result<PathBuf, CliError> {
    config.ensure_out()?;
    let settings = &config.ising;
    let mut lattice = IsingLattice::random(
        settings.width,
        settings.height,
        settings.coupling,
        settings.field,
        config.seed,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let mut csv = String::from("step,energy,magnetization\n");
    let _ = writeln!(csv, "0,{},{}", lattice.energy(), lattice.magnetization());
    for step in 1..=settings.steps {
        lattice.step_with(settings.temperature, &mut rng);
        if step % settings.sample_every == 0 || step == settings.steps {
            let _ = writeln!(
                csv,
                "{step},{},{}",
                lattice.energy(),
                lattice.magnetization()
            );
        }
    }
    let path = config.out.join("ising.csv");
    std::fs::write(&path, csv).map_err(|e| data_err(format!("{}: {e}", path.display())))?;
    Ok(path)
}
