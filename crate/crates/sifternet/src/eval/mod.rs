//! Evaluation harness: dataset poisoning, a nearest-centroid reference
//! classifier over spin patterns, Acc/ASR accounting, Hamming-restoration
//! metrics, iteration sweeps, and purified-dataset export.
//!
//! The classifier is a stand-in target model: deep networks are out of
//! reach at this scale, and centroids over binarized patterns keep Acc and
//! ASR meaningful inside the spin domain. Absolute numbers are therefore
//! not comparable to results against real backdoored networks; directions
//! and deltas are.

pub mod synthetic;

use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::attacks::{AttackError, PatchTrigger, TriggerSpec};
use crate::binarize::{image_to_pattern, BinarizeError, BinarizeMode, Image};
use crate::imageio::{self, ImageFormat, ImageIoError};
use crate::purifier::{PurifierError, SeedDataset, TrainedPurifier};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("class {0} has no samples")]
    MissingClass(usize),
    #[error("label {label} out of range for {class_count} classes")]
    LabelOutOfRange { label: usize, class_count: usize },
    #[error("dataset images have mismatched shapes")]
    InconsistentShapes,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("a classifier needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("poison ratio {0} outside [0, 1]")]
    BadRatio(f64),
    #[error("shape mismatch between {0}")]
    ShapeMismatch(String),
    #[error("a patch trigger is required to implant a classifier backdoor")]
    UnsupportedBackdoor,
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Purifier(#[from] PurifierError),
    #[error(transparent)]
    Binarize(#[from] BinarizeError),
    #[error(transparent)]
    ImageIo(#[from] ImageIoError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// One dataset member. Poisoned items keep their pre-poison label and the
/// clean source image so restoration can be measured against it.
#[derive(Debug, Clone)]
pub struct DatasetItem {
    pub image: Image,
    pub label: usize,
    pub poisoned: bool,
    pub original_label: usize,
    pub clean_source: Option<Image>,
}

/// Ordered labeled images with optional poison flags.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    items: Vec<DatasetItem>,
    class_count: usize,
}

impl LabeledDataset {
    /// Builds a clean dataset, validating labels and shape homogeneity.
    pub fn from_clean(images: Vec<(Image, usize)>, class_count: usize) -> Result<Self, EvalError> {
        if let Some(first) = images.first() {
            for (img, label) in &images {
                if *label >= class_count {
                    return Err(EvalError::LabelOutOfRange {
                        label: *label,
                        class_count,
                    });
                }
                if !img.same_shape(&first.0) {
                    return Err(EvalError::InconsistentShapes);
                }
            }
        }
        let items = images
            .into_iter()
            .map(|(image, label)| DatasetItem {
                image,
                label,
                poisoned: false,
                original_label: label,
                clean_source: None,
            })
            .collect();
        Ok(Self { items, class_count })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn items(&self) -> &[DatasetItem] {
        &self.items
    }

    pub fn poisoned_count(&self) -> usize {
        self.items.iter().filter(|it| it.poisoned).count()
    }

    /// View of the dataset as purifier seed material (images plus labels).
    pub fn to_seed_dataset(&self) -> Result<SeedDataset, PurifierError> {
        let images = self
            .items
            .iter()
            .map(|it| (it.image.clone(), it.label))
            .collect();
        SeedDataset::new(images, self.class_count)
    }
}

/// Trigger-injects a seeded uniform subset of `round(ratio * len)` items and
/// relabels them to the attack target. Deterministic in `seed`.
pub fn poison_dataset(
    ds: &LabeledDataset,
    spec: &TriggerSpec,
    ratio: f64,
    seed: u64,
) -> Result<LabeledDataset, EvalError> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(EvalError::BadRatio(ratio));
    }
    let count = (ratio * ds.len() as f64).round() as usize;
    let mut indices: Vec<usize> = (0..ds.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let mut chosen: Vec<usize> = indices.into_iter().take(count).collect();
    chosen.sort_unstable();

    let mut items = ds.items.clone();
    for idx in chosen {
        let item = &mut items[idx];
        let clean = item.image.clone();
        item.image = spec.apply(&clean)?;
        item.original_label = item.label;
        item.label = spec.target_label;
        item.poisoned = true;
        item.clean_source = Some(clean);
    }
    Ok(LabeledDataset {
        items,
        class_count: ds.class_count,
    })
}

/// Nearest-centroid classifier over concatenated per-channel spin patterns.
///
/// Fitted models score by plain dot products; the per-class biases are zero
/// then and only become nonzero when a backdoor is implanted via
/// [`with_patch_backdoor`](Self::with_patch_backdoor).
#[derive(Debug, Clone)]
pub struct CentroidClassifier {
    centroids: Vec<Vec<f64>>,
    biases: Vec<f64>,
    class_count: usize,
    width: usize,
    height: usize,
    channels: usize,
    mode: BinarizeMode,
}

impl CentroidClassifier {
    /// Fits per-class centroids as mean spin vectors of the training
    /// binarizations. Every class must be represented.
    pub fn fit(ds: &LabeledDataset, mode: BinarizeMode) -> Result<Self, EvalError> {
        if ds.class_count < 2 {
            return Err(EvalError::TooFewClasses(ds.class_count));
        }
        let first = ds.items.first().ok_or(EvalError::EmptyDataset)?;
        let (width, height, channels) = (
            first.image.width(),
            first.image.height(),
            first.image.channels(),
        );
        let dim = width * height * channels;
        let mut sums = vec![vec![0.0f64; dim]; ds.class_count];
        let mut counts = vec![0usize; ds.class_count];
        for item in &ds.items {
            let spins = Self::pattern_raw(&item.image, mode)?;
            let sum = &mut sums[item.label];
            for (acc, s) in sum.iter_mut().zip(&spins) {
                *acc += f64::from(*s);
            }
            counts[item.label] += 1;
        }
        for (class, &count) in counts.iter().enumerate() {
            if count == 0 {
                return Err(EvalError::MissingClass(class));
            }
            for v in &mut sums[class] {
                *v /= count as f64;
            }
        }
        Ok(Self {
            centroids: sums,
            biases: vec![0.0; ds.class_count],
            class_count: ds.class_count,
            width,
            height,
            channels,
            mode,
        })
    }

    fn pattern_raw(img: &Image, mode: BinarizeMode) -> Result<Vec<i8>, EvalError> {
        let mut spins = Vec::with_capacity(img.width() * img.height() * img.channels());
        for c in 0..img.channels() {
            let bin = mode.apply(img.plane(c))?;
            spins.extend_from_slice(image_to_pattern(&bin).spins());
        }
        Ok(spins)
    }

    /// Concatenated spin pattern of an image under the classifier's
    /// binarization mode.
    pub fn pattern_of(&self, img: &Image) -> Result<Vec<i8>, EvalError> {
        self.check_shape(img)?;
        Self::pattern_raw(img, self.mode)
    }

    fn check_shape(&self, img: &Image) -> Result<(), EvalError> {
        if img.width() != self.width
            || img.height() != self.height
            || img.channels() != self.channels
        {
            return Err(EvalError::ShapeMismatch("classifier and image".to_string()));
        }
        Ok(())
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn mode(&self) -> BinarizeMode {
        self.mode
    }

    /// Argmax of dot(pattern, centroid); ties break to the lowest class.
    pub fn classify(&self, img: &Image) -> Result<usize, EvalError> {
        let spins = self.pattern_of(img)?;
        Ok(self.classify_spins(&spins))
    }

    pub fn classify_spins(&self, spins: &[i8]) -> usize {
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (class, centroid) in self.centroids.iter().enumerate() {
            let dot: f64 = centroid
                .iter()
                .zip(spins)
                .map(|(c, &s)| c * f64::from(s))
                .sum();
            let score = dot + self.biases[class];
            if score > best_score {
                best_score = score;
                best = class;
            }
        }
        best
    }

    /// Models a compromised target: adds `gain` to the target-class centroid
    /// at every patch pixel on every channel, plus a bias that cancels the
    /// all-dark case, so the patch region contributes zero when absent and
    /// `2 * gain * area` when fully present. This is how a poison-trained
    /// network's trigger detector behaves; mean-spin fitting alone cannot
    /// express such weights (centroid entries live in [-1, 1]), hence the
    /// explicit implant.
    pub fn with_patch_backdoor(
        mut self,
        patch: &PatchTrigger,
        target: usize,
        gain: f64,
    ) -> Result<Self, EvalError> {
        if target >= self.class_count {
            return Err(EvalError::LabelOutOfRange {
                label: target,
                class_count: self.class_count,
            });
        }
        if patch.width > self.width || patch.height > self.height {
            return Err(EvalError::UnsupportedBackdoor);
        }
        let (x0, y0) = patch.origin(self.width, self.height);
        let plane = self.width * self.height;
        for c in 0..self.channels {
            for dy in 0..patch.height {
                for dx in 0..patch.width {
                    let idx = c * plane + (y0 + dy) * self.width + (x0 + dx);
                    self.centroids[target][idx] += gain;
                }
            }
        }
        self.biases[target] += gain * (patch.width * patch.height * self.channels) as f64;
        Ok(self)
    }
}

/// Wall-clock durations, in seconds. Never part of determinism comparisons.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub train_secs: f64,
    pub purify_secs: f64,
    pub classify_secs: f64,
}

/// Per-item evaluation record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemOutcome {
    pub split: String,
    pub index: usize,
    pub label: usize,
    pub original_label: usize,
    pub predicted: usize,
    pub hamming_before: Option<usize>,
    pub hamming_after: Option<usize>,
}

/// Summary plus per-item log of one evaluation run.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub acc: f64,
    pub asr: f64,
    pub clean_total: usize,
    pub clean_correct: usize,
    pub poisoned_total: usize,
    /// Poisoned items whose true label differs from the attack target; the
    /// ASR denominator.
    pub poisoned_eligible: usize,
    pub poisoned_hits: usize,
    pub note: Option<String>,
    pub mean_hamming_before: f64,
    pub mean_hamming_after: f64,
    pub timings: Timings,
    pub items: Vec<ItemOutcome>,
}

impl EvalReport {
    /// Everything except wall-clock fields, for determinism comparisons.
    pub fn deterministic_view(&self) -> impl PartialEq + std::fmt::Debug + '_ {
        (
            self.acc,
            self.asr,
            self.clean_total,
            self.clean_correct,
            self.poisoned_total,
            self.poisoned_eligible,
            self.poisoned_hits,
            &self.note,
            self.mean_hamming_before,
            self.mean_hamming_after,
            &self.items,
        )
    }
}

fn hamming_spins(a: &[i8], b: &[i8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn check_eval_shapes(
    purifier: &TrainedPurifier,
    classifier: &CentroidClassifier,
    datasets: [&LabeledDataset; 2],
) -> Result<(), EvalError> {
    if purifier.width() != classifier.width()
        || purifier.height() != classifier.height()
        || purifier.channels() != classifier.channels()
    {
        return Err(EvalError::ShapeMismatch("purifier and classifier".into()));
    }
    for ds in datasets {
        if let Some(first) = ds.items().first() {
            if first.image.width() != purifier.width()
                || first.image.height() != purifier.height()
                || first.image.channels() != purifier.channels()
            {
                return Err(EvalError::ShapeMismatch("purifier and dataset".into()));
            }
        }
    }
    Ok(())
}

/// Purifies both test sets, classifies the results, and assembles the
/// report: Acc over clean items, ASR over eligible poisoned items, and
/// Hamming distances of poisoned items to their clean-source binarizations
/// before and after purification.
pub fn evaluate(
    purifier: &TrainedPurifier,
    classifier: &CentroidClassifier,
    clean_test: &LabeledDataset,
    poisoned_test: &LabeledDataset,
) -> Result<EvalReport, EvalError> {
    evaluate_with_jobs(purifier, classifier, clean_test, poisoned_test, 1)
}

/// [`evaluate`] with per-item purification fanned out over worker threads;
/// the report is identical to the sequential result.
pub fn evaluate_with_jobs(
    purifier: &TrainedPurifier,
    classifier: &CentroidClassifier,
    clean_test: &LabeledDataset,
    poisoned_test: &LabeledDataset,
    jobs: usize,
) -> Result<EvalReport, EvalError> {
    check_eval_shapes(purifier, classifier, [clean_test, poisoned_test])?;
    let mode = classifier.mode();
    let mut items = Vec::with_capacity(clean_test.len() + poisoned_test.len());
    let mut timings = Timings::default();

    let clean_images: Vec<Image> = clean_test
        .items()
        .iter()
        .map(|it| it.image.clone())
        .collect();
    let poisoned_images: Vec<Image> = poisoned_test
        .items()
        .iter()
        .map(|it| it.image.clone())
        .collect();

    let t0 = Instant::now();
    let clean_purified = purifier.purify_batch_jobs(&clean_images, jobs)?;
    let poisoned_purified = purifier.purify_batch_jobs(&poisoned_images, jobs)?;
    timings.purify_secs = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let mut clean_correct = 0usize;
    for (idx, (item, purified)) in clean_test.items().iter().zip(&clean_purified).enumerate() {
        let predicted = classifier.classify(purified)?;
        if predicted == item.label {
            clean_correct += 1;
        }
        items.push(ItemOutcome {
            split: "clean".into(),
            index: idx,
            label: item.label,
            original_label: item.original_label,
            predicted,
            hamming_before: None,
            hamming_after: None,
        });
    }

    let mut poisoned_total = 0usize;
    let mut eligible = 0usize;
    let mut hits = 0usize;
    let mut hamming_before_sum = 0usize;
    let mut hamming_after_sum = 0usize;
    let mut hamming_count = 0usize;
    for (idx, (item, purified)) in poisoned_test
        .items()
        .iter()
        .zip(&poisoned_purified)
        .enumerate()
    {
        if !item.poisoned {
            continue;
        }
        poisoned_total += 1;
        let predicted = classifier.classify(purified)?;
        let is_eligible = item.original_label != item.label;
        if is_eligible {
            eligible += 1;
            if predicted == item.label {
                hits += 1;
            }
        }
        let (before, after) = match &item.clean_source {
            Some(clean) => {
                let clean_spins = CentroidClassifier::pattern_raw(clean, mode)?;
                let dirty_spins = CentroidClassifier::pattern_raw(&item.image, mode)?;
                let purified_spins = CentroidClassifier::pattern_raw(purified, mode)?;
                let before = hamming_spins(&dirty_spins, &clean_spins);
                let after = hamming_spins(&purified_spins, &clean_spins);
                hamming_before_sum += before;
                hamming_after_sum += after;
                hamming_count += 1;
                (Some(before), Some(after))
            }
            None => (None, None),
        };
        items.push(ItemOutcome {
            split: "poisoned".into(),
            index: idx,
            label: item.label,
            original_label: item.original_label,
            predicted,
            hamming_before: before,
            hamming_after: after,
        });
    }
    timings.classify_secs = t1.elapsed().as_secs_f64();

    let acc = if clean_test.is_empty() {
        0.0
    } else {
        clean_correct as f64 / clean_test.len() as f64
    };
    let (asr, note) = if eligible == 0 {
        (0.0, Some("no poisoned items".to_string()))
    } else {
        (hits as f64 / eligible as f64, None)
    };
    Ok(EvalReport {
        acc,
        asr,
        clean_total: clean_test.len(),
        clean_correct,
        poisoned_total,
        poisoned_eligible: eligible,
        poisoned_hits: hits,
        note,
        mean_hamming_before: if hamming_count == 0 {
            0.0
        } else {
            hamming_before_sum as f64 / hamming_count as f64
        },
        mean_hamming_after: if hamming_count == 0 {
            0.0
        } else {
            hamming_after_sum as f64 / hamming_count as f64
        },
        timings,
        items,
    })
}

/// One evaluation at a fixed recall length.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub remove_time: usize,
    pub acc: f64,
    pub asr: f64,
    pub mean_hamming_before: f64,
    pub mean_hamming_after: f64,
}

/// Evaluates the purifier at each recall length, same seeds throughout.
pub fn sweep_iterations(
    purifier: &TrainedPurifier,
    remove_times: &[usize],
    classifier: &CentroidClassifier,
    clean_test: &LabeledDataset,
    poisoned_test: &LabeledDataset,
) -> Result<Vec<SweepRow>, EvalError> {
    assert!(!remove_times.is_empty(), "sweep needs at least one value");
    let mut rows = Vec::with_capacity(remove_times.len());
    for &rt in remove_times {
        let variant = purifier.with_remove_time(rt);
        let report = evaluate(&variant, classifier, clean_test, poisoned_test)?;
        rows.push(SweepRow {
            remove_time: rt,
            acc: report.acc,
            asr: report.asr,
            mean_hamming_before: report.mean_hamming_before,
            mean_hamming_after: report.mean_hamming_after,
        });
    }
    Ok(rows)
}

/// Manifest row for one exported image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportRow {
    pub filename: String,
    pub label: usize,
    pub poisoned: bool,
    pub original_label: usize,
}

/// Result of a purified-dataset export.
#[derive(Debug, Clone)]
pub struct ExportManifest {
    pub manifest_path: PathBuf,
    pub rows: Vec<ExportRow>,
}

/// Purifies every item and writes the results with their original labels,
/// plus a `filename,label,poisoned,original_label` manifest CSV. Produces
/// the input for downstream retraining; the retraining itself is not done
/// here.
pub fn export_purified(
    ds: &LabeledDataset,
    purifier: &TrainedPurifier,
    out_dir: &Path,
) -> Result<ExportManifest, EvalError> {
    std::fs::create_dir_all(out_dir).map_err(|e| EvalError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let images: Vec<Image> = ds.items().iter().map(|it| it.image.clone()).collect();
    let purified = purifier.purify_batch(&images)?;
    let mut rows = Vec::with_capacity(ds.len());
    for (idx, (item, img)) in ds.items().iter().zip(&purified).enumerate() {
        let format = ImageFormat::natural_for(img);
        let filename = format!("item_{idx:05}.{}", format.extension());
        imageio::write_image(img, &out_dir.join(&filename), format)?;
        rows.push(ExportRow {
            filename,
            label: item.original_label,
            poisoned: item.poisoned,
            original_label: item.original_label,
        });
    }
    let manifest_path = out_dir.join("manifest.csv");
    let mut text = String::from("filename,label,poisoned,original_label\n");
    for row in &rows {
        text.push_str(&format!(
            "{},{},{},{}\n",
            row.filename, row.label, row.poisoned as u8, row.original_label
        ));
    }
    std::fs::write(&manifest_path, text).map_err(|e| EvalError::Io {
        path: manifest_path.clone(),
        source: e,
    })?;
    Ok(ExportManifest {
        manifest_path,
        rows,
    })
}

/// Writes the per-item log as CSV: one row per evaluated item, no timing
/// columns, so fixed seeds give byte-identical files.
pub fn write_items_csv(report: &EvalReport, path: &Path) -> Result<(), EvalError> {
    let mut text =
        String::from("split,index,label,original_label,predicted,hamming_before,hamming_after\n");
    for item in &report.items {
        let fmt_opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            item.split,
            item.index,
            item.label,
            item.original_label,
            item.predicted,
            fmt_opt(item.hamming_before),
            fmt_opt(item.hamming_after)
        ));
    }
    std::fs::write(path, text).map_err(|e| EvalError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Writes sweep rows as CSV with a header row.
pub fn write_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<(), EvalError> {
    let mut text = String::from("remove_time,acc,asr,mean_hamming_before,mean_hamming_after\n");
    for row in rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            row.remove_time, row.acc, row.asr, row.mean_hamming_before, row.mean_hamming_after
        ));
    }
    std::fs::write(path, text).map_err(|e| EvalError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
