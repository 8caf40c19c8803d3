//! The purification pipeline: seed selection, per-channel Hopfield training,
//! and energy-descent recall over binarized inputs.
//!
//! A trained purifier holds one network per channel. Purifying an image
//! binarizes each plane, flattens it to spins, optionally scatters the
//! pattern through a fixed pixel permutation, runs seeded asynchronous
//! recall for `remove_time` updates, and reshapes the attractor back into an
//! image with per-channel values in {0, 255}.

pub mod io;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::binarize::{
    image_to_pattern, pattern_to_image, BinarizeError, BinarizeMode, ColorImage, Image,
};
use crate::hopfield::{BinaryPattern, HopfieldError, HopfieldNetwork};

#[derive(Debug, Error)]
pub enum PurifierError {
    #[error("seed dataset is empty")]
    EmptySeeds,
    #[error("class {0} has no seed samples")]
    MissingClass(usize),
    #[error("label {label} out of range for {class_count} classes")]
    LabelOutOfRange { label: usize, class_count: usize },
    #[error("images in the dataset have mismatched shapes or channel counts")]
    InconsistentShapes,
    #[error("input shape {got} does not match purifier shape {expected}")]
    ShapeMismatch { expected: String, got: String },
    #[error("invalid purifier config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Binarize(#[from] BinarizeError),
    #[error(transparent)]
    Hopfield(#[from] HopfieldError),
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a.rotate_left(17) ^ splitmix64(b))
}

/// Recall seed for one (image ordinal, channel) pair. Batches stay
/// reproducible while every image and channel gets an independent update
/// order.
pub(crate) fn recall_seed(base: u64, ordinal: u64, channel: u64) -> u64 {
    mix(mix(base, ordinal), channel)
}

/// Whether patterns are scattered through a fixed permutation before
/// training and recall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScrambleMode {
    Off,
    Permutation { seed: u64 },
}

/// Pipeline configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PurifierConfig {
    pub binarize: BinarizeMode,
    /// Number of asynchronous recall updates per channel.
    pub remove_time: usize,
    /// Base PRNG seed; per-image seeds are derived from it.
    pub seed: u64,
    /// Clean seed images requested per class during selection.
    pub seeds_per_class: usize,
    pub scramble: ScrambleMode,
}

impl PurifierConfig {
    /// Defaults tuned per input geometry: 28x28 single-channel data gets a
    /// global threshold and a long recall; 32x32 data gets local
    /// differentiation with a k of 21 and a shorter recall. Anything else
    /// falls back to a global threshold with one full coverage of the
    /// neuron count.
    pub fn recommended(width: usize, height: usize) -> Self {
        let (binarize, remove_time) = match (width, height) {
            (28, 28) => (BinarizeMode::Global { threshold: 127 }, 1000),
            (32, 32) => (BinarizeMode::LocalDiff { k_size: 21 }, 200),
            _ => (BinarizeMode::Global { threshold: 127 }, width * height),
        };
        Self {
            binarize,
            remove_time,
            seed: 0,
            seeds_per_class: 3,
            scramble: ScrambleMode::Off,
        }
    }

    pub fn validate(&self) -> Result<(), PurifierError> {
        if let BinarizeMode::LocalDiff { k_size } = self.binarize {
            if k_size == 0 || k_size % 2 == 0 {
                return Err(PurifierError::BadConfig(format!(
                    "k_size {k_size} must be odd and positive"
                )));
            }
        }
        if self.seeds_per_class == 0 {
            return Err(PurifierError::BadConfig(
                "seeds_per_class must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Canonical key=value encoding: fixed key order, one per line. The
    /// serialized purifier embeds exactly this text, so identical configs
    /// produce identical bytes.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        match self.binarize {
            BinarizeMode::Global { threshold } => {
                out.push_str("binarize=global\n");
                out.push_str(&format!("threshold={threshold}\n"));
            }
            BinarizeMode::LocalDiff { k_size } => {
                out.push_str("binarize=localdiff\n");
                out.push_str(&format!("k_size={k_size}\n"));
            }
        }
        out.push_str(&format!("remove_time={}\n", self.remove_time));
        out.push_str(&format!("seed={}\n", self.seed));
        out.push_str(&format!("seeds_per_class={}\n", self.seeds_per_class));
        match self.scramble {
            ScrambleMode::Off => out.push_str("scramble=off\n"),
            ScrambleMode::Permutation { seed } => {
                out.push_str("scramble=permutation\n");
                out.push_str(&format!("scramble_seed={seed}\n"));
            }
        }
        out
    }

    /// Parses the canonical encoding produced by
    /// [`canonical_text`](Self::canonical_text).
    pub fn from_canonical_text(text: &str) -> Result<Self, PurifierError> {
        let mut pairs = std::collections::BTreeMap::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PurifierError::BadConfig(format!("bad line `{line}`")))?;
            pairs.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |key: &str| {
            pairs
                .get(key)
                .cloned()
                .ok_or_else(|| PurifierError::BadConfig(format!("missing key `{key}`")))
        };
        let parse_num = |key: &str| -> Result<u64, PurifierError> {
            get(key)?
                .parse()
                .map_err(|_| PurifierError::BadConfig(format!("bad value for `{key}`")))
        };
        let binarize = match get("binarize")?.as_str() {
            "global" => BinarizeMode::Global {
                threshold: parse_num("threshold")? as u8,
            },
            "localdiff" => BinarizeMode::LocalDiff {
                k_size: parse_num("k_size")? as usize,
            },
            other => {
                return Err(PurifierError::BadConfig(format!(
                    "unknown binarize mode `{other}`"
                )))
            }
        };
        let scramble = match get("scramble")?.as_str() {
            "off" => ScrambleMode::Off,
            "permutation" => ScrambleMode::Permutation {
                seed: parse_num("scramble_seed")?,
            },
            other => {
                return Err(PurifierError::BadConfig(format!(
                    "unknown scramble mode `{other}`"
                )))
            }
        };
        let config = Self {
            binarize,
            remove_time: parse_num("remove_time")? as usize,
            seed: parse_num("seed")?,
            seeds_per_class: parse_num("seeds_per_class")? as usize,
            scramble,
        };
        config.validate()?;
        Ok(config)
    }
}

/// A seeded permutation of pattern indices together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Permutation {
    pub fn from_forward(forward: Vec<u32>) -> Result<Self, PurifierError> {
        let n = forward.len();
        let mut inverse = vec![u32::MAX; n];
        for (i, &dest) in forward.iter().enumerate() {
            let d = dest as usize;
            if d >= n || inverse[d] != u32::MAX {
                return Err(PurifierError::BadConfig(
                    "index array is not a permutation".into(),
                ));
            }
            inverse[d] = i as u32;
        }
        Ok(Self { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    /// Scatters a pattern: output position `forward[i]` takes input spin `i`.
    pub fn apply(&self, pattern: &BinaryPattern) -> BinaryPattern {
        assert_eq!(pattern.len(), self.len(), "permutation length mismatch");
        let mut out = vec![0i8; self.len()];
        for (i, &dest) in self.forward.iter().enumerate() {
            out[dest as usize] = pattern.get(i);
        }
        BinaryPattern::new(out).expect("permuting preserves spins")
    }

    /// Inverse of [`apply`](Self::apply).
    pub fn unapply(&self, pattern: &BinaryPattern) -> BinaryPattern {
        assert_eq!(pattern.len(), self.len(), "permutation length mismatch");
        let mut out = vec![0i8; self.len()];
        for (i, &dest) in self.forward.iter().enumerate() {
            out[i] = pattern.get(dest as usize);
        }
        BinaryPattern::new(out).expect("permuting preserves spins")
    }
}

/// Seeded uniform random permutation of 0..n-1.
pub fn make_scramble(n: usize, seed: u64) -> Permutation {
    assert!(n >= 1, "permutation needs at least one element");
    let mut forward: Vec<u32> = (0..n as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    forward.shuffle(&mut rng);
    Permutation::from_forward(forward).expect("shuffle yields a permutation")
}

/// Clean labeled images used to train the purifier.
#[derive(Debug, Clone)]
pub struct SeedDataset {
    images: Vec<(Image, usize)>,
    class_count: usize,
}

impl SeedDataset {
    pub fn new(images: Vec<(Image, usize)>, class_count: usize) -> Result<Self, PurifierError> {
        if let Some(first) = images.first() {
            for (img, label) in &images {
                if *label >= class_count {
                    return Err(PurifierError::LabelOutOfRange {
                        label: *label,
                        class_count,
                    });
                }
                if !img.same_shape(&first.0) {
                    return Err(PurifierError::InconsistentShapes);
                }
            }
        }
        Ok(Self {
            images,
            class_count,
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn images(&self) -> &[(Image, usize)] {
        &self.images
    }

    /// Stratified sampling without replacement: up to `per_class` images per
    /// class, chosen by a seeded PRNG, output normalized by class then by
    /// original position. Every class must be represented.
    pub fn select_seeds(&self, per_class: usize, seed: u64) -> Result<SeedDataset, PurifierError> {
        assert!(per_class >= 1, "per_class must be at least 1");
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); self.class_count];
        for (idx, (_, label)) in self.images.iter().enumerate() {
            by_class[*label].push(idx);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = Vec::new();
        for (class, indices) in by_class.iter().enumerate() {
            if indices.is_empty() {
                return Err(PurifierError::MissingClass(class));
            }
            let mut pool = indices.clone();
            pool.shuffle(&mut rng);
            let mut chosen: Vec<usize> = pool.into_iter().take(per_class).collect();
            chosen.sort_unstable();
            picked.extend(chosen);
        }
        let images = picked.into_iter().map(|i| self.images[i].clone()).collect();
        SeedDataset::new(images, self.class_count)
    }
}

/// Per-channel Hopfield memories plus the configuration that built them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPurifier {
    networks: Vec<HopfieldNetwork>,
    config: PurifierConfig,
    width: usize,
    height: usize,
    scramble: Option<Permutation>,
}

/// Binarizes every seed image per channel, flattens to spin patterns, and
/// trains one Hebbian network per channel. With scrambling on, the
/// permutation is applied to every pattern before training and recorded in
/// the purifier.
pub fn train_purifier(
    seeds: &SeedDataset,
    config: &PurifierConfig,
) -> Result<TrainedPurifier, PurifierError> {
    config.validate()?;
    if seeds.is_empty() {
        return Err(PurifierError::EmptySeeds);
    }
    let first = &seeds.images()[0].0;
    let (width, height, channels) = (first.width(), first.height(), first.channels());
    let n = width * height;
    let scramble = match config.scramble {
        ScrambleMode::Off => None,
        ScrambleMode::Permutation { seed } => Some(make_scramble(n, seed)),
    };
    let mut networks = Vec::with_capacity(channels);
    for c in 0..channels {
        let mut patterns = Vec::with_capacity(seeds.len());
        for (img, _) in seeds.images() {
            let bin = config.binarize.apply(img.plane(c))?;
            let mut pattern = image_to_pattern(&bin);
            if let Some(perm) = &scramble {
                pattern = perm.apply(&pattern);
            }
            patterns.push(pattern);
        }
        networks.push(HopfieldNetwork::train_hebbian(&patterns, n)?);
    }
    Ok(TrainedPurifier {
        networks,
        config: *config,
        width,
        height,
        scramble,
    })
}

impl TrainedPurifier {
    pub fn config(&self) -> &PurifierConfig {
        &self.config
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.networks.len()
    }

    pub fn network(&self, channel: usize) -> &HopfieldNetwork {
        &self.networks[channel]
    }

    pub fn scramble(&self) -> Option<&Permutation> {
        self.scramble.as_ref()
    }

    /// Copy of this purifier with a different recall length; the trained
    /// weights are shared unchanged.
    pub fn with_remove_time(&self, remove_time: usize) -> TrainedPurifier {
        let mut out = self.clone();
        out.config.remove_time = remove_time;
        out
    }

    fn check_shape(&self, img: &Image) -> Result<(), PurifierError> {
        if img.width() != self.width
            || img.height() != self.height
            || img.channels() != self.channels()
        {
            return Err(PurifierError::ShapeMismatch {
                expected: format!("{}x{}x{}", self.width, self.height, self.channels()),
                got: format!("{}x{}x{}", img.width(), img.height(), img.channels()),
            });
        }
        Ok(())
    }

    /// Purifies one image as the `ordinal`-th member of a batch; the ordinal
    /// feeds the per-image recall seed.
    pub fn purify_indexed(&self, img: &Image, ordinal: u64) -> Result<Image, PurifierError> {
        self.check_shape(img)?;
        let mut planes = Vec::with_capacity(self.channels());
        for c in 0..self.channels() {
            let bin = self.config.binarize.apply(img.plane(c))?;
            let mut pattern = image_to_pattern(&bin);
            if let Some(perm) = &self.scramble {
                pattern = perm.apply(&pattern);
            }
            let seed = recall_seed(self.config.seed, ordinal, c as u64);
            let mut recalled = self.networks[c].recall(&pattern, self.config.remove_time, seed)?;
            if let Some(perm) = &self.scramble {
                recalled = perm.unapply(&recalled);
            }
            planes.push(pattern_to_image(&recalled, self.width, self.height)?.into_gray());
        }
        Ok(if planes.len() == 1 {
            Image::Gray(planes.pop().expect("one plane"))
        } else {
            let b = planes.pop().expect("three planes");
            let g = planes.pop().expect("three planes");
            let r = planes.pop().expect("three planes");
            Image::Color(ColorImage::new([r, g, b])?)
        })
    }

    /// Purifies a standalone image (ordinal 0).
    pub fn purify(&self, img: &Image) -> Result<Image, PurifierError> {
        self.purify_indexed(img, 0)
    }

    /// Purifies a batch in input order; element `i` equals
    /// `purify_indexed(imgs[i], i)`. Shapes are validated for the whole
    /// batch before any work starts.
    pub fn purify_batch(&self, imgs: &[Image]) -> Result<Vec<Image>, PurifierError> {
        self.purify_batch_jobs(imgs, 1)
    }

    /// Batch purification fanned out over up to `jobs` worker threads. The
    /// output is identical to the sequential result.
    pub fn purify_batch_jobs(
        &self,
        imgs: &[Image],
        jobs: usize,
    ) -> Result<Vec<Image>, PurifierError> {
        for img in imgs {
            self.check_shape(img)?;
        }
        let jobs = jobs.max(1).min(imgs.len().max(1));
        if jobs <= 1 || imgs.len() < 2 {
            return imgs
                .iter()
                .enumerate()
                .map(|(i, img)| self.purify_indexed(img, i as u64))
                .collect();
        }
        let mut results: Vec<Option<Result<Image, PurifierError>>> = Vec::new();
        results.resize_with(imgs.len(), || None);
        let chunk = imgs.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            for (slot_chunk, (start, img_chunk)) in results
                .chunks_mut(chunk)
                .zip(imgs.chunks(chunk).enumerate().map(|(k, c)| (k * chunk, c)))
            {
                scope.spawn(move || {
                    for (offset, (slot, img)) in slot_chunk.iter_mut().zip(img_chunk).enumerate() {
                        *slot = Some(self.purify_indexed(img, (start + offset) as u64));
                    }
                });
            }
        });
        results
            .into_iter()
            .map(|r| r.expect("every slot filled"))
            .collect()
    }
}
