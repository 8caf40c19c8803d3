//! Seeded synthetic benchmark: a handful of near-orthogonal binary
//! prototypes standing in for image classes.
//!
//! Prototypes are random spin images with pairwise overlap capped at 0.2*n,
//! with a small forced-dark square in the bottom-right corner. Like the
//! centered digits the pipeline targets, the corner carries no class
//! semantics, which is exactly what makes a white corner patch a meaningful
//! trigger. Dataset items are prototypes with seeded salt-and-pepper noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binarize::{BinaryImage, GrayImage, Image};
use crate::eval::LabeledDataset;
use crate::hopfield::BinaryPattern;
use crate::purifier::SeedDataset;

/// Side of the forced-dark corner square.
pub const DARK_CORNER: usize = 4;
/// Maximum allowed |dot| between two prototypes, as a fraction of n.
pub const MAX_OVERLAP: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct PrototypeBenchmark {
    width: usize,
    height: usize,
    prototypes: Vec<BinaryImage>,
}

fn spin_dot(a: &BinaryPattern, b: &BinaryPattern) -> i64 {
    a.spins()
        .iter()
        .zip(b.spins())
        .map(|(&x, &y)| i64::from(x) * i64::from(y))
        .sum()
}

impl PrototypeBenchmark {
    /// Generates `class_count` prototypes by rejection sampling until every
    /// pair overlaps by at most 0.2*n. Deterministic in `seed`.
    pub fn generate(width: usize, height: usize, class_count: usize, seed: u64) -> Self {
        assert!(class_count >= 1, "at least one class");
        let n = width * height;
        let dark = DARK_CORNER.min(width).min(height);
        let max_overlap = (MAX_OVERLAP * n as f64) as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut prototypes: Vec<BinaryImage> = Vec::with_capacity(class_count);
        let mut patterns: Vec<BinaryPattern> = Vec::with_capacity(class_count);
        while prototypes.len() < class_count {
            let mut pixels: Vec<u8> = (0..n)
                .map(|_| if rng.random::<bool>() { 255 } else { 0 })
                .collect();
            for dy in 0..dark {
                for dx in 0..dark {
                    pixels[(height - 1 - dy) * width + (width - 1 - dx)] = 0;
                }
            }
            let img = BinaryImage::new(width, height, pixels).expect("valid binary image");
            let pattern = crate::binarize::image_to_pattern(&img);
            if patterns
                .iter()
                .all(|p| spin_dot(p, &pattern).abs() <= max_overlap)
            {
                patterns.push(pattern);
                prototypes.push(img);
            }
        }
        Self {
            width,
            height,
            prototypes,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn class_count(&self) -> usize {
        self.prototypes.len()
    }

    pub fn prototype(&self, class: usize) -> &BinaryImage {
        &self.prototypes[class]
    }

    pub fn prototype_image(&self, class: usize) -> Image {
        Image::Gray(self.prototypes[class].clone().into_gray())
    }

    pub fn prototype_pattern(&self, class: usize) -> BinaryPattern {
        crate::binarize::image_to_pattern(&self.prototypes[class])
    }

    fn noisy_variant<R: Rng + ?Sized>(&self, class: usize, noise: f64, rng: &mut R) -> GrayImage {
        let proto = &self.prototypes[class];
        let pixels = proto
            .pixels()
            .iter()
            .map(|&p| {
                if noise > 0.0 && rng.random::<f64>() < noise {
                    255 - p
                } else {
                    p
                }
            })
            .collect();
        GrayImage::new(self.width, self.height, pixels).expect("valid image")
    }

    /// Clean seed material: `per_class` noisy variants of each prototype.
    pub fn seed_dataset(&self, per_class: usize, noise: f64, seed: u64) -> SeedDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut images = Vec::with_capacity(per_class * self.class_count());
        for class in 0..self.class_count() {
            for _ in 0..per_class {
                images.push((
                    Image::Gray(self.noisy_variant(class, noise, &mut rng)),
                    class,
                ));
            }
        }
        SeedDataset::new(images, self.class_count()).expect("homogeneous by construction")
    }

    /// Labeled test items: `per_class` noisy variants of each prototype.
    pub fn labeled_dataset(&self, per_class: usize, noise: f64, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut images = Vec::with_capacity(per_class * self.class_count());
        for class in 0..self.class_count() {
            for _ in 0..per_class {
                images.push((
                    Image::Gray(self.noisy_variant(class, noise, &mut rng)),
                    class,
                ));
            }
        }
        LabeledDataset::from_clean(images, self.class_count()).expect("homogeneous by construction")
    }
}
