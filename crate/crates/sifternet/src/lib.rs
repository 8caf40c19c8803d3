//! SifterNet: Hopfield associative memories that purify backdoor triggers
//! from binarized images.
//!
//! A small set of clean seed images per class is binarized, flattened to
//! spin patterns, and memorized by per-channel Hopfield networks through
//! Hebbian learning. Unknown inputs are binarized the same way and run
//! through seeded asynchronous energy-descent recall; inputs near a stored
//! pattern fall back into its basin, which erases implanted trigger pixels
//! while keeping the clean content. The crate also ships the supporting
//! apparatus: an Ising lattice with Glauber dynamics, stability and capacity
//! experiments, trigger injectors, an evaluation harness with a
//! nearest-centroid reference classifier, image codecs, and a batch CLI.
//!
//! Start with the runnable examples (`cargo run --example purify_demo`) or
//! the [`purifier`] module.

pub mod attacks;
pub mod binarize;
pub mod cli;
pub mod eval;
pub mod hopfield;
pub mod imageio;
pub mod purifier;

pub use attacks::{inject_blend, inject_patch, PatchTrigger, TriggerKind, TriggerSpec};
pub use binarize::{
    binarize_global, binarize_local_diff, image_to_pattern, local_mean, map_to_spin,
    pattern_to_image, BinarizeMode, BinaryImage, ColorImage, GrayImage, Image, MeanImage,
};
pub use eval::{
    evaluate, evaluate_with_jobs, export_purified, poison_dataset, sweep_iterations,
    CentroidClassifier, EvalReport, LabeledDataset,
};
pub use hopfield::capacity::{analyze_capacity, theoretical_capacity, StabilityReport};
pub use hopfield::ising::IsingLattice;
pub use hopfield::{BinaryPattern, HopfieldNetwork, OpCounter, WeightMatrix};
pub use purifier::{
    make_scramble, train_purifier, Permutation, PurifierConfig, ScrambleMode, SeedDataset,
    TrainedPurifier,
};
