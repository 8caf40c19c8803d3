//! The capacity-extension mapping: a seeded pixel permutation scatters
//! image semantics across the whole pattern before memorization and is
//! inverted after recall. Training-plus-recall with scrambling on is
//! exactly the plain pipeline conjugated by the permutation.
//!
//! ```bash
//! cargo run --release --example scramble_extension
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sifternet::attacks::{inject_patch, PatchTrigger};
use sifternet::binarize::{binarize_global, image_to_pattern, BinarizeMode, Image};
use sifternet::eval::synthetic::PrototypeBenchmark;
use sifternet::purifier::{make_scramble, train_purifier, PurifierConfig, ScrambleMode};

fn main() {
    let n = 28 * 28;
    // Displacement statistics of the seeded permutation itself.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for seed in 0..3u64 {
        let perm = make_scramble(n, seed);
        let mean_disp: f64 = perm
            .forward()
            .iter()
            .enumerate()
            .map(|(i, &d)| (f64::from(d) - i as f64).abs())
            .sum::<f64>()
            / n as f64;
        let pattern = sifternet::hopfield::BinaryPattern::random(n, &mut rng);
        assert_eq!(perm.unapply(&perm.apply(&pattern)), pattern);
        println!(
            "seed {seed}: mean index displacement {:.1} of {} (uniform expectation ~ n/3 = {:.0})",
            mean_disp,
            n,
            n as f64 / 3.0
        );
    }

    // End to end: a scrambling purifier still erases the trigger.
    let bench = PrototypeBenchmark::generate(28, 28, 8, 5);
    let config = PurifierConfig {
        binarize: BinarizeMode::Global { threshold: 127 },
        remove_time: 1000,
        seed: 9,
        seeds_per_class: 1,
        scramble: ScrambleMode::Permutation { seed: 33 },
    };
    let purifier = train_purifier(&bench.seed_dataset(1, 0.0, 1), &config).expect("training");
    let clean = bench.prototype_image(3);
    let patched = inject_patch(&clean, &PatchTrigger::white_corner()).expect("patch");
    let purified = purifier.purify(&patched).expect("purify");

    let spins = |img: &Image| {
        let Image::Gray(g) = img else { unreachable!() };
        image_to_pattern(&binarize_global(g, 127))
    };
    println!(
        "\nscrambled pipeline: patched input at hamming {} from clean, purified output at {}",
        spins(&patched).hamming(&spins(&clean)),
        spins(&purified).hamming(&spins(&clean)),
    );
}
