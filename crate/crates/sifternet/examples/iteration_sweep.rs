//! How the recall length trades off trigger removal against fidelity:
//! sweep remove_time and print Acc, ASR, and restoration distance per row.
//!
//! ```bash
//! cargo run --release --example iteration_sweep
//! ```

use sifternet::attacks::{PatchTrigger, TriggerKind, TriggerSpec};
use sifternet::binarize::BinarizeMode;
use sifternet::eval::synthetic::PrototypeBenchmark;
use sifternet::eval::{poison_dataset, sweep_iterations, CentroidClassifier};
use sifternet::purifier::{train_purifier, PurifierConfig, ScrambleMode};

fn main() {
    let bench = PrototypeBenchmark::generate(28, 28, 10, 7);
    let config = PurifierConfig {
        binarize: BinarizeMode::Global { threshold: 127 },
        remove_time: 1000,
        seed: 21,
        seeds_per_class: 1,
        scramble: ScrambleMode::Off,
    };
    let purifier = train_purifier(&bench.seed_dataset(1, 0.0, 1), &config).expect("training");
    let classifier = CentroidClassifier::fit(&bench.labeled_dataset(10, 0.05, 2), config.binarize)
        .expect("fit")
        .with_patch_backdoor(&PatchTrigger::white_corner(), 0, 50.0)
        .expect("implant");

    let spec = TriggerSpec {
        kind: TriggerKind::Patch(PatchTrigger::white_corner()),
        target_label: 0,
    };
    let clean = bench.labeled_dataset(8, 0.05, 3);
    let poisoned =
        poison_dataset(&bench.labeled_dataset(8, 0.0, 4), &spec, 1.0, 5).expect("poison");

    let remove_times = [0, 25, 50, 100, 200, 400, 800, 1000, 1600];
    let rows =
        sweep_iterations(&purifier, &remove_times, &classifier, &clean, &poisoned).expect("sweep");
    println!(
        "{:>12} {:>8} {:>8} {:>16} {:>16}",
        "remove_time", "acc", "asr", "hamming_before", "hamming_after"
    );
    for row in rows {
        println!(
            "{:>12} {:>8.3} {:>8.3} {:>16.2} {:>16.2}",
            row.remove_time, row.acc, row.asr, row.mean_hamming_before, row.mean_hamming_after
        );
    }
    println!("\nmore iterations visit more of the image: the trigger shrinks until it is gone");
}
