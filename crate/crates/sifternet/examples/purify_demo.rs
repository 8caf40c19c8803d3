//! Train a purifier on clean prototypes, stamp a white corner patch onto
//! one of them, and watch recall erase it.
//!
//! ```bash
//! cargo run --release --example purify_demo
//! ```

use sifternet::attacks::{inject_patch, PatchTrigger};
use sifternet::binarize::{binarize_global, image_to_pattern, BinarizeMode, Image};
use sifternet::eval::synthetic::PrototypeBenchmark;
use sifternet::purifier::{train_purifier, PurifierConfig, ScrambleMode};

fn render(img: &Image) -> String {
    let Image::Gray(gray) = img else {
        unreachable!("demo uses single-channel images")
    };
    let mut out = String::new();
    for y in 0..gray.height() {
        for x in 0..gray.width() {
            out.push(if gray.pixel(x, y) > 127 { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

fn hamming(a: &Image, b: &Image) -> usize {
    let (Image::Gray(a), Image::Gray(b)) = (a, b) else {
        unreachable!()
    };
    image_to_pattern(&binarize_global(a, 127)).hamming(&image_to_pattern(&binarize_global(b, 127)))
}

fn main() {
    let bench = PrototypeBenchmark::generate(20, 20, 6, 42);
    let config = PurifierConfig {
        binarize: BinarizeMode::Global { threshold: 127 },
        remove_time: 800,
        seed: 7,
        seeds_per_class: 1,
        scramble: ScrambleMode::Off,
    };
    let seeds = bench.seed_dataset(1, 0.0, 1);
    let purifier = train_purifier(&seeds, &config).expect("training succeeds");
    println!(
        "memorized {} prototypes of {} spins each (load factor {:.4})\n",
        bench.class_count(),
        20 * 20,
        bench.class_count() as f64 / 400.0
    );

    let clean = bench.prototype_image(2);
    let patched = inject_patch(&clean, &PatchTrigger::white_corner()).expect("patch fits");
    let purified = purifier.purify(&patched).expect("purify succeeds");

    println!("clean prototype:\n{}", render(&clean));
    println!(
        "patched input (hamming to clean = {}):\n{}",
        hamming(&patched, &clean),
        render(&patched)
    );
    println!(
        "purified output (hamming to clean = {}):\n{}",
        hamming(&purified, &clean),
        render(&purified)
    );
}
