//! Cross-module integration: dataset loading into export, recall-trajectory
//! energy descent through the purifier, and the three-channel path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sifternet::attacks::{PatchTrigger, TriggerKind, TriggerSpec};
use sifternet::binarize::{
    binarize_global, image_to_pattern, BinarizeMode, ColorImage, GrayImage, Image,
};
use sifternet::eval::synthetic::PrototypeBenchmark;
use sifternet::eval::{export_purified, poison_dataset};
use sifternet::imageio::{
    load_dataset, read_image, write_image, write_manifest, ImageFormat, ManifestEntry,
};
use sifternet::purifier::{train_purifier, PurifierConfig, ScrambleMode, SeedDataset};

fn random_gray(w: usize, h: usize, rng: &mut ChaCha8Rng) -> GrayImage {
    GrayImage::new(w, h, (0..w * h).map(|_| rng.random()).collect()).unwrap()
}

#[test]
fn export_with_zero_recall_reproduces_binarized_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("data");
    std::fs::create_dir_all(&data_dir).unwrap();

    // Arbitrary grayscale inputs on disk, loaded through the manifest.
    let mut rng = ChaCha8Rng::seed_from_u64(0x11);
    let mut entries = Vec::new();
    for i in 0..6 {
        let img = Image::Gray(random_gray(9, 7, &mut rng));
        let name = format!("raw_{i}.pgm");
        write_image(&img, &data_dir.join(&name), ImageFormat::Pgm).unwrap();
        entries.push(ManifestEntry {
            path: name,
            label: i % 2,
        });
    }
    let manifest = data_dir.join("manifest.csv");
    write_manifest(&manifest, &entries).unwrap();
    let ds = load_dataset(&manifest).unwrap();
    assert_eq!(ds.len(), 6);

    let config = PurifierConfig {
        binarize: BinarizeMode::Global { threshold: 127 },
        remove_time: 0,
        seed: 1,
        seeds_per_class: 1,
        scramble: ScrambleMode::Off,
    };
    let seeds = ds.to_seed_dataset().unwrap();
    let purifier = train_purifier(&seeds, &config).unwrap();

    let out_dir = dir.path().join("exported");
    let export = export_purified(&ds, &purifier, &out_dir).unwrap();
    assert_eq!(export.rows.len(), 6);
    for (row, item) in export.rows.iter().zip(ds.items()) {
        let loaded = read_image(&out_dir.join(&row.filename)).unwrap();
        let Image::Gray(original) = &item.image else {
            unreachable!()
        };
        let expect = Image::Gray(binarize_global(original, 127).into_gray());
        assert_eq!(
            loaded, expect,
            "{} is not the binarized input",
            row.filename
        );
        assert_eq!(row.label, item.label);
    }
    let manifest_text = std::fs::read_to_string(&export.manifest_path).unwrap();
    assert_eq!(manifest_text.lines().count(), 7); // header + 6 rows
}

#[test]
fn recall_energy_is_non_increasing_along_the_trajectory() {
    // Prefixes of one seeded recall share their update sequence, so energies
    // sampled at growing iteration counts trace the actual trajectory.
    let bench = PrototypeBenchmark::generate(16, 16, 4, 0x22);
    let seeds = bench.seed_dataset(1, 0.0, 1);
    let config = PurifierConfig {
        binarize: BinarizeMode::Global { threshold: 127 },
        remove_time: 256,
        seed: 5,
        seeds_per_class: 1,
        scramble: ScrambleMode::Off,
    };
    let purifier = train_purifier(&seeds, &config).unwrap();
    let net = purifier.network(0);

    let spec = TriggerSpec {
        kind: TriggerKind::Patch(PatchTrigger::white_corner()),
        target_label: 0,
    };
    let items = poison_dataset(&bench.labeled_dataset(3, 0.05, 2), &spec, 1.0, 3).unwrap();
    for item in items.items() {
        let Image::Gray(gray) = &item.image else {
            unreachable!()
        };
        let pattern = image_to_pattern(&binarize_global(gray, 127));
        let mut last = f64::INFINITY;
        for iterations in [0usize, 16, 64, 128, 256] {
            let state = net.recall(&pattern, iterations, 77).unwrap();
            let energy = net.energy(&state).unwrap();
            assert!(
                energy <= last,
                "energy rose from {last} to {energy} at {iterations} iterations"
            );
            last = energy;
        }
    }
}

#[test]
fn three_channel_pipeline_emits_binary_ppm_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x33);
    let proto = Image::Color(
        ColorImage::new([
            random_gray(8, 8, &mut rng),
            random_gray(8, 8, &mut rng),
            random_gray(8, 8, &mut rng),
        ])
        .unwrap(),
    );
    let seeds = SeedDataset::new(vec![(proto.clone(), 0)], 1).unwrap();
    let config = PurifierConfig {
        binarize: BinarizeMode::LocalDiff { k_size: 3 },
        remove_time: 128,
        seed: 9,
        seeds_per_class: 1,
        scramble: ScrambleMode::Off,
    };
    let purifier = train_purifier(&seeds, &config).unwrap();
    assert_eq!(purifier.channels(), 3);

    let poisoned = sifternet::attacks::inject_patch(&proto, &PatchTrigger::white_corner()).unwrap();
    let purified = purifier.purify(&poisoned).unwrap();
    assert_eq!(purified.channels(), 3);

    let path = dir.path().join("purified.ppm");
    write_image(&purified, &path, ImageFormat::Ppm).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let header_end = bytes.len() - 3 * 8 * 8;
    for &b in &bytes[header_end..] {
        assert!(b == 0x00 || b == 0xFF, "payload byte {b:#x}");
    }
    assert_eq!(read_image(&path).unwrap(), purified);
}
