//! Codec and binarization tour: write and re-read PGM, PPM, and PNG files,
//! then compare global thresholding against local differentiation on an
//! unevenly lit image.
//!
//! ```bash
//! cargo run --release --example image_roundtrip
//! ```

use sifternet::binarize::{binarize_global, binarize_local_diff, GrayImage, Image};
use sifternet::imageio::{decode_image, encode_image, ImageFormat};

fn render(img: &GrayImage, threshold: impl Fn(usize, usize) -> bool) -> String {
    let mut out = String::new();
    for y in 0..img.height() {
        for x in 0..img.width() {
            out.push(if threshold(x, y) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

fn main() {
    // A bright diagonal stripe under a strong left-to-right illumination
    // gradient: global thresholding loses the dark side, local
    // differentiation keeps the stripe.
    let (w, h) = (28, 12);
    let mut pixels = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let lighting = (x * 160 / w) as i32;
            let on_stripe = (x as i32 - 2 * y as i32).abs() <= 1;
            let value = lighting + if on_stripe { 70 } else { 0 };
            pixels.push(value.clamp(0, 255) as u8);
        }
    }
    let img = GrayImage::new(w, h, pixels).expect("valid image");

    for (name, format) in [("PGM", ImageFormat::Pgm), ("PNG", ImageFormat::Png)] {
        let bytes = encode_image(&Image::Gray(img.clone()), format).expect("encode");
        let back = decode_image(&bytes).expect("decode");
        assert_eq!(back, Image::Gray(img.clone()));
        println!("{name}: {} bytes, round-trips losslessly", bytes.len());
    }

    let global = binarize_global(&img, 127);
    let local = binarize_local_diff(&img, 7).expect("binarize");
    println!("\nsource (rendered at pixel > 127):");
    print!("{}", render(&img, |x, y| img.pixel(x, y) > 127));
    println!("global threshold 127 (gradient swamps the stripe):");
    print!("{}", render(&img, |x, y| global.pixel(x, y) == 255));
    println!("local differentiation, k = 7 (stripe survives):");
    print!("{}", render(&img, |x, y| local.pixel(x, y) == 255));
}
