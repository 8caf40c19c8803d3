//! Image and dataset ingestion/emission.
//!
//! Supported codecs: binary PGM (P5) and PPM (P6) with maxval 255, and 8-bit
//! non-interlaced PNG (grayscale or RGB, no alpha). Encoders are
//! deterministic byte-for-byte: fixed header formatting, no timestamps, so
//! identical images produce identical files.
//!
//! Datasets are directories described by a CSV manifest with the header
//! `path,label`; rows are loaded in manifest order.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::binarize::{ColorImage, GrayImage, Image};
use crate::eval::LabeledDataset;

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("unrecognized image format")]
    UnsupportedFormat,
    #[error("malformed header at byte {offset}: {detail}")]
    MalformedHeader { offset: usize, detail: String },
    #[error("unsupported bit depth: maxval {maxval} (only 255 is supported)")]
    UnsupportedDepth { maxval: u32 },
    #[error("payload truncated: expected {expected} bytes, found {actual}")]
    TruncatedPayload { expected: usize, actual: usize },
    #[error("unsupported png: {0}")]
    UnsupportedPng(String),
    #[error("png codec failure: {0}")]
    PngCodec(String),
    #[error("image does not fit the requested format: {0}")]
    FormatMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("manifest row {row}: {detail}")]
    ManifestRow { row: usize, detail: String },
    #[error("manifest has no `path,label` header")]
    ManifestHeader,
    #[error("invalid image dimensions or pixel data: {0}")]
    Invalid(String),
}

fn io_err(path: &Path, source: io::Error) -> ImageIoError {
    ImageIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// On-disk image formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Ppm,
    Png,
}

impl ImageFormat {
    /// Picks a format from a file extension.
    pub fn from_path(path: &Path) -> Option<ImageFormat> {
        match path.extension()?.to_str()? {
            "pgm" => Some(ImageFormat::Pgm),
            "ppm" => Some(ImageFormat::Ppm),
            "png" => Some(ImageFormat::Png),
            _ => None,
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            ImageFormat::Pgm => "pgm",
            ImageFormat::Ppm => "ppm",
            ImageFormat::Png => "png",
        }
    }

    /// Natural format for an image: PGM for single channel, PPM for three.
    pub fn natural_for(img: &Image) -> ImageFormat {
        match img {
            Image::Gray(_) => ImageFormat::Pgm,
            Image::Color(_) => ImageFormat::Ppm,
        }
    }
}

// ---------------------------------------------------------------------------
// PNM (P5 / P6)
// ---------------------------------------------------------------------------

struct PnmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PnmCursor<'a> {
    fn skip_separators(&mut self) -> Result<(), ImageIoError> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => return Ok(()),
                None => {
                    return Err(ImageIoError::MalformedHeader {
                        offset: self.pos,
                        detail: "header ended early".into(),
                    })
                }
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<u32, ImageIoError> {
        self.skip_separators()?;
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_digit() {
                value = value * 10 + u64::from(b - b'0');
                if value > u64::from(u32::MAX) {
                    return Err(ImageIoError::MalformedHeader {
                        offset: start,
                        detail: format!("{what} out of range"),
                    });
                }
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(ImageIoError::MalformedHeader {
                offset: self.pos,
                detail: format!("expected {what}"),
            });
        }
        Ok(value as u32)
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<Image, ImageIoError> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1usize,
        Some(b"P6") => 3usize,
        _ => return Err(ImageIoError::UnsupportedFormat),
    };
    let mut cursor = PnmCursor { bytes, pos: 2 };
    let width = cursor.read_number("width")? as usize;
    let height = cursor.read_number("height")? as usize;
    let maxval = cursor.read_number("maxval")?;
    if maxval != 255 {
        return Err(ImageIoError::UnsupportedDepth { maxval });
    }
    if width == 0 || height == 0 {
        return Err(ImageIoError::MalformedHeader {
            offset: 2,
            detail: "zero image dimension".into(),
        });
    }
    // Exactly one whitespace byte separates the header from the payload.
    match bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => {
            return Err(ImageIoError::MalformedHeader {
                offset: cursor.pos,
                detail: "missing separator before payload".into(),
            })
        }
    }
    let expected = width * height * channels;
    let payload = &bytes[cursor.pos.min(bytes.len())..];
    if payload.len() < expected {
        return Err(ImageIoError::TruncatedPayload {
            expected,
            actual: payload.len(),
        });
    }
    let payload = &payload[..expected];
    if channels == 1 {
        let gray = GrayImage::new(width, height, payload.to_vec())
            .map_err(|e| ImageIoError::Invalid(e.to_string()))?;
        Ok(Image::Gray(gray))
    } else {
        let mut planes = [
            vec![0u8; width * height],
            vec![0; width * height],
            vec![0; width * height],
        ];
        for (i, chunk) in payload.chunks_exact(3).enumerate() {
            planes[0][i] = chunk[0];
            planes[1][i] = chunk[1];
            planes[2][i] = chunk[2];
        }
        let [r, g, b] = planes;
        let color = ColorImage::new([
            GrayImage::new(width, height, r).map_err(|e| ImageIoError::Invalid(e.to_string()))?,
            GrayImage::new(width, height, g).map_err(|e| ImageIoError::Invalid(e.to_string()))?,
            GrayImage::new(width, height, b).map_err(|e| ImageIoError::Invalid(e.to_string()))?,
        ])
        .map_err(|e| ImageIoError::Invalid(e.to_string()))?;
        Ok(Image::Color(color))
    }
}

fn encode_pnm(img: &Image, format: ImageFormat) -> Result<Vec<u8>, ImageIoError> {
    match (img, format) {
        (Image::Gray(g), ImageFormat::Pgm) => {
            let mut out = format!("P5\n{} {}\n255\n", g.width(), g.height()).into_bytes();
            out.extend_from_slice(g.pixels());
            Ok(out)
        }
        (Image::Color(c), ImageFormat::Ppm) => {
            let mut out = format!("P6\n{} {}\n255\n", c.width(), c.height()).into_bytes();
            let n = c.width() * c.height();
            for i in 0..n {
                out.push(c.plane(0).pixels()[i]);
                out.push(c.plane(1).pixels()[i]);
                out.push(c.plane(2).pixels()[i]);
            }
            Ok(out)
        }
        (Image::Gray(_), ImageFormat::Ppm) => Err(ImageIoError::FormatMismatch(
            "single-channel image cannot be written as PPM".into(),
        )),
        (Image::Color(_), ImageFormat::Pgm) => Err(ImageIoError::FormatMismatch(
            "three-channel image cannot be written as PGM".into(),
        )),
        _ => unreachable!("png handled separately"),
    }
}

// ---------------------------------------------------------------------------
// PNG (8-bit, color types 0 and 2, non-interlaced, no alpha)
// ---------------------------------------------------------------------------

fn decode_png(bytes: &[u8]) -> Result<Image, ImageIoError> {
    let decoder = png::Decoder::new(bytes);
    let mut reader = decoder
        .read_info()
        .map_err(|e| ImageIoError::PngCodec(e.to_string()))?;
    {
        let info = reader.info();
        if info.interlaced {
            return Err(ImageIoError::UnsupportedPng("interlaced".into()));
        }
        if info.bit_depth != png::BitDepth::Eight {
            return Err(ImageIoError::UnsupportedPng(format!(
                "bit depth {:?}",
                info.bit_depth
            )));
        }
        match info.color_type {
            png::ColorType::Grayscale | png::ColorType::Rgb => {}
            other => {
                return Err(ImageIoError::UnsupportedPng(format!(
                    "color type {other:?} (alpha and palettes are rejected)"
                )))
            }
        }
    }
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| ImageIoError::PngCodec(e.to_string()))?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    let data = &buf[..frame.buffer_size()];
    match frame.color_type {
        png::ColorType::Grayscale => {
            let gray = GrayImage::new(width, height, data.to_vec())
                .map_err(|e| ImageIoError::Invalid(e.to_string()))?;
            Ok(Image::Gray(gray))
        }
        png::ColorType::Rgb => {
            let n = width * height;
            let mut planes = [vec![0u8; n], vec![0; n], vec![0; n]];
            for (i, chunk) in data.chunks_exact(3).enumerate() {
                planes[0][i] = chunk[0];
                planes[1][i] = chunk[1];
                planes[2][i] = chunk[2];
            }
            let [r, g, b] = planes;
            let color = ColorImage::new([
                GrayImage::new(width, height, r)
                    .map_err(|e| ImageIoError::Invalid(e.to_string()))?,
                GrayImage::new(width, height, g)
                    .map_err(|e| ImageIoError::Invalid(e.to_string()))?,
                GrayImage::new(width, height, b)
                    .map_err(|e| ImageIoError::Invalid(e.to_string()))?,
            ])
            .map_err(|e| ImageIoError::Invalid(e.to_string()))?;
            Ok(Image::Color(color))
        }
        _ => unreachable!("filtered above"),
    }
}

fn encode_png(img: &Image) -> Result<Vec<u8>, ImageIoError> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        encoder.set_depth(png::BitDepth::Eight);
        match img {
            Image::Gray(_) => encoder.set_color(png::ColorType::Grayscale),
            Image::Color(_) => encoder.set_color(png::ColorType::Rgb),
        }
        let mut writer = encoder
            .write_header()
            .map_err(|e| ImageIoError::PngCodec(e.to_string()))?;
        let data = match img {
            Image::Gray(g) => g.pixels().to_vec(),
            Image::Color(c) => {
                let n = c.width() * c.height();
                let mut interleaved = Vec::with_capacity(3 * n);
                for i in 0..n {
                    interleaved.push(c.plane(0).pixels()[i]);
                    interleaved.push(c.plane(1).pixels()[i]);
                    interleaved.push(c.plane(2).pixels()[i]);
                }
                interleaved
            }
        };
        writer
            .write_image_data(&data)
            .map_err(|e| ImageIoError::PngCodec(e.to_string()))?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Public codec surface
// ---------------------------------------------------------------------------

/// Decodes an image from raw bytes, sniffing the container format.
pub fn decode_image(bytes: &[u8]) -> Result<Image, ImageIoError> {
    match bytes.get(..2) {
        Some(b"P5") | Some(b"P6") => decode_pnm(bytes),
        _ if bytes.starts_with(&[0x89, b'P', b'N', b'G']) => decode_png(bytes),
        _ => Err(ImageIoError::UnsupportedFormat),
    }
}

/// Encodes an image in the requested format.
pub fn encode_image(img: &Image, format: ImageFormat) -> Result<Vec<u8>, ImageIoError> {
    match format {
        ImageFormat::Png => encode_png(img),
        other => encode_pnm(img, other),
    }
}

/// Reads and decodes an image file.
pub fn read_image(path: &Path) -> Result<Image, ImageIoError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    decode_image(&bytes)
}

/// Encodes and writes an image file.
pub fn write_image(img: &Image, path: &Path, format: ImageFormat) -> Result<(), ImageIoError> {
    let bytes = encode_image(img, format)?;
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

// ---------------------------------------------------------------------------
// Manifests and dataset loading
// ---------------------------------------------------------------------------

/// One manifest row: a file path relative to the manifest, and its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub label: usize,
}

/// Parsed dataset manifest plus the homogeneous shape of its images.
#[derive(Debug, Clone)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub entries: Vec<ManifestEntry>,
    pub channels: usize,
    pub width: usize,
    pub height: usize,
}

/// Parses a `path,label` manifest CSV.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, ImageIoError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == "path,label" => {}
        _ => return Err(ImageIoError::ManifestHeader),
    }
    let mut entries = Vec::new();
    for (idx, line) in lines.enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (file, label) = line
            .rsplit_once(',')
            .ok_or_else(|| ImageIoError::ManifestRow {
                row,
                detail: "expected `path,label`".into(),
            })?;
        let label: usize = label
            .trim()
            .parse()
            .map_err(|_| ImageIoError::ManifestRow {
                row,
                detail: format!("bad label `{}`", label.trim()),
            })?;
        entries.push(ManifestEntry {
            path: file.trim().to_string(),
            label,
        });
    }
    Ok(entries)
}

/// Writes a `path,label` manifest CSV.
pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<(), ImageIoError> {
    let mut out = String::from("path,label\n");
    for e in entries {
        out.push_str(&format!("{},{}\n", e.path, e.label));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Loads every manifest row in order, validating shape homogeneity before
/// returning. Labels beyond the maximum seen define the class count.
pub fn load_dataset(manifest_path: &Path) -> Result<LabeledDataset, ImageIoError> {
    let entries = read_manifest(manifest_path)?;
    let root = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let mut images = Vec::with_capacity(entries.len());
    let mut shape: Option<(usize, usize, usize)> = None;
    for (idx, entry) in entries.iter().enumerate() {
        let row = idx + 1;
        let full = root.join(&entry.path);
        let img = read_image(&full).map_err(|e| ImageIoError::ManifestRow {
            row,
            detail: e.to_string(),
        })?;
        let this = (img.width(), img.height(), img.channels());
        match shape {
            None => shape = Some(this),
            Some(expect) if expect != this => {
                return Err(ImageIoError::ManifestRow {
                    row,
                    detail: format!(
                        "shape {}x{}x{} does not match dataset shape {}x{}x{}",
                        this.0, this.1, this.2, expect.0, expect.1, expect.2
                    ),
                });
            }
            Some(_) => {}
        }
        images.push((img, entry.label));
    }
    let class_count = images.iter().map(|(_, l)| l + 1).max().unwrap_or(0);
    LabeledDataset::from_clean(images, class_count)
        .map_err(|e| ImageIoError::Invalid(e.to_string()))
}
