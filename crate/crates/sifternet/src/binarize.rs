//! Grayscale-to-spin conversion: global thresholding, local-differentiation
//! binarization built on a zero-padded box-filter mean, and the mapping
//! between binary images and spin patterns.
//!
//! All comparators are strict, with ties falling to the dark/-1 branch, so
//! every conversion is deterministic under a single documented convention.

use thiserror::Error;

use crate::hopfield::{BinaryPattern, HopfieldError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BinarizeError {
    #[error("pixel buffer length {actual} does not match {width}x{height}")]
    PixelCount {
        width: usize,
        height: usize,
        actual: usize,
    },
    #[error("kernel size {0} must be odd and positive")]
    BadKernel(usize),
    #[error("kernel size {k} too large for a {width}x{height} image")]
    KernelTooLarge {
        k: usize,
        width: usize,
        height: usize,
    },
    #[error("pattern length {len} does not match {width}x{height}")]
    PatternShape {
        len: usize,
        width: usize,
        height: usize,
    },
    #[error("pixel value {0} is not 0 or 255")]
    NotBinary(u8),
    #[error("channel planes have mismatched dimensions")]
    PlaneMismatch,
    #[error(transparent)]
    Pattern(#[from] HopfieldError),
}

/// 8-bit single-channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, BinarizeError> {
        if pixels.len() != width * height || width == 0 || height == 0 {
            return Err(BinarizeError::PixelCount {
                width,
                height,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self::new(width, height, vec![value; width * height]).expect("positive dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

/// Box-filter mean of an image; same dimensions as the source. Boundary
/// windows hang over the edge and the missing samples contribute zero, so
/// boundary means sit below interior means for a constant image.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl MeanImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Image restricted to the values {0, 255}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, BinarizeError> {
        if pixels.len() != width * height || width == 0 || height == 0 {
            return Err(BinarizeError::PixelCount {
                width,
                height,
                actual: pixels.len(),
            });
        }
        if let Some(&bad) = pixels.iter().find(|&&p| p != 0 && p != 255) {
            return Err(BinarizeError::NotBinary(bad));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_gray(self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels,
        }
    }
}

/// Three stacked single-channel planes of equal dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    planes: [GrayImage; 3],
}

impl ColorImage {
    pub fn new(planes: [GrayImage; 3]) -> Result<Self, BinarizeError> {
        let (w, h) = (planes[0].width(), planes[0].height());
        if planes.iter().any(|p| p.width() != w || p.height() != h) {
            return Err(BinarizeError::PlaneMismatch);
        }
        Ok(Self { planes })
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn plane(&self, c: usize) -> &GrayImage {
        &self.planes[c]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut GrayImage {
        &mut self.planes[c]
    }

    pub fn planes(&self) -> &[GrayImage; 3] {
        &self.planes
    }
}

/// Single- or three-channel image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Image {
    Gray(GrayImage),
    Color(ColorImage),
}

impl Image {
    pub fn width(&self) -> usize {
        match self {
            Image::Gray(g) => g.width(),
            Image::Color(c) => c.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Image::Gray(g) => g.height(),
            Image::Color(c) => c.height(),
        }
    }

    pub fn channels(&self) -> usize {
        match self {
            Image::Gray(_) => 1,
            Image::Color(_) => 3,
        }
    }

    pub fn plane(&self, c: usize) -> &GrayImage {
        match self {
            Image::Gray(g) => {
                assert_eq!(c, 0, "gray image has a single plane");
                g
            }
            Image::Color(img) => img.plane(c),
        }
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width() == other.width()
            && self.height() == other.height()
            && self.channels() == other.channels()
    }
}

impl From<GrayImage> for Image {
    fn from(g: GrayImage) -> Self {
        Image::Gray(g)
    }
}

impl From<ColorImage> for Image {
    fn from(c: ColorImage) -> Self {
        Image::Color(c)
    }
}

/// Maps a pixel value onto [-1, 1]: y = 2p/255 - 1.
pub fn map_to_spin(p: u8) -> f64 {
    2.0 * f64::from(p) / 255.0 - 1.0
}

/// Global threshold: pixels strictly above `threshold` become 255, the rest 0.
pub fn binarize_global(img: &GrayImage, threshold: u8) -> BinaryImage {
    let pixels = img
        .pixels
        .iter()
        .map(|&p| if p > threshold { 255 } else { 0 })
        .collect();
    BinaryImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Mean of the k x k window centered on each pixel, with out-of-bounds
/// samples contributing zero. Computed from an integer summed-area table and
/// divided once per pixel, so there is no truncation before the comparison
/// in [`binarize_local_diff`].
pub fn local_mean(img: &GrayImage, k: usize) -> Result<MeanImage, BinarizeError> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(BinarizeError::BadKernel(k));
    }
    let (w, h) = (img.width, img.height);
    if k > 2 * w.min(h) - 1 {
        return Err(BinarizeError::KernelTooLarge {
            k,
            width: w,
            height: h,
        });
    }
    // sat[(y)(w+1) + x] = sum of pixels strictly above and left of (x, y).
    let mut sat = vec![0i64; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row_sum = 0i64;
        for x in 0..w {
            row_sum += i64::from(img.pixel(x, y));
            sat[(y + 1) * (w + 1) + (x + 1)] = sat[y * (w + 1) + (x + 1)] + row_sum;
        }
    }
    let r = (k / 2) as isize;
    let area = (k * k) as f64;
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let x0 = (x - r).clamp(0, w as isize) as usize;
            let y0 = (y - r).clamp(0, h as isize) as usize;
            let x1 = (x + r + 1).clamp(0, w as isize) as usize;
            let y1 = (y + r + 1).clamp(0, h as isize) as usize;
            let sum = sat[y1 * (w + 1) + x1] + sat[y0 * (w + 1) + x0]
                - sat[y0 * (w + 1) + x1]
                - sat[y1 * (w + 1) + x0];
            values.push(sum as f64 / area);
        }
    }
    Ok(MeanImage {
        width: w,
        height: h,
        values,
    })
}

/// Local differentiation: a pixel strictly brighter than its local mean
/// becomes 255, otherwise 0.
pub fn binarize_local_diff(img: &GrayImage, k: usize) -> Result<BinaryImage, BinarizeError> {
    let mean = local_mean(img, k)?;
    let pixels = img
        .pixels
        .iter()
        .zip(mean.values())
        .map(|(&p, &m)| if f64::from(p) > m { 255 } else { 0 })
        .collect();
    Ok(BinaryImage {
        width: img.width,
        height: img.height,
        pixels,
    })
}

/// How grayscale planes are converted to binary before training or recall.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinarizeMode {
    Global { threshold: u8 },
    LocalDiff { k_size: usize },
}

impl BinarizeMode {
    pub fn apply(&self, img: &GrayImage) -> Result<BinaryImage, BinarizeError> {
        match *self {
            BinarizeMode::Global { threshold } => Ok(binarize_global(img, threshold)),
            BinarizeMode::LocalDiff { k_size } => binarize_local_diff(img, k_size),
        }
    }
}

/// Row-major flattening: 255 maps to +1, 0 to -1.
pub fn image_to_pattern(img: &BinaryImage) -> BinaryPattern {
    BinaryPattern::from_signs(img.pixels.iter().map(|&p| p == 255))
}

/// Inverse of [`image_to_pattern`]: +1 maps to 255, -1 to 0.
pub fn pattern_to_image(
    pattern: &BinaryPattern,
    width: usize,
    height: usize,
) -> Result<BinaryImage, BinarizeError> {
    if pattern.len() != width * height {
        return Err(BinarizeError::PatternShape {
            len: pattern.len(),
            width,
            height,
        });
    }
    let pixels = pattern
        .spins()
        .iter()
        .map(|&s| if s == 1 { 255 } else { 0 })
        .collect();
    Ok(BinaryImage {
        width,
        height,
        pixels,
    })
}
