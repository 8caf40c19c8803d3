//! Trigger injectors for the evaluation harness: solid corner patches and
//! alpha-blended overlays. Both operate on single images; dataset-level
//! poison ratios live in [`crate::eval`].

use thiserror::Error;

use crate::binarize::{ColorImage, GrayImage, Image};

#[derive(Debug, Error, PartialEq)]
pub enum AttackError {
    #[error("patch {pw}x{ph} does not fit a {w}x{h} image")]
    PatchTooLarge {
        pw: usize,
        ph: usize,
        w: usize,
        h: usize,
    },
    #[error("patch dimensions must be positive")]
    EmptyPatch,
    #[error("overlay shape does not match the target image")]
    OverlayShape,
    #[error("alpha {0} outside [0, 1]")]
    BadAlpha(f64),
}

/// Which image corner a patch is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Corner {
    TopLeft,
    TopRight,
    BottomLeft,
    #[default]
    BottomRight,
}

/// A solid rectangular patch stamped onto every channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchTrigger {
    pub width: usize,
    pub height: usize,
    pub value: u8,
    pub anchor: Corner,
}

impl PatchTrigger {
    /// The classic 3x3 white square in the bottom-right corner.
    pub fn white_corner() -> Self {
        Self {
            width: 3,
            height: 3,
            value: 255,
            anchor: Corner::BottomRight,
        }
    }

    /// Top-left coordinates of the patch inside a w x h image.
    pub fn origin(&self, w: usize, h: usize) -> (usize, usize) {
        match self.anchor {
            Corner::TopLeft => (0, 0),
            Corner::TopRight => (w - self.width, 0),
            Corner::BottomLeft => (0, h - self.height),
            Corner::BottomRight => (w - self.width, h - self.height),
        }
    }
}

/// What a poisoning pass stamps onto an image.
#[derive(Debug, Clone, PartialEq)]
pub enum TriggerKind {
    Patch(PatchTrigger),
    Blend { overlay: Image, alpha: f64 },
}

/// A trigger plus the label the attack forces.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerSpec {
    pub kind: TriggerKind,
    pub target_label: usize,
}

impl TriggerSpec {
    pub fn apply(&self, img: &Image) -> Result<Image, AttackError> {
        match &self.kind {
            TriggerKind::Patch(patch) => inject_patch(img, patch),
            TriggerKind::Blend { overlay, alpha } => inject_blend(img, overlay, *alpha),
        }
    }
}

fn stamp_plane(plane: &mut GrayImage, patch: &PatchTrigger, x0: usize, y0: usize) {
    for dy in 0..patch.height {
        for dx in 0..patch.width {
            plane.set_pixel(x0 + dx, y0 + dy, patch.value);
        }
    }
}

/// Overwrites the anchored rectangle with the patch value on every channel;
/// all other pixels are untouched. Idempotent.
pub fn inject_patch(img: &Image, patch: &PatchTrigger) -> Result<Image, AttackError> {
    if patch.width == 0 || patch.height == 0 {
        return Err(AttackError::EmptyPatch);
    }
    let (w, h) = (img.width(), img.height());
    if patch.width > w || patch.height > h {
        return Err(AttackError::PatchTooLarge {
            pw: patch.width,
            ph: patch.height,
            w,
            h,
        });
    }
    let (x0, y0) = patch.origin(w, h);
    match img {
        Image::Gray(g) => {
            let mut out = g.clone();
            stamp_plane(&mut out, patch, x0, y0);
            Ok(Image::Gray(out))
        }
        Image::Color(c) => {
            let mut out = c.clone();
            for plane in 0..3 {
                stamp_plane(out.plane_mut(plane), patch, x0, y0);
            }
            Ok(Image::Color(out))
        }
    }
}

// Round half away from zero, then clamp into pixel range.
fn blend_pixel(p: u8, o: u8, alpha: f64) -> u8 {
    let v = ((1.0 - alpha) * f64::from(p) + alpha * f64::from(o)).round();
    v.clamp(0.0, 255.0) as u8
}

fn blend_plane(p: &GrayImage, o: &GrayImage, alpha: f64) -> GrayImage {
    let pixels = p
        .pixels()
        .iter()
        .zip(o.pixels())
        .map(|(&a, &b)| blend_pixel(a, b, alpha))
        .collect();
    GrayImage::new(p.width(), p.height(), pixels).expect("same shape as input")
}

/// Alpha-blends `overlay` over `img`: pixel' = round((1-alpha)p + alpha*o).
pub fn inject_blend(img: &Image, overlay: &Image, alpha: f64) -> Result<Image, AttackError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(AttackError::BadAlpha(alpha));
    }
    if !img.same_shape(overlay) {
        return Err(AttackError::OverlayShape);
    }
    match (img, overlay) {
        (Image::Gray(p), Image::Gray(o)) => Ok(Image::Gray(blend_plane(p, o, alpha))),
        (Image::Color(p), Image::Color(o)) => {
            let planes = [
                blend_plane(p.plane(0), o.plane(0), alpha),
                blend_plane(p.plane(1), o.plane(1), alpha),
                blend_plane(p.plane(2), o.plane(2), alpha),
            ];
            Ok(Image::Color(
                ColorImage::new(planes).expect("same shape as input"),
            ))
        }
        _ => Err(AttackError::OverlayShape),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn black(w: usize, h: usize) -> Image {
        Image::Gray(GrayImage::filled(w, h, 0))
    }

    #[test]
    fn patch_lands_in_the_bottom_right_corner() {
        let img = black(28, 28);
        let out = inject_patch(&img, &PatchTrigger::white_corner()).unwrap();
        let Image::Gray(g) = &out else { unreachable!() };
        let mut changed = 0;
        for y in 0..28 {
            for x in 0..28 {
                if g.pixel(x, y) == 255 {
                    changed += 1;
                    assert!((25..28).contains(&x) && (25..28).contains(&y), "({x},{y})");
                }
            }
        }
        assert_eq!(changed, 9);
    }

    #[test]
    fn full_image_patch_replaces_everything() {
        let img = black(5, 4);
        let patch = PatchTrigger {
            width: 5,
            height: 4,
            value: 200,
            anchor: Corner::TopLeft,
        };
        let out = inject_patch(&img, &patch).unwrap();
        let Image::Gray(g) = &out else { unreachable!() };
        assert!(g.pixels().iter().all(|&p| p == 200));
    }

    #[test]
    fn patch_is_idempotent_and_touches_all_channels() {
        let color = Image::Color(
            ColorImage::new([
                GrayImage::filled(8, 8, 10),
                GrayImage::filled(8, 8, 20),
                GrayImage::filled(8, 8, 30),
            ])
            .unwrap(),
        );
        let patch = PatchTrigger::white_corner();
        let once = inject_patch(&color, &patch).unwrap();
        let twice = inject_patch(&once, &patch).unwrap();
        assert_eq!(once, twice);
        let Image::Color(c) = &once else {
            unreachable!()
        };
        for plane in 0..3 {
            assert_eq!(c.plane(plane).pixel(7, 7), 255);
            assert_ne!(c.plane(plane).pixel(0, 0), 255);
        }
    }

    #[test]
    fn oversized_patch_is_rejected() {
        let img = black(2, 2);
        let patch = PatchTrigger {
            width: 3,
            height: 3,
            value: 255,
            anchor: Corner::BottomRight,
        };
        assert!(matches!(
            inject_patch(&img, &patch),
            Err(AttackError::PatchTooLarge { .. })
        ));
    }

    #[test]
    fn blend_endpoints_and_rounding() {
        let img = Image::Gray(GrayImage::filled(2, 2, 100));
        let overlay = Image::Gray(GrayImage::filled(2, 2, 200));

        let same = inject_blend(&img, &overlay, 0.0).unwrap();
        assert_eq!(same, img);

        let swapped = inject_blend(&img, &overlay, 1.0).unwrap();
        assert_eq!(swapped, overlay);

        // (1-0.065)*100 + 0.065*200 = 106.5, round half away from zero.
        let Image::Gray(g) = inject_blend(&img, &overlay, 0.065).unwrap() else {
            unreachable!()
        };
        assert!(g.pixels().iter().all(|&p| p == 107));
    }

    #[test]
    fn blend_rejects_shape_mismatch_and_bad_alpha() {
        let img = black(3, 3);
        let overlay = black(4, 3);
        assert_eq!(
            inject_blend(&img, &overlay, 0.5).unwrap_err(),
            AttackError::OverlayShape
        );
        assert_eq!(
            inject_blend(&img, &img.clone(), 1.5).unwrap_err(),
            AttackError::BadAlpha(1.5)
        );
    }

    proptest! {
        #[test]
        fn blend_is_monotone_and_bounded(p in any::<u8>(), o in any::<u8>(), steps in 1usize..20) {
            let lo = p.min(o);
            let hi = p.max(o);
            let mut prev = blend_pixel(p, o, 0.0);
            for s in 0..=steps {
                let alpha = s as f64 / steps as f64;
                let v = blend_pixel(p, o, alpha);
                prop_assert!(v >= lo && v <= hi);
                if o >= p {
                    prop_assert!(v >= prev);
                } else {
                    prop_assert!(v <= prev);
                }
                prev = v;
            }
        }

        #[test]
        fn patch_changes_exactly_the_patch_area(
            w in 3usize..16,
            h in 3usize..16,
            pw in 1usize..3,
            ph in 1usize..3,
        ) {
            let img = Image::Gray(GrayImage::filled(w, h, 7));
            let patch = PatchTrigger { width: pw, height: ph, value: 255, anchor: Corner::BottomRight };
            let out = inject_patch(&img, &patch).unwrap();
            let Image::Gray(g) = out else { unreachable!() };
            let changed = g.pixels().iter().filter(|&&p| p == 255).count();
            prop_assert_eq!(changed, pw * ph);
        }
    }
}
