//! Support-image foreground: non-zero binarization, square closing and the
//! pixel-to-patch-grid vote.

use image::DynamicImage;

use crate::error::{Error, Result};
use crate::tensor_io::Tensor32;

pub const DEFAULT_CLOSING_RADIUS: usize = 2;
pub const DEFAULT_TAU: f64 = 0.5;

/// Binary mask at pixel resolution, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    height: usize,
    width: usize,
    bits: Vec<bool>,
}

impl PixelMask {
    pub fn new(height: usize, width: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != height * width {
            return Err(Error::validation(format!(
                "mask {height}x{width} needs {} bits, got {}",
                height * width,
                bits.len()
            )));
        }
        Ok(Self {
            height,
            width,
            bits,
        })
    }

    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::validation("ragged mask rows"));
        }
        let bits = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| v != 0))
            .collect();
        Self::new(height, width, bits)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, y: usize, x: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Binary mask over the patch grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchMask {
    hp: usize,
    wp: usize,
    bits: Vec<bool>,
}

impl PatchMask {
    pub fn all(hp: usize, wp: usize, value: bool) -> Self {
        Self {
            hp,
            wp,
            bits: vec![value; hp * wp],
        }
    }

    pub fn hp(&self) -> usize {
        self.hp
    }

    pub fn wp(&self) -> usize {
        self.wp
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.wp + col]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// 0.0/1.0 tensor of dims `[hp, wp]`, for debugging dumps.
    pub fn to_tensor(&self) -> Tensor32 {
        let data = self
            .bits
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect();
        Tensor32::new(vec![self.hp, self.wp], data).expect("mask dims are positive")
    }
}

/// Pixel is foreground iff any channel is non-zero.
pub fn binarize_nonzero(image: &DynamicImage) -> PixelMask {
    let (width, height) = (image.width() as usize, image.height() as usize);
    let bits = match image {
        DynamicImage::ImageLuma8(g) => g.as_raw().iter().map(|&v| v > 0).collect(),
        DynamicImage::ImageLuma16(g) => g.as_raw().iter().map(|&v| v > 0).collect(),
        other if other.color().has_color() || other.color().has_alpha() => {
            // Alpha is not intensity; only colour channels vote.
            let rgb = other.to_rgb16();
            rgb.pixels().map(|p| p.0.iter().any(|&c| c > 0)).collect()
        }
        other => other.to_luma16().as_raw().iter().map(|&v| v > 0).collect(),
    };
    PixelMask {
        height,
        width,
        bits,
    }
}

// Separable pass along one axis. `fill` is the value assumed outside the
// image: false for dilation (OR), true for erosion (AND).
fn sweep(mask: &PixelMask, radius: usize, horizontal: bool, dilate: bool) -> PixelMask {
    let (h, w) = (mask.height, mask.width);
    let mut out = vec![false; h * w];
    let (outer, inner) = if horizontal { (h, w) } else { (w, h) };
    let at = |o: usize, i: usize| if horizontal { o * w + i } else { i * w + o };
    for o in 0..outer {
        // Count of set bits in the in-image part of the window.
        let mut prefix = vec![0usize; inner + 1];
        for i in 0..inner {
            prefix[i + 1] = prefix[i] + mask.bits[at(o, i)] as usize;
        }
        for i in 0..inner {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(inner - 1);
            let ones = prefix[hi + 1] - prefix[lo];
            out[at(o, i)] = if dilate {
                ones > 0
            } else {
                ones == hi + 1 - lo
            };
        }
    }
    PixelMask {
        height: h,
        width: w,
        bits: out,
    }
}

pub fn dilate(mask: &PixelMask, radius: usize) -> PixelMask {
    sweep(&sweep(mask, radius, true, true), radius, false, true)
}

pub fn erode(mask: &PixelMask, radius: usize) -> PixelMask {
    sweep(&sweep(mask, radius, true, false), radius, false, false)
}

/// Closing with a `(2r+1)`-square element. Outside the image counts as
/// background while dilating and foreground while eroding, so the result
/// always contains the input.
pub fn morphological_close(mask: &PixelMask, radius: i64) -> Result<PixelMask> {
    if radius < 0 {
        return Err(Error::validation(format!(
            "closing radius must be >= 0, got {radius}"
        )));
    }
    let r = radius as usize;
    if r == 0 || mask.bits.is_empty() {
        return Ok(mask.clone());
    }
    Ok(erode(&dilate(mask, r), r))
}

/// A patch is foreground when at least `tau` of its `patch_size²` pixels are.
/// Trailing pixels that do not fill a whole patch are ignored.
pub fn to_patch_mask(mask: &PixelMask, patch_size: usize, tau: f64) -> Result<PatchMask> {
    if patch_size == 0 {
        return Err(Error::validation("patch_size must be >= 1"));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::validation(format!(
            "tau must be in (0, 1], got {tau}"
        )));
    }
    if mask.height < patch_size || mask.width < patch_size {
        return Err(Error::validation(format!(
            "mask {}x{} is smaller than one {patch_size}px patch",
            mask.height, mask.width
        )));
    }
    let hp = mask.height / patch_size;
    let wp = mask.width / patch_size;
    let area = (patch_size * patch_size) as f64;
    let mut bits = Vec::with_capacity(hp * wp);
    for pr in 0..hp {
        for pc in 0..wp {
            let mut count = 0usize;
            for y in pr * patch_size..(pr + 1) * patch_size {
                let row = &mask.bits[y * mask.width..(y + 1) * mask.width];
                count += row[pc * patch_size..(pc + 1) * patch_size]
                    .iter()
                    .filter(|&&b| b)
                    .count();
            }
            bits.push(count as f64 / area >= tau);
        }
    }
    Ok(PatchMask { hp, wp, bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use image::GrayImage;

    fn gray(rows: &[&[u8]]) -> DynamicImage {
        let h = rows.len() as u32;
        let w = rows[0].len() as u32;
        let raw = rows.iter().flat_map(|r| r.iter().copied()).collect();
        DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, raw).unwrap())
    }

    fn random_mask(rng: &mut SplitMix64, h: usize, w: usize, p: f64) -> PixelMask {
        let bits = (0..h * w).map(|_| rng.next_f64() < p).collect();
        PixelMask::new(h, w, bits).unwrap()
    }

    #[test]
    fn binarize_examples() {
        let m = binarize_nonzero(&gray(&[&[0, 5], &[0, 0]]));
        assert_eq!(m, PixelMask::from_rows(&[&[0, 1], &[0, 0]]).unwrap());
        assert_eq!(binarize_nonzero(&gray(&[&[0, 0], &[0, 0]])).count_ones(), 0);
        assert_eq!(
            binarize_nonzero(&gray(&[&[1, 9], &[255, 3]])).count_ones(),
            4
        );
    }

    #[test]
    fn binarize_rgb_any_channel() {
        let img = image::RgbImage::from_raw(2, 1, vec![0, 0, 0, 0, 0, 7]).unwrap();
        let m = binarize_nonzero(&DynamicImage::ImageRgb8(img));
        assert_eq!(m.bits(), &[false, true]);
    }

    #[test]
    fn radius_zero_is_identity() {
        let mut rng = SplitMix64::new(1);
        let m = random_mask(&mut rng, 7, 5, 0.5);
        assert_eq!(morphological_close(&m, 0).unwrap(), m);
    }

    #[test]
    fn negative_radius_rejected() {
        let m = PixelMask::new(1, 1, vec![true]).unwrap();
        assert!(matches!(
            morphological_close(&m, -1),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn closes_single_hole() {
        let mut bits = vec![true; 81];
        bits[40] = false;
        let m = PixelMask::new(9, 9, bits).unwrap();
        let closed = morphological_close(&m, 1).unwrap();
        assert_eq!(closed.count_ones(), 81);
    }

    #[test]
    fn border_touching_mask_not_shrunk() {
        let m = PixelMask::from_rows(&[&[1, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 0, 0]]).unwrap();
        let closed = morphological_close(&m, 2).unwrap();
        for (a, b) in m.bits().iter().zip(closed.bits()) {
            assert!(!a | b);
        }
    }

    #[test]
    fn closing_is_extensive_and_idempotent() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..50 {
            let m = random_mask(&mut rng, 20, 17, 0.6);
            for r in 1..=3 {
                let once = morphological_close(&m, r).unwrap();
                assert!(m.bits().iter().zip(once.bits()).all(|(a, b)| !a | b));
                assert_eq!(morphological_close(&once, r).unwrap(), once);
            }
        }
    }

    #[test]
    fn patch_vote() {
        let full = PixelMask::new(4, 4, vec![true; 16]).unwrap();
        let pm = to_patch_mask(&full, 2, 0.5).unwrap();
        assert_eq!((pm.hp(), pm.wp()), (2, 2));
        assert_eq!(pm.count_ones(), 4);

        let three = PixelMask::from_rows(&[&[1, 1], &[1, 0]]).unwrap();
        assert!(to_patch_mask(&three, 2, 0.5).unwrap().get(0, 0));
        let one = PixelMask::from_rows(&[&[1, 0], &[0, 0]]).unwrap();
        assert!(!to_patch_mask(&one, 2, 0.5).unwrap().get(0, 0));
    }

    #[test]
    fn patch_grid_floors_dims() {
        let m = PixelMask::new(9, 13, vec![true; 117]).unwrap();
        let pm = to_patch_mask(&m, 4, 1.0).unwrap();
        assert_eq!((pm.hp(), pm.wp()), (2, 3));
    }

    #[test]
    fn patch_mask_preconditions() {
        let m = PixelMask::new(2, 2, vec![true; 4]).unwrap();
        assert!(to_patch_mask(&m, 3, 0.5).is_err());
        assert!(to_patch_mask(&m, 0, 0.5).is_err());
        assert!(to_patch_mask(&m, 1, 0.0).is_err());
        assert!(to_patch_mask(&m, 1, 1.5).is_err());
    }

    #[test]
    fn patch_mask_monotone_in_tau() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..40 {
            let m = random_mask(&mut rng, 16, 16, 0.5);
            let taus = [0.1, 0.25, 0.5, 0.75, 1.0];
            for pair in taus.windows(2) {
                let lo = to_patch_mask(&m, 4, pair[0]).unwrap();
                let hi = to_patch_mask(&m, 4, pair[1]).unwrap();
                assert!(lo.bits().iter().zip(hi.bits()).all(|(l, h)| *l | !h));
            }
        }
    }
}
