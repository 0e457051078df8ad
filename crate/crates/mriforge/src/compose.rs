//! Localizing artifacts: foreground extraction, circular region sampling,
//! compositing and histogram matching.
//!
//! Corruption is confined to a handful of circular regions over brain
//! tissue. The tissue mask comes from Otsu's threshold on a 256-bin
//! histogram; candidate circles are rejection-sampled until at least half
//! their area lies on tissue. After splicing artifact pixels into the clean
//! slice, the composite's histogram is matched back onto the clean slice's
//! so that a detector cannot cheat by spotting a global brightness shift.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image2D;
use crate::rng::StreamRng;

/// Number of histogram bins used for both Otsu thresholding and histogram
/// matching.
pub const INTENSITY_BINS: usize = 256;

/// Minimum fraction of a region's area that must land on tissue.
pub const MIN_FOREGROUND_OVERLAP: f64 = 0.5;

/// Attempts per region before giving up on placing it.
pub const ROI_PLACEMENT_TRIES: usize = 200;

/// A circular region of interest, in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleROI {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl CircleROI {
    /// Disk membership; the boundary belongs to the disk.
    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        let dx = x as f64 - self.cx;
        let dy = y as f64 - self.cy;
        dx * dx + dy * dy <= self.r * self.r
    }

    /// True if the disk lies fully inside a `width` x `height` frame.
    pub fn in_frame(&self, width: usize, height: usize) -> bool {
        self.cx - self.r >= 0.0
            && self.cy - self.r >= 0.0
            && self.cx + self.r <= (width - 1) as f64
            && self.cy + self.r <= (height - 1) as f64
    }
}

/// An axis-aligned box with half-open extents: pixels `x_min <= x < x_max`,
/// `y_min <= y < y_max`. Serializes as the integer quadruple
/// `[x_min, y_min, x_max, y_max]`, the same shape detection files use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BBox {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl Serialize for BBox {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.corners().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BBox {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let corners = <[u32; 4]>::deserialize(deserializer)?;
        BBox::from_corners(corners).map_err(serde::de::Error::custom)
    }
}

impl BBox {
    pub fn new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Result<Self> {
        if x_min >= x_max || y_min >= y_max {
            return Err(Error::DegenerateBox(format!(
                "[{x_min}, {y_min}, {x_max}, {y_max}] has no area"
            )));
        }
        Ok(BBox {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn from_corners(c: [u32; 4]) -> Result<Self> {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn corners(&self) -> [u32; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.y_max - self.y_min
    }

    #[inline]
    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    #[inline]
    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x_min && x < self.x_max && y >= self.y_min && y < self.y_max
    }

    /// Intersection box, if any.
    pub fn intersect(&self, other: &BBox) -> Option<BBox> {
        let x_min = self.x_min.max(other.x_min);
        let y_min = self.y_min.max(other.y_min);
        let x_max = self.x_max.min(other.x_max);
        let y_max = self.y_max.min(other.y_max);
        if x_min < x_max && y_min < y_max {
            Some(BBox {
                x_min,
                y_min,
                x_max,
                y_max,
            })
        } else {
            None
        }
    }

    pub fn fits_in(&self, width: usize, height: usize) -> bool {
        self.x_max as usize <= width && self.y_max as usize <= height
    }
}

/// Histogram bin for an intensity in `[0, 1]`.
#[inline]
fn intensity_bin(v: f64) -> usize {
    let b = (v.clamp(0.0, 1.0) * (INTENSITY_BINS - 1) as f64).round() as usize;
    b.min(INTENSITY_BINS - 1)
}

fn histogram(img: &Image2D) -> [u64; INTENSITY_BINS] {
    let mut h = [0u64; INTENSITY_BINS];
    for &v in img.data() {
        h[intensity_bin(v)] += 1;
    }
    h
}

/// Otsu's threshold on a 256-bin histogram: the bin index that maximizes
/// inter-class variance, with the background class spanning bins below the
/// returned index. Returns `None` when the image has no spread (a single
/// occupied bin).
pub fn otsu_threshold_bin(img: &Image2D) -> Option<usize> {
    let hist = histogram(img);
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return None;
    }
    let total_f = total as f64;
    let global_mean: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum::<f64>()
        / total_f;

    let mut best: Option<(f64, usize)> = None;
    let mut w_bg = 0.0; // background weight
    let mut sum_bg = 0.0; // background intensity mass
    for t in 1..INTENSITY_BINS {
        w_bg += hist[t - 1] as f64;
        sum_bg += (t - 1) as f64 * hist[t - 1] as f64;
        let w_fg = total_f - w_bg;
        if w_bg == 0.0 || w_fg == 0.0 {
            continue;
        }
        let mean_bg = sum_bg / w_bg;
        let mean_fg = (global_mean * total_f - sum_bg) / w_fg;
        let between = w_bg * w_fg * (mean_bg - mean_fg) * (mean_bg - mean_fg);
        // Strict comparison keeps the smallest argmax on plateaus.
        if best.map_or(true, |(b, _)| between > b) {
            best = Some((between, t));
        }
    }
    best.map(|(_, t)| t)
}

/// Tissue mask: pixels whose histogram bin reaches Otsu's threshold. A
/// constant image yields an all-false mask.
pub fn foreground_mask(img: &Image2D) -> Vec<bool> {
    match otsu_threshold_bin(img) {
        Some(t) => img.data().iter().map(|&v| intensity_bin(v) >= t).collect(),
        None => vec![false; img.len()],
    }
}

/// Fraction of pixels the mask marks as tissue.
pub fn foreground_fraction(img: &Image2D) -> f64 {
    if img.is_empty() {
        return 0.0;
    }
    let mask = foreground_mask(img);
    mask.iter().filter(|&&m| m).count() as f64 / mask.len() as f64
}

/// Draws circular regions over tissue.
///
/// The number of regions is uniform in `count_range`; each radius is
/// uniform in `radius_range`. A candidate is accepted when its disk sits
/// inside the frame and at least half of it overlaps the Otsu foreground;
/// each region gets [`ROI_PLACEMENT_TRIES`] attempts, after which it is
/// dropped. Placing none at all is the "no foreground" error.
///
/// On frames smaller than 96 px the radius range is scaled by `width/256`
/// (with a floor of 8 px so regions stay meaningfully sized).
pub fn sample_rois(
    rng: &mut StreamRng,
    img: &Image2D,
    count_range: (usize, usize),
    radius_range: (f64, f64),
) -> Result<Vec<CircleROI>> {
    let (w, h) = (img.width(), img.height());
    let mask = foreground_mask(img);

    let (mut r_lo, mut r_hi) = radius_range;
    if w.min(h) < 96 {
        let scale = w as f64 / 256.0;
        r_lo = (r_lo * scale).max(8.0);
        r_hi = (r_hi * scale).max(r_lo + 1.0);
    }
    // Never let a disk outgrow the frame.
    let r_cap = ((w.min(h) - 1) as f64 / 2.0 - 1.0).max(1.0);
    r_lo = r_lo.min(r_cap);
    r_hi = r_hi.min(r_cap).max(r_lo);

    let count = rng.random_range(count_range.0..=count_range.1);
    let mut rois = Vec::with_capacity(count);
    for _ in 0..count {
        for _try in 0..ROI_PLACEMENT_TRIES {
            let r = rng.random_range(r_lo..=r_hi);
            let cx = rng.random_range(r..=(w - 1) as f64 - r);
            let cy = rng.random_range(r..=(h - 1) as f64 - r);
            let roi = CircleROI { cx, cy, r };
            if roi_foreground_fraction(&roi, &mask, w, h) >= MIN_FOREGROUND_OVERLAP {
                rois.push(roi);
                break;
            }
        }
    }
    if rois.is_empty() {
        return Err(Error::NoForeground);
    }
    Ok(rois)
}

fn roi_foreground_fraction(roi: &CircleROI, mask: &[bool], w: usize, h: usize) -> f64 {
    let x0 = (roi.cx - roi.r).floor().max(0.0) as usize;
    let y0 = (roi.cy - roi.r).floor().max(0.0) as usize;
    let x1 = ((roi.cx + roi.r).ceil() as usize).min(w - 1);
    let y1 = ((roi.cy + roi.r).ceil() as usize).min(h - 1);
    let mut inside = 0u64;
    let mut on_tissue = 0u64;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if roi.contains(x, y) {
                inside += 1;
                if mask[y * w + x] {
                    on_tissue += 1;
                }
            }
        }
    }
    if inside == 0 {
        0.0
    } else {
        on_tissue as f64 / inside as f64
    }
}

/// Splices `artifact` pixels into `clean` inside the region disks and
/// clips the result to `[0, 1]`. Pixels outside every disk are copied from
/// `clean` bit-exactly.
pub fn composite(clean: &Image2D, artifact: &Image2D, rois: &[CircleROI]) -> Result<Image2D> {
    if !clean.same_size(artifact) {
        return Err(Error::DimensionMismatch(
            clean.width(),
            clean.height(),
            artifact.width(),
            artifact.height(),
        ));
    }
    let (w, h) = (clean.width(), clean.height());
    let out = Image2D::from_fn(w, h, |x, y| {
        if rois.iter().any(|roi| roi.contains(x, y)) {
            artifact.get(x, y).clamp(0.0, 1.0)
        } else {
            clean.get(x, y)
        }
    });
    Ok(out)
}

/// Maps `src`'s intensity distribution onto `reference`'s via 256-bin CDF
/// matching: source bin `s` maps to the smallest reference bin whose CDF
/// reaches the source CDF at `s`. The mapping is monotone by construction,
/// and matching an image against itself reproduces every occupied bin.
pub fn histogram_match(src: &Image2D, reference: &Image2D) -> Result<Image2D> {
    if !src.same_size(reference) {
        return Err(Error::DimensionMismatch(
            src.width(),
            src.height(),
            reference.width(),
            reference.height(),
        ));
    }
    let h_src = histogram(src);
    let h_ref = histogram(reference);

    let mut cdf_src = [0u64; INTENSITY_BINS];
    let mut cdf_ref = [0u64; INTENSITY_BINS];
    let mut acc = 0u64;
    for i in 0..INTENSITY_BINS {
        acc += h_src[i];
        cdf_src[i] = acc;
    }
    acc = 0;
    for i in 0..INTENSITY_BINS {
        acc += h_ref[i];
        cdf_ref[i] = acc;
    }

    // lut[s] = smallest r with cdf_ref[r] >= cdf_src[s]; advance r
    // monotonically since cdf_src is non-decreasing.
    let mut lut = [0usize; INTENSITY_BINS];
    let mut r = 0usize;
    for (s, lut_s) in lut.iter_mut().enumerate() {
        while r < INTENSITY_BINS - 1 && cdf_ref[r] < cdf_src[s] {
            r += 1;
        }
        *lut_s = r;
    }

    let scale = 1.0 / (INTENSITY_BINS - 1) as f64;
    let data = src
        .data()
        .iter()
        .map(|&v| lut[intensity_bin(v)] as f64 * scale)
        .collect();
    Image2D::new(src.width(), src.height(), data)
}

/// Axis-aligned boxes circumscribing the region disks, clipped to the
/// frame: `[floor(cx - r), floor(cy - r), ceil(cx + r), ceil(cy + r)]`.
/// One box per region, in order.
pub fn rois_to_bboxes(rois: &[CircleROI], width: usize, height: usize) -> Vec<BBox> {
    rois.iter()
        .map(|roi| {
            let x_min = (roi.cx - roi.r).floor().max(0.0) as u32;
            let y_min = (roi.cy - roi.r).floor().max(0.0) as u32;
            let x_max = ((roi.cx + roi.r).ceil() as u32).min(width as u32);
            let y_max = ((roi.cy + roi.r).ceil() as u32).min(height as u32);
            BBox {
                x_min,
                y_min,
                x_max,
                y_max,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    /// Brute-force Otsu: recompute class weights and means from scratch for
    /// every candidate threshold. Slower but independent of the cumulative
    /// formulation above.
    fn otsu_brute_force(img: &Image2D) -> Option<usize> {
        let hist = histogram(img);
        let total: u64 = hist.iter().sum();
        let mut best: Option<(f64, usize)> = None;
        for t in 1..INTENSITY_BINS {
            let w_bg: u64 = hist[..t].iter().sum();
            let w_fg: u64 = hist[t..].iter().sum();
            if w_bg == 0 || w_fg == 0 {
                continue;
            }
            let mean = |range: std::ops::Range<usize>| -> f64 {
                let mass: f64 = range.clone().map(|i| i as f64 * hist[i] as f64).sum();
                let weight: u64 = hist[range].iter().sum();
                mass / weight as f64
            };
            let m_bg = mean(0..t);
            let m_fg = mean(t..INTENSITY_BINS);
            let between = (w_bg as f64 / total as f64)
                * (w_fg as f64 / total as f64)
                * (m_bg - m_fg)
                * (m_bg - m_fg);
            if best.map_or(true, |(b, _)| between > b) {
                best = Some((between, t));
            }
        }
        best.map(|(_, t)| t)
    }

    fn noisy_bimodal(seed: u64) -> Image2D {
        let mut rng = StreamRng::seed_from_u64(seed);
        Image2D::from_fn(64, 64, |x, _| {
            let base = if x < 32 { 0.2 } else { 0.75 };
            (base + rng.random_range(-0.1..0.1f64)).clamp(0.0, 1.0)
        })
    }

    #[test]
    fn otsu_matches_brute_force_on_random_images() {
        for seed in 0..20u64 {
            let img = noisy_bimodal(seed);
            assert_eq!(otsu_threshold_bin(&img), otsu_brute_force(&img));
        }
        // Uniform noise too, where the threshold is less obvious.
        for seed in 100..110u64 {
            let mut rng = StreamRng::seed_from_u64(seed);
            let img = Image2D::from_fn(40, 40, |_, _| rng.random::<f64>());
            assert_eq!(otsu_threshold_bin(&img), otsu_brute_force(&img));
        }
    }

    #[test]
    fn bimodal_image_splits_into_the_bright_half() {
        let img = Image2D::from_fn(64, 64, |x, _| if x < 32 { 0.1 } else { 0.9 });
        let mask = foreground_mask(&img);
        for y in 0..64 {
            for x in 0..64 {
                assert_eq!(mask[y * 64 + x], x >= 32);
            }
        }
        assert!((foreground_fraction(&img) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_image_has_no_foreground() {
        let img = Image2D::from_fn(16, 16, |_, _| 0.4);
        assert_eq!(otsu_threshold_bin(&img), None);
        assert!(foreground_mask(&img).iter().all(|&m| !m));
    }

    #[test]
    fn sampled_rois_satisfy_their_contract() {
        let img = noisy_bimodal(3);
        let mask = foreground_mask(&img);
        let mut rng = StreamRng::seed_from_u64(9);
        for _ in 0..20 {
            let rois = sample_rois(&mut rng, &img, (2, 6), (8.0, 20.0)).unwrap();
            assert!(!rois.is_empty() && rois.len() <= 6);
            for roi in &rois {
                assert!(roi.in_frame(64, 64));
                assert!((8.0..=20.0).contains(&roi.r));
                assert!(
                    roi_foreground_fraction(roi, &mask, 64, 64) >= MIN_FOREGROUND_OVERLAP
                );
            }
        }
    }

    #[test]
    fn sampling_on_black_image_reports_no_foreground() {
        let img = Image2D::zeros(64, 64);
        let mut rng = StreamRng::seed_from_u64(1);
        assert!(matches!(
            sample_rois(&mut rng, &img, (2, 6), (8.0, 20.0)),
            Err(Error::NoForeground)
        ));
    }

    #[test]
    fn composite_touches_only_the_disks() {
        let clean = noisy_bimodal(5);
        let artifact = Image2D::from_fn(64, 64, |_, _| 2.0); // deliberately out of range
        let rois = vec![
            CircleROI {
                cx: 20.3,
                cy: 22.7,
                r: 6.1,
            },
            CircleROI {
                cx: 45.0,
                cy: 40.5,
                r: 8.2,
            },
        ];
        let out = composite(&clean, &artifact, &rois).unwrap();
        for y in 0..64 {
            for x in 0..64 {
                let inside = rois.iter().any(|r| r.contains(x, y));
                if inside {
                    // Out-of-range artifact values must be clipped.
                    assert_eq!(out.get(x, y), 1.0);
                } else {
                    assert_eq!(out.get(x, y).to_bits(), clean.get(x, y).to_bits());
                }
            }
        }
    }

    #[test]
    fn composite_rejects_mismatched_sizes() {
        let a = Image2D::zeros(8, 8);
        let b = Image2D::zeros(9, 8);
        assert!(matches!(
            composite(&a, &b, &[]),
            Err(Error::DimensionMismatch(..))
        ));
    }

    /// Earth-mover's distance between 256-bin histograms, computed as the
    /// L1 distance between CDFs. Used as an independent check that matching
    /// actually moves the distribution onto the reference.
    fn emd(a: &Image2D, b: &Image2D) -> f64 {
        let (ha, hb) = (histogram(a), histogram(b));
        let n = a.len() as f64;
        let mut ca = 0.0;
        let mut cb = 0.0;
        let mut d = 0.0;
        for i in 0..INTENSITY_BINS {
            ca += ha[i] as f64 / n;
            cb += hb[i] as f64 / n;
            d += (ca - cb).abs();
        }
        d
    }

    #[test]
    fn histogram_match_brings_distributions_together() {
        let reference = noisy_bimodal(11);
        let mut rng = StreamRng::seed_from_u64(12);
        // A brighter, differently-shaped source.
        let src = Image2D::from_fn(64, 64, |_, _| rng.random_range(0.3..0.95));
        let before = emd(&src, &reference);
        let matched = histogram_match(&src, &reference).unwrap();
        let after = emd(&matched, &reference);
        assert!(
            after < before * 0.2,
            "EMD only moved from {before:.3} to {after:.3}"
        );
    }

    #[test]
    fn histogram_match_is_monotone_and_fixes_self_matching() {
        let img = noisy_bimodal(13);
        let matched = histogram_match(&img, &img).unwrap();
        // Self-matching reproduces each pixel's own bin.
        for (&orig, &out) in img.data().iter().zip(matched.data()) {
            assert_eq!(intensity_bin(orig), intensity_bin(out));
        }
        // Monotonicity: a brighter input pixel never maps below a darker one.
        let mut pairs: Vec<(f64, f64)> = img
            .data()
            .iter()
            .copied()
            .zip(matched.data().iter().copied())
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pairs.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn bboxes_circumscribe_their_disks() {
        let roi = CircleROI {
            cx: 50.0,
            cy: 60.0,
            r: 10.0,
        };
        let boxes = rois_to_bboxes(&[roi], 128, 128);
        assert_eq!(boxes[0].corners(), [40, 50, 60, 70]);

        // A circle tangent to the frame edge clips to it.
        let edge = CircleROI {
            cx: 10.0,
            cy: 10.0,
            r: 10.0,
        };
        let boxes = rois_to_bboxes(&[edge], 128, 128);
        assert_eq!(boxes[0].corners(), [0, 0, 20, 20]);
    }

    #[test]
    fn generic_disks_lie_inside_their_boxes() {
        // Brute-force scan with non-integral geometry, as produced by the
        // samplers.
        let mut rng = StreamRng::seed_from_u64(21);
        for _ in 0..50 {
            let roi = CircleROI {
                cx: rng.random_range(20.0..100.0),
                cy: rng.random_range(20.0..100.0),
                r: rng.random_range(5.0..15.0),
            };
            let b = rois_to_bboxes(&[roi], 128, 128)[0];
            for y in 0..128 {
                for x in 0..128 {
                    if roi.contains(x, y) {
                        assert!(
                            b.contains(x as u32, y as u32),
                            "disk pixel ({x}, {y}) escapes box {:?}",
                            b.corners()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn bbox_geometry_helpers() {
        let a = BBox::new(0, 0, 10, 10).unwrap();
        let b = BBox::new(5, 5, 15, 15).unwrap();
        assert_eq!(a.area(), 100);
        assert_eq!(a.intersect(&b).unwrap().corners(), [5, 5, 10, 10]);
        assert!(a.intersect(&BBox::new(20, 20, 30, 30).unwrap()).is_none());
        assert!(BBox::new(5, 5, 5, 10).is_err());
    }
}
