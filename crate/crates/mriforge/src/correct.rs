//! Reference correction utilities.
//!
//! External restoration models are the real subject of evaluation; this
//! module supplies the two pieces the harness itself needs: splicing
//! per-box corrected content back into a frame, and a deliberately simple
//! Gaussian-blur baseline that any learned model should beat.

use crate::compose::BBox;
use crate::error::{Error, Result};
use crate::image::Image2D;

/// Separable Gaussian blur, kernel truncated at three standard deviations,
/// borders clamped. A sigma small enough that the kernel has no off-center
/// support degenerates to the identity.
pub fn gaussian_blur(img: &Image2D, sigma: f64) -> Image2D {
    let radius = (3.0 * sigma).floor() as i64;
    if radius < 1 {
        return img.clone();
    }
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for i in -radius..=radius {
        let x = i as f64;
        kernel.push((-x * x / (2.0 * sigma * sigma)).exp());
    }
    let norm: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= norm;
    }

    let (w, h) = (img.width() as i64, img.height() as i64);
    // Horizontal pass.
    let mut tmp = Image2D::zeros(img.width(), img.height());
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let sx = (x + ki as i64 - radius).clamp(0, w - 1);
                acc += k * img.get(sx as usize, y as usize);
            }
            tmp.set(x as usize, y as usize, acc);
        }
    }
    // Vertical pass.
    let mut out = Image2D::zeros(img.width(), img.height());
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, k) in kernel.iter().enumerate() {
                let sy = (y + ki as i64 - radius).clamp(0, h - 1);
                acc += k * tmp.get(x as usize, sy as usize);
            }
            out.set(x as usize, y as usize, acc);
        }
    }
    out
}

/// Replaces the pixels inside each box with the corresponding pixels of
/// `corrected`, leaving the rest of `original` bit-exact. Boxes must fit
/// the frame.
pub fn composite_correction(
    original: &Image2D,
    corrected: &Image2D,
    boxes: &[BBox],
) -> Result<Image2D> {
    if !original.same_size(corrected) {
        return Err(Error::DimensionMismatch(
            original.width(),
            original.height(),
            corrected.width(),
            corrected.height(),
        ));
    }
    for b in boxes {
        if !b.fits_in(original.width(), original.height()) {
            return Err(Error::DegenerateBox(format!(
                "box {:?} exceeds {}x{} frame",
                b.corners(),
                original.width(),
                original.height()
            )));
        }
    }
    let mut out = original.clone();
    for b in boxes {
        for y in b.y_min..b.y_max {
            for x in b.x_min..b.x_max {
                out.set(x as usize, y as usize, corrected.get(x as usize, y as usize));
            }
        }
    }
    Ok(out)
}

/// Default blur strength of the baseline corrector.
pub const BASELINE_SIGMA: f64 = 1.5;

/// The blur baseline: Gaussian-smooth the whole frame, then keep the
/// smoothed content only inside the given boxes.
pub fn baseline_correct(img: &Image2D, boxes: &[BBox], sigma: f64) -> Result<Image2D> {
    let blurred = gaussian_blur(img, sigma);
    composite_correction(img, &blurred, boxes)
}
