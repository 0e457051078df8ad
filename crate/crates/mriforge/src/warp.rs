//! Smooth radial warping inside circular patches.
//!
//! Each patch deforms the image inside a circle while leaving the boundary
//! and everything outside untouched: a pixel at normalized radius
//! `u = |P - C| / R` pulls its value from normalized radius `u^(1+eps)`
//! along the same ray (backward mapping with bilinear interpolation). For
//! `eps > 0` this drags content outward, for `eps = 0` it is the identity,
//! and both the center and the rim are fixed points, which keeps the seam
//! invisible. With the default `eps = 0.2` the largest displacement on a
//! 100 px circle is about 6.7 px at `u ≈ 0.4` — a subtle anatomy change,
//! not an artifact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image2D;
use crate::rng::StreamRng;
use rand::Rng;

/// Default warp exponent offset.
pub const DEFAULT_EPSILON: f64 = 0.2;

/// Smallest circle worth warping; below this the displacement field is
/// sub-pixel everywhere.
pub const MIN_WARP_RADIUS: f64 = 8.0;

/// Fewest / most patches placed per slice.
pub const MIN_CIRCLES: usize = 3;
pub const MAX_CIRCLES: usize = 8;

/// Placement attempts per circle.
pub const PLACEMENT_TRIES: usize = 100;

/// One warp patch: a circle plus its exponent offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpCircle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub epsilon: f64,
}

impl WarpCircle {
    /// Distance a point at normalized radius `u` moves, in pixels:
    /// `R * (u - u^(1+eps))`.
    pub fn displacement(&self, u: f64) -> f64 {
        self.r * (u - u.powf(1.0 + self.epsilon))
    }

    fn overlaps(&self, other: &WarpCircle) -> bool {
        let dx = self.cx - other.cx;
        let dy = self.cy - other.cy;
        (dx * dx + dy * dy).sqrt() < self.r + other.r
    }

    fn in_frame(&self, width: usize, height: usize) -> bool {
        self.cx - self.r >= 0.0
            && self.cy - self.r >= 0.0
            && self.cx + self.r <= (width - 1) as f64
            && self.cy + self.r <= (height - 1) as f64
    }
}

/// Scatters 3–8 disjoint warp circles across the frame.
///
/// The circle count is drawn uniformly; each circle then rejection-samples
/// a center and takes the largest radius that stays inside the frame and
/// clear of the circles placed so far (capped at half the shorter side).
/// A draw whose maximal radius falls below [`MIN_WARP_RADIUS`] is retried
/// up to [`PLACEMENT_TRIES`] times. Failing on one of the first three
/// circles is an error — the frame is too crowded to guarantee the minimum
/// — while later circles simply stop early.
pub fn place_circles(rng: &mut StreamRng, width: usize, height: usize) -> Result<Vec<WarpCircle>> {
    let count = rng.random_range(MIN_CIRCLES..=MAX_CIRCLES);
    let r_cap = (width.min(height) as f64) / 2.0;
    let mut circles: Vec<WarpCircle> = Vec::with_capacity(count);

    'next_circle: for placed in 0..count {
        for _ in 0..PLACEMENT_TRIES {
            let cx = rng.random_range(0.0..(width - 1) as f64);
            let cy = rng.random_range(0.0..(height - 1) as f64);

            // Largest radius admissible at this center: frame distance and
            // distance to each existing circle's edge.
            let mut r_max = cx
                .min(cy)
                .min((width - 1) as f64 - cx)
                .min((height - 1) as f64 - cy)
                .min(r_cap);
            for c in &circles {
                let d = ((cx - c.cx).powi(2) + (cy - c.cy).powi(2)).sqrt() - c.r;
                r_max = r_max.min(d);
            }
            // Back off a hair from the exact maximum: an exactly tangent
            // radius can fail revalidation when `(d - r2) + r2` rounds one
            // ULP above `d`.
            let r = r_max * (1.0 - 1e-12);
            if r >= MIN_WARP_RADIUS {
                circles.push(WarpCircle {
                    cx,
                    cy,
                    r,
                    epsilon: DEFAULT_EPSILON,
                });
                continue 'next_circle;
            }
        }
        // Ran out of attempts for this circle.
        if placed < MIN_CIRCLES {
            return Err(Error::ImageTooSmall { width, height });
        }
        break;
    }
    Ok(circles)
}

/// Applies every warp patch to the image.
///
/// Fails if any circle leaves the frame or any pair overlaps — disjointness
/// is what lets each output pixel consult at most one patch. Pixels outside
/// all circles are copied bit-exactly.
pub fn warp_image(img: &Image2D, circles: &[WarpCircle]) -> Result<Image2D> {
    let (w, h) = (img.width(), img.height());
    for (i, c) in circles.iter().enumerate() {
        if c.r <= 0.0 || !c.in_frame(w, h) {
            return Err(Error::BadCircleLayout);
        }
        for other in &circles[i + 1..] {
            if c.overlaps(other) {
                return Err(Error::BadCircleLayout);
            }
        }
    }

    let out = Image2D::from_fn(w, h, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        for c in circles {
            let dx = xf - c.cx;
            let dy = yf - c.cy;
            let dist = (dx * dx + dy * dy).sqrt();
            if dist < c.r {
                if dist == 0.0 {
                    return img.get(x, y); // center is a fixed point
                }
                let u = dist / c.r;
                // Backward map: source sits at normalized radius u^(1+eps),
                // i.e. scale the offset by u^eps.
                let scale = u.powf(c.epsilon);
                let sx = c.cx + scale * dx;
                let sy = c.cy + scale * dy;
                return img.bilinear(sx, sy);
            }
        }
        img.get(x, y)
    });
    Ok(out)
}
