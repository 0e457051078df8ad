//! Ripple artifacts: multiplicative elliptic sine waves.
//!
//! A ripple is a radial sine carried on an elliptic coordinate system and
//! confined to an annular band. Inside the band the modulation envelope
//! rises from zero at the inner edge to a peak mid-band and back to zero at
//! the outer edge (a half-sine window), so the pattern fades smoothly into
//! the untouched image; outside the band the field is exactly 1.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image2D;
use crate::rng::StreamRng;

/// Parameters of one ripple field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RippleParams {
    /// Ellipse center, pixels.
    pub cx: f64,
    pub cy: f64,
    /// Ratio of the u-axis to the v-axis of the ellipse.
    pub axis_ratio: f64,
    /// Rotation of the ellipse axes, degrees counter-clockwise.
    pub orientation_deg: f64,
    /// Radial wave frequency, cycles per pixel of elliptic radius.
    pub frequency: f64,
    /// Peak modulation amplitude.
    pub amplitude: f64,
    /// Band of elliptic radii the ripple occupies.
    pub r_inner: f64,
    pub r_outer: f64,
    /// Phase offset of the radial wave, radians.
    pub phase: f64,
}

impl RippleParams {
    /// Checks structural invariants; sampled parameters always satisfy
    /// them, hand-built ones are verified before use.
    pub fn validate(&self) -> Result<()> {
        if !(self.r_inner >= 0.0 && self.r_inner < self.r_outer) {
            return Err(Error::InvalidParameter(format!(
                "ripple band [{}, {}] is empty or negative",
                self.r_inner, self.r_outer
            )));
        }
        if self.axis_ratio <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "axis ratio {} must be positive",
                self.axis_ratio
            )));
        }
        if self.amplitude < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "amplitude {} must be non-negative",
                self.amplitude
            )));
        }
        Ok(())
    }

    /// Elliptic radius of a point: Euclidean distance after rotating into
    /// the ellipse frame and weighting the axes by the ratio.
    pub fn elliptic_radius(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.cx;
        let dy = y - self.cy;
        let (sin_o, cos_o) = self.orientation_deg.to_radians().sin_cos();
        let u = cos_o * dx + sin_o * dy;
        let v = -sin_o * dx + cos_o * dy;
        ((u * self.axis_ratio).powi(2) + (v / self.axis_ratio).powi(2)).sqrt()
    }
}

/// Sampling ranges for random ripples.
pub const AXIS_RATIO_RANGE: (f64, f64) = (0.6, 1.67);
pub const FREQUENCY_RANGE: (f64, f64) = (0.05, 0.20);
pub const AMPLITUDE_RANGE: (f64, f64) = (0.10, 0.40);
pub const R_INNER_RANGE: (f64, f64) = (10.0, 40.0);
pub const BAND_WIDTH_RANGE: (f64, f64) = (20.0, 80.0);

/// Draws a random ripple: center uniform over the middle 80% of the frame,
/// axis ratio, orientation, frequency, amplitude and band edges uniform
/// over their documented ranges, phase uniform over a full cycle.
pub fn sample_ripple_params(rng: &mut StreamRng, width: usize, height: usize) -> RippleParams {
    let (w, h) = ((width - 1) as f64, (height - 1) as f64);
    let cx = rng.random_range(0.1 * w..=0.9 * w);
    let cy = rng.random_range(0.1 * h..=0.9 * h);
    let axis_ratio = rng.random_range(AXIS_RATIO_RANGE.0..=AXIS_RATIO_RANGE.1);
    let orientation_deg = rng.random_range(0.0..180.0);
    let frequency = rng.random_range(FREQUENCY_RANGE.0..=FREQUENCY_RANGE.1);
    let amplitude = rng.random_range(AMPLITUDE_RANGE.0..=AMPLITUDE_RANGE.1);
    let r_inner = rng.random_range(R_INNER_RANGE.0..=R_INNER_RANGE.1);
    let r_outer = r_inner + rng.random_range(BAND_WIDTH_RANGE.0..=BAND_WIDTH_RANGE.1);
    let phase = rng.random_range(0.0..2.0 * PI);
    RippleParams {
        cx,
        cy,
        axis_ratio,
        orientation_deg,
        frequency,
        amplitude,
        r_inner,
        r_outer,
        phase,
    }
}

/// Evaluates the multiplicative ripple field on a `width` x `height` grid.
///
/// Inside the band the field is
/// `1 + amplitude * sin(pi * (rho - r_inner) / (r_outer - r_inner))
///    * sin(2 pi * frequency * rho + phase)`
/// with `rho` the elliptic radius; outside it is exactly 1. Field values
/// therefore stay within `1 ± amplitude`.
pub fn ripple_field(width: usize, height: usize, params: &RippleParams) -> Image2D {
    let band = params.r_outer - params.r_inner;
    Image2D::from_fn(width, height, |x, y| {
        let rho = params.elliptic_radius(x as f64, y as f64);
        if rho < params.r_inner || rho > params.r_outer {
            return 1.0;
        }
        let envelope = params.amplitude * (PI * (rho - params.r_inner) / band).sin();
        let wave = (2.0 * PI * params.frequency * rho + params.phase).sin();
        1.0 + envelope * wave
    })
}

/// Multiplies the image by the ripple field. Output values may leave
/// `[0, 1]`; compositing clips them later.
pub fn gen_ripple_artifact_image(img: &Image2D, params: &RippleParams) -> Result<Image2D> {
    params.validate()?;
    let field = ripple_field(img.width(), img.height(), params);
    let data = img
        .data()
        .iter()
        .zip(field.data())
        .map(|(v, f)| v * f)
        .collect();
    Image2D::new(img.width(), img.height(), data)
}
