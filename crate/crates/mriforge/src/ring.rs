//! Ring ("ringing") artifacts via annular-sector spectrum perturbation.
//!
//! A motion-like ring pattern is created by amplifying and phase-rotating
//! the frequency bins inside an annular sector of the centered spectrum.
//! To keep the inverse transform real, every touched bin's conjugate
//! partner — the point reflection through the DC bin — receives the
//! conjugate factor `m * e^(-i phi)`. The implementation walks the sector
//! once and applies both factors pairwise, so the symmetry is preserved by
//! construction rather than by trusting floating-point angle tests to
//! agree between a bin and its mirror.
//!
//! Three stock parameter combinations are provided, chosen to produce
//! clearly visible rings of different density and contrast, plus a jitter
//! rule that perturbs a combination into a family of related patterns.

use rand::Rng;
use serde::{Deserialize, Serialize};

use rustfft::num_complex::Complex64;

use crate::error::Result;
use crate::fft::{fft2_centered, ifft2_centered, Spectrum2D};
use crate::image::Image2D;
use crate::rng::StreamRng;

/// Annular-sector perturbation parameters. Radii are in frequency bins
/// from the DC center; angles are degrees measured counter-clockwise from
/// the +x axis, with the sector running from `theta_start` to `theta_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularSectorParams {
    pub r_inner: f64,
    pub r_outer: f64,
    /// Phase rotation applied inside the sector, degrees.
    pub phase_deg: f64,
    /// Modulus multiplier applied inside the sector.
    pub magnification: f64,
    pub theta_start_deg: f64,
    pub theta_end_deg: f64,
}

impl AnnularSectorParams {
    /// Angular width of the sector in degrees.
    pub fn span_deg(&self) -> f64 {
        self.theta_end_deg - self.theta_start_deg
    }
}

/// The three stock combinations: distinct ring densities and strengths.
pub fn base_combinations() -> [AnnularSectorParams; 3] {
    [
        AnnularSectorParams {
            r_inner: 61.0,
            r_outer: 66.0,
            phase_deg: 144.0,
            magnification: 9.0,
            theta_start_deg: 10.0,
            theta_end_deg: 38.0,
        },
        AnnularSectorParams {
            r_inner: 55.0,
            r_outer: 105.0,
            phase_deg: 29.0,
            magnification: 8.0,
            theta_start_deg: 29.0,
            theta_end_deg: 57.0,
        },
        AnnularSectorParams {
            r_inner: 60.0,
            r_outer: 80.0,
            phase_deg: 9.0,
            magnification: 6.0,
            theta_start_deg: 11.0,
            theta_end_deg: 46.0,
        },
    ]
}

/// Smallest inner radius a jittered annulus may keep.
pub const MIN_JITTER_R_INNER: f64 = 4.0;

/// Bounded attempts at drawing a valid jittered radius pair.
pub const JITTER_TRIES: usize = 100;

/// Randomly perturbs a stock combination.
///
/// * Radii move by `step * k` with `step` in {2, 3} px and `k` in −3…3,
///   drawn independently for the inner and outer radius; the pair is
///   redrawn until `r_inner < r_outer` and `r_inner >=` 4. If no valid
///   pair appears within [`JITTER_TRIES`] draws the base combination is
///   returned unchanged.
/// * Magnification moves by `0.2 * k` with `k` in −5…5, floored at 1 so
///   the sector is never attenuated.
/// * Both sector angles shift together by `a * k` degrees with
///   `a ~ U[11, 29]` and `k` in −6…6, preserving the angular width.
/// * The phase is left as-is.
pub fn jitter_params(base: &AnnularSectorParams, rng: &mut StreamRng) -> AnnularSectorParams {
    let mut radii = None;
    for _ in 0..JITTER_TRIES {
        let step_inner = rng.random_range(2..=3) as f64;
        let k_inner = rng.random_range(-3..=3) as f64;
        let step_outer = rng.random_range(2..=3) as f64;
        let k_outer = rng.random_range(-3..=3) as f64;
        let r_inner = base.r_inner + step_inner * k_inner;
        let r_outer = base.r_outer + step_outer * k_outer;
        if r_inner < r_outer && r_inner >= MIN_JITTER_R_INNER {
            radii = Some((r_inner, r_outer));
            break;
        }
    }
    let Some((r_inner, r_outer)) = radii else {
        return *base;
    };

    let k_mag = rng.random_range(-5..=5) as f64;
    let magnification = (base.magnification + 0.2 * k_mag).max(1.0);

    let a = rng.random_range(11.0..=29.0);
    let k_ang = rng.random_range(-6..=6) as f64;
    let delta = a * k_ang;

    AnnularSectorParams {
        r_inner,
        r_outer,
        phase_deg: base.phase_deg,
        magnification,
        theta_start_deg: base.theta_start_deg + delta,
        theta_end_deg: base.theta_end_deg + delta,
    }
}

/// Largest ring radius that stays inside the centered grid in every
/// direction: the distance from the DC bin to the nearest edge.
pub fn max_ring_radius(width: usize, height: usize) -> f64 {
    let (cx, cy) = (width / 2, height / 2);
    let dx = cx.min(width - 1 - cx) as f64;
    let dy = cy.min(height - 1 - cy) as f64;
    dx.min(dy)
}

/// True if the angle `theta` (degrees) falls inside the sector, both ends
/// inclusive, comparisons taken modulo 360°.
fn in_sector(theta_deg: f64, start_deg: f64, span_deg: f64) -> bool {
    if span_deg >= 360.0 {
        return true;
    }
    let d = (theta_deg - start_deg).rem_euclid(360.0);
    d <= span_deg
}

/// Multiplies the annular sector by `m * e^(+i phi)` and its point
/// reflection by `m * e^(-i phi)`.
///
/// The outer radius is clipped to [`max_ring_radius`], which also keeps the
/// sector away from the unpaired Nyquist row/column of even-sized axes. A
/// sector lying entirely off-grid returns the spectrum unchanged.
pub fn apply_annular_perturbation(
    spec: &Spectrum2D,
    params: &AnnularSectorParams,
) -> Spectrum2D {
    let (w, h) = (spec.width(), spec.height());
    let r_outer = params.r_outer.min(max_ring_radius(w, h));
    let mut out = spec.clone();
    if params.r_inner > r_outer {
        // The annulus covers no bins.
        return out;
    }

    let (cx, cy) = out.dc();
    let phi = params.phase_deg.to_radians();
    let span = params.span_deg();
    let forward = Complex64::from_polar(params.magnification, phi);
    let backward = forward.conj();

    for y in 0..h {
        for x in 0..w {
            let dx = x as f64 - cx as f64;
            let dy = y as f64 - cy as f64;
            let rho = (dx * dx + dy * dy).sqrt();
            if rho < params.r_inner || rho > r_outer {
                continue;
            }
            let theta = dy.atan2(dx).to_degrees();
            if !in_sector(theta, params.theta_start_deg, span) {
                continue;
            }
            // This bin is in the primary sector: scale it forward and its
            // conjugate partner backward. A bin that also lies in the
            // reflected sector gets visited again from its partner, so the
            // pair accumulates both factors consistently.
            out.set(x, y, out.get(x, y) * forward);
            let (mx, my) = out.mirror(x, y);
            out.set(mx, my, out.get(mx, my) * backward);
        }
    }
    out
}

/// Full ring-artifact pipeline for one image: forward FFT, annular-sector
/// perturbation, inverse FFT. The result is a real image (the discarded
/// imaginary residue is rounding-level by construction); values may exceed
/// `[0, 1]` until composited.
pub fn gen_ring_artifact_image(img: &Image2D, params: &AnnularSectorParams) -> Result<Image2D> {
    let spec = fft2_centered(img);
    let perturbed = apply_annular_perturbation(&spec, params);
    let (out, _max_imag) = ifft2_centered(&perturbed)?;
    Ok(out)
}
