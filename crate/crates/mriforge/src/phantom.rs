//! Synthetic head phantom.
//!
//! A fully synthetic stand-in for a real T1 scan, used by the examples and
//! the self-contained tests: an ellipsoidal "skull" shell around layered
//! brain tissue, two dark ventricles, soft and hard intensity blobs, plus
//! multi-scale texture. The texture deliberately includes energy up near
//! the Nyquist frequency — fine gratings and a white-noise floor — because
//! the frequency-domain ring generator only bites on spectral content
//! inside its annulus, and a too-smooth phantom would make rings
//! invisible.
//!
//! Generation is deterministic in the seed, voxel by voxel.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::image::{Image2D, Volume3D};
use crate::rng::StreamRng;

struct Grating {
    // Frequency vector in cycles per voxel.
    fx: f64,
    fy: f64,
    fz: f64,
    amplitude: f64,
    phase: f64,
}

struct Blob {
    cx: f64,
    cy: f64,
    cz: f64,
    r: f64,
    delta: f64,
    /// Hard blobs have a step edge; soft ones fall off smoothly.
    hard: bool,
}

/// Builds an `nx` x `ny` x `nz` head volume with intensities in `[0, 1]`.
pub fn head_volume(nx: usize, ny: usize, nz: usize, seed: u64) -> Volume3D {
    let mut rng = StreamRng::seed_from_u64(seed);
    let (fx, fy, fz) = (nx as f64, ny as f64, nz as f64);

    // Head ellipsoid.
    let hc = (0.5 * fx, 0.52 * fy, 0.5 * fz);
    let ha = (0.40 * fx, 0.45 * fy, 0.44 * fz);

    // Ventricles: two dark ellipsoids beside the midline.
    let vents: Vec<Blob> = [-1.0, 1.0]
        .iter()
        .map(|&side| Blob {
            cx: hc.0 + side * 0.07 * fx,
            cy: hc.1 - 0.02 * fy,
            cz: hc.2,
            r: 0.09 * fx.min(fy),
            delta: 0.0, // handled specially below
            hard: false,
        })
        .collect();

    // Coarse anatomy-scale gratings.
    let mut gratings = Vec::new();
    for _ in 0..10 {
        gratings.push(random_grating(&mut rng, 0.01, 0.08, 0.03, 0.06));
    }
    // Fine texture up near Nyquist — this is what the ring generator feeds on.
    for _ in 0..14 {
        gratings.push(random_grating(&mut rng, 0.22, 0.48, 0.02, 0.05));
    }

    // Intensity blobs: soft lumps and hard-edged lesions.
    let mut blobs = Vec::new();
    for i in 0..14 {
        let hard = i >= 8;
        blobs.push(Blob {
            cx: hc.0 + rng.random_range(-0.25..0.25) * fx,
            cy: hc.1 + rng.random_range(-0.27..0.27) * fy,
            cz: hc.2 + rng.random_range(-0.25..0.25) * fz,
            r: rng.random_range(0.03..0.09) * fx.min(fy),
            delta: rng.random_range(-0.14..0.14),
            hard,
        });
    }

    let noise_sigma = 0.04;
    let mut data = Vec::with_capacity(nx * ny * nz);
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let p = (x as f64, y as f64, z as f64);
                // Normalized ellipsoid radius: 1.0 on the skull surface.
                let e = ellipsoid_radius(p, hc, ha);
                let v = if e > 1.0 {
                    0.0
                } else if e > 0.92 {
                    0.85 // skull
                } else if e > 0.87 {
                    0.2 // CSF gap under the skull
                } else {
                    // Brain tissue: cortex-to-core gradient plus texture.
                    let mut v = 0.52 + 0.1 * (1.0 - e);
                    for g in &gratings {
                        v += g.amplitude
                            * (std::f64::consts::TAU
                                * (g.fx * p.0 + g.fy * p.1 + g.fz * p.2)
                                + g.phase)
                                .sin();
                    }
                    for b in &blobs {
                        let d = dist3(p, (b.cx, b.cy, b.cz)) / b.r;
                        if b.hard {
                            if d < 1.0 {
                                v += b.delta;
                            }
                        } else {
                            v += b.delta * (-2.0 * d * d).exp();
                        }
                    }
                    for vent in &vents {
                        let d = dist3(p, (vent.cx, vent.cy, vent.cz)) / vent.r;
                        if d < 1.0 {
                            v = 0.12; // CSF-filled ventricle
                        }
                    }
                    v + rng.random_range(-noise_sigma..noise_sigma)
                };
                data.push(v.clamp(0.0, 1.0));
            }
        }
    }
    Volume3D::new(nx, ny, nz, data).expect("phantom buffer sized correctly")
}

/// A single axial-style head slice, for quick demos and tests.
pub fn head_slice(width: usize, height: usize, seed: u64) -> Image2D {
    let vol = head_volume(width, height, 3, seed);
    vol.extract_slice(crate::image::Axis::Axial, 1)
        .expect("3-slice phantom always has a middle slice")
}

fn random_grating(
    rng: &mut StreamRng,
    f_lo: f64,
    f_hi: f64,
    a_lo: f64,
    a_hi: f64,
) -> Grating {
    // Random direction on the sphere (z flattened a little so in-plane
    // texture dominates), random frequency magnitude.
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let zc: f64 = rng.random_range(-0.5..0.5);
    let planar = (1.0 - zc * zc).sqrt();
    let f = rng.random_range(f_lo..f_hi);
    Grating {
        fx: f * planar * theta.cos(),
        fy: f * planar * theta.sin(),
        fz: f * zc,
        amplitude: rng.random_range(a_lo..a_hi),
        phase: rng.random_range(0.0..std::f64::consts::TAU),
    }
}

fn ellipsoid_radius(p: (f64, f64, f64), c: (f64, f64, f64), a: (f64, f64, f64)) -> f64 {
    let dx = (p.0 - c.0) / a.0;
    let dy = (p.1 - c.1) / a.1;
    let dz = (p.2 - c.2) / a.2;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

fn dist3(p: (f64, f64, f64), c: (f64, f64, f64)) -> f64 {
    let dx = p.0 - c.0;
    let dy = p.1 - c.1;
    let dz = p.2 - c.2;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::foreground_fraction;
    use crate::image::Axis;

    #[test]
    fn phantom_is_deterministic_in_the_seed() {
        let a = head_volume(48, 48, 16, 5);
        let b = head_volume(48, 48, 16, 5);
        assert_eq!(a.data(), b.data());
        let c = head_volume(48, 48, 16, 6);
        assert_ne!(a.data(), c.data());
    }

    #[test]
    fn central_slices_have_substantial_tissue() {
        let vol = head_volume(96, 96, 32, 1);
        for axis in Axis::ALL {
            let mid = vol.extent(axis) / 2;
            let slice = vol.extract_slice(axis, mid).unwrap();
            let f = foreground_fraction(&slice);
            assert!(
                f > 0.2,
                "{axis} mid-slice foreground only {f:.3}"
            );
        }
    }

    #[test]
    fn corner_voxels_are_background() {
        let vol = head_volume(64, 64, 24, 2);
        assert_eq!(vol.voxel(0, 0, 0), 0.0);
        assert_eq!(vol.voxel(63, 63, 23), 0.0);
    }

    #[test]
    fn phantom_slices_carry_high_frequency_energy() {
        // The ring generator needs spectral content in its annulus; check a
        // slice has non-trivial energy at radii past half-Nyquist.
        let img = head_slice(128, 128, 3);
        let spec = crate::fft::fft2_centered(&img);
        let (cx, cy) = spec.dc();
        let mut high = 0.0f64;
        let mut total = 0.0f64;
        for y in 0..128 {
            for x in 0..128 {
                let dx = x as f64 - cx as f64;
                let dy = y as f64 - cy as f64;
                let rho = (dx * dx + dy * dy).sqrt();
                let e = spec.get(x, y).norm_sqr();
                if rho > 0.0 {
                    total += e;
                    if rho > 32.0 {
                        high += e;
                    }
                }
            }
        }
        assert!(
            high / total > 1e-3,
            "high-frequency energy fraction {:.2e} too small",
            high / total
        );
    }

    #[test]
    fn values_stay_in_unit_range() {
        let vol = head_volume(64, 64, 16, 7);
        for &v in vol.data() {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}
