//! Centered 2-D FFT and the spectrum container.
//!
//! The forward transform is unnormalized and the result is shifted so the
//! DC bin sits at `(floor(w/2), floor(h/2))`; the inverse applies the
//! `1/(w*h)` factor. Real input therefore yields a spectrum with conjugate
//! symmetry about the DC bin, and [`ifft2_centered`] refuses spectra that
//! break that symmetry beyond a small relative tolerance — multiplying
//! asymmetric factors into a spectrum is the classic way to silently turn a
//! real image into a complex one.
//!
//! On the shifted grid the conjugate partner of bin `i` along an axis of
//! length `n` is `(2 * floor(n/2) - i) mod n`, which is valid for both
//! parities (the wrap only triggers on the unpaired Nyquist column/row of
//! even-sized axes).

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::image::Image2D;

/// Largest `|F - conj(mirror(F))| / max|F|` accepted by the inverse
/// transform. Round-tripping a real image through forward FFT accumulates
/// relative error around 1e-15, so 1e-6 flags genuine symmetry breakage
/// while never tripping on rounding noise.
pub const HERMITIAN_REL_TOL: f64 = 1e-6;

/// A DC-centered 2-D spectrum, row-major like [`Image2D`].
#[derive(Debug, Clone)]
pub struct Spectrum2D {
    width: usize,
    height: usize,
    data: Vec<Complex64>,
}

impl Spectrum2D {
    pub fn new(width: usize, height: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BadBufferLength {
                width,
                height,
                got: data.len(),
            });
        }
        Ok(Spectrum2D {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: Complex64) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = v;
    }

    /// Position of the DC bin.
    pub fn dc(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }

    /// Conjugate partner of bin `(x, y)` under the centered layout.
    pub fn mirror(&self, x: usize, y: usize) -> (usize, usize) {
        (
            mirror_index(x, self.width),
            mirror_index(y, self.height),
        )
    }

    /// Worst conjugate-symmetry residual `|F(b) - conj(F(mirror(b)))|` and
    /// the bin where it occurs, together with the spectrum's peak modulus.
    pub fn hermitian_residual(&self) -> (f64, (usize, usize), f64) {
        let mut worst = 0.0;
        let mut at = (0, 0);
        let mut peak = 0.0f64;
        for y in 0..self.height {
            for x in 0..self.width {
                let v = self.get(x, y);
                peak = peak.max(v.norm());
                let (mx, my) = self.mirror(x, y);
                let r = (v - self.get(mx, my).conj()).norm();
                if r > worst {
                    worst = r;
                    at = (x, y);
                }
            }
        }
        (worst, at, peak)
    }
}

/// Conjugate partner of index `i` on a centered axis of length `n`.
#[inline]
pub fn mirror_index(i: usize, n: usize) -> usize {
    debug_assert!(i < n);
    (2 * (n / 2) - i) % n
}

/// Forward 2-D FFT of a real image, DC moved to the center bin.
pub fn fft2_centered(img: &Image2D) -> Spectrum2D {
    let (w, h) = (img.width(), img.height());
    assert!(w > 0 && h > 0, "cannot transform an empty image");
    let mut buf: Vec<Complex64> = img
        .data()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(w);
    let col_fft = planner.plan_fft_forward(h);

    for row in buf.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let mut col = vec![Complex64::default(); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = buf[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            buf[y * w + x] = col[y];
        }
    }

    Spectrum2D {
        width: w,
        height: h,
        data: shift2(&buf, w, h, ShiftDir::Forward),
    }
}

/// Inverse of [`fft2_centered`]: checks conjugate symmetry, transforms back
/// with the `1/(w*h)` normalization, and returns the real image along with
/// the largest imaginary magnitude that was discarded.
pub fn ifft2_centered(spec: &Spectrum2D) -> Result<(Image2D, f64)> {
    let (w, h) = (spec.width(), spec.height());
    let (residual, (bx, by), peak) = spec.hermitian_residual();
    let tol = HERMITIAN_REL_TOL * peak;
    if residual > tol {
        return Err(Error::HermitianViolation {
            x: bx,
            y: by,
            residual,
            tol,
        });
    }

    let mut buf = shift2(spec.data(), w, h, ShiftDir::Inverse);

    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_inverse(w);
    let col_fft = planner.plan_fft_inverse(h);

    for row in buf.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let mut col = vec![Complex64::default(); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = buf[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            buf[y * w + x] = col[y];
        }
    }

    let scale = 1.0 / (w * h) as f64;
    let mut data = Vec::with_capacity(w * h);
    let mut max_imag = 0.0f64;
    for v in buf {
        data.push(v.re * scale);
        max_imag = max_imag.max((v.im * scale).abs());
    }
    Ok((Image2D::new(w, h, data)?, max_imag))
}

enum ShiftDir {
    /// Rotate each axis right by `floor(n/2)` (DC to center).
    Forward,
    /// Undo the forward rotation (DC back to bin 0).
    Inverse,
}

fn shift2(data: &[Complex64], w: usize, h: usize, dir: ShiftDir) -> Vec<Complex64> {
    let (sx, sy) = (w / 2, h / 2);
    let mut out = vec![Complex64::default(); data.len()];
    for y in 0..h {
        for x in 0..w {
            let (tx, ty) = match dir {
                ShiftDir::Forward => ((x + sx) % w, (y + sy) % h),
                ShiftDir::Inverse => ((x + w - sx) % w, (y + h - sy) % h),
            };
            out[ty * w + tx] = data[y * w + x];
        }
    }
    out
}
