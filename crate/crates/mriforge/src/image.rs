//! Image and volume containers.
//!
//! [`Image2D`] is a dense row-major grid of `f64` intensities. Pipeline
//! stages that need the unit range (compositing, saving) establish it
//! explicitly via [`Image2D::normalize`] or [`Image2D::clamp01`]; the
//! container itself does not restrict values, because intermediate artifact
//! images legitimately overshoot `[0, 1]` before they are blended.
//!
//! [`Volume3D`] holds a scan with x varying fastest, plus the mapping from
//! anatomical axes to storage dimensions. [`Volume3D::extract_slice`]
//! returns a min-max normalized 2-D slice, which is the entry point for all
//! downstream generation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anatomical slicing axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Sagittal,
    Coronal,
    Axial,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Sagittal, Axis::Coronal, Axis::Axial];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Sagittal => "sagittal",
            Axis::Coronal => "coronal",
            Axis::Axial => "axial",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sagittal" => Ok(Axis::Sagittal),
            "coronal" => Ok(Axis::Coronal),
            "axial" => Ok(Axis::Axial),
            other => Err(Error::InvalidParameter(format!(
                "unknown axis \"{other}\" (expected sagittal, coronal or axial)"
            ))),
        }
    }
}

/// A 2-D grayscale image, row-major, `f64` per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Image2D {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image2D {
    /// Wraps an existing buffer. Fails unless `data.len() == width * height`.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::BadBufferLength {
                width,
                height,
                got: data.len(),
            });
        }
        Ok(Image2D {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Image2D {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Image2D {
            width,
            height,
            data,
        }
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
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn same_size(&self, other: &Image2D) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = v;
    }

    /// Minimum and maximum intensity. Empty images report `(0, 0)`.
    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// Min-max normalization onto `[0, 1]`.
    ///
    /// A constant image maps to all zeros. Applying this twice gives the
    /// same bits as applying it once: after the first pass min is exactly
    /// 0.0 and max exactly 1.0, so the second pass divides by 1.
    pub fn normalize(&self) -> Image2D {
        let (lo, hi) = self.min_max();
        let span = hi - lo;
        let data = if span > 0.0 {
            self.data.iter().map(|&v| (v - lo) / span).collect()
        } else {
            vec![0.0; self.data.len()]
        };
        Image2D {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Clamps every pixel into `[0, 1]`. Values already inside pass through
    /// bit-exactly.
    pub fn clamp01(&self) -> Image2D {
        let data = self.data.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
        Image2D {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Rounds intensities to the 65 536 levels a 16-bit PNG can store, after
    /// clamping to `[0, 1]`.
    ///
    /// Measuring RMSE/PSNR on quantized images makes the numbers exactly
    /// reproducible from the saved files.
    pub fn quantize_u16(&self) -> Image2D {
        let data = self
            .data
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 65535.0).round() / 65535.0)
            .collect();
        Image2D {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Bilinear interpolation at a fractional position, coordinates clamped
    /// to the image rectangle. Integer positions reproduce the stored pixel
    /// values exactly.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        debug_assert!(self.width > 0 && self.height > 0);
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let v00 = self.get(x0, y0);
        let v10 = self.get(x1, y0);
        let v01 = self.get(x0, y1);
        let v11 = self.get(x1, y1);
        let top = v00 + fx * (v10 - v00);
        let bot = v01 + fx * (v11 - v01);
        top + fy * (bot - top)
    }
}

/// A 3-D scalar volume with anatomical axis labels.
///
/// Storage is x-fastest: `data[x + nx * (y + ny * z)]`. `axes[d]` names the
/// anatomical direction that storage dimension `d` indexes; the default
/// assignment is sagittal → x, coronal → y, axial → z.
#[derive(Debug, Clone)]
pub struct Volume3D {
    nx: usize,
    ny: usize,
    nz: usize,
    data: Vec<f64>,
    axes: [Axis; 3],
}

impl Volume3D {
    pub fn new(nx: usize, ny: usize, nz: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_axes(nx, ny, nz, data, Axis::ALL)
    }

    pub fn with_axes(
        nx: usize,
        ny: usize,
        nz: usize,
        data: Vec<f64>,
        axes: [Axis; 3],
    ) -> Result<Self> {
        if data.len() != nx * ny * nz {
            return Err(Error::BadBufferLength {
                width: nx,
                height: ny * nz,
                got: data.len(),
            });
        }
        if axes[0] == axes[1] || axes[0] == axes[2] || axes[1] == axes[2] {
            return Err(Error::InvalidParameter(
                "axis labels must name three distinct directions".into(),
            ));
        }
        Ok(Volume3D {
            nx,
            ny,
            nz,
            data,
            axes,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn voxel(&self, x: usize, y: usize, z: usize) -> f64 {
        debug_assert!(x < self.nx && y < self.ny && z < self.nz);
        self.data[x + self.nx * (y + self.ny * z)]
    }

    /// Storage dimension (0, 1 or 2) that the given anatomical axis runs
    /// along.
    pub fn axis_dim(&self, axis: Axis) -> usize {
        self.axes.iter().position(|&a| a == axis).unwrap()
    }

    /// Number of slices available along an anatomical axis.
    pub fn extent(&self, axis: Axis) -> usize {
        [self.nx, self.ny, self.nz][self.axis_dim(axis)]
    }

    /// Cuts the `index`-th slice perpendicular to `axis` and min-max
    /// normalizes it onto `[0, 1]`.
    ///
    /// The two in-plane storage dimensions keep their order: the lower one
    /// becomes the slice's x (width), the higher one its y (height).
    pub fn extract_slice(&self, axis: Axis, index: usize) -> Result<Image2D> {
        let fixed = self.axis_dim(axis);
        let extent = self.extent(axis);
        if index >= extent {
            return Err(Error::SliceIndex {
                axis: axis.name(),
                index,
                extent,
            });
        }
        let dims = [self.nx, self.ny, self.nz];
        let (du, dv) = match fixed {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (w, h) = (dims[du], dims[dv]);
        let img = Image2D::from_fn(w, h, |u, v| {
            let mut c = [0usize; 3];
            c[fixed] = index;
            c[du] = u;
            c[dv] = v;
            self.voxel(c[0], c[1], c[2])
        });
        Ok(img.normalize())
    }
}
