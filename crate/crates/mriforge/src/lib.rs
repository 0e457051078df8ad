//! Synthesis of localized motion artifacts on brain MRI slices, and
//! evaluation tooling for systems that detect or remove them.
//!
//! The toolkit builds corrupted/clean image pairs from motion-free scans:
//! a slice is first deformed by a smooth radial warp (so the "clean" target
//! is itself a plausible anatomy variant), then a frequency-domain ring
//! pattern or a spatial ripple pattern is blended into a handful of circular
//! regions over brain tissue. Each pair ships with ground-truth bounding
//! boxes around the corrupted regions, an RMSE/PSNR measurement, and the
//! exact generator parameters, so external localization or restoration
//! models can be trained and scored against it.
//!
//! Everything is deterministic: one master seed fans out into per-sample
//! substreams, and dataset builds are byte-identical regardless of how many
//! worker threads run the generation.
//!
//! The crate is organised around small, pure modules:
//!
//! * [`image`] / [`fft`] / [`io`] — image containers, centered 2-D FFT,
//!   PNG/PGM/NIfTI input and output.
//! * [`warp`], [`ring`], [`ripple`] — the three generators.
//! * [`compose`] — foreground extraction, region sampling, compositing,
//!   histogram matching.
//! * [`dataset`] — pair synthesis and PSNR-binned test-set construction.
//! * [`metrics`], [`stats`] — RMSE/PSNR, IoU, average precision, regional
//!   standard deviation, paired t-test.
//! * [`correct`], [`pipeline`] — a blur baseline corrector and the
//!   command-level entry points used by the `forge` binary.
//! * [`phantom`] — a synthetic head volume for demos and self-contained
//!   tests.
//!
//! The `examples/` directory exercises every major capability end to end;
//! `cargo run --example build_dataset` is a good starting point.

pub mod compose;
pub mod config;
pub mod correct;
pub mod dataset;
pub mod error;
pub mod fft;
pub mod image;
pub mod io;
pub mod metrics;
pub mod phantom;
pub mod pipeline;
pub mod ring;
pub mod ripple;
pub mod rng;
pub mod stats;
pub mod warp;

pub use error::{Error, Result};
pub use image::{Axis, Image2D, Volume3D};
