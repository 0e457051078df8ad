//! File input and output.
//!
//! Images travel as 16-bit grayscale PNG — lossless, and wide enough that
//! quantization error stays below measurement tolerances. 8-bit grayscale
//! PNG and both PGM flavors (ASCII `P2`, binary `P5`) are accepted on read
//! for interoperability with slice dumps from other tools.
//!
//! Volumes load either from a single uncompressed NIfTI-1 file (`.nii`) or
//! from a directory of equally-sized slice images stacked along z. The
//! NIfTI reader is deliberately narrow: 3-D only, datatypes uint8 / int16 /
//! float32, native or byte-swapped endianness detected from the header.
//! Anything else is refused with the byte offset of the offending field
//! rather than guessed at.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::{Image2D, Volume3D};

// ---------------------------------------------------------------------------
// 2-D images
// ---------------------------------------------------------------------------

/// Saves an image as 16-bit grayscale PNG, mapping `[0, 1]` to
/// `[0, 65535]` with rounding. Out-of-range intensities are clamped.
pub fn save_image(img: &Image2D, path: &Path) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let buf: image::ImageBuffer<image::Luma<u16>, Vec<u16>> =
        image::ImageBuffer::from_fn(w, h, |x, y| {
            let v = img.get(x as usize, y as usize).clamp(0.0, 1.0);
            image::Luma([(v * 65535.0).round() as u16])
        });
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::ImageDecode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
}

/// Loads a grayscale PNG or PGM into `[0, 1]` by dividing by the format's
/// maximum level. Color or alpha images are refused, not converted.
pub fn load_image(path: &Path) -> Result<Image2D> {
    let raw = load_image_raw(path)?;
    // Plain division, not reciprocal multiplication: levels must come back
    // bit-identical to what 16-bit quantization produces.
    let max = raw.max_level as f64;
    let data = raw.levels.iter().map(|&v| v as f64 / max).collect();
    Image2D::new(raw.width, raw.height, data)
}

/// A decoded grayscale image before normalization: integer levels plus the
/// format's maximum representable level.
struct RawImage {
    width: usize,
    height: usize,
    max_level: u32,
    levels: Vec<u32>,
}

fn load_image_raw(path: &Path) -> Result<RawImage> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    if ext.as_deref() == Some("pgm") {
        return load_pgm(path);
    }

    let decoded = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| Error::ImageDecode {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    match decoded {
        image::DynamicImage::ImageLuma8(buf) => Ok(RawImage {
            width: buf.width() as usize,
            height: buf.height() as usize,
            max_level: 255,
            levels: buf.into_raw().into_iter().map(u32::from).collect(),
        }),
        image::DynamicImage::ImageLuma16(buf) => Ok(RawImage {
            width: buf.width() as usize,
            height: buf.height() as usize,
            max_level: 65535,
            levels: buf.into_raw().into_iter().map(u32::from).collect(),
        }),
        other => Err(Error::NonGrayscale {
            path: path.to_path_buf(),
            format: format!("{other:?}")
                .split('(')
                .next()
                .unwrap_or("unknown")
                .to_string(),
        }),
    }
}

// ---------------------------------------------------------------------------
// PGM (P2 ASCII / P5 binary)
// ---------------------------------------------------------------------------

fn load_pgm(path: &Path) -> Result<RawImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes).map_err(|reason| Error::ImageDecode {
        path: path.to_path_buf(),
        reason,
    })
}

fn parse_pgm(bytes: &[u8]) -> std::result::Result<RawImage, String> {
    let mut pos = 0usize;

    // Header tokens are separated by whitespace; '#' starts a comment that
    // runs to end of line.
    let next_token = |pos: &mut usize| -> std::result::Result<String, String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err("truncated header".into());
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };

    let magic = next_token(&mut pos)?;
    let binary = match magic.as_str() {
        "P2" => false,
        "P5" => true,
        other => return Err(format!("not a PGM file (magic \"{other}\")")),
    };
    let width: usize = next_token(&mut pos)?
        .parse()
        .map_err(|_| "bad width".to_string())?;
    let height: usize = next_token(&mut pos)?
        .parse()
        .map_err(|_| "bad height".to_string())?;
    let max_level: u32 = next_token(&mut pos)?
        .parse()
        .map_err(|_| "bad maxval".to_string())?;
    if width == 0 || height == 0 {
        return Err("zero image dimension".into());
    }
    if max_level == 0 || max_level > 65535 {
        return Err(format!("maxval {max_level} outside 1..=65535"));
    }

    let n = width * height;
    let levels = if binary {
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        let wide = max_level > 255;
        let need = n * if wide { 2 } else { 1 };
        let raster = bytes
            .get(pos..pos + need)
            .ok_or_else(|| "raster shorter than header promises".to_string())?;
        if wide {
            raster
                .chunks_exact(2)
                .map(|c| u32::from(u16::from_be_bytes([c[0], c[1]])))
                .collect()
        } else {
            raster.iter().map(|&b| u32::from(b)).collect()
        }
    } else {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let v: u32 = next_token(&mut pos)?
                .parse()
                .map_err(|_| "bad sample value".to_string())?;
            out.push(v);
        }
        out
    };
    if levels.iter().any(|&v| v > max_level) {
        return Err("sample exceeds maxval".into());
    }
    Ok(RawImage {
        width,
        height,
        max_level,
        levels,
    })
}

/// Writes a binary (`P5`) PGM. `max_level` selects 8- or 16-bit samples.
pub fn save_pgm(img: &Image2D, path: &Path, max_level: u16) -> Result<()> {
    let mut out = Vec::with_capacity(img.len() * 2 + 32);
    out.extend_from_slice(
        format!("P5\n{} {}\n{}\n", img.width(), img.height(), max_level).as_bytes(),
    );
    let ml = max_level as f64;
    for &v in img.data() {
        let q = (v.clamp(0.0, 1.0) * ml).round() as u16;
        if max_level > 255 {
            out.extend_from_slice(&q.to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// NIfTI-1 volumes
// ---------------------------------------------------------------------------

const NIFTI_HEADER_LEN: usize = 348;

#[derive(Clone, Copy)]
enum Endian {
    Little,
    Big,
}

impl Endian {
    fn i16(self, b: &[u8], off: usize) -> i16 {
        let v = [b[off], b[off + 1]];
        match self {
            Endian::Little => i16::from_le_bytes(v),
            Endian::Big => i16::from_be_bytes(v),
        }
    }

    fn i32(self, b: &[u8], off: usize) -> i32 {
        let v = [b[off], b[off + 1], b[off + 2], b[off + 3]];
        match self {
            Endian::Little => i32::from_le_bytes(v),
            Endian::Big => i32::from_be_bytes(v),
        }
    }

    fn f32(self, b: &[u8], off: usize) -> f32 {
        let v = [b[off], b[off + 1], b[off + 2], b[off + 3]];
        match self {
            Endian::Little => f32::from_le_bytes(v),
            Endian::Big => f32::from_be_bytes(v),
        }
    }
}

fn load_nifti(path: &Path) -> Result<Volume3D> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;

    if bytes.len() < NIFTI_HEADER_LEN {
        return Err(Error::NiftiHeader {
            offset: 0,
            reason: format!(
                "file is {} bytes, shorter than the {NIFTI_HEADER_LEN}-byte header",
                bytes.len()
            ),
        });
    }

    // sizeof_hdr doubles as the endianness probe.
    let endian = if Endian::Little.i32(&bytes, 0) == NIFTI_HEADER_LEN as i32 {
        Endian::Little
    } else if Endian::Big.i32(&bytes, 0) == NIFTI_HEADER_LEN as i32 {
        Endian::Big
    } else {
        return Err(Error::NiftiHeader {
            offset: 0,
            reason: format!(
                "sizeof_hdr = {} in either byte order, expected {NIFTI_HEADER_LEN}",
                Endian::Little.i32(&bytes, 0)
            ),
        });
    };

    let magic = &bytes[344..348];
    match magic {
        b"n+1\0" => {}
        b"ni1\0" => {
            return Err(Error::NiftiHeader {
                offset: 344,
                reason: "detached .hdr/.img pairs are not supported, use a single .nii".into(),
            })
        }
        other => {
            return Err(Error::NiftiHeader {
                offset: 344,
                reason: format!("bad magic {other:?}, expected \"n+1\\0\""),
            })
        }
    }

    let ndim = endian.i16(&bytes, 40);
    if ndim != 3 {
        return Err(Error::UnsupportedDimensionality(ndim));
    }
    let nx = endian.i16(&bytes, 42);
    let ny = endian.i16(&bytes, 44);
    let nz = endian.i16(&bytes, 46);
    for (off, v) in [(42usize, nx), (44, ny), (46, nz)] {
        if v < 1 {
            return Err(Error::NiftiHeader {
                offset: off,
                reason: format!("non-positive dimension {v}"),
            });
        }
    }
    let (nx, ny, nz) = (nx as usize, ny as usize, nz as usize);

    let datatype = endian.i16(&bytes, 70);
    let bytes_per = match datatype {
        2 => 1,  // uint8
        4 => 2,  // int16
        16 => 4, // float32
        other => return Err(Error::UnsupportedDatatype(other)),
    };
    let bitpix = endian.i16(&bytes, 72);
    if bitpix as usize != bytes_per * 8 {
        return Err(Error::NiftiHeader {
            offset: 72,
            reason: format!("bitpix {bitpix} inconsistent with datatype {datatype}"),
        });
    }

    let vox_offset = endian.f32(&bytes, 108);
    if !vox_offset.is_finite() || vox_offset < NIFTI_HEADER_LEN as f32 {
        return Err(Error::NiftiHeader {
            offset: 108,
            reason: format!("vox_offset {vox_offset} points inside the header"),
        });
    }
    let start = vox_offset as usize;

    let n_voxels = nx * ny * nz;
    let need = n_voxels * bytes_per;
    let raster = bytes.get(start..start + need).ok_or(Error::NiftiHeader {
        offset: start,
        reason: format!(
            "data section needs {need} bytes from offset {start}, file has {}",
            bytes.len()
        ),
    })?;

    let mut data = Vec::with_capacity(n_voxels);
    match datatype {
        2 => data.extend(raster.iter().map(|&b| b as f64)),
        4 => {
            for c in raster.chunks_exact(2) {
                let v = match endian {
                    Endian::Little => i16::from_le_bytes([c[0], c[1]]),
                    Endian::Big => i16::from_be_bytes([c[0], c[1]]),
                };
                data.push(v as f64);
            }
        }
        16 => {
            for c in raster.chunks_exact(4) {
                let v = match endian {
                    Endian::Little => f32::from_le_bytes([c[0], c[1], c[2], c[3]]),
                    Endian::Big => f32::from_be_bytes([c[0], c[1], c[2], c[3]]),
                };
                data.push(v as f64);
            }
        }
        _ => unreachable!(),
    }

    Volume3D::new(nx, ny, nz, data)
}

/// Writes a minimal single-file NIfTI-1 volume: float32, little-endian,
/// data at offset 352. Enough for round-tripping within this toolkit and
/// for feeding standard viewers.
pub fn save_volume_nifti(vol: &Volume3D, path: &Path) -> Result<()> {
    let (nx, ny, nz) = vol.dims();
    let mut h = vec![0u8; NIFTI_HEADER_LEN + 4]; // header + extension flag
    h[0..4].copy_from_slice(&(NIFTI_HEADER_LEN as i32).to_le_bytes());
    let dims: [i16; 8] = [3, nx as i16, ny as i16, nz as i16, 1, 1, 1, 1];
    for (i, d) in dims.iter().enumerate() {
        h[40 + 2 * i..42 + 2 * i].copy_from_slice(&d.to_le_bytes());
    }
    h[70..72].copy_from_slice(&16i16.to_le_bytes()); // float32
    h[72..74].copy_from_slice(&32i16.to_le_bytes()); // bitpix
    // pixdim[0..3] = 1.0 voxel spacing
    for i in 0..4 {
        h[76 + 4 * i..80 + 4 * i].copy_from_slice(&1.0f32.to_le_bytes());
    }
    h[108..112].copy_from_slice(&352.0f32.to_le_bytes()); // vox_offset
    h[112..116].copy_from_slice(&1.0f32.to_le_bytes()); // scl_slope
    h[344..348].copy_from_slice(b"n+1\0");

    let mut out = h;
    out.reserve(vol.data().len() * 4);
    for &v in vol.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Volume loading
// ---------------------------------------------------------------------------

/// Loads a volume from a `.nii` file or from a directory of slice images.
///
/// Directory mode reads every `.png` / `.pgm` file in lexicographic
/// filename order and stacks them along z; all slices must share one size.
/// Intensities are kept as stored — normalization happens per slice in
/// [`Volume3D::extract_slice`].
pub fn load_volume(path: &Path) -> Result<Volume3D> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_dir() {
        load_volume_dir(path)
    } else {
        load_nifti(path)
    }
}

fn load_volume_dir(dir: &Path) -> Result<Volume3D> {
    let mut slices: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()),
                Some(ref e) if e == "png" || e == "pgm"
            )
        })
        .collect();
    slices.sort();
    if slices.is_empty() {
        return Err(Error::EmptyVolumeDir(dir.to_path_buf()));
    }

    let mut data = Vec::new();
    let mut dims: Option<(usize, usize)> = None;
    for p in &slices {
        let raw = load_image_raw(p)?;
        match dims {
            None => dims = Some((raw.width, raw.height)),
            Some((w, h)) if (w, h) != (raw.width, raw.height) => {
                return Err(Error::ImageDecode {
                    path: p.clone(),
                    reason: format!(
                        "slice is {}x{} but earlier slices are {w}x{h}",
                        raw.width, raw.height
                    ),
                });
            }
            _ => {}
        }
        data.extend(raw.levels.iter().map(|&v| v as f64));
    }
    let (w, h) = dims.unwrap();
    Volume3D::new(w, h, slices.len(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Axis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn png_round_trip_is_exact_on_16bit_levels() {
        let dir = tmp();
        let path = dir.path().join("img.png");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let img = Image2D::from_fn(19, 13, |_, _| rng.random::<f64>()).quantize_u16();
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(img.data(), back.data());
    }

    #[test]
    fn png_save_clamps_out_of_range_values() {
        let dir = tmp();
        let path = dir.path().join("img.png");
        let img = Image2D::new(2, 1, vec![-0.5, 1.5]).unwrap();
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back.data(), &[0.0, 1.0]);
    }

    #[test]
    fn color_png_is_refused() {
        let dir = tmp();
        let path = dir.path().join("rgb.png");
        let buf: image::ImageBuffer<image::Rgb<u8>, Vec<u8>> =
            image::ImageBuffer::from_pixel(4, 4, image::Rgb([1, 2, 3]));
        buf.save(&path).unwrap();
        assert!(matches!(
            load_image(&path),
            Err(Error::NonGrayscale { .. })
        ));
    }

    #[test]
    fn pgm_p5_round_trip() {
        let dir = tmp();
        for max in [255u16, 65535] {
            let path = dir.path().join(format!("img{max}.pgm"));
            let img = Image2D::new(3, 2, vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]).unwrap();
            save_pgm(&img, &path, max).unwrap();
            let back = load_image(&path).unwrap();
            for (a, b) in img.data().iter().zip(back.data()) {
                assert!((a - b).abs() <= 0.5 / max as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn pgm_p2_with_comments_parses() {
        let dir = tmp();
        let path = dir.path().join("ascii.pgm");
        fs::write(
            &path,
            b"P2\n# a comment\n3 1\n# another\n10\n0 5 10\n",
        )
        .unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn truncated_pgm_is_an_error() {
        let dir = tmp();
        let path = dir.path().join("short.pgm");
        fs::write(&path, b"P5\n4 4\n255\nab").unwrap();
        assert!(matches!(load_image(&path), Err(Error::ImageDecode { .. })));
    }

    fn ramp_volume(nx: usize, ny: usize, nz: usize) -> Volume3D {
        let mut data = Vec::with_capacity(nx * ny * nz);
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    data.push((x + y * nx + z * nx * ny) as f64);
                }
            }
        }
        Volume3D::new(nx, ny, nz, data).unwrap()
    }

    #[test]
    fn nifti_round_trip_preserves_voxels() {
        let dir = tmp();
        let path = dir.path().join("vol.nii");
        let vol = ramp_volume(5, 4, 3);
        save_volume_nifti(&vol, &path).unwrap();
        let back = load_volume(&path).unwrap();
        assert_eq!(back.dims(), (5, 4, 3));
        for (a, b) in vol.data().iter().zip(back.data()) {
            assert_eq!(*a as f32, *b as f32);
        }
    }

    #[test]
    fn nifti_big_endian_is_detected() {
        let dir = tmp();
        let path = dir.path().join("be.nii");
        // Hand-build a 2x2x1 big-endian uint8 volume.
        let mut h = vec![0u8; 352];
        h[0..4].copy_from_slice(&348i32.to_be_bytes());
        for (i, d) in [3i16, 2, 2, 1, 1, 1, 1, 1].iter().enumerate() {
            h[40 + 2 * i..42 + 2 * i].copy_from_slice(&d.to_be_bytes());
        }
        h[70..72].copy_from_slice(&2i16.to_be_bytes()); // uint8
        h[72..74].copy_from_slice(&8i16.to_be_bytes());
        h[108..112].copy_from_slice(&352.0f32.to_be_bytes());
        h[344..348].copy_from_slice(b"n+1\0");
        h.extend_from_slice(&[10, 20, 30, 40]);
        fs::write(&path, h).unwrap();
        let vol = load_volume(&path).unwrap();
        assert_eq!(vol.dims(), (2, 2, 1));
        assert_eq!(vol.data(), &[10.0, 20.0, 30.0, 40.0]);
    }

    #[test]
    fn nifti_4d_is_refused_with_dimensionality_error() {
        let dir = tmp();
        let path = dir.path().join("4d.nii");
        let vol = ramp_volume(2, 2, 2);
        save_volume_nifti(&vol, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[40..42].copy_from_slice(&4i16.to_le_bytes());
        fs::write(&path, bytes).unwrap();
        match load_volume(&path) {
            Err(e @ Error::UnsupportedDimensionality(4)) => {
                assert!(e.to_string().contains("unsupported dimensionality"));
            }
            other => panic!("expected dimensionality error, got {other:?}"),
        }
    }

    #[test]
    fn nifti_bad_magic_reports_offset_344() {
        let dir = tmp();
        let path = dir.path().join("magic.nii");
        let vol = ramp_volume(2, 2, 2);
        save_volume_nifti(&vol, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[344..348].copy_from_slice(b"xxx\0");
        fs::write(&path, bytes).unwrap();
        match load_volume(&path) {
            Err(Error::NiftiHeader { offset: 344, .. }) => {}
            other => panic!("expected header error at 344, got {other:?}"),
        }
    }

    #[test]
    fn nifti_unknown_datatype_is_refused() {
        let dir = tmp();
        let path = dir.path().join("dt.nii");
        let vol = ramp_volume(2, 2, 2);
        save_volume_nifti(&vol, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[70..72].copy_from_slice(&64i16.to_le_bytes()); // float64
        fs::write(&path, bytes).unwrap();
        assert!(matches!(
            load_volume(&path),
            Err(Error::UnsupportedDatatype(64))
        ));
    }

    #[test]
    fn nifti_truncated_data_reports_shortfall() {
        let dir = tmp();
        let path = dir.path().join("short.nii");
        let vol = ramp_volume(4, 4, 4);
        save_volume_nifti(&vol, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 10]).unwrap();
        assert!(matches!(
            load_volume(&path),
            Err(Error::NiftiHeader { .. })
        ));
    }

    #[test]
    fn slice_directory_stacks_in_filename_order() {
        let dir = tmp();
        let imgs = [
            Image2D::new(2, 2, vec![0.0, 0.1, 0.2, 0.3]).unwrap(),
            Image2D::new(2, 2, vec![0.4, 0.5, 0.6, 0.7]).unwrap(),
        ];
        // Write out of order; names sort them back.
        save_image(&imgs[1], &dir.path().join("slice_01.png")).unwrap();
        save_image(&imgs[0], &dir.path().join("slice_00.png")).unwrap();
        let vol = load_volume(dir.path()).unwrap();
        assert_eq!(vol.dims(), (2, 2, 2));
        // z = 0 must be slice_00.
        assert!((vol.voxel(1, 0, 0) - 0.1 * 65535.0).abs() < 1.0);
        assert!((vol.voxel(0, 0, 1) - 0.4 * 65535.0).abs() < 1.0);
    }

    #[test]
    fn slice_directory_with_mixed_sizes_is_refused() {
        let dir = tmp();
        save_image(&Image2D::zeros(2, 2), &dir.path().join("a.png")).unwrap();
        save_image(&Image2D::zeros(3, 2), &dir.path().join("b.png")).unwrap();
        assert!(matches!(
            load_volume(dir.path()),
            Err(Error::ImageDecode { .. })
        ));
    }

    #[test]
    fn empty_directory_is_refused() {
        let dir = tmp();
        assert!(matches!(
            load_volume(dir.path()),
            Err(Error::EmptyVolumeDir(_))
        ));
    }

    #[test]
    fn axial_slices_of_a_stacked_directory_recover_the_images() {
        let dir = tmp();
        let img = Image2D::new(3, 2, vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]).unwrap();
        save_image(&img, &dir.path().join("only.png")).unwrap();
        let vol = load_volume(dir.path()).unwrap();
        let slice = vol.extract_slice(Axis::Axial, 0).unwrap();
        // extract_slice normalizes; the stored slice already spans [0, 1].
        for (a, b) in img.data().iter().zip(slice.data()) {
            assert!((a - b).abs() < 1e-4);
        }
    }
}
