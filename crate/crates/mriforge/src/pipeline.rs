//! Command-level entry points behind the `forge` binary.
//!
//! Each function here does the work of one subcommand — load inputs,
//! delegate to the core modules, assemble a printable report — so the
//! binary itself stays a thin argument parser and the same flows remain
//! callable from tests and examples.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::compose::BBox;
use crate::config::Config;
use crate::dataset::{
    build_binned_testset, collect_clean_slices, read_manifest, CleanSlice, DatasetManifest,
    SampleRecord,
};
use crate::error::{Error, Result};
use crate::image::Image2D;
use crate::io::{load_image, load_volume, save_image, save_volume_nifti};
use crate::metrics::{
    average_precision, detection_counts, paired_t_test, psnr, regional_std, rmse, BinnedReport,
    Detection, DetectionCounts, PairFidelity, TTestResult,
};
use crate::phantom::head_volume;
use crate::ring::{base_combinations, jitter_params, AnnularSectorParams};
use crate::ripple::{gen_ripple_artifact_image, sample_ripple_params, RippleParams};
use crate::rng::SeedMixer;
use crate::warp::{place_circles, warp_image, WarpCircle};

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

/// Loads the input volumes, samples clean slices, and builds a
/// PSNR-balanced paired test set under `out_dir`. Returns the manifest
/// path and the manifest itself.
pub fn cmd_build(
    volume_paths: &[PathBuf],
    out_dir: &Path,
    cfg: &Config,
    master_seed: u64,
) -> Result<(PathBuf, DatasetManifest)> {
    if volume_paths.is_empty() {
        return Err(Error::InvalidParameter(
            "build needs at least one input volume".into(),
        ));
    }

    let mut pool: Vec<CleanSlice> = Vec::new();
    let mut warnings = Vec::new();
    let mut seen_ids = HashSet::new();
    for path in volume_paths {
        let scan_id = scan_id_for(path)?;
        if !seen_ids.insert(scan_id.clone()) {
            return Err(Error::InvalidParameter(format!(
                "two input volumes share the scan id \"{scan_id}\"; rename one"
            )));
        }
        let vol = load_volume(path)?;
        let mut rng = SeedMixer::new(master_seed)
            .str("slice-pool")
            .str(&scan_id)
            .rng();
        let (slices, saturated) = collect_clean_slices(
            &vol,
            &scan_id,
            cfg.sampling.per_axis,
            cfg.sampling.min_foreground_fraction,
            &mut rng,
        );
        if saturated {
            warnings.push(format!(
                "scan \"{scan_id}\": fewer than {} usable slices on at least one axis",
                cfg.sampling.per_axis
            ));
        }
        log::info!("scan \"{scan_id}\": {} clean slices pooled", slices.len());
        pool.extend(slices);
    }

    let mut products = build_binned_testset(&pool, cfg, master_seed)?;
    products.manifest.warnings = warnings;
    let manifest_path = products.write(out_dir)?;
    Ok((manifest_path, products.manifest))
}

/// Derives the scan id of an input volume: the directory name for a slice
/// directory, the file stem otherwise.
fn scan_id_for(path: &Path) -> Result<String> {
    let name = if path.is_dir() {
        path.file_name()
    } else {
        path.file_stem()
    };
    name.and_then(|n| n.to_str())
        .map(|n| n.to_string())
        .filter(|n| !n.is_empty())
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "cannot derive a scan id from path {}",
                path.display()
            ))
        })
}

// ---------------------------------------------------------------------------
// Detection exchange format and eval-detect
// ---------------------------------------------------------------------------

/// One predicted box with its confidence, as read from a detection file.
#[derive(Debug, Clone, Deserialize)]
pub struct DetectionEntry {
    /// `[x_min, y_min, x_max, y_max]`, half-open pixel bounds.
    #[serde(rename = "box")]
    pub bbox: [u32; 4],
    /// Confidence in `[0, 1]`.
    pub score: f64,
}

/// Reads a detection file: a JSON object keyed by sample id (decimal
/// string), each value a list of `{"box": [..], "score": ..}` entries.
/// Boxes and scores are validated here; id resolution happens against a
/// manifest in [`cmd_eval_detect`].
pub fn read_detection_file(path: &Path) -> Result<BTreeMap<String, Vec<DetectionEntry>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let map: BTreeMap<String, Vec<DetectionEntry>> =
        serde_json::from_str(&text).map_err(|e| Error::DetectionFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    for (id, entries) in &map {
        for (i, entry) in entries.iter().enumerate() {
            if !(entry.score >= 0.0 && entry.score <= 1.0) {
                return Err(Error::DetectionFile {
                    path: path.to_path_buf(),
                    reason: format!(
                        "entry {i} of image {id}: score {} outside [0, 1]",
                        entry.score
                    ),
                });
            }
            if let Err(e) = BBox::from_corners(entry.bbox) {
                return Err(Error::DetectionFile {
                    path: path.to_path_buf(),
                    reason: format!("entry {i} of image {id}: {e}"),
                });
            }
        }
    }
    Ok(map)
}

/// Localization quality of one detection file against one manifest.
#[derive(Debug, Clone)]
pub struct DetectReport {
    pub iou_threshold: f64,
    pub n_images: usize,
    pub n_ground_truth: usize,
    pub n_detections: usize,
    /// All-point interpolated average precision. With a single artifact
    /// class this is also the mean AP.
    pub average_precision: f64,
    /// Counts at the full operating point (every detection kept).
    pub counts: DetectionCounts,
}

impl DetectReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "images evaluated      {}", self.n_images);
        let _ = writeln!(s, "ground-truth boxes    {}", self.n_ground_truth);
        let _ = writeln!(s, "detections            {}", self.n_detections);
        let _ = writeln!(s, "IoU threshold         {:.2}", self.iou_threshold);
        let _ = writeln!(s, "average precision     {:.4}", self.average_precision);
        let c = &self.counts;
        let precision = c.tp as f64 / (c.tp + c.fp).max(1) as f64;
        let recall = c.tp as f64 / (c.tp + c.fn_).max(1) as f64;
        let _ = writeln!(
            s,
            "operating point       TP {}  FP {}  FN {}  precision {:.4}  recall {:.4}",
            c.tp, c.fp, c.fn_, precision, recall
        );
        s
    }
}

/// Scores a detection file against the ground truth of a manifest.
///
/// Every id in the detection file must name a sample of the manifest;
/// manifest samples without an entry count as "no detections".
pub fn cmd_eval_detect(
    manifest_path: &Path,
    detections_path: &Path,
    iou_threshold: f64,
) -> Result<DetectReport> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "IoU threshold {iou_threshold} outside (0, 1]"
        )));
    }
    let manifest = read_manifest(manifest_path)?;
    let mut detections = read_detection_file(detections_path)?;

    let known: HashSet<String> = manifest
        .records
        .iter()
        .map(|r| r.sample_id.to_string())
        .collect();
    let unknown: Vec<String> = detections
        .keys()
        .filter(|id| !known.contains(*id))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(Error::UnresolvedImageId { ids: unknown });
    }

    let mut per_image: Vec<Vec<Detection>> = Vec::with_capacity(manifest.records.len());
    let mut ground_truth: Vec<Vec<BBox>> = Vec::with_capacity(manifest.records.len());
    for record in &manifest.records {
        let entries = detections
            .remove(&record.sample_id.to_string())
            .unwrap_or_default();
        per_image.push(
            entries
                .into_iter()
                .map(|e| Detection {
                    bbox: BBox::from_corners(e.bbox).expect("validated on read"),
                    score: e.score,
                })
                .collect(),
        );
        ground_truth.push(record.boxes.clone());
    }

    let ap = average_precision(&per_image, &ground_truth, iou_threshold)?;
    let counts = detection_counts(&per_image, &ground_truth, iou_threshold)?;
    Ok(DetectReport {
        iou_threshold,
        n_images: manifest.records.len(),
        n_ground_truth: ground_truth.iter().map(|g| g.len()).sum(),
        n_detections: per_image.iter().map(|d| d.len()).sum(),
        average_precision: ap,
        counts,
    })
}

// ---------------------------------------------------------------------------
// eval-correct
// ---------------------------------------------------------------------------

/// Looks up the corrected version of one sample in `dir`.
///
/// Accepted layouts, in order of precedence:
/// 1. a full-frame image `<id>.png` (zero-padded `<id:06>.png` also works);
/// 2. one crop per ground-truth box, `<id>_box<i>.png`, pasted onto the
///    corrupted image at box `i`'s position.
///
/// `Ok(None)` means no correction was provided for this sample.
fn resolve_correction(
    dir: &Path,
    record: &SampleRecord,
    corrupted: &Image2D,
) -> Result<Option<Image2D>> {
    let full_candidates = [
        dir.join(format!("{}.png", record.sample_id)),
        dir.join(format!("{:06}.png", record.sample_id)),
    ];
    for candidate in &full_candidates {
        if candidate.is_file() {
            let img = load_image(candidate)?;
            if img.width() != corrupted.width() || img.height() != corrupted.height() {
                return Err(Error::Other(format!(
                    "correction {} is {}x{}, sample {} is {}x{}",
                    candidate.display(),
                    img.width(),
                    img.height(),
                    record.sample_id,
                    corrupted.width(),
                    corrupted.height()
                )));
            }
            return Ok(Some(img));
        }
    }

    let crop_paths: Vec<PathBuf> = (0..record.boxes.len())
        .map(|i| dir.join(format!("{}_box{}.png", record.sample_id, i)))
        .collect();
    if !crop_paths.iter().any(|p| p.is_file()) {
        return Ok(None);
    }
    let mut corrected = corrupted.clone();
    for (i, (path, bbox)) in crop_paths.iter().zip(&record.boxes).enumerate() {
        if !path.is_file() {
            return Err(Error::MissingCorrections {
                ids: vec![format!("{}_box{}", record.sample_id, i)],
            });
        }
        let crop = load_image(path)?;
        if crop.width() != bbox.width() as usize || crop.height() != bbox.height() as usize {
            return Err(Error::Other(format!(
                "crop {} is {}x{}, box {} of sample {} is {}x{}",
                path.display(),
                crop.width(),
                crop.height(),
                i,
                record.sample_id,
                bbox.width(),
                bbox.height()
            )));
        }
        let [x0, y0, ..] = bbox.corners();
        for y in 0..crop.height() {
            for x in 0..crop.width() {
                corrected.set(x0 as usize + x, y0 as usize + y, crop.get(x, y));
            }
        }
    }
    Ok(Some(corrected))
}

/// Scores a directory of corrected images against a manifest: fidelity to
/// the clean targets, summarized per PSNR band, with paired t-tests on
/// the RMSE improvement.
///
/// Every manifest sample must have a correction (full frame or box
/// crops); metrics are computed after 16-bit quantization so results are
/// reproducible from the files alone.
pub fn cmd_eval_correct(manifest_path: &Path, corrections_dir: &Path) -> Result<BinnedReport> {
    let manifest = read_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let mut pairs = Vec::with_capacity(manifest.records.len());
    let mut missing = Vec::new();
    for record in &manifest.records {
        let clean = load_image(&base.join(&record.clean_path))?;
        let corrupted = load_image(&base.join(&record.corrupted_path))?;
        match resolve_correction(corrections_dir, record, &corrupted)? {
            None => missing.push(record.sample_id.to_string()),
            Some(corrected) => {
                let corrected = corrected.quantize_u16();
                pairs.push(PairFidelity {
                    bin: record.psnr_bin,
                    rmse_degraded: rmse(&clean, &corrupted)?,
                    rmse_corrected: rmse(&clean, &corrected)?,
                    psnr_degraded: psnr(&clean, &corrupted)?,
                    psnr_corrected: psnr(&clean, &corrected)?,
                });
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingCorrections { ids: missing });
    }
    Ok(BinnedReport::from_pairs(&pairs))
}

// ---------------------------------------------------------------------------
// regional-std
// ---------------------------------------------------------------------------

/// One row of a regional-variability comparison file.
#[derive(Debug, Clone, Deserialize)]
pub struct RegionalStdPair {
    pub before: PathBuf,
    pub after: PathBuf,
    /// `[x_min, y_min, x_max, y_max]`, half-open pixel bounds.
    #[serde(rename = "box")]
    pub bbox: [u32; 4],
}

/// Regional standard deviations before/after treatment, with the paired
/// t-test over the per-box values.
#[derive(Debug, Clone)]
pub struct RegionalStdReport {
    pub n: usize,
    pub mean_before: f64,
    pub mean_after: f64,
    pub per_box: Vec<(f64, f64)>,
    pub ttest: TTestResult,
}

impl RegionalStdReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "regions compared      {}", self.n);
        let _ = writeln!(s, "mean std before       {:.6}", self.mean_before);
        let _ = writeln!(s, "mean std after        {:.6}", self.mean_after);
        let t = &self.ttest;
        let _ = writeln!(s, "change                {:+.2}%", t.percent_change);
        let _ = writeln!(
            s,
            "paired t-test         t = {:.4}, df = {}, p = {:.3e} (two-sided), {:.3e} (one-sided)",
            t.t_statistic,
            t.degrees_of_freedom,
            t.p_two_sided,
            t.p_one_sided
        );
        s
    }
}

/// Compares pixel variability inside boxes across image pairs. The input
/// is a JSON array of `{"before": path, "after": path, "box": [..]}` rows;
/// relative paths resolve against the JSON file's directory.
pub fn cmd_regional_std(pairs_path: &Path) -> Result<RegionalStdReport> {
    let text = fs::read_to_string(pairs_path).map_err(|e| Error::io(pairs_path, e))?;
    let rows: Vec<RegionalStdPair> =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!(
            "{}: {e}",
            pairs_path.display()
        )))?;
    if rows.is_empty() {
        return Err(Error::SampleTooSmall { need: 2, got: 0 });
    }
    let base = pairs_path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };

    let mut before = Vec::with_capacity(rows.len());
    let mut after = Vec::with_capacity(rows.len());
    for row in &rows {
        let bbox = BBox::from_corners(row.bbox)?;
        let img_before = load_image(&resolve(&row.before))?;
        let img_after = load_image(&resolve(&row.after))?;
        before.push(regional_std(&img_before, &bbox)?);
        after.push(regional_std(&img_after, &bbox)?);
    }
    let ttest = paired_t_test(&before, &after)?;
    let n = rows.len() as f64;
    Ok(RegionalStdReport {
        n: rows.len(),
        mean_before: before.iter().sum::<f64>() / n,
        mean_after: after.iter().sum::<f64>() / n,
        per_box: before.into_iter().zip(after).collect(),
        ttest,
    })
}

// ---------------------------------------------------------------------------
// gallery
// ---------------------------------------------------------------------------

fn draw_box_outline(img: &mut Image2D, bbox: &BBox) {
    let [x0, y0, x1, y1] = bbox.corners();
    let (x1, y1) = (x1 as usize - 1, y1 as usize - 1);
    let (x0, y0) = (x0 as usize, y0 as usize);
    for x in x0..=x1 {
        img.set(x, y0, 1.0);
        img.set(x, y1, 1.0);
    }
    for y in y0..=y1 {
        img.set(x0, y, 1.0);
        img.set(x1, y, 1.0);
    }
}

const GALLERY_GAP: usize = 2;

fn hstack(panels: &[Image2D]) -> Image2D {
    let height = panels.iter().map(Image2D::height).max().unwrap_or(0);
    let width = panels.iter().map(Image2D::width).sum::<usize>()
        + GALLERY_GAP * panels.len().saturating_sub(1);
    let mut out = Image2D::from_fn(width, height, |_, _| 1.0);
    let mut x_off = 0;
    for panel in panels {
        for y in 0..height {
            for x in 0..panel.width() {
                let v = if y < panel.height() { panel.get(x, y) } else { 0.0 };
                out.set(x_off + x, y, v);
            }
        }
        x_off += panel.width() + GALLERY_GAP;
    }
    out
}

fn vstack(rows: &[Image2D]) -> Image2D {
    let width = rows.iter().map(Image2D::width).max().unwrap_or(0);
    let height = rows.iter().map(Image2D::height).sum::<usize>()
        + GALLERY_GAP * rows.len().saturating_sub(1);
    let mut out = Image2D::from_fn(width, height, |_, _| 1.0);
    let mut y_off = 0;
    for row in rows {
        for y in 0..row.height() {
            for x in 0..width {
                let v = if x < row.width() { row.get(x, y) } else { 0.0 };
                out.set(x, y_off + y, v);
            }
        }
        y_off += row.height() + GALLERY_GAP;
    }
    out
}

/// Renders a contact sheet of the first `count` manifest samples (all of
/// them when `count` is 0): clean target, corrupted input with the
/// ground-truth boxes outlined, and — when a corrections directory is
/// given — the corrected output. Returns the written path.
pub fn cmd_gallery(
    manifest_path: &Path,
    out_path: &Path,
    corrections_dir: Option<&Path>,
    count: usize,
) -> Result<PathBuf> {
    let manifest = read_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let take = if count == 0 {
        manifest.records.len()
    } else {
        count.min(manifest.records.len())
    };
    if take == 0 {
        return Err(Error::Other("manifest has no samples to render".into()));
    }

    let mut rows = Vec::with_capacity(take);
    for record in &manifest.records[..take] {
        let clean = load_image(&base.join(&record.clean_path))?;
        let corrupted = load_image(&base.join(&record.corrupted_path))?;
        let mut annotated = corrupted.clone();
        for bbox in &record.boxes {
            draw_box_outline(&mut annotated, bbox);
        }
        let mut panels = vec![clean, annotated];
        if let Some(dir) = corrections_dir {
            match resolve_correction(dir, record, &corrupted)? {
                Some(corrected) => panels.push(corrected),
                None => {
                    return Err(Error::MissingCorrections {
                        ids: vec![record.sample_id.to_string()],
                    })
                }
            }
        }
        rows.push(hstack(&panels));
    }
    let sheet = vstack(&rows);
    save_image(&sheet, out_path)?;
    Ok(out_path.to_path_buf())
}

// ---------------------------------------------------------------------------
// Single-image demonstration commands
// ---------------------------------------------------------------------------

/// Applies the radial warp to one image with randomly placed circles.
/// Returns the circles used.
pub fn cmd_warp(
    input: &Path,
    output: &Path,
    seed: u64,
    epsilon: f64,
) -> Result<Vec<WarpCircle>> {
    let img = load_image(input)?;
    let mut rng = SeedMixer::new(seed).str("warp-demo").rng();
    let mut circles = place_circles(&mut rng, img.width(), img.height())?;
    for c in &mut circles {
        c.epsilon = epsilon;
    }
    let warped = warp_image(&img, &circles)?;
    save_image(&warped, output)?;
    Ok(circles)
}

/// Pushes one image through the k-space ring generator. `combo` picks one
/// of the three stock parameter combinations (randomly when `None`);
/// `jitter` perturbs it the way dataset builds do. Returns the parameters
/// actually applied.
pub fn cmd_ring(
    input: &Path,
    output: &Path,
    seed: u64,
    combo: Option<usize>,
    jitter: bool,
) -> Result<AnnularSectorParams> {
    let img = load_image(input)?;
    let mut rng = SeedMixer::new(seed).str("ring-demo").rng();
    let combos = base_combinations();
    let base = match combo {
        Some(i) if i < combos.len() => combos[i],
        Some(i) => {
            return Err(Error::InvalidParameter(format!(
                "combo index {i} out of range 0..{}",
                combos.len()
            )))
        }
        None => {
            use rand::Rng;
            combos[rng.random_range(0..combos.len())]
        }
    };
    let params = if jitter { jitter_params(&base, &mut rng) } else { base };
    let out = crate::ring::gen_ring_artifact_image(&img, &params)?;
    save_image(&out, output)?;
    Ok(params)
}

/// Pushes one image through the elliptic ripple generator with randomly
/// sampled parameters. Returns the parameters applied.
pub fn cmd_ripple(input: &Path, output: &Path, seed: u64) -> Result<RippleParams> {
    let img = load_image(input)?;
    let mut rng = SeedMixer::new(seed).str("ripple-demo").rng();
    let params = sample_ripple_params(&mut rng, img.width(), img.height());
    let out = gen_ripple_artifact_image(&img, &params)?;
    save_image(&out, output)?;
    Ok(params)
}

/// Writes a synthetic head volume, for exercising the toolkit without
/// scan data at hand.
pub fn cmd_phantom(
    output: &Path,
    nx: usize,
    ny: usize,
    nz: usize,
    seed: u64,
) -> Result<()> {
    let vol = head_volume(nx, ny, nz, seed);
    save_volume_nifti(&vol, output)
}

/// Applies the reference smoothing corrector to every sample of a
/// manifest, writing full-frame corrections into `out_dir`. Useful as a
/// working example of the correction exchange layout.
pub fn cmd_baseline_correct(manifest_path: &Path, out_dir: &Path) -> Result<usize> {
    let manifest = read_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for record in &manifest.records {
        let corrupted = load_image(&base.join(&record.corrupted_path))?;
        let corrected = crate::correct::baseline_correct(
            &corrupted,
            &record.boxes,
            crate::correct::BASELINE_SIGMA,
        )?;
        save_image(
            &corrected,
            &out_dir.join(format!("{}.png", record.sample_id)),
        )?;
    }
    Ok(manifest.records.len())
}
