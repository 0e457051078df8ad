//! Pair synthesis and PSNR-binned test-set construction.
//!
//! A *pair* is built from one clean slice in a fixed order: radial warp
//! (making the clean target a plausible anatomy variant), artifact
//! generation on the warped slice (ring twice as often as ripple),
//! region sampling, compositing, histogram matching back onto the clean
//! variant, and finally 16-bit quantization of both images so every stored
//! metric can be recomputed bit-for-bit from the saved files.
//!
//! Test sets are balanced over the five PSNR bands by rejection sampling:
//! slices are cycled round-robin, each (slice, round) combination gets its
//! own RNG substream derived from the master seed, and a pair is kept only
//! while its band still has room. Because substreams depend on nothing but
//! stable identifiers, generation parallelizes freely — worker count
//! cannot change the output.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compose::{composite, histogram_match, rois_to_bboxes, sample_rois, BBox, CircleROI};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::image::{Axis, Image2D, Volume3D};
use crate::io::save_image;
use crate::metrics::{psnr, rmse, PsnrBin};
use crate::ring::{base_combinations, gen_ring_artifact_image, jitter_params};
use crate::ripple::{gen_ripple_artifact_image, sample_ripple_params};
use crate::rng::{SeedMixer, StreamRng};
use crate::warp::{place_circles, warp_image, WarpCircle};

/// Probability that a pair uses the ring generator; the remainder use
/// ripple, giving the documented 2:1 mix.
pub const RING_PROBABILITY: f64 = 2.0 / 3.0;

/// Consecutive unproductive generation attempts tolerated before a build
/// gives up and names the starving band.
pub const STALL_LIMIT: u64 = 10_000;

/// Current manifest schema.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// One clean slice of the generation pool, tagged with its provenance.
#[derive(Debug, Clone)]
pub struct CleanSlice {
    pub scan_id: String,
    pub axis: Axis,
    pub slice_index: usize,
    pub image: Image2D,
}

/// Uniformly samples distinct slice indices along each axis, screening out
/// slices with less than `min_foreground` tissue. Returns the picks and a
/// saturation flag set when some axis could not supply `per_axis` usable
/// slices (short axis, or too many screened out).
pub fn sample_slices(
    vol: &Volume3D,
    per_axis: usize,
    min_foreground: f64,
    rng: &mut StreamRng,
) -> (Vec<(Axis, usize)>, bool) {
    let mut picks = Vec::new();
    let mut saturated = false;
    for axis in Axis::ALL {
        let extent = vol.extent(axis);
        let mut indices: Vec<usize> = (0..extent).collect();
        indices.shuffle(rng);
        let mut taken = 0usize;
        for idx in indices {
            if taken == per_axis {
                break;
            }
            let slice = vol
                .extract_slice(axis, idx)
                .expect("index below extent");
            if crate::compose::foreground_fraction(&slice) >= min_foreground {
                picks.push((axis, idx));
                taken += 1;
            }
        }
        if taken < per_axis {
            saturated = true;
        }
    }
    (picks, saturated)
}

/// [`sample_slices`] plus extraction: returns ready-to-use pool entries.
pub fn collect_clean_slices(
    vol: &Volume3D,
    scan_id: &str,
    per_axis: usize,
    min_foreground: f64,
    rng: &mut StreamRng,
) -> (Vec<CleanSlice>, bool) {
    let (picks, saturated) = sample_slices(vol, per_axis, min_foreground, rng);
    let slices = picks
        .into_iter()
        .map(|(axis, slice_index)| CleanSlice {
            scan_id: scan_id.to_string(),
            axis,
            slice_index,
            image: vol.extract_slice(axis, slice_index).expect("sampled index"),
        })
        .collect();
    (slices, saturated)
}

/// Which generator corrupted a sample, with its exact parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum GeneratorParams {
    Ring(crate::ring::AnnularSectorParams),
    Ripple(crate::ripple::RippleParams),
}

impl GeneratorParams {
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorParams::Ring(_) => "ring",
            GeneratorParams::Ripple(_) => "ripple",
        }
    }
}

/// Everything produced for one corrupted/clean pair.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    /// The warped clean target, 16-bit quantized.
    pub clean: Image2D,
    /// The corrupted counterpart, 16-bit quantized.
    pub corrupted: Image2D,
    /// The clean variant before quantization.
    pub warped: Image2D,
    /// Composite before histogram matching — differs from `warped` only
    /// inside the region disks.
    pub composited: Image2D,
    pub circles: Vec<WarpCircle>,
    pub generator: GeneratorParams,
    pub rois: Vec<CircleROI>,
    pub boxes: Vec<BBox>,
    pub rmse: f64,
    pub psnr_db: f64,
}

/// Builds one pair from a clean slice. The RNG draw order is part of the
/// reproducibility contract: warp circles, generator choice, generator
/// parameters, regions.
pub fn make_pair(clean: &Image2D, cfg: &Config, rng: &mut StreamRng) -> Result<PairOutcome> {
    let (w, h) = (clean.width(), clean.height());

    let mut circles = place_circles(rng, w, h)?;
    for c in &mut circles {
        c.epsilon = cfg.warp.epsilon;
    }
    let warped = warp_image(clean, &circles)?;

    let generator = if rng.random::<f64>() < RING_PROBABILITY {
        let base = base_combinations()[rng.random_range(0..3)];
        GeneratorParams::Ring(jitter_params(&base, rng))
    } else {
        GeneratorParams::Ripple(sample_ripple_params(rng, w, h))
    };
    let artifact = match &generator {
        GeneratorParams::Ring(p) => gen_ring_artifact_image(&warped, p)?,
        GeneratorParams::Ripple(p) => gen_ripple_artifact_image(&warped, p)?,
    };

    let rois = sample_rois(
        rng,
        &warped,
        (cfg.roi.count_min, cfg.roi.count_max),
        (cfg.roi.radius_min, cfg.roi.radius_max),
    )?;
    let composited = composite(&warped, &artifact, &rois)?;
    let matched = histogram_match(&composited, &warped)?;
    let boxes = rois_to_bboxes(&rois, w, h);

    let clean_q = warped.quantize_u16();
    let corrupted_q = matched.quantize_u16();
    let rmse = rmse(&clean_q, &corrupted_q)?;
    let psnr_db = psnr(&clean_q, &corrupted_q)?;

    Ok(PairOutcome {
        clean: clean_q,
        corrupted: corrupted_q,
        warped,
        composited,
        circles,
        generator,
        rois,
        boxes,
        rmse,
        psnr_db,
    })
}

/// One line of the dataset manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample_id: u64,
    pub scan_id: String,
    pub axis: Axis,
    pub slice_index: usize,
    /// Recorded 4:1 train/val assignment; nothing in this toolkit enforces
    /// it.
    pub split: String,
    #[serde(flatten)]
    pub generator: GeneratorParams,
    pub rois: Vec<CircleROI>,
    pub boxes: Vec<BBox>,
    /// Image paths relative to the manifest's directory.
    pub clean_path: String,
    pub corrupted_path: String,
    pub rmse: f64,
    pub psnr_db: f64,
    pub psnr_bin: PsnrBin,
    /// Seed of the substream that generated this sample.
    pub substream_seed: u64,
}

/// The build output: header metadata plus one record per accepted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub master_seed: u64,
    /// TOML snapshot of the effective build configuration.
    pub config_toml: String,
    pub warnings: Vec<String>,
    /// Slices that failed generation, as "scan/axis/index round N: reason".
    pub skipped: Vec<String>,
    pub records: Vec<SampleRecord>,
}

#[derive(Serialize, Deserialize)]
struct ManifestHeader {
    schema_version: u32,
    toolkit_version: String,
    master_seed: u64,
    config_toml: String,
    #[serde(default)]
    warnings: Vec<String>,
    #[serde(default)]
    skipped: Vec<String>,
}

impl DatasetManifest {
    /// Accepted samples per PSNR band, in band order.
    pub fn bin_counts(&self) -> [usize; 5] {
        let mut counts = [0usize; 5];
        for r in &self.records {
            counts[r.psnr_bin.index()] += 1;
        }
        counts
    }
}

/// Writes the manifest as JSON lines: one header line, then one record per
/// line, in sample-id order.
pub fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let mut out = Vec::new();
    let header = ManifestHeader {
        schema_version: manifest.schema_version,
        toolkit_version: manifest.toolkit_version.clone(),
        master_seed: manifest.master_seed,
        config_toml: manifest.config_toml.clone(),
        warnings: manifest.warnings.clone(),
        skipped: manifest.skipped.clone(),
    };
    serde_json::to_writer(&mut out, &header).expect("header serializes");
    out.push(b'\n');
    for r in &manifest.records {
        serde_json::to_writer(&mut out, r).expect("record serializes");
        out.push(b'\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}

/// Reads a manifest back, validating the schema version, id ordering and
/// the consistency of each record's stored PSNR with its band. Parse
/// failures name the line.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let header: ManifestHeader = match lines.next() {
        Some((_, Ok(line))) => serde_json::from_str(&line).map_err(|e| Error::ManifestLine {
            path: path.to_path_buf(),
            line: 1,
            reason: e.to_string(),
        })?,
        Some((_, Err(e))) => return Err(Error::io(path, e)),
        None => {
            return Err(Error::ManifestInvalid {
                path: path.to_path_buf(),
                reason: "empty file".into(),
            })
        }
    };
    if header.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(Error::ManifestInvalid {
            path: path.to_path_buf(),
            reason: format!(
                "schema version {} (this toolkit reads {MANIFEST_SCHEMA_VERSION})",
                header.schema_version
            ),
        });
    }

    let mut records: Vec<SampleRecord> = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SampleRecord =
            serde_json::from_str(&line).map_err(|e| Error::ManifestLine {
                path: path.to_path_buf(),
                line: line_no,
                reason: e.to_string(),
            })?;
        if !seen.insert(record.sample_id) {
            return Err(Error::ManifestLine {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("duplicate sample_id {}", record.sample_id),
            });
        }
        if let Some(prev) = records.last() {
            if record.sample_id < prev.sample_id {
                return Err(Error::ManifestLine {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!(
                        "sample_id {} out of order after {}",
                        record.sample_id, prev.sample_id
                    ),
                });
            }
        }
        if PsnrBin::from_psnr(record.psnr_db) != Some(record.psnr_bin) {
            return Err(Error::ManifestLine {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!(
                    "stored PSNR {:.4} dB does not fall in band {}",
                    record.psnr_db,
                    record.psnr_bin.label()
                ),
            });
        }
        records.push(record);
    }

    Ok(DatasetManifest {
        schema_version: header.schema_version,
        toolkit_version: header.toolkit_version,
        master_seed: header.master_seed,
        config_toml: header.config_toml,
        warnings: header.warnings,
        skipped: header.skipped,
        records,
    })
}

/// Derives the RNG substream seed for one generation attempt.
fn attempt_seed(master_seed: u64, slice: &CleanSlice, round: u64) -> u64 {
    SeedMixer::new(master_seed)
        .str(&slice.scan_id)
        .u64(slice.axis as u64)
        .u64(slice.slice_index as u64)
        .u64(round)
        .finish()
}

/// Builds a PSNR-balanced test set under `out_dir`.
///
/// Accepted images land in `out_dir/images/`, the manifest is returned
/// (not yet written — the caller may add warnings first). The pool is
/// cycled in a canonical sorted order, round by round; each round's pairs
/// are generated in parallel on `cfg.build.jobs` workers (0 = default
/// parallelism) and then accepted sequentially, so results are
/// byte-identical for any worker count.
pub fn build_binned_testset(
    pool: &[CleanSlice],
    cfg: &Config,
    master_seed: u64,
) -> Result<BuildProducts> {
    if pool.is_empty() {
        return Err(Error::Other("clean-slice pool is empty".into()));
    }
    let n_per_bin = cfg.build.n_per_bin;

    // Canonical generation order, independent of pool construction order.
    let mut order: Vec<&CleanSlice> = pool.iter().collect();
    order.sort_by(|a, b| {
        (&a.scan_id, a.axis as u8, a.slice_index)
            .cmp(&(&b.scan_id, b.axis as u8, b.slice_index))
    });

    let thread_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.build.jobs)
        .build()
        .map_err(|e| Error::Other(format!("worker pool: {e}")))?;

    let mut counts = [0usize; 5];
    let mut accepted: Vec<(SampleRecord, PairOutcome)> = Vec::new();
    let mut skipped = Vec::new();
    let mut stall: u64 = 0;

    'rounds: for round in 0u64.. {
        let results: Vec<(u64, Result<PairOutcome>)> = thread_pool.install(|| {
            order
                .par_iter()
                .map(|slice| {
                    let seed = attempt_seed(master_seed, slice, round);
                    let mut rng = StreamRng::seed_from_u64(seed);
                    (seed, make_pair(&slice.image, cfg, &mut rng))
                })
                .collect()
        });

        for (slice, (seed, result)) in order.iter().zip(results) {
            let full: usize = counts.iter().map(|&c| c.min(n_per_bin)).sum();
            if full == 5 * n_per_bin {
                break 'rounds;
            }
            match result {
                Err(e) => {
                    skipped.push(format!(
                        "{}/{}/{} round {round}: {e}",
                        slice.scan_id, slice.axis, slice.slice_index
                    ));
                    stall += 1;
                }
                Ok(pair) => match PsnrBin::from_psnr(pair.psnr_db) {
                    Some(bin) if counts[bin.index()] < n_per_bin => {
                        let sample_id = accepted.len() as u64;
                        counts[bin.index()] += 1;
                        stall = 0;
                        let record = SampleRecord {
                            sample_id,
                            scan_id: slice.scan_id.clone(),
                            axis: slice.axis,
                            slice_index: slice.slice_index,
                            split: if seed % 5 == 0 { "val" } else { "train" }.to_string(),
                            generator: pair.generator.clone(),
                            rois: pair.rois.clone(),
                            boxes: pair.boxes.clone(),
                            clean_path: format!("images/{sample_id:06}_clean.png"),
                            corrupted_path: format!("images/{sample_id:06}_corrupted.png"),
                            rmse: pair.rmse,
                            psnr_db: pair.psnr_db,
                            psnr_bin: bin,
                            substream_seed: seed,
                        };
                        accepted.push((record, pair));
                    }
                    _ => stall += 1, // band full, or too mild to keep
                },
            }
            if stall >= STALL_LIMIT {
                let starving = PsnrBin::ALL
                    .iter()
                    .find(|b| counts[b.index()] < n_per_bin)
                    .expect("a stalled build has an unfilled band");
                return Err(Error::BinStarved {
                    bin: starving.label().to_string(),
                    attempts: stall,
                });
            }
        }
    }

    let records = accepted.iter().map(|(r, _)| r.clone()).collect();
    let images = accepted.into_iter().map(|(_, p)| p).collect();
    // The worker count never changes the output, so it is not part of the
    // dataset's identity; snapshot it neutrally to keep manifests from
    // otherwise-identical builds byte-identical.
    let mut snapshot = cfg.clone();
    snapshot.build.jobs = 0;
    Ok(BuildProducts {
        manifest: DatasetManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            config_toml: snapshot.to_toml_string(),
            warnings: Vec::new(),
            skipped,
            records,
        },
        images,
    })
}

/// A finished build: the manifest plus the accepted pairs, in record
/// order, ready to be written.
pub struct BuildProducts {
    pub manifest: DatasetManifest,
    pub images: Vec<PairOutcome>,
}

impl BuildProducts {
    /// Writes images and manifest under `out_dir` (`manifest.jsonl` plus an
    /// `images/` subdirectory).
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let images_dir = out_dir.join("images");
        fs::create_dir_all(&images_dir).map_err(|e| Error::io(&images_dir, e))?;
        for (record, pair) in self.manifest.records.iter().zip(&self.images) {
            save_image(&pair.clean, &out_dir.join(&record.clean_path))?;
            save_image(&pair.corrupted, &out_dir.join(&record.corrupted_path))?;
        }
        let manifest_path = out_dir.join("manifest.jsonl");
        write_manifest(&self.manifest, &manifest_path)?;
        Ok(manifest_path)
    }
}
