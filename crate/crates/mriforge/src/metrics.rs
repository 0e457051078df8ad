//! Evaluation metrics: image fidelity, box overlap, detection average
//! precision, regional variability and the paired t-test.
//!
//! All image metrics operate on the unit intensity scale, so PSNR is
//! `-20 log10(RMSE)` with no separate peak term. Detection scoring follows
//! the familiar all-point interpolated average precision: detections are
//! ranked by score, greedily matched to ground truth at an IoU threshold,
//! and precision is integrated over recall under its monotone envelope.
//! Ties are broken deterministically (image order, then box coordinates)
//! so two runs over the same inputs always agree.

use serde::{Deserialize, Serialize};

use crate::compose::BBox;
use crate::error::{Error, Result};
use crate::image::Image2D;
use crate::stats::student_t_p_two_sided;

// ---------------------------------------------------------------------------
// Fidelity
// ---------------------------------------------------------------------------

/// Root-mean-square error between two equally-sized images.
pub fn rmse(a: &Image2D, b: &Image2D) -> Result<f64> {
    if !a.same_size(b) {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    let n = a.len() as f64;
    let sq: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok((sq / n).sqrt())
}

/// Peak signal-to-noise ratio in dB on the unit scale. Identical images
/// give `+inf`.
pub fn psnr(a: &Image2D, b: &Image2D) -> Result<f64> {
    let e = rmse(a, b)?;
    if e == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(-20.0 * e.log10())
    }
}

/// The PSNR quality bands a generated test set is balanced over. Samples at
/// or above 21 dB are considered too mild and are discarded during
/// generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PsnrBin {
    #[serde(rename = "<17")]
    Below17,
    #[serde(rename = "17-18")]
    From17,
    #[serde(rename = "18-19")]
    From18,
    #[serde(rename = "19-20")]
    From19,
    #[serde(rename = "20-21")]
    From20,
}

impl PsnrBin {
    pub const ALL: [PsnrBin; 5] = [
        PsnrBin::Below17,
        PsnrBin::From17,
        PsnrBin::From18,
        PsnrBin::From19,
        PsnrBin::From20,
    ];

    /// Classifies a PSNR value; `None` means "too mild, discard".
    pub fn from_psnr(db: f64) -> Option<PsnrBin> {
        if db < 17.0 {
            Some(PsnrBin::Below17)
        } else if db < 18.0 {
            Some(PsnrBin::From17)
        } else if db < 19.0 {
            Some(PsnrBin::From18)
        } else if db < 20.0 {
            Some(PsnrBin::From19)
        } else if db < 21.0 {
            Some(PsnrBin::From20)
        } else {
            None
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PsnrBin::Below17 => "<17",
            PsnrBin::From17 => "17-18",
            PsnrBin::From18 => "18-19",
            PsnrBin::From19 => "19-20",
            PsnrBin::From20 => "20-21",
        }
    }

    pub fn index(self) -> usize {
        PsnrBin::ALL.iter().position(|&b| b == self).unwrap()
    }
}

impl std::fmt::Display for PsnrBin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

// ---------------------------------------------------------------------------
// Box overlap and detection scoring
// ---------------------------------------------------------------------------

/// Intersection over union of two half-open boxes. Zero overlap gives 0;
/// identical boxes give 1.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = match a.intersect(b) {
        Some(i) => i.area() as f64,
        None => 0.0,
    };
    let union = a.area() as f64 + b.area() as f64 - inter;
    if union == 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// A scored candidate box from an external detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: BBox,
    pub score: f64,
}

/// One ranked detection after greedy matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedMatch {
    /// Index into the per-image lists handed to the matcher.
    pub image: usize,
    /// Index of the detection within its image's list.
    pub detection: usize,
    pub score: f64,
    /// True positive at the matcher's IoU threshold?
    pub tp: bool,
}

/// Greedy score-ordered matching of detections against ground truth.
///
/// Detections across all images are ranked by descending score, ties broken
/// by image index and then box coordinates. Each detection claims the
/// unmatched ground-truth box (in its own image) with the highest IoU,
/// lowest index on ties; it is a true positive when that IoU reaches
/// `iou_threshold`. Duplicate hits on an already-claimed box are false
/// positives.
pub fn match_detections(
    detections: &[Vec<Detection>],
    ground_truth: &[Vec<BBox>],
    iou_threshold: f64,
) -> Result<Vec<RankedMatch>> {
    if detections.len() != ground_truth.len() {
        return Err(Error::LengthMismatch(
            detections.len(),
            ground_truth.len(),
        ));
    }

    let mut ranked: Vec<(usize, usize)> = detections
        .iter()
        .enumerate()
        .flat_map(|(i, dets)| (0..dets.len()).map(move |d| (i, d)))
        .collect();
    ranked.sort_by(|&(ia, da), &(ib, db)| {
        let sa = detections[ia][da].score;
        let sb = detections[ib][db].score;
        sb.total_cmp(&sa)
            .then(ia.cmp(&ib))
            .then(detections[ia][da].bbox.corners().cmp(&detections[ib][db].bbox.corners()))
    });

    let mut claimed: Vec<Vec<bool>> = ground_truth.iter().map(|g| vec![false; g.len()]).collect();
    let mut out = Vec::with_capacity(ranked.len());
    for (img, det) in ranked {
        let dbox = &detections[img][det].bbox;
        let mut best: Option<(f64, usize)> = None;
        for (gi, gbox) in ground_truth[img].iter().enumerate() {
            if claimed[img][gi] {
                continue;
            }
            let o = iou(dbox, gbox);
            if best.map_or(true, |(bo, _)| o > bo) {
                best = Some((o, gi));
            }
        }
        let tp = match best {
            Some((o, gi)) if o >= iou_threshold => {
                claimed[img][gi] = true;
                true
            }
            _ => false,
        };
        out.push(RankedMatch {
            image: img,
            detection: det,
            score: detections[img][det].score,
            tp,
        });
    }
    Ok(out)
}

/// All-point interpolated average precision for a single class.
///
/// Precision is taken under its monotone non-increasing envelope and
/// integrated over recall. Zero ground-truth boxes make recall undefined
/// and produce an error rather than a silent 0 or 1.
pub fn average_precision(
    detections: &[Vec<Detection>],
    ground_truth: &[Vec<BBox>],
    iou_threshold: f64,
) -> Result<f64> {
    let total_gt: usize = ground_truth.iter().map(|g| g.len()).sum();
    if total_gt == 0 {
        return Err(Error::NoGroundTruth);
    }
    let ranked = match_detections(detections, ground_truth, iou_threshold)?;
    if ranked.is_empty() {
        return Ok(0.0);
    }

    // Precision/recall after each successive detection.
    let mut tp = 0usize;
    let mut curve: Vec<(f64, f64)> = Vec::with_capacity(ranked.len()); // (recall, precision)
    for (k, m) in ranked.iter().enumerate() {
        if m.tp {
            tp += 1;
        }
        let precision = tp as f64 / (k + 1) as f64;
        let recall = tp as f64 / total_gt as f64;
        curve.push((recall, precision));
    }

    // Monotone envelope from the right, then integrate over recall steps.
    let mut envelope = vec![0.0; curve.len()];
    let mut running = 0.0f64;
    for k in (0..curve.len()).rev() {
        running = running.max(curve[k].1);
        envelope[k] = running;
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (k, &(recall, _)) in curve.iter().enumerate() {
        if recall > prev_recall {
            ap += (recall - prev_recall) * envelope[k];
            prev_recall = recall;
        }
    }
    Ok(ap)
}

/// Aggregate true/false positive and false negative counts implied by the
/// greedy matching at a fixed IoU threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DetectionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

pub fn detection_counts(
    detections: &[Vec<Detection>],
    ground_truth: &[Vec<BBox>],
    iou_threshold: f64,
) -> Result<DetectionCounts> {
    let ranked = match_detections(detections, ground_truth, iou_threshold)?;
    let tp = ranked.iter().filter(|m| m.tp).count();
    let fp = ranked.len() - tp;
    let total_gt: usize = ground_truth.iter().map(|g| g.len()).sum();
    Ok(DetectionCounts {
        tp,
        fp,
        fn_: total_gt - tp,
    })
}

// ---------------------------------------------------------------------------
// Regional variability and the paired t-test
// ---------------------------------------------------------------------------

/// Population standard deviation of the pixels inside a box.
///
/// The box must fit the frame and span at least 2x2 pixels — anything
/// smaller has no meaningful spread.
pub fn regional_std(img: &Image2D, bbox: &BBox) -> Result<f64> {
    if !bbox.fits_in(img.width(), img.height()) {
        return Err(Error::DegenerateBox(format!(
            "box {:?} exceeds {}x{} frame",
            bbox.corners(),
            img.width(),
            img.height()
        )));
    }
    if bbox.area() < 4 {
        return Err(Error::DegenerateBox(format!(
            "box {:?} smaller than 2x2",
            bbox.corners()
        )));
    }
    let n = bbox.area() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for y in bbox.y_min..bbox.y_max {
        for x in bbox.x_min..bbox.x_max {
            let v = img.get(x as usize, y as usize);
            sum += v;
            sum_sq += v * v;
        }
    }
    let mean = sum / n;
    Ok((sum_sq / n - mean * mean).max(0.0).sqrt())
}

/// Result of a paired t-test on before/after measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_two_sided: f64,
    /// Tail probability in the direction of the observed effect.
    pub p_one_sided: f64,
    /// Mean of `before - after`.
    pub mean_difference: f64,
    /// `mean(after - before) / mean(before) * 100`.
    pub percent_change: f64,
}

/// Paired t-test on `before` vs `after`, differences `before - after`,
/// sample standard deviation with `n - 1` degrees of freedom.
pub fn paired_t_test(before: &[f64], after: &[f64]) -> Result<TTestResult> {
    if before.len() != after.len() {
        return Err(Error::LengthMismatch(before.len(), after.len()));
    }
    let n = before.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { need: 2, got: n });
    }
    let diffs: Vec<f64> = before.iter().zip(after).map(|(b, a)| b - a).collect();
    let nf = n as f64;
    let mean_d = diffs.iter().sum::<f64>() / nf;
    let var = diffs.iter().map(|d| (d - mean_d) * (d - mean_d)).sum::<f64>() / (nf - 1.0);
    if var == 0.0 {
        return Err(Error::DegenerateSample);
    }
    let se = (var / nf).sqrt();
    let t = mean_d / se;
    let df = n - 1;
    let p2 = student_t_p_two_sided(t, df as f64);
    let mean_before = before.iter().sum::<f64>() / nf;
    let mean_after = after.iter().sum::<f64>() / nf;
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_two_sided: p2,
        p_one_sided: p2 / 2.0,
        mean_difference: mean_d,
        percent_change: (mean_after - mean_before) / mean_before * 100.0,
    })
}

// ---------------------------------------------------------------------------
// Binned fidelity report
// ---------------------------------------------------------------------------

/// Per-sample fidelity numbers feeding the binned report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFidelity {
    pub bin: PsnrBin,
    pub rmse_degraded: f64,
    pub rmse_corrected: f64,
    pub psnr_degraded: f64,
    pub psnr_corrected: f64,
}

/// Aggregates for one PSNR band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinRow {
    pub bin: PsnrBin,
    pub n: usize,
    pub rmse_degraded_mean: f64,
    pub rmse_degraded_sd: f64,
    pub rmse_corrected_mean: f64,
    pub rmse_corrected_sd: f64,
    /// Percent reduction of mean RMSE, positive when correction helps.
    pub rmse_reduction_pct: f64,
    pub psnr_degraded_mean: f64,
    pub psnr_degraded_sd: f64,
    /// Mean over finite corrected PSNRs; perfectly restored samples are
    /// counted separately.
    pub psnr_corrected_mean: f64,
    pub psnr_corrected_sd: f64,
    pub psnr_gain_db: f64,
    pub n_perfect: usize,
    /// Paired t-test on RMSE before/after correction, when defined.
    pub t_statistic: Option<f64>,
    pub p_two_sided: Option<f64>,
}

/// Correction quality summarized per PSNR band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedReport {
    pub rows: Vec<BinRow>,
    pub total: usize,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl BinnedReport {
    /// Builds the report from per-sample measurements. Every band appears
    /// in order, including empty ones (with `n = 0` and NaN statistics), so
    /// the table shape is stable.
    pub fn from_pairs(pairs: &[PairFidelity]) -> BinnedReport {
        let rows = PsnrBin::ALL
            .iter()
            .map(|&bin| {
                let in_bin: Vec<&PairFidelity> =
                    pairs.iter().filter(|p| p.bin == bin).collect();
                let rd: Vec<f64> = in_bin.iter().map(|p| p.rmse_degraded).collect();
                let rc: Vec<f64> = in_bin.iter().map(|p| p.rmse_corrected).collect();
                let pd: Vec<f64> = in_bin.iter().map(|p| p.psnr_degraded).collect();
                let pc_finite: Vec<f64> = in_bin
                    .iter()
                    .map(|p| p.psnr_corrected)
                    .filter(|v| v.is_finite())
                    .collect();
                let n_perfect = in_bin.len() - pc_finite.len();

                let (rdm, rds) = mean_sd(&rd);
                let (rcm, rcs) = mean_sd(&rc);
                let (pdm, pds) = mean_sd(&pd);
                let (pcm, pcs) = mean_sd(&pc_finite);

                let t = paired_t_test(&rd, &rc).ok();
                BinRow {
                    bin,
                    n: in_bin.len(),
                    rmse_degraded_mean: rdm,
                    rmse_degraded_sd: rds,
                    rmse_corrected_mean: rcm,
                    rmse_corrected_sd: rcs,
                    rmse_reduction_pct: (rdm - rcm) / rdm * 100.0,
                    psnr_degraded_mean: pdm,
                    psnr_degraded_sd: pds,
                    psnr_corrected_mean: pcm,
                    psnr_corrected_sd: pcs,
                    psnr_gain_db: pcm - pdm,
                    n_perfect,
                    t_statistic: t.map(|t| t.t_statistic),
                    p_two_sided: t.map(|t| t.p_two_sided),
                }
            })
            .collect();
        BinnedReport {
            rows,
            total: pairs.len(),
        }
    }

    /// Fixed-width text table, one row per PSNR band.
    pub fn to_text_table(&self) -> String {
        let mut s = String::new();
        s.push_str(
            "bin      n    RMSE deg (sd)      RMSE corr (sd)     red%   PSNR deg (sd)      PSNR corr (sd)     gain dB\n",
        );
        for r in &self.rows {
            if r.n == 0 {
                s.push_str(&format!("{:<8} {:<4} (empty)\n", r.bin.label(), 0));
                continue;
            }
            s.push_str(&format!(
                "{:<8} {:<4} {:.3} ({:.3})      {:.3} ({:.3})      {:+5.1}  {:5.2} ({:4.2})      {:5.2} ({:4.2})      {:+5.2}\n",
                r.bin.label(),
                r.n,
                r.rmse_degraded_mean,
                r.rmse_degraded_sd,
                r.rmse_corrected_mean,
                r.rmse_corrected_sd,
                r.rmse_reduction_pct,
                r.psnr_degraded_mean,
                r.psnr_degraded_sd,
                r.psnr_corrected_mean,
                r.psnr_corrected_sd,
                r.psnr_gain_db,
            ));
        }
        s
    }
}
