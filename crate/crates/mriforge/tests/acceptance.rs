//! End-to-end acceptance checks, one per shipped guarantee. Each test
//! prints exactly one `acceptance N: PASS/FAIL` line; oracle-backed checks
//! recompute their expectation from scratch inside this file rather than
//! trusting library internals.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};

use mriforge::compose::BBox;
use mriforge::config::Config;
use mriforge::dataset::{make_pair, read_manifest, GeneratorParams};
use mriforge::fft::{fft2_centered, ifft2_centered, mirror_index};
use mriforge::image::Image2D;
use mriforge::io::load_image;
use mriforge::metrics::{
    average_precision, paired_t_test, psnr, regional_std, rmse, Detection,
};
use mriforge::phantom::head_slice;
use mriforge::ring::{
    apply_annular_perturbation, gen_ring_artifact_image, max_ring_radius, AnnularSectorParams,
};
use mriforge::ripple::{gen_ripple_artifact_image, RippleParams};
use mriforge::rng::StreamRng;
use mriforge::stats::student_t_p_two_sided;
use mriforge::warp::{place_circles, warp_image};

/// Runs one criterion body, printing its verdict line no matter what.
fn criterion(n: u32, desc: &str, body: impl FnOnce()) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match outcome {
        Ok(()) => println!("acceptance {n}: PASS — {desc}"),
        Err(cause) => {
            println!("acceptance {n}: FAIL — {desc}");
            std::panic::resume_unwind(cause);
        }
    }
}

fn uniform_image(width: usize, height: usize, rng: &mut StreamRng) -> Image2D {
    Image2D::from_fn(width, height, |_, _| rng.random::<f64>())
}

// ---------------------------------------------------------------------------
// Shared desk-scale build (used by criteria 5, 7, 8)
// ---------------------------------------------------------------------------

struct BuildFixture {
    // Held for the process lifetime so the dataset stays on disk.
    _dir: tempfile::TempDir,
    root: PathBuf,
    manifest_jobs1: PathBuf,
    build_seconds: f64,
}

fn forge() -> Command {
    Command::new(env!("CARGO_BIN_EXE_forge"))
}

fn fixture() -> &'static BuildFixture {
    static FIXTURE: OnceLock<BuildFixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let root = dir.path().to_path_buf();
        let phantom = root.join("phantom.nii");

        let status = forge()
            .args(["phantom"])
            .arg(&phantom)
            .args(["--nx", "192", "--ny", "192", "--nz", "160", "--seed", "1"])
            .status()
            .expect("run forge phantom");
        assert!(status.success(), "phantom generation failed");

        let start = Instant::now();
        let status = forge()
            .arg("build")
            .arg(&phantom)
            .arg("--out")
            .arg(root.join("ds-jobs1"))
            .args(["--n-per-bin", "20", "--seed", "42", "--jobs", "1"])
            .status()
            .expect("run forge build");
        let build_seconds = start.elapsed().as_secs_f64();
        assert!(status.success(), "single-worker build failed");

        BuildFixture {
            _dir: dir,
            manifest_jobs1: root.join("ds-jobs1/manifest.jsonl"),
            root,
            build_seconds,
        }
    })
}

// ---------------------------------------------------------------------------
// 1. RMSE <-> PSNR pairing
// ---------------------------------------------------------------------------

#[test]
fn acceptance_1_rmse_psnr_pairing() {
    criterion(1, "RMSE and PSNR column pairing on reference values", || {
        // Constant-offset images realize an exact RMSE.
        let check = |offset: f64, expect_db: f64, tol: f64| {
            let a = Image2D::zeros(32, 24);
            let b = Image2D::from_fn(32, 24, |_, _| offset);
            let r = rmse(&a, &b).unwrap();
            let p = psnr(&a, &b).unwrap();
            assert!((r - offset).abs() < 1e-12, "rmse {r} != {offset}");
            assert!(
                (p - expect_db).abs() < tol,
                "psnr {p} dB not within {tol} of {expect_db}"
            );
        };
        check(0.171, 15.35, 0.1);
        check(0.094, 20.49, 0.1);
        check(0.1, 20.0, 1e-9);

        // The identity psnr = -20 log10(rmse) on arbitrary content.
        let mut rng = StreamRng::seed_from_u64(10);
        for _ in 0..10 {
            let a = uniform_image(17, 23, &mut rng);
            let b = uniform_image(17, 23, &mut rng);
            let r = rmse(&a, &b).unwrap();
            let p = psnr(&a, &b).unwrap();
            assert!((p + 20.0 * r.log10()).abs() < 1e-9);
        }
    });
}

// ---------------------------------------------------------------------------
// 2. Null-perturbation identities
// ---------------------------------------------------------------------------

#[test]
fn acceptance_2_null_identities() {
    criterion(
        2,
        "identity parameters reproduce the input within 1e-6 (warp eps=0, ring m=1 phi=0, ripple amp=0)",
        || {
            let mut rng = StreamRng::seed_from_u64(2);
            let random = uniform_image(256, 256, &mut rng);
            let anatomy = head_slice(256, 256, 5);

            for img in [&random, &anatomy] {
                // Radial warp with a zero exponent offset.
                let mut circles = place_circles(&mut rng, 256, 256).unwrap();
                for c in &mut circles {
                    c.epsilon = 0.0;
                }
                let warped = warp_image(img, &circles).unwrap();
                let max_err = img
                    .data()
                    .iter()
                    .zip(warped.data())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                assert!(max_err < 1e-6, "warp identity violated: {max_err}");

                // Ring generator with unit magnification and zero phase.
                let params = AnnularSectorParams {
                    r_inner: 20.0,
                    r_outer: 60.0,
                    phase_deg: 0.0,
                    magnification: 1.0,
                    theta_start_deg: 15.0,
                    theta_end_deg: 160.0,
                };
                let ringed = gen_ring_artifact_image(img, &params).unwrap();
                let max_err = img
                    .data()
                    .iter()
                    .zip(ringed.data())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                assert!(max_err < 1e-6, "ring identity violated: {max_err}");

                // Ripple with zero amplitude.
                let params = RippleParams {
                    cx: 120.0,
                    cy: 130.0,
                    axis_ratio: 1.2,
                    orientation_deg: 30.0,
                    frequency: 0.1,
                    amplitude: 0.0,
                    r_inner: 20.0,
                    r_outer: 80.0,
                    phase: 1.0,
                };
                let rippled = gen_ripple_artifact_image(img, &params).unwrap();
                let max_err = img
                    .data()
                    .iter()
                    .zip(rippled.data())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                assert!(max_err < 1e-6, "ripple identity violated: {max_err}");
            }
        },
    );
}

// ---------------------------------------------------------------------------
// 3. Hermitian/reality guarantee with a modulus oracle
// ---------------------------------------------------------------------------

#[test]
fn acceptance_3_spectral_perturbation_oracle() {
    criterion(
        3,
        "100 random ring perturbations: real output (max|Im| < 1e-8) and moduli match the brute-force prediction",
        || {
            let mut rng = StreamRng::seed_from_u64(3);
            for case in 0..100 {
                let (w, h) = match case % 4 {
                    0 => (64, 64),
                    1 => (63, 63),
                    2 => (64, 63),
                    _ => (49, 70),
                };
                let img = uniform_image(w, h, &mut rng);
                let r_inner = rng.random_range(1.0..25.0);
                let theta_start_deg = rng.random_range(0.0..360.0);
                // Mostly partial sectors; every seventh case wraps the
                // whole circle so each annulus bin is hit from both sides.
                let span = if case % 7 == 0 {
                    rng.random_range(360.0..420.0)
                } else {
                    rng.random_range(5.0..355.0)
                };
                let params = AnnularSectorParams {
                    r_inner,
                    r_outer: r_inner + rng.random_range(0.5..25.0),
                    phase_deg: rng.random_range(0.0..360.0),
                    magnification: rng.random_range(0.3..9.0),
                    theta_start_deg,
                    theta_end_deg: theta_start_deg + span,
                };

                let spectrum = fft2_centered(&img);
                let perturbed = apply_annular_perturbation(&spectrum, &params);

                // Reality: the perturbed spectrum must invert to a real image.
                let (_, max_imag) = ifft2_centered(&perturbed).unwrap();
                assert!(max_imag < 1e-8, "case {case}: max|Im| = {max_imag}");

                // Brute-force modulus prediction: walk every bin; a bin
                // inside the (clipped) annular sector multiplies itself and
                // its point mirror by m. Overlapping sector and mirror give
                // m^2 — the oracle counts multiplicities, not geometry.
                let (cx, cy) = (w / 2, h / 2);
                let r_out_eff = params.r_outer.min(max_ring_radius(w, h));
                let span = params.theta_end_deg - params.theta_start_deg;
                let mut mult = vec![0u32; w * h];
                for y in 0..h {
                    for x in 0..w {
                        let dx = x as f64 - cx as f64;
                        let dy = y as f64 - cy as f64;
                        let r = (dx * dx + dy * dy).sqrt();
                        if r < params.r_inner || r > r_out_eff {
                            continue;
                        }
                        let angle = dy.atan2(dx).to_degrees();
                        let rel = (angle - params.theta_start_deg).rem_euclid(360.0);
                        if span >= 360.0 || rel <= span {
                            mult[y * w + x] += 1;
                            let mx = mirror_index(x, w);
                            let my = mirror_index(y, h);
                            mult[my * w + mx] += 1;
                        }
                    }
                }
                for y in 0..h {
                    for x in 0..w {
                        let expect = spectrum.get(x, y).norm()
                            * params.magnification.powi(mult[y * w + x] as i32);
                        let got = perturbed.get(x, y).norm();
                        assert!(
                            (got - expect).abs() <= 1e-9 * (1.0 + expect),
                            "case {case}: bin ({x}, {y}) modulus {got} != {expect}"
                        );
                    }
                }
            }
        },
    );
}

// ---------------------------------------------------------------------------
// 4. Localization properties of generated pairs
// ---------------------------------------------------------------------------

#[test]
fn acceptance_4_corruption_is_localized() {
    criterion(
        4,
        "100 generated pairs: pre-matching corruption is zero outside the ROI union; boxes circumscribe their disks",
        || {
            let cfg = Config::default();
            let slices = [head_slice(160, 160, 4), head_slice(160, 160, 9)];
            let mut generated = 0u32;
            let mut seed = 0u64;
            while generated < 100 {
                let slice = &slices[(seed % 2) as usize];
                let mut rng = StreamRng::seed_from_u64(seed);
                seed += 1;
                let Ok(pair) = make_pair(slice, &cfg, &mut rng) else {
                    continue;
                };
                generated += 1;

                let (w, h) = (slice.width(), slice.height());
                for y in 0..h {
                    for x in 0..w {
                        let owner = pair.rois.iter().position(|r| r.contains(x, y));
                        match owner {
                            None => assert_eq!(
                                pair.composited.get(x, y).to_bits(),
                                pair.warped.get(x, y).to_bits(),
                                "changed pixel ({x}, {y}) outside all ROIs"
                            ),
                            Some(i) => {
                                // Every disk pixel sits inside that disk's box.
                                let b = &pair.boxes[i];
                                assert!(
                                    b.contains(x as u32, y as u32),
                                    "disk {i} pixel ({x}, {y}) outside box {:?}",
                                    b.corners()
                                );
                            }
                        }
                    }
                }
            }
        },
    );
}

// ---------------------------------------------------------------------------
// 5. Average precision against a from-scratch oracle
// ---------------------------------------------------------------------------

/// Independent AP computation: plain data types, quadratic algorithms.
mod ap_oracle {
    pub struct OBox {
        pub x0: u32,
        pub y0: u32,
        pub x1: u32,
        pub y1: u32,
    }
    pub struct ODet {
        pub bbox: OBox,
        pub score: f64,
    }

    fn iou(a: &OBox, b: &OBox) -> f64 {
        let ix0 = a.x0.max(b.x0);
        let iy0 = a.y0.max(b.y0);
        let ix1 = a.x1.min(b.x1);
        let iy1 = a.y1.min(b.y1);
        if ix0 >= ix1 || iy0 >= iy1 {
            return 0.0;
        }
        let inter = (ix1 - ix0) as f64 * (iy1 - iy0) as f64;
        let area = |c: &OBox| (c.x1 - c.x0) as f64 * (c.y1 - c.y0) as f64;
        inter / (area(a) + area(b) - inter)
    }

    /// All-point interpolated AP over score-ranked detections, greedy
    /// one-to-one matching per image at the given IoU threshold.
    pub fn average_precision(
        detections: &[Vec<ODet>],
        ground_truth: &[Vec<OBox>],
        threshold: f64,
    ) -> f64 {
        let total_gt: usize = ground_truth.iter().map(Vec::len).sum();
        assert!(total_gt > 0);

        // Rank: score desc, then image index, then box corners.
        let mut order: Vec<(usize, usize)> = Vec::new();
        for (img, dets) in detections.iter().enumerate() {
            for d in 0..dets.len() {
                order.push((img, d));
            }
        }
        order.sort_by(|&(ia, da), &(ib, db)| {
            let a = &detections[ia][da];
            let b = &detections[ib][db];
            b.score
                .total_cmp(&a.score)
                .then(ia.cmp(&ib))
                .then(a.bbox.x0.cmp(&b.bbox.x0))
                .then(a.bbox.y0.cmp(&b.bbox.y0))
                .then(a.bbox.x1.cmp(&b.bbox.x1))
                .then(a.bbox.y1.cmp(&b.bbox.y1))
        });

        let mut claimed: Vec<Vec<bool>> =
            ground_truth.iter().map(|g| vec![false; g.len()]).collect();
        let mut tps: Vec<bool> = Vec::with_capacity(order.len());
        for &(img, d) in &order {
            let det = &detections[img][d];
            let mut best: Option<(usize, f64)> = None;
            for (g, gt) in ground_truth[img].iter().enumerate() {
                if claimed[img][g] {
                    continue;
                }
                let v = iou(&det.bbox, gt);
                if best.map_or(true, |(_, bv)| v > bv) {
                    best = Some((g, v));
                }
            }
            match best {
                Some((g, v)) if v >= threshold => {
                    claimed[img][g] = true;
                    tps.push(true);
                }
                _ => tps.push(false),
            }
        }

        // Precision/recall prefix curve, then the step integral with a
        // suffix-max scan instead of a precomputed envelope.
        let mut curve: Vec<(f64, f64)> = Vec::new();
        let mut tp = 0usize;
        for (k, &is_tp) in tps.iter().enumerate() {
            if is_tp {
                tp += 1;
            }
            curve.push((tp as f64 / total_gt as f64, tp as f64 / (k + 1) as f64));
        }
        let mut ap = 0.0;
        let mut prev_recall = 0.0;
        for k in 0..curve.len() {
            let (recall, _) = curve[k];
            if recall > prev_recall {
                let best_at_or_after = curve[k..]
                    .iter()
                    .map(|&(_, p)| p)
                    .fold(0.0f64, f64::max);
                ap += (recall - prev_recall) * best_at_or_after;
                prev_recall = recall;
            }
        }
        ap
    }
}

#[test]
fn acceptance_5_average_precision_oracle() {
    criterion(
        5,
        "AP equals a from-scratch oracle on 24 random scenarios; ground truth as predictions scores exactly 1.0",
        || {
            let mut rng = StreamRng::seed_from_u64(55);
            for scenario in 0..24 {
                // Random ground truth over up to 5 images.
                let n_images = rng.random_range(1..=5);
                let mut gt: Vec<Vec<BBox>> = Vec::new();
                for _ in 0..n_images {
                    let n = rng.random_range(0..=6);
                    let mut boxes = Vec::new();
                    for _ in 0..n {
                        let x0 = rng.random_range(0..50u32);
                        let y0 = rng.random_range(0..50u32);
                        let bw = rng.random_range(4..=30u32);
                        let bh = rng.random_range(4..=30u32);
                        boxes.push(BBox::new(x0, y0, x0 + bw, y0 + bh).unwrap());
                    }
                    gt.push(boxes);
                }
                if gt.iter().map(Vec::len).sum::<usize>() == 0 {
                    gt[0].push(BBox::new(5, 5, 20, 20).unwrap());
                }

                // Detections: jittered copies of some truths, spurious
                // boxes, plus occasional duplicates with tied scores.
                let mut dets: Vec<Vec<Detection>> = vec![Vec::new(); gt.len()];
                for (img, boxes) in gt.iter().enumerate() {
                    for b in boxes {
                        if rng.random::<f64>() < 0.8 {
                            let [x0, y0, x1, y1] = b.corners();
                            let jx = rng.random_range(0..6);
                            let jy = rng.random_range(0..6);
                            let bbox =
                                BBox::new(x0 + jx, y0 + jy, x1 + jx + 1, y1 + jy + 1).unwrap();
                            let score = rng.random::<f64>();
                            dets[img].push(Detection { bbox, score });
                            if rng.random::<f64>() < 0.25 {
                                // Exact duplicate with a tied score.
                                dets[img].push(Detection { bbox, score });
                            }
                        }
                    }
                    for _ in 0..rng.random_range(0..=3) {
                        let x0 = rng.random_range(60..90u32);
                        let y0 = rng.random_range(60..90u32);
                        dets[img].push(Detection {
                            bbox: BBox::new(x0, y0, x0 + 8, y0 + 8).unwrap(),
                            score: rng.random::<f64>(),
                        });
                    }
                }

                let got = average_precision(&dets, &gt, 0.5).unwrap();
                let odets: Vec<Vec<ap_oracle::ODet>> = dets
                    .iter()
                    .map(|v| {
                        v.iter()
                            .map(|d| {
                                let [x0, y0, x1, y1] = d.bbox.corners();
                                ap_oracle::ODet {
                                    bbox: ap_oracle::OBox { x0, y0, x1, y1 },
                                    score: d.score,
                                }
                            })
                            .collect()
                    })
                    .collect();
                let ogt: Vec<Vec<ap_oracle::OBox>> = gt
                    .iter()
                    .map(|v| {
                        v.iter()
                            .map(|b| {
                                let [x0, y0, x1, y1] = b.corners();
                                ap_oracle::OBox { x0, y0, x1, y1 }
                            })
                            .collect()
                    })
                    .collect();
                let expect = ap_oracle::average_precision(&odets, &ogt, 0.5);
                assert!(
                    (got - expect).abs() < 1e-9,
                    "scenario {scenario}: AP {got} != oracle {expect}"
                );

                // Ground truth as predictions is a perfect detector.
                let perfect: Vec<Vec<Detection>> = gt
                    .iter()
                    .map(|v| {
                        v.iter()
                            .map(|&bbox| Detection { bbox, score: 1.0 })
                            .collect()
                    })
                    .collect();
                assert_eq!(average_precision(&perfect, &gt, 0.5).unwrap(), 1.0);
            }

            // The headline operating point is a plain harness run: feed
            // the dataset's own boxes back as detections at IoU 0.5.
            let fx = fixture();
            let manifest = read_manifest(&fx.manifest_jobs1).unwrap();
            let mut detections = serde_json::Map::new();
            for r in &manifest.records {
                let entries: Vec<serde_json::Value> = r
                    .boxes
                    .iter()
                    .map(|b| {
                        serde_json::json!({ "box": b.corners(), "score": 1.0 })
                    })
                    .collect();
                detections.insert(r.sample_id.to_string(), entries.into());
            }
            let det_path = fx.root.join("self-detections.json");
            fs::write(&det_path, serde_json::to_string(&detections).unwrap()).unwrap();
            let output = forge()
                .arg("eval-detect")
                .arg(&fx.manifest_jobs1)
                .arg(&det_path)
                .args(["--iou", "0.5"])
                .output()
                .expect("run forge eval-detect");
            assert!(output.status.success());
            let stdout = String::from_utf8_lossy(&output.stdout);
            assert!(
                stdout.contains("average precision     1.0000"),
                "unexpected eval-detect output:\n{stdout}"
            );
        },
    );
}

// ---------------------------------------------------------------------------
// 6. Student t p-values against a quadrature oracle
// ---------------------------------------------------------------------------

/// Two-sided tail mass of Student's t by Simpson quadrature on the
/// unnormalized density, with the normalizer integrated numerically as
/// well — no gamma functions anywhere.
fn t_two_sided_by_quadrature(t: f64, df: f64) -> f64 {
    // Substitute x = tan(theta): the density becomes
    // (1 + tan^2/df)^(-(df+1)/2) * sec^2(theta) over (-pi/2, pi/2).
    let integrand = |theta: f64| -> f64 {
        let c = theta.cos();
        if c.abs() < 1e-300 {
            return 0.0;
        }
        let x = theta.tan();
        (1.0 + x * x / df).powf(-(df + 1.0) / 2.0) / (c * c)
    };
    let simpson = |a: f64, b: f64, n: usize| -> f64 {
        let n = n + n % 2;
        let hstep = (b - a) / n as f64;
        let mut sum = integrand(a) + integrand(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * integrand(a + hstep * k as f64);
        }
        sum * hstep / 3.0
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    let upper_tail = simpson(t.atan(), half_pi, 200_000);
    let total = simpson(-half_pi, half_pi, 200_000);
    2.0 * upper_tail / total
}

#[test]
fn acceptance_6_t_test_quadrature_oracle() {
    criterion(
        6,
        "t-distribution p-values match numerical integration within 1e-3; t=40 at df=999 gives p ~ 0",
        || {
            for (t, df) in [(2.0, 10.0), (3.4641, 2.0), (40.0, 999.0)] {
                let got = student_t_p_two_sided(t, df);
                let expect = t_two_sided_by_quadrature(t, df);
                assert!(
                    (got - expect).abs() < 1e-3,
                    "(t={t}, df={df}): {got} vs quadrature {expect}"
                );
            }
            // The large-t regime collapses to numerical zero.
            assert!(student_t_p_two_sided(40.0, 999.0) < 1e-100);
        },
    );
}

// ---------------------------------------------------------------------------
// 7. Desk-scale build: shape, recomputability, worker invariance
// ---------------------------------------------------------------------------

/// Byte compare of two directory trees.
fn assert_trees_identical(a: &Path, b: &Path) {
    fn walk(root: &Path, prefix: &Path, out: &mut BTreeSet<PathBuf>) {
        for entry in fs::read_dir(root.join(prefix)).unwrap() {
            let entry = entry.unwrap();
            let rel = prefix.join(entry.file_name());
            if entry.file_type().unwrap().is_dir() {
                walk(root, &rel, out);
            } else {
                out.insert(rel);
            }
        }
    }
    let mut files_a = BTreeSet::new();
    let mut files_b = BTreeSet::new();
    walk(a, Path::new(""), &mut files_a);
    walk(b, Path::new(""), &mut files_b);
    assert_eq!(files_a, files_b, "file sets differ");
    for rel in &files_a {
        let bytes_a = fs::read(a.join(rel)).unwrap();
        let bytes_b = fs::read(b.join(rel)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{} differs", rel.display());
    }
}

#[test]
fn acceptance_7_desk_scale_build() {
    criterion(
        7,
        "seeded desk-scale build: 5 bins x 20, PSNR recomputes from the files, byte-identical across worker counts",
        || {
            let fx = fixture();
            println!(
                "  (single-worker build took {:.1} s)",
                fx.build_seconds
            );
            assert!(
                fx.build_seconds < 300.0,
                "single-worker build took {:.1} s, over the 5 min target",
                fx.build_seconds
            );

            let manifest = read_manifest(&fx.manifest_jobs1).unwrap();
            assert_eq!(manifest.records.len(), 100, "expected 100 records");
            assert_eq!(manifest.bin_counts(), [20; 5], "expected 20 per band");

            let base = fx.manifest_jobs1.parent().unwrap();
            for record in &manifest.records {
                let clean = load_image(&base.join(&record.clean_path)).unwrap();
                let corrupted = load_image(&base.join(&record.corrupted_path)).unwrap();
                let p = psnr(&clean, &corrupted).unwrap();
                assert!(
                    (p - record.psnr_db).abs() <= 1e-6,
                    "sample {}: stored {} dB, files give {} dB",
                    record.sample_id,
                    record.psnr_db,
                    p
                );
                assert_eq!(
                    mriforge::metrics::PsnrBin::from_psnr(p),
                    Some(record.psnr_bin),
                    "sample {}: bin label mismatch",
                    record.sample_id
                );
            }

            // Same seed, eight workers: the output must not move a byte.
            let status = forge()
                .arg("build")
                .arg(fx.root.join("phantom.nii"))
                .arg("--out")
                .arg(fx.root.join("ds-jobs8"))
                .args(["--n-per-bin", "20", "--seed", "42", "--jobs", "8"])
                .status()
                .expect("run forge build --jobs 8");
            assert!(status.success());
            assert_trees_identical(&fx.root.join("ds-jobs1"), &fx.root.join("ds-jobs8"));
        },
    );
}

// ---------------------------------------------------------------------------
// 8. Baseline corrector reduces within-box variability
// ---------------------------------------------------------------------------

#[test]
fn acceptance_8_baseline_reduces_regional_std() {
    criterion(
        8,
        "reference smoothing corrector lowers within-box std on a 50+ box set with two-sided p < 0.05",
        || {
            let fx = fixture();
            let manifest = read_manifest(&fx.manifest_jobs1).unwrap();
            let base = fx.manifest_jobs1.parent().unwrap();

            let mut before = Vec::new();
            let mut after = Vec::new();
            for record in &manifest.records {
                if before.len() >= 50 {
                    break;
                }
                let corrupted = load_image(&base.join(&record.corrupted_path)).unwrap();
                let corrected = mriforge::correct::baseline_correct(
                    &corrupted,
                    &record.boxes,
                    mriforge::correct::BASELINE_SIGMA,
                )
                .unwrap();
                for bbox in &record.boxes {
                    before.push(regional_std(&corrupted, bbox).unwrap());
                    after.push(regional_std(&corrected, bbox).unwrap());
                }
            }
            assert!(before.len() >= 50, "only {} boxes collected", before.len());

            let result = paired_t_test(&before, &after).unwrap();
            println!(
                "  (std change {:+.2}%, t = {:.2}, two-sided p = {:.3e})",
                result.percent_change, result.t_statistic, result.p_two_sided
            );
            assert!(
                result.percent_change < 0.0,
                "smoothing did not reduce within-box std: {:+.2}%",
                result.percent_change
            );
            assert!(
                result.p_two_sided < 0.05,
                "reduction not significant: p = {}",
                result.p_two_sided
            );
        },
    );
}

// ---------------------------------------------------------------------------
// 9. Generator mix
// ---------------------------------------------------------------------------

#[test]
fn acceptance_9_generator_mix() {
    criterion(
        9,
        "ring:ripple draw ratio over 3000 generated pairs lands in [1.9, 2.1] : 1",
        || {
            let cfg = Config::default();
            let slices = [
                head_slice(128, 128, 21),
                head_slice(128, 128, 22),
                head_slice(128, 128, 23),
            ];
            let mut rings = 0u32;
            let mut ripples = 0u32;
            let mut seed = 0u64;
            while rings + ripples < 3000 {
                let slice = &slices[(seed % 3) as usize];
                let mut rng = StreamRng::seed_from_u64(0x9e00 + seed);
                seed += 1;
                match make_pair(slice, &cfg, &mut rng) {
                    Ok(pair) => match pair.generator {
                        GeneratorParams::Ring(_) => rings += 1,
                        GeneratorParams::Ripple(_) => ripples += 1,
                    },
                    Err(_) => continue,
                }
            }
            let ratio = rings as f64 / ripples as f64;
            println!("  (ring {rings} : ripple {ripples} = {ratio:.3} : 1)");
            assert!(
                (1.9..=2.1).contains(&ratio),
                "mix ratio {ratio:.3} outside [1.9, 2.1]"
            );
        },
    );
}
