//! Scores three simulated artifact detectors with VOC-style average
//! precision.
//!
//! Ground truth comes from freshly generated pairs; the "detectors" are
//! transformations of that truth: an oracle that returns it verbatim, a
//! sloppy detector that shifts and shrinks boxes and adds false alarms,
//! and a coin-flipper that misses half the truth. The example prints an
//! AP table across IoU thresholds and writes the sloppy detector's output
//! in the JSON format `forge eval-detect` consumes.
//!
//! Run with: `cargo run --example detector_scoring`

use std::path::Path;

use mriforge::compose::BBox;
use mriforge::config::Config;
use mriforge::dataset::make_pair;
use mriforge::metrics::{average_precision, detection_counts, Detection};
use mriforge::phantom::head_slice;
use mriforge::rng::StreamRng;
use rand::{Rng, SeedableRng};

fn main() -> mriforge::Result<()> {
    let out = Path::new("target/example-output/detector_scoring");
    std::fs::create_dir_all(out).expect("create output directory");

    // Ground truth: boxes from 10 generated pairs.
    let cfg = Config::default();
    let clean = head_slice(192, 192, 2);
    let mut ground_truth: Vec<Vec<BBox>> = Vec::new();
    let mut seed = 0;
    while ground_truth.len() < 10 {
        let mut rng = StreamRng::seed_from_u64(seed);
        seed += 1;
        if let Ok(pair) = make_pair(&clean, &cfg, &mut rng) {
            ground_truth.push(pair.boxes);
        }
    }

    let mut rng = StreamRng::seed_from_u64(77);

    // Oracle: the truth itself, full confidence.
    let oracle: Vec<Vec<Detection>> = ground_truth
        .iter()
        .map(|boxes| {
            boxes
                .iter()
                .map(|&bbox| Detection { bbox, score: 1.0 })
                .collect()
        })
        .collect();

    // Sloppy: every box shifted and shrunk, plus occasional false alarms.
    let sloppy: Vec<Vec<Detection>> = ground_truth
        .iter()
        .map(|boxes| {
            let mut dets: Vec<Detection> = boxes
                .iter()
                .map(|b| {
                    let [x0, y0, x1, y1] = b.corners();
                    let dx = rng.random_range(0..16);
                    let dy = rng.random_range(0..16);
                    let shrink = rng.random_range(2..8).min((x1 - x0).min(y1 - y0) / 2);
                    let bbox = BBox::new(x0 + dx, y0 + dy, x1 + dx - shrink, y1 + dy - shrink)
                        .expect("shifted box stays valid");
                    Detection {
                        bbox,
                        score: rng.random_range(0.5..1.0),
                    }
                })
                .collect();
            if rng.random::<f64>() < 0.5 {
                let x0 = rng.random_range(0..150u32);
                let y0 = rng.random_range(0..150u32);
                dets.push(Detection {
                    bbox: BBox::new(x0, y0, x0 + 20, y0 + 20).expect("false alarm box"),
                    score: rng.random_range(0.0..0.6),
                });
            }
            dets
        })
        .collect();

    // Flaky: returns each truth box with probability one half.
    let flaky: Vec<Vec<Detection>> = ground_truth
        .iter()
        .map(|boxes| {
            let mut dets = Vec::new();
            for &bbox in boxes {
                if rng.random::<f64>() < 0.5 {
                    dets.push(Detection {
                        bbox,
                        score: rng.random_range(0.7..1.0),
                    });
                }
            }
            dets
        })
        .collect();

    let n_gt: usize = ground_truth.iter().map(Vec::len).sum();
    println!("{n_gt} ground-truth boxes over {} images\n", ground_truth.len());
    println!("{:10} {:>8} {:>8} {:>8}", "detector", "AP@0.3", "AP@0.5", "AP@0.7");
    for (name, dets) in [("oracle", &oracle), ("sloppy", &sloppy), ("flaky", &flaky)] {
        let row: Vec<String> = [0.3, 0.5, 0.7]
            .iter()
            .map(|&iou| {
                format!("{:8.4}", average_precision(dets, &ground_truth, iou).unwrap())
            })
            .collect();
        println!("{name:10} {}", row.join(" "));
    }

    let counts = detection_counts(&sloppy, &ground_truth, 0.5)?;
    println!(
        "\nsloppy at IoU 0.5: {} TP, {} FP, {} missed",
        counts.tp, counts.fp, counts.fn_
    );

    // The on-disk detection format, keyed by sample id.
    let mut file = serde_json::Map::new();
    for (img, dets) in sloppy.iter().enumerate() {
        let entries: Vec<serde_json::Value> = dets
            .iter()
            .map(|d| serde_json::json!({ "box": d.bbox.corners(), "score": d.score }))
            .collect();
        file.insert(img.to_string(), entries.into());
    }
    let path = out.join("sloppy_detections.json");
    std::fs::write(&path, serde_json::to_string_pretty(&file).expect("serialize"))
        .expect("write detection file");
    println!("detection file written to {}", path.display());
    Ok(())
}
