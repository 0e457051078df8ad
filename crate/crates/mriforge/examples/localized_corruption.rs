//! Generates one complete training pair and dissects its stages.
//!
//! A pair starts from a clean slice, warps it with radial distortion
//! (both sides share the warp, so it is not part of the corruption),
//! renders a ring or ripple artifact over the full frame, composites the
//! artifact into a few circular regions placed over tissue, and
//! histogram-matches the result back to the clean side so the corruption
//! cannot be spotted from the intensity distribution alone. Ground truth
//! is the set of bounding boxes around those regions.
//!
//! Writes every stage plus a box-annotated view to
//! `target/example-output/localized_corruption/`.
//!
//! Run with: `cargo run --example localized_corruption`

use std::path::Path;

use mriforge::config::Config;
use mriforge::dataset::make_pair;
use mriforge::image::Image2D;
use mriforge::io::save_image;
use mriforge::phantom::head_slice;
use mriforge::rng::StreamRng;
use rand::SeedableRng;

/// Burns a one-pixel white rectangle outline into the image.
fn outline(img: &mut Image2D, corners: [u32; 4]) {
    let [x0, y0, x1, y1] = corners.map(|v| v as usize);
    for x in x0..x1.min(img.width()) {
        img.set(x, y0, 1.0);
        img.set(x, (y1 - 1).min(img.height() - 1), 1.0);
    }
    for y in y0..y1.min(img.height()) {
        img.set(x0, y, 1.0);
        img.set((x1 - 1).min(img.width() - 1), y, 1.0);
    }
}

fn main() -> mriforge::Result<()> {
    let out = Path::new("target/example-output/localized_corruption");
    std::fs::create_dir_all(out).expect("create output directory");

    let clean = head_slice(256, 256, 8);
    let cfg = Config::default();

    // Some draws land outside the kept PSNR range in a real build; here we
    // simply show the first pair that generates at all.
    let mut seed = 0;
    let pair = loop {
        let mut rng = StreamRng::seed_from_u64(seed);
        match make_pair(&clean, &cfg, &mut rng) {
            Ok(p) => break p,
            Err(_) => seed += 1,
        }
    };

    save_image(&clean, &out.join("0_input.png"))?;
    save_image(&pair.clean, &out.join("1_warped_clean.png"))?;
    save_image(&pair.composited.clamp01(), &out.join("2_composited.png"))?;
    save_image(&pair.corrupted, &out.join("3_corrupted_matched.png"))?;

    let mut annotated = pair.corrupted.clone();
    for b in &pair.boxes {
        outline(&mut annotated, b.corners());
    }
    save_image(&annotated, &out.join("4_corrupted_boxes.png"))?;

    println!("generator: {}", pair.generator.kind());
    println!(
        "{}",
        serde_json::to_string_pretty(&pair.generator).expect("params serialize")
    );
    println!("regions:");
    for (roi, bbox) in pair.rois.iter().zip(&pair.boxes) {
        println!(
            "  disk ({:6.1}, {:6.1}) r {:5.1}  ->  box {:?}",
            roi.cx,
            roi.cy,
            roi.r,
            bbox.corners()
        );
    }
    println!(
        "corruption level: rmse {:.4}, psnr {:.2} dB",
        pair.rmse, pair.psnr_db
    );
    println!("images written to {}", out.display());
    Ok(())
}
