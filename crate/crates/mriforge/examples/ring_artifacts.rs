//! Renders the three stock ring-artifact parameter combinations, exact
//! and jittered, on one slice.
//!
//! The artifact lives in frequency space: an annular sector of the
//! spectrum is magnified and phase-rotated (its point reflection gets the
//! conjugate factor, keeping the image real), which shows up as localized
//! ringing. Output goes to `target/example-output/ring_artifacts/`.
//!
//! Run with: `cargo run --example ring_artifacts`

use std::path::Path;

use mriforge::io::save_image;
use mriforge::metrics::psnr;
use mriforge::phantom::head_slice;
use mriforge::ring::{base_combinations, gen_ring_artifact_image, jitter_params};
use mriforge::rng::StreamRng;
use rand::SeedableRng;

fn main() -> mriforge::Result<()> {
    let out = Path::new("target/example-output/ring_artifacts");
    std::fs::create_dir_all(out).expect("create output directory");

    let slice = head_slice(256, 256, 4);
    save_image(&slice, &out.join("original.png"))?;

    let mut rng = StreamRng::seed_from_u64(40);
    for (i, base) in base_combinations().iter().enumerate() {
        for (params, tag) in [(*base, "exact"), (jitter_params(base, &mut rng), "jittered")] {
            let ringed = gen_ring_artifact_image(&slice, &params)?;
            let clamped = ringed.clamp01();
            save_image(&clamped, &out.join(format!("combo{i}_{tag}.png")))?;
            println!(
                "combo {i} ({tag:8}): radii [{:5.1}, {:5.1}]  sector {:6.1} deg - {:6.1} deg  \
                 x{:.2}  phase {:5.1} deg  ->  {:.2} dB",
                params.r_inner,
                params.r_outer,
                params.theta_start_deg,
                params.theta_end_deg,
                params.magnification,
                params.phase_deg,
                psnr(&slice, &clamped)?
            );
        }
    }

    println!("images written to {}", out.display());
    Ok(())
}
