//! Draws a handful of randomly sampled elliptic intensity ripples.
//!
//! A ripple multiplies the image by a radial sine wave confined to an
//! elliptic band; a half-sine envelope fades the modulation in and out at
//! the band edges so the seams are invisible. Output goes to
//! `target/example-output/ripple_artifacts/`.
//!
//! Run with: `cargo run --example ripple_artifacts`

use std::path::Path;

use mriforge::io::save_image;
use mriforge::metrics::psnr;
use mriforge::phantom::head_slice;
use mriforge::ripple::{gen_ripple_artifact_image, sample_ripple_params};
use mriforge::rng::StreamRng;
use rand::SeedableRng;

fn main() -> mriforge::Result<()> {
    let out = Path::new("target/example-output/ripple_artifacts");
    std::fs::create_dir_all(out).expect("create output directory");

    let slice = head_slice(256, 256, 4);
    save_image(&slice, &out.join("original.png"))?;

    for seed in 0..6u64 {
        let mut rng = StreamRng::seed_from_u64(700 + seed);
        let params = sample_ripple_params(&mut rng, 256, 256);
        let rippled = gen_ripple_artifact_image(&slice, &params)?.clamp01();
        save_image(&rippled, &out.join(format!("ripple_{seed}.png")))?;
        println!(
            "ripple {seed}: center ({:5.1}, {:5.1})  band [{:5.1}, {:5.1}]  \
             amp {:.2}  freq {:.3}/px  axis ratio {:.2}  ->  {:.2} dB",
            params.cx,
            params.cy,
            params.r_inner,
            params.r_outer,
            params.amplitude,
            params.frequency,
            params.axis_ratio,
            psnr(&slice, &rippled)?
        );
    }

    println!("images written to {}", out.display());
    Ok(())
}
