//! Sweeps the radial-warp strength over one fixed circle layout.
//!
//! Writes the undistorted slice plus one warped variant per exponent
//! offset to `target/example-output/warp_variants/`, along with an
//! amplified difference image that makes the displacement field visible.
//!
//! Run with: `cargo run --example warp_variants`

use std::path::Path;

use mriforge::image::Image2D;
use mriforge::io::save_image;
use mriforge::phantom::head_slice;
use mriforge::rng::StreamRng;
use mriforge::warp::{place_circles, warp_image};
use rand::SeedableRng;

fn main() -> mriforge::Result<()> {
    let out = Path::new("target/example-output/warp_variants");
    std::fs::create_dir_all(out).expect("create output directory");

    let slice = head_slice(256, 256, 11);
    save_image(&slice, &out.join("original.png"))?;

    // One layout, re-used for every strength, so the images differ only
    // in how far pixels travel.
    let mut rng = StreamRng::seed_from_u64(11);
    let layout = place_circles(&mut rng, 256, 256)?;
    println!("{} warp circles:", layout.len());
    for c in &layout {
        println!("  center ({:6.1}, {:6.1})  radius {:5.1}", c.cx, c.cy, c.r);
    }

    for epsilon in [-0.4, -0.15, 0.0, 0.15, 0.4] {
        let mut circles = layout.clone();
        for c in &mut circles {
            c.epsilon = epsilon;
        }
        let warped = warp_image(&slice, &circles)?;

        // Peak displacement of any circle at this strength: the mover is
        // u - u^(1+eps), maximized over normalized radius u.
        let peak = circles
            .iter()
            .map(|c| {
                (0..=1000)
                    .map(|k| c.displacement(k as f64 / 1000.0).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);

        let tag = format!("{epsilon:+.2}").replace(['+', '.'], "p").replace('-', "m");
        save_image(&warped, &out.join(format!("warp_eps_{tag}.png")))?;

        let diff = Image2D::from_fn(256, 256, |x, y| {
            ((warped.get(x, y) - slice.get(x, y)).abs() * 4.0).min(1.0)
        });
        save_image(&diff, &out.join(format!("diff_eps_{tag}.png")))?;

        println!("epsilon {epsilon:+.2}: peak displacement {peak:5.2} px");
    }

    println!("images written to {}", out.display());
    Ok(())
}
