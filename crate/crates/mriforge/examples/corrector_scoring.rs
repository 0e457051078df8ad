//! Evaluates an artifact-reduction method the way the toolkit scores
//! external ones: fidelity per PSNR band, plus a paired test on pixel
//! variability inside the ground-truth boxes.
//!
//! The method under test is the built-in reference corrector (Gaussian
//! smoothing confined to the boxes). It knows where the corruption is, so
//! it improves the worst bands while barely moving images that were
//! nearly clean to begin with - exactly the shape of result the binned
//! report is designed to expose.
//!
//! Run with: `cargo run --example corrector_scoring`

use mriforge::config::Config;
use mriforge::correct::{baseline_correct, BASELINE_SIGMA};
use mriforge::dataset::make_pair;
use mriforge::metrics::{
    paired_t_test, psnr, regional_std, rmse, BinnedReport, PairFidelity, PsnrBin,
};
use mriforge::phantom::head_slice;
use mriforge::rng::StreamRng;
use rand::SeedableRng;

fn main() -> mriforge::Result<()> {
    // Corrupted/clean pairs across the kept PSNR range.
    let cfg = Config::default();
    let clean = head_slice(192, 192, 6);
    let mut pairs = Vec::new();
    let mut seed = 0;
    while pairs.len() < 40 && seed < 4000 {
        let mut rng = StreamRng::seed_from_u64(seed);
        seed += 1;
        let Ok(pair) = make_pair(&clean, &cfg, &mut rng) else {
            continue;
        };
        if PsnrBin::from_psnr(pair.psnr_db).is_some() {
            pairs.push(pair);
        }
    }
    println!("{} pairs in the kept range (from {} draws)\n", pairs.len(), seed);

    let mut fidelity = Vec::new();
    let mut std_before = Vec::new();
    let mut std_after = Vec::new();
    for pair in &pairs {
        let corrected = baseline_correct(&pair.corrupted, &pair.boxes, BASELINE_SIGMA)?
            .quantize_u16();
        fidelity.push(PairFidelity {
            bin: PsnrBin::from_psnr(pair.psnr_db).expect("pair was binned"),
            rmse_degraded: pair.rmse,
            rmse_corrected: rmse(&pair.clean, &corrected)?,
            psnr_degraded: pair.psnr_db,
            psnr_corrected: psnr(&pair.clean, &corrected)?,
        });
        for bbox in &pair.boxes {
            std_before.push(regional_std(&pair.corrupted, bbox)?);
            std_after.push(regional_std(&corrected, bbox)?);
        }
    }

    println!("{}", BinnedReport::from_pairs(&fidelity).to_text_table());

    let t = paired_t_test(&std_before, &std_after)?;
    println!(
        "within-box std over {} boxes: {:.4} -> {:.4} ({:+.1}%), t = {:.2}, p = {:.2e}",
        std_before.len(),
        std_before.iter().sum::<f64>() / std_before.len() as f64,
        std_after.iter().sum::<f64>() / std_after.len() as f64,
        t.percent_change,
        t.t_statistic,
        t.p_two_sided
    );
    Ok(())
}
