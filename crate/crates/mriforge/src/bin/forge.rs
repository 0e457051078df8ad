//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when an evaluation cannot be completed
//! because the inputs under test are incomplete (unknown image ids,
//! missing corrections, no ground truth), 2 for usage and data errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use mriforge::config::Config;
use mriforge::pipeline;

#[derive(Parser)]
#[command(
    name = "forge",
    version,
    about = "Synthesize artifact-corrupted MRI test sets and score systems against them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a PSNR-balanced corrupted/clean test set from clean volumes
    Build {
        /// Input volumes: NIfTI files or directories of grayscale slices
        #[arg(required = true)]
        volumes: Vec<PathBuf>,
        /// Output dataset directory
        #[arg(short, long)]
        out: PathBuf,
        /// TOML build configuration (defaults apply when omitted)
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Master seed; the full output is a pure function of it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0 = automatic); never changes the output
        #[arg(long)]
        jobs: Option<usize>,
        /// Samples per PSNR band
        #[arg(long)]
        n_per_bin: Option<usize>,
        /// Slices drawn per axis per volume
        #[arg(long)]
        per_axis: Option<usize>,
    },

    /// Warp one image with randomly placed radial-distortion circles
    Warp {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Warp exponent offset (0 = identity)
        #[arg(long, default_value_t = mriforge::warp::DEFAULT_EPSILON)]
        epsilon: f64,
    },

    /// Corrupt one image with a k-space annular-sector ring artifact
    Ring {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stock parameter combination 0-2 (random when omitted)
        #[arg(long)]
        combo: Option<usize>,
        /// Apply the stock parameters exactly, without jitter
        #[arg(long)]
        no_jitter: bool,
    },

    /// Corrupt one image with an elliptic intensity ripple
    Ripple {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Score a detection file against a dataset's ground-truth boxes
    EvalDetect {
        /// Dataset manifest (manifest.jsonl)
        manifest: PathBuf,
        /// JSON detections: {"<sample id>": [{"box": [..], "score": ..}]}
        detections: PathBuf,
        /// IoU threshold for a true positive
        #[arg(long, default_value_t = 0.5)]
        iou: f64,
    },

    /// Score corrected images against a dataset's clean targets
    EvalCorrect {
        /// Dataset manifest (manifest.jsonl)
        manifest: PathBuf,
        /// Directory of corrections: <id>.png or <id>_box<i>.png crops
        corrections: PathBuf,
    },

    /// Compare pixel variability inside boxes across image pairs
    RegionalStd {
        /// JSON array of {"before": path, "after": path, "box": [..]}
        pairs: PathBuf,
    },

    /// Render a contact sheet of dataset samples
    Gallery {
        manifest: PathBuf,
        /// Output PNG path
        #[arg(short, long)]
        out: PathBuf,
        /// Include corrected outputs from this directory
        #[arg(long)]
        corrections: Option<PathBuf>,
        /// Number of samples to render (0 = all)
        #[arg(long, default_value_t = 12)]
        count: usize,
    },

    /// Write a synthetic head volume for trying the toolkit out
    Phantom {
        /// Output NIfTI path
        output: PathBuf,
        #[arg(long, default_value_t = 192)]
        nx: usize,
        #[arg(long, default_value_t = 192)]
        ny: usize,
        #[arg(long, default_value_t = 160)]
        nz: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Run the reference smoothing corrector over a dataset
    BaselineCorrect {
        manifest: PathBuf,
        /// Directory to write <id>.png corrections into
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn load_config(
    path: Option<&PathBuf>,
    jobs: Option<usize>,
    n_per_bin: Option<usize>,
    per_axis: Option<usize>,
) -> mriforge::Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(j) = jobs {
        cfg.build.jobs = j;
    }
    if let Some(n) = n_per_bin {
        cfg.build.n_per_bin = n;
    }
    if let Some(p) = per_axis {
        cfg.sampling.per_axis = p;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> mriforge::Result<()> {
    match cli.command {
        Command::Build {
            volumes,
            out,
            config,
            seed,
            jobs,
            n_per_bin,
            per_axis,
        } => {
            let cfg = load_config(config.as_ref(), jobs, n_per_bin, per_axis)?;
            let (manifest_path, manifest) = pipeline::cmd_build(&volumes, &out, &cfg, seed)?;
            let counts = manifest.bin_counts();
            println!("samples accepted by PSNR band:");
            for (bin, n) in mriforge::metrics::PsnrBin::ALL.iter().zip(counts) {
                println!("  {:>5} dB  {n}", bin.label());
            }
            if !manifest.skipped.is_empty() {
                println!("generation attempts skipped: {}", manifest.skipped.len());
            }
            for w in &manifest.warnings {
                println!("warning: {w}");
            }
            println!("manifest written to {}", manifest_path.display());
        }

        Command::Warp {
            input,
            output,
            seed,
            epsilon,
        } => {
            let circles = pipeline::cmd_warp(&input, &output, seed, epsilon)?;
            println!("{}", serde_json::to_string_pretty(&circles).expect("serializable"));
        }

        Command::Ring {
            input,
            output,
            seed,
            combo,
            no_jitter,
        } => {
            let params = pipeline::cmd_ring(&input, &output, seed, combo, !no_jitter)?;
            println!("{}", serde_json::to_string_pretty(&params).expect("serializable"));
        }

        Command::Ripple {
            input,
            output,
            seed,
        } => {
            let params = pipeline::cmd_ripple(&input, &output, seed)?;
            println!("{}", serde_json::to_string_pretty(&params).expect("serializable"));
        }

        Command::EvalDetect {
            manifest,
            detections,
            iou,
        } => {
            let report = pipeline::cmd_eval_detect(&manifest, &detections, iou)?;
            print!("{}", report.to_text());
        }

        Command::EvalCorrect {
            manifest,
            corrections,
        } => {
            let report = pipeline::cmd_eval_correct(&manifest, &corrections)?;
            print!("{}", report.to_text_table());
        }

        Command::RegionalStd { pairs } => {
            let report = pipeline::cmd_regional_std(&pairs)?;
            print!("{}", report.to_text());
        }

        Command::Gallery {
            manifest,
            out,
            corrections,
            count,
        } => {
            let path = pipeline::cmd_gallery(&manifest, &out, corrections.as_deref(), count)?;
            println!("gallery written to {}", path.display());
        }

        Command::Phantom {
            output,
            nx,
            ny,
            nz,
            seed,
        } => {
            pipeline::cmd_phantom(&output, nx, ny, nz, seed)?;
            println!("phantom volume written to {}", output.display());
        }

        Command::BaselineCorrect { manifest, out } => {
            let n = pipeline::cmd_baseline_correct(&manifest, &out)?;
            println!("{n} corrections written to {}", out.display());
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("FORGE_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
