//! `patch-gt`: export patch-level ground-truth border exits, the
//! training-data procedure for a learned connectivity model.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::json;
use topotrace::oracle::patch_ground_truth;
use topotrace::pgm;
use topotrace::raster::{render_heatmap, skeletonize, PixelCoord};
use topotrace::synth::SplitMix64;

use crate::settings::Settings;
use crate::OracleFlags;

#[derive(Args)]
pub struct PatchGtArgs {
    /// Ground-truth mask (PGM P5); thinned before patch extraction.
    #[arg(long, value_name = "FILE")]
    mask: PathBuf,

    /// Single patch center as `row,col`.
    #[arg(long, value_name = "ROW,COL", conflicts_with = "count")]
    center: Option<String>,

    /// Sample this many on-structure centers instead.
    #[arg(long, value_name = "N")]
    count: Option<usize>,

    /// Sampling seed (with --count); defaults to the config `seed` or 1.
    #[arg(long)]
    seed: Option<u64>,

    /// Write the exit heatmap of the (single) center as PGM.
    #[arg(long, value_name = "FILE", requires = "center")]
    heatmap: Option<PathBuf>,

    /// Gaussian sigma for --heatmap.
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,

    #[command(flatten)]
    oracle_flags: OracleFlags,
}

fn parse_center(text: &str) -> Result<PixelCoord> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        bail!("--center expects `row,col`, got {text:?}");
    }
    let row = parts[0].trim().parse().context("invalid center row")?;
    let col = parts[1].trim().parse().context("invalid center col")?;
    Ok(PixelCoord::new(row, col))
}

pub fn run(args: PatchGtArgs, mut settings: Settings) -> Result<u8> {
    args.oracle_flags.apply(&mut settings);
    let cfg = settings.oracle_config();
    cfg.validate()?;

    let mask = pgm::load_mask(&args.mask)?;
    let skeleton = skeletonize(&mask);

    let centers: Vec<PixelCoord> = match (&args.center, args.count) {
        (Some(text), None) => vec![parse_center(text)?],
        (None, Some(count)) => {
            let on: Vec<PixelCoord> = skeleton.iter_true().collect();
            if on.is_empty() {
                bail!("mask {} has no structure pixels", args.mask.display());
            }
            let mut rng = SplitMix64::new(args.seed.or(settings.seed).unwrap_or(1));
            (0..count)
                .map(|_| on[rng.next_range(on.len() as u64) as usize])
                .collect()
        }
        (None, None) => bail!("provide either --center or --count"),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };

    for center in &centers {
        let exits = patch_ground_truth(&skeleton, *center, &cfg)?;
        println!(
            "{}",
            json!({
                "center": [center.row, center.col],
                "exits": exits.iter().map(|p| [p.row, p.col]).collect::<Vec<_>>(),
            })
        );
        if let Some(path) = &args.heatmap {
            let heat = render_heatmap(&exits, args.sigma, skeleton.width(), skeleton.height())?;
            pgm::save_probability_map(path, &heat)?;
        }
    }
    Ok(0)
}
