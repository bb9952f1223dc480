//! `eval`: score a prediction against ground truth.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use topotrace::graph::raster_to_graph;
use topotrace::metrics::evaluate;
use topotrace::raster::skeletonize;
use topotrace::{pgm, NetworkGraph};

use crate::settings::Settings;
use crate::EvalFlags;

#[derive(Args)]
pub struct EvalArgs {
    /// Predicted graph JSON or mask PGM (masks are thinned and vectorized).
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,

    /// Ground-truth graph JSON or mask PGM.
    #[arg(long, value_name = "FILE")]
    gt: PathBuf,

    #[command(flatten)]
    eval_flags: EvalFlags,
}

/// Loads a graph from either representation, detected by content: PGM P5
/// magic means a mask (thinned, then vectorized), anything else is parsed
/// as graph JSON.
pub fn load_graph_auto(path: &Path) -> Result<NetworkGraph> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.starts_with(b"P5") {
        let mask = pgm::mask_from_bytes(&bytes)?;
        Ok(raster_to_graph(&skeletonize(&mask)))
    } else {
        let text = std::str::from_utf8(&bytes)
            .with_context(|| format!("{} is neither PGM nor UTF-8 JSON", path.display()))?;
        Ok(NetworkGraph::from_json_str(text)?)
    }
}

pub fn run(args: EvalArgs, mut settings: Settings) -> Result<u8> {
    args.eval_flags.apply(&mut settings);
    let cfg = settings.eval_config();
    cfg.validate()?;
    let pred = load_graph_auto(&args.pred)?;
    let gt = load_graph_auto(&args.gt)?;
    let result = evaluate(&pred, &gt, &cfg)?;
    println!("{}", serde_json::to_string(&result)?);
    Ok(0)
}
