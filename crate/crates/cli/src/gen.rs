//! `gen`: synthesize a scene and write its four artifacts.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::json;
use topotrace::pgm;
use topotrace::synth::{corrupt, generate_network};

use crate::settings::Settings;
use crate::SynthFlags;

#[derive(Args)]
pub struct GenArgs {
    /// Existing directory that receives gt_graph.json, gt_mask.pgm,
    /// probmap.pgm, and params.json.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    #[command(flatten)]
    synth: SynthFlags,
}

pub fn run(args: GenArgs, mut settings: Settings) -> Result<u8> {
    args.synth.apply(&mut settings);
    let params = settings.synth_params();
    params.validate()?;
    if !args.out.is_dir() {
        bail!("output directory {} does not exist", args.out.display());
    }

    let (graph, mask) = generate_network(&params)?;
    let probmap = corrupt(&mask, &params);

    let graph_path = args.out.join("gt_graph.json");
    pgm::atomic_write(&graph_path, graph.to_json_string().as_bytes())
        .with_context(|| format!("writing {}", graph_path.display()))?;
    pgm::save_mask(&args.out.join("gt_mask.pgm"), &mask)?;
    pgm::save_probability_map(&args.out.join("probmap.pgm"), &probmap)?;
    let params_path = args.out.join("params.json");
    pgm::atomic_write(&params_path, serde_json::to_string(&params)?.as_bytes())
        .with_context(|| format!("writing {}", params_path.display()))?;

    println!(
        "{}",
        json!({
            "command": "gen",
            "seed": params.seed,
            "width": params.width,
            "height": params.height,
            "components": params.n_components,
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
            "out": args.out.display().to_string(),
        })
    );
    Ok(0)
}
