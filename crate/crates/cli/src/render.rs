//! `render`: draw a graph over a probability map for qualitative review.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde_json::json;
use topotrace::graph::graph_to_raster;
use topotrace::pgm;

use crate::eval::load_graph_auto;
use crate::settings::Settings;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Grayscale PGM: graph pixels forced to white.
    Pgm,
    /// Color PPM: gray map with the graph in red.
    Ppm,
}

#[derive(Args)]
pub struct RenderArgs {
    /// Background probability map (PGM P5).
    #[arg(long, value_name = "FILE")]
    probmap: PathBuf,

    /// Graph JSON (or mask PGM) to overlay.
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,

    /// Output image path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Pgm)]
    format: Format,
}

pub fn run(args: RenderArgs, _settings: Settings) -> Result<u8> {
    let map = pgm::load_probability_map(&args.probmap)?;
    let graph = load_graph_auto(&args.graph)?;
    if (graph.width(), graph.height()) != (map.width(), map.height()) {
        bail!(
            "graph grid is {}x{} but the probability map is {}x{}",
            graph.width(),
            graph.height(),
            map.width(),
            map.height()
        );
    }
    let overlay = graph_to_raster(&graph)?;

    let bytes = match args.format {
        Format::Pgm => {
            let mut composed = map.clone();
            for p in overlay.iter_true() {
                composed.set(p, 1.0);
            }
            pgm::probability_to_bytes(&composed)
        }
        Format::Ppm => {
            let gray = pgm::probability_to_bytes(&map);
            let pixels = &gray[gray.len() - map.width() * map.height()..];
            let mut out = format!("P6\n{} {}\n255\n", map.width(), map.height()).into_bytes();
            for (i, &b) in pixels.iter().enumerate() {
                let p = topotrace::raster::PixelCoord::new(i / map.width(), i % map.width());
                if overlay.get(p) {
                    out.extend_from_slice(&[255, 0, 0]);
                } else {
                    out.extend_from_slice(&[b, b, b]);
                }
            }
            out
        }
    };
    pgm::atomic_write(&args.out, &bytes)?;
    println!(
        "{}",
        json!({
            "command": "render",
            "format": match args.format { Format::Pgm => "pgm", Format::Ppm => "ppm" },
            "out": args.out.display().to_string(),
        })
    );
    Ok(0)
}
