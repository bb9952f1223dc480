//! Command-line pipeline for synthetic curvilinear scenes: generate, trace,
//! evaluate, export patch ground truth, and render overlays.
//!
//! Machine-readable results go to standard output as JSON lines;
//! diagnostics go to standard error. Exit codes: 0 success, 2 usage or
//! input error, 3 algorithmic safety-stop (step budget exhausted; partial
//! results are still written).

mod eval;
mod gen;
mod patch_gt;
mod render;
mod settings;
mod trace;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use settings::Settings;

#[derive(Parser)]
#[command(name = "topotrace", version, about = "Network topology tracing over probability maps")]
struct Cli {
    /// Flat key=value config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scene: ground-truth graph + mask and a
    /// corrupted probability map.
    Gen(gen::GenArgs),
    /// Trace a probability map into a network graph.
    Trace(trace::TraceArgs),
    /// Evaluate a predicted graph (or mask) against ground truth.
    Eval(eval::EvalArgs),
    /// Export patch-level ground-truth border exits for a mask.
    PatchGt(patch_gt::PatchGtArgs),
    /// Render a graph over a probability map as PGM or PPM.
    Render(render::RenderArgs),
}

/// Generation parameter flags, mirroring the config-file keys.
#[derive(Args, Clone, Copy, Debug, Default)]
pub struct SynthFlags {
    /// PRNG seed for the scene.
    #[arg(long)]
    seed: Option<u64>,
    /// Scene width in pixels.
    #[arg(long)]
    width: Option<usize>,
    /// Scene height in pixels.
    #[arg(long)]
    height: Option<usize>,
    /// Walkers launched per component root.
    #[arg(long)]
    n_seeds: Option<usize>,
    /// Per-step probability that a walker forks.
    #[arg(long)]
    branch_prob: Option<f64>,
    /// Walker stride in pixels.
    #[arg(long)]
    step_len: Option<usize>,
    /// Number of disjoint components.
    #[arg(long = "components")]
    n_components: Option<usize>,
    /// Box-blur radius applied to the rendered map.
    #[arg(long)]
    blur_radius: Option<usize>,
    /// Uniform noise amplitude.
    #[arg(long)]
    noise_amp: Option<f64>,
    /// Number of erased gaps per scene.
    #[arg(long)]
    gap_count: Option<usize>,
    /// Length of each erased gap in pixels.
    #[arg(long)]
    gap_len: Option<usize>,
    /// Number of disconnected clutter strokes.
    #[arg(long)]
    clutter_count: Option<usize>,
}

/// Patch-oracle geometry flags.
#[derive(Args, Clone, Copy, Debug, Default)]
pub struct OracleFlags {
    /// Patch side (odd).
    #[arg(long)]
    k: Option<usize>,
    /// Detection border side (odd, < k).
    #[arg(long)]
    s: Option<usize>,
    /// Structure threshold for map-backed oracles.
    #[arg(long)]
    tau_occupancy: Option<f64>,
}

/// Tracer parameter flags.
#[derive(Args, Clone, Copy, Debug, Default)]
pub struct TraceFlags {
    /// Minimum detection confidence to act on.
    #[arg(long)]
    tau_conf: Option<f64>,
    /// Chebyshev radius for snapping detections to visited points.
    #[arg(long)]
    r_nbhd: Option<usize>,
    /// Minimum map value for a restart location.
    #[arg(long)]
    tau_restart: Option<f64>,
    /// Minimum Chebyshev distance from visited points for a restart.
    #[arg(long)]
    d_restart: Option<f64>,
    /// Step budget before the trace stops with partial output.
    #[arg(long)]
    max_steps: Option<usize>,
}

/// Evaluation parameter flags.
#[derive(Args, Clone, Copy, Debug, Default)]
pub struct EvalFlags {
    /// Pixel distance for boundary precision/recall matching.
    #[arg(long)]
    d_match: Option<f64>,
    /// Minimum path-length ratio for a reproduced segment.
    #[arg(long)]
    connectivity_ratio: Option<f64>,
    /// Maximum distance from a segment endpoint to its predicted stand-in.
    #[arg(long)]
    d_near: Option<f64>,
    /// Use min/max instead of the one-sided gt/predicted length ratio.
    #[arg(long)]
    symmetric_ratio: bool,
}

impl SynthFlags {
    fn apply(&self, s: &mut Settings) {
        s.seed = self.seed.or(s.seed);
        s.width = self.width.or(s.width);
        s.height = self.height.or(s.height);
        s.n_seeds = self.n_seeds.or(s.n_seeds);
        s.branch_prob = self.branch_prob.or(s.branch_prob);
        s.step_len = self.step_len.or(s.step_len);
        s.n_components = self.n_components.or(s.n_components);
        s.blur_radius = self.blur_radius.or(s.blur_radius);
        s.noise_amp = self.noise_amp.or(s.noise_amp);
        s.gap_count = self.gap_count.or(s.gap_count);
        s.gap_len = self.gap_len.or(s.gap_len);
        s.clutter_count = self.clutter_count.or(s.clutter_count);
    }
}

impl OracleFlags {
    fn apply(&self, s: &mut Settings) {
        s.k = self.k.or(s.k);
        s.s = self.s.or(s.s);
        s.tau_occupancy = self.tau_occupancy.or(s.tau_occupancy);
    }
}

impl TraceFlags {
    fn apply(&self, s: &mut Settings) {
        s.tau_conf = self.tau_conf.or(s.tau_conf);
        s.r_nbhd = self.r_nbhd.or(s.r_nbhd);
        s.tau_restart = self.tau_restart.or(s.tau_restart);
        s.d_restart = self.d_restart.or(s.d_restart);
        s.max_steps = self.max_steps.or(s.max_steps);
    }
}

impl EvalFlags {
    fn apply(&self, s: &mut Settings) {
        s.d_match = self.d_match.or(s.d_match);
        s.connectivity_ratio = self.connectivity_ratio.or(s.connectivity_ratio);
        s.d_near = self.d_near.or(s.d_near);
        if self.symmetric_ratio {
            s.symmetric_ratio = Some(true);
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let settings = Settings::from_file_opt(cli.config.as_deref())?;
    match cli.command {
        Command::Gen(args) => gen::run(args, settings),
        Command::Trace(args) => trace::run(args, settings),
        Command::Eval(args) => eval::run(args, settings),
        Command::PatchGt(args) => patch_gt::run(args, settings),
        Command::Render(args) => render::run(args, settings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
