//! `trace`: run the iterative delineation over a probability map.

use std::cell::RefCell;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::json;
use topotrace::delineate::{delineate_observed, TraceObserver, TraceReport};
use topotrace::oracle::{GroundTruthOracle, ProbabilityMapOracle};
use topotrace::raster::skeletonize;
use topotrace::{pgm, ConnectivityOracle, Error, NetworkGraph};

use crate::settings::Settings;
use crate::{OracleFlags, TraceFlags};

#[derive(Args)]
pub struct TraceArgs {
    /// Probability map to trace (PGM P5).
    #[arg(long, value_name = "FILE")]
    probmap: PathBuf,

    /// Connectivity oracle: `gt:<mask.pgm>` (mask is thinned before use) or
    /// `probmap` (classical patch analysis of the traced map itself).
    #[arg(long, value_name = "SPEC")]
    oracle: String,

    /// Output graph JSON path (also written on a step-budget stop).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    /// Optional trace-report JSON path.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,

    /// Existing directory for periodic partial-graph snapshots.
    #[arg(long, value_name = "DIR")]
    snapshots: Option<PathBuf>,

    /// Snapshot period in steps.
    #[arg(long, default_value_t = 25, value_name = "STEPS")]
    snapshot_every: usize,

    /// Step counter on standard error.
    #[arg(long)]
    verbose: bool,

    #[command(flatten)]
    oracle_flags: OracleFlags,

    #[command(flatten)]
    trace_flags: TraceFlags,
}

fn write_outputs(
    out: &Path,
    report_path: Option<&Path>,
    graph: &NetworkGraph,
    report: &TraceReport,
) -> Result<()> {
    pgm::atomic_write(out, graph.to_json_string().as_bytes())
        .with_context(|| format!("writing {}", out.display()))?;
    if let Some(path) = report_path {
        pgm::atomic_write(path, serde_json::to_string(report)?.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn run(args: TraceArgs, mut settings: Settings) -> Result<u8> {
    args.oracle_flags.apply(&mut settings);
    args.trace_flags.apply(&mut settings);

    let map = pgm::load_probability_map(&args.probmap)?;
    let oracle_cfg = settings.oracle_config();
    oracle_cfg.validate()?;
    let oracle: Box<dyn ConnectivityOracle> = if args.oracle == "probmap" {
        Box::new(ProbabilityMapOracle::new(map.clone(), oracle_cfg)?)
    } else if let Some(path) = args.oracle.strip_prefix("gt:") {
        let mask = pgm::load_mask(Path::new(path))?;
        if (mask.width(), mask.height()) != (map.width(), map.height()) {
            bail!(
                "oracle mask is {}x{} but the probability map is {}x{}",
                mask.width(),
                mask.height(),
                map.width(),
                map.height()
            );
        }
        Box::new(GroundTruthOracle::new(skeletonize(&mask), oracle_cfg)?)
    } else {
        bail!("oracle must be `probmap` or `gt:<mask.pgm>`, got {:?}", args.oracle);
    };
    let cfg = settings.delineation_config(map.width(), map.height(), oracle_cfg.k);
    cfg.validate()?;
    if let Some(dir) = &args.snapshots {
        if !dir.is_dir() {
            bail!("snapshot directory {} does not exist", dir.display());
        }
        if args.snapshot_every == 0 {
            bail!("--snapshot-every must be positive");
        }
    }

    let snapshot_failure: RefCell<Option<anyhow::Error>> = RefCell::new(None);
    let mut observer = |steps: usize, graph: &NetworkGraph| {
        if args.verbose && steps.is_multiple_of(25) {
            eprintln!("step {steps}: {} edges", graph.edge_count());
        }
        if let Some(dir) = &args.snapshots {
            if steps.is_multiple_of(args.snapshot_every) && snapshot_failure.borrow().is_none() {
                let path = dir.join(format!("step_{steps:06}.json"));
                if let Err(e) = pgm::atomic_write(&path, graph.to_json_string().as_bytes()) {
                    *snapshot_failure.borrow_mut() =
                        Some(anyhow::Error::new(e).context(format!("writing {}", path.display())));
                }
            }
        }
    };
    let want_observer = args.verbose || args.snapshots.is_some();
    let result = delineate_observed(
        &map,
        oracle.as_ref(),
        &cfg,
        want_observer.then_some(&mut observer as TraceObserver),
    );
    if let Some(err) = snapshot_failure.into_inner() {
        return Err(err);
    }

    match result {
        Ok((graph, report)) => {
            write_outputs(&args.out, args.report.as_deref(), &graph, &report)?;
            println!(
                "{}",
                json!({
                    "command": "trace",
                    "status": "ok",
                    "report": report,
                    "out": args.out.display().to_string(),
                })
            );
            Ok(0)
        }
        Err(Error::MaxSteps { max_steps, partial }) => {
            let (graph, report) = *partial;
            write_outputs(&args.out, args.report.as_deref(), &graph, &report)?;
            eprintln!(
                "step budget of {max_steps} exhausted; partial graph written to {}",
                args.out.display()
            );
            println!(
                "{}",
                json!({
                    "command": "trace",
                    "status": "max_steps",
                    "report": report,
                    "out": args.out.display().to_string(),
                })
            );
            Ok(3)
        }
        Err(other) => Err(other.into()),
    }
}
