//! Flat key=value run configuration.
//!
//! One pair per line, `#` starts a comment, blank lines ignored. Every key
//! mirrors a field of the library parameter structs (generation, corruption,
//! oracle geometry, tracing, evaluation); unknown keys are errors so typos
//! fail loudly before any work starts. Command-line flags override file
//! values, which override the built-in defaults.

use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use topotrace::delineate::DelineationConfig;
use topotrace::metrics::EvalConfig;
use topotrace::synth::SynthParams;
use topotrace::OracleConfig;

/// Every recognized key, unset unless the file or a flag provided it.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    // Scene generation.
    pub seed: Option<u64>,
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub n_seeds: Option<usize>,
    pub branch_prob: Option<f64>,
    pub step_len: Option<usize>,
    pub n_components: Option<usize>,
    // Corruption.
    pub blur_radius: Option<usize>,
    pub noise_amp: Option<f64>,
    pub gap_count: Option<usize>,
    pub gap_len: Option<usize>,
    pub clutter_count: Option<usize>,
    // Oracle geometry.
    pub k: Option<usize>,
    pub s: Option<usize>,
    pub tau_occupancy: Option<f64>,
    // Tracing.
    pub tau_conf: Option<f64>,
    pub r_nbhd: Option<usize>,
    pub tau_restart: Option<f64>,
    pub d_restart: Option<f64>,
    pub max_steps: Option<usize>,
    // Evaluation.
    pub d_match: Option<f64>,
    pub connectivity_ratio: Option<f64>,
    pub d_near: Option<f64>,
    pub symmetric_ratio: Option<bool>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value {value:?} for key {key:?}: {e}"))
}

impl Settings {
    /// Loads the optional config file; `None` yields all-unset settings.
    pub fn from_file_opt(path: Option<&Path>) -> Result<Self> {
        let mut settings = Self::default();
        if let Some(path) = path {
            settings.apply_file(path)?;
        }
        Ok(settings)
    }

    fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected key=value, got {raw:?}",
                    path.display(),
                    lineno + 1
                );
            };
            self.set(key.trim(), value.trim())
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    /// Sets one key from its textual value; unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = Some(parse(key, value)?),
            "width" => self.width = Some(parse(key, value)?),
            "height" => self.height = Some(parse(key, value)?),
            "n_seeds" => self.n_seeds = Some(parse(key, value)?),
            "branch_prob" => self.branch_prob = Some(parse(key, value)?),
            "step_len" => self.step_len = Some(parse(key, value)?),
            "n_components" => self.n_components = Some(parse(key, value)?),
            "blur_radius" => self.blur_radius = Some(parse(key, value)?),
            "noise_amp" => self.noise_amp = Some(parse(key, value)?),
            "gap_count" => self.gap_count = Some(parse(key, value)?),
            "gap_len" => self.gap_len = Some(parse(key, value)?),
            "clutter_count" => self.clutter_count = Some(parse(key, value)?),
            "k" => self.k = Some(parse(key, value)?),
            "s" => self.s = Some(parse(key, value)?),
            "tau_occupancy" => self.tau_occupancy = Some(parse(key, value)?),
            "tau_conf" => self.tau_conf = Some(parse(key, value)?),
            "r_nbhd" => self.r_nbhd = Some(parse(key, value)?),
            "tau_restart" => self.tau_restart = Some(parse(key, value)?),
            "d_restart" => self.d_restart = Some(parse(key, value)?),
            "max_steps" => self.max_steps = Some(parse(key, value)?),
            "d_match" => self.d_match = Some(parse(key, value)?),
            "connectivity_ratio" => self.connectivity_ratio = Some(parse(key, value)?),
            "d_near" => self.d_near = Some(parse(key, value)?),
            "symmetric_ratio" => self.symmetric_ratio = Some(parse(key, value)?),
            _ => bail!("unknown configuration key {key:?}"),
        }
        Ok(())
    }

    /// Generation parameters with defaults for unset keys.
    pub fn synth_params(&self) -> SynthParams {
        let mut p = SynthParams::default();
        if let Some(v) = self.seed {
            p.seed = v;
        }
        if let Some(v) = self.width {
            p.width = v;
        }
        if let Some(v) = self.height {
            p.height = v;
        }
        if let Some(v) = self.n_seeds {
            p.n_seeds = v;
        }
        if let Some(v) = self.branch_prob {
            p.branch_prob = v;
        }
        if let Some(v) = self.step_len {
            p.step_len = v;
        }
        if let Some(v) = self.n_components {
            p.n_components = v;
        }
        if let Some(v) = self.blur_radius {
            p.corruption.blur_radius = v;
        }
        if let Some(v) = self.noise_amp {
            p.corruption.noise_amp = v;
        }
        if let Some(v) = self.gap_count {
            p.corruption.gap_count = v;
        }
        if let Some(v) = self.gap_len {
            p.corruption.gap_len = v;
        }
        if let Some(v) = self.clutter_count {
            p.corruption.clutter_count = v;
        }
        p
    }

    /// Oracle geometry with defaults for unset keys. When only `k` is given,
    /// `s` keeps its default margin `k - 4`.
    pub fn oracle_config(&self) -> OracleConfig {
        let mut c = OracleConfig::default();
        if let Some(v) = self.k {
            c.k = v;
            c.s = v.saturating_sub(4) | 1;
        }
        if let Some(v) = self.s {
            c.s = v;
        }
        if let Some(v) = self.tau_occupancy {
            c.tau_occupancy = v;
        }
        c
    }

    /// Tracer parameters; size-dependent defaults are computed for the map
    /// being traced before the overrides apply.
    pub fn delineation_config(&self, width: usize, height: usize, k: usize) -> DelineationConfig {
        let mut c = DelineationConfig::for_map(width, height, k);
        if let Some(v) = self.tau_conf {
            c.tau_conf = v;
        }
        if let Some(v) = self.r_nbhd {
            c.r_nbhd = v;
        }
        if let Some(v) = self.tau_restart {
            c.tau_restart = v;
        }
        if let Some(v) = self.d_restart {
            c.d_restart = v;
        }
        if let Some(v) = self.max_steps {
            c.max_steps = v;
        }
        c
    }

    /// Evaluation parameters with defaults for unset keys.
    pub fn eval_config(&self) -> EvalConfig {
        let mut c = EvalConfig::default();
        if let Some(v) = self.d_match {
            c.d_match = v;
        }
        if let Some(v) = self.connectivity_ratio {
            c.connectivity_ratio = v;
        }
        if let Some(v) = self.d_near {
            c.d_near = v;
        }
        if let Some(v) = self.symmetric_ratio {
            c.symmetric_ratio = v;
        }
        c
    }
}
