//! Deterministic synthetic scenes: road-like ground-truth networks plus a
//! corrupted probability map standing in for an imperfect global model.
//!
//! [`generate_network`] grows disjoint polyline trees by seeded random walks
//! with branching; [`corrupt`] turns the rasterized ground truth into a
//! probability map with blur, noise, low-probability gaps carved along the
//! structure, and high-probability clutter strokes off it. Everything is
//! driven by [`SplitMix64`] (the PRNG is part of the output contract so
//! golden files are portable across implementations), and directions avoid
//! `libm` trigonometry so byte-identical output does not depend on the
//! platform's math library.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::{graph_to_raster, polyline_length, NetworkGraph, Polyline};
use crate::raster::{rasterize_segment, BinaryMask, PixelCoord, ProbabilityMap, Window};
use crate::{Error, Result};

/// SplitMix64 PRNG (Steele, Lea & Flood's mixing constants). Fixed here —
/// not swappable — because generated artifacts are compared byte-for-byte
/// across implementations.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, n)` by 128-bit multiply (Lemire reduction, without
    /// the rejection step — the bias is < 2⁻⁶⁴ per draw and keeping the
    /// draw count fixed is worth more here than removing it).
    pub fn next_range(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((u128::from(self.next_u64()) * u128::from(n)) >> 64) as u64
    }

    /// Uniform in `(-1, 1)`.
    fn next_signed_unit(&mut self) -> f64 {
        self.next_f64() * 2.0 - 1.0
    }
}

/// Decorrelated per-stage stream so changing one corruption stage's
/// parameters never shifts another stage's draws.
fn stream(seed: u64, tag: u64) -> SplitMix64 {
    SplitMix64::new(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

const STREAM_NOISE: u64 = 1;
const STREAM_GAPS: u64 = 2;
const STREAM_CLUTTER: u64 = 3;

/// `(row, col)` unit direction for a heading in turns (1 turn = 360°;
/// heading 0 points along +col, 0.25 along +row).
///
/// Quadrant reduction plus a fixed-order Taylor evaluation: accurate to
/// ~1e-15 on the reduced argument and — unlike `f64::sin_cos` — guaranteed
/// bit-identical on every platform, which the golden-file contract needs.
fn direction(turns: f64) -> (f64, f64) {
    let t = turns - turns.floor();
    let quadrant = (t * 4.0) as u32;
    let x = (t - f64::from(quadrant) * 0.25) * std::f64::consts::TAU;
    let x2 = x * x;
    let mut s = 1.0;
    for k in (1..=10).rev() {
        s = 1.0 - x2 / ((2 * k) * (2 * k + 1)) as f64 * s;
    }
    let s = x * s;
    let mut c = 1.0;
    for k in (1..=10).rev() {
        c = 1.0 - x2 / ((2 * k - 1) * (2 * k)) as f64 * c;
    }
    match quadrant {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// Probability-map corruption stages, applied in order: box blur, additive
/// uniform noise, gaps carved along the structure, clutter strokes off it,
/// final clamp to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionParams {
    /// Box-blur radius in pixels (0 = identity base map).
    pub blur_radius: usize,
    /// Additive uniform noise amplitude in `[0, 1]`.
    pub noise_amp: f64,
    /// Number of low-probability gaps carved along the structure.
    pub gap_count: usize,
    /// Pixels per gap.
    pub gap_len: usize,
    /// Number of short high-probability strokes placed off-structure.
    pub clutter_count: usize,
}

impl Default for CorruptionParams {
    fn default() -> Self {
        Self {
            blur_radius: 0,
            noise_amp: 0.15,
            gap_count: 2,
            gap_len: 7,
            clutter_count: 3,
        }
    }
}

impl CorruptionParams {
    /// No-op corruption: the probability map equals the mask exactly.
    pub fn none() -> Self {
        Self {
            blur_radius: 0,
            noise_amp: 0.0,
            gap_count: 0,
            gap_len: 0,
            clutter_count: 0,
        }
    }
}

/// Scene-generation parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    /// Walkers launched at each component root, headings evenly spread.
    pub n_seeds: usize,
    /// Per-step probability that a walker forks off a new branch.
    pub branch_prob: f64,
    /// Walker step length in pixels (also sets the component separation,
    /// which is at least `2 * step_len`).
    pub step_len: usize,
    /// Number of disjoint tree components.
    pub n_components: usize,
    pub corruption: CorruptionParams,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: 1,
            width: 256,
            height: 256,
            n_seeds: 2,
            branch_prob: 0.08,
            step_len: 12,
            n_components: 2,
            corruption: CorruptionParams::default(),
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        if self.width < 64 || self.height < 64 {
            return Err(Error::Config(format!(
                "scene dimensions must be at least 64x64, got {}x{}",
                self.width, self.height
            )));
        }
        if self.n_seeds == 0 {
            return Err(Error::Config("n_seeds must be at least 1".into()));
        }
        if self.step_len == 0 {
            return Err(Error::Config("step_len must be at least 1".into()));
        }
        if 4 * self.step_len + 2 > self.width.min(self.height) {
            return Err(Error::Config(format!(
                "step_len {} too large for a {}x{} scene (needs 4*step_len+2 <= min dimension)",
                self.step_len, self.width, self.height
            )));
        }
        if !(0.0..=1.0).contains(&self.branch_prob) {
            return Err(Error::Config(format!(
                "branch_prob must be in [0,1], got {}",
                self.branch_prob
            )));
        }
        if !(0.0..=1.0).contains(&self.corruption.noise_amp) {
            return Err(Error::Config(format!(
                "noise_amp must be in [0,1], got {}",
                self.corruption.noise_amp
            )));
        }
        Ok(())
    }
}

/// Per-step heading jitter (uniform, in turns; 25°).
const JITTER_TURNS: f64 = 25.0 / 360.0;
/// Maximum accumulated deviation from a walker's spawn heading (40°) —
/// keeps walks road-straight and prevents self-loops.
const MAX_DEV_TURNS: f64 = 40.0 / 360.0;
/// Branch headings diverge from the parent by 60°–85°.
const BRANCH_MIN_TURNS: f64 = 60.0 / 360.0;
const BRANCH_MAX_TURNS: f64 = 85.0 / 360.0;
/// Fresh-jitter retries before a blocked walker dies.
const STEP_RETRIES: usize = 3;
/// Walker cap per component (initial seeds + branches).
const WALKER_CAP: usize = 24;
/// Root re-draws before a component is declared unplaceable.
const COMPONENT_ATTEMPTS: usize = 40;
/// Minimum accepted component length, in units of `step_len`.
const MIN_LEN_FACTOR: usize = 6;
/// Own-trail clearance is waived this close (Chebyshev) to a stroke's start
/// so consecutive strokes and branch roots may touch their own component.
const OWN_CLEAR_EXCLUDE: usize = 3;

const GAP_VALUE: f64 = 0.05;
const CLUTTER_VALUE: f64 = 0.9;
const CLUTTER_LEN: usize = 7;
/// Clutter keeps Chebyshev distance > CLUTTER_CLEARANCE from the structure
/// and from other clutter, so thresholded clutter forms its own components.
const CLUTTER_CLEARANCE: usize = 2;
const CLUTTER_ATTEMPTS_PER: usize = 100;

struct Walker {
    /// Continuous position (row, col); the polyline stores rounded pixels.
    pos: (f64, f64),
    spawn_heading: f64,
    /// Accumulated deviation from `spawn_heading`, clamped per step.
    dev: f64,
    points: Polyline,
    steps_left: usize,
}

/// Grows `n_components` disjoint polyline trees by seeded random walks and
/// returns the graph together with its rasterization.
///
/// Components keep a Chebyshev separation greater than `2 * step_len`;
/// walkers stop at the image border (final stroke clipped onto it), when
/// their step budget runs out, or when a stroke cannot clear existing
/// structure. Components shorter than `6 * step_len` are rolled back and
/// re-grown from a fresh root; a component that fails every attempt yields
/// [`Error::Separation`]. The output is fully determined by `params`.
pub fn generate_network(params: &SynthParams) -> Result<(NetworkGraph, BinaryMask)> {
    params.validate()?;
    let (w, h) = (params.width, params.height);
    let mut rng = SplitMix64::new(params.seed);
    let mut graph = NetworkGraph::new(w, h);
    let mut forbidden = BinaryMask::new(w, h);
    for component in 0..params.n_components {
        let mut accepted = false;
        for _ in 0..COMPONENT_ATTEMPTS {
            let Some((polylines, drawn)) = grow_component(&mut rng, params, &forbidden) else {
                continue;
            };
            for polyline in polylines {
                graph.add_edge(polyline)?;
            }
            for &p in &drawn {
                for q in Window::centered(p, 2 * params.step_len, w, h).iter() {
                    forbidden.set(q, true);
                }
            }
            accepted = true;
            break;
        }
        if !accepted {
            return Err(Error::Separation {
                component,
                attempts: COMPONENT_ATTEMPTS,
            });
        }
    }
    let mask = graph_to_raster(&graph)?;
    Ok((graph, mask))
}

/// One component growth attempt: `None` when the root lands in forbidden
/// territory or the finished component is too short.
fn grow_component(
    rng: &mut SplitMix64,
    params: &SynthParams,
    forbidden: &BinaryMask,
) -> Option<(Vec<Polyline>, Vec<PixelCoord>)> {
    let (w, h) = (params.width, params.height);
    let margin = 2 * params.step_len;
    let root = PixelCoord::new(
        margin + rng.next_range((h - 2 * margin) as u64) as usize,
        margin + rng.next_range((w - 2 * margin) as u64) as usize,
    );
    let base_heading = rng.next_f64();
    if forbidden.get(root) {
        return None;
    }
    let budget = (w + h) / params.step_len;
    let mut own = BinaryMask::new(w, h);
    own.set(root, true);
    let mut drawn = vec![root];
    let mut polylines: Vec<Polyline> = Vec::new();
    let mut queue: VecDeque<Walker> = (0..params.n_seeds)
        .map(|i| Walker {
            pos: (root.row as f64, root.col as f64),
            spawn_heading: base_heading + i as f64 / params.n_seeds as f64,
            dev: 0.0,
            points: vec![root],
            steps_left: budget,
        })
        .collect();
    let mut spawned = params.n_seeds;
    while let Some(mut wk) = queue.pop_front() {
        if wk.steps_left == 0 {
            finish_walker(wk, &mut polylines);
            continue;
        }
        wk.steps_left -= 1;
        let cur = *wk.points.last().unwrap();
        let mut moved = false;
        let mut died = false;
        for _ in 0..STEP_RETRIES {
            let dev = (wk.dev + rng.next_signed_unit() * JITTER_TURNS)
                .clamp(-MAX_DEV_TURNS, MAX_DEV_TURNS);
            let (dr, dc) = direction(wk.spawn_heading + dev);
            let step = params.step_len as f64;
            let next = (wk.pos.0 + dr * step, wk.pos.1 + dc * step);
            let nr = next.0.round() as i64;
            let nc = next.1.round() as i64;
            let clipped = nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64;
            let target = PixelCoord::new(
                nr.clamp(0, h as i64 - 1) as usize,
                nc.clamp(0, w as i64 - 1) as usize,
            );
            if target == cur {
                continue;
            }
            let stroke = rasterize_segment(cur, target);
            if !stroke_clear(&stroke, cur, &own, forbidden) {
                continue;
            }
            for &q in &stroke[1..] {
                own.set(q, true);
                drawn.push(q);
            }
            // Record the full pixel stroke so polylines stay 8-connected
            // and their lengths measure the same pixel paths the tracer
            // produces.
            wk.points.extend_from_slice(&stroke[1..]);
            wk.pos = if clipped {
                (target.row as f64, target.col as f64)
            } else {
                next
            };
            wk.dev = dev;
            moved = true;
            died = clipped;
            break;
        }
        if !moved {
            died = true;
        }
        let mut branch = None;
        if moved && !died && spawned < WALKER_CAP && rng.next_f64() < params.branch_prob {
            let sign = if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
            let angle = BRANCH_MIN_TURNS + rng.next_f64() * (BRANCH_MAX_TURNS - BRANCH_MIN_TURNS);
            let tip = *wk.points.last().unwrap();
            // Close the parent polyline so the fork becomes a graph node.
            if wk.points.len() >= 2 {
                polylines.push(std::mem::replace(&mut wk.points, vec![tip]));
            }
            branch = Some(Walker {
                pos: wk.pos,
                spawn_heading: wk.spawn_heading + wk.dev + sign * angle,
                dev: 0.0,
                points: vec![tip],
                steps_left: budget,
            });
            spawned += 1;
        }
        if died {
            finish_walker(wk, &mut polylines);
        } else {
            queue.push_back(wk);
        }
        if let Some(b) = branch {
            queue.push_back(b);
        }
    }
    let total: f64 = polylines.iter().map(|p| polyline_length(p)).sum();
    if polylines.is_empty() || total < (MIN_LEN_FACTOR * params.step_len) as f64 {
        return None;
    }
    Some((polylines, drawn))
}

fn finish_walker(walker: Walker, polylines: &mut Vec<Polyline>) {
    if walker.points.len() >= 2 {
        polylines.push(walker.points);
    }
}

/// A candidate stroke is acceptable when no pixel touches another
/// component's exclusion zone, and pixels beyond the immediate start
/// vicinity keep Chebyshev distance >= 2 from the walker's own component
/// (no self-crossings, so components stay geometric trees).
fn stroke_clear(
    stroke: &[PixelCoord],
    start: PixelCoord,
    own: &BinaryMask,
    forbidden: &BinaryMask,
) -> bool {
    for &q in &stroke[1..] {
        if forbidden.get(q) {
            return false;
        }
        if q.chebyshev(&start) > OWN_CLEAR_EXCLUDE {
            let nbhd = Window::centered(q, 1, own.width(), own.height());
            if nbhd.iter().any(|n| own.get(n)) {
                return false;
            }
        }
    }
    true
}

/// Corrupts a ground-truth mask into the probability map of an imperfect
/// global model: box blur, ±noise, `gap_count` low-probability (0.05) runs
/// of `gap_len` pixels carved along the structure, `clutter_count` short
/// strokes of probability 0.9 placed clear of the structure, then a clamp
/// to `[0, 1]`. Never fails; unplaceable clutter is skipped after bounded
/// attempts. Deterministic in `params.seed`, independently per stage.
pub fn corrupt(mask: &BinaryMask, params: &SynthParams) -> ProbabilityMap {
    let (w, h) = (mask.width(), mask.height());
    let c = params.corruption;
    let mut map = if c.blur_radius == 0 {
        mask.to_probability_map()
    } else {
        let mut m = ProbabilityMap::new(w, h);
        for p in Window::full(w, h).iter() {
            let win = Window::centered(p, c.blur_radius, w, h);
            let hits = win.iter().filter(|q| mask.get(*q)).count();
            m.set(p, hits as f64 / (win.width() * win.height()) as f64);
        }
        m
    };
    if c.noise_amp > 0.0 {
        let mut rng = stream(params.seed, STREAM_NOISE);
        for v in map.values_mut() {
            *v += rng.next_signed_unit() * c.noise_amp;
        }
    }
    if c.gap_count > 0 && c.gap_len > 0 {
        let pixels: Vec<PixelCoord> = mask.iter_true().collect();
        if !pixels.is_empty() {
            let mut rng = stream(params.seed, STREAM_GAPS);
            for _ in 0..c.gap_count {
                carve_gap(
                    &mut map,
                    mask,
                    pixels[rng.next_range(pixels.len() as u64) as usize],
                    c.gap_len,
                );
            }
        }
    }
    if c.clutter_count > 0 {
        place_clutter(&mut map, mask, params.seed, c.clutter_count);
    }
    for v in map.values_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    map
}

/// Sets a connected run of up to `gap_len` structure pixels (breadth-first
/// around `seed`) to [`GAP_VALUE`].
fn carve_gap(map: &mut ProbabilityMap, mask: &BinaryMask, seed: PixelCoord, gap_len: usize) {
    let mut seen = BTreeSet::from([seed]);
    let mut fifo = VecDeque::from([seed]);
    let mut carved = 0;
    while let Some(p) = fifo.pop_front() {
        if carved == gap_len {
            break;
        }
        map.set(p, GAP_VALUE);
        carved += 1;
        for q in Window::centered(p, 1, mask.width(), mask.height()).iter() {
            if q != p && mask.get(q) && seen.insert(q) {
                fifo.push_back(q);
            }
        }
    }
}

fn place_clutter(map: &mut ProbabilityMap, mask: &BinaryMask, seed: u64, count: usize) {
    let (w, h) = (mask.width(), mask.height());
    let mut blocked = mask.dilate(CLUTTER_CLEARANCE);
    let mut rng = stream(seed, STREAM_CLUTTER);
    let mut placed = 0;
    let mut attempts = 0;
    while placed < count && attempts < CLUTTER_ATTEMPTS_PER * count {
        attempts += 1;
        let row = rng.next_range(h as u64) as f64;
        let col = rng.next_range(w as u64) as f64;
        let (dr, dc) = direction(rng.next_f64());
        let half = CLUTTER_LEN as f64 / 2.0;
        let ends = [
            ((row - dr * half).round() as i64, (col - dc * half).round() as i64),
            ((row + dr * half).round() as i64, (col + dc * half).round() as i64),
        ];
        if ends
            .iter()
            .any(|&(r, c)| r < 0 || c < 0 || r >= h as i64 || c >= w as i64)
        {
            continue;
        }
        let a = PixelCoord::new(ends[0].0 as usize, ends[0].1 as usize);
        let b = PixelCoord::new(ends[1].0 as usize, ends[1].1 as usize);
        if a == b {
            continue;
        }
        let stroke = rasterize_segment(a, b);
        if stroke.iter().any(|q| blocked.get(*q)) {
            continue;
        }
        for &q in &stroke {
            map.set(q, CLUTTER_VALUE);
            for n in Window::centered(q, CLUTTER_CLEARANCE, w, h).iter() {
                blocked.set(n, true);
            }
        }
        placed += 1;
    }
}
