//! Iterative delineation: growing a network graph by walking a connectivity
//! oracle over a probability map.
//!
//! The tracer keeps an exploration bag of candidate patch centers and a
//! visited set. Each iteration pops the most confident candidate (FIFO among
//! ties), links it to the center that proposed it with a shortest path over
//! the probability map, and expands it through the oracle. Detections that
//! land next to already-visited territory are not re-queued: if the nearby
//! visited point is the proposing center itself the detection is looking
//! backward and is dropped, otherwise the detection is connected to the
//! nearest visited point, closing loops without re-exploration. When the bag
//! runs dry the tracer restarts at the strongest unexplored map location
//! that is both confident enough and far enough from everything visited, so
//! disconnected components are still found.
//!
//! The walk is fully deterministic: bag ties fall back to insertion order,
//! and every geometric tie-break is row-major.

use std::cmp::Ordering;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::{NetworkGraph, Polyline};
use crate::oracle::ConnectivityOracle;
use crate::raster::{PixelCoord, ProbabilityMap, Window};
use crate::util::TotalF64;
use crate::{Error, Result};

/// Additive smoothing of the link cost so zero-probability pixels stay
/// traversable at finite cost.
pub const LINK_EPSILON: f64 = 1e-3;

/// Callback invoked after every tracer iteration with the step count and the
/// graph assembled so far.
pub type TraceObserver<'a> = &'a mut dyn FnMut(usize, &NetworkGraph);

/// Tracer parameters. Distances are in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelineationConfig {
    /// Detections below this confidence are discarded at expansion time.
    pub tau_conf: f64,
    /// Chebyshev radius of the visited-suppression neighborhood.
    pub r_nbhd: usize,
    /// Minimum map value for a restart location.
    pub tau_restart: f64,
    /// Minimum Euclidean distance from a restart location to every visited
    /// point (strict).
    pub d_restart: f64,
    /// Hard budget on bag pops; exceeding it aborts the trace.
    pub max_steps: usize,
}

impl DelineationConfig {
    /// Defaults for a `width x height` map traced with patch side `k`:
    /// `tau_conf` 0.5, `r_nbhd` 5, `tau_restart` 0.75, `d_restart = k`, and
    /// `max_steps = 4 * width * height / r_nbhd`.
    pub fn for_map(width: usize, height: usize, k: usize) -> Self {
        let r_nbhd = 5;
        Self {
            tau_conf: 0.5,
            r_nbhd,
            tau_restart: 0.75,
            d_restart: k as f64,
            max_steps: 4 * width * height / r_nbhd,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau_conf", self.tau_conf), ("tau_restart", self.tau_restart)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be in [0,1], got {v}")));
            }
        }
        if self.r_nbhd == 0 {
            return Err(Error::Config("r_nbhd must be positive".into()));
        }
        if self.d_restart.is_nan() || self.d_restart < 0.0 {
            return Err(Error::Config(format!(
                "d_restart must be non-negative, got {}",
                self.d_restart
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// A candidate patch center waiting in the exploration bag.
#[derive(Clone, Copy, Debug)]
pub struct BagEntry {
    pub location: PixelCoord,
    pub confidence: f64,
    /// The visited center whose expansion proposed this candidate.
    pub precedent: PixelCoord,
    /// Monotone insertion counter; the FIFO tie-break among equal
    /// confidences.
    pub insertion: u64,
}

impl PartialEq for BagEntry {
    fn eq(&self, other: &Self) -> bool {
        self.insertion == other.insertion
    }
}
impl Eq for BagEntry {}

impl PartialOrd for BagEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BagEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap: higher confidence first, then lower insertion index.
        self.confidence
            .total_cmp(&other.confidence)
            .then_with(|| other.insertion.cmp(&self.insertion))
    }
}

/// The exploration bag: a max-heap by confidence with FIFO tie-breaking.
#[derive(Default)]
pub struct ExplorationBag {
    heap: BinaryHeap<BagEntry>,
    next_insertion: u64,
}

impl ExplorationBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, location: PixelCoord, confidence: f64, precedent: PixelCoord) {
        let insertion = self.next_insertion;
        self.next_insertion += 1;
        self.heap.push(BagEntry {
            location,
            confidence,
            precedent,
            insertion,
        });
    }

    pub fn pop(&mut self) -> Option<BagEntry> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

/// Summary counters of a completed (or aborted) trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    /// Bag pops consumed.
    pub steps: usize,
    /// Starts after the first (bag-empty re-seeds).
    pub restarts: usize,
    /// Distinct visited patch centers.
    pub visited: usize,
    /// Edges in the traced graph.
    pub edges: usize,
    /// High-water mark of the bag size.
    pub bag_peak: usize,
}

/// Selects a start location.
///
/// The first call (`first = true`) returns the global maximum of the map
/// (row-major first among ties) unconditionally. Subsequent calls consider
/// only pixels with value `>= tau_restart` strictly farther than `d_restart`
/// (Euclidean) from every visited point, again picking the row-major first
/// maximum; `None` when no pixel qualifies.
pub fn select_start(
    map: &ProbabilityMap,
    visited: &[PixelCoord],
    first: bool,
    cfg: &DelineationConfig,
) -> Option<PixelCoord> {
    let d2_min = cfg.d_restart * cfg.d_restart;
    let mut best: Option<(f64, PixelCoord)> = None;
    for p in map.pixels() {
        let v = map.get(p);
        if let Some((bv, _)) = best {
            if v <= bv {
                continue; // strict improvement keeps the row-major first max
            }
        }
        if !first {
            if v < cfg.tau_restart {
                continue;
            }
            if visited.iter().any(|q| (p.dist2(q) as f64) <= d2_min) {
                continue;
            }
        }
        best = Some((v, p));
    }
    best.map(|(_, p)| p)
}

/// Shortest 8-connected pixel path from `a` to `b` inside `window`, where
/// stepping onto pixel `q` costs `step_length * (1 - p(q) + LINK_EPSILON)`
/// (step length 1 or sqrt(2)). Ties expand the lower (row, col) first, so the
/// result is deterministic. Both endpoints must lie inside the window.
pub fn link_shortest_path(
    map: &ProbabilityMap,
    a: PixelCoord,
    b: PixelCoord,
    window: Window,
) -> Result<Polyline> {
    for p in [a, b] {
        if !window.contains(p) {
            return Err(Error::OutsideWindow { row: p.row, col: p.col });
        }
    }
    if a == b {
        return Ok(vec![a]);
    }
    let (w, h) = (window.width(), window.height());
    let local = |p: PixelCoord| (p.row - window.row0) * w + (p.col - window.col0);
    let coord = |i: usize| PixelCoord::new(window.row0 + i / w, window.col0 + i % w);
    let mut dist = vec![f64::INFINITY; w * h];
    let mut prev = vec![usize::MAX; w * h];
    let mut heap: BinaryHeap<Reverse<(TotalF64, usize)>> = BinaryHeap::new();
    let (ia, ib) = (local(a), local(b));
    dist[ia] = 0.0;
    heap.push(Reverse((TotalF64(0.0), ia)));
    const SQRT2: f64 = std::f64::consts::SQRT_2;
    while let Some(Reverse((TotalF64(d), i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        if i == ib {
            break;
        }
        let p = coord(i);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (r, c) = (p.row as i64 + dr, p.col as i64 + dc);
                if r < 0 || c < 0 {
                    continue;
                }
                let q = PixelCoord::new(r as usize, c as usize);
                if !window.contains(q) {
                    continue;
                }
                let step = if dr != 0 && dc != 0 { SQRT2 } else { 1.0 };
                let cost = step * (1.0 - map.get(q) + LINK_EPSILON);
                let nd = d + cost;
                let j = local(q);
                if nd < dist[j] {
                    dist[j] = nd;
                    prev[j] = i;
                    heap.push(Reverse((TotalF64(nd), j)));
                }
            }
        }
    }
    debug_assert!(dist[ib].is_finite(), "a window is always connected");
    let mut path = vec![b];
    let mut cur = ib;
    while cur != ia {
        cur = prev[cur];
        path.push(coord(cur));
    }
    path.reverse();
    Ok(path)
}

struct Engine<'a> {
    map: &'a ProbabilityMap,
    oracle: &'a dyn ConnectivityOracle,
    cfg: &'a DelineationConfig,
    bag: ExplorationBag,
    visited_mask: Vec<bool>,
    visited: Vec<PixelCoord>,
    edges: Vec<Polyline>,
    linked_pairs: BTreeSet<(PixelCoord, PixelCoord)>,
    steps: usize,
    starts: usize,
    bag_peak: usize,
}

impl<'a> Engine<'a> {
    fn is_visited(&self, p: PixelCoord) -> bool {
        self.visited_mask[p.row * self.map.width() + p.col]
    }

    fn visit(&mut self, p: PixelCoord) {
        debug_assert!(!self.is_visited(p));
        self.visited_mask[p.row * self.map.width() + p.col] = true;
        self.visited.push(p);
    }

    /// Connects `a` and `b` with a map shortest path unless that pair is
    /// already linked. The link window is the bounding box of the endpoints
    /// dilated by the patch radius.
    fn link(&mut self, a: PixelCoord, b: PixelCoord) -> Result<()> {
        if a == b {
            return Ok(());
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if !self.linked_pairs.insert(key) {
            return Ok(());
        }
        let window = Window::bounding(
            a,
            b,
            self.oracle.config().patch_radius(),
            self.map.width(),
            self.map.height(),
        );
        let path = link_shortest_path(self.map, a, b, window)?;
        self.edges.push(path);
        Ok(())
    }

    /// Runs the oracle at `center` and pushes, links, or drops each
    /// detection. `precedent` is the visited point whose expansion proposed
    /// `center` (none for a start point).
    ///
    /// A detection near the precedent points back where the trace came from
    /// and is discarded. A detection near any other visited point marks two
    /// explorations meeting: it snaps to that point, which is linked to
    /// `center` without re-expansion. Everything else enters the bag.
    fn expand(&mut self, center: PixelCoord, precedent: Option<PixelCoord>) -> Result<()> {
        let detections = self.oracle.predict(center)?;
        for det in detections {
            if det.confidence < self.cfg.tau_conf {
                continue;
            }
            let nbhd = Window::centered(
                det.location,
                self.cfg.r_nbhd,
                self.map.width(),
                self.map.height(),
            );
            let mut precedent_near = false;
            let mut nearest: Option<(u64, PixelCoord)> = None;
            for q in nbhd.iter() {
                if !self.is_visited(q) {
                    continue;
                }
                if Some(q) == precedent {
                    precedent_near = true;
                    break;
                }
                let key = (det.location.dist2(&q), q);
                if nearest.is_none() || key < nearest.unwrap() {
                    nearest = Some(key);
                }
            }
            if precedent_near {
                continue;
            }
            if let Some((_, q)) = nearest {
                self.link(center, q)?;
                continue;
            }
            self.bag.push(det.location, det.confidence, center);
        }
        self.bag_peak = self.bag_peak.max(self.bag.len());
        Ok(())
    }

    fn report(&self) -> TraceReport {
        TraceReport {
            steps: self.steps,
            restarts: self.starts.saturating_sub(1),
            visited: self.visited.len(),
            edges: self.edges.len(),
            bag_peak: self.bag_peak,
        }
    }

    fn build_graph(&self) -> NetworkGraph {
        let mut graph = NetworkGraph::new(self.map.width(), self.map.height());
        for &p in &self.visited {
            graph.add_node(p).expect("visited points are in bounds");
        }
        for edge in &self.edges {
            graph
                .add_edge(edge.clone())
                .expect("link paths are valid polylines");
        }
        graph
    }

    fn run(&mut self, mut observer: Option<TraceObserver>) -> Result<()> {
        loop {
            if self.bag.is_empty() {
                let start = select_start(self.map, &self.visited, self.starts == 0, self.cfg);
                let Some(start) = start else {
                    return Ok(());
                };
                self.starts += 1;
                self.visit(start);
                self.expand(start, None)?;
            } else {
                if self.steps >= self.cfg.max_steps {
                    return Err(Error::MaxSteps {
                        max_steps: self.cfg.max_steps,
                        partial: Box::new((self.build_graph(), self.report())),
                    });
                }
                let entry = self.bag.pop().expect("bag checked non-empty");
                self.steps += 1;
                if self.is_visited(entry.location) {
                    // Another expansion got here first: close the loop but do
                    // not re-expand.
                    self.link(entry.location, entry.precedent)?;
                } else {
                    self.visit(entry.location);
                    self.link(entry.location, entry.precedent)?;
                    self.expand(entry.location, Some(entry.precedent))?;
                }
            }
            if let Some(obs) = observer.as_deref_mut() {
                obs(self.steps, &self.build_graph());
            }
        }
    }
}

/// Traces `map` with `oracle`, returning the delineated graph.
pub fn delineate(
    map: &ProbabilityMap,
    oracle: &dyn ConnectivityOracle,
    cfg: &DelineationConfig,
) -> Result<NetworkGraph> {
    delineate_observed(map, oracle, cfg, None).map(|(g, _)| g)
}

/// Traces `map` with `oracle`, returning the graph and its report.
pub fn delineate_with_report(
    map: &ProbabilityMap,
    oracle: &dyn ConnectivityOracle,
    cfg: &DelineationConfig,
) -> Result<(NetworkGraph, TraceReport)> {
    delineate_observed(map, oracle, cfg, None)
}

/// Full-control variant: `observer` (if provided) is invoked after every
/// iteration with the pop count so far and a snapshot of the graph built so
/// far. On step-budget exhaustion the error carries the partial graph and
/// report.
pub fn delineate_observed(
    map: &ProbabilityMap,
    oracle: &dyn ConnectivityOracle,
    cfg: &DelineationConfig,
    observer: Option<TraceObserver>,
) -> Result<(NetworkGraph, TraceReport)> {
    cfg.validate()?;
    oracle.config().validate()?;
    let mut engine = Engine {
        map,
        oracle,
        cfg,
        bag: ExplorationBag::new(),
        visited_mask: vec![false; map.width() * map.height()],
        visited: Vec::new(),
        edges: Vec::new(),
        linked_pairs: BTreeSet::new(),
        steps: 0,
        starts: 0,
        bag_peak: 0,
    };
    engine.run(observer)?;
    Ok((engine.build_graph(), engine.report()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{GroundTruthOracle, OracleConfig};
    use crate::raster::BinaryMask;

    // Border radius 6 > r_nbhd 5: detections clear their proposer's
    // suppression neighborhood, as with the full-size defaults.
    fn small_oracle_cfg() -> OracleConfig {
        OracleConfig {
            k: 15,
            s: 13,
            tau_occupancy: 0.5,
        }
    }

    #[test]
    fn bag_pops_by_confidence_then_fifo() {
        let mut bag = ExplorationBag::new();
        let p = PixelCoord::new(0, 0);
        bag.push(PixelCoord::new(0, 1), 0.5, p);
        bag.push(PixelCoord::new(0, 2), 0.9, p);
        bag.push(PixelCoord::new(0, 3), 0.5, p);
        bag.push(PixelCoord::new(0, 4), 0.7, p);
        let order: Vec<_> = std::iter::from_fn(|| bag.pop())
            .map(|e| e.location.col)
            .collect();
        assert_eq!(order, vec![2, 4, 1, 3]);
    }

    #[test]
    fn bag_is_fifo_among_equal_confidences() {
        let mut bag = ExplorationBag::new();
        let p = PixelCoord::new(0, 0);
        for col in 0..5 {
            bag.push(PixelCoord::new(1, col), 0.8, p);
        }
        let order: Vec<_> = std::iter::from_fn(|| bag.pop())
            .map(|e| e.location.col)
            .collect();
        assert_eq!(order, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn first_start_is_global_argmax_row_major() {
        let mut map = ProbabilityMap::new(5, 4);
        map.set(PixelCoord::new(2, 3), 0.9);
        map.set(PixelCoord::new(1, 1), 0.9);
        let cfg = DelineationConfig::for_map(5, 4, 9);
        let start = select_start(&map, &[], true, &cfg).unwrap();
        assert_eq!(start, PixelCoord::new(1, 1));
        // All-zero map still yields the row-major first pixel.
        let zero = ProbabilityMap::new(3, 3);
        assert_eq!(
            select_start(&zero, &[], true, &cfg).unwrap(),
            PixelCoord::new(0, 0)
        );
    }

    #[test]
    fn restart_requires_confidence_and_distance() {
        let mut map = ProbabilityMap::new(40, 8);
        map.set(PixelCoord::new(4, 2), 0.95);
        map.set(PixelCoord::new(4, 30), 0.8);
        map.set(PixelCoord::new(4, 36), 0.7); // below tau_restart
        let cfg = DelineationConfig {
            tau_conf: 0.5,
            r_nbhd: 5,
            tau_restart: 0.75,
            d_restart: 10.0,
            max_steps: 100,
        };
        let visited = vec![PixelCoord::new(4, 2)];
        // (4,30) is 28 away from visited: eligible; (4,36) fails tau.
        let start = select_start(&map, &visited, false, &cfg).unwrap();
        assert_eq!(start, PixelCoord::new(4, 30));
        // Everything confident is now too close: no restart.
        let visited = vec![PixelCoord::new(4, 2), PixelCoord::new(4, 28)];
        assert_eq!(select_start(&map, &visited, false, &cfg), None);
        // Distance is strict: exactly d_restart away does not qualify.
        let visited = vec![PixelCoord::new(4, 2), PixelCoord::new(4, 20)];
        assert_eq!(select_start(&map, &visited, false, &cfg), None);
    }

    #[test]
    fn link_prefers_high_probability_corridor() {
        // An L-shaped bright corridor against a dim diagonal shortcut.
        let mut map = ProbabilityMap::new(7, 7);
        for c in 0..7 {
            map.set(PixelCoord::new(0, c), 0.9);
        }
        for r in 0..7 {
            map.set(PixelCoord::new(r, 6), 0.9);
        }
        for i in 1..6 {
            map.set(PixelCoord::new(i, i), 0.1);
        }
        let window = Window {
            row0: 0,
            row1: 6,
            col0: 0,
            col1: 6,
        };
        let path =
            link_shortest_path(&map, PixelCoord::new(0, 0), PixelCoord::new(6, 6), window)
                .unwrap();
        // Follows the bright L but cuts its corner: (0,5) -> (1,6) costs
        // sqrt(2)*0.1 versus 2*0.1 through (0,6).
        let expected: Vec<_> = (1..=5)
            .map(|c| PixelCoord::new(0, c))
            .chain((1..=6).map(|r| PixelCoord::new(r, 6)))
            .collect();
        assert_eq!(path[0], PixelCoord::new(0, 0));
        assert_eq!(path[1..], expected[..]);
    }

    #[test]
    fn link_on_uniform_map_is_straight() {
        let map = ProbabilityMap::from_vec(5, 5, vec![0.5; 25]);
        let window = Window {
            row0: 0,
            row1: 4,
            col0: 0,
            col1: 4,
        };
        let path =
            link_shortest_path(&map, PixelCoord::new(0, 0), PixelCoord::new(0, 4), window)
                .unwrap();
        assert_eq!(
            path,
            (0..=4).map(|c| PixelCoord::new(0, c)).collect::<Vec<_>>()
        );
        // Cost of the optimum: 4 unit steps of (1 - 0.5 + eps).
        let cost: f64 = path[1..]
            .iter()
            .map(|q| 1.0 * (1.0 - map.get(*q) + LINK_EPSILON))
            .sum();
        assert!((cost - 4.0 * (0.5 + LINK_EPSILON)).abs() < 1e-12);
    }

    #[test]
    fn link_rejects_endpoints_outside_window() {
        let map = ProbabilityMap::new(10, 10);
        let window = Window {
            row0: 0,
            row1: 4,
            col0: 0,
            col1: 4,
        };
        assert!(matches!(
            link_shortest_path(&map, PixelCoord::new(0, 0), PixelCoord::new(5, 5), window),
            Err(Error::OutsideWindow { row: 5, col: 5 })
        ));
    }

    #[test]
    fn traces_a_straight_line_fully() {
        let mut mask = BinaryMask::new(41, 9);
        for c in 0..41 {
            mask.set(PixelCoord::new(4, c), true);
        }
        let map = mask.to_probability_map();
        let oracle = GroundTruthOracle::new(mask.clone(), small_oracle_cfg()).unwrap();
        let cfg = DelineationConfig::for_map(41, 9, 15);
        let (graph, report) = delineate_with_report(&map, &oracle, &cfg).unwrap();
        assert_eq!(report.restarts, 0);
        // Border radius 6: centers advance 6 px per step from col 0 to 36.
        assert_eq!(report.visited, 7);
        assert_eq!(report.steps, 6);
        // The traced raster must stay on the line: links follow the
        // probability-1 corridor. The last 4 px tail is shorter than the
        // detection border and is expected to be missed.
        let raster = crate::graph::graph_to_raster(&graph).unwrap();
        for p in raster.iter_true() {
            assert_eq!(p.row, 4);
        }
        assert_eq!(raster.count_ones(), 37);
    }

    #[test]
    fn max_steps_aborts_with_partial_graph() {
        let mut mask = BinaryMask::new(41, 9);
        for c in 0..41 {
            mask.set(PixelCoord::new(4, c), true);
        }
        let map = mask.to_probability_map();
        let oracle = GroundTruthOracle::new(mask, small_oracle_cfg()).unwrap();
        let cfg = DelineationConfig {
            max_steps: 2,
            ..DelineationConfig::for_map(41, 9, 15)
        };
        let err = delineate(&map, &oracle, &cfg).unwrap_err();
        match err {
            Error::MaxSteps { max_steps, partial } => {
                assert_eq!(max_steps, 2);
                let (graph, report) = *partial;
                assert_eq!(report.steps, 2);
                assert!(graph.node_count() >= 1);
            }
            other => panic!("expected MaxSteps, got {other:?}"),
        }
    }

    #[test]
    fn determinism_same_inputs_same_trace() {
        let mut mask = BinaryMask::new(31, 31);
        for c in 0..31 {
            mask.set(PixelCoord::new(15, c), true);
        }
        for r in 15..31 {
            mask.set(PixelCoord::new(r, 15), true);
        }
        let map = mask.to_probability_map();
        let oracle = GroundTruthOracle::new(mask, small_oracle_cfg()).unwrap();
        let cfg = DelineationConfig::for_map(31, 31, 15);
        let (g1, r1) = delineate_with_report(&map, &oracle, &cfg).unwrap();
        let (g2, r2) = delineate_with_report(&map, &oracle, &cfg).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(r1, r2);
        assert_eq!(g1.to_json_string(), g2.to_json_string());
    }
}
