//! Skeleton vectorization: converting a thin raster into a polyline graph.
//!
//! A skeleton pixel is classified by its crossing number: the count of
//! contiguous foreground runs in its 8-neighbor ring. Pixels with exactly two
//! runs lie on a chain; everything else (endpoints with one run, isolated
//! pixels with zero, junctions with three or more, and fully surrounded
//! pixels) is a node. Compared to raw neighbor counting, the run count does
//! not misclassify pixels that sit next to a junction: on a "+" of two
//! crossing lines, only the center and the four line ends are nodes.
//!
//! Chains are walked deterministically from every node and stitched into
//! polylines; each maximal chain becomes one edge. Chains that close on
//! themselves (isolated cycles) get an anchor node at their row-major
//! smallest pixel and become a single cycle edge. Thick (non-thin) input
//! degrades into many short edges between adjacent node pixels rather than
//! failing.

use std::collections::BTreeSet;

use super::{NetworkGraph, Polyline};
use crate::raster::thin::{ring_bits, ring_transitions, RING};
use crate::raster::{BinaryMask, PixelCoord};

fn ring_runs(bits: u8) -> u32 {
    if bits == 0xFF {
        1
    } else {
        ring_transitions(bits)
    }
}

fn neighbor_at(p: PixelCoord, ring_index: usize, width: usize, height: usize) -> Option<PixelCoord> {
    let (dr, dc) = RING[ring_index];
    let r = p.row as i64 + dr;
    let c = p.col as i64 + dc;
    (r >= 0 && c >= 0 && (r as usize) < height && (c as usize) < width)
        .then(|| PixelCoord::new(r as usize, c as usize))
}

/// Splits the ring bitmask into its contiguous runs of set bits, each run a
/// list of ring indices. Scanning starts after a clear bit so circular runs
/// are not split; the all-set ring is a single run.
fn ring_run_partition(bits: u8) -> Vec<Vec<usize>> {
    if bits == 0 {
        return Vec::new();
    }
    if bits == 0xFF {
        return vec![(0..8).collect()];
    }
    let start = (0..8).find(|i| bits & (1 << i) == 0).unwrap();
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for step in 1..=8 {
        let i = (start + step) % 8;
        if bits & (1 << i) != 0 {
            current.push(i);
        } else if !current.is_empty() {
            runs.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    runs
}

/// The representative pixel of a run: prefer 4-adjacent members (even ring
/// indices), then the smallest ring index.
fn run_representative(
    p: PixelCoord,
    run: &[usize],
    width: usize,
    height: usize,
) -> PixelCoord {
    let &best = run
        .iter()
        .min_by_key(|&&i| (i % 2, i))
        .expect("runs are never empty");
    neighbor_at(p, best, width, height).expect("run members are in bounds")
}

struct Tracer<'a> {
    mask: &'a BinaryMask,
    is_node: BinaryMask,
    consumed: BinaryMask,
    used_steps: BTreeSet<(PixelCoord, PixelCoord)>,
}

impl<'a> Tracer<'a> {
    fn step_used(&self, a: PixelCoord, b: PixelCoord) -> bool {
        self.used_steps.contains(&(a, b))
    }

    fn mark_step(&mut self, a: PixelCoord, b: PixelCoord) {
        self.used_steps.insert((a, b));
        self.used_steps.insert((b, a));
    }

    /// Walks a chain starting with the step `start -> first` until reaching a
    /// node (or, on degenerate thick input, an already-used step).
    fn walk(&mut self, start: PixelCoord, first: PixelCoord) -> Polyline {
        let (w, h) = (self.mask.width(), self.mask.height());
        let mut poly = vec![start];
        let mut prev = start;
        let mut cur = first;
        self.mark_step(prev, cur);
        loop {
            poly.push(cur);
            if self.is_node.get(cur) {
                return poly;
            }
            self.consumed.set(cur, true);
            let bits = ring_bits(self.mask, cur);
            debug_assert_eq!(ring_runs(bits), 2, "chain pixels have exactly two runs");
            let runs = ring_run_partition(bits);
            let prev_index = RING
                .iter()
                .position(|&(dr, dc)| {
                    cur.row as i64 + dr == prev.row as i64 && cur.col as i64 + dc == prev.col as i64
                })
                .expect("prev is adjacent to cur");
            let next_run = runs
                .iter()
                .find(|run| !run.contains(&prev_index))
                .unwrap_or(&runs[0]);
            let next = run_representative(cur, next_run, w, h);
            if self.step_used(cur, next) {
                // Only reachable on malformed thick input: stop rather than
                // loop, ending the edge at the current pixel.
                return poly;
            }
            self.mark_step(cur, next);
            prev = cur;
            cur = next;
        }
    }
}

/// Vectorizes a skeleton mask into a [`NetworkGraph`].
///
/// Nodes are skeleton pixels whose ring run count differs from 2 (junctions,
/// endpoints, isolated pixels) plus one anchor per isolated cycle; edges are
/// the maximal chains between nodes. Every skeleton pixel appears on exactly
/// one edge or is a node. Intended for thin input (e.g. [`crate::raster::skeletonize`]
/// output); thick input degrades gracefully into short edges.
pub fn raster_to_graph(mask: &BinaryMask) -> NetworkGraph {
    let (w, h) = (mask.width(), mask.height());
    let mut graph = NetworkGraph::new(w, h);
    let mut is_node = BinaryMask::new(w, h);
    let mut node_list: Vec<PixelCoord> = Vec::new();
    for p in mask.iter_true() {
        if ring_runs(ring_bits(mask, p)) != 2 {
            is_node.set(p, true);
            node_list.push(p);
        }
    }
    let mut tracer = Tracer {
        mask,
        is_node,
        consumed: BinaryMask::new(w, h),
        used_steps: BTreeSet::new(),
    };
    for &node in &node_list {
        graph.add_node(node).expect("mask pixels are in bounds");
        for i in 0..8 {
            let Some(nb) = neighbor_at(node, i, w, h) else {
                continue;
            };
            if !mask.get(nb) || tracer.step_used(node, nb) {
                continue;
            }
            let poly = tracer.walk(node, nb);
            graph.add_edge(poly).expect("walked polylines are valid");
        }
    }
    // Anything left unconsumed is on an isolated cycle: anchor the row-major
    // smallest pixel of each and trace around.
    for p in mask.iter_true() {
        if tracer.is_node.get(p) || tracer.consumed.get(p) {
            continue;
        }
        tracer.is_node.set(p, true);
        graph.add_node(p).expect("mask pixels are in bounds");
        let bits = ring_bits(mask, p);
        let runs = ring_run_partition(bits);
        let first = run_representative(p, &runs[0], w, h);
        if !tracer.step_used(p, first) {
            let poly = tracer.walk(p, first);
            graph.add_edge(poly).expect("walked polylines are valid");
        }
    }
    graph
}
