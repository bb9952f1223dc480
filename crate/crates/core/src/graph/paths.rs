//! Geometric queries over graph polylines: nearest point and shortest path.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use super::{NetworkGraph, Polyline};
use crate::raster::PixelCoord;
use crate::util::TotalF64;
use crate::{Error, Result};

/// The polyline point of `graph` nearest to `p` (Euclidean distance, ties
/// row-major). Only edge geometry counts; isolated nodes are not polyline
/// points. Fails with [`Error::EmptyGraph`] when the graph has no edges.
pub fn nearest_graph_point(graph: &NetworkGraph, p: PixelCoord) -> Result<PixelCoord> {
    let mut best: Option<(u64, PixelCoord)> = None;
    for edge in graph.edges() {
        for &q in edge {
            let key = (p.dist2(&q), q);
            if best.is_none() || key < best.unwrap() {
                best = Some(key);
            }
        }
    }
    best.map(|(_, q)| q).ok_or(Error::EmptyGraph)
}

/// Shortest path between two polyline points of `graph`, walking only along
/// edge polylines, with Euclidean step weights.
///
/// Returns `Ok(None)` when `a` and `b` lie in different components. Fails
/// with [`Error::NotOnGraph`] if either endpoint is not a polyline point.
/// Deterministic: the heap breaks cost ties row-major and neighbors relax in
/// sorted order.
pub fn graph_shortest_path(
    graph: &NetworkGraph,
    a: PixelCoord,
    b: PixelCoord,
) -> Result<Option<Polyline>> {
    let mut adjacency: BTreeMap<PixelCoord, BTreeSet<PixelCoord>> = BTreeMap::new();
    for edge in graph.edges() {
        for pair in edge.windows(2) {
            adjacency.entry(pair[0]).or_default().insert(pair[1]);
            adjacency.entry(pair[1]).or_default().insert(pair[0]);
        }
    }
    for p in [a, b] {
        if !adjacency.contains_key(&p) {
            return Err(Error::NotOnGraph { row: p.row, col: p.col });
        }
    }
    if a == b {
        return Ok(Some(vec![a]));
    }
    let mut dist: BTreeMap<PixelCoord, f64> = BTreeMap::new();
    let mut prev: BTreeMap<PixelCoord, PixelCoord> = BTreeMap::new();
    let mut heap: BinaryHeap<Reverse<(TotalF64, PixelCoord)>> = BinaryHeap::new();
    dist.insert(a, 0.0);
    heap.push(Reverse((TotalF64(0.0), a)));
    while let Some(Reverse((TotalF64(d), p))) = heap.pop() {
        if d > dist[&p] {
            continue; // stale entry
        }
        if p == b {
            break;
        }
        if let Some(neighbors) = adjacency.get(&p) {
            for &q in neighbors {
                let nd = d + p.euclid(&q);
                if dist.get(&q).is_none_or(|&old| nd < old) {
                    dist.insert(q, nd);
                    prev.insert(q, p);
                    heap.push(Reverse((TotalF64(nd), q)));
                }
            }
        }
    }
    if !prev.contains_key(&b) {
        return Ok(None);
    }
    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = prev[&cur];
        path.push(cur);
    }
    path.reverse();
    Ok(Some(path))
}
