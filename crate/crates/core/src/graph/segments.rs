//! Decomposition of a graph into evaluation segments.
//!
//! A segment is a maximal chain between structurally interesting nodes:
//! junctions (graph degree >= 3) and endpoints (degree 1). Nodes of degree 2
//! are passed through, so consecutive edges merge into one segment. A
//! component that is a pure cycle (every node degree 2) yields exactly one
//! segment that starts and ends at its row-major smallest node — without
//! this, a perfectly recovered isolated loop would contribute nothing to
//! connectivity scoring.

use std::collections::BTreeMap;

use super::{polyline_length, NetworkGraph, Polyline};
use crate::raster::PixelCoord;

/// A maximal chain of the graph between degree != 2 nodes (or around a pure
/// cycle). `path` runs from `a` to `b` and concatenates the underlying edge
/// polylines; `length` is its Euclidean length.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub a: PixelCoord,
    pub b: PixelCoord,
    pub path: Polyline,
    pub length: f64,
}

/// One end of an edge in the incidence index.
#[derive(Clone, Copy)]
struct Incidence {
    edge: usize,
    /// True when the node is the first point of the edge polyline.
    at_start: bool,
}

fn oriented(edge: &Polyline, from_start: bool) -> Polyline {
    if from_start {
        edge.to_vec()
    } else {
        let mut e = edge.to_vec();
        e.reverse();
        e
    }
}

/// Extracts all segments of `graph`, ordered deterministically: chains first
/// (discovered from row-major smallest start nodes, incident edges in
/// insertion order), then pure cycles by their smallest node. Isolated nodes
/// yield no segments; an edgeless graph yields an empty list.
pub fn extract_segments(graph: &NetworkGraph) -> Vec<Segment> {
    let mut incidences: BTreeMap<PixelCoord, Vec<Incidence>> = BTreeMap::new();
    for (i, edge) in graph.edges().iter().enumerate() {
        let (a, b) = (edge[0], *edge.last().unwrap());
        incidences.entry(a).or_default().push(Incidence {
            edge: i,
            at_start: true,
        });
        incidences.entry(b).or_default().push(Incidence {
            edge: i,
            at_start: false,
        });
    }
    let mut used = vec![false; graph.edge_count()];
    let mut segments = Vec::new();

    let follow = |start: PixelCoord,
                      inc: Incidence,
                      used: &mut Vec<bool>,
                      stop_at_degree2_start: bool| {
        let mut path = oriented(&graph.edges()[inc.edge], inc.at_start);
        used[inc.edge] = true;
        let mut cur = *path.last().unwrap();
        // Pass through degree-2 nodes, appending their other edge.
        while cur != start || !stop_at_degree2_start {
            let incs = match incidences.get(&cur) {
                Some(v) if v.len() == 2 => v,
                _ => break,
            };
            let Some(&next) = incs.iter().find(|i| !used[i.edge]) else {
                break;
            };
            let extension = oriented(&graph.edges()[next.edge], next.at_start);
            debug_assert_eq!(extension[0], cur);
            path.extend(extension.into_iter().skip(1));
            used[next.edge] = true;
            cur = *path.last().unwrap();
        }
        let length = polyline_length(&path);
        Segment {
            a: path[0],
            b: *path.last().unwrap(),
            path,
            length,
        }
    };

    // Chains: start from every junction or endpoint.
    for (&node, incs) in &incidences {
        if incs.len() == 2 {
            continue;
        }
        for &inc in incs {
            if !used[inc.edge] {
                segments.push(follow(node, inc, &mut used, false));
            }
        }
    }
    // Pure cycles: everything left has only degree-2 nodes.
    for (&node, incs) in &incidences {
        for &inc in incs {
            if !used[inc.edge] {
                segments.push(follow(node, inc, &mut used, true));
            }
        }
    }
    segments
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_line_is_one_segment() {
        let mut g = NetworkGraph::new(12, 4);
        g.add_edge(vec![PixelCoord::new(1, 1), PixelCoord::new(1, 10)])
            .unwrap();
        let segs = extract_segments(&g);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].a, PixelCoord::new(1, 1));
        assert_eq!(segs[0].b, PixelCoord::new(1, 10));
        assert!((segs[0].length - 9.0).abs() < 1e-12);
    }

    #[test]
    fn y_junction_gives_three_segments() {
        let mut g = NetworkGraph::new(10, 10);
        let j = PixelCoord::new(5, 5);
        g.add_edge(vec![PixelCoord::new(0, 5), j]).unwrap();
        g.add_edge(vec![j, PixelCoord::new(9, 1)]).unwrap();
        g.add_edge(vec![j, PixelCoord::new(9, 9)]).unwrap();
        let segs = extract_segments(&g);
        assert_eq!(segs.len(), 3);
        for s in &segs {
            assert!(s.a == j || s.b == j);
        }
    }

    #[test]
    fn degree_two_nodes_merge_into_one_segment() {
        // A path A - B - C where B has degree 2: one segment A..C.
        let mut g = NetworkGraph::new(20, 5);
        g.add_edge(vec![PixelCoord::new(2, 0), PixelCoord::new(2, 8)])
            .unwrap();
        g.add_edge(vec![PixelCoord::new(2, 8), PixelCoord::new(2, 17)])
            .unwrap();
        let segs = extract_segments(&g);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].a, PixelCoord::new(2, 0));
        assert_eq!(segs[0].b, PixelCoord::new(2, 17));
        assert_eq!(
            segs[0].path,
            vec![
                PixelCoord::new(2, 0),
                PixelCoord::new(2, 8),
                PixelCoord::new(2, 17),
            ]
        );
        assert!((segs[0].length - 17.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_yields_single_anchored_segment() {
        let mut g = NetworkGraph::new(10, 10);
        let anchor = PixelCoord::new(1, 1);
        g.add_edge(vec![
            anchor,
            PixelCoord::new(1, 5),
            PixelCoord::new(5, 5),
            PixelCoord::new(5, 1),
            anchor,
        ])
        .unwrap();
        let segs = extract_segments(&g);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].a, anchor);
        assert_eq!(segs[0].b, anchor);
        assert!((segs[0].length - 16.0).abs() < 1e-12);
    }

    #[test]
    fn multi_edge_cycle_of_degree_two_nodes() {
        // A square loop built from 4 edges; all nodes degree 2.
        let mut g = NetworkGraph::new(10, 10);
        let corners = [
            PixelCoord::new(1, 1),
            PixelCoord::new(1, 4),
            PixelCoord::new(4, 4),
            PixelCoord::new(4, 1),
        ];
        for i in 0..4 {
            g.add_edge(vec![corners[i], corners[(i + 1) % 4]]).unwrap();
        }
        let segs = extract_segments(&g);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].a, PixelCoord::new(1, 1));
        assert_eq!(segs[0].b, PixelCoord::new(1, 1));
        assert_eq!(segs[0].path.len(), 5);
        assert!((segs[0].length - 12.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_isolated_node_graphs_have_no_segments() {
        let mut g = NetworkGraph::new(4, 4);
        assert!(extract_segments(&g).is_empty());
        g.add_node(PixelCoord::new(2, 2)).unwrap();
        assert!(extract_segments(&g).is_empty());
    }
}
