//! Polyline network graphs and conversions to and from rasters.
//!
//! A [`NetworkGraph`] is a multigraph embedded in a pixel grid: nodes are
//! pixel locations, edges are polylines whose first and last points are
//! nodes. Intermediate polyline points are geometry, not nodes. Cycles are
//! representable as edges whose endpoints coincide (with at least one
//! intermediate point); zero-length two-point self-loops are rejected.

mod paths;
mod segments;
mod vectorize;

pub use paths::{graph_shortest_path, nearest_graph_point};
pub use segments::{extract_segments, Segment};
pub use vectorize::raster_to_graph;

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::pgm::atomic_write;
use crate::raster::{rasterize_segment, BinaryMask, PixelCoord};
use crate::{Error, Result};

/// An ordered list of pixel locations; edges store their geometry this way.
pub type Polyline = Vec<PixelCoord>;

/// A network graph embedded in a `width x height` pixel grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkGraph {
    width: usize,
    height: usize,
    nodes: BTreeSet<PixelCoord>,
    edges: Vec<Polyline>,
}

/// Serialized form: `{"width", "height", "nodes": [[r,c],..], "edges":
/// [{"points": [[r,c],..]},..]}` with nodes sorted row-major.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    width: usize,
    height: usize,
    nodes: Vec<PixelCoord>,
    edges: Vec<EdgeRec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRec {
    points: Vec<PixelCoord>,
}

impl NetworkGraph {
    /// An empty graph over a grid. Panics if either dimension is zero.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "graph dimensions must be positive");
        Self {
            width,
            height,
            nodes: BTreeSet::new(),
            edges: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Nodes in row-major order.
    pub fn nodes(&self) -> impl Iterator<Item = PixelCoord> + '_ {
        self.nodes.iter().copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn has_node(&self, p: PixelCoord) -> bool {
        self.nodes.contains(&p)
    }

    /// Edge polylines in insertion order.
    pub fn edges(&self) -> &[Polyline] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// True when the graph has neither nodes nor edges.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    fn check_bounds(&self, p: PixelCoord, what: &'static str) -> Result<()> {
        if p.row < self.height && p.col < self.width {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                what,
                row: p.row,
                col: p.col,
                width: self.width,
                height: self.height,
            })
        }
    }

    /// Registers an isolated node.
    pub fn add_node(&mut self, p: PixelCoord) -> Result<()> {
        self.check_bounds(p, "node")?;
        self.nodes.insert(p);
        Ok(())
    }

    /// Appends an edge polyline, registering its endpoints as nodes.
    ///
    /// The polyline must have at least two points, all in bounds. A cycle
    /// (first point equals last) requires at least one intermediate point;
    /// a two-point edge with identical endpoints is rejected.
    pub fn add_edge(&mut self, polyline: Polyline) -> Result<()> {
        if polyline.len() < 2 {
            return Err(Error::GraphFormat(format!(
                "edge needs at least 2 points, got {}",
                polyline.len()
            )));
        }
        if polyline.len() == 2 && polyline[0] == polyline[1] {
            return Err(Error::GraphFormat(
                "zero-length self-loop edge is not allowed".into(),
            ));
        }
        for &p in &polyline {
            self.check_bounds(p, "edge point")?;
        }
        self.nodes.insert(polyline[0]);
        self.nodes.insert(*polyline.last().unwrap());
        self.edges.push(polyline);
        Ok(())
    }

    /// Sum of the Euclidean lengths of all edge polylines.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| polyline_length(e)).sum()
    }

    /// Serializes to the canonical single-line JSON form (trailing newline).
    pub fn to_json_string(&self) -> String {
        let file = GraphFile {
            width: self.width,
            height: self.height,
            nodes: self.nodes.iter().copied().collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRec { points: e.clone() })
                .collect(),
        };
        let mut s = serde_json::to_string(&file).expect("graph serialization cannot fail");
        s.push('\n');
        s
    }

    /// Parses and validates the JSON form.
    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(json)?;
        if file.width == 0 || file.height == 0 {
            return Err(Error::GraphFormat(format!(
                "degenerate dimensions {}x{}",
                file.width, file.height
            )));
        }
        let mut graph = NetworkGraph::new(file.width, file.height);
        for node in file.nodes {
            graph
                .add_node(node)
                .map_err(|e| Error::GraphFormat(e.to_string()))?;
        }
        for (i, edge) in file.edges.into_iter().enumerate() {
            graph
                .add_edge(edge.points)
                .map_err(|e| Error::GraphFormat(format!("edge {i}: {e}")))?;
        }
        Ok(graph)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(atomic_write(path, self.to_json_string().as_bytes())?)
    }

    /// Splits the graph into its connected components (judged by shared edge
    /// endpoints; intermediate polyline crossings do not connect). Isolated
    /// nodes form their own single-node components. Components are ordered by
    /// their row-major-smallest node.
    pub fn split_components(&self) -> Vec<NetworkGraph> {
        use std::collections::BTreeMap;
        let mut parent: BTreeMap<PixelCoord, PixelCoord> =
            self.nodes.iter().map(|&n| (n, n)).collect();
        fn find(parent: &mut BTreeMap<PixelCoord, PixelCoord>, x: PixelCoord) -> PixelCoord {
            let mut root = x;
            while parent[&root] != root {
                root = parent[&root];
            }
            let mut cur = x;
            while parent[&cur] != root {
                let next = parent[&cur];
                parent.insert(cur, root);
                cur = next;
            }
            root
        }
        for e in &self.edges {
            let (a, b) = (e[0], *e.last().unwrap());
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                // Deterministic union: the smaller root wins.
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent.insert(hi, lo);
            }
        }
        let mut by_root: BTreeMap<PixelCoord, NetworkGraph> = BTreeMap::new();
        for &n in &self.nodes {
            let root = find(&mut parent, n);
            by_root
                .entry(root)
                .or_insert_with(|| NetworkGraph::new(self.width, self.height))
                .add_node(n)
                .expect("node was validated at insertion");
        }
        for e in &self.edges {
            let root = find(&mut parent, e[0]);
            by_root
                .get_mut(&root)
                .expect("edge endpoint must be a known node")
                .add_edge(e.clone())
                .expect("edge was validated at insertion");
        }
        by_root.into_values().collect()
    }
}

/// Euclidean length of a polyline (sum over consecutive point pairs).
pub fn polyline_length(polyline: &[PixelCoord]) -> f64 {
    polyline.windows(2).map(|w| w[0].euclid(&w[1])).sum()
}

/// Draws every edge polyline into a fresh mask: the union of Bresenham
/// rasterizations of each consecutive point pair. Isolated nodes are not
/// drawn. Fails identifying the offending edge if a point is out of bounds
/// (possible only for hand-built inputs).
pub fn graph_to_raster(graph: &NetworkGraph) -> Result<BinaryMask> {
    let mut mask = BinaryMask::new(graph.width(), graph.height());
    for (i, edge) in graph.edges().iter().enumerate() {
        for pair in edge.windows(2) {
            for p in rasterize_segment(pair[0], pair[1]) {
                if !mask.in_bounds(p) {
                    return Err(Error::EdgeOutOfBounds {
                        edge: i,
                        row: p.row,
                        col: p.col,
                        width: graph.width(),
                        height: graph.height(),
                    });
                }
                mask.set(p, true);
            }
        }
    }
    Ok(mask)
}
