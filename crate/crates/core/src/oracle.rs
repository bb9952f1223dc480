//! Patch-level connectivity oracles.
//!
//! Given a patch center, an oracle answers: at which pixels of the patch
//! border does the structure *through the center* leave the patch? The patch
//! is a `k x k` window; detections are reported on the perimeter of the
//! inner `s x s` square (Chebyshev distance `(s-1)/2` from the center) so
//! that a detection is never flush against the patch edge. Where the square
//! runs off the image, the clipped rectangle's perimeter is used instead, so
//! structure that terminates against the image border is still detected
//! right up to its tip. Only pixels 8-connected to the center within the
//! patch count — parallel structures crossing the patch are excluded by
//! construction.
//!
//! Two backends implement the same interface: [`GroundTruthOracle`] reads a
//! ground-truth skeleton (perfect answers for experiments and training-data
//! export), [`ProbabilityMapOracle`] thresholds the probability map under
//! evaluation (a stand-in for a learned predictor with no training step).

use crate::raster::{BinaryMask, BorderDetection, PixelCoord, ProbabilityMap, Window};
use crate::{Error, Result};

/// Patch geometry and occupancy threshold shared by all oracles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    /// Patch side length (odd).
    pub k: usize,
    /// Detection border side length (odd, `3 <= s < k`).
    pub s: usize,
    /// Probability threshold above which a pixel counts as structure for
    /// map-backed oracles.
    pub tau_occupancy: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            k: 33,
            s: 29,
            tau_occupancy: 0.5,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k.is_multiple_of(2) {
            return Err(Error::Config(format!("k must be odd, got {}", self.k)));
        }
        if self.s.is_multiple_of(2) {
            return Err(Error::Config(format!("s must be odd, got {}", self.s)));
        }
        if self.s < 3 {
            return Err(Error::Config(format!("s must be at least 3, got {}", self.s)));
        }
        if self.s >= self.k {
            return Err(Error::Config(format!(
                "s must be smaller than k, got s={} k={}",
                self.s, self.k
            )));
        }
        if !(0.0..=1.0).contains(&self.tau_occupancy) {
            return Err(Error::Config(format!(
                "tau_occupancy must be in [0,1], got {}",
                self.tau_occupancy
            )));
        }
        Ok(())
    }

    /// Chebyshev radius of the detection border: `(s-1)/2`.
    pub fn border_radius(&self) -> usize {
        (self.s - 1) / 2
    }

    /// Chebyshev radius of the patch: `(k-1)/2`.
    pub fn patch_radius(&self) -> usize {
        (self.k - 1) / 2
    }
}

/// A connectivity predictor queried one patch center at a time.
///
/// Implementations must be deterministic and return detections in row-major
/// location order with confidences in `[0, 1]`.
pub trait ConnectivityOracle {
    fn predict(&self, center: PixelCoord) -> Result<Vec<BorderDetection>>;
    fn config(&self) -> &OracleConfig;
}

/// Core patch query over an arbitrary foreground predicate.
///
/// Snaps the center to the nearest foreground pixel within Chebyshev
/// distance 2 (ties: smaller squared distance, then row-major), flood-fills
/// the foreground 8-connected to the snapped pixel inside the clipped patch
/// window, and returns the component's pixels on the perimeter of the
/// clipped detection square (the center itself excluded) in row-major
/// order. `None` when there is no foreground near the center.
fn border_exits<F: Fn(PixelCoord) -> bool>(
    is_fg: F,
    width: usize,
    height: usize,
    center: PixelCoord,
    cfg: &OracleConfig,
) -> Option<Vec<PixelCoord>> {
    let snap_window = Window::centered(center, 2, width, height);
    let seed = snap_window
        .iter()
        .filter(|&q| is_fg(q))
        .min_by_key(|q| (center.dist2(q), *q))?;
    let patch = Window::centered(center, cfg.patch_radius(), width, height);
    debug_assert!(patch.contains(seed));
    let local = |p: PixelCoord| (p.row - patch.row0) * patch.width() + (p.col - patch.col0);
    let mut in_component = vec![false; patch.width() * patch.height()];
    in_component[local(seed)] = true;
    let mut queue = std::collections::VecDeque::from([seed]);
    while let Some(p) = queue.pop_front() {
        let nbhd = Window::centered(p, 1, width, height);
        for q in nbhd.iter() {
            if q == p || !patch.contains(q) || in_component[local(q)] || !is_fg(q) {
                continue;
            }
            in_component[local(q)] = true;
            queue.push_back(q);
        }
    }
    let square = Window::centered(center, cfg.border_radius(), width, height);
    Some(
        patch
            .iter()
            .filter(|&q| {
                in_component[local(q)]
                    && q != center
                    && square.contains(q)
                    && (q.row == square.row0
                        || q.row == square.row1
                        || q.col == square.col0
                        || q.col == square.col1)
            })
            .collect(),
    )
}

/// Ground-truth border exits for a patch centered at `center` over a thinned
/// skeleton mask.
///
/// Fails with [`Error::CenterOffStructure`] when no skeleton pixel lies
/// within Chebyshev distance 2 of the center, and with
/// [`Error::OutOfBounds`] for centers outside the mask.
pub fn patch_ground_truth(
    skeleton: &BinaryMask,
    center: PixelCoord,
    cfg: &OracleConfig,
) -> Result<Vec<PixelCoord>> {
    cfg.validate()?;
    if !skeleton.in_bounds(center) {
        return Err(Error::OutOfBounds {
            what: "patch center",
            row: center.row,
            col: center.col,
            width: skeleton.width(),
            height: skeleton.height(),
        });
    }
    border_exits(
        |q| skeleton.get(q),
        skeleton.width(),
        skeleton.height(),
        center,
        cfg,
    )
    .ok_or(Error::CenterOffStructure {
        row: center.row,
        col: center.col,
    })
}

/// Oracle backed by the ground-truth skeleton; every detection has
/// confidence 1.0. Off-structure centers yield an empty detection list
/// rather than an error, since the tracer probes freely.
pub struct GroundTruthOracle {
    skeleton: BinaryMask,
    cfg: OracleConfig,
}

impl GroundTruthOracle {
    pub fn new(skeleton: BinaryMask, cfg: OracleConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { skeleton, cfg })
    }
}

impl ConnectivityOracle for GroundTruthOracle {
    fn predict(&self, center: PixelCoord) -> Result<Vec<BorderDetection>> {
        match patch_ground_truth(&self.skeleton, center, &self.cfg) {
            Ok(exits) => Ok(exits
                .into_iter()
                .map(|location| BorderDetection {
                    location,
                    confidence: 1.0,
                })
                .collect()),
            Err(Error::CenterOffStructure { .. }) => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    }

    fn config(&self) -> &OracleConfig {
        &self.cfg
    }
}

/// Oracle backed by the probability map itself: foreground is
/// `value >= tau_occupancy`, and each detection's confidence is the raw map
/// value at its location.
pub struct ProbabilityMapOracle {
    map: ProbabilityMap,
    cfg: OracleConfig,
}

impl ProbabilityMapOracle {
    pub fn new(map: ProbabilityMap, cfg: OracleConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { map, cfg })
    }
}

impl ConnectivityOracle for ProbabilityMapOracle {
    fn predict(&self, center: PixelCoord) -> Result<Vec<BorderDetection>> {
        if center.row >= self.map.height() || center.col >= self.map.width() {
            return Err(Error::OutOfBounds {
                what: "patch center",
                row: center.row,
                col: center.col,
                width: self.map.width(),
                height: self.map.height(),
            });
        }
        let tau = self.cfg.tau_occupancy;
        let exits = border_exits(
            |q| self.map.get(q) >= tau,
            self.map.width(),
            self.map.height(),
            center,
            &self.cfg,
        )
        .unwrap_or_default();
        Ok(exits
            .into_iter()
            .map(|location| BorderDetection {
                location,
                confidence: self.map.get(location),
            })
            .collect())
    }

    fn config(&self) -> &OracleConfig {
        &self.cfg
    }
}
