//! Property suites for the tracer: brute-force oracle equivalence for the
//! link paths, termination on arbitrary maps, and end-to-end determinism.

use proptest::prelude::*;
use topotrace::delineate::{
    delineate_with_report, link_shortest_path, DelineationConfig, LINK_EPSILON,
};
use topotrace::oracle::{GroundTruthOracle, ProbabilityMapOracle};
use topotrace::raster::{PixelCoord, ProbabilityMap, Window};
use topotrace::synth::{generate_network, CorruptionParams, SynthParams};
use topotrace::{Error, OracleConfig};

/// Minimum path cost from `a` to `b` by exhaustive enumeration of simple
/// 8-connected paths. Exponential: keep grids at 4x4 or smaller.
fn brute_force_cost(map: &ProbabilityMap, a: PixelCoord, b: PixelCoord) -> f64 {
    fn go(
        map: &ProbabilityMap,
        at: PixelCoord,
        b: PixelCoord,
        seen: &mut Vec<bool>,
        cost: f64,
        best: &mut f64,
    ) {
        if cost >= *best {
            return; // any extension only grows the cost
        }
        if at == b {
            *best = cost;
            return;
        }
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (r, c) = (at.row as i64 + dr, at.col as i64 + dc);
                if r < 0 || c < 0 || r as usize >= map.height() || c as usize >= map.width() {
                    continue;
                }
                let q = PixelCoord::new(r as usize, c as usize);
                let idx = q.row * map.width() + q.col;
                if seen[idx] {
                    continue;
                }
                let step = if dr != 0 && dc != 0 {
                    std::f64::consts::SQRT_2
                } else {
                    1.0
                };
                seen[idx] = true;
                go(map, q, b, seen, cost + step * (1.0 - map.get(q) + LINK_EPSILON), best);
                seen[idx] = false;
            }
        }
    }
    let mut seen = vec![false; map.width() * map.height()];
    seen[a.row * map.width() + a.col] = true;
    let mut best = f64::INFINITY;
    go(map, a, b, &mut seen, 0.0, &mut best);
    best
}

fn path_cost(map: &ProbabilityMap, path: &[PixelCoord]) -> f64 {
    path.windows(2)
        .map(|w| {
            let step = if w[0].row != w[1].row && w[0].col != w[1].col {
                std::f64::consts::SQRT_2
            } else {
                1.0
            };
            step * (1.0 - map.get(w[1]) + LINK_EPSILON)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Dijkstra agrees with exhaustive enumeration on every small map.
    #[test]
    fn link_cost_matches_brute_force(
        (w, h) in (2usize..=4, 2usize..=4),
        raw in prop::collection::vec(0.0f64..=1.0, 16),
        corners in (0usize..16, 0usize..16),
    ) {
        let values: Vec<f64> = raw[..w * h].to_vec();
        let map = ProbabilityMap::from_vec(w, h, values);
        let a = PixelCoord::new(corners.0 / w % h, corners.0 % w);
        let b = PixelCoord::new(corners.1 / w % h, corners.1 % w);
        let window = Window::full(w, h);
        let path = link_shortest_path(&map, a, b, window).unwrap();
        prop_assert_eq!(path[0], a);
        prop_assert_eq!(*path.last().unwrap(), b);
        let expected = brute_force_cost(&map, a, b);
        prop_assert!((path_cost(&map, &path) - expected).abs() < 1e-9,
            "dijkstra {} vs brute force {}", path_cost(&map, &path), expected);
    }

    /// The engine terminates on arbitrary noise: it either drains the bag or
    /// stops at the step budget with a partial result — never hangs or
    /// returns any other error.
    #[test]
    fn tracer_terminates_on_arbitrary_maps(raw in prop::collection::vec(0.0f64..=1.0, 576)) {
        let map = ProbabilityMap::from_vec(24, 24, raw);
        let oracle_cfg = OracleConfig { k: 9, s: 5, tau_occupancy: 0.5 };
        let oracle = ProbabilityMapOracle::new(map.clone(), oracle_cfg).unwrap();
        let cfg = DelineationConfig::for_map(24, 24, 9);
        match delineate_with_report(&map, &oracle, &cfg) {
            Ok((_, report)) => prop_assert!(report.steps <= cfg.max_steps),
            Err(Error::MaxSteps { max_steps, .. }) => prop_assert_eq!(max_steps, cfg.max_steps),
            Err(other) => prop_assert!(false, "unexpected error: {other}"),
        }
    }

    /// Tracing the same scene twice produces byte-identical graphs and
    /// identical reports.
    #[test]
    fn tracing_is_deterministic(seed in 0u64..100_000) {
        let params = SynthParams {
            seed,
            width: 96,
            height: 96,
            n_components: 1,
            step_len: 8,
            corruption: CorruptionParams {
                blur_radius: 0,
                noise_amp: 0.10,
                gap_count: 1,
                gap_len: 5,
                clutter_count: 2,
            },
            ..SynthParams::default()
        };
        let (_, mask) = generate_network(&params).unwrap();
        let probmap = topotrace::synth::corrupt(&mask, &params);
        let oracle = GroundTruthOracle::new(mask, OracleConfig::default()).unwrap();
        let cfg = DelineationConfig::for_map(96, 96, 33);
        let (g1, r1) = delineate_with_report(&probmap, &oracle, &cfg).unwrap();
        let (g2, r2) = delineate_with_report(&probmap, &oracle, &cfg).unwrap();
        prop_assert_eq!(g1.to_json_string(), g2.to_json_string());
        prop_assert_eq!(r1, r2);
    }
}
