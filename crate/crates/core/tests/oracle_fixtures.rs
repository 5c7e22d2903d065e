use std::fs::File;
use std::path::PathBuf;

use twoway_helper::oracle::{exhaustive_frontier, read_fixture, OracleFixture, QuantizedKernelSpace};
use twoway_helper::region::{optimize_region, trace_frontier_helper, SearchBudget, SourceModel, TwoWayCards};

const TOL: f64 = 5e-2;

fn fixtures() -> Vec<OracleFixture> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_fixture(File::open(p).unwrap()).unwrap()).collect()
}

#[test]
fn three_fixtures_ship() {
    let f = fixtures();
    assert_eq!(f.len(), 3);
    for fx in &f {
        assert!(!fx.points.is_empty());
        for w in fx.points.windows(2) {
            assert!(w[0].r1 < w[1].r1 && w[0].r > w[1].r, "{}: not a Pareto set", fx.params.instance);
        }
        for p in &fx.points {
            assert!(p.dx <= fx.params.d + 1e-9);
        }
    }
}

#[test]
fn frontier_tracks_the_oracle() {
    for fx in fixtures() {
        let m = fx.params.model().unwrap();
        let caps: Vec<f64> = fx.points.iter().map(|p| p.r1).collect();
        let got = trace_frontier_helper(&m, fx.params.d, &caps, &SearchBudget::default(), None).unwrap();
        let oracle = twoway_helper::oracle::OracleFrontier { points: fx.points.clone(), evaluated: 0 };
        for p in got {
            let want = oracle.value_at(p.r1).unwrap();
            assert!((p.r - want).abs() <= TOL, "{} at r1={}: {} vs oracle {}", fx.params.instance, p.r1, p.r, want);
        }
    }
}

#[test]
fn region_optimizer_tracks_the_oracle() {
    let cards = |m: &SourceModel| TwoWayCards { u: m.card_y() + 2, v: 1, w: m.card_x() * (m.card_y() + 2) + 1 };
    for fx in fixtures() {
        let m = fx.params.model().unwrap();
        // Encoder rate alone: the helper is free, so the oracle's best is its last point.
        let free = optimize_region(&m, fx.params.d, f64::INFINITY, [0.0, 0.0, 1.0], &SearchBudget::default(), Some(cards(&m))).unwrap();
        let want = fx.points.last().unwrap().r;
        assert!((free.point.r3 - want).abs() <= TOL, "{}: {} vs {}", fx.params.instance, free.point.r3, want);
        // Helper and encoder rate at equal weight.
        let sum = optimize_region(&m, fx.params.d, f64::INFINITY, [1.0, 0.0, 1.0], &SearchBudget::default(), Some(cards(&m))).unwrap();
        let want = fx.points.iter().map(|p| p.r1 + p.r).fold(f64::INFINITY, f64::min);
        assert!((sum.value - want).abs() <= TOL, "{}: {} vs {}", fx.params.instance, sum.value, want);
    }
}

#[test]
fn tiny_enumeration_is_reproducible() {
    let fx = &fixtures()[0];
    let m = fx.params.model().unwrap();
    let space = QuantizedKernelSpace::new(4, 2, 2);
    let a = exhaustive_frontier(&m, fx.params.d, &space).unwrap();
    let b = exhaustive_frontier(&m, fx.params.d, &space).unwrap();
    assert_eq!(a, b);
}
