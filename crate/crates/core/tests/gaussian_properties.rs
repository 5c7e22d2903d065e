use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoway_helper::gaussian::{
    helper_description_joint, helper_noise_from_rate, rx_min, rx_via_helper_description, rz_min,
    wz_with_encoder_side_info, GaussianSourceSpec,
};

fn source() -> impl Strategy<Value = GaussianSourceSpec> {
    (0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0).prop_map(|(a, b, z)| GaussianSourceSpec::new(a, b, z).unwrap())
}

#[test]
fn no_helper_collapse_is_exact() {
    let s = GaussianSourceSpec::new(2.0, 0.7, 1.3).unwrap();
    for dx in [0.05, 0.3, 1.0, 1.9] {
        assert_eq!(rx_min(&s, 0.0, dx).unwrap(), 0.5 * (2.0f64 / dx).log2());
    }
}

#[test]
fn worked_example() {
    let s = GaussianSourceSpec::new(1.0, 1.0, 1.0).unwrap();
    assert!((rx_min(&s, 0.5, 0.375).unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(rz_min(&s, 0.6).unwrap(), 0.0);
}

#[test]
fn monotone_and_convex_on_grid() {
    let s = GaussianSourceSpec::new(1.5, 0.8, 1.0).unwrap();
    let dx = 0.05;
    let v: Vec<f64> = (0..100).map(|i| rx_min(&s, i as f64 * 0.05, dx).unwrap()).collect();
    for w in v.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
    for w in v.windows(3) {
        assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-12);
    }
}

#[test]
fn slope_at_zero_matches_bound() {
    let s = GaussianSourceSpec::new(1.5, 0.8, 1.0).unwrap();
    let h = 1e-7;
    let slope = (rx_min(&s, 0.0, 0.01).unwrap() - rx_min(&s, h, 0.01).unwrap()) / h;
    assert!((slope - s.slope_bound()).abs() < 1e-6, "{slope}");
}

#[test]
fn substitution_chain_reproduces_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(69);
    for _ in 0..50 {
        let s = GaussianSourceSpec::new(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0)).unwrap();
        let ry = rng.gen_range(0.0..3.0);
        let closed = rx_min(&s, ry, 1e-3).unwrap();
        let var_d = helper_noise_from_rate(&s, ry).unwrap();
        let chained = wz_with_encoder_side_info(&helper_description_joint(&s, var_d).unwrap(), 1e-3).unwrap();
        assert!((closed - chained).abs() < 1e-9, "{closed} vs {chained}");
        assert!((closed - rx_via_helper_description(&s, ry, 1e-3).unwrap()).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn slopes_never_exceed_the_bound(s in source(), ry in 0.0f64..4.0, step in 1e-3f64..0.5) {
        let dx = 1e-4;
        let drop = rx_min(&s, ry, dx).unwrap() - rx_min(&s, ry + step, dx).unwrap();
        prop_assert!(drop >= -1e-12);
        prop_assert!(drop <= s.slope_bound() * step + 1e-12);
    }

    #[test]
    fn helper_rate_does_not_move_rz(s in source(), dz in 0.01f64..2.0) {
        let r = rz_min(&s, dz).unwrap();
        prop_assert!(r >= 0.0);
        let bigger = GaussianSourceSpec::new(s.var_a, s.var_b * 3.0, s.var_z).unwrap();
        prop_assert_eq!(r, rz_min(&bigger, dz).unwrap());
    }

    #[test]
    fn more_distortion_costs_less(s in source(), ry in 0.0f64..3.0, d in 0.01f64..1.0) {
        prop_assert!(rx_min(&s, ry, d * 1.5).unwrap() <= rx_min(&s, ry, d).unwrap());
    }
}
