mod common;

use common::{random_kernel, random_model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoway_helper::prob::{joint_from_kernels, mutual_information, Kernel, Var};
use twoway_helper::region::multistage::{
    aggregate_rates, evaluate_multistage, stage_rates, v_name, w_name, MultiStageScheme,
};
use twoway_helper::region::{evaluate_rate_point, AuxScheme, ChainDirection, SourceModel};

/// Same kernels, rewritten with the multi-stage conditioning order.
fn as_single_stage(m: &SourceModel, s: &AuxScheme) -> MultiStageScheme {
    let [ku, kv, kw] = s.kernels();
    let (nu, nv) = (ku.to_var().card, kv.to_var().card);
    let (nx, nz) = (m.card_x(), m.card_z());
    let u = Var::new("U", nu);
    let v1 = Var::new("V1", nv);
    let kv1 = Kernel::from_fn(vec![m.var("Z").unwrap(), u.clone()], v1.clone(), |t| kv.row(t[1] * nz + t[0]).to_vec()).unwrap();
    let kw1 = Kernel::from_fn(vec![m.var("X").unwrap(), u, v1], Var::new("W1", kw.to_var().card), |t| {
        kw.row((t[1] * nv + t[2]) * nx + t[0]).to_vec()
    })
    .unwrap();
    MultiStageScheme::with_optimal_reconstruction(m, ku.clone(), vec![(kv1, kw1)]).unwrap()
}

#[test]
fn one_stage_reproduces_the_two_way_rates() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..200 {
        let (nx, ny, nz) = (rng.gen_range(2..4), rng.gen_range(2..4), rng.gen_range(2..4));
        let m = random_model(&mut rng, ChainDirection::Yxz, nx, ny, nz);
        let (nu, nv, nw) = (rng.gen_range(1..4), rng.gen_range(1..4), rng.gen_range(1..4));
        let u = Var::new("U", nu);
        let v = Var::new("V", nv);
        let s = AuxScheme::with_optimal_reconstruction(
            &m,
            random_kernel(&mut rng, vec![m.var("Y").unwrap()], u.clone()),
            random_kernel(&mut rng, vec![u.clone(), m.var("Z").unwrap()], v.clone()),
            random_kernel(&mut rng, vec![u, v, m.var("X").unwrap()], Var::new("W", nw)),
        )
        .unwrap();
        let t1 = evaluate_rate_point(&m, &s).unwrap();
        let ms = as_single_stage(&m, &s);
        let p = evaluate_multistage(&m, &ms).unwrap();
        assert!((p.rz - t1.r2).abs() <= 1e-12, "{} vs {}", p.rz, t1.r2);
        assert!((p.rx - t1.r3).abs() <= 1e-12, "{} vs {}", p.rx, t1.r3);
        assert!((p.dx - t1.dx).abs() <= 1e-12 && (p.dz - t1.dz).abs() <= 1e-12);
        let j = joint_from_kernels(m.joint(), &[s.kernels()[0].clone()]).unwrap();
        let iuz = mutual_information(&j, &["U"], &["Z"]).unwrap();
        assert!((p.ry - (t1.r1 + iuz)).abs() <= 1e-9);
        assert!(p.ry + 1e-12 >= t1.r1);
    }
}

#[test]
fn stage_sums_equal_aggregate_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..200 {
        let ny = rng.gen_range(2..4);
        let m = random_model(&mut rng, ChainDirection::Yxz, 2, ny, 2);
        let u = Var::new("U", rng.gen_range(1..4));
        let ku = random_kernel(&mut rng, vec![m.var("Y").unwrap()], u.clone());
        let v1 = Var::new(v_name(1), rng.gen_range(1..4));
        let kv1 = random_kernel(&mut rng, vec![m.var("Z").unwrap(), u.clone()], v1.clone());
        let w1 = Var::new(w_name(1), rng.gen_range(1..4));
        let kw1 = random_kernel(&mut rng, vec![m.var("X").unwrap(), u.clone(), v1.clone()], w1.clone());
        let v2 = Var::new(v_name(2), rng.gen_range(1..4));
        let kv2 = random_kernel(&mut rng, vec![m.var("Z").unwrap(), u.clone(), v1.clone(), w1.clone()], v2.clone());
        let w2 = Var::new(w_name(2), rng.gen_range(1..4));
        let kw2 = random_kernel(&mut rng, vec![m.var("X").unwrap(), u, v1, v2, w1], w2);
        let s = MultiStageScheme::with_optimal_reconstruction(&m, ku, vec![(kv1, kw1), (kv2, kw2)]).unwrap();
        let p = evaluate_multistage(&m, &s).unwrap();
        let (rz, rx) = aggregate_rates(&m, &s).unwrap();
        assert!((p.rz - rz).abs() <= 1e-9, "{} vs {rz}", p.rz);
        assert!((p.rx - rx).abs() <= 1e-9, "{} vs {rx}", p.rx);
        let terms = stage_rates(&m, &s).unwrap();
        assert_eq!(terms.len(), 2);
        assert!(terms.iter().all(|t| t.0 >= 0.0 && t.1 >= 0.0));
    }
}
