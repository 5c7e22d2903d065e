//! Random instances shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use twoway_helper::prob::{JointPmf, Kernel, Var};
use twoway_helper::region::{ChainDirection, SourceModel};
use twoway_helper::DistortionMeasure;

pub fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0f64).powi(2) + 1e-6).collect();
    let t: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / t).collect()
}

pub fn random_kernel(rng: &mut ChaCha8Rng, from: Vec<Var>, to: Var) -> Kernel {
    let n = to.card;
    Kernel::from_fn(from, to, |_| random_row(rng, n)).unwrap()
}

/// Random source with the given chain and alphabet sizes, Hamming-like
/// distortions on square alphabets.
pub fn random_model(rng: &mut ChaCha8Rng, chain: ChainDirection, nx: usize, ny: usize, nz: usize) -> SourceModel {
    let (x, y, z) = (Var::new("X", nx), Var::new("Y", ny), Var::new("Z", nz));
    let j = match chain {
        ChainDirection::Yxz => {
            let base = JointPmf::new(vec![x.clone()], random_row(rng, nx)).unwrap();
            let ky = random_kernel(rng, vec![x.clone()], y);
            let kz = random_kernel(rng, vec![x], z);
            base.extend(&ky).unwrap().extend(&kz).unwrap()
        }
        ChainDirection::Yzx => {
            let base = JointPmf::new(vec![z.clone()], random_row(rng, nz)).unwrap();
            let ky = random_kernel(rng, vec![z.clone()], y);
            let kx = random_kernel(rng, vec![z], x);
            base.extend(&ky).unwrap().extend(&kx).unwrap()
        }
    };
    SourceModel::new(j, chain, Some(DistortionMeasure::hamming(nx)), Some(DistortionMeasure::hamming(nz))).unwrap()
}
