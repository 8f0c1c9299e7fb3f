//! Seeded random instances that are strictly feasible by construction.

use lrsdp::model::{FactoredPrimal, HybridMatrix, LowRankFactor, SdpInstance, SparseSym};
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sparse(rng: &mut ChaCha8Rng, n: usize) -> SparseSym {
    let slots = n * (n + 1) / 2;
    let count = rng.gen_range(1..=slots.min(4));
    let mut upper = Vec::with_capacity(slots);
    for i in 0..n {
        for j in i..n {
            upper.push((i, j));
        }
    }
    let picked = sample(rng, slots, count).into_vec();
    let trips: Vec<_> = picked
        .into_iter()
        .map(|k| (upper[k].0, upper[k].1, rng.gen_range(-1.0..1.0)))
        .collect();
    SparseSym::from_triplets(n, trips).unwrap()
}

pub fn random_lowrank(rng: &mut ChaCha8Rng, n: usize) -> LowRankFactor {
    let r = rng.gen_range(1..=2usize.min(n));
    let p = DMatrix::from_fn(n, r, |_, _| rng.gen_range(-1.0..1.0));
    let mut d = DMatrix::from_fn(r, r, |_, _| rng.gen_range(-1.0..1.0));
    d = (&d + d.transpose()) * 0.5;
    LowRankFactor::new(p, d).unwrap()
}

/// Sparse only, low-rank only, or both with equal odds.
pub fn random_hybrid(rng: &mut ChaCha8Rng, n: usize) -> HybridMatrix {
    match rng.gen_range(0..3) {
        0 => HybridMatrix::sparse_only(random_sparse(rng, n)),
        1 => HybridMatrix::lowrank_only(random_lowrank(rng, n)),
        _ => HybridMatrix::new(n, Some(random_sparse(rng, n)), Some(random_lowrank(rng, n))).unwrap(),
    }
}

/// `b = A(X0)` for a full-rank `X0` with trace `τ/2`, so Slater holds.
pub fn random_instance(seed: u64, n: usize, m: usize) -> SdpInstance {
    let mut rng = rng(seed);
    let tau: f64 = rng.gen_range(1.0..3.0);
    let mut mats = Vec::with_capacity(m + 1);
    for _ in 0..=m {
        mats.push(random_hybrid(&mut rng, n));
    }
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)) + DMatrix::identity(n, n);
    let scale = (0.5 * tau).sqrt() / g.norm();
    let y0 = FactoredPrimal::new(g * scale);
    let placeholder = SdpInstance::new(n, DVector::zeros(m), tau, mats.clone()).unwrap();
    let b = lrsdp::model::apply_a(&placeholder, &y0).unwrap();
    SdpInstance::new(n, b, tau, mats).unwrap()
}

/// Dimensions drawn from the seed: `n` in 1..=6, `m` in 0..=4.
pub fn sized_instance(seed: u64) -> SdpInstance {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = r.gen_range(1..=6);
    let m = r.gen_range(0..=4);
    random_instance(seed, n, m)
}

pub fn random_factor(rng: &mut ChaCha8Rng, n: usize, r: usize, tau: f64) -> FactoredPrimal {
    let y: DMatrix<f64> = DMatrix::from_fn(n, r, |_, _| rng.gen_range(-1.0..1.0));
    let s = rng.gen_range(0.1f64..1.0) * tau.sqrt() / y.norm().max(1e-12);
    FactoredPrimal::new(y * s)
}
