#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sis_budget::model::{validate_model, NetworkModel, RawModel};
use sis_budget::spectral::{laplacian_from_weights, Edge, SignedLaplacian, WeightedGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spanning tree plus extra edges, as 0-based pairs.
pub fn random_connected_pairs(rng: &mut impl Rng, n: usize, extra_p: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for k in 1..n {
        pairs.push((rng.random_range(0..k), k));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !pairs.contains(&(i, j)) && rng.random_bool(extra_p) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Connected model with `n` in 2..=8, infection rates uniform in [0, 2]
/// (self-loops included with probability 0.3) and curing rates uniform in
/// [0, 4].
pub fn random_model(rng: &mut impl Rng) -> NetworkModel {
    let n = rng.random_range(2..=8);
    random_model_of_size(rng, n)
}

pub fn random_model_of_size(rng: &mut impl Rng, n: usize) -> NetworkModel {
    let mut beta = vec![vec![0.0; n]; n];
    for (i, j) in random_connected_pairs(rng, n, 0.3) {
        // zero would break connectivity; the open interval is what matters
        let w = rng.random_range(1e-6..2.0);
        beta[i][j] = w;
        beta[j][i] = w;
    }
    for (k, row) in beta.iter_mut().enumerate() {
        if rng.random_bool(0.3) {
            row[k] = rng.random_range(0.0..2.0);
        }
    }
    let delta = (0..n).map(|_| rng.random_range(0.0..4.0)).collect();
    validate_model(&RawModel { n, beta, delta }).expect("random model is valid")
}

/// Connected graph with signed weights uniform in [lo, hi].
pub fn random_signed_graph(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> WeightedGraph {
    let edges = random_connected_pairs(rng, n, 0.4)
        .into_iter()
        .map(|(i, j)| Edge::new(i, j, rng.random_range(lo..hi)))
        .collect();
    WeightedGraph::new(n, edges).unwrap()
}

pub fn random_signed_laplacian(rng: &mut impl Rng) -> SignedLaplacian {
    let n = rng.random_range(2..=8);
    laplacian_from_weights(&random_signed_graph(rng, n, -0.6, 2.0))
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
