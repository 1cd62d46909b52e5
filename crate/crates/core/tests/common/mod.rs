#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringmix::chain::{self, ChainParams, TransitionMatrix};
use ringmix::topology::{self, LongRangeGraph, Model};

pub const MODELS: [Model; 3] = [Model::M1, Model::M2, Model::M3];

/// Random graph on `n` nodes and random feasible parameters, drawn from `rng`.
/// The divisor never drops below the graph's largest chord degree.
pub fn random_instance(rng: &mut impl Rng, n: usize, drift: bool) -> (LongRangeGraph, ChainParams) {
    loop {
        let model = MODELS[rng.random_range(0..3)];
        let alpha = rng.random_range(1.1..1.9);
        let Ok(g) = topology::generate(model, n, alpha, rng.random()) else {
            continue;
        };
        let q_c = rng.random_range(0.02..0.25);
        let r = if drift { rng.random_range(0.1..0.9) * q_c } else { 0.0 };
        let q_l = rng.random_range(0.0..0.3);
        let d = g.max_long_range_degree().max(1) + rng.random_range(0..3);
        let params = ChainParams::new(q_c, q_l, r, d).unwrap();
        assert!(chain::is_feasible(&g, &params));
        return (g, params);
    }
}

pub fn random_chain(seed: u64, n: usize, drift: bool) -> TransitionMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (g, params) = random_instance(&mut rng, n, drift);
    chain::build_homogeneous(&g, &params).unwrap()
}

/// `(seed, n)` pairs for proptests that build chains with [`random_chain`].
pub fn arb_seed_and_size(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), sizes)
}

/// Φ(S) from the dense matrix: `(1/n)Σ_{i∈S, j∉S} p_ij / (|S|/n · |Sᶜ|/n)`.
pub fn dense_phi(dense: &[Vec<f64>], mask: u64) -> f64 {
    let n = dense.len();
    let inside = |i: usize| mask >> i & 1 == 1;
    let mut q = 0.0;
    for i in (0..n).filter(|&i| inside(i)) {
        for j in (0..n).filter(|&j| !inside(j)) {
            q += dense[i][j];
        }
    }
    let k = mask.count_ones() as f64;
    let nf = n as f64;
    (q / nf) / ((k / nf) * ((nf - k) / nf))
}

pub fn mask_nodes(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Dense `δ_start P^k` for `k = 0..=k_max`, as TV distances to uniform.
pub fn dense_profile(dense: &[Vec<f64>], start: usize, k_max: usize) -> Vec<f64> {
    let n = dense.len();
    let mut x = vec![0.0; n];
    x[start] = 1.0;
    let tv = |x: &[f64]| x.iter().map(|&v| (v - 1.0 / n as f64).abs()).sum::<f64>() / 2.0;
    let mut out = vec![tv(&x)];
    for _ in 0..k_max {
        let mut y = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            for (j, &p) in dense[i].iter().enumerate() {
                y[j] += xi * p;
            }
        }
        x = y;
        out.push(tv(&x));
    }
    out
}

/// Matrix powers `P^k` until every row is within `eps` of uniform; returns
/// the first such `k` and the smallest row attaining the largest first-hit
/// time.
pub fn dense_mixing_time(dense: &[Vec<f64>], eps: f64, k_max: usize) -> Option<(usize, usize)> {
    let n = dense.len();
    let mut power: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(i == j)).collect()).collect();
    let mut first_hit: Vec<Option<usize>> = vec![None; n];
    for k in 0..=k_max {
        for (i, row) in power.iter().enumerate() {
            let d = row.iter().map(|&v| (v - 1.0 / n as f64).abs()).sum::<f64>() / 2.0;
            if first_hit[i].is_none() && d <= eps {
                first_hit[i] = Some(k);
            }
        }
        if first_hit.iter().all(Option::is_some) {
            let hits: Vec<usize> = first_hit.into_iter().flatten().collect();
            let t = *hits.iter().max().unwrap();
            let worst = hits.iter().position(|&h| h == t).unwrap();
            return Some((t, worst));
        }
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for l in 0..n {
                let a = power[i][l];
                if a != 0.0 {
                    for j in 0..n {
                        next[i][j] += a * dense[l][j];
                    }
                }
            }
        }
        power = next;
    }
    None
}
