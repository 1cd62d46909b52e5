mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ringmix::chain::{self, ChainError, ChainParams, TransitionMatrix};
use ringmix::topology::{self, LongRangeGraph, Model};

fn instance(seed: u64, n: usize, drift: bool) -> (LongRangeGraph, ChainParams, TransitionMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (g, params) = common::random_instance(&mut rng, n, drift);
    let p = chain::build_homogeneous(&g, &params).unwrap();
    (g, params, p)
}

/// The homogeneous chain written out entry by entry.
fn expected_dense(g: &LongRangeGraph, params: &ChainParams) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][(i + 1) % n] += params.q_c + params.r;
        m[i][(i + n - 1) % n] += params.q_c - params.r;
    }
    for &(u, v) in g.edges() {
        m[u][v] += params.q_l / params.d as f64;
        m[v][u] += params.q_l / params.d as f64;
    }
    for (i, row) in m.iter_mut().enumerate() {
        let off: f64 = row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).sum();
        row[i] = 1.0 - off;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn built_chain_matches_entrywise_oracle(seed: u64, n in 4usize..40, drift: bool) {
        let (g, params, p) = instance(seed, n, drift);
        let want = expected_dense(&g, &params);
        let got = p.to_dense();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((got[i][j] - want[i][j]).abs() <= 1e-15, "({}, {}): {} vs {}", i, j, got[i][j], want[i][j]);
            }
        }
    }

    #[test]
    fn homogeneous_chains_are_doubly_stochastic(seed: u64, n in 4usize..200, drift: bool) {
        let (_, _, p) = instance(seed, n, drift);
        prop_assert!(chain::is_doubly_stochastic(&p, 1e-12));
        prop_assert!(p.row_sums().iter().all(|&s| s == 1.0));
        prop_assert!(p.column_sums().iter().all(|&s| s == 1.0));
    }

    #[test]
    fn zero_drift_is_reversible(seed: u64, n in 4usize..200) {
        let (_, _, p) = instance(seed, n, false);
        prop_assert!(chain::is_reversible(&p, 0.0).unwrap());
    }

    #[test]
    fn chord_entries_ignore_drift(seed: u64, n in 8usize..200, drift: bool) {
        let (g, params, p) = instance(seed, n, drift);
        let chord = params.q_l / params.d as f64;
        for &(u, v) in g.edges() {
            let cyc = |a: usize, b: usize| {
                let mut x = 0.0;
                if b == (a + 1) % n { x += params.q_c + params.r; }
                if b == (a + n - 1) % n { x += params.q_c - params.r; }
                x
            };
            prop_assert!((p.get(u, v) - cyc(u, v) - chord).abs() <= 1e-15);
            prop_assert!((p.get(v, u) - cyc(v, u) - chord).abs() <= 1e-15);
        }
    }

    #[test]
    fn reversibilize_is_idempotent_and_keeps_sums(seed: u64, n in 4usize..120, drift: bool) {
        let (_, _, p) = instance(seed, n, drift);
        let once = chain::reversibilize(&p).unwrap();
        let twice = chain::reversibilize(&once).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.row_sums(), p.row_sums());
        prop_assert_eq!(once.column_sums(), p.column_sums());
        prop_assert!(chain::is_reversible(&once, 0.0).unwrap());
        prop_assert_eq!(once.connectivity(), p.connectivity());
    }

    #[test]
    fn laziness_guarantee(seed: u64, n in 4usize..200, q_c in 0.0f64..0.25, share in 0.0f64..1.0, drift in 0.0f64..1.0) {
        let (g, _, _) = instance(seed, n, false);
        let q_l = share * (0.5 - 2.0 * q_c);
        let d = g.max_long_range_degree().max(1);
        let params = ChainParams::new(q_c, q_l, drift * q_c, d).unwrap();
        let p = chain::build_homogeneous(&g, &params).unwrap();
        prop_assert!(chain::is_lazy(&p));
    }

    #[test]
    fn dump_reload_is_bit_exact(seed: u64, n in 4usize..60, drift: bool) {
        let (_, _, p) = instance(seed, n, drift);
        let back = TransitionMatrix::from_dump(n, &p.dump()).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn two_state_doubly_stochastic_matrices_are_symmetric() {
    for a in 0..=20 {
        for b in 0..=20 {
            let (x, y) = (a as f64 / 20.0, b as f64 / 20.0);
            let p = TransitionMatrix::from_dense(&[vec![1.0 - x, x], vec![y, 1.0 - y]]).unwrap();
            match chain::is_reversible(&p, 1e-12) {
                Ok(rev) => {
                    assert_eq!(a, b);
                    assert!(rev);
                }
                Err(ChainError::PreconditionViolated(_)) => assert_ne!(a, b),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn drifted_two_cycle_is_reversible() {
    let g = LongRangeGraph::new(2, 1.5, Model::M2, 0, []).unwrap();
    for (q_c, r) in [(0.1, 0.0), (0.2, 0.15), (0.25, 0.25), (0.4, 0.1)] {
        let p = chain::build_homogeneous(&g, &ChainParams::new(q_c, 0.0, r, 1).unwrap()).unwrap();
        assert!(chain::is_reversible(&p, 0.0).unwrap());
        assert!((p.get(0, 1) - 2.0 * q_c).abs() < 1e-15);
    }
}

#[test]
fn drift_breaks_reversibility_on_longer_cycles() {
    for n in 3..20 {
        let g = LongRangeGraph::new(n, 1.5, Model::M2, 0, []).unwrap();
        let p = chain::build_homogeneous(&g, &ChainParams::new(0.2, 0.1, 0.1, 4).unwrap()).unwrap();
        assert!(!chain::is_reversible(&p, 1e-12).unwrap());
    }
}

#[test]
fn infeasible_degrees_are_rejected() {
    let g = LongRangeGraph::new(10, 1.5, Model::M2, 0, [(0, 2), (0, 4), (0, 6), (0, 8)]).unwrap();
    let params = ChainParams::new(0.45, 0.5, 0.0, 1).unwrap();
    assert!(!chain::is_feasible(&g, &params));
    assert!(matches!(
        chain::build_homogeneous(&g, &params),
        Err(ChainError::InfeasibleParams { node: 0, .. })
    ));
    let ok = ChainParams::new(0.2, 0.1, 0.0, 4).unwrap();
    assert!(chain::is_feasible(&g, &ok));
}

#[test]
fn experiment_defaults_on_sweep_graphs() {
    let params = ChainParams::experiment(1.5, 0.15).unwrap();
    assert_eq!(params.d, 4);
    for seed in 0..20 {
        let g = topology::generate_m2(1024, 1.5, seed).unwrap();
        if g.max_long_range_degree() <= params.d {
            let p = chain::build_homogeneous(&g, &params).unwrap();
            assert!(chain::is_lazy(&p));
            assert!(chain::is_doubly_stochastic(&p, 1e-12));
        }
    }
}
