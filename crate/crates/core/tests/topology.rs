use proptest::prelude::*;
use ringmix::topology::{self, ArcRule, LongRangeGraph, Model};

fn ceil_count(n: usize, alpha: f64) -> usize {
    let x = (n as f64).powf(2.0 - alpha);
    if (x - x.round()).abs() <= 1e-9 * x {
        x.round() as usize
    } else {
        x.ceil() as usize
    }
}

fn any_model() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::M1), Just(Model::M2), Just(Model::M3)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn m2_has_exactly_the_nominal_edge_count(n in 8usize..3000, alpha in 1.05f64..1.95, seed: u64) {
        let g = topology::generate_m2(n, alpha, seed).unwrap();
        prop_assert_eq!(g.edges().len(), ceil_count(n, alpha));
    }

    #[test]
    fn m1_endpoints_without_collisions(n in 200usize..3000, alpha in 1.3f64..1.9, seed: u64) {
        let spacing = (n as f64).powf(alpha - 1.0) / 2.0;
        let count = 2 * ceil_count(n, alpha);
        prop_assume!(spacing >= 1.0 && (count - 1) as f64 * spacing < n as f64);
        let g = topology::generate_m1(n, alpha, seed).unwrap();
        prop_assert_eq!(g.endpoints().len(), 2 * ceil_count(n, alpha));
        prop_assert_eq!(g.max_long_range_degree(), 1);
    }

    #[test]
    fn generators_are_pure_functions_of_the_seed(model in any_model(), n in 16usize..800, seed: u64) {
        let a = topology::generate(model, n, 1.5, seed);
        let b = topology::generate(model, n, 1.5, seed);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn text_round_trip_is_exact(model in any_model(), n in 16usize..800, alpha in 1.05f64..1.95, seed: u64) {
        if let Ok(g) = topology::generate(model, n, alpha, seed) {
            let back = LongRangeGraph::from_text(&g.to_text()).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.to_text(), g.to_text());
        }
    }

    #[test]
    fn empty_arcs_partition_the_free_nodes(model in any_model(), n in 16usize..1500, seed: u64) {
        let g = topology::generate(model, n, 1.5, seed).unwrap();
        prop_assume!(!g.edges().is_empty());
        let ends = g.endpoints();
        let arcs = topology::empty_arcs(&g, ArcRule::NoIncidentEdge).unwrap();
        let total: usize = arcs.iter().map(|a| a.len).sum();
        prop_assert_eq!(total + ends.len(), n);
        let mut is_end = vec![false; n];
        for &e in &ends {
            is_end[e] = true;
        }
        let mut seen = vec![false; n];
        for a in &arcs {
            prop_assert!(is_end[(a.start + n - 1) % n]);
            prop_assert!(is_end[(a.start + a.len) % n]);
            for v in a.nodes(n) {
                prop_assert!(!is_end[v] && !seen[v]);
                seen[v] = true;
            }
        }
        prop_assert!(arcs.windows(2).all(|w| w[0].len >= w[1].len));
    }

    #[test]
    fn closed_arcs_have_no_leaving_chord(model in any_model(), n in 16usize..600, seed: u64) {
        let g = topology::generate(model, n, 1.5, seed).unwrap();
        prop_assume!(!g.edges().is_empty());
        for a in topology::empty_arcs(&g, ArcRule::NoLeavingEdge).unwrap() {
            for &(u, v) in g.edges() {
                prop_assert_eq!(a.contains(n, u), a.contains(n, v));
            }
        }
    }

    #[test]
    fn splitting_gives_a_perfect_matching(model in prop_oneof![Just(Model::M2), Just(Model::M3)],
                                          n in 16usize..1500, seed: u64, split: u64) {
        let g = topology::generate(model, n, 1.5, seed).unwrap();
        prop_assume!(!g.edges().is_empty());
        let r = topology::reduce_with_splitting(&g, split).unwrap();
        prop_assert_eq!(r.m, 2 * g.edges().len());
        prop_assert!(r.is_perfect_matching());
        let mut degree = vec![0; n];
        for &o in &r.origin {
            degree[o] += 1;
        }
        prop_assert_eq!(degree, g.degrees());
        // copies of one endpoint are consecutive reduced nodes
        prop_assert!(r.origin.windows(2).all(|w| w[0] <= w[1]));
        let mut chords: Vec<(usize, usize)> = r
            .matching
            .iter()
            .map(|&(a, b)| (r.origin[a].min(r.origin[b]), r.origin[a].max(r.origin[b])))
            .collect();
        chords.sort_unstable();
        prop_assert_eq!(chords.as_slice(), g.edges());
    }

    #[test]
    fn m1_reduction_keeps_the_matching(n in 64usize..3000, seed: u64) {
        let g = topology::generate_m1(n, 1.5, seed).unwrap();
        let r = topology::reduce_m1(&g).unwrap();
        prop_assert_eq!(r.m, 2 * r.matching.len());
        prop_assert!(r.is_perfect_matching());
        prop_assert_eq!(&r.origin, &g.endpoints());
        for (&(a, b), &(u, v)) in r.matching.iter().zip(g.edges()) {
            prop_assert_eq!((r.origin[a], r.origin[b]), (u, v));
        }
    }
}

#[test]
fn m3_edge_count_matches_binomial_mean() {
    let (n, alpha) = (100, 1.5);
    let pairs = (n * (n - 1) / 2) as f64;
    let p = topology::m3_probability(n, alpha);
    let draws = 1000;
    let total: usize = (0..draws)
        .map(|s| topology::generate_m3(n, alpha, s).unwrap().edges().len())
        .sum();
    let mean = total as f64 / draws as f64;
    let sigma = (pairs * p * (1.0 - p) / draws as f64).sqrt();
    assert!((mean - 9.9).abs() <= 3.0 * sigma, "mean {mean}, sigma {sigma}");
}

#[test]
fn m2_pair_counts_at_reference_sizes() {
    assert_eq!(topology::generate_m2(100, 1.5, 7).unwrap().edges().len(), 10);
    assert_eq!(topology::generate_m2(4096, 1.5, 7).unwrap().edges().len(), 64);
}

#[test]
fn wound_projection_has_equal_fibres() {
    for (n, s) in [(100, 5), (400, 10), (1600, 20)] {
        for seed in 0..10 {
            let g = topology::generate_m1(n, 1.5, seed).unwrap();
            let w = topology::wind_up(&g).unwrap();
            assert_eq!(w.cycle_len, s);
            assert!(w.preimage_counts().iter().all(|&c| c == n / s));
            let projected = w.project(&vec![1.0 / n as f64; n]);
            for x in projected {
                assert!((x - 1.0 / s as f64).abs() < 1e-15);
            }
            assert_eq!(w.loops.iter().sum::<usize>(), g.edges().len());
        }
    }
}

#[test]
fn longest_empty_arc_scales_like_spacing_times_log() {
    let alpha = 1.5;
    let mut ratios = Vec::new();
    for n in [256usize, 512, 1024, 2048, 4096] {
        let mut longest: Vec<f64> = (0..20)
            .map(|t| {
                let g = topology::generate_m2(n, alpha, 1000 + t).unwrap();
                topology::empty_arcs(&g, ArcRule::NoIncidentEdge).unwrap()[0].len as f64
            })
            .collect();
        longest.sort_by(f64::total_cmp);
        let median = (longest[9] + longest[10]) / 2.0;
        ratios.push(median / ((n as f64).powf(alpha - 1.0) * (n as f64).ln()));
    }
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(lo > 0.05 && hi / lo < 2.0, "{ratios:?}");
}
