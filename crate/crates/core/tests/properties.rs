use std::path::Path;

use proptest::prelude::*;

use ppm_sdp::adversary::{apply_adversary, is_monotone_modification, AdversarySpec};
use ppm_sdp::graph::{Graph, PartitionLabels};
use ppm_sdp::io::{format_graph, format_labels, parse_graph, parse_labels};
use ppm_sdp::model::{sample_planted, sample_ppm, PlantedPartitionParams};
use ppm_sdp::oracle::loglikelihood;
use ppm_sdp::sdp::{centered_partition_matrix, objective_value, partition_matrix};
use ppm_sdp::thresholds::{ch_divergence_numeric, compute_omega, planted_divergence, tau};

fn planted_matrix(r: usize, p: f64, q: f64) -> Vec<Vec<f64>> {
    (0..r)
        .map(|i| (0..r).map(|j| if i == j { p } else { q }).collect())
        .collect()
}

fn normalize(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn labels_strategy() -> impl Strategy<Value = PartitionLabels> {
    (2usize..5, 4usize..40).prop_flat_map(|(r, n)| {
        prop::collection::vec(0..r, n).prop_map(move |mut l| {
            // every community nonempty
            for (i, x) in l.iter_mut().take(r).enumerate() {
                *x = i;
            }
            PartitionLabels::new(l, r).unwrap()
        })
    })
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (1usize..40).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..120).prop_map(move |pairs| {
            let mut g = Graph::empty(n);
            for (u, v) in pairs {
                if u != v {
                    g.add_edge(u, v);
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn omega_lies_strictly_between_q_and_p(q in 1e-6f64..0.999, frac in 1e-6f64..0.999_999) {
        let p = q + frac * (1.0 - q);
        prop_assume!(p < 1.0 && p > q);
        let w = compute_omega(p, q).unwrap();
        prop_assert!(q < w && w < p, "q = {q}, p = {p}, omega = {w}");
    }

    #[test]
    fn closed_form_divergence_matches_numeric_supremum(
        q in 0.1f64..20.0,
        gap in 1e-3f64..40.0,
        weights in prop::collection::vec(0.05f64..1.0, 2..6),
        pick in (0usize..6, 0usize..6),
    ) {
        let pi = normalize(&weights);
        let r = pi.len();
        let (i, j) = (pick.0 % r, pick.1 % r);
        prop_assume!(i != j);
        let p = q + gap;
        let closed = planted_divergence(p, q, pi[i], pi[j]).unwrap().value;
        let numeric = ch_divergence_numeric(&planted_matrix(r, p, q), &pi, i, j).unwrap().value;
        prop_assert!((closed - numeric).abs() <= 1e-9 * closed.abs().max(1.0), "{closed} vs {numeric}");
    }
}

proptest! {
    #[test]
    fn divergence_is_symmetric(q in 0.1f64..20.0, gap in 0.0f64..30.0, a in 0.01f64..0.9, b in 0.01f64..0.9) {
        let p = q + gap;
        let ab = planted_divergence(p, q, a, b).unwrap().value;
        let ba = planted_divergence(p, q, b, a).unwrap().value;
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn divergence_nondecreasing_in_proportions(
        q in 0.1f64..10.0,
        gap in 0.01f64..30.0,
        a in 0.01f64..0.6,
        b in 0.01f64..0.6,
        angle in 0.0f64..std::f64::consts::FRAC_PI_2,
    ) {
        let p = q + gap;
        let (da, db) = (1e-4 * angle.cos(), 1e-4 * angle.sin());
        let here = planted_divergence(p, q, a, b).unwrap().value;
        let there = planted_divergence(p, q, a + da, b + db).unwrap().value;
        prop_assert!(there - here >= -1e-8, "{here} -> {there}");
    }

    #[test]
    fn graph_text_round_trip(g in graph_strategy()) {
        let text = format_graph(&g);
        let back = parse_graph(&text, Path::new("<prop>")).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(format_graph(&back), text);
    }

    #[test]
    fn labels_text_round_trip(l in labels_strategy()) {
        let back = parse_labels(&format_labels(&l), Path::new("<prop>")).unwrap();
        prop_assert!(back.same_partition(&l));
        prop_assert_eq!(back.sizes().iter().sum::<usize>(), l.n());
    }

    #[test]
    fn random_monotone_adversary_is_monotone(
        l in labels_strategy(),
        p in 0.0f64..1.0,
        q in 0.0f64..1.0,
        add in 0.0f64..1.0,
        rem in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let g = sample_planted(&l, p, q, seed).unwrap();
        let spec = AdversarySpec::RandomMonotone { delta_add: add, delta_rem: rem };
        let out = apply_adversary(&g, &l, &spec, seed ^ 1).unwrap();
        prop_assert!(is_monotone_modification(&g, &out.graph, &l));
        let m = g.m() + out.added.len() - out.removed.len();
        prop_assert_eq!(out.graph.m(), m);
    }

    #[test]
    fn objective_step_on_single_changes(l in labels_strategy(), seed in any::<u64>()) {
        let g = sample_planted(&l, 0.5, 0.5, seed).unwrap();
        let x = centered_partition_matrix(&l);
        let r = l.r() as f64;
        let base = objective_value(&g, &x, None).unwrap();
        let n = l.n();
        let intra_missing = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .find(|&(u, v)| l.same_community(u, v) && !g.has_edge(u, v));
        if let Some((u, v)) = intra_missing {
            let mut h = g.clone();
            h.add_edge(u, v);
            prop_assert!((objective_value(&h, &x, None).unwrap() - base - 2.0).abs() < 1e-12);
        }
        let inter = g.edges().find(|&(u, v)| !l.same_community(u, v));
        if let Some((u, v)) = inter {
            let mut h = g.clone();
            h.remove_edge(u, v);
            let gain = objective_value(&h, &x, None).unwrap() - base;
            prop_assert!((gain - 2.0 / (r - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn objective_invariant_under_relabeling(l in labels_strategy(), shift in 1usize..4, seed in any::<u64>()) {
        let g = sample_planted(&l, 0.6, 0.2, seed).unwrap();
        let r = l.r();
        let moved = PartitionLabels::new(l.labels().iter().map(|&c| (c + shift) % r).collect(), r).unwrap();
        let a = objective_value(&g, &partition_matrix(&l), Some(0.3)).unwrap();
        let b = objective_value(&g, &partition_matrix(&moved), Some(0.3)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn omega_approaches_tau_scaled_rate() {
    let (pt, qt) = (8.0, 2.0);
    let gaps: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&n: &f64| {
            let s = n.ln() / n;
            (compute_omega(pt * s, qt * s).unwrap() / s - tau(pt, qt)).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn loglikelihood_ranks_like_edge_count_for_fixed_sizes() {
    // equal-size relabelings of one sample: ranking by <A, X> equals ranking by log L
    let params = PlantedPartitionParams::new(12, vec![0.5, 0.5], 4.0, 1.0).unwrap();
    let (g, truth) = sample_ppm(&params, 21).unwrap();
    let mut scored = Vec::new();
    for mask in 0u32..(1 << 12) {
        if mask.count_ones() != 6 || mask & 1 == 0 {
            continue;
        }
        let l = PartitionLabels::new((0..12).map(|v| ((mask >> v) & 1 ^ 1) as usize).collect(), 2).unwrap();
        let edges = objective_value(&g, &partition_matrix(&l), None).unwrap();
        scored.push((edges, loglikelihood(&g, &l, params.p(), params.q()).unwrap()));
    }
    assert_eq!(scored.len(), 462);
    for a in &scored {
        for b in &scored {
            if a.0 < b.0 {
                assert!(a.1 < b.1, "{a:?} {b:?}");
            }
        }
    }
    let best = scored.iter().map(|s| s.0).fold(f64::MIN, f64::max);
    assert!(objective_value(&g, &partition_matrix(&truth), None).unwrap() <= best);
}

#[test]
fn sampling_is_reproducible() {
    let params = PlantedPartitionParams::new(200, vec![0.5, 0.3, 0.2], 20.0, 2.0).unwrap();
    let (a, la) = sample_ppm(&params, 99).unwrap();
    let (b, lb) = sample_ppm(&params, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(la, lb);
    let (c, _) = sample_ppm(&params, 100).unwrap();
    assert_ne!(a, c);
}
