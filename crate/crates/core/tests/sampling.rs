use ppm_sdp::adversary::{apply_adversary, domination_probabilities, simulate_dominating_sbm, AdversarySpec};
use ppm_sdp::io::{format_graph, read_graph, write_graph};
use ppm_sdp::model::{sample_ppm, PlantedPartitionParams};
use ppm_sdp::thresholds::hierarchical_matrix;

#[test]
fn intra_degree_mean_matches_binomial() {
    let params = PlantedPartitionParams::new(200, vec![0.5, 0.5], 20.0, 2.0).unwrap();
    let p = params.p();
    let trials = 100;
    let mut total = 0.0;
    for seed in 0..trials {
        let (g, truth) = sample_ppm(&params, seed).unwrap();
        let deg = g.community_degrees(&truth);
        total += deg[0][truth.label(0)] as f64;
    }
    let mean = total / trials as f64;
    let m = 99.0;
    let sd = (m * p * (1.0 - p) / trials as f64).sqrt();
    assert!((mean - m * p).abs() < 3.0 * sd, "{mean} vs {}", m * p);
}

#[test]
fn inter_block_counts_concentrate() {
    // 4 sigma per pair; a failure here is a 1-in-15000 event per pair
    let params = PlantedPartitionParams::new(300, vec![0.5, 0.3, 0.2], 12.0, 3.0).unwrap();
    let q = params.q();
    for seed in 0..20 {
        let (g, truth) = sample_ppm(&params, 40 + seed).unwrap();
        let counts = g.block_edge_counts(&truth);
        let s = truth.sizes();
        for i in 0..3 {
            for j in i + 1..3 {
                let mean = (s[i] * s[j]) as f64 * q;
                let got = counts[i][j] as f64;
                assert!((got - mean).abs() <= 4.0 * mean.sqrt(), "blocks ({i},{j}): {got} vs {mean}");
            }
        }
    }
}

#[test]
fn planted_clique_adds_exactly_the_missing_pairs() {
    let params = PlantedPartitionParams::new(200, vec![0.5, 0.5], 8.0, 2.0).unwrap();
    let (g, truth) = sample_ppm(&params, 12).unwrap();
    let spec = AdversarySpec::SubcommunityPlant {
        community: 0,
        size: 8,
        density: 1.0,
    };
    let out = apply_adversary(&g, &truth, &spec, 5).unwrap();
    let mut touched: Vec<usize> = out.added.iter().flat_map(|&(u, v)| [u, v]).collect();
    touched.sort_unstable();
    touched.dedup();
    assert!(touched.len() <= 8);
    assert!(out.removed.is_empty());
    // the 8 chosen vertices now form a clique; only previously missing pairs were logged
    for &(u, v) in &out.added {
        assert!(!g.has_edge(u, v) && out.graph.has_edge(u, v));
        assert_eq!(truth.label(u), 0);
    }
    for (a, &u) in touched.iter().enumerate() {
        for &v in &touched[a + 1..] {
            assert!(out.graph.has_edge(u, v));
        }
    }
}

#[test]
fn nested_model_only_thins_cross_group_blocks() {
    let (a, b, c) = (33.6, 9.0, 1.0);
    let base = PlantedPartitionParams::new(200, vec![0.25; 4], a, b).unwrap();
    let probs = domination_probabilities(&hierarchical_matrix(a, b, c), &base).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = if i / 2 != j / 2 { (b - c) / b } else { 0.0 };
            assert!((probs[i][j] - want).abs() < 1e-12, "({i},{j}) {}", probs[i][j]);
        }
    }
    let (g, truth) = sample_ppm(&base, 2).unwrap();
    let out = simulate_dominating_sbm(&g, &truth, &hierarchical_matrix(a, b, c), &base, 2).unwrap();
    assert!(out.added.is_empty());
    for &(u, v) in &out.removed {
        assert_ne!(truth.label(u) / 2, truth.label(v) / 2);
    }
}

#[test]
fn graph_file_write_read_write_is_a_fixpoint() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let params = PlantedPartitionParams::new(200, vec![0.5, 0.3, 0.2], 20.0, 2.0).unwrap();
    let (g, _) = sample_ppm(&params, 3).unwrap();
    write_graph(&path, &g).unwrap();
    let first = std::fs::read(&path).unwrap();
    let back = read_graph(&path).unwrap();
    write_graph(&path, &back).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
    assert_eq!(format_graph(&back).as_bytes(), &first[..]);
}
