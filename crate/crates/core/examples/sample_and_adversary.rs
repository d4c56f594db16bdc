//! Draw a planted partition graph, write it to disk, and run each monotone
//! adversary from the catalog against it.
//!
//!     cargo run --release --example sample_and_adversary

use ppm_sdp::adversary::{apply_adversary, is_monotone_modification, simulate_dominating_sbm, AdversarySpec};
use ppm_sdp::io::{read_graph, write_graph, write_labels};
use ppm_sdp::model::{sample_ppm, PlantedPartitionParams};

fn main() -> ppm_sdp::Result<()> {
    let params = PlantedPartitionParams::new(200, vec![0.5, 0.3, 0.2], 20.0, 2.0)?;
    let (g, truth) = sample_ppm(&params, 2024)?;
    println!(
        "n = {}, m = {}, sizes = {:?}, p = {:.4}, q = {:.4}",
        g.n(),
        g.m(),
        truth.sizes(),
        params.p(),
        params.q()
    );

    let dir = std::env::temp_dir().join("ppm-sdp-example");
    std::fs::create_dir_all(&dir).map_err(|e| ppm_sdp::Error::Io { path: dir.clone(), source: e })?;
    write_graph(dir.join("graph.txt"), &g)?;
    write_labels(dir.join("labels.txt"), &truth)?;
    assert_eq!(read_graph(dir.join("graph.txt"))?, g);
    println!("wrote {}", dir.display());

    let catalog = [
        AdversarySpec::RandomMonotone { delta_add: 0.3, delta_rem: 0.3 },
        AdversarySpec::SubcommunityPlant { community: 0, size: 8, density: 1.0 },
        AdversarySpec::HubPlant { hubs: 5, degree: 20 },
    ];
    for spec in &catalog {
        let out = apply_adversary(&g, &truth, spec, 7)?;
        println!(
            "{:<60} +{:>4} -{:>4} monotone = {}",
            format!("{spec:?}"),
            out.added.len(),
            out.removed.len(),
            is_monotone_modification(&g, &out.graph, &truth)
        );
    }

    // a block model that dominates the sample: denser inside, sparser across
    let target = vec![
        vec![24.0, 1.0, 1.5],
        vec![1.0, 22.0, 2.0],
        vec![1.5, 2.0, 20.0],
    ];
    let sbm = simulate_dominating_sbm(&g, &truth, &target, &params, 7)?;
    println!("dominating SBM: +{} -{}", sbm.added.len(), sbm.removed.len());
    Ok(())
}
