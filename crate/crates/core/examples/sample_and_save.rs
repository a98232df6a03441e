//! Sample a member of G(C4, n, m), write it to disk and read it back.

use klr_lab::blowup::BlowupGraph;
use klr_lab::pattern::PatternGraph;
use klr_lab::rng::SeedSpec;
use klr_lab::sampler::sample_gnm_h;

fn main() -> klr_lab::Result<()> {
    let h: PatternGraph = "C4".parse()?;
    let g = sample_gnm_h(&h, 8, 20, &SeedSpec::new(42, "example"))?;
    let path = std::env::temp_dir().join("klr-sample.json");
    g.save(&path)?;
    let back = BlowupGraph::load(&path)?;
    assert_eq!(back, g);
    println!("pattern {}, n = {}, {} edges", h, g.n(), g.edge_count());
    for (i, j) in g.block_keys() {
        println!("  block {i}-{j}: {} edges", g.block_edge_count(i, j));
    }
    println!("saved to {}", path.display());
    Ok(())
}
