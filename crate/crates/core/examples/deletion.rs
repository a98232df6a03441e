//! Kill every triangle with few edges, then tame the second moment of K3 - e.

use klr_lab::deletion::{deletion_for_second_moment, deletion_set};
use klr_lab::pattern::PatternGraph;
use klr_lab::rng::SeedSpec;
use klr_lab::sampler::sample_gnm_h;

fn main() -> klr_lab::Result<()> {
    let k3 = PatternGraph::triangle();
    let g = sample_gnm_h(&k3, 20, 30, &SeedSpec::new(5, "deletion"))?;
    for budget in [3, 9, 30] {
        let out = deletion_set(&g, &k3, budget)?;
        println!(
            "budget {budget:>2}: {:?}, removed {} edges",
            out.status, out.removed_size
        );
    }
    let sub: PatternGraph = "K3-e".parse()?;
    let dense = sample_gnm_h(&k3, 20, 60, &SeedSpec::new(5, "dense"))?;
    let out = deletion_for_second_moment(&dense, &sub, 0, 1, 8.0, 2.0)?;
    println!(
        "second moment: ratio {:.3} -> {:.3} after removing {} edges ({:?})",
        out.ratio_before.unwrap_or(f64::NAN),
        out.measured_t.unwrap_or(f64::NAN),
        out.removed_size,
        out.status
    );
    Ok(())
}
