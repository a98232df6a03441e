//! Copy count, pair degrees and rich pairs of K4 across densities.

use klr_lab::census::census;
use klr_lab::pattern::PatternGraph;
use klr_lab::rng::SeedSpec;
use klr_lab::sampler::sample_gnm_h;

fn main() -> klr_lab::Result<()> {
    let h = PatternGraph::complete(4);
    let n = 10;
    println!(
        "{:>4} {:>8} {:>10} {:>10} {:>6} {:>8}",
        "m", "Z", "mu_e", "T", "rich", "poor"
    );
    for m in [30, 50, 70, 90] {
        let g = sample_gnm_h(&h, n, m, &SeedSpec::new(7, "census"))?;
        let r = census(&g, &h, 0, 1, 0.5, None)?;
        println!(
            "{m:>4} {:>8} {:>10.3} {:>10.3} {:>6} {:>8}",
            r.z,
            r.mu_e.value(),
            r.ratio_t,
            r.rich_count,
            r.poor_count
        );
    }
    Ok(())
}
