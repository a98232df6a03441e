//! The sum of squared pair degrees, recounted through glued copies.

use klr_lab::census::glued_identity;
use klr_lab::pattern::PatternGraph;
use klr_lab::rng::SeedSpec;
use klr_lab::sampler::sample_gnm_h;

fn main() -> klr_lab::Result<()> {
    let h: PatternGraph = "K4-e".parse()?;
    let g = sample_gnm_h(&h, 6, 20, &SeedSpec::new(3, "glued"))?;
    let id = glued_identity(&g, &h, 0, 2)?;
    for (label, count) in &id.per_pattern {
        println!("{label:>12}: {count}");
    }
    println!("sum of deg^2 = {}, glued total = {}", id.sum_of_squares, id.glued_total);
    assert!(id.holds());
    Ok(())
}
