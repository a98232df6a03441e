//! Exact, heuristic and spectral verdicts on the same blocks.

use klr_lab::pattern::PatternGraph;
use klr_lab::regularity::{check_exact, check_heuristic, check_spectral, RegularityParams, DEFAULT_ENUMERATION_CAP};
use klr_lab::rng::SeedSpec;
use klr_lab::sampler::sample_gnm_h;

fn main() -> klr_lab::Result<()> {
    let params = RegularityParams::constant(0.5, 0.3)?;
    let k2 = PatternGraph::complete(2);
    println!(
        "{:>4} {:>18} {:>18} {:>18} {:>10}",
        "m", "exact", "heuristic", "spectral", "norm bound"
    );
    for m in [20, 50, 80, 110, 140] {
        let g = sample_gnm_h(&k2, 12, m, &SeedSpec::new(m as u64, "modes"))?;
        let block = g.block(0, 1).expect("block");
        let exact = check_exact(block, &params, DEFAULT_ENUMERATION_CAP)?;
        let heuristic = check_heuristic(block, &params, 8, &SeedSpec::new(0, "heuristic"));
        let spectral = check_spectral(block, &params);
        println!(
            "{m:>4} {:>18} {:>18} {:>18} {:>10.3}",
            format!("{:?}", exact.status),
            format!("{:?}", heuristic.status),
            format!("{:?}", spectral.status),
            spectral.norm_bound.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
