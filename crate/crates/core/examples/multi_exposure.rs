//! Expose a C4 host in rounds and watch the uncovered pair set shrink.

use klr_lab::lab::multi_exposure_experiment;

fn main() -> klr_lab::Result<()> {
    let trace = multi_exposure_experiment(&"C4".parse()?, 10, 60, 3, (0, 1), 11)?;
    println!("m = {} (asked {}), {} chunks", trace.m, trace.m_requested, 2 * trace.z);
    println!("round 0: |D| = {}", trace.initial);
    for r in &trace.rounds {
        println!("round {}: |D| = {}, covered {}", r.round, r.d_size, r.covered);
    }
    println!("edges of the host surviving in D: {}", trace.surviving);
    Ok(())
}
