//! Estimate P(few triangles | regular) for a small host with a Wilson interval.

use klr_lab::lab::{estimate_samples, ExperimentConfig, RunOptions};

fn main() -> klr_lab::Result<()> {
    for m in [48, 72, 96] {
        let cfg = ExperimentConfig::from_json(&format!(
            r#"{{"kind":"estimate","pattern":"K3","n":12,"m":{m},"eps":0.5,"lambda":0.25,
                "gamma":0.9,"samples":400,"seed":1}}"#
        ))?;
        let (r, _) = estimate_samples(&cfg, &RunOptions::from_env(false))?;
        println!(
            "m = {m:>3}: {:>3} regular, {:>3} events, estimate {:.3} [{:.3}, {:.3}]",
            r.regular_count, r.event_count, r.point_estimate, r.wilson95.lo, r.wilson95.hi
        );
    }
    Ok(())
}
