//! Maximum 2-density and the edge threshold exponent of small patterns.

use klr_lab::pattern::{phi, two_density, PatternGraph};

fn main() -> klr_lab::Result<()> {
    for name in ["P3", "K3", "C4", "C5", "K4-e", "K4", "K5"] {
        let h: PatternGraph = name.parse()?;
        let d = two_density(&h)?;
        let n = 100u64;
        let m = (n as f64).powf(d.threshold_exponent()).round() as u64;
        println!(
            "{name:>5}: m2 = {:>4}, threshold n^{:.3}, at n = {n}: m = {m:>5}, Phi = {:.2}",
            d.value.to_string(),
            d.threshold_exponent(),
            phi(&h, n, m)?.value()
        );
    }
    Ok(())
}
