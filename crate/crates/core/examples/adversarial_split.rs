//! A triangle-free member of G(K3, n, m) that is far from lower-regular.

use klr_lab::census::count_canonical;
use klr_lab::pattern::PatternGraph;
use klr_lab::regularity::{check_blowup, CheckOptions, Mode, RegularityParams};
use klr_lab::rng::SeedSpec;
use klr_lab::sampler::adversarial_split;

fn main() -> klr_lab::Result<()> {
    let g = adversarial_split(12, 36, &SeedSpec::new(1, "example"))?;
    println!("triangles: {}", count_canonical(&g, &PatternGraph::triangle())?);
    let params = RegularityParams::constant(0.25, 0.5)?;
    for ((i, j), v) in check_blowup(&g, &params, Mode::Exact, &CheckOptions::default())? {
        print!("block {i}-{j}: {:?}", v.status);
        if let Some(w) = v.witness {
            print!(" rows {:?} cols {:?} density {:.3}", w.a_side, w.b_side, w.density);
        }
        println!();
    }
    Ok(())
}
