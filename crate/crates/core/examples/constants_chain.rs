//! The constants chain for K3 with the spanning subgraph K3 - e.

use klr_lab::lab::{derive_constants, ConstantInputs};
use klr_lab::pattern::PatternGraph;

fn main() -> klr_lab::Result<()> {
    let inputs = ConstantInputs {
        lambda: 0.5,
        beta: 0.5,
        d: 0.5,
        eps: 0.1,
        xi_pp: 0.1,
        gamma_pp: 0.01,
        t: 100.0,
    };
    let ledger = derive_constants(&PatternGraph::triangle(), &"K3-e".parse()?, &inputs, 100, 4000)?;
    println!("{}", serde_json::to_string_pretty(&ledger)?);
    let bad = ledger.violations();
    println!(
        "chain {}",
        if bad.is_empty() {
            "holds".to_string()
        } else {
            format!("fails: {bad:?}")
        }
    );
    Ok(())
}
