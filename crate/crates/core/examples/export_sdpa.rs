//! Writes the node SDPs of a magic-square bound in SDPA format, for solving
//! with an external solver.
//!
//! ```bash
//! cargo run -p diqkd --example export_sdpa -- /tmp/mpg-nodes
//! ```

use std::path::PathBuf;

use diqkd::entropy::{node_problems, BoundInput, RelaxationConfig};
use diqkd::games::mpg_spec;
use diqkd_sdp::export_sdpa;

fn main() -> Result<(), diqkd::error::Error> {
    let dir: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "mpg-nodes".into()).into();
    std::fs::create_dir_all(&dir)?;
    let g = mpg_spec();
    let cfg = RelaxationConfig::default();
    let (rule, relax, problems) = node_problems(&g, &BoundInput::Score(0.98), (0, 0), &cfg)?;
    println!("moment matrix {} with {} variables", relax.size(), relax.num_variables());
    for (k, (p, offset)) in problems.iter().enumerate() {
        let path = dir.join(format!("node{k:02}.dat-s"));
        std::fs::write(&path, export_sdpa(p))?;
        println!(
            "{}: t = {:.6}, c_k = {:.6}, add {offset} to the optimum",
            path.display(),
            rule.nodes[k],
            rule.coefficients()[k]
        );
    }
    println!("H(A|E) ≥ {:.6} + Σ c_k · optimum_k", rule.constant());
    Ok(())
}
