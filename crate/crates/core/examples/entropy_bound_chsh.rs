//! H(A|E) bound for the CHSH key bit as a function of the observed score.
//!
//! ```bash
//! cargo run --release -p diqkd --example entropy_bound_chsh
//! ```

use diqkd::entropy::{entropy_lower_bound, BoundInput, RelaxationConfig};
use diqkd::games::chsh_spec;

fn main() -> Result<(), diqkd::error::Error> {
    let eps = 0.5;
    let g = chsh_spec(eps, 0.9)?;
    let cfg = RelaxationConfig::default();
    let tsirelson = (2.0 + 2f64.sqrt()) / 4.0;
    for score in [0.75, 0.78, 0.80, 0.82, 0.84, tsirelson] {
        let b = entropy_lower_bound(&g, &BoundInput::Score(score), (0, 2), &cfg)?;
        println!("I = {score:.6}  H(A|E) ≥ {:.6}  (raw {:+.6})", b.value, b.raw);
    }
    Ok(())
}
