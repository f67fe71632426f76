//! Moment matrices for the node problems, with and without symmetry
//! reduction.
//!
//! ```bash
//! cargo run -p diqkd --example moment_relaxation
//! ```

use diqkd::entropy::{node_objective, MonomialSet, Observed, Relaxation};
use diqkd::games::{chsh_spec, mpg_spec};

fn main() -> Result<(), diqkd::error::Error> {
    let cases = [
        ("magic square", mpg_spec(), (0, 0), 8.0 / 9.0 + 0.1),
        ("biased CHSH ε=0.5", chsh_spec(0.5, 0.9)?, (0, 2), 0.8),
    ];
    for (name, g, key, score) in cases {
        for set in ["1+A+B+Z", "1+A+B+Z+AB+AZ+BZ"] {
            let monomials = MonomialSet::parse(set)?;
            let relax = Relaxation::new(&g, &Observed::Score(score), &monomials, key, true)?;
            println!(
                "{name:<18} {set:<18} matrix {:>4}  variables {:>5} (unreduced {:>5}, group order {})",
                relax.size(),
                relax.num_variables(),
                relax.unreduced_variables,
                relax.symmetry_order
            );
        }
    }

    // One node SDP in SDPA convention.
    let g = chsh_spec(0.5, 0.9)?;
    let relax = Relaxation::new(&g, &Observed::Score(0.8), &MonomialSet::restricted_level_two(), (0, 2), true)?;
    let (problem, offset) = relax.problem_for(&node_objective(&g, (0, 2), 0.5)?)?;
    println!(
        "CHSH node at t = 0.5: {} variables, blocks {:?}, objective offset {offset}",
        problem.num_variables(),
        problem.blocks
    );
    Ok(())
}
