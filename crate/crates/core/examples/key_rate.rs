//! Devetak-Winter and protocol key rates from given entropy bounds.
//!
//! ```bash
//! cargo run -p diqkd --example key_rate
//! ```

use diqkd::keyrate::{binary_entropy, chsh_key_rate, h_a_given_b, ideal_behavior, mpg_key_rate, sweep_behavior, Protocol, SweepAxis};
use diqkd::games::mpg_spec;

fn main() -> Result<(), diqkd::error::Error> {
    let gamma = 0.9;
    let ideal = ideal_behavior(Protocol::Mpg, gamma)?;
    let r = mpg_key_rate(&[[1.0; 3]; 3], &ideal, gamma)?;
    println!("magic square, ideal: R = {} (γ = {gamma})", r.rate);

    let eps = 0.3;
    let ideal = ideal_behavior(Protocol::Chsh { eps }, gamma)?;
    let r = chsh_key_rate(1.0, &ideal, gamma, eps)?;
    println!("CHSH ε = {eps}, ideal: R = {} (γ(1-ε)/2 = {})", r.rate, gamma * (1.0 - eps) / 2.0);

    // H(A|B) of the isotropic family is the binary entropy of the QBER
    let g = mpg_spec();
    for q in [0.01, 0.02, 0.03, 0.05] {
        let b = sweep_behavior(Protocol::Mpg, SweepAxis::Qber, q, gamma)?;
        println!("Q = {q}: H(A|B) = {:.9}, h(Q) = {:.9}", h_a_given_b(&g, &b, (1, 2))?, binary_entropy(q));
    }
    Ok(())
}
