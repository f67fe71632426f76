//! Visibility, detection efficiency and isotropic noise on the magic square.
//!
//! ```bash
//! cargo run -p diqkd --example noise_models
//! ```

use diqkd::games::{behavior_from_strategy, mpg_optimal_strategy, mpg_spec, winning_probability};
use diqkd::keyrate::default_fill;
use diqkd::noise::{apply_detection_efficiency, apply_visibility, mix_isotropic, qber};

fn main() -> Result<(), diqkd::error::Error> {
    let g = mpg_spec();
    let ideal = behavior_from_strategy(&mpg_optimal_strategy(), &g)?;

    println!("visibility ν (state ρ_ν ⊗ ρ_ν):");
    for nu in [1.0, 0.99, 0.97, 0.959, 0.9] {
        let b = behavior_from_strategy(&mpg_optimal_strategy().with_state(apply_visibility(nu, 2)?), &g)?;
        println!("  ν = {nu:<6} ω = {:.9}  Q = {:.9}", winning_probability(&g, &b)?, qber(&b, &g)?);
    }

    println!("detection efficiency η (fill strategy for no-clicks):");
    for eta in [1.0, 0.99, 0.969, 0.9] {
        let b = apply_detection_efficiency(&ideal, eta, &default_fill(&g), &g)?;
        println!(
            "  η = {eta:<6} ω = {:.9}  Q = {:.9}  signaling {:.1e}",
            winning_probability(&g, &b)?,
            qber(&b, &g)?,
            b.signaling()
        );
    }

    println!("isotropic Φ_q:");
    for q in [1.0, 0.96, 0.9, 0.5] {
        let b = behavior_from_strategy(&mpg_optimal_strategy().with_state(mix_isotropic(q)?), &g)?;
        println!(
            "  q = {q:<6} ω = {:.9} (1+q)/2 = {:.9}  Q = {:.9}",
            winning_probability(&g, &b)?,
            (1.0 + q) / 2.0,
            qber(&b, &g)?
        );
    }
    Ok(())
}
