//! Biased CHSH: quantum versus classical winning probability.
//!
//! ```bash
//! cargo run -p diqkd --example biased_chsh
//! ```

use diqkd::games::{
    behavior_from_strategy, chsh_angle, chsh_optimal_strategy, chsh_spec, classical_value, winning_probability,
};

fn main() -> Result<(), diqkd::error::Error> {
    println!("{:>5} {:>10} {:>12} {:>12}", "ε", "μ", "quantum", "classical");
    for eps in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let g = chsh_spec(eps, 0.9)?;
        let b = behavior_from_strategy(&chsh_optimal_strategy(eps)?, &g)?;
        let (classical, _) = classical_value(&g);
        println!(
            "{eps:>5} {:>10.6} {:>12.9} {:>12.9}",
            chsh_angle(eps),
            winning_probability(&g, &b)?,
            classical
        );
    }
    println!("(2+√2)/4 = {:.12}", (2.0 + 2f64.sqrt()) / 4.0);
    Ok(())
}
