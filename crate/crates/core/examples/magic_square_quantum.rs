//! The optimal quantum magic-square strategy and its key-bit statistics.
//!
//! ```bash
//! cargo run -p diqkd --example magic_square_quantum
//! ```

use diqkd::games::{behavior_from_strategy, mpg_optimal_strategy, mpg_spec, per_pair_winning, winning_probability};

fn main() -> Result<(), diqkd::error::Error> {
    let g = mpg_spec();
    let b = behavior_from_strategy(&mpg_optimal_strategy(), &g)?;
    println!("ω = {:.12}", winning_probability(&g, &b)?);
    println!("max no-signaling violation = {:.2e}", b.signaling());
    for (x, y, w) in per_pair_winning(&g, &b)? {
        // distribution of the shared key bit on this input pair
        let mut p = [[0.0; 2]; 2];
        for a in 0..4 {
            for bb in 0..4 {
                let (ka, kb) = g.key_bits(x, y, a, bb);
                p[ka as usize][kb as usize] += b.p(x, y, a, bb);
            }
        }
        println!(
            "({x},{y}) win {w:.6}  P(00) {:.6}  P(11) {:.6}  P(01)+P(10) {:.1e}",
            p[0][0],
            p[1][1],
            p[0][1] + p[1][0]
        );
    }
    Ok(())
}
