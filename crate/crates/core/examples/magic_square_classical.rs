//! Exhaustive search over deterministic magic-square strategies.
//!
//! ```bash
//! cargo run -p diqkd --example magic_square_classical
//! ```

use diqkd::games::{classical_value, mpg_row_bits, mpg_col_bits, mpg_spec, DeterministicStrategy};

fn main() {
    let g = mpg_spec();
    let (value, best) = classical_value(&g);
    println!("classical value = {value} ({} of 9 cells)", best.wins(&g));
    println!("first maximizer: alice {:?}, bob {:?}", best.alice, best.bob);

    let fill = DeterministicStrategy::mpg_table_one();
    println!("\nfill strategy used for undetected rounds:");
    for x in 0..3 {
        println!("  row {x}: {:?}", mpg_row_bits(fill.alice[x]));
    }
    for y in 0..3 {
        println!("  col {y}: {:?}", mpg_col_bits(fill.bob[y]));
    }
    for x in 0..3 {
        let cells: Vec<&str> = (0..3)
            .map(|y| if g.wins(x, y, fill.alice[x], fill.bob[y]) { "win" } else { "lose" })
            .collect();
        println!("  x = {x}: {cells:?}");
    }
}
