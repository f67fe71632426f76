//! Key rate of the CHSH protocol against state visibility, as CSV.
//!
//! ```bash
//! cargo run --release -p diqkd --example keyrate_sweep > chsh_visibility.csv
//! ```

use diqkd::entropy::RelaxationConfig;
use diqkd::keyrate::{sweep, Protocol, SweepAxis};

fn main() -> Result<(), diqkd::error::Error> {
    let grid = [1.0, 0.98, 0.96, 0.94, 0.92, 0.9, 0.88, 0.86];
    let result = sweep(
        Protocol::Chsh { eps: 0.5 },
        SweepAxis::Visibility,
        &grid,
        0.9,
        &RelaxationConfig::default(),
        1,
        |point, _, node| eprintln!("point {point} node {} {}", node.index, node.status),
    )?;
    result.write_csv(std::io::stdout().lock())?;
    Ok(())
}
