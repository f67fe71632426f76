//! Monte-Carlo runs of both protocols.
//!
//! ```bash
//! cargo run --release -p diqkd --example protocol_simulation
//! ```

use diqkd::keyrate::{ideal_behavior, sweep_behavior, Protocol, SweepAxis};
use diqkd::protocol::{run_protocol, ProtocolConfig};

fn main() -> Result<(), diqkd::error::Error> {
    let gamma = 0.9;
    for q in [1.0, 0.98, 0.9] {
        let b = sweep_behavior(Protocol::Mpg, SweepAxis::Qber, (1.0 - q) / 2.0, gamma)?;
        let mut cfg = ProtocolConfig::new(Protocol::Mpg, 100_000, gamma, 0.98, 7);
        cfg.devetak_winter = Some(0.5);
        let r = run_protocol(&cfg, &b)?;
        println!(
            "MPG q = {q}: aborted {}  ω̂ = {:.5}  raw key {}  disagreement {:?}  final key ≈ {:?}",
            r.aborted,
            r.estimated_score.unwrap_or(f64::NAN),
            r.raw_key_length,
            r.disagreement_fraction,
            r.final_key_length
        );
    }

    let protocol = Protocol::Chsh { eps: 0.5 };
    let cfg = ProtocolConfig::new(protocol, 100_000, gamma, 0.84, 11);
    let r = run_protocol(&cfg, &ideal_behavior(protocol, gamma)?)?;
    println!(
        "CHSH ε = 0.5: aborted {}  Î = {:.5}  test rounds {}  key rounds {}",
        r.aborted,
        r.estimated_score.unwrap_or(f64::NAN),
        r.test_rounds,
        r.raw_key_length
    );
    Ok(())
}
