//! Gauss-Radau rules on [0, 1] with the right endpoint fixed, and the
//! coefficients of the entropy bound.
//!
//! ```bash
//! cargo run -p diqkd --example gauss_radau
//! ```

use diqkd::entropy::gauss_radau;

fn main() -> Result<(), diqkd::error::Error> {
    for m in [2, 4, 8] {
        let rule = gauss_radau(m)?;
        println!("m = {m}");
        for (k, ((t, w), c)) in rule.nodes.iter().zip(&rule.weights).zip(rule.coefficients()).enumerate() {
            println!("  t_{k} = {t:.15}  w_{k} = {w:.15}  c_{k} = {c:.12}");
        }
        println!("  c_m = {:.12}", rule.constant());
        // exact on polynomials of degree 2m - 2
        let d = 2 * m - 2;
        let err = rule.integrate(|t| t.powi(d as i32)) - 1.0 / (d as f64 + 1.0);
        println!("  ∫ t^{d} error = {err:.2e}");
    }
    Ok(())
}
