//! The interior-point solver on a small problem, and an SDPA round trip.
//!
//! ```bash
//! cargo run -p diqkd --example sdp_solver
//! ```

use diqkd_sdp::{export_sdpa, import_sdpa, solve, BlockKind, SdpProblem, SolverOptions, SymSparse};

fn main() -> Result<(), diqkd_sdp::SdpError> {
    // minimize t subject to t·I - Z ⪰ 0, i.e. the largest eigenvalue of Z
    let z = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, -1.0]];
    let mut p = SdpProblem::new(vec![BlockKind::Psd(3)]);
    for (i, row) in z.iter().enumerate() {
        for (j, &v) in row.iter().enumerate().skip(i) {
            p.constant.add(0, i, j, v);
        }
    }
    let mut t = SymSparse::new();
    for i in 0..3 {
        t.add(0, i, i, 1.0);
    }
    p.add_variable(1.0, t);

    let sol = solve(&p, &SolverOptions::default())?;
    println!(
        "status {}  primal {:.10}  dual {:.10}  gap {:.1e}  iterations {}",
        sol.status.as_str(),
        sol.primal_value,
        sol.dual_value,
        sol.gap,
        sol.iterations
    );

    let text = export_sdpa(&p);
    print!("SDPA file:\n{text}");
    let back = import_sdpa(&text)?;
    println!("round trip is byte-identical: {}", export_sdpa(&back) == text);
    Ok(())
}
