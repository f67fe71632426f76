use diqkd_sdp::{
    export_sdpa, import_sdpa, solve, BlockKind, Certificate, SdpProblem, SolveStatus, SolverOptions, SymSparse,
};
use proptest::prelude::*;

fn toy() -> SdpProblem {
    let mut p = SdpProblem::new(vec![BlockKind::Psd(2)]);
    p.constant.add(0, 0, 0, -1.0);
    p.constant.add(0, 1, 1, -1.0);
    let mut f1 = SymSparse::new();
    f1.add(0, 0, 0, 1.0);
    p.add_variable(1.0, f1);
    p
}

/// min t s.t. t I - Z ⪰ 0 for a fixed symmetric Z: optimum is lambda_max(Z).
fn max_eigenvalue_problem(z: &[[f64; 3]; 3]) -> SdpProblem {
    let mut p = SdpProblem::new(vec![BlockKind::Psd(3)]);
    for i in 0..3 {
        for j in i..3 {
            p.constant.add(0, i, j, z[i][j]);
        }
    }
    let mut t = SymSparse::new();
    for i in 0..3 {
        t.add(0, i, i, 1.0);
    }
    p.add_variable(1.0, t);
    p
}

#[test]
fn toy_problem_optimum() {
    let sol = solve(&toy(), &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value + 1.0).abs() < 1e-6, "{}", sol.primal_value);
    assert!((sol.dual_value + 1.0).abs() < 1e-6, "{}", sol.dual_value);
    let y = &sol.dual_matrix[0];
    assert!((y.get(0, 0) - 1.0).abs() < 1e-6);
    assert!(y.get(1, 1).abs() < 1e-6);
}

#[test]
fn largest_eigenvalue_of_fixed_matrix() {
    // eigenvalues of [[2,1,0],[1,2,0],[0,0,-1]] are 3, 1, -1
    let z = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, -1.0]];
    let sol = solve(&max_eigenvalue_problem(&z), &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value - 3.0).abs() < 1e-6);
    assert!((sol.dual_value - 3.0).abs() < 1e-6);
}

#[test]
fn mixed_blocks_linear_program() {
    // min x1 + x2 s.t. x1 >= 1, x2 >= 2, [[x1, 1], [1, x2]] ⪰ 0.
    // Optimum: x1 = 1, x2 = 2 (x1 x2 = 2 >= 1 holds), value 3.
    let mut p = SdpProblem::new(vec![BlockKind::Psd(2), BlockKind::Diagonal(2)]);
    p.constant.add(0, 0, 1, -1.0);
    p.constant.add(1, 0, 0, 1.0);
    p.constant.add(1, 1, 1, 2.0);
    let mut f1 = SymSparse::new();
    f1.add(0, 0, 0, 1.0);
    f1.add(1, 0, 0, 1.0);
    let mut f2 = SymSparse::new();
    f2.add(0, 1, 1, 1.0);
    f2.add(1, 1, 1, 1.0);
    p.add_variable(1.0, f1);
    p.add_variable(1.0, f2);
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value - 3.0).abs() < 1e-6);
    assert!((sol.x[0] - 1.0).abs() < 1e-5 && (sol.x[1] - 2.0).abs() < 1e-5);
}

#[test]
fn primal_infeasible_is_detected() {
    // x ≥ 1 and -x ≥ 0 simultaneously (diagonal block), any cost.
    let mut p = SdpProblem::new(vec![BlockKind::Diagonal(2)]);
    p.constant.add(0, 0, 0, 1.0);
    let mut f = SymSparse::new();
    f.add(0, 0, 0, 1.0);
    f.add(0, 1, 1, -1.0);
    p.add_variable(0.0, f);
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Infeasible);
    match sol.certificate {
        Some(Certificate::PrimalInfeasible { y }) => {
            // F_1 • Y ≈ 0, F_0 • Y = 1, Y ≥ 0
            let (y0, y1) = (y[0].data[0], y[0].data[1]);
            assert!(y0 >= -1e-9 && y1 >= -1e-9);
            assert!((y0 - y1).abs() < 1e-6);
            assert!((y0 - 1.0).abs() < 1e-6);
        }
        other => panic!("expected primal certificate, got {other:?}"),
    }
}

#[test]
fn unbounded_primal_is_detected() {
    // min x s.t. x ≥ 0 is bounded; min -x s.t. x ≥ 0 is not.
    let mut p = SdpProblem::new(vec![BlockKind::Diagonal(1)]);
    let mut f = SymSparse::new();
    f.add(0, 0, 0, 1.0);
    p.add_variable(-1.0, f);
    let sol = solve(&p, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Infeasible);
    assert!(matches!(sol.certificate, Some(Certificate::DualInfeasible { .. })));
}

#[test]
fn invalid_options_are_rejected() {
    let opts = SolverOptions {
        gap_tol: -1.0,
        ..Default::default()
    };
    assert!(solve(&toy(), &opts).is_err());
}

fn random_sym(vals: &[f64]) -> [[f64; 3]; 3] {
    [
        [vals[0], vals[1], vals[2]],
        [vals[1], vals[3], vals[4]],
        [vals[2], vals[4], vals[5]],
    ]
}

/// Largest eigenvalue via the characteristic polynomial (trigonometric form).
fn lambda_max_3x3(a: &[[f64; 3]; 3]) -> f64 {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p < 1e-14 {
        return q;
    }
    let b = |i: usize, j: usize| (a[i][j] - if i == j { q } else { 0.0 }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det / 2.0).clamp(-1.0, 1.0);
    q + 2.0 * p * (r.acos() / 3.0).cos()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weak_duality_and_closed_form(vals in proptest::collection::vec(-3.0f64..3.0, 6)) {
        let z = random_sym(&vals);
        let sol = solve(&max_eigenvalue_problem(&z), &SolverOptions::default()).unwrap();
        prop_assert_eq!(sol.status, SolveStatus::Optimal);
        prop_assert!(sol.dual_value <= sol.primal_value + 1e-7);
        let expected = lambda_max_3x3(&z);
        prop_assert!((sol.primal_value - expected).abs() < 1e-5, "{} vs {}", sol.primal_value, expected);
        prop_assert!(sol.slack[0].min_eigenvalue() >= -1e-8);
        prop_assert!(sol.dual_matrix[0].min_eigenvalue() >= -1e-8);
    }

    #[test]
    fn optimum_invariant_under_permutation_and_scaling(
        vals in proptest::collection::vec(-2.0f64..2.0, 6),
        scale in 0.1f64..10.0,
    ) {
        // Two variables: t on the identity and a redundant copy on half the identity.
        let z = random_sym(&vals);
        let mut p = max_eigenvalue_problem(&z);
        let mut half = SymSparse::new();
        for i in 0..3 {
            half.add(0, i, i, 0.5);
        }
        p.add_variable(0.5, half);
        let base = solve(&p, &SolverOptions::default()).unwrap();

        let permuted = p.permute_variables(&[1, 0]);
        let perm = solve(&permuted, &SolverOptions::default()).unwrap();

        // Scaling a variable's column and cost by s leaves the optimum unchanged.
        let mut scaled = p.clone();
        scaled.coefficients[0] = scaled.coefficients[0].scaled(scale);
        scaled.objective[0] *= scale;
        let sc = solve(&scaled, &SolverOptions::default()).unwrap();

        for s in [&base, &perm, &sc] {
            prop_assert_eq!(s.status, SolveStatus::Optimal);
        }
        prop_assert!((base.primal_value - perm.primal_value).abs() < 1e-6);
        prop_assert!((base.primal_value - sc.primal_value).abs() < 1e-6);
    }

    #[test]
    fn sdpa_round_trip(
        entries in proptest::collection::vec((0usize..3, 0usize..3, -5.0f64..5.0), 0..12),
        costs in proptest::collection::vec(-5.0f64..5.0, 1..4),
    ) {
        let mut p = SdpProblem::new(vec![BlockKind::Psd(3), BlockKind::Diagonal(2)]);
        for (k, &c) in costs.iter().enumerate() {
            let mut f = SymSparse::new();
            for (n, &(i, j, v)) in entries.iter().enumerate() {
                if n % costs.len() == k {
                    f.add(0, i, j, v);
                    f.add(1, i % 2, i % 2, v * 0.5);
                }
            }
            p.add_variable(c, f);
        }
        p.constant.add(0, 0, 0, 1.0);
        let text = export_sdpa(&p);
        let back = import_sdpa(&text).unwrap();
        prop_assert!(back.structurally_eq(&p));
        prop_assert_eq!(export_sdpa(&back), text);
    }
}
