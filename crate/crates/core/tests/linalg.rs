use diqkd::linalg::{hermitian_eig, kron, pauli_x, pauli_y, pauli_z, ComplexMatrix, QuantumState, C64};
use proptest::prelude::*;

fn hermitian(n: usize, re: &[f64], im: &[f64]) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(n, n, |i, j| C64::new(re[i * n + j], im[i * n + j]));
    (&raw + &raw.adjoint()).scale_real(0.5)
}

/// Random density matrix `A A† / tr(A A†)`.
fn density(n: usize, re: &[f64], im: &[f64]) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(n, n, |i, j| C64::new(re[i * n + j], im[i * n + j]));
    let p = &a * &a.adjoint();
    let tr = p.trace().re;
    p.scale_real(1.0 / tr)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(re in prop::collection::vec(-1.0f64..1.0, 16), im in prop::collection::vec(-1.0f64..1.0, 16)) {
        let m = hermitian(4, &re, &im);
        let (vals, v) = hermitian_eig(&m).unwrap();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = ComplexMatrix::from_fn(4, 4, |i, j| if i == j { C64::new(vals[i], 0.0) } else { C64::new(0.0, 0.0) });
        let back = &(&v * &d) * &v.adjoint();
        prop_assert!(back.max_abs_diff(&m) < 1e-10);
        let gram = &v.adjoint() * &v;
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn partial_trace_of_product_recovers_factors(
        ra in prop::collection::vec(-1.0f64..1.0, 4), ia in prop::collection::vec(-1.0f64..1.0, 4),
        rb in prop::collection::vec(-1.0f64..1.0, 9), ib in prop::collection::vec(-1.0f64..1.0, 9),
    ) {
        let a = QuantumState::new(density(2, &ra, &ia), vec![2]).unwrap();
        let b = QuantumState::new(density(3, &rb, &ib), vec![3]).unwrap();
        let ab = a.tensor(&b);
        prop_assert!(ab.partial_trace(&[0]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-12);
        prop_assert!(ab.partial_trace(&[1]).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-12);
        // entropy is additive on product states
        let s = ab.von_neumann_entropy().unwrap();
        let sa = a.von_neumann_entropy().unwrap();
        let sb = b.von_neumann_entropy().unwrap();
        prop_assert!((s - sa - sb).abs() < 1e-9);
    }

    #[test]
    fn permutation_then_inverse_is_identity(re in prop::collection::vec(-1.0f64..1.0, 64), im in prop::collection::vec(-1.0f64..1.0, 64)) {
        let s = QuantumState::new(density(8, &re, &im), vec![2, 2, 2]).unwrap();
        let p = s.permute_subsystems(&[2, 0, 1]).unwrap();
        // inverse of [2, 0, 1] is [1, 2, 0]
        let back = p.permute_subsystems(&[1, 2, 0]).unwrap();
        prop_assert!(back.matrix().max_abs_diff(s.matrix()) < 1e-14);
    }

    #[test]
    fn kron_trace_is_multiplicative(re in prop::collection::vec(-1.0f64..1.0, 8), im in prop::collection::vec(-1.0f64..1.0, 8)) {
        let a = hermitian(2, &re[..4], &im[..4]);
        let b = hermitian(2, &re[4..], &im[4..]);
        let t = kron(&a, &b).trace();
        prop_assert!((t - a.trace() * b.trace()).norm() < 1e-12);
    }
}

#[test]
fn pauli_anticommutation() {
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    for (p, q) in [(&x, &y), (&y, &z), (&z, &x)] {
        let anti = &(p * q) + &(q * p);
        assert!(anti.max_abs_diff(&ComplexMatrix::zeros(2, 2)) < 1e-15);
    }
}

#[test]
fn invalid_states_are_rejected() {
    let not_unit_trace = ComplexMatrix::identity(2);
    assert!(QuantumState::new(not_unit_trace, vec![2]).is_err());
    let negative = ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
    assert!(QuantumState::new(negative, vec![2]).is_err());
    assert!(QuantumState::new(ComplexMatrix::identity(4).scale_real(0.25), vec![2, 3]).is_err());
    assert!(ComplexMatrix::new(2, 2, vec![C64::new(0.0, 0.0); 3]).is_err());
}

#[test]
fn bell_state_reductions_are_maximally_mixed() {
    let phi = QuantumState::phi_plus();
    let a = phi.partial_trace(&[0]).unwrap();
    assert!(a.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    assert!((a.von_neumann_entropy().unwrap() - 1.0).abs() < 1e-12);
    assert!(phi.von_neumann_entropy().unwrap().abs() < 1e-12);
}
