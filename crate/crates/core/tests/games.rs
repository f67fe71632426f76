use diqkd::games::{
    behavior_from_strategy, chsh_optimal_strategy, chsh_spec, classical_value, mpg_col_bits, mpg_optimal_strategy,
    mpg_row_bits, mpg_spec, per_pair_winning, winning_probability, Behavior, DeterministicStrategy,
};
use proptest::prelude::*;

#[test]
fn row_and_column_parities() {
    for o in 0..4 {
        let r = mpg_row_bits(o);
        let c = mpg_col_bits(o);
        assert_eq!(r.iter().sum::<u8>() % 2, 0);
        assert_eq!(c.iter().sum::<u8>() % 2, 1);
    }
}

#[test]
fn predicate_compares_the_shared_cell() {
    // Row x = 1 filled [0,1,1] and a column y = 2 whose row-1 entry is 0:
    // the shared cell holds a₂ = 1 for Alice and b₁ = 0 for Bob, so they lose.
    let g = mpg_spec();
    let a = (0..4).find(|&o| mpg_row_bits(o) == [0, 1, 1]).unwrap();
    for b in (0..4).filter(|&o| mpg_col_bits(o)[1] == 0) {
        assert!(!g.wins(1, 2, a, b));
    }
    for b in (0..4).filter(|&o| mpg_col_bits(o)[1] == 1) {
        assert!(g.wins(1, 2, a, b));
    }
}

#[test]
fn magic_square_classical_value_is_exactly_eight_ninths() {
    let g = mpg_spec();
    let (v, s) = classical_value(&g);
    assert_eq!(v, 8.0 / 9.0);
    assert_eq!(s.wins(&g), 8);
}

#[test]
fn optimal_magic_square_key_bits_are_uniform_and_equal() {
    let g = mpg_spec();
    let b = behavior_from_strategy(&mpg_optimal_strategy(), &g).unwrap();
    assert!((winning_probability(&g, &b).unwrap() - 1.0).abs() < 1e-10);
    for x in 0..3 {
        for y in 0..3 {
            let mut p = [[0.0; 2]; 2];
            for a in 0..4 {
                for bb in 0..4 {
                    let (ka, kb) = g.key_bits(x, y, a, bb);
                    p[ka as usize][kb as usize] += b.p(x, y, a, bb);
                }
            }
            assert!((p[0][0] - 0.5).abs() < 1e-10 && (p[1][1] - 0.5).abs() < 1e-10);
        }
    }
}

#[test]
fn chsh_quantum_beats_classical() {
    for eps in [0.1, 0.3, 0.5] {
        let g = chsh_spec(eps, 0.9).unwrap();
        let q = winning_probability(&g, &behavior_from_strategy(&chsh_optimal_strategy(eps).unwrap(), &g).unwrap()).unwrap();
        let (c, _) = classical_value(&g);
        assert!(q > c + 1e-4, "ε = {eps}: quantum {q} vs classical {c}");
        assert!(q > 1.0 - eps);
    }
    let g = chsh_spec(0.5, 0.9).unwrap();
    let q = winning_probability(&g, &behavior_from_strategy(&chsh_optimal_strategy(0.5).unwrap(), &g).unwrap()).unwrap();
    assert!((q - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-10);
}

#[test]
fn chsh_parameters_are_validated() {
    assert!(chsh_spec(0.0, 0.5).is_err());
    assert!(chsh_spec(0.5, 1.0).is_err());
    assert!(chsh_optimal_strategy(1.0).is_err());
}

#[test]
fn behavior_validation() {
    // rows must sum to one
    assert!(Behavior::new(vec![2], vec![2], vec![vec![vec![0.5, 0.5, 0.5, 0.0]]]).is_err());
    // negative probabilities are rejected
    assert!(Behavior::new(vec![2], vec![2], vec![vec![vec![1.5, -0.5, 0.0, 0.0]]]).is_err());
    assert!(Behavior::new(vec![2], vec![2], vec![vec![vec![0.25; 4]]]).is_ok());
    let g = mpg_spec();
    let wrong = DeterministicStrategy::all_zero(&chsh_spec(0.5, 0.5).unwrap()).behavior(&chsh_spec(0.5, 0.5).unwrap()).unwrap();
    assert!(winning_probability(&g, &wrong).is_err());
}

#[test]
fn behavior_json_round_trip() {
    let g = chsh_spec(0.3, 0.9).unwrap();
    let b = behavior_from_strategy(&chsh_optimal_strategy(0.3).unwrap(), &g).unwrap();
    assert_eq!(Behavior::from_json(&b.to_json()).unwrap(), b);
}

proptest! {
    /// The winning probability is the π-weighted mean of per-pair values.
    #[test]
    fn per_pair_values_average_to_the_score(alice in prop::collection::vec(0usize..4, 3), bob in prop::collection::vec(0usize..4, 3)) {
        let g = mpg_spec();
        let b = DeterministicStrategy { alice, bob }.behavior(&g).unwrap();
        let w = winning_probability(&g, &b).unwrap();
        let mean: f64 = per_pair_winning(&g, &b).unwrap().iter().map(|p| p.2).sum::<f64>() / 9.0;
        prop_assert!((w - mean).abs() < 1e-12);
        prop_assert!(w <= 8.0 / 9.0 + 1e-12);
    }
}
