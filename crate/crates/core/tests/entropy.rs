use diqkd::entropy::words::canonicalize_parity;
use diqkd::entropy::{
    build_moment_relaxation, entropy_lower_bound, gauss_radau, node_objective, BoundInput, ConstraintMode, Letter,
    MonomialSet, Observed, Relaxation, RelaxationConfig, Word,
};
use diqkd::games::{behavior_from_strategy, chsh_optimal_strategy, chsh_spec, mpg_spec};
use diqkd::keyrate::binary_entropy;
use diqkd::noise::werner;
use diqkd_sdp::{export_sdpa, import_sdpa, solve, SolverOptions};
use proptest::prelude::*;

/// Tight entropy bound for the standard CHSH game:
/// `1 - h(1/2 + 1/2·√(S²/4 - 1))` with `S = 8ω - 4`.
fn chsh_analytic(omega: f64) -> f64 {
    let s = 8.0 * omega - 4.0;
    if s <= 2.0 {
        return 0.0;
    }
    1.0 - binary_entropy(0.5 + 0.5 * (s * s / 4.0 - 1.0).max(0.0).sqrt())
}

#[test]
fn two_point_radau_rule() {
    let r = gauss_radau(2).unwrap();
    assert!((r.nodes[0] - 1.0 / 3.0).abs() < 1e-14 && r.nodes[1] == 1.0);
    assert!((r.weights[0] - 0.75).abs() < 1e-14 && (r.weights[1] - 0.25).abs() < 1e-14);
}

#[test]
fn radau_rules_are_exact_to_degree_2m_minus_2() {
    for m in 2..=16 {
        let r = gauss_radau(m).unwrap();
        for d in 0..=(2 * m - 2) {
            let err = r.integrate(|t| t.powi(d as i32)) - 1.0 / (d as f64 + 1.0);
            assert!(err.abs() < 1e-10, "m = {m}, degree {d}: error {err:e}");
        }
        assert_eq!(*r.nodes.last().unwrap(), 1.0);
    }
}

#[test]
fn chsh_bound_is_sound_and_close_to_the_analytic_curve() {
    let g = chsh_spec(0.5, 0.9).unwrap();
    let cfg = RelaxationConfig::default();
    for omega in [0.78, 0.8125, 0.84] {
        let b = entropy_lower_bound(&g, &BoundInput::Score(omega), (0, 2), &cfg).unwrap();
        let exact = chsh_analytic(omega);
        assert!(b.value <= exact + 1e-6, "ω = {omega}: bound {} exceeds the tight value {exact}", b.value);
        assert!(b.value >= exact - 0.05, "ω = {omega}: bound {} far below {exact}", b.value);
    }
}

#[test]
fn symmetry_reduction_preserves_node_optima() {
    let g = chsh_spec(0.5, 0.9).unwrap();
    let set = MonomialSet::restricted_level_two();
    let observed = Observed::Score(0.82);
    let opts = SolverOptions::default();
    for t in [0.1, 0.6] {
        let full = build_moment_relaxation(&g, &observed, &set, (0, 2), t).unwrap();
        let reduced = Relaxation::new(&g, &observed, &set, (0, 2), true)
            .unwrap()
            .problem_for(&node_objective(&g, (0, 2), t).unwrap())
            .unwrap();
        let a = solve(&full.0, &opts).unwrap();
        let b = solve(&reduced.0, &opts).unwrap();
        let (va, vb) = (a.dual_value + full.1, b.dual_value + reduced.1);
        // Both solves stop at their own duality gap, so the optima can only
        // be compared up to the sum of the two gaps.
        let slack = (a.primal_value - a.dual_value).abs() + (b.primal_value - b.dual_value).abs() + 1e-7;
        assert!((va - vb).abs() <= slack, "t = {t}: unreduced {va} vs reduced {vb} (slack {slack:e})");
        assert!(reduced.0.num_variables() < full.0.num_variables());
    }
}

#[test]
fn bound_is_monotone_in_score() {
    let g = chsh_spec(0.5, 0.9).unwrap();
    let cfg = RelaxationConfig::default();
    let scores = [0.74, 0.77, 0.79, 0.81, 0.83, 0.85];
    let values: Vec<f64> = scores
        .iter()
        .map(|&s| entropy_lower_bound(&g, &BoundInput::Score(s), (0, 2), &cfg).unwrap().raw)
        .collect();
    for w in values.windows(2) {
        assert!(w[1] >= w[0] - 1e-6, "{values:?}");
    }
}

#[test]
fn magic_square_bound_is_the_same_for_every_key_pair() {
    let g = mpg_spec();
    let cfg = RelaxationConfig {
        nodes: 3,
        ..Default::default()
    };
    let input = BoundInput::Score(0.99);
    let a = entropy_lower_bound(&g, &input, (0, 0), &cfg).unwrap();
    let b = entropy_lower_bound(&g, &input, (1, 2), &cfg).unwrap();
    assert!((a.raw - b.raw).abs() < 1e-5, "(0,0): {} vs (1,2): {}", a.raw, b.raw);
}

#[test]
fn full_statistics_is_at_least_as_strong_as_the_score() {
    let eps = 0.5;
    let g = chsh_spec(eps, 0.9).unwrap();
    let b = behavior_from_strategy(&chsh_optimal_strategy(eps).unwrap().with_state(werner(0.95).unwrap()), &g).unwrap();
    let input = BoundInput::Behavior(b);
    let score = entropy_lower_bound(&g, &input, (0, 2), &RelaxationConfig::default()).unwrap();
    let full_cfg = RelaxationConfig {
        mode: ConstraintMode::FullStatistics,
        ..Default::default()
    };
    let full = entropy_lower_bound(&g, &input, (0, 2), &full_cfg).unwrap();
    assert!(full.raw >= score.raw - 1e-6, "full {} < score {}", full.raw, score.raw);
}

#[test]
fn classical_score_certifies_nothing() {
    let g = chsh_spec(0.5, 0.9).unwrap();
    let b = entropy_lower_bound(&g, &BoundInput::Score(0.75), (0, 2), &RelaxationConfig::default()).unwrap();
    assert!(b.value < 1e-4, "{}", b.value);
}

#[test]
fn invalid_configurations_are_rejected() {
    let g = chsh_spec(0.5, 0.9).unwrap();
    let cfg = RelaxationConfig {
        nodes: 1,
        ..Default::default()
    };
    assert!(entropy_lower_bound(&g, &BoundInput::Score(0.8), (0, 2), &cfg).is_err());
    let cfg = RelaxationConfig {
        mode: ConstraintMode::FullStatistics,
        ..Default::default()
    };
    assert!(entropy_lower_bound(&g, &BoundInput::Score(0.8), (0, 2), &cfg).is_err());
    assert!(MonomialSet::parse("1+AX").is_err());
    assert!(MonomialSet::parse("level0").is_err());
}

#[test]
fn node_problems_survive_sdpa_round_trip() {
    let g = mpg_spec();
    let (p, _) = Relaxation::new(&g, &Observed::Score(0.95), &MonomialSet::restricted_level_two(), (0, 0), true)
        .unwrap()
        .problem_for(&node_objective(&g, (0, 0), 0.3).unwrap())
        .unwrap();
    let text = export_sdpa(&p);
    let back = import_sdpa(&text).unwrap();
    assert_eq!(export_sdpa(&back), text);
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![
        (0u8..3, 1u8..4).prop_map(|(setting, outcome)| Letter::A { setting, outcome }),
        (0u8..3, 1u8..4).prop_map(|(setting, outcome)| Letter::B { setting, outcome }),
        (0u8..2, any::<bool>()).prop_map(|(index, dagger)| Letter::Z { index, dagger }),
    ]
}

proptest! {
    #[test]
    fn parity_canonical_form_is_idempotent(letters in prop::collection::vec(letter(), 0..7)) {
        let w = canonicalize_parity(&Word(letters));
        prop_assert_eq!(canonicalize_parity(&w), w.clone());
        prop_assert_eq!(w.adjoint().adjoint(), w);
    }

    #[test]
    fn parity_observables_square_to_identity(letters in prop::collection::vec(letter(), 0..5), l in letter()) {
        if !matches!(l, Letter::Z { .. }) {
            let mut doubled = letters.clone();
            doubled.push(l);
            doubled.push(l);
            prop_assert_eq!(canonicalize_parity(&Word(doubled)), canonicalize_parity(&Word(letters)));
        }
    }
}
