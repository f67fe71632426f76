use diqkd::entropy::RelaxationConfig;
use diqkd::games::{chsh_spec, mpg_spec, Behavior, DeterministicStrategy};
use diqkd::keyrate::{
    binary_entropy, chsh_key_rate, h_a_given_b, ideal_behavior, mpg_key_rate, sweep, sweep_behavior, Protocol,
    Sweep, SweepAxis,
};
use proptest::prelude::*;

#[test]
fn binary_entropy_reference_values() {
    assert_eq!(binary_entropy(0.0), 0.0);
    assert_eq!(binary_entropy(1.0), 0.0);
    assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    // h(0.11) from -p log2 p - (1-p) log2 (1-p) evaluated by hand
    assert!((binary_entropy(0.11) - 0.4999157).abs() < 1e-6);
}

#[test]
fn conditional_entropy_of_perfectly_correlated_key_is_zero() {
    let g = mpg_spec();
    let b = ideal_behavior(Protocol::Mpg, 0.9).unwrap();
    for (x, y) in g.key_pairs() {
        assert!(h_a_given_b(&g, &b, (x, y)).unwrap() < 1e-12);
    }
}

#[test]
fn conditional_entropy_of_independent_uniform_bits_is_one() {
    let g = chsh_spec(0.5, 0.9).unwrap();
    let b = Behavior::from_fn(&g, |_, _, _, _| 0.25).unwrap();
    assert!((h_a_given_b(&g, &b, (0, 2)).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn conditional_entropy_under_isotropic_noise_is_h_of_qber() {
    let g = mpg_spec();
    for q in [0.01, 0.03, 0.1] {
        let b = sweep_behavior(Protocol::Mpg, SweepAxis::Qber, q, 0.9).unwrap();
        for kp in [(0, 0), (1, 2), (2, 1)] {
            let h = h_a_given_b(&g, &b, kp).unwrap();
            assert!((h - binary_entropy(q)).abs() < 1e-12, "Q = {q}, pair {kp:?}: {h}");
        }
    }
}

#[test]
fn deterministic_key_bits_have_no_conditional_entropy() {
    let g = chsh_spec(0.5, 0.9).unwrap();
    let b = DeterministicStrategy::all_zero(&g).behavior(&g).unwrap();
    assert_eq!(h_a_given_b(&g, &b, (0, 2)).unwrap(), 0.0);
}

#[test]
fn ideal_rates_reach_the_ceiling() {
    for gamma in [0.5, 0.9, 0.99] {
        let b = ideal_behavior(Protocol::Mpg, gamma).unwrap();
        let r = mpg_key_rate(&[[1.0; 3]; 3], &b, gamma).unwrap();
        assert_eq!(r.rate, gamma);
        for eps in [0.1, 0.5, 0.9] {
            let b = ideal_behavior(Protocol::Chsh { eps }, gamma).unwrap();
            let r = chsh_key_rate(1.0, &b, gamma, eps).unwrap();
            assert!((r.rate - gamma * (1.0 - eps) / 2.0).abs() < 1e-15, "γ = {gamma}, ε = {eps}");
        }
    }
}

#[test]
fn zero_entropy_bound_gives_zero_rate() {
    let b = sweep_behavior(Protocol::Mpg, SweepAxis::Qber, 0.02, 0.9).unwrap();
    let r = mpg_key_rate(&[[0.0; 3]; 3], &b, 0.9).unwrap();
    assert_eq!(r.rate, 0.0);
    assert!(r.devetak_winter < 0.0);
}

#[test]
fn gamma_outside_the_open_interval_is_rejected() {
    let b = ideal_behavior(Protocol::Mpg, 0.9).unwrap();
    assert!(mpg_key_rate(&[[1.0; 3]; 3], &b, 1.0).is_err());
    assert!(mpg_key_rate(&[[1.0; 3]; 3], &b, 0.0).is_err());
}

#[test]
fn chsh_visibility_sweep_runs_end_to_end() {
    let p = Protocol::Chsh { eps: 0.5 };
    let s = sweep(p, SweepAxis::Visibility, &[0.7, 0.99], 0.9, &RelaxationConfig::default(), 1, |_, _, _| {}).unwrap();
    assert_eq!(s.failures(), 0);
    // ν = 0.7 gives a CHSH value below the classical bound
    assert!(s.points[0].rate.unwrap() < 1e-6);
    let r = s.points[1].rate.unwrap();
    assert!(r > 0.0 && r <= p.ceiling(0.9));
    let mut out = Vec::new();
    s.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], Sweep::CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[2].ends_with(",ok"));
}

proptest! {
    #[test]
    fn rate_never_exceeds_the_ceiling(
        bound in 0.0f64..=1.0, q in 0.0f64..0.5, gamma in 0.01f64..0.99, eps in 0.01f64..0.99
    ) {
        let b = sweep_behavior(Protocol::Mpg, SweepAxis::Qber, q, gamma).unwrap();
        let r = mpg_key_rate(&[[bound; 3]; 3], &b, gamma).unwrap();
        prop_assert!(r.rate >= 0.0 && r.rate <= gamma + 1e-15);
        prop_assert!((r.rate - (gamma * (bound - binary_entropy(q))).max(0.0)).abs() < 1e-12);

        let p = Protocol::Chsh { eps };
        let b = sweep_behavior(p, SweepAxis::Qber, q, gamma).unwrap();
        let r = chsh_key_rate(bound, &b, gamma, eps).unwrap();
        prop_assert!(r.rate >= 0.0 && r.rate <= p.ceiling(gamma) + 1e-15);
        prop_assert!((r.devetak_winter - (bound - binary_entropy(q))).abs() < 1e-12);
    }
}
