use diqkd::games::{behavior_from_strategy, chsh_optimal_strategy, chsh_spec, mpg_optimal_strategy, mpg_spec, winning_probability};
use diqkd::keyrate::default_fill;
use diqkd::noise::{apply_detection_efficiency, apply_visibility, mix_isotropic, qber, werner};
use proptest::prelude::*;

fn mpg_omega_visibility(nu: f64) -> f64 {
    let g = mpg_spec();
    let b = behavior_from_strategy(&mpg_optimal_strategy().with_state(apply_visibility(nu, 2).unwrap()), &g).unwrap();
    winning_probability(&g, &b).unwrap()
}

fn mpg_omega_efficiency(eta: f64) -> f64 {
    let g = mpg_spec();
    let ideal = behavior_from_strategy(&mpg_optimal_strategy(), &g).unwrap();
    let b = apply_detection_efficiency(&ideal, eta, &default_fill(&g), &g).unwrap();
    winning_probability(&g, &b).unwrap()
}

#[test]
fn isotropic_noise_gives_affine_score_and_qber() {
    let g = mpg_spec();
    for q in [0.0, 0.5, 0.9, 1.0] {
        let b = behavior_from_strategy(&mpg_optimal_strategy().with_state(mix_isotropic(q).unwrap()), &g).unwrap();
        assert!((winning_probability(&g, &b).unwrap() - (1.0 + q) / 2.0).abs() < 1e-10);
        assert!((qber(&b, &g).unwrap() - (1.0 - q) / 2.0).abs() < 1e-10);
    }
}

#[test]
fn zero_visibility_gives_half() {
    assert!((mpg_omega_visibility(0.0) - 0.5).abs() < 1e-10);
}

#[test]
fn werner_state_is_valid() {
    assert!(werner(1.2).is_err());
    let rho = werner(0.3).unwrap();
    assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    assert!(apply_visibility(0.5, 3).is_err());
}

/// Third finite differences of a polynomial of degree ≤ 2 vanish, while the
/// second differences detect genuine curvature.
fn third_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    f(x + 3.0 * h) - 3.0 * f(x + 2.0 * h) + 3.0 * f(x + h) - f(x)
}

#[test]
fn score_is_quadratic_in_visibility_and_efficiency() {
    for x in [0.1, 0.4, 0.7] {
        assert!(third_difference(mpg_omega_visibility, x, 0.1).abs() < 1e-10);
        assert!(third_difference(mpg_omega_efficiency, x, 0.1).abs() < 1e-10);
    }
    // the efficiency dependence is genuinely quadratic
    let second = mpg_omega_efficiency(0.9) - 2.0 * mpg_omega_efficiency(0.8) + mpg_omega_efficiency(0.7);
    assert!(second.abs() > 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn visibility_noise_preserves_no_signaling(nu in 0.0f64..=1.0) {
        let g = mpg_spec();
        let b = behavior_from_strategy(&mpg_optimal_strategy().with_state(apply_visibility(nu, 2).unwrap()), &g).unwrap();
        prop_assert!(b.signaling() < 1e-10);
        let gc = chsh_spec(0.3, 0.9).unwrap();
        let bc = behavior_from_strategy(&chsh_optimal_strategy(0.3).unwrap().with_state(werner(nu).unwrap()), &gc).unwrap();
        prop_assert!(bc.signaling() < 1e-10);
    }

    #[test]
    fn efficiency_noise_preserves_no_signaling(eta in 0.0f64..=1.0, nu in 0.5f64..=1.0) {
        let g = mpg_spec();
        let base = behavior_from_strategy(&mpg_optimal_strategy().with_state(apply_visibility(nu, 2).unwrap()), &g).unwrap();
        let b = apply_detection_efficiency(&base, eta, &default_fill(&g), &g).unwrap();
        prop_assert!(b.signaling() < 1e-10);
        let gc = chsh_spec(0.5, 0.9).unwrap();
        let ideal = behavior_from_strategy(&chsh_optimal_strategy(0.5).unwrap(), &gc).unwrap();
        let bc = apply_detection_efficiency(&ideal, eta, &default_fill(&gc), &gc).unwrap();
        prop_assert!(bc.signaling() < 1e-10);
    }

    #[test]
    fn score_decreases_with_visibility(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(mpg_omega_visibility(lo) <= mpg_omega_visibility(hi) + 1e-12);
    }
}
