//! State-visibility and detection-efficiency noise, and the QBER of a behavior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::{psi_two, Behavior, DeterministicStrategy, GameSpec};
use crate::linalg::QuantumState;

/// Noise applied to an ideal strategy before evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub visibility: f64,
    pub detection_efficiency: f64,
    /// Answers substituted for undetected rounds.
    pub fill: DeterministicStrategy,
}

impl NoiseParams {
    pub fn new(visibility: f64, detection_efficiency: f64, fill: DeterministicStrategy) -> Result<Self> {
        unit_interval("visibility", visibility)?;
        unit_interval("detection efficiency", detection_efficiency)?;
        Ok(NoiseParams {
            visibility,
            detection_efficiency,
            fill,
        })
    }
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} must lie in [0, 1]")))
    }
}

/// `ρ_ν = ν Ψ⁺ + (1-ν) 𝟙₄/4`.
pub fn werner(nu: f64) -> Result<QuantumState> {
    unit_interval("visibility", nu)?;
    QuantumState::phi_plus().mix(nu, &QuantumState::maximally_mixed(vec![2, 2]))
}

/// `ρ_ν` for one pair, or `ρ_ν ⊗ ρ_ν` ordered `(A₁, A₂, B₁, B₂)` for two.
pub fn apply_visibility(nu: f64, pairs: usize) -> Result<QuantumState> {
    let rho = werner(nu)?;
    match pairs {
        1 => Ok(rho),
        2 => rho.tensor(&rho).permute_subsystems(&[0, 2, 1, 3]),
        _ => Err(Error::OutOfRange(format!("pairs = {pairs} must be 1 or 2"))),
    }
}

/// `Φ_q = q Ψ₂ + (1-q) 𝟙₁₆/16`, mixing with the maximally mixed state of
/// the full two-pair system.
pub fn mix_isotropic(q: f64) -> Result<QuantumState> {
    unit_interval("q", q)?;
    psi_two().mix(q, &QuantumState::maximally_mixed(vec![2, 2, 2, 2]))
}

/// Each side clicks independently with probability `η`; a non-click is
/// replaced by the fill strategy's answer.
pub fn apply_detection_efficiency(
    b: &Behavior,
    eta: f64,
    fill: &DeterministicStrategy,
    g: &GameSpec,
) -> Result<Behavior> {
    unit_interval("detection efficiency", eta)?;
    fill.validate(g)?;
    if b.alice_outcomes() != g.alice_outcomes.as_slice() || b.bob_outcomes() != g.bob_outcomes.as_slice() {
        return Err(Error::AlphabetMismatch("behavior does not match game".into()));
    }
    let both = eta * eta;
    let one = eta * (1.0 - eta);
    let none = (1.0 - eta) * (1.0 - eta);
    Behavior::from_fn(g, |x, y, a, bb| {
        let fa = (a == fill.alice[x]) as u8 as f64;
        let fb = (bb == fill.bob[y]) as u8 as f64;
        both * b.p(x, y, a, bb)
            + one * b.alice_marginal(x, y, a) * fb
            + one * fa * b.bob_marginal(x, y, bb)
            + none * fa * fb
    })
}

/// Probability that the two key bits of input pair `(x, y)` disagree.
pub fn pair_disagreement(b: &Behavior, g: &GameSpec, x: usize, y: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..g.alice_outcomes[x] {
        for bb in 0..g.bob_outcomes[y] {
            let (ka, kb) = g.key_bits(x, y, a, bb);
            if ka != kb {
                s += b.p(x, y, a, bb);
            }
        }
    }
    s
}

/// Quantum bit error rate. For the magic square this averages the
/// overlap-bit disagreement over `π`; for CHSH it is the disagreement on
/// the key inputs `(0, 2)`.
pub fn qber(b: &Behavior, g: &GameSpec) -> Result<f64> {
    if b.alice_outcomes() != g.alice_outcomes.as_slice() || b.bob_outcomes() != g.bob_outcomes.as_slice() {
        return Err(Error::AlphabetMismatch("behavior does not match game".into()));
    }
    Ok(match g.kind {
        crate::games::GameKind::Mpg => g
            .test_pairs()
            .map(|(x, y, pi)| pi * pair_disagreement(b, g, x, y))
            .sum(),
        crate::games::GameKind::Chsh { .. } => pair_disagreement(b, g, 0, 2),
    })
}
