//! Devetak-Winter rates, protocol key rates and noise sweeps.
//!
//! For each key pair `(x, y)` the rate per raw-key bit is
//! `r = H(A|E) - H(A|B)`, where `H(A|E)` is the certified entropy bound and
//! `H(A|B)` is read off the observed behavior. The protocol rate is
//!
//! ```text
//! magic square:  R = max{0, (γ/9) Σ_xy r(τ_xy)}
//! biased CHSH:   R = max{0, (γ(1-ε)/2) r(τ')}      with τ' on inputs (0, 2)
//! ```
//!
//! Both formulas are sometimes written with `min{0, ·}`. That
//! reading would make every rate nonpositive, contradicting the positive
//! rates reported alongside it, so the maximum is used here.

use std::io::Write;

use serde::Serialize;

use crate::entropy::{entropy_lower_bound_with, BoundInput, ConstraintMode, EntropyBound, NodeResult, RelaxationConfig};
use crate::error::{Error, Result};
use crate::fmt::format_g17;
use crate::games::{
    behavior_from_strategy, chsh_optimal_strategy, chsh_spec, mpg_optimal_strategy, mpg_spec, winning_probability,
    Behavior, DeterministicStrategy, GameKind, GameSpec,
};
use crate::noise::{apply_detection_efficiency, apply_visibility, mix_isotropic, werner};
use crate::par::parallel_map;

/// Which protocol a rate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum Protocol {
    Mpg,
    Chsh { eps: f64 },
}

impl Protocol {
    pub fn game(&self, gamma: f64) -> Result<GameSpec> {
        match *self {
            Protocol::Mpg => Ok(mpg_spec()),
            Protocol::Chsh { eps } => chsh_spec(eps, gamma),
        }
    }

    /// Largest possible rate, reached when every key bit is perfectly secret
    /// and perfectly correlated.
    pub fn ceiling(&self, gamma: f64) -> f64 {
        match *self {
            Protocol::Mpg => gamma,
            Protocol::Chsh { eps } => gamma * (1.0 - eps) / 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRate {
    pub x: usize,
    pub y: usize,
    pub h_a_given_e: f64,
    pub h_a_given_b: f64,
    /// `h_a_given_e - h_a_given_b`; may be negative.
    pub devetak_winter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyRateResult {
    #[serde(flatten)]
    pub protocol: Protocol,
    pub gamma: f64,
    pub pairs: Vec<PairRate>,
    /// Mean of the per-pair entropy bounds.
    pub h_a_given_e: f64,
    /// Mean of the per-pair `H(A|B)`.
    pub h_a_given_b: f64,
    /// Mean of the per-pair Devetak-Winter rates.
    pub devetak_winter: f64,
    /// Key bits per round, `R ≥ 0`.
    pub rate: f64,
}

fn xlogx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    -xlogx(p) - xlogx(1.0 - p)
}

/// `H(A|B)` of the key bits `(a^x_y, b^y_x)` produced on inputs `key_pair`.
pub fn h_a_given_b(g: &GameSpec, b: &Behavior, key_pair: (usize, usize)) -> Result<f64> {
    let (x, y) = key_pair;
    if x >= g.num_x() || y >= g.num_y() {
        return Err(Error::OutOfRange(format!("key pair ({x}, {y}) is not an input of the game")));
    }
    if b.alice_outcomes() != g.alice_outcomes.as_slice() || b.bob_outcomes() != g.bob_outcomes.as_slice() {
        return Err(Error::AlphabetMismatch("behavior does not match game".into()));
    }
    let mut joint = [[0.0; 2]; 2];
    for a in 0..g.alice_outcomes[x] {
        for bb in 0..g.bob_outcomes[y] {
            let (ka, kb) = g.key_bits(x, y, a, bb);
            joint[ka as usize][kb as usize] += b.p(x, y, a, bb);
        }
    }
    let h_ab: f64 = -joint.iter().flatten().map(|&p| xlogx(p)).sum::<f64>();
    let h_b = -(0..2).map(|k| xlogx(joint[0][k] + joint[1][k])).sum::<f64>();
    Ok((h_ab - h_b).clamp(0.0, 1.0))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("gamma = {gamma} must lie in (0, 1)")))
    }
}

fn assemble(protocol: Protocol, gamma: f64, pairs: Vec<PairRate>) -> KeyRateResult {
    let n = pairs.len() as f64;
    let mean = |f: fn(&PairRate) -> f64| pairs.iter().map(f).sum::<f64>() / n;
    let h_a_given_e = mean(|p| p.h_a_given_e);
    let h_a_given_b = mean(|p| p.h_a_given_b);
    let devetak_winter = mean(|p| p.devetak_winter);
    KeyRateResult {
        rate: (protocol.ceiling(gamma) * devetak_winter).max(0.0),
        protocol,
        gamma,
        pairs,
        h_a_given_e,
        h_a_given_b,
        devetak_winter,
    }
}

/// Magic-square rate from one entropy bound per key pair, `bounds[x][y]`.
pub fn mpg_key_rate(bounds: &[[f64; 3]; 3], b: &Behavior, gamma: f64) -> Result<KeyRateResult> {
    check_gamma(gamma)?;
    let g = mpg_spec();
    let mut pairs = Vec::with_capacity(9);
    for x in 0..3 {
        for y in 0..3 {
            let hab = h_a_given_b(&g, b, (x, y))?;
            pairs.push(PairRate {
                x,
                y,
                h_a_given_e: bounds[x][y],
                h_a_given_b: hab,
                devetak_winter: bounds[x][y] - hab,
            });
        }
    }
    Ok(assemble(Protocol::Mpg, gamma, pairs))
}

/// Biased-CHSH rate from the entropy bound on key inputs `(0, 2)`.
pub fn chsh_key_rate(bound: f64, b: &Behavior, gamma: f64, eps: f64) -> Result<KeyRateResult> {
    check_gamma(gamma)?;
    let g = chsh_spec(eps, gamma)?;
    let hab = h_a_given_b(&g, b, (0, 2))?;
    let pair = PairRate {
        x: 0,
        y: 2,
        h_a_given_e: bound,
        h_a_given_b: hab,
        devetak_winter: bound - hab,
    };
    Ok(assemble(Protocol::Chsh { eps }, gamma, vec![pair]))
}

/// Entropy bounds for every key pair of `protocol` given a behavior.
///
/// In game-score mode the magic-square relaxation is invariant under row and
/// column permutations, which act transitively on the nine key pairs, so one
/// bound (for pair `(0, 0)`) is computed and shared.
pub fn entropy_bounds(
    protocol: Protocol,
    b: &Behavior,
    gamma: f64,
    cfg: &RelaxationConfig,
    progress: impl Fn((usize, usize), &NodeResult) + Sync,
) -> Result<Vec<EntropyBound>> {
    let g = protocol.game(gamma)?;
    let input = BoundInput::Behavior(b.clone());
    let pairs = match (protocol, cfg.mode) {
        (Protocol::Mpg, ConstraintMode::GameScore) => vec![(0, 0)],
        _ => g.key_pairs(),
    };
    pairs
        .into_iter()
        .map(|kp| entropy_lower_bound_with(&g, &input, kp, cfg, |n| progress(kp, n)))
        .collect()
}

/// Computes the entropy bounds for `b` and assembles the protocol rate.
pub fn key_rate(
    protocol: Protocol,
    b: &Behavior,
    gamma: f64,
    cfg: &RelaxationConfig,
    progress: impl Fn((usize, usize), &NodeResult) + Sync,
) -> Result<KeyRateResult> {
    check_gamma(gamma)?;
    let bounds = entropy_bounds(protocol, b, gamma, cfg, progress)?;
    match protocol {
        Protocol::Mpg => {
            let mut grid = [[bounds[0].value; 3]; 3];
            for e in &bounds {
                grid[e.key_pair.0][e.key_pair.1] = e.value;
            }
            mpg_key_rate(&grid, b, gamma)
        }
        Protocol::Chsh { eps } => chsh_key_rate(bounds[0].value, b, gamma, eps),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// State visibility `ν` of each entangled pair.
    Visibility,
    /// Per-side detection efficiency `η`.
    Efficiency,
    /// Winning probability, reached by mixing the ideal behavior with
    /// uniformly random outputs.
    Score,
    /// Key-bit error rate `Q`, reached the same way (`Φ_q` for the magic
    /// square).
    Qber,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Visibility => "visibility",
            SweepAxis::Efficiency => "efficiency",
            SweepAxis::Score => "score",
            SweepAxis::Qber => "qber",
        }
    }
}

/// Fill answers for undetected rounds: the magic-square strategy that wins
/// 8 of 9 cells, and all zeros for CHSH.
pub fn default_fill(g: &GameSpec) -> DeterministicStrategy {
    match g.kind {
        GameKind::Mpg => DeterministicStrategy::mpg_table_one(),
        GameKind::Chsh { .. } => DeterministicStrategy::all_zero(g),
    }
}

/// Ideal behavior of `protocol`.
pub fn ideal_behavior(protocol: Protocol, gamma: f64) -> Result<Behavior> {
    let g = protocol.game(gamma)?;
    match protocol {
        Protocol::Mpg => behavior_from_strategy(&mpg_optimal_strategy(), &g),
        Protocol::Chsh { eps } => behavior_from_strategy(&chsh_optimal_strategy(eps)?, &g),
    }
}

fn uniform_behavior(g: &GameSpec) -> Result<Behavior> {
    Behavior::from_fn(g, |x, y, _, _| 1.0 / (g.alice_outcomes[x] * g.bob_outcomes[y]) as f64)
}

/// Behavior at one point of a sweep along `axis`.
pub fn sweep_behavior(protocol: Protocol, axis: SweepAxis, value: f64, gamma: f64) -> Result<Behavior> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange(format!("{} = {value} must lie in [0, 1]", axis.as_str())));
    }
    let g = protocol.game(gamma)?;
    match axis {
        SweepAxis::Visibility => match protocol {
            Protocol::Mpg => behavior_from_strategy(&mpg_optimal_strategy().with_state(apply_visibility(value, 2)?), &g),
            Protocol::Chsh { eps } => behavior_from_strategy(&chsh_optimal_strategy(eps)?.with_state(werner(value)?), &g),
        },
        SweepAxis::Efficiency => apply_detection_efficiency(&ideal_behavior(protocol, gamma)?, value, &default_fill(&g), &g),
        SweepAxis::Score | SweepAxis::Qber => {
            let ideal = ideal_behavior(protocol, gamma)?;
            let lambda = if axis == SweepAxis::Qber {
                1.0 - 2.0 * value
            } else {
                // the score is affine in the mixing weight
                let top = winning_probability(&g, &ideal)?;
                let bottom = winning_probability(&g, &uniform_behavior(&g)?)?;
                (value - bottom) / (top - bottom)
            };
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::OutOfRange(format!(
                    "{} = {value} is not reachable by adding white noise to the ideal behavior",
                    axis.as_str()
                )));
            }
            if protocol == Protocol::Mpg {
                behavior_from_strategy(&mpg_optimal_strategy().with_state(mix_isotropic(lambda)?), &g)
            } else {
                ideal.mix(lambda, &uniform_behavior(&g)?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub axis_value: f64,
    /// Winning probability of the behavior at this point.
    pub omega_or_i: f64,
    pub h_a_given_e: Option<f64>,
    pub h_a_given_b: Option<f64>,
    pub rate: Option<f64>,
    pub rate_over_gamma: Option<f64>,
    /// `ok`, or the reason the point failed.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<KeyRateResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    #[serde(flatten)]
    pub protocol: Protocol,
    pub gamma: f64,
    pub points: Vec<SweepPoint>,
}

impl Sweep {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.status != "ok").count()
    }

    pub const CSV_HEADER: &'static str = "axis_value,omega_or_I,h_a_given_e,h_a_given_b,rate,rate_over_gamma,status";

    /// CSV with LF line endings and 17-significant-digit numbers; missing
    /// values of failed points are left empty.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        let opt = |v: Option<f64>| v.map(format_g17).unwrap_or_default();
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                format_g17(p.axis_value),
                format_g17(p.omega_or_i),
                opt(p.h_a_given_e),
                opt(p.h_a_given_b),
                opt(p.rate),
                opt(p.rate_over_gamma),
                csv_field(&p.status)
            )?;
        }
        Ok(())
    }
}

/// Quotes a CSV field when it contains a delimiter, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Key rate at every grid value along `axis`. Points are independent and
/// run on up to `jobs` threads; a failed point is recorded in its status
/// and the sweep continues.
pub fn sweep(
    protocol: Protocol,
    axis: SweepAxis,
    grid: &[f64],
    gamma: f64,
    cfg: &RelaxationConfig,
    jobs: usize,
    progress: impl Fn(usize, (usize, usize), &NodeResult) + Sync,
) -> Result<Sweep> {
    check_gamma(gamma)?;
    let g = protocol.game(gamma)?;
    let behaviors = grid
        .iter()
        .map(|&v| sweep_behavior(protocol, axis, v, gamma))
        .collect::<Result<Vec<_>>>()?;
    let points = parallel_map(grid.len(), jobs, |i| {
        let b = &behaviors[i];
        let omega = winning_probability(&g, b).unwrap_or(f64::NAN);
        match key_rate(protocol, b, gamma, cfg, |kp, n| progress(i, kp, n)) {
            Ok(r) => SweepPoint {
                axis_value: grid[i],
                omega_or_i: omega,
                h_a_given_e: Some(r.h_a_given_e),
                h_a_given_b: Some(r.h_a_given_b),
                rate: Some(r.rate),
                rate_over_gamma: Some(r.rate / gamma),
                status: "ok".into(),
                result: Some(r),
            },
            Err(e) => SweepPoint {
                axis_value: grid[i],
                omega_or_i: omega,
                h_a_given_e: None,
                h_a_given_b: None,
                rate: None,
                rate_over_gamma: None,
                status: e.to_string(),
                result: None,
            },
        }
    });
    Ok(Sweep {
        axis,
        protocol,
        gamma,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::qber;

    #[test]
    fn binary_entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sweep_behaviors_hit_their_axis_value() {
        let g = mpg_spec();
        let b = sweep_behavior(Protocol::Mpg, SweepAxis::Qber, 0.03, 0.9).unwrap();
        assert!((qber(&b, &g).unwrap() - 0.03).abs() < 1e-12);
        let b = sweep_behavior(Protocol::Mpg, SweepAxis::Score, 0.95, 0.9).unwrap();
        assert!((winning_probability(&g, &b).unwrap() - 0.95).abs() < 1e-12);
        let p = Protocol::Chsh { eps: 0.3 };
        let gc = p.game(0.9).unwrap();
        let b = sweep_behavior(p, SweepAxis::Score, 0.8, 0.9).unwrap();
        assert!((winning_probability(&gc, &b).unwrap() - 0.8).abs() < 1e-12);
        let b = sweep_behavior(p, SweepAxis::Qber, 0.04, 0.9).unwrap();
        assert!((qber(&b, &gc).unwrap() - 0.04).abs() < 1e-12);
    }

    #[test]
    fn unreachable_score_is_rejected() {
        assert!(sweep_behavior(Protocol::Mpg, SweepAxis::Score, 0.2, 0.9).is_err());
        assert!(sweep_behavior(Protocol::Mpg, SweepAxis::Visibility, 1.5, 0.9).is_err());
    }

    #[test]
    fn csv_quotes_statuses_with_commas() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("ok"), "ok");
    }
}
