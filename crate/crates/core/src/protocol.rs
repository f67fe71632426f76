//! Monte-Carlo runs of the magic-square and biased-CHSH protocols.
//!
//! A run draws inputs, samples outputs from a behavior, splits rounds into
//! raw key and announced test data, estimates the score on the announced
//! rounds only and aborts if the estimate falls below the threshold.
//! Error correction and privacy amplification are not executed; the final
//! key length is accounted as `raw length × r` with `r` the Devetak-Winter
//! rate, floored at zero.

use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::games::{mpg_col_bits, mpg_row_bits, Behavior, GameKind, GameSpec};
use crate::keyrate::Protocol;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolConfig {
    /// Number of rounds `N`.
    pub rounds: usize,
    /// Raw-key fraction (magic square) or key-setting weight (CHSH).
    pub gamma: f64,
    /// Abort threshold on the estimated score (`ω_exp` or `I_exp`).
    pub threshold: f64,
    #[serde(flatten)]
    pub protocol: Protocol,
    pub seed: u64,
    /// Devetak-Winter rate per raw-key bit, used for the final-key estimate.
    pub devetak_winter: Option<f64>,
    pub record_transcript: bool,
}

impl ProtocolConfig {
    pub fn new(protocol: Protocol, rounds: usize, gamma: f64, threshold: f64, seed: u64) -> Self {
        ProtocolConfig {
            rounds,
            gamma,
            threshold,
            protocol,
            seed,
            devetak_winter: None,
            record_transcript: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::OutOfRange("the number of rounds must be at least 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::OutOfRange(format!("gamma = {} must lie in (0, 1)", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::OutOfRange(format!("threshold = {} must lie in [0, 1]", self.threshold)));
        }
        if let Protocol::Chsh { eps } = self.protocol {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::OutOfRange(format!("eps = {eps} must lie in (0, 1)")));
            }
        }
        Ok(())
    }

    /// Size of the magic-square raw-key subset: `γN` rounded half to even,
    /// capped at `N - 1` so at least one round is announced.
    pub fn key_subset_size(&self) -> usize {
        let k = (self.gamma * self.rounds as f64).round_ties_even() as usize;
        k.min(self.rounds - 1)
    }
}

/// One round as recorded in the transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub n: usize,
    pub x: usize,
    pub y: usize,
    pub a_bits: Vec<u8>,
    pub b_bits: Vec<u8>,
    pub kept_as_key: bool,
}

/// Key bits serialized as a compact `0`/`1` string.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitString(pub Vec<u8>);

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: String = self.0.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        s.serialize_str(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolRunResult {
    pub aborted: bool,
    /// Score estimated from the announced rounds; `None` if none were announced.
    pub estimated_score: Option<f64>,
    pub test_rounds: usize,
    pub test_wins: usize,
    /// Zero when aborted.
    pub raw_key_length: usize,
    pub alice_key: BitString,
    pub bob_key: BitString,
    pub disagreements: usize,
    pub disagreement_fraction: Option<f64>,
    /// `raw_key_length × max(r, 0)`, when a rate was supplied.
    pub final_key_length: Option<f64>,
    #[serde(skip)]
    pub transcript: Option<Vec<RoundRecord>>,
}

impl ProtocolRunResult {
    /// JSON lines, one round per line.
    pub fn write_transcript(&self, mut w: impl Write) -> std::io::Result<()> {
        for r in self.transcript.iter().flatten() {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn check_game(g: &GameSpec, b: &Behavior) -> Result<()> {
    if b.alice_outcomes() != g.alice_outcomes.as_slice() || b.bob_outcomes() != g.bob_outcomes.as_slice() {
        return Err(Error::AlphabetMismatch(format!(
            "behavior outcomes {:?}/{:?} do not match the {} protocol",
            b.alice_outcomes(),
            b.bob_outcomes(),
            g.name()
        )));
    }
    Ok(())
}

/// Output samplers for every input pair.
fn samplers(g: &GameSpec, b: &Behavior) -> Result<Vec<Vec<WeightedIndex<f64>>>> {
    (0..g.num_x())
        .map(|x| {
            (0..g.num_y())
                .map(|y| {
                    let nb = g.bob_outcomes[y];
                    let weights = (0..g.alice_outcomes[x] * nb).map(|k| b.p(x, y, k / nb, k % nb).max(0.0));
                    WeightedIndex::new(weights).map_err(|e| Error::InvalidState(format!("P(·,·|{x},{y}): {e}")))
                })
                .collect()
        })
        .collect()
}

fn bits(g: &GameSpec, alice: bool, outcome: usize) -> Vec<u8> {
    match (g.kind, alice) {
        (GameKind::Mpg, true) => mpg_row_bits(outcome).to_vec(),
        (GameKind::Mpg, false) => mpg_col_bits(outcome).to_vec(),
        (GameKind::Chsh { .. }, _) => vec![outcome as u8],
    }
}

struct Round {
    x: usize,
    y: usize,
    a: usize,
    b: usize,
}

fn finish(
    cfg: &ProtocolConfig,
    g: &GameSpec,
    rounds: &[Round],
    kept: &[bool],
) -> ProtocolRunResult {
    let mut test_rounds = 0;
    let mut test_wins = 0;
    let (mut alice_key, mut bob_key) = (Vec::new(), Vec::new());
    for (r, &k) in rounds.iter().zip(kept) {
        if k {
            let (ka, kb) = g.key_bits(r.x, r.y, r.a, r.b);
            alice_key.push(ka);
            bob_key.push(kb);
        } else if g.input_dist[r.x][r.y] > 0.0 {
            test_rounds += 1;
            test_wins += g.wins(r.x, r.y, r.a, r.b) as usize;
        }
    }
    let estimated_score = (test_rounds > 0).then(|| test_wins as f64 / test_rounds as f64);
    let aborted = estimated_score.map_or(true, |s| s < cfg.threshold);
    if aborted {
        alice_key.clear();
        bob_key.clear();
    }
    let disagreements = alice_key.iter().zip(&bob_key).filter(|(a, b)| a != b).count();
    let raw_key_length = alice_key.len();
    let transcript = cfg.record_transcript.then(|| {
        rounds
            .iter()
            .zip(kept)
            .enumerate()
            .map(|(n, (r, &k))| RoundRecord {
                n,
                x: r.x,
                y: r.y,
                a_bits: bits(g, true, r.a),
                b_bits: bits(g, false, r.b),
                kept_as_key: k,
            })
            .collect()
    });
    ProtocolRunResult {
        aborted,
        estimated_score,
        test_rounds,
        test_wins,
        raw_key_length,
        disagreements,
        disagreement_fraction: (raw_key_length > 0).then(|| disagreements as f64 / raw_key_length as f64),
        final_key_length: cfg.devetak_winter.map(|r| raw_key_length as f64 * r.max(0.0)),
        alice_key: BitString(alice_key),
        bob_key: BitString(bob_key),
        transcript,
    }
}

fn sample_rounds(
    g: &GameSpec,
    b: &Behavior,
    n: usize,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<Round>> {
    let samplers = samplers(g, b)?;
    let xs = WeightedIndex::new(&g.alice_input_probs).map_err(|e| Error::OutOfRange(e.to_string()))?;
    let ys = WeightedIndex::new(&g.bob_input_probs).map_err(|e| Error::OutOfRange(e.to_string()))?;
    Ok((0..n)
        .map(|_| {
            let x = xs.sample(rng);
            let y = ys.sample(rng);
            let k = samplers[x][y].sample(rng);
            let nb = g.bob_outcomes[y];
            Round { x, y, a: k / nb, b: k % nb }
        })
        .collect())
}

/// Magic-square protocol: uniform inputs, a uniformly random subset of
/// `round(γN)` rounds kept as raw key, and the winning probability
/// estimated on the remaining rounds.
pub fn run_mpg_protocol(cfg: &ProtocolConfig, b: &Behavior) -> Result<ProtocolRunResult> {
    cfg.validate()?;
    if cfg.protocol != Protocol::Mpg {
        return Err(Error::OutOfRange("configuration is not for the magic-square protocol".into()));
    }
    let g = cfg.protocol.game(cfg.gamma)?;
    check_game(&g, b)?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let rounds = sample_rounds(&g, b, cfg.rounds, &mut rng)?;
    let mut kept = vec![false; cfg.rounds];
    for i in index::sample(&mut rng, cfg.rounds, cfg.key_subset_size()) {
        kept[i] = true;
    }
    Ok(finish(cfg, &g, &rounds, &kept))
}

/// Biased-CHSH protocol: Alice's input is 1 with probability `ε`, Bob's is
/// 2 with probability `γ` and otherwise uniform on `{0, 1}`. Rounds with
/// inputs `(0, 2)` form the raw key, rounds in `{0,1}²` are announced for
/// estimation and `(1, 2)` rounds are discarded.
pub fn run_chsh_protocol(cfg: &ProtocolConfig, b: &Behavior) -> Result<ProtocolRunResult> {
    cfg.validate()?;
    if !matches!(cfg.protocol, Protocol::Chsh { .. }) {
        return Err(Error::OutOfRange("configuration is not for the CHSH protocol".into()));
    }
    let g = cfg.protocol.game(cfg.gamma)?;
    check_game(&g, b)?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let rounds = sample_rounds(&g, b, cfg.rounds, &mut rng)?;
    let kept: Vec<bool> = rounds.iter().map(|r| (r.x, r.y) == (0, 2)).collect();
    Ok(finish(cfg, &g, &rounds, &kept))
}

/// Dispatches on the protocol in `cfg`.
pub fn run_protocol(cfg: &ProtocolConfig, b: &Behavior) -> Result<ProtocolRunResult> {
    match cfg.protocol {
        Protocol::Mpg => run_mpg_protocol(cfg, b),
        Protocol::Chsh { .. } => run_chsh_protocol(cfg, b),
    }
}

/// Re-estimates the score from the announced rounds of a transcript.
pub fn estimate_from_transcript(g: &GameSpec, records: &[RoundRecord]) -> Option<f64> {
    let decode = |bits: &[u8]| -> usize {
        match bits {
            [b] => *b as usize,
            [b0, b1, ..] => 2 * *b0 as usize + *b1 as usize,
            [] => 0,
        }
    };
    let mut tests = 0usize;
    let mut wins = 0usize;
    for r in records.iter().filter(|r| !r.kept_as_key && g.input_dist[r.x][r.y] > 0.0) {
        tests += 1;
        wins += g.wins(r.x, r.y, decode(&r.a_bits), decode(&r.b_bits)) as usize;
    }
    (tests > 0).then(|| wins as f64 / tests as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_size_rounds_half_to_even() {
        let mut cfg = ProtocolConfig::new(Protocol::Mpg, 4, 0.625, 0.9, 0);
        assert_eq!(cfg.key_subset_size(), 2); // 2.5 → 2
        cfg.gamma = 0.875;
        assert_eq!(cfg.key_subset_size(), 3); // 3.5 → 4, capped at N - 1
        cfg.rounds = 1;
        cfg.gamma = 0.9;
        assert_eq!(cfg.key_subset_size(), 0);
    }

    #[test]
    fn zero_rounds_rejected() {
        let cfg = ProtocolConfig::new(Protocol::Chsh { eps: 0.5 }, 0, 0.5, 0.5, 0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn bit_strings_serialize_compactly() {
        assert_eq!(serde_json::to_string(&BitString(vec![0, 1, 1])).unwrap(), "\"011\"");
    }
}
