//! Nonlocal games (magic square and biased CHSH), behaviors, and strategies.
//!
//! Magic-square outcomes are encoded as `2·a₀ + a₁`; the third bit of a row
//! is `a₀ ⊕ a₁` (even parity) and of a column `b₀ ⊕ b₁ ⊕ 1` (odd parity).
//! Binary measurement outcomes map eigenvalue +1 to bit 0 and -1 to bit 1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::json_number;
use crate::linalg::{kron, kron_vec, pauli_x, pauli_z, ComplexMatrix, ProjectiveMeasurement, QuantumState, C64};

const PROB_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "game", rename_all = "lowercase")]
pub enum GameKind {
    Mpg,
    /// Biased CHSH with Alice's bias `eps` and Bob's key-setting weight `gamma`.
    Chsh { eps: f64, gamma: f64 },
}

/// Input distribution, outcome alphabets and winning predicate of a game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub kind: GameKind,
    /// Number of outcomes for each of Alice's inputs.
    pub alice_outcomes: Vec<usize>,
    /// Number of outcomes for each of Bob's inputs, including key-only inputs.
    pub bob_outcomes: Vec<usize>,
    /// `π(x, y)`; zero on inputs that never occur in test rounds.
    pub input_dist: Vec<Vec<f64>>,
    /// Per-party input sampling probabilities used by the protocols.
    pub alice_input_probs: Vec<f64>,
    pub bob_input_probs: Vec<f64>,
}

/// Bits `[a₀, a₁, a₀⊕a₁]` of a magic-square row outcome.
pub fn mpg_row_bits(outcome: usize) -> [u8; 3] {
    let (a0, a1) = (((outcome >> 1) & 1) as u8, (outcome & 1) as u8);
    [a0, a1, a0 ^ a1]
}

/// Bits `[b₀, b₁, b₀⊕b₁⊕1]` of a magic-square column outcome.
pub fn mpg_col_bits(outcome: usize) -> [u8; 3] {
    let (b0, b1) = (((outcome >> 1) & 1) as u8, (outcome & 1) as u8);
    [b0, b1, b0 ^ b1 ^ 1]
}

pub fn mpg_spec() -> GameSpec {
    GameSpec {
        kind: GameKind::Mpg,
        alice_outcomes: vec![4; 3],
        bob_outcomes: vec![4; 3],
        input_dist: vec![vec![1.0 / 9.0; 3]; 3],
        alice_input_probs: vec![1.0 / 3.0; 3],
        bob_input_probs: vec![1.0 / 3.0; 3],
    }
}

/// Biased CHSH: `π(0,y) = (1-ε)/2`, `π(1,y) = ε/2` for `y ∈ {0,1}`; Bob's
/// input 2 is the key setting and carries no weight in the score.
pub fn chsh_spec(eps: f64, gamma: f64) -> Result<GameSpec> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::OutOfRange(format!("gamma = {gamma} must lie in (0, 1)")));
    }
    Ok(GameSpec {
        kind: GameKind::Chsh { eps, gamma },
        alice_outcomes: vec![2; 2],
        bob_outcomes: vec![2; 3],
        input_dist: vec![
            vec![(1.0 - eps) / 2.0, (1.0 - eps) / 2.0, 0.0],
            vec![eps / 2.0, eps / 2.0, 0.0],
        ],
        alice_input_probs: vec![1.0 - eps, eps],
        bob_input_probs: vec![(1.0 - gamma) / 2.0, (1.0 - gamma) / 2.0, gamma],
    })
}

impl GameSpec {
    pub fn num_x(&self) -> usize {
        self.alice_outcomes.len()
    }

    pub fn num_y(&self) -> usize {
        self.bob_outcomes.len()
    }

    /// Inputs with positive weight in the score.
    pub fn test_pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.num_x()).flat_map(move |x| {
            (0..self.num_y()).filter_map(move |y| {
                let p = self.input_dist[x][y];
                (p > 0.0).then_some((x, y, p))
            })
        })
    }

    pub fn wins(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        match self.kind {
            GameKind::Mpg => mpg_row_bits(a)[y] == mpg_col_bits(b)[x],
            GameKind::Chsh { .. } => (a ^ b) == (x & y),
        }
    }

    /// Key bits `(a^x_y, b^y_x)` for the magic square, `(a, b)` for CHSH.
    pub fn key_bits(&self, x: usize, y: usize, a: usize, b: usize) -> (u8, u8) {
        match self.kind {
            GameKind::Mpg => (mpg_row_bits(a)[y], mpg_col_bits(b)[x]),
            GameKind::Chsh { .. } => (a as u8, b as u8),
        }
    }

    /// Input pairs whose outputs form raw key.
    pub fn key_pairs(&self) -> Vec<(usize, usize)> {
        match self.kind {
            GameKind::Mpg => (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect(),
            GameKind::Chsh { .. } => vec![(0, 2)],
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            GameKind::Mpg => "mpg",
            GameKind::Chsh { .. } => "chsh",
        }
    }

    fn check(&self, b: &Behavior) -> Result<()> {
        if b.alice_outcomes != self.alice_outcomes || b.bob_outcomes != self.bob_outcomes {
            return Err(Error::AlphabetMismatch(format!(
                "behavior has outcomes {:?}/{:?}, game expects {:?}/{:?}",
                b.alice_outcomes, b.bob_outcomes, self.alice_outcomes, self.bob_outcomes
            )));
        }
        Ok(())
    }
}

/// Conditional outcome table `P(a, b | x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    alice_outcomes: Vec<usize>,
    bob_outcomes: Vec<usize>,
    /// `table[x][y][a * nb + b]`
    table: Vec<Vec<Vec<f64>>>,
}

impl Behavior {
    /// Builds a behavior and checks positivity and per-input normalization.
    pub fn new(alice_outcomes: Vec<usize>, bob_outcomes: Vec<usize>, table: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if table.len() != alice_outcomes.len() {
            return Err(Error::AlphabetMismatch(format!("{} rows for {} inputs", table.len(), alice_outcomes.len())));
        }
        for (x, row) in table.iter().enumerate() {
            if row.len() != bob_outcomes.len() {
                return Err(Error::AlphabetMismatch(format!("input x={x} has {} columns", row.len())));
            }
            for (y, cell) in row.iter().enumerate() {
                if cell.len() != alice_outcomes[x] * bob_outcomes[y] {
                    return Err(Error::AlphabetMismatch(format!("cell ({x},{y}) has {} entries", cell.len())));
                }
                if let Some(p) = cell.iter().find(|p| !p.is_finite() || **p < -1e-12) {
                    return Err(Error::OutOfRange(format!("probability {p} at ({x},{y})")));
                }
                let total: f64 = cell.iter().sum();
                if (total - 1.0).abs() > PROB_TOL {
                    return Err(Error::OutOfRange(format!("P(·,·|{x},{y}) sums to {total}")));
                }
            }
        }
        Ok(Behavior {
            alice_outcomes,
            bob_outcomes,
            table,
        })
    }

    pub fn from_fn(g: &GameSpec, f: impl Fn(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let table = (0..g.num_x())
            .map(|x| {
                (0..g.num_y())
                    .map(|y| {
                        let nb = g.bob_outcomes[y];
                        (0..g.alice_outcomes[x] * nb).map(|k| f(x, y, k / nb, k % nb)).collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(g.alice_outcomes.clone(), g.bob_outcomes.clone(), table)
    }

    pub fn alice_outcomes(&self) -> &[usize] {
        &self.alice_outcomes
    }

    pub fn bob_outcomes(&self) -> &[usize] {
        &self.bob_outcomes
    }

    pub fn p(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.table[x][y][a * self.bob_outcomes[y] + b]
    }

    /// `P_A(a | x, y) = Σ_b P(a, b | x, y)`
    pub fn alice_marginal(&self, x: usize, y: usize, a: usize) -> f64 {
        (0..self.bob_outcomes[y]).map(|b| self.p(x, y, a, b)).sum()
    }

    /// `P_B(b | x, y) = Σ_a P(a, b | x, y)`
    pub fn bob_marginal(&self, x: usize, y: usize, b: usize) -> f64 {
        (0..self.alice_outcomes[x]).map(|a| self.p(x, y, a, b)).sum()
    }

    /// Largest dependence of a marginal on the other party's input.
    pub fn signaling(&self) -> f64 {
        let (nx, ny) = (self.alice_outcomes.len(), self.bob_outcomes.len());
        let mut worst: f64 = 0.0;
        for x in 0..nx {
            for a in 0..self.alice_outcomes[x] {
                let m0 = self.alice_marginal(x, 0, a);
                for y in 1..ny {
                    worst = worst.max((self.alice_marginal(x, y, a) - m0).abs());
                }
            }
        }
        for y in 0..ny {
            for b in 0..self.bob_outcomes[y] {
                let m0 = self.bob_marginal(0, y, b);
                for x in 1..nx {
                    worst = worst.max((self.bob_marginal(x, y, b) - m0).abs());
                }
            }
        }
        worst
    }

    /// `λ·self + (1-λ)·other`
    pub fn mix(&self, lambda: f64, other: &Behavior) -> Result<Behavior> {
        if self.alice_outcomes != other.alice_outcomes || self.bob_outcomes != other.bob_outcomes {
            return Err(Error::AlphabetMismatch("mixing behaviors over different alphabets".into()));
        }
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(r1, r2)| {
                r1.iter()
                    .zip(r2)
                    .map(|(c1, c2)| c1.iter().zip(c2).map(|(p, q)| lambda * p + (1.0 - lambda) * q).collect())
                    .collect()
            })
            .collect();
        Behavior::new(self.alice_outcomes.clone(), self.bob_outcomes.clone(), table)
    }

    /// Nested JSON object `x → y → a → b → probability` with decimal-string
    /// keys and 17-significant-digit values.
    pub fn to_json(&self) -> String {
        type Level<T> = BTreeMap<String, T>;
        let mut root: Level<Level<Level<Level<Box<serde_json::value::RawValue>>>>> = BTreeMap::new();
        for (x, row) in self.table.iter().enumerate() {
            for (y, _) in row.iter().enumerate() {
                for a in 0..self.alice_outcomes[x] {
                    for b in 0..self.bob_outcomes[y] {
                        root.entry(x.to_string())
                            .or_default()
                            .entry(y.to_string())
                            .or_default()
                            .entry(a.to_string())
                            .or_default()
                            .insert(b.to_string(), json_number(self.p(x, y, a, b)));
                    }
                }
            }
        }
        serde_json::to_string_pretty(&root).expect("maps of numbers serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        type Level<T> = BTreeMap<String, T>;
        let root: Level<Level<Level<Level<f64>>>> =
            serde_json::from_str(text).map_err(|e| Error::AlphabetMismatch(format!("behavior JSON: {e}")))?;
        let index = |k: &str| -> Result<usize> {
            k.parse()
                .map_err(|_| Error::AlphabetMismatch(format!("non-numeric key '{k}'")))
        };
        let mut cells: BTreeMap<(usize, usize), BTreeMap<(usize, usize), f64>> = BTreeMap::new();
        for (xk, ys) in &root {
            for (yk, as_) in ys {
                for (ak, bs) in as_ {
                    for (bk, &p) in bs {
                        cells
                            .entry((index(xk)?, index(yk)?))
                            .or_default()
                            .insert((index(ak)?, index(bk)?), p);
                    }
                }
            }
        }
        let nx = cells.keys().map(|k| k.0 + 1).max().unwrap_or(0);
        let ny = cells.keys().map(|k| k.1 + 1).max().unwrap_or(0);
        let mut alice = vec![0; nx];
        let mut bob = vec![0; ny];
        for (&(x, y), cell) in &cells {
            for &(a, b) in cell.keys() {
                alice[x] = alice[x].max(a + 1);
                bob[y] = bob[y].max(b + 1);
            }
        }
        let mut table = vec![vec![Vec::new(); ny]; nx];
        for x in 0..nx {
            for y in 0..ny {
                let cell = cells
                    .get(&(x, y))
                    .ok_or_else(|| Error::AlphabetMismatch(format!("missing inputs ({x},{y})")))?;
                table[x][y] = (0..alice[x] * bob[y])
                    .map(|k| cell.get(&(k / bob[y], k % bob[y])).copied().unwrap_or(0.0))
                    .collect();
            }
        }
        Behavior::new(alice, bob, table)
    }
}

/// `ω = Σ_{x,y} π(x,y) Σ_{a,b wins} P(a,b|x,y)`.
pub fn winning_probability(g: &GameSpec, b: &Behavior) -> Result<f64> {
    g.check(b)?;
    let mut w = 0.0;
    for (x, y, pi) in g.test_pairs() {
        let mut s = 0.0;
        for a in 0..g.alice_outcomes[x] {
            for bb in 0..g.bob_outcomes[y] {
                if g.wins(x, y, a, bb) {
                    s += b.p(x, y, a, bb);
                }
            }
        }
        w += pi * s;
    }
    Ok(w)
}

/// Winning probability for each input pair with positive weight.
pub fn per_pair_winning(g: &GameSpec, b: &Behavior) -> Result<Vec<(usize, usize, f64)>> {
    g.check(b)?;
    Ok(g.test_pairs()
        .map(|(x, y, _)| {
            let mut s = 0.0;
            for a in 0..g.alice_outcomes[x] {
                for bb in 0..g.bob_outcomes[y] {
                    if g.wins(x, y, a, bb) {
                        s += b.p(x, y, a, bb);
                    }
                }
            }
            (x, y, s)
        })
        .collect())
}

/// CHSH correlator form `I_ε = 2·ω - 1` of a winning probability.
pub fn chsh_correlator(winning: f64) -> f64 {
    2.0 * winning - 1.0
}

/// Each party answers every input with a fixed outcome index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl DeterministicStrategy {
    /// Fill used for undetected rounds in the magic square: rows `000, 000, 110`
    /// and every column `001`. Wins every cell except (2, 2).
    pub fn mpg_table_one() -> Self {
        DeterministicStrategy {
            alice: vec![0, 0, 3],
            bob: vec![0, 0, 0],
        }
    }

    /// Both parties output 0 on every input.
    pub fn all_zero(g: &GameSpec) -> Self {
        DeterministicStrategy {
            alice: vec![0; g.num_x()],
            bob: vec![0; g.num_y()],
        }
    }

    pub fn validate(&self, g: &GameSpec) -> Result<()> {
        let ok = self.alice.len() == g.num_x()
            && self.bob.len() == g.num_y()
            && self.alice.iter().zip(&g.alice_outcomes).all(|(a, n)| a < n)
            && self.bob.iter().zip(&g.bob_outcomes).all(|(b, n)| b < n);
        if ok {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!("strategy {self:?} does not fit the game")))
        }
    }

    pub fn behavior(&self, g: &GameSpec) -> Result<Behavior> {
        self.validate(g)?;
        Behavior::from_fn(g, |x, y, a, b| {
            if a == self.alice[x] && b == self.bob[y] {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Number of weighted input pairs this strategy wins.
    pub fn wins(&self, g: &GameSpec) -> usize {
        g.test_pairs()
            .filter(|&(x, y, _)| g.wins(x, y, self.alice[x], self.bob[y]))
            .count()
    }
}

/// Best deterministic strategy by exhaustive search. Strategies are visited
/// in lexicographic order of `(alice, bob)` outcome indices and the first
/// maximizer is kept.
///
/// Won pairs are counted per distinct input weight and the value is formed
/// as `Σ count · π` at the end, so games with equal weights (the magic
/// square) give the correctly rounded fraction, exactly `8/9`.
pub fn classical_value(g: &GameSpec) -> (f64, DeterministicStrategy) {
    let alice_all = assignments(&g.alice_outcomes);
    let bob_all = assignments(&g.bob_outcomes);
    let pairs: Vec<(usize, usize, f64)> = g.test_pairs().collect();
    let mut weights: Vec<f64> = Vec::new();
    let class: Vec<usize> = pairs
        .iter()
        .map(|&(_, _, pi)| match weights.iter().position(|&w| w == pi) {
            Some(i) => i,
            None => {
                weights.push(pi);
                weights.len() - 1
            }
        })
        .collect();
    let mut counts = vec![0usize; weights.len()];
    let mut best = (f64::NEG_INFINITY, DeterministicStrategy::all_zero(g));
    for a in &alice_all {
        for b in &bob_all {
            counts.iter_mut().for_each(|c| *c = 0);
            for (&(x, y, _), &k) in pairs.iter().zip(&class) {
                if g.wins(x, y, a[x], b[y]) {
                    counts[k] += 1;
                }
            }
            let w: f64 = counts.iter().zip(&weights).map(|(&c, &pi)| c as f64 * pi).sum();
            if w > best.0 + 1e-12 {
                best = (
                    w,
                    DeterministicStrategy {
                        alice: a.clone(),
                        bob: b.clone(),
                    },
                );
            }
        }
    }
    best
}

/// All assignments of one outcome per input, lexicographically ordered.
fn assignments(outcomes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in outcomes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect();
    }
    out
}

/// Shared state plus one projective measurement per input on each side.
/// Alice's operators act on the leading tensor factors of the state.
#[derive(Debug, Clone)]
pub struct QuantumStrategy {
    pub state: QuantumState,
    pub alice: Vec<ProjectiveMeasurement>,
    pub bob: Vec<ProjectiveMeasurement>,
}

impl QuantumStrategy {
    pub fn with_state(&self, state: QuantumState) -> QuantumStrategy {
        QuantumStrategy {
            state,
            alice: self.alice.clone(),
            bob: self.bob.clone(),
        }
    }
}

/// `P(a,b|x,y) = tr[(M^x_a ⊗ N^y_b) ρ]`.
pub fn behavior_from_strategy(s: &QuantumStrategy, g: &GameSpec) -> Result<Behavior> {
    if s.alice.len() != g.num_x() || s.bob.len() != g.num_y() {
        return Err(Error::AlphabetMismatch("strategy and game have different input counts".into()));
    }
    for (m, &n) in s.alice.iter().zip(&g.alice_outcomes).chain(s.bob.iter().zip(&g.bob_outcomes)) {
        if m.outcomes() != n {
            return Err(Error::AlphabetMismatch(format!("measurement '{}' has {} outcomes", m.label, m.outcomes())));
        }
    }
    let da = s.alice[0].dim();
    let db = s.bob[0].dim();
    if s.alice.iter().any(|m| m.dim() != da) || s.bob.iter().any(|m| m.dim() != db) || da * db != s.state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurements of dimension {da}x{db} on a {}-dimensional state",
            s.state.dim()
        )));
    }
    let table = s
        .alice
        .iter()
        .map(|ma| {
            s.bob
                .iter()
                .map(|nb| {
                    let mut cell = Vec::with_capacity(ma.outcomes() * nb.outcomes());
                    for pa in ma.projectors() {
                        for pb in nb.projectors() {
                            let v = s.state.expectation(&kron(pa, pb)).map(|c| c.re)?;
                            cell.push(if v.abs() < 1e-15 { 0.0 } else { v });
                        }
                    }
                    Ok(cell)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Behavior::new(g.alice_outcomes.clone(), g.bob_outcomes.clone(), table)
}

fn ket(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn apply_pow(op: &ComplexMatrix, power: usize, v: &[C64]) -> Vec<C64> {
    if power % 2 == 1 {
        op.apply(v).expect("2x2 on a qubit")
    } else {
        v.to_vec()
    }
}

/// `Ψ⁺_{A₁B₁} ⊗ Ψ⁺_{A₂B₂}` with factors ordered `(A₁, A₂, B₁, B₂)`.
pub fn psi_two() -> QuantumState {
    QuantumState::phi_plus()
        .tensor(&QuantumState::phi_plus())
        .permute_subsystems(&[0, 2, 1, 3])
        .expect("valid permutation")
}

/// Optimal magic-square strategy on two maximally entangled pairs.
pub fn mpg_optimal_strategy() -> QuantumStrategy {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (x, z) = (pauli_x(), pauli_z());
    let zero = ket(&[1.0, 0.0]);
    let one = ket(&[0.0, 1.0]);
    let plus = ket(&[h, h]);
    let minus = ket(&[h, -h]);
    let local = |op1: &ComplexMatrix, p1: usize, op2: &ComplexMatrix, p2: usize, v: &[C64]| -> Vec<C64> {
        let m = kron(
            &if p1 % 2 == 1 { op1.clone() } else { ComplexMatrix::identity(2) },
            &if p2 % 2 == 1 { op2.clone() } else { ComplexMatrix::identity(2) },
        );
        m.apply(v).expect("4x4 on two qubits")
    };
    let sum = |u: Vec<C64>, v: Vec<C64>, s: f64| -> Vec<C64> { u.iter().zip(&v).map(|(a, b)| (a + b * s) * h).collect() };

    let row_kets = |x_in: usize| -> Vec<Vec<C64>> {
        (0..4)
            .map(|o| {
                let (a0, a1) = (o >> 1, o & 1);
                match x_in {
                    0 => kron_vec(&apply_pow(&x, a1, &zero), &apply_pow(&x, a0, &zero)),
                    1 => kron_vec(&apply_pow(&z, a0, &plus), &apply_pow(&z, a1, &plus)),
                    _ => local(&z, a0, &z, a1, &sum(kron_vec(&plus, &one), kron_vec(&minus, &zero), -1.0)),
                }
            })
            .collect()
    };
    let col_kets = |y_in: usize| -> Vec<Vec<C64>> {
        (0..4)
            .map(|o| {
                let (b0, b1) = (o >> 1, o & 1);
                match y_in {
                    0 => kron_vec(&apply_pow(&z, b1, &plus), &apply_pow(&x, b0, &zero)),
                    1 => kron_vec(&apply_pow(&x, b0, &zero), &apply_pow(&z, b1, &plus)),
                    _ => local(&x, b0, &z, b1, &sum(kron_vec(&zero, &zero), kron_vec(&one, &one), 1.0)),
                }
            })
            .collect()
    };
    QuantumStrategy {
        state: psi_two(),
        alice: (0..3)
            .map(|i| ProjectiveMeasurement::from_kets(format!("M{i}"), &row_kets(i)).expect("orthonormal row basis"))
            .collect(),
        bob: (0..3)
            .map(|i| ProjectiveMeasurement::from_kets(format!("N{i}"), &col_kets(i)).expect("orthonormal column basis"))
            .collect(),
    }
}

/// Angle `μ` with `tan μ = ε/(1-ε)`.
pub fn chsh_angle(eps: f64) -> f64 {
    (eps / (1.0 - eps)).atan()
}

/// `A₀ = Z`, `A₁ = X`, `B₀,₁ = cos μ Z ± sin μ X`, `B₂ = Z` on `Ψ⁺`.
pub fn chsh_optimal_strategy(eps: f64) -> Result<QuantumStrategy> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} must lie in (0, 1)")));
    }
    let mu = chsh_angle(eps);
    let (x, z) = (pauli_x(), pauli_z());
    let b0 = &z.scale_real(mu.cos()) + &x.scale_real(mu.sin());
    let b1 = &z.scale_real(mu.cos()) - &x.scale_real(mu.sin());
    Ok(QuantumStrategy {
        state: QuantumState::phi_plus(),
        alice: vec![
            ProjectiveMeasurement::from_observable("A0", &z)?,
            ProjectiveMeasurement::from_observable("A1", &x)?,
        ],
        bob: vec![
            ProjectiveMeasurement::from_observable("B0", &b0)?,
            ProjectiveMeasurement::from_observable("B1", &b1)?,
            ProjectiveMeasurement::from_observable("B2", &z)?,
        ],
    })
}
