//! Lower bound on the conditional entropy `H(A|E)` of a key bit.
//!
//! The bound is
//!
//! ```text
//! H(A|E) ≥ c_m + Σ_{k<m} c_k · min ⟨G_k⟩,   c_k = w_k / (t_k ln 2),   c_m = Σ_{k<m} c_k
//! ```
//!
//! where `(t_k, w_k)` is an `m`-point Gauss-Radau rule and each minimum is
//! taken over a moment relaxation of the quantum set. Every node is an
//! independent SDP; the dual objective of each is used, so the sum remains a
//! valid lower bound up to the solver's residuals.
//!
//! The adversary operators `Z_c` are arbitrary in the entropy formula. The
//! moment relaxation with unbounded `Z_c` degenerates for the magic square
//! away from a perfect score, so by default the cut `‖Z_c‖ ≤ 2/√(t_k(1-t_k))`
//! is imposed through localizing blocks (see [`RelaxationConfig::z_bound`]).
//! The optimal `Z_c` of the exact problem stays far inside this ball.
//!
//! When a node SDP in score mode cannot be solved to tolerance at the
//! requested score `ω`, it is retried at `ω - δ` for a few small `δ`. The
//! feasible set only grows, so the result is still a lower bound at `ω`.
//! This matters at the maximal quantum score, where the moment problem has
//! no strictly feasible point and the score multiplier is not attained.

pub mod quadrature;
pub mod relaxation;
pub mod symmetry;
pub mod words;

use diqkd_sdp::{solve, SdpProblem, SolveStatus, SolverOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{winning_probability, Behavior, GameSpec};
use crate::par::parallel_map;

pub use quadrature::{gauss_radau, GaussRadauRule};
pub use relaxation::{build_moment_relaxation, node_objective, score_polynomial, z_norm_bound, MonomialSet, Observed, Relaxation};
pub use symmetry::Symmetry;
pub use words::{canonicalize, Algebra, Alphabet, Letter, Poly, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintMode {
    /// Only the winning probability is constrained.
    GameScore,
    /// Every observed probability is pinned.
    FullStatistics,
}

#[derive(Debug, Clone)]
pub struct RelaxationConfig {
    pub monomials: MonomialSet,
    /// Number of Gauss-Radau nodes `m` (one SDP per node except the last).
    pub nodes: usize,
    pub mode: ConstraintMode,
    pub solver: SolverOptions,
    /// Worker threads for node SDPs.
    pub jobs: usize,
    /// Seed for jittered restarts after a failed solve.
    pub seed: u64,
    pub max_restarts: usize,
    /// Merge moments related by symmetries of the node problems.
    pub symmetry: bool,
    /// Impose `‖Z_c‖ ≤ 2/√(t_k(1-t_k))` through localizing blocks. Without
    /// it the restricted relaxation lets `Z_c` grow to exploit tiny score
    /// deficits.
    pub z_bound: bool,
}

/// Score reductions tried, in order, when a node fails at the requested score.
pub const SCORE_BACKOFF: [f64; 5] = [1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

impl Default for RelaxationConfig {
    fn default() -> Self {
        RelaxationConfig {
            monomials: MonomialSet::restricted_level_two(),
            nodes: 8,
            mode: ConstraintMode::GameScore,
            solver: SolverOptions::default(),
            jobs: 1,
            seed: 0,
            max_restarts: 2,
            symmetry: true,
            z_bound: true,
        }
    }
}

impl RelaxationConfig {
    fn z_cut(&self, t: f64) -> Option<f64> {
        self.z_bound.then(|| z_norm_bound(t))
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::OutOfRange(format!("node count m = {} must be at least 2", self.nodes)));
        }
        if let MonomialSet::Level(0) = self.monomials {
            return Err(Error::OutOfRange("NPA level must be at least 1".into()));
        }
        Ok(())
    }
}

/// What the bound is conditioned on.
#[derive(Debug, Clone)]
pub enum BoundInput {
    Score(f64),
    Behavior(Behavior),
}

impl BoundInput {
    fn observed(&self, g: &GameSpec, mode: ConstraintMode) -> Result<Observed> {
        match (self, mode) {
            (BoundInput::Score(s), ConstraintMode::GameScore) => Ok(Observed::Score(*s)),
            (BoundInput::Score(_), ConstraintMode::FullStatistics) => Err(Error::OutOfRange(
                "full-statistics mode needs a behavior, not a score".into(),
            )),
            (BoundInput::Behavior(b), ConstraintMode::GameScore) => {
                Ok(Observed::Score(winning_probability(g, b)?.min(1.0)))
            }
            (BoundInput::Behavior(b), ConstraintMode::FullStatistics) => Ok(Observed::Statistics(b.clone())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeResult {
    pub index: usize,
    pub t: f64,
    pub weight: f64,
    /// `c_k = w_k / (t_k ln 2)`.
    pub coefficient: f64,
    /// Certified lower bound on `min ⟨G_k⟩` (dual objective plus offset).
    pub lower: f64,
    /// Primal objective plus offset.
    pub upper: f64,
    pub status: String,
    pub gap: f64,
    pub iterations: usize,
    pub restarts: usize,
    /// Score bound actually imposed, in score mode.
    pub score: Option<f64>,
    /// Smallest eigenvalue of the returned moment matrix.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyBound {
    pub key_pair: (usize, usize),
    /// `c_m + Σ c_k · lower_k`.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub value: f64,
    pub constant: f64,
    pub moment_matrix_size: usize,
    pub moment_variables: usize,
    /// Distinct unpinned moments before symmetry reduction.
    pub unreduced_variables: usize,
    pub symmetry_order: usize,
    pub nodes: Vec<NodeResult>,
}

/// Node SDPs for `key_pair`, in node order, each with its objective offset.
pub fn node_problems(
    g: &GameSpec,
    input: &BoundInput,
    key_pair: (usize, usize),
    cfg: &RelaxationConfig,
) -> Result<(GaussRadauRule, Relaxation, Vec<(SdpProblem, f64)>)> {
    cfg.validate()?;
    let rule = gauss_radau(cfg.nodes)?;
    let relax = Relaxation::new(g, &input.observed(g, cfg.mode)?, &cfg.monomials, key_pair, cfg.symmetry)?;
    let problems = rule.nodes[..cfg.nodes - 1]
        .iter()
        .map(|&t| relax.problem_with(&node_objective(g, key_pair, t)?, relax.score, cfg.z_cut(t)))
        .collect::<Result<Vec<_>>>()?;
    Ok((rule, relax, problems))
}

fn solve_node(
    relax: &Relaxation,
    objective: &Poly,
    t: f64,
    first: &(SdpProblem, f64),
    index: usize,
    cfg: &RelaxationConfig,
) -> Result<(NodeResult, bool)> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut scores = vec![relax.score];
    if let Some(omega) = relax.score {
        scores.extend(SCORE_BACKOFF.iter().map(|d| Some((omega - d).max(0.0))));
    }
    let mut restarts = 0;
    let mut last = None;
    for (attempt, &score) in scores.iter().enumerate() {
        let rebuilt;
        let (problem, offset) = if attempt == 0 {
            first
        } else {
            rebuilt = relax.problem_with(objective, score, cfg.z_cut(t))?;
            &rebuilt
        };
        let mut opts = cfg.solver.clone();
        let mut tries = 0;
        let sol = loop {
            let sol = solve(problem, &opts)?;
            if sol.status == SolveStatus::Failed && tries < cfg.max_restarts {
                tries += 1;
                restarts += 1;
                opts.initial_scale = cfg.solver.initial_scale * 10f64.powf(rng.gen_range(-1.0..1.0));
                continue;
            }
            break sol;
        };
        if sol.status == SolveStatus::Infeasible {
            return Err(Error::Infeasible(format!(
                "node {index}: no moment assignment satisfies the constraints"
            )));
        }
        let ok = matches!(sol.status, SolveStatus::Optimal | SolveStatus::NearOptimal);
        let node = NodeResult {
            index,
            t: 0.0,
            weight: 0.0,
            coefficient: 0.0,
            lower: sol.dual_value + offset,
            upper: sol.primal_value + offset,
            status: sol.status.as_str().to_string(),
            gap: sol.gap,
            iterations: sol.iterations,
            restarts,
            score,
            min_eigenvalue: sol.slack[0].min_eigenvalue(),
        };
        if ok {
            return Ok((node, true));
        }
        last = Some(node);
    }
    Ok((last.expect("at least one attempt"), false))
}

/// Bound on `H(A|E)` for Alice's key bit on inputs `key_pair`.
pub fn entropy_lower_bound(
    g: &GameSpec,
    input: &BoundInput,
    key_pair: (usize, usize),
    cfg: &RelaxationConfig,
) -> Result<EntropyBound> {
    entropy_lower_bound_with(g, input, key_pair, cfg, |_| {})
}

/// As [`entropy_lower_bound`], calling `progress` as each node finishes.
pub fn entropy_lower_bound_with(
    g: &GameSpec,
    input: &BoundInput,
    key_pair: (usize, usize),
    cfg: &RelaxationConfig,
    progress: impl Fn(&NodeResult) + Sync,
) -> Result<EntropyBound> {
    let (rule, relax, problems) = node_problems(g, input, key_pair, cfg)?;
    let objectives = rule.nodes[..cfg.nodes - 1]
        .iter()
        .map(|&t| node_objective(g, key_pair, t))
        .collect::<Result<Vec<_>>>()?;
    let coeffs = rule.coefficients();
    let results = parallel_map(problems.len(), cfg.jobs, |k| {
        solve_node(&relax, &objectives[k], rule.nodes[k], &problems[k], k, cfg).map(|(mut node, ok)| {
            node.t = rule.nodes[k];
            node.weight = rule.weights[k];
            node.coefficient = coeffs[k];
            progress(&node);
            (node, ok)
        })
    });

    let mut nodes = Vec::with_capacity(problems.len());
    for r in results {
        let (node, ok) = r?;
        if !ok {
            return Err(Error::SolverFailed {
                node: node.index,
                status: node.status.clone(),
                gap: node.gap,
            });
        }
        nodes.push(node);
    }
    let constant = rule.constant();
    let raw = constant + nodes.iter().map(|n| n.coefficient * n.lower).sum::<f64>();
    Ok(EntropyBound {
        key_pair,
        raw,
        value: raw.clamp(0.0, 1.0),
        constant,
        moment_matrix_size: relax.size(),
        moment_variables: relax.num_variables(),
        unreduced_variables: relax.unreduced_variables,
        symmetry_order: relax.symmetry_order,
        nodes,
    })
}
