//! Command-line front end.
//!
//! Data goes to standard output (or `--output`), progress and errors to
//! standard error. Exit codes: 0 on success, 1 when a computation fails,
//! 2 on usage errors. Relative output paths are resolved against
//! `DIQKD_OUTPUT_DIR` when it is set.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use diqkd_sdp::{export_sdpa, SolverOptions};
use serde::Serialize;

use crate::entropy::{
    entropy_lower_bound_with, node_problems, BoundInput, ConstraintMode, EntropyBound, MonomialSet, NodeResult,
    RelaxationConfig,
};
use crate::error::Error;
use crate::fmt::{format_g17, to_json};
use crate::games::{
    behavior_from_strategy, chsh_optimal_strategy, classical_value, per_pair_winning, winning_probability, Behavior,
    DeterministicStrategy, GameSpec,
};
use crate::keyrate::{csv_field, default_fill, sweep, Protocol, SweepAxis};
use crate::noise::{apply_detection_efficiency, apply_visibility, mix_isotropic, qber, werner};
use crate::protocol::{run_protocol, ProtocolConfig};

pub const OUTPUT_DIR_ENV: &str = "DIQKD_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "diqkd", version, about = "Device-independent QKD key rates for the magic-square and CHSH protocols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Winning probability, QBER and per-pair winning probabilities of a strategy.
    Winprob(WinprobArgs),
    /// Lower bound on H(A|E) for a key bit.
    Entropy(EntropyArgs),
    /// Key rate along a noise axis.
    KeyrateSweep(SweepArgs),
    /// Monte-Carlo run of the protocol.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    Mpg,
    Chsh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Optimal quantum strategy, with the noise flags applied.
    Optimal,
    /// Deterministic magic-square strategy that wins 8 of 9 cells.
    TableOne,
    /// Both parties always output 0.
    AllZero,
    /// Best deterministic strategy found by exhaustive search.
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    GameScore,
    FullStatistics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Visibility,
    Efficiency,
    Score,
    Qber,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn open_unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn key_pair(s: &str) -> Result<(usize, usize), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("'{s}' is not of the form x,y"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("'{t}' is not an input index"));
    Ok((parse(x)?, parse(y)?))
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write data here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Visibility ν of each entangled pair.
    #[arg(long, default_value = "1.0", value_parser = unit_interval)]
    pub visibility: f64,
    /// Per-side detection efficiency η.
    #[arg(long, default_value = "1.0", value_parser = unit_interval)]
    pub efficiency: f64,
    /// Use the isotropic magic-square state with weight q instead of ν.
    #[arg(long, value_parser = unit_interval)]
    pub q: Option<f64>,
    /// Read the behavior from a JSON file instead of building it.
    #[arg(long)]
    pub behavior: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WinprobArgs {
    #[arg(long, value_enum, default_value = "mpg")]
    pub game: GameArg,
    #[arg(long, value_enum, default_value = "optimal")]
    pub strategy: StrategyArg,
    /// Alice's bias ε in the CHSH game.
    #[arg(long, default_value = "0.5", value_parser = open_unit_interval)]
    pub eps: f64,
    #[arg(long, default_value = "0.9", value_parser = open_unit_interval)]
    pub gamma: f64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RelaxationArgs {
    /// Number of Gauss-Radau nodes.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    /// Relaxation level; level 2 with the restricted set is `1+A+B+Z+AB+AZ+BZ`.
    #[arg(long, default_value_t = 2)]
    pub level: usize,
    /// `restricted`, `full`, or an explicit `+`-separated block list such
    /// as `1+A+B+Z+AA+AB+AZ+BZ` (which overrides --level).
    #[arg(long, default_value = "restricted")]
    pub monomials: String,
    #[arg(long, value_enum, default_value = "game-score")]
    pub mode: ModeArg,
    /// Norm cut on the adversary operators.
    #[arg(long, value_enum, default_value = "on")]
    pub z_bound: Switch,
    /// Symmetry reduction of the moment variables.
    #[arg(long, value_enum, default_value = "on")]
    pub symmetry: Switch,
    /// Solver duality-gap tolerance.
    #[arg(long, default_value = "1e-7", value_parser = positive)]
    pub tol: f64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl RelaxationArgs {
    fn monomial_set(&self) -> Result<MonomialSet, CliError> {
        let set = match (self.monomials.as_str(), self.level) {
            (_, 0) => return Err(CliError::Usage("--level must be at least 1".into())),
            ("restricted", 1) => MonomialSet::parse("1+A+B+Z"),
            ("restricted", 2) => Ok(MonomialSet::restricted_level_two()),
            ("restricted", k) => {
                return Err(CliError::Usage(format!(
                    "no restricted monomial set at level {k}; use --monomials full or an explicit block list"
                )))
            }
            ("full", k) => Ok(MonomialSet::Level(k)),
            (list, _) => MonomialSet::parse(list),
        };
        set.map_err(|e| CliError::Usage(e.to_string()))
    }

    fn config(&self) -> Result<RelaxationConfig, CliError> {
        let cfg = RelaxationConfig {
            monomials: self.monomial_set()?,
            nodes: self.m,
            mode: match self.mode {
                ModeArg::GameScore => ConstraintMode::GameScore,
                ModeArg::FullStatistics => ConstraintMode::FullStatistics,
            },
            solver: SolverOptions::with_tolerance(self.tol),
            jobs: self.jobs.max(1),
            z_bound: self.z_bound == Switch::On,
            symmetry: self.symmetry == Switch::On,
            ..Default::default()
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long, value_enum, default_value = "mpg")]
    pub game: GameArg,
    /// Observed winning probability; without it the score of the behavior
    /// given by the noise flags is used.
    #[arg(long, value_parser = unit_interval)]
    pub score: Option<f64>,
    #[arg(long, default_value = "0.5", value_parser = open_unit_interval)]
    pub eps: f64,
    #[arg(long, default_value = "0.9", value_parser = open_unit_interval)]
    pub gamma: f64,
    /// Key inputs `x,y`; may be repeated. Defaults to 0,0 (magic square) or 0,2 (CHSH).
    #[arg(long = "key-pair", value_parser = key_pair)]
    pub key_pairs: Vec<(usize, usize)>,
    /// Write one SDPA file per node and a manifest into this directory.
    #[arg(long)]
    pub export_sdpa: Option<PathBuf>,
    /// Stop after exporting, without solving.
    #[arg(long, requires = "export_sdpa")]
    pub export_only: bool,
    #[command(flatten)]
    pub relax: RelaxationArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "mpg")]
    pub protocol: GameArg,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',', required = true, value_parser = unit_interval)]
    pub grid: Vec<f64>,
    #[arg(long, default_value = "0.5", value_parser = open_unit_interval)]
    pub eps: f64,
    #[arg(long, default_value = "0.9", value_parser = open_unit_interval)]
    pub gamma: f64,
    #[command(flatten)]
    pub relax: RelaxationArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "mpg")]
    pub protocol: GameArg,
    /// Number of rounds.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value = "0.9", value_parser = open_unit_interval)]
    pub gamma: f64,
    /// Abort threshold on the estimated score.
    #[arg(long, alias = "i-exp", value_parser = unit_interval)]
    pub omega_exp: f64,
    #[arg(long, default_value = "0.5", value_parser = open_unit_interval)]
    pub eps: f64,
    #[arg(long)]
    pub seed: u64,
    /// Devetak-Winter rate per raw-key bit for the final-key estimate.
    #[arg(long)]
    pub devetak_winter: Option<f64>,
    /// Write the per-round transcript as JSON lines.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Include the raw keys in the report.
    #[arg(long)]
    pub keys: bool,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(Error::Io(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(e) => write!(f, "error: {e}"),
        }
    }
}

/// Resolves a relative output path against `DIQKD_OUTPUT_DIR`.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(p) => {
            let p = resolve_output(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn protocol_for(game: GameArg, eps: f64) -> Protocol {
    match game {
        GameArg::Mpg => Protocol::Mpg,
        GameArg::Chsh => Protocol::Chsh { eps },
    }
}

/// Builds the behavior described by the strategy and noise flags.
fn build_behavior(g: &GameSpec, strategy: StrategyArg, noise: &NoiseArgs) -> Result<Behavior, CliError> {
    if let Some(path) = &noise.behavior {
        let b = Behavior::from_json(&fs::read_to_string(path)?)?;
        if b.alice_outcomes() != g.alice_outcomes.as_slice() || b.bob_outcomes() != g.bob_outcomes.as_slice() {
            return Err(CliError::Usage(format!("{} does not hold a {} behavior", path.display(), g.name())));
        }
        return Ok(b);
    }
    let deterministic = |s: DeterministicStrategy| -> Result<Behavior, CliError> {
        if noise.visibility != 1.0 || noise.q.is_some() {
            return Err(CliError::Usage("--visibility and --q apply only to the optimal strategy".into()));
        }
        Ok(s.behavior(g)?)
    };
    let base = match (strategy, g.kind) {
        (StrategyArg::Optimal, crate::games::GameKind::Mpg) => {
            let state = match noise.q {
                Some(q) => {
                    if noise.visibility != 1.0 {
                        return Err(CliError::Usage("--q and --visibility are alternatives".into()));
                    }
                    mix_isotropic(q)?
                }
                None => apply_visibility(noise.visibility, 2)?,
            };
            behavior_from_strategy(&crate::games::mpg_optimal_strategy().with_state(state), g)?
        }
        (StrategyArg::Optimal, crate::games::GameKind::Chsh { eps, .. }) => {
            if noise.q.is_some() {
                return Err(CliError::Usage("--q applies only to the magic square".into()));
            }
            behavior_from_strategy(&chsh_optimal_strategy(eps)?.with_state(werner(noise.visibility)?), g)?
        }
        (StrategyArg::TableOne, crate::games::GameKind::Mpg) => deterministic(DeterministicStrategy::mpg_table_one())?,
        (StrategyArg::TableOne, _) => {
            return Err(CliError::Usage("the table-one strategy is defined for the magic square only".into()))
        }
        (StrategyArg::AllZero, _) => deterministic(DeterministicStrategy::all_zero(g))?,
        (StrategyArg::Classical, _) => deterministic(classical_value(g).1)?,
    };
    if noise.efficiency < 1.0 {
        Ok(apply_detection_efficiency(&base, noise.efficiency, &default_fill(g), g)?)
    } else {
        Ok(base)
    }
}

#[derive(Serialize)]
struct PairWin {
    x: usize,
    y: usize,
    winning: f64,
}

#[derive(Serialize)]
struct WinprobReport {
    game: &'static str,
    omega: f64,
    qber: f64,
    pairs: Vec<PairWin>,
}

fn cmd_winprob(a: &WinprobArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let g = protocol_for(a.game, a.eps).game(a.gamma)?;
    let b = build_behavior(&g, a.strategy, &a.noise)?;
    let report = WinprobReport {
        game: g.name(),
        omega: winning_probability(&g, &b)?,
        qber: qber(&b, &g)?,
        pairs: per_pair_winning(&g, &b)?
            .into_iter()
            .map(|(x, y, winning)| PairWin { x, y, winning })
            .collect(),
    };
    let text = match a.out.format {
        Format::Json => to_json(&report) + "\n",
        Format::Csv => {
            let mut s = String::from("quantity,x,y,value\n");
            s += &format!("omega,,,{}\n", format_g17(report.omega));
            s += &format!("qber,,,{}\n", format_g17(report.qber));
            for p in &report.pairs {
                s += &format!("pair,{},{},{}\n", p.x, p.y, format_g17(p.winning));
            }
            s
        }
    };
    emit(&text, a.out.output.as_deref(), stdout)
}

fn progress_line(stderr: &std::sync::Mutex<&mut (dyn Write + Send)>, prefix: &str, n: &NodeResult) {
    let mut e = stderr.lock().expect("stderr lock");
    let _ = writeln!(
        e,
        "{prefix}node {} t={:.6} lower={} status={} iterations={} restarts={}",
        n.index,
        n.t,
        format_g17(n.lower),
        n.status,
        n.iterations,
        n.restarts
    );
}

#[derive(Serialize)]
struct ExportManifest {
    key_pair: (usize, usize),
    constant: f64,
    nodes: Vec<ExportNode>,
}

#[derive(Serialize)]
struct ExportNode {
    file: String,
    t: f64,
    weight: f64,
    coefficient: f64,
    /// Added to the SDPA objective to obtain `min ⟨G_k⟩`.
    offset: f64,
}

#[derive(Serialize)]
struct EntropyReport {
    game: &'static str,
    mode: ConstraintMode,
    monomials: String,
    m: usize,
    score: f64,
    bounds: Vec<EntropyBound>,
}

fn cmd_entropy(a: &EntropyArgs, stdout: &mut dyn Write, stderr: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let cfg = a.relax.config()?;
    let g = protocol_for(a.game, a.eps).game(a.gamma)?;
    let input = match (a.score, cfg.mode) {
        (Some(_), ConstraintMode::FullStatistics) => {
            return Err(CliError::Usage("--score cannot be combined with --mode full-statistics".into()))
        }
        (Some(s), _) => BoundInput::Score(s),
        (None, _) => BoundInput::Behavior(build_behavior(&g, StrategyArg::Optimal, &a.noise)?),
    };
    let score = match &input {
        BoundInput::Score(s) => *s,
        BoundInput::Behavior(b) => winning_probability(&g, b)?,
    };
    let pairs = if a.key_pairs.is_empty() {
        vec![g.key_pairs()[0]]
    } else {
        a.key_pairs.clone()
    };
    for &(x, y) in &pairs {
        if x >= g.num_x() || y >= g.num_y() || !g.key_pairs().contains(&(x, y)) {
            return Err(CliError::Usage(format!("({x},{y}) is not a key pair of the {} game", g.name())));
        }
    }

    if let Some(dir) = &a.export_sdpa {
        let dir = resolve_output(dir);
        fs::create_dir_all(&dir)?;
        for &kp in &pairs {
            let (rule, _, problems) = node_problems(&g, &input, kp, &cfg)?;
            let coeffs = rule.coefficients();
            let mut nodes = Vec::new();
            for (k, (p, offset)) in problems.iter().enumerate() {
                let file = format!("pair{}{}_node{:02}.dat-s", kp.0, kp.1, k);
                fs::write(dir.join(&file), export_sdpa(p))?;
                nodes.push(ExportNode {
                    file,
                    t: rule.nodes[k],
                    weight: rule.weights[k],
                    coefficient: coeffs[k],
                    offset: *offset,
                });
            }
            let manifest = ExportManifest {
                key_pair: kp,
                constant: rule.constant(),
                nodes,
            };
            fs::write(dir.join(format!("pair{}{}_manifest.json", kp.0, kp.1)), to_json(&manifest) + "\n")?;
        }
        if a.export_only {
            return Ok(());
        }
    }

    let err = std::sync::Mutex::new(stderr);
    let mut bounds = Vec::new();
    for &kp in &pairs {
        let prefix = format!("pair ({},{}) ", kp.0, kp.1);
        bounds.push(entropy_lower_bound_with(&g, &input, kp, &cfg, |n| progress_line(&err, &prefix, n))?);
    }
    let report = EntropyReport {
        game: g.name(),
        mode: cfg.mode,
        monomials: cfg.monomials.label(),
        m: cfg.nodes,
        score,
        bounds,
    };
    let text = match a.out.format {
        Format::Json => to_json(&report) + "\n",
        Format::Csv => {
            let mut s = String::from(
                "key_x,key_y,score,h_a_given_e,raw,constant,moment_matrix_size,moment_variables,unreduced_variables,symmetry_order\n",
            );
            for b in &report.bounds {
                s += &format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    b.key_pair.0,
                    b.key_pair.1,
                    format_g17(score),
                    format_g17(b.value),
                    format_g17(b.raw),
                    format_g17(b.constant),
                    b.moment_matrix_size,
                    b.moment_variables,
                    b.unreduced_variables,
                    b.symmetry_order
                );
            }
            s
        }
    };
    emit(&text, a.out.output.as_deref(), stdout)
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write, stderr: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let mut cfg = a.relax.config()?;
    let protocol = protocol_for(a.protocol, a.eps);
    let axis = match a.axis {
        AxisArg::Visibility => SweepAxis::Visibility,
        AxisArg::Efficiency => SweepAxis::Efficiency,
        AxisArg::Score => SweepAxis::Score,
        AxisArg::Qber => SweepAxis::Qber,
    };
    // grid points share the worker threads; each point solves its nodes serially
    let jobs = cfg.jobs;
    cfg.jobs = 1;
    let err = std::sync::Mutex::new(stderr);
    let result = sweep(protocol, axis, &a.grid, a.gamma, &cfg, jobs, |i, kp, n| {
        progress_line(&err, &format!("point {i} pair ({},{}) ", kp.0, kp.1), n)
    })
    .map_err(|e| match e {
        Error::OutOfRange(m) => CliError::Usage(m),
        e => CliError::Compute(e),
    })?;
    let text = match a.format {
        Format::Json => to_json(&result) + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            result.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("CSV is UTF-8")
        }
    };
    emit(&text, a.output.as_deref(), stdout)?;
    if !result.points.is_empty() && result.failures() == result.points.len() {
        return Err(CliError::Compute(Error::Infeasible(format!(
            "all {} sweep points failed",
            result.points.len()
        ))));
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let protocol = protocol_for(a.protocol, a.eps);
    let mut cfg = ProtocolConfig::new(protocol, a.n, a.gamma, a.omega_exp, a.seed);
    cfg.devetak_winter = a.devetak_winter;
    cfg.record_transcript = a.transcript.is_some();
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let g = protocol.game(a.gamma)?;
    let b = build_behavior(&g, StrategyArg::Optimal, &a.noise)?;
    let mut result = run_protocol(&cfg, &b)?;
    if let Some(path) = &a.transcript {
        let path = resolve_output(path);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut f = std::io::BufWriter::new(fs::File::create(path)?);
        result.write_transcript(&mut f)?;
        f.flush()?;
    }
    if !a.keys {
        result.alice_key.0.clear();
        result.bob_key.0.clear();
    }
    #[derive(Serialize)]
    struct Report<'a> {
        config: &'a ProtocolConfig,
        result: &'a crate::protocol::ProtocolRunResult,
    }
    let text = match a.out.format {
        Format::Json => to_json(&Report { config: &cfg, result: &result }) + "\n",
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(format_g17).unwrap_or_default();
            let mut s = String::from(
                "protocol,rounds,gamma,threshold,seed,aborted,estimated_score,test_rounds,test_wins,raw_key_length,disagreements,disagreement_fraction,final_key_length\n",
            );
            s += &format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                csv_field(g.name()),
                cfg.rounds,
                format_g17(cfg.gamma),
                format_g17(cfg.threshold),
                cfg.seed,
                result.aborted,
                opt(result.estimated_score),
                result.test_rounds,
                result.test_wins,
                result.raw_key_length,
                result.disagreements,
                opt(result.disagreement_fraction),
                opt(result.final_key_length)
            );
            s
        }
    };
    emit(&text, a.out.output.as_deref(), stdout)
}

/// Runs one command line, writing data to `stdout` and diagnostics to
/// `stderr`, and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Winprob(a) => cmd_winprob(a, stdout),
        Command::Entropy(a) => cmd_entropy(a, stdout, stderr),
        Command::KeyrateSweep(a) => cmd_sweep(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
