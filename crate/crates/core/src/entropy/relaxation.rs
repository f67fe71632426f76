//! Moment-matrix relaxation of the per-node minimization `min ⟨G_k⟩`.
//!
//! Rows and columns of the moment matrix are indexed by a list of
//! monomials `u_i`; entry `(i, j)` is the moment `⟨u_i† u_j⟩` after
//! canonicalization. Party operators are written in the parity basis (see
//! [`Algebra::Parity`]), whose span per setting equals that of the
//! projectors with one projector eliminated through completeness.
//!
//! Each distinct moment (identified with its adjoint) is one unknown; the
//! identity is fixed to 1 and observed statistics pin further moments. With
//! symmetry reduction enabled, unknowns in one orbit of the problem's
//! symmetry group share a single SDP variable up to sign, and orbits that
//! contain a moment together with its negative vanish.

use std::collections::HashMap;

use diqkd_sdp::{BlockKind, SdpProblem, SymSparse};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{Behavior, GameSpec};

use super::symmetry::{candidates, Symmetry};
use super::words::{parity_projector, Algebra, Alphabet, Letter, Poly, Word};

/// Which monomials index the moment matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MonomialSet {
    /// Every word of length at most `k` over all letters.
    Level(usize),
    /// Products of one letter per listed party, e.g. `["1", "A", "AB", "AZ"]`.
    Blocks(Vec<String>),
}

impl MonomialSet {
    /// `{1} ∪ A ∪ B ∪ Z ∪ AB ∪ AZ ∪ BZ`.
    pub fn restricted_level_two() -> Self {
        Self::parse("1+A+B+Z+AB+AZ+BZ").expect("valid block list")
    }

    /// Accepts `level1`, `level2`, ... or a `+`-separated block list.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(k) = t.strip_prefix("level") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::OutOfRange(format!("bad level in '{s}'")))?;
            if k == 0 {
                return Err(Error::OutOfRange("level must be at least 1".into()));
            }
            return Ok(MonomialSet::Level(k));
        }
        let blocks: Vec<String> = t.split('+').map(|b| b.trim().to_string()).collect();
        for b in &blocks {
            if b != "1" && (b.is_empty() || !b.chars().all(|c| matches!(c, 'A' | 'B' | 'Z'))) {
                return Err(Error::OutOfRange(format!("bad monomial block '{b}'")));
            }
        }
        Ok(MonomialSet::Blocks(blocks))
    }

    pub fn label(&self) -> String {
        match self {
            MonomialSet::Level(k) => format!("level{k}"),
            MonomialSet::Blocks(b) => b.join("+"),
        }
    }

    /// Canonical, deduplicated monomials in generation order; the identity is first.
    pub fn generate(&self, alphabet: &Alphabet, algebra: Algebra) -> Vec<Word> {
        let (a, b, z) = match algebra {
            Algebra::Projector => alphabet.independent_letters(),
            Algebra::Parity => alphabet.parity_letters(),
        };
        let mut out = vec![Word::identity()];
        let mut seen: std::collections::HashSet<Word> = out.iter().cloned().collect();
        let mut push = |w: Word| {
            if let Some(c) = algebra.canonicalize(&w) {
                if seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        };
        match self {
            MonomialSet::Level(k) => {
                let all: Vec<Letter> = a.iter().chain(&b).chain(&z).copied().collect();
                let mut frontier = vec![Word::identity()];
                for _ in 0..*k {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for &l in &all {
                            let mut v = w.0.clone();
                            v.push(l);
                            next.push(Word(v));
                        }
                    }
                    for w in &next {
                        push(w.clone());
                    }
                    frontier = next;
                }
            }
            MonomialSet::Blocks(blocks) => {
                for block in blocks {
                    if block == "1" {
                        continue;
                    }
                    let mut words = vec![Word::identity()];
                    for c in block.chars() {
                        let letters = match c {
                            'A' => &a,
                            'B' => &b,
                            _ => &z,
                        };
                        words = words
                            .iter()
                            .flat_map(|w| {
                                letters.iter().map(move |&l| {
                                    let mut v = w.0.clone();
                                    v.push(l);
                                    Word(v)
                                })
                            })
                            .collect();
                    }
                    for w in words {
                        push(w);
                    }
                }
            }
        }
        out
    }
}

/// How observed data constrains the relaxation.
#[derive(Debug, Clone, PartialEq)]
pub enum Observed {
    /// Winning probability at least this value.
    Score(f64),
    /// Every `P(a,b|x,y)` fixed to the behavior's value.
    Statistics(Behavior),
}

#[derive(Debug, Clone, Copy)]
enum Moment {
    Identity,
    Zero,
    /// SDP variable and the sign relating this moment to it.
    Free(usize, f64),
    Fixed(f64),
}

/// Moment-matrix structure and constraints shared by all quadrature nodes.
#[derive(Debug, Clone)]
pub struct Relaxation {
    pub alphabet: Alphabet,
    pub monomials: Vec<Word>,
    /// Orbit representatives of the free moment variables, indexed by SDP variable.
    pub variables: Vec<Word>,
    /// Number of distinct unpinned moments before symmetry reduction.
    pub unreduced_variables: usize,
    /// Order of the symmetry group used to merge moments (1 when disabled).
    pub symmetry_order: usize,
    /// Lower bound on the winning probability, in score mode.
    pub score: Option<f64>,
    score_offset: f64,
    lookup: HashMap<Word, Moment>,
    template: SdpProblem,
}

const ALG: Algebra = Algebra::Parity;

fn alphabet_of(g: &GameSpec) -> Alphabet {
    Alphabet {
        alice_outcomes: g.alice_outcomes.clone(),
        bob_outcomes: g.bob_outcomes.clone(),
        z_count: 2,
    }
}

fn proj(g: &GameSpec, alice: bool, setting: usize, outcome: usize) -> Result<Poly> {
    let n = if alice {
        g.alice_outcomes[setting]
    } else {
        g.bob_outcomes[setting]
    };
    parity_projector(alice, setting, outcome, n)
}

/// `Σ_{x,y} π(x,y) Σ_{a,b wins} M^x_a N^y_b`.
pub fn score_polynomial(g: &GameSpec) -> Result<Poly> {
    let mut p = Poly::zero(ALG);
    for (x, y, pi) in g.test_pairs() {
        for a in 0..g.alice_outcomes[x] {
            let ma = proj(g, true, x, a)?;
            for b in 0..g.bob_outcomes[y] {
                if g.wins(x, y, a, b) {
                    p.add(&ma.mul(&proj(g, false, y, b)?), pi);
                }
            }
        }
    }
    Ok(p)
}

/// Projector `Π^x_c` onto Alice's key bit `c` for key inputs `(x, y)`.
pub fn key_projector(g: &GameSpec, key_pair: (usize, usize), c: u8) -> Result<Poly> {
    let (x, y) = key_pair;
    let mut p = Poly::zero(ALG);
    for a in 0..g.alice_outcomes[x] {
        if g.key_bits(x, y, a, 0).0 == c {
            p.add(&proj(g, true, x, a)?, 1.0);
        }
    }
    Ok(p)
}

/// `G(t) = Σ_c Π_c (Z_c + Z_c† + (1-t) Z_c† Z_c) + t Z_c Z_c†`.
pub fn node_objective(g: &GameSpec, key_pair: (usize, usize), t: f64) -> Result<Poly> {
    check_key_pair(g, key_pair)?;
    let mut obj = Poly::zero(ALG);
    for c in 0..2u8 {
        let z = Word::letter(Letter::Z { index: c, dagger: false });
        let zd = Word::letter(Letter::Z { index: c, dagger: true });
        let pi = key_projector(g, key_pair, c)?;
        let mut inner = Poly::word(ALG, z.clone());
        inner.add_term(zd.clone(), 1.0);
        inner.add_term(zd.concat(&z), 1.0 - t);
        obj.add(&pi.mul(&inner), 1.0);
        obj.add_term(z.concat(&zd), t);
    }
    Ok(obj)
}

fn check_key_pair(g: &GameSpec, (x, y): (usize, usize)) -> Result<()> {
    if x < g.num_x() && y < g.num_y() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("key inputs ({x}, {y}) are not inputs of {}", g.name())))
    }
}

/// Candidates that fix every ingredient of the node problems.
fn problem_symmetries(
    g: &GameSpec,
    key_pair: (usize, usize),
    monomials: &[Word],
    score: Option<&Poly>,
    fixed: &HashMap<Word, f64>,
) -> Result<Vec<Symmetry>> {
    let pis = [key_projector(g, key_pair, 0)?, key_projector(g, key_pair, 1)?];
    // G(t) is affine in t, so two nodes cover all of them.
    let objectives = [node_objective(g, key_pair, 0.25)?, node_objective(g, key_pair, 0.75)?];
    let monomial_set: std::collections::HashSet<&Word> = monomials.iter().collect();
    let tol = 1e-12;
    let keep = |s: &Symmetry| -> bool {
        monomials.iter().all(|u| monomial_set.contains(&s.apply(u).0))
            && objectives.iter().all(|o| s.apply_poly(o).moment_distance(o) < tol)
            && score.is_none_or(|p| s.apply_poly(p).moment_distance(p) < tol)
            && fixed.iter().all(|(w, &v)| {
                let (u, sign) = s.apply(w);
                fixed
                    .get(&ALG.key(&u))
                    .is_some_and(|&fv| (fv - sign * v).abs() < 1e-10)
            })
    };
    Ok(candidates(g, [&pis[0], &pis[1]]).into_iter().filter(keep).collect())
}

impl Relaxation {
    /// Relaxation for key inputs `key_pair`. With `symmetric`, moments are
    /// merged along orbits of the symmetries of the resulting problems.
    pub fn new(
        g: &GameSpec,
        observed: &Observed,
        monomials: &MonomialSet,
        key_pair: (usize, usize),
        symmetric: bool,
    ) -> Result<Self> {
        check_key_pair(g, key_pair)?;
        let alphabet = alphabet_of(g);
        let monomials = monomials.generate(&alphabet, ALG);
        let n = monomials.len();

        let (fixed, score) = match observed {
            Observed::Score(s) => {
                check_score(*s)?;
                (HashMap::new(), Some(*s))
            }
            Observed::Statistics(b) => (fixed_moments(g, b)?, None),
        };
        let score_poly = score_polynomial(g)?;
        let group = if symmetric {
            problem_symmetries(g, key_pair, &monomials, score.map(|_| &score_poly), &fixed)?
        } else {
            vec![Symmetry::identity()]
        };

        let adjoints: Vec<Word> = monomials.iter().map(Word::adjoint).collect();
        let mut lookup: HashMap<Word, Moment> = HashMap::new();
        lookup.insert(Word::identity(), Moment::Identity);
        for (w, &v) in &fixed {
            lookup.insert(w.clone(), Moment::Fixed(v));
        }
        let mut variables = Vec::new();
        let mut unreduced = 0;
        let mut positions: Vec<Vec<(usize, usize, f64)>> = Vec::new();
        let mut constant = SymSparse::new();
        for i in 0..n {
            for j in i..n {
                let Some(w) = ALG.canonicalize(&adjoints[i].concat(&monomials[j])) else {
                    continue;
                };
                let key = ALG.key(&w);
                if !lookup.contains_key(&key) {
                    unreduced += register_orbit(&key, &group, &mut lookup, &mut variables, &mut positions);
                }
                match lookup[&key] {
                    Moment::Identity => constant.add(0, i, j, -1.0),
                    Moment::Fixed(v) => {
                        if v != 0.0 {
                            constant.add(0, i, j, -v)
                        }
                    }
                    Moment::Zero => {}
                    Moment::Free(k, sign) => positions[k].push((i, j, sign)),
                }
            }
        }

        let coefficients: Vec<SymSparse> = positions
            .iter()
            .map(|pos| {
                let mut f = SymSparse::new();
                for &(i, j, sign) in pos {
                    f.add(0, i, j, sign);
                }
                f
            })
            .collect();

        let mut relax = Relaxation {
            alphabet,
            monomials,
            variables,
            unreduced_variables: unreduced,
            symmetry_order: group.len(),
            score,
            score_offset: 0.0,
            lookup,
            template: SdpProblem::new(Vec::new()),
        };

        let mut blocks = vec![BlockKind::Psd(n)];
        let mut coefficients = coefficients;
        if score.is_some() {
            let (s0, terms) = relax.linearize(&score_poly)?;
            blocks.push(BlockKind::Diagonal(1));
            for (k, s) in terms {
                coefficients[k].add(1, 0, 0, s);
            }
            relax.score_offset = s0;
        }

        let m = coefficients.len();
        relax.template = SdpProblem {
            blocks,
            objective: vec![0.0; m],
            constant,
            coefficients,
        };
        Ok(relax)
    }

    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Constant term and `(variable, coefficient)` pairs of `p` in moments.
    pub fn linearize(&self, p: &Poly) -> Result<(f64, Vec<(usize, f64)>)> {
        let mut c0 = 0.0;
        let mut acc: HashMap<usize, f64> = HashMap::new();
        for (w, c) in p.terms() {
            match self.lookup.get(&ALG.key(w)) {
                Some(Moment::Identity) => c0 += c,
                Some(Moment::Fixed(v)) => c0 += c * v,
                Some(Moment::Zero) => {}
                Some(Moment::Free(k, sign)) => *acc.entry(*k).or_insert(0.0) += sign * c,
                None => return Err(Error::MissingMoment(w.to_string())),
            }
        }
        let mut terms: Vec<(usize, f64)> = acc.into_iter().filter(|(_, c)| c.abs() > 1e-15).collect();
        terms.sort_by_key(|t| t.0);
        Ok((c0, terms))
    }

    /// SDP minimizing `p` over the relaxation, plus the constant offset to
    /// add to its optimal value.
    pub fn problem_for(&self, p: &Poly) -> Result<(SdpProblem, f64)> {
        self.problem_with(p, self.score, None)
    }

    /// As [`Relaxation::problem_for`] with the score bound replaced (score
    /// mode only) and, if `z_bound` is given, the cut `‖Z_c‖ ≤ z_bound`.
    ///
    /// The cut adds localizing blocks `⟨u_i† (α² - Z_c†Z_c) u_j⟩ ⪰ 0` and
    /// `⟨u_i† (α² - Z_c Z_c†) u_j⟩ ⪰ 0` indexed by `{1} ∪ A ∪ B`.
    pub fn problem_with(&self, p: &Poly, score: Option<f64>, z_bound: Option<f64>) -> Result<(SdpProblem, f64)> {
        let (c0, terms) = self.linearize(p)?;
        let mut problem = self.template.clone();
        for (k, c) in terms {
            problem.objective[k] = c;
        }
        if let (Some(_), Some(omega)) = (self.score, score) {
            check_score(omega)?;
            problem.constant.add(1, 0, 0, omega - self.score_offset);
        }
        if let Some(alpha) = z_bound {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::OutOfRange(format!("Z bound {alpha} must be positive and finite")));
            }
            self.add_z_cut(&mut problem, alpha)?;
        }
        Ok((problem, c0))
    }

    fn add_z_cut(&self, problem: &mut SdpProblem, alpha: f64) -> Result<()> {
        let (a, b, _) = self.alphabet.parity_letters();
        let rows: Vec<Word> = std::iter::once(Word::identity())
            .chain(a.into_iter().chain(b).map(Word::letter))
            .collect();
        let n = rows.len();
        for c in 0..2u8 {
            let z = Word::letter(Letter::Z { index: c, dagger: false });
            let zd = Word::letter(Letter::Z { index: c, dagger: true });
            for middle in [zd.concat(&z), z.concat(&zd)] {
                let block = problem.blocks.len();
                problem.blocks.push(BlockKind::Psd(n));
                for i in 0..n {
                    let left = rows[i].adjoint();
                    for j in i..n {
                        let mut entry = Poly::zero(ALG);
                        entry.add_term(left.concat(&rows[j]), alpha * alpha);
                        entry.add_term(left.concat(&middle).concat(&rows[j]), -1.0);
                        let (e0, terms) = self.linearize(&entry)?;
                        if e0 != 0.0 {
                            problem.constant.add(block, i, j, -e0);
                        }
                        for (k, v) in terms {
                            problem.coefficients[k].add(block, i, j, v);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Norm bound `2/√(t(1-t))` on the optimal `Z_c` at quadrature node `t`.
pub fn z_norm_bound(t: f64) -> f64 {
    2.0 / (t * (1.0 - t)).sqrt()
}

fn check_score(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("score {s} must lie in [0, 1]")))
    }
}

/// Assigns a variable (or zero) to the orbit of `key`; returns the orbit size.
fn register_orbit(
    key: &Word,
    group: &[Symmetry],
    lookup: &mut HashMap<Word, Moment>,
    variables: &mut Vec<Word>,
    positions: &mut Vec<Vec<(usize, usize, f64)>>,
) -> usize {
    // L(g·key) = L(key) for invariant L, so L(image) = sign · L(key).
    let mut orbit: HashMap<Word, f64> = HashMap::new();
    let mut vanishes = false;
    for s in group {
        let (u, sign) = s.apply(key);
        let k = ALG.key(&u);
        match orbit.get(&k) {
            Some(&prev) if prev != sign => vanishes = true,
            Some(_) => {}
            None => {
                orbit.insert(k, sign);
            }
        }
    }
    let size = orbit.len();
    let (rep, &rep_sign) = orbit.iter().min_by(|a, b| a.0.cmp(b.0)).expect("orbit contains key");
    let rep = rep.clone();
    let var = if vanishes {
        None
    } else {
        variables.push(rep);
        positions.push(Vec::new());
        Some(variables.len() - 1)
    };
    for (k, sign) in orbit {
        let m = match var {
            None => Moment::Zero,
            // L(k) = sign·L(key) and L(rep) = rep_sign·L(key).
            Some(v) => Moment::Free(v, sign * rep_sign),
        };
        lookup.insert(k, m);
    }
    size
}

/// Parity-basis moments of length-one and Alice-Bob words implied by a behavior.
fn fixed_moments(g: &GameSpec, b: &Behavior) -> Result<HashMap<Word, f64>> {
    if b.alice_outcomes() != g.alice_outcomes.as_slice() || b.bob_outcomes() != g.bob_outcomes.as_slice() {
        return Err(Error::AlphabetMismatch("behavior does not match game".into()));
    }
    let parity = |s: usize, a: usize| if (s & a).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    let mut fixed = HashMap::new();
    for x in 0..g.num_x() {
        let na = g.alice_outcomes[x];
        for s in 1..na {
            let la = Letter::A {
                setting: x as u8,
                outcome: s as u8,
            };
            let ea: f64 = (0..na).map(|a| parity(s, a) * b.alice_marginal(x, 0, a)).sum();
            fixed.insert(Word::letter(la), ea);
            for y in 0..g.num_y() {
                let nb = g.bob_outcomes[y];
                for t in 1..nb {
                    let lb = Letter::B {
                        setting: y as u8,
                        outcome: t as u8,
                    };
                    let mut e = 0.0;
                    for a in 0..na {
                        for bb in 0..nb {
                            e += parity(s, a) * parity(t, bb) * b.p(x, y, a, bb);
                        }
                    }
                    fixed.insert(Word(vec![la, lb]), e);
                }
            }
        }
    }
    for y in 0..g.num_y() {
        let nb = g.bob_outcomes[y];
        for t in 1..nb {
            let lb = Letter::B {
                setting: y as u8,
                outcome: t as u8,
            };
            let eb: f64 = (0..nb).map(|bb| parity(t, bb) * b.bob_marginal(0, y, bb)).sum();
            fixed.insert(Word::letter(lb), eb);
        }
    }
    Ok(fixed)
}

/// One node's SDP for key inputs `key_pair` at quadrature node `t`, without
/// symmetry reduction.
pub fn build_moment_relaxation(
    g: &GameSpec,
    observed: &Observed,
    monomials: &MonomialSet,
    key_pair: (usize, usize),
    t: f64,
) -> Result<(SdpProblem, f64)> {
    Relaxation::new(g, observed, monomials, key_pair, false)?.problem_for(&node_objective(g, key_pair, t)?)
}
