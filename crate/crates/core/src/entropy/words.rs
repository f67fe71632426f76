//! Operator words over Alice's and Bob's measurement operators and the
//! adversary operators `Z_c`, `Z_c†`.
//!
//! Alice's and Bob's letters commute with each other and with every `Z`.
//! `Z` letters satisfy no relations among themselves. Party letters are read
//! in one of two algebras:
//!
//! * [`Algebra::Projector`]: `A{x, a}` is the projector `M^x_a`; projectors of
//!   one setting are idempotent and mutually orthogonal.
//! * [`Algebra::Parity`]: for a setting with `2^k` outcomes, `A{x, s}` with
//!   `1 ≤ s < 2^k` is the `±1` observable `O^x_s = Σ_a (-1)^{|s∧a|} M^x_a`.
//!   These square to the identity and multiply as `O_s O_t = O_{s⊕t}`.
//!
//! Both span the same operators per setting, so a moment matrix indexed by
//! either basis describes the same relaxation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    /// Alice's projector `M^setting_outcome`.
    A { setting: u8, outcome: u8 },
    /// Bob's projector `N^setting_outcome`.
    B { setting: u8, outcome: u8 },
    /// Adversary operator `Z_index` or its adjoint.
    Z { index: u8, dagger: bool },
}

impl Letter {
    pub fn adjoint(self) -> Letter {
        match self {
            Letter::Z { index, dagger } => Letter::Z { index, dagger: !dagger },
            other => other,
        }
    }

    fn party(self) -> u8 {
        match self {
            Letter::A { .. } => 0,
            Letter::B { .. } => 1,
            Letter::Z { .. } => 2,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::A { setting, outcome } => write!(f, "A{setting}_{outcome}"),
            Letter::B { setting, outcome } => write!(f, "B{setting}_{outcome}"),
            Letter::Z { index, dagger } => write!(f, "Z{index}{}", if dagger { "†" } else { "" }),
        }
    }
}

/// A product of letters; the empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reversed word with every letter adjointed (not canonicalized).
    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.adjoint()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Declared operators: outcome counts per setting for each party and the
/// number of `Z` indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    pub alice_outcomes: Vec<usize>,
    pub bob_outcomes: Vec<usize>,
    pub z_count: usize,
}

impl Alphabet {
    pub fn check(&self, l: Letter) -> Result<()> {
        let ok = match l {
            Letter::A { setting, outcome } => self
                .alice_outcomes
                .get(setting as usize)
                .is_some_and(|&n| (outcome as usize) < n),
            Letter::B { setting, outcome } => self
                .bob_outcomes
                .get(setting as usize)
                .is_some_and(|&n| (outcome as usize) < n),
            Letter::Z { index, .. } => (index as usize) < self.z_count,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnknownLetter(l.to_string()))
        }
    }

    /// Nontrivial observables `O_s`, `1 ≤ s < n`, of every setting.
    pub fn parity_letters(&self) -> (Vec<Letter>, Vec<Letter>, Vec<Letter>) {
        let (a, b, z) = self.independent_letters();
        let shift = |v: Vec<Letter>| -> Vec<Letter> {
            v.into_iter()
                .map(|l| match l {
                    Letter::A { setting, outcome } => Letter::A { setting, outcome: outcome + 1 },
                    Letter::B { setting, outcome } => Letter::B { setting, outcome: outcome + 1 },
                    z => z,
                })
                .collect()
        };
        (shift(a), shift(b), z)
    }

    /// Letters after eliminating the last projector of every setting.
    pub fn independent_letters(&self) -> (Vec<Letter>, Vec<Letter>, Vec<Letter>) {
        let party = |outs: &[usize], make: fn(u8, u8) -> Letter| -> Vec<Letter> {
            outs.iter()
                .enumerate()
                .flat_map(|(s, &n)| (0..n.saturating_sub(1)).map(move |o| make(s as u8, o as u8)))
                .collect()
        };
        let a = party(&self.alice_outcomes, |setting, outcome| Letter::A { setting, outcome });
        let b = party(&self.bob_outcomes, |setting, outcome| Letter::B { setting, outcome });
        let z = (0..self.z_count as u8)
            .flat_map(|index| [false, true].map(|dagger| Letter::Z { index, dagger }))
            .collect();
        (a, b, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Algebra {
    #[default]
    Projector,
    Parity,
}

impl Algebra {
    /// Canonical form of `w` in this algebra, or `None` if it vanishes.
    pub fn canonicalize(self, w: &Word) -> Option<Word> {
        match self {
            Algebra::Projector => canonicalize_unchecked(w),
            Algebra::Parity => Some(canonicalize_parity(w)),
        }
    }

    /// Representative of `{w, w†}` for a canonical `w`; see [`moment_key`].
    pub fn key(self, w: &Word) -> Word {
        let d = self
            .canonicalize(&w.adjoint())
            .expect("adjoint of a nonzero word is nonzero");
        if d < *w {
            d
        } else {
            w.clone()
        }
    }
}

/// Canonical form of a word, or `None` if the product vanishes.
///
/// Letters are sorted stably into Alice, Bob and `Z` blocks, then adjacent
/// projectors of the same setting are merged (equal outcomes) or annihilate
/// (different outcomes).
pub fn canonicalize_unchecked(w: &Word) -> Option<Word> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for party in 0..3 {
        let start = out.len();
        for &l in w.0.iter().filter(|l| l.party() == party) {
            if party < 2 && out.len() > start {
                let top = out[out.len() - 1];
                match (top, l) {
                    (Letter::A { setting: s1, outcome: o1 }, Letter::A { setting: s2, outcome: o2 })
                    | (Letter::B { setting: s1, outcome: o1 }, Letter::B { setting: s2, outcome: o2 })
                        if s1 == s2 =>
                    {
                        if o1 == o2 {
                            continue;
                        }
                        return None;
                    }
                    _ => {}
                }
            }
            out.push(l);
        }
    }
    Some(Word(out))
}

/// [`canonicalize_unchecked`] after checking every letter against `alphabet`.
pub fn canonicalize(w: &Word, alphabet: &Alphabet) -> Result<Option<Word>> {
    for &l in &w.0 {
        alphabet.check(l)?;
    }
    Ok(canonicalize_unchecked(w))
}

/// Representative of the pair `{w, w†}` used to index real moments. Both
/// words have the same expectation up to complex conjugation, and the
/// relaxation may take all moments real without loss.
pub fn moment_key(w: &Word) -> Word {
    Algebra::Projector.key(w)
}

/// Canonical form in the parity algebra: blocks sorted as for projectors,
/// then adjacent observables of one setting multiplied out.
pub fn canonicalize_parity(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for party in 0..3 {
        let start = out.len();
        for &l in w.0.iter().filter(|l| l.party() == party) {
            if party < 2 && out.len() > start {
                let top = out[out.len() - 1];
                let merged = match (top, l) {
                    (Letter::A { setting: s1, outcome: o1 }, Letter::A { setting: s2, outcome: o2 }) if s1 == s2 => {
                        Some(Letter::A { setting: s1, outcome: o1 ^ o2 })
                    }
                    (Letter::B { setting: s1, outcome: o1 }, Letter::B { setting: s2, outcome: o2 }) if s1 == s2 => {
                        Some(Letter::B { setting: s1, outcome: o1 ^ o2 })
                    }
                    _ => None,
                };
                if let Some(m) = merged {
                    out.pop();
                    let nonzero = match m {
                        Letter::A { outcome, .. } | Letter::B { outcome, .. } => outcome != 0,
                        Letter::Z { .. } => true,
                    };
                    if nonzero {
                        out.push(m);
                    }
                    continue;
                }
            }
            out.push(l);
        }
    }
    Word(out)
}

/// Real linear combination of canonical words in one algebra.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    pub algebra: Algebra,
    pub terms: BTreeMap<Word, f64>,
}

impl Poly {
    pub fn zero(algebra: Algebra) -> Poly {
        Poly {
            algebra,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(algebra: Algebra, c: f64) -> Poly {
        let mut p = Poly::zero(algebra);
        p.add_term(Word::identity(), c);
        p
    }

    pub fn word(algebra: Algebra, w: Word) -> Poly {
        let mut p = Poly::zero(algebra);
        p.add_term(w, 1.0);
        p
    }

    pub fn add_term(&mut self, w: Word, c: f64) {
        if let Some(cw) = self.algebra.canonicalize(&w) {
            *self.terms.entry(cw).or_insert(0.0) += c;
        }
    }

    pub fn add(&mut self, other: &Poly, scale: f64) {
        debug_assert_eq!(self.algebra, other.algebra);
        for (w, &c) in &other.terms {
            *self.terms.entry(w.clone()).or_insert(0.0) += scale * c;
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.algebra, other.algebra);
        let mut out = Poly::zero(self.algebra);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.terms.iter().filter(|(_, &c)| c != 0.0).map(|(w, &c)| (w, c))
    }

    /// Largest coefficient difference after merging adjoint pairs, which
    /// have equal real moments.
    pub fn moment_distance(&self, other: &Poly) -> f64 {
        let mut acc: BTreeMap<Word, f64> = BTreeMap::new();
        for (w, c) in self.terms() {
            *acc.entry(self.algebra.key(w)).or_insert(0.0) += c;
        }
        for (w, c) in other.terms() {
            *acc.entry(other.algebra.key(w)).or_insert(0.0) -= c;
        }
        acc.values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn party_letter(alice: bool, setting: usize, index: usize) -> Letter {
    if alice {
        Letter::A {
            setting: setting as u8,
            outcome: index as u8,
        }
    } else {
        Letter::B {
            setting: setting as u8,
            outcome: index as u8,
        }
    }
}

/// Projector `M^setting_outcome` (or Bob's) with the last outcome expressed
/// through completeness as `1 - Σ_{o < n-1} P_o`.
pub fn projector(alice: bool, setting: usize, outcome: usize, outcomes: usize) -> Poly {
    let alg = Algebra::Projector;
    if outcome + 1 < outcomes {
        return Poly::word(alg, Word::letter(party_letter(alice, setting, outcome)));
    }
    let mut p = Poly::constant(alg, 1.0);
    for o in 0..outcomes - 1 {
        p.add_term(Word::letter(party_letter(alice, setting, o)), -1.0);
    }
    p
}

/// Projector `M^setting_outcome` in the parity algebra,
/// `2^{-k} Σ_s (-1)^{|s∧a|} O_s`. `outcomes` must be a power of two.
pub fn parity_projector(alice: bool, setting: usize, outcome: usize, outcomes: usize) -> Result<Poly> {
    if !outcomes.is_power_of_two() || outcomes < 2 {
        return Err(Error::AlphabetMismatch(format!(
            "parity basis needs a power-of-two outcome count, got {outcomes}"
        )));
    }
    let alg = Algebra::Parity;
    let scale = 1.0 / outcomes as f64;
    let mut p = Poly::constant(alg, scale);
    for s in 1..outcomes {
        let sign = if (s & outcome).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        p.add_term(Word::letter(party_letter(alice, setting, s)), sign * scale);
    }
    Ok(p)
}
