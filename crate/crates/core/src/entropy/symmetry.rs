//! Signed permutations of parity-algebra letters that leave a node problem
//! unchanged.
//!
//! If a relabeling `g` maps the monomial list onto itself (up to sign) and
//! fixes the objective, the score polynomial and any pinned moments, then
//! averaging a feasible moment assignment over the group generated by such
//! maps gives another feasible assignment with the same objective. The
//! relaxation may therefore be restricted to invariant assignments, where all
//! moments in one orbit share a variable up to sign.
//!
//! For the magic square the candidates are row and column permutations of
//! the grid combined with outcome flips on a set of cells with an even count
//! in every row and column. For CHSH they are swaps of the two test settings
//! of each party combined with outcome flips.

use std::collections::HashMap;

use crate::games::{GameKind, GameSpec};

use super::words::{canonicalize_parity, Algebra, Letter, Poly, Word};

#[derive(Debug, Clone, PartialEq)]
pub struct Symmetry {
    /// Images of party letters; letters absent from the map are fixed.
    map: HashMap<Letter, (Letter, f64)>,
    /// Exchanges `Z_0` and `Z_1`.
    z_swap: bool,
}

impl Symmetry {
    pub fn identity() -> Self {
        Symmetry {
            map: HashMap::new(),
            z_swap: false,
        }
    }

    pub fn image(&self, l: Letter) -> (Letter, f64) {
        match l {
            Letter::Z { index, dagger } => {
                let index = if self.z_swap { index ^ 1 } else { index };
                (Letter::Z { index, dagger }, 1.0)
            }
            _ => self.map.get(&l).copied().unwrap_or((l, 1.0)),
        }
    }

    /// Canonical image of a parity word and its sign.
    pub fn apply(&self, w: &Word) -> (Word, f64) {
        let mut sign = 1.0;
        let letters = w
            .0
            .iter()
            .map(|&l| {
                let (m, s) = self.image(l);
                sign *= s;
                m
            })
            .collect();
        (canonicalize_parity(&Word(letters)), sign)
    }

    pub fn apply_poly(&self, p: &Poly) -> Poly {
        debug_assert_eq!(p.algebra, Algebra::Parity);
        let mut out = Poly::zero(Algebra::Parity);
        for (w, c) in p.terms() {
            let (u, s) = self.apply(w);
            out.add_term(u, s * c);
        }
        out
    }
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Parity index of the observable for bit `cell` of a magic-square answer
/// `2·b₀ + b₁`, with the third bit the parity of the first two.
fn mpg_observable(cell: usize) -> u8 {
    [2, 1, 3][cell]
}

fn mpg_cell(observable: u8) -> usize {
    match observable {
        2 => 0,
        1 => 1,
        _ => 2,
    }
}

/// Bob's third bit is `b₀ ⊕ b₁ ⊕ 1`, so his third-cell observable is `-O_3`.
fn mpg_bob_sign(cell: usize) -> f64 {
    if cell == 2 {
        -1.0
    } else {
        1.0
    }
}

fn sign_of(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

fn mpg_candidates() -> Vec<Symmetry> {
    let mut out = Vec::with_capacity(16 * 36);
    for free in 0..16u8 {
        let mut flip = [[false; 3]; 3];
        for x in 0..2 {
            for y in 0..2 {
                flip[x][y] = free >> (2 * x + y) & 1 == 1;
            }
            flip[x][2] = flip[x][0] ^ flip[x][1];
        }
        for y in 0..3 {
            flip[2][y] = flip[0][y] ^ flip[1][y];
        }
        for sigma in PERMS3 {
            for tau in PERMS3 {
                let mut map = HashMap::new();
                for x in 0..3 {
                    for s in 1..4u8 {
                        let y = mpg_cell(s);
                        let (nx, ny) = (sigma[x], tau[y]);
                        map.insert(
                            Letter::A { setting: x as u8, outcome: s },
                            (
                                Letter::A {
                                    setting: nx as u8,
                                    outcome: mpg_observable(ny),
                                },
                                sign_of(flip[nx][ny]),
                            ),
                        );
                    }
                }
                for y in 0..3 {
                    for s in 1..4u8 {
                        let x = mpg_cell(s);
                        let (nx, ny) = (sigma[x], tau[y]);
                        map.insert(
                            Letter::B { setting: y as u8, outcome: s },
                            (
                                Letter::B {
                                    setting: ny as u8,
                                    outcome: mpg_observable(nx),
                                },
                                mpg_bob_sign(x) * mpg_bob_sign(nx) * sign_of(flip[nx][ny]),
                            ),
                        );
                    }
                }
                out.push(Symmetry { map, z_swap: false });
            }
        }
    }
    out
}

fn chsh_candidates() -> Vec<Symmetry> {
    let mut out = Vec::with_capacity(128);
    for bits in 0..128u8 {
        let bit = |k: u8| bits >> k & 1 == 1;
        let alice_swap = bit(5);
        let bob_swap = bit(6);
        let mut map = HashMap::new();
        for x in 0..2u8 {
            let nx = if alice_swap { 1 - x } else { x };
            map.insert(
                Letter::A { setting: x, outcome: 1 },
                (Letter::A { setting: nx, outcome: 1 }, sign_of(bit(nx))),
            );
        }
        for y in 0..3u8 {
            let ny = if bob_swap && y < 2 { 1 - y } else { y };
            map.insert(
                Letter::B { setting: y, outcome: 1 },
                (Letter::B { setting: ny, outcome: 1 }, sign_of(bit(2 + ny))),
            );
        }
        out.push(Symmetry { map, z_swap: false });
    }
    out
}

/// Every candidate relabeling for `g`, forming a group. The `Z` exchange is
/// set whenever a candidate maps the key projector `Π_0` onto `Π_1`;
/// candidates still have to be checked against the actual problem.
pub fn candidates(g: &GameSpec, key_projectors: [&Poly; 2]) -> Vec<Symmetry> {
    let mut out = match g.kind {
        GameKind::Mpg => mpg_candidates(),
        GameKind::Chsh { .. } => chsh_candidates(),
    };
    for s in &mut out {
        let img = s.apply_poly(key_projectors[0]);
        s.z_swap = img.moment_distance(key_projectors[1]) < 1e-12;
    }
    out
}
