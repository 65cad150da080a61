//! The first Grigorchuk group acting on the binary tree, and the free product
//! `C₂ ∗ (C₂ × C₂)` it is a quotient of.
//!
//! Letters are encoded `a = 0, b = 1, c = 2, d = 3`; every generator is an
//! involution, so inverse letters are read as the letter itself.

use crate::freewords::{Alphabet, Letter, Word};

use super::{hash_str, GroupOracle, MarkedGroup, NfKey, Verdict3};

pub const A: u8 = 0;
pub const B: u8 = 1;
pub const C: u8 = 2;
pub const D: u8 = 3;

const MAX_DEPTH: u32 = 64;
const FINGERPRINT_LEVEL: usize = 8;
const BASE_LEVEL: usize = 3;

pub fn alphabet() -> Alphabet {
    Alphabet::from_str_static("abcd")
}

/// Product in the Klein four-group `{1, b, c, d}` (1 encoded as 0).
fn v4_mul(x: u8, y: u8) -> u8 {
    x ^ y
}

/// Reduced form in `C₂ ∗ V₄`: alternating `a` and nontrivial `V₄` letters.
pub fn fp_reduce(letters: impl IntoIterator<Item = u8>) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::new();
    for l in letters {
        match (out.last().copied(), l) {
            (Some(A), A) => {
                out.pop();
            }
            (Some(top), y) if top != A && y != A => {
                let p = v4_mul(top, y);
                out.pop();
                if p != 0 {
                    out.push(p);
                }
            }
            _ => out.push(l),
        }
    }
    out
}

pub fn word_letters(w: &Word) -> Vec<u8> {
    w.letters().iter().map(|l| l.gen as u8).collect()
}

pub fn letters_word(ls: &[u8]) -> Word {
    Word::reduced_from(ls.iter().map(|&g| Letter::pos(g as u16)))
}

/// Wreath recursion `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
fn split(y: u8) -> (u8, u8) {
    match y {
        B => (A, C),
        C => (A, D),
        D => (0xff, B),
        _ => unreachable!("a has no sections"),
    }
}

/// Sections `(w₀, w₁)` of a word with an even number of `a`s, reduced in
/// `C₂ ∗ V₄`; `None` if the number of `a`s is odd.
pub fn sections(reduced: &[u8]) -> Option<(Vec<u8>, Vec<u8>)> {
    let mut s0 = Vec::new();
    let mut s1 = Vec::new();
    let mut swapped = false;
    for &l in reduced {
        if l == A {
            swapped = !swapped;
            continue;
        }
        let (y0, y1) = split(l);
        let (p, q) = if swapped { (y1, y0) } else { (y0, y1) };
        if p != 0xff {
            s0.push(p);
        }
        if q != 0xff {
            s1.push(q);
        }
    }
    (!swapped).then(|| (fp_reduce(s0), fp_reduce(s1)))
}

/// Image of leaf `v` (level `level`, first letter most significant).
fn act_letter(l: u8, v: usize, level: usize) -> usize {
    let mut state = l;
    let mut v = v;
    for pos in 0..level {
        let bit = level - 1 - pos;
        let x = (v >> bit) & 1;
        state = match state {
            A => {
                v ^= 1 << bit;
                return v;
            }
            B => {
                if x == 0 {
                    A
                } else {
                    C
                }
            }
            C => {
                if x == 0 {
                    A
                } else {
                    D
                }
            }
            D => {
                if x == 0 {
                    return v;
                } else {
                    B
                }
            }
            _ => unreachable!(),
        };
    }
    v
}

/// Permutation of the `2^level` vertices at depth `level`.
pub fn level_action(ls: &[u8], level: usize) -> Vec<usize> {
    (0..1usize << level)
        .map(|leaf| ls.iter().fold(leaf, |v, &l| act_letter(l, v, level)))
        .collect()
}

fn is_identity_rec(reduced: &[u8], depth: u32) -> Verdict3 {
    if reduced.is_empty() {
        return Verdict3::True;
    }
    if depth > MAX_DEPTH {
        return Verdict3::Unknown { spent: depth as u64 };
    }
    if reduced.len() <= 2 {
        let perm = level_action(reduced, BASE_LEVEL);
        return Verdict3::from_bool(perm.iter().enumerate().all(|(i, &p)| i == p));
    }
    let Some((s0, s1)) = sections(reduced) else { return Verdict3::False };
    match is_identity_rec(&s0, depth + 1) {
        Verdict3::True => is_identity_rec(&s1, depth + 1),
        other => other,
    }
}

pub struct Grigorchuk {
    alphabet: Alphabet,
}

impl GroupOracle for Grigorchuk {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        is_identity_rec(&fp_reduce(word_letters(w)), 0)
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        let perm = level_action(&fp_reduce(word_letters(w)), FINGERPRINT_LEVEL);
        hash_str(&format!("{perm:?}"))
    }
}

pub fn grigorchuk_group() -> MarkedGroup {
    MarkedGroup::new("grigorchuk", "Grigorchuk group", Grigorchuk { alphabet: alphabet() })
}

/// `C₂ ∗ (C₂ × C₂) = ⟨a,b,c,d | a², b², c², d², bcd⟩`.
pub struct FreeProductC2V4 {
    alphabet: Alphabet,
}

impl GroupOracle for FreeProductC2V4 {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        Verdict3::from_bool(fp_reduce(word_letters(w)).is_empty())
    }

    fn normal_form(&self, w: &Word) -> Option<NfKey> {
        Some(fp_reduce(word_letters(w)).iter().map(|&l| (b'a' + l) as char).collect())
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        hash_str(&self.normal_form(w).unwrap_or_default())
    }
}

pub fn free_product_c2v4() -> MarkedGroup {
    MarkedGroup::new("c2v4", "C2 * (C2 x C2)", FreeProductC2V4 { alphabet: alphabet() })
}
