//! Graph products by piling: syllables are appended one at a time, merging
//! with an earlier syllable of the same vertex when everything in between
//! commutes with it.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::freewords::{Alphabet, Letter, Word};

use super::{hash_str, GroupOracle, MarkedGroup, NfKey, Verdict3};

trait Syllables {
    type P: Clone;
    fn adjacent(&self, u: i64, v: i64) -> bool;
    /// Product of two syllables at vertex `v`, `None` if trivial.
    fn merge(&self, v: i64, a: &Self::P, b: &Self::P) -> Option<Self::P>;
    fn key(&self, v: i64, p: &Self::P) -> Option<String>;
}

fn pile<S: Syllables>(alg: &S, stack: &mut Vec<(i64, S::P)>, v: i64, p: S::P) {
    for k in (0..stack.len()).rev() {
        let u = stack[k].0;
        if u == v {
            match alg.merge(v, &stack[k].1, &p) {
                Some(m) => stack[k].1 = m,
                None => {
                    stack.remove(k);
                }
            }
            return;
        }
        if !alg.adjacent(u, v) {
            break;
        }
    }
    stack.push((v, p));
}

/// Lexicographically least shuffle of a reduced syllable sequence.
fn canonical_key<S: Syllables>(alg: &S, stack: &[(i64, S::P)]) -> Option<String> {
    let mut remaining: Vec<(i64, S::P)> = stack.to_vec();
    let mut out = String::new();
    while !remaining.is_empty() {
        let mut best: Option<(usize, i64)> = None;
        for i in 0..remaining.len() {
            let vi = remaining[i].0;
            if best.is_some_and(|(_, bv)| bv <= vi) {
                continue;
            }
            if remaining[..i].iter().all(|(u, _)| alg.adjacent(*u, vi)) {
                best = Some((i, vi));
            }
        }
        let (i, _) = best.expect("first syllable is always movable");
        let (v, p) = remaining.remove(i);
        let _ = write!(out, "{v}:{};", alg.key(v, &p)?);
    }
    Some(out)
}

/// Edge rule on `ℤ` for translation-invariant graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeRule {
    /// Edge iff `|i − j| ∈ I`.
    Distances(BTreeSet<i64>),
    /// Edge iff `|i − j| ≤ m`.
    UpTo(i64),
}

impl EdgeRule {
    fn holds(&self, d: i64) -> bool {
        match self {
            EdgeRule::Distances(set) => set.contains(&d),
            EdgeRule::UpTo(m) => d <= *m,
        }
    }
}

/// `P ⋊ ℤ` where `P` is the graph product of copies of `ℤ/q` (`ℤ` if `q = 0`)
/// over the vertex set `ℤ`, with `x` at vertex 0 and `t` translating.
pub struct TranslationGraphProduct {
    alphabet: Alphabet,
    q: u64,
    rule: EdgeRule,
    support_bound: Option<i64>,
}

impl Syllables for TranslationGraphProduct {
    type P = i64;

    fn adjacent(&self, u: i64, v: i64) -> bool {
        u != v && self.rule.holds((u - v).abs())
    }

    fn merge(&self, _v: i64, a: &i64, b: &i64) -> Option<i64> {
        let s = if self.q == 0 { a + b } else { (a + b).rem_euclid(self.q as i64) };
        (s != 0).then_some(s)
    }

    fn key(&self, _v: i64, p: &i64) -> Option<String> {
        Some(p.to_string())
    }
}

impl TranslationGraphProduct {
    pub fn new(q: u64, rule: EdgeRule, support_bound: Option<i64>) -> Self {
        TranslationGraphProduct { alphabet: Alphabet::from_str_static("tx"), q, rule, support_bound }
    }

    /// Reduced syllables and final cursor, or `None` if the t-path leaves the support window.
    fn evaluate(&self, w: &Word) -> Option<(Vec<(i64, i64)>, i64)> {
        let mut stack = Vec::new();
        let mut cursor = 0i64;
        for l in w.letters() {
            if l.gen == 0 {
                cursor += l.sign();
                if self.support_bound.is_some_and(|b| cursor.abs() > b) {
                    return None;
                }
            } else {
                let e = if self.q == 0 { l.sign() } else { l.sign().rem_euclid(self.q as i64) };
                pile(self, &mut stack, cursor, e);
            }
        }
        Some((stack, cursor))
    }
}

impl GroupOracle for TranslationGraphProduct {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        match self.evaluate(w) {
            Some((stack, cursor)) => Verdict3::from_bool(stack.is_empty() && cursor == 0),
            None => Verdict3::Unknown { spent: w.len() as u64 },
        }
    }

    fn normal_form(&self, w: &Word) -> Option<NfKey> {
        if self.support_bound.is_some() {
            return None;
        }
        let (stack, cursor) = self.evaluate(w)?;
        Some(format!("{}|{cursor}", canonical_key(self, &stack)?))
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        // Image in the wreath product with the same lamp group.
        let mut lamps = std::collections::BTreeMap::new();
        let mut cursor = 0i64;
        for l in w.letters() {
            if l.gen == 0 {
                cursor += l.sign();
            } else {
                let e = lamps.entry(cursor).or_insert(0i64);
                *e = if self.q == 0 { *e + l.sign() } else { (*e + l.sign()).rem_euclid(self.q as i64) };
                if *e == 0 {
                    lamps.remove(&cursor);
                }
            }
        }
        hash_str(&format!("{lamps:?}|{cursor}"))
    }

    fn is_exact(&self) -> bool {
        self.support_bound.is_none()
    }
}

/// `Γ_I = ⟨t, x | [tⁿ x t⁻ⁿ, x], n ∈ I⟩`. Without an explicit bound the model
/// grows with each query and is exact.
pub fn partial_wreath_group(i: &BTreeSet<i64>, support_bound: Option<i64>) -> MarkedGroup {
    let list: Vec<String> = i.iter().map(|n| n.to_string()).collect();
    let mut spec = format!("partial_wreath({})", list.join(","));
    if let Some(b) = support_bound {
        spec = format!("partial_wreath({};bound={b})", list.join(","));
    }
    MarkedGroup::new(
        spec,
        format!("Gamma_{{{}}}", list.join(",")),
        TranslationGraphProduct::new(0, EdgeRule::Distances(i.clone()), support_bound),
    )
}

/// `Γ_n` for the lamp group `ℤ/q` (`ℤ` if `q = 0`): edges between lamps at distance `≤ n`.
pub fn gamma_group(q: u64, n: i64) -> MarkedGroup {
    let tag = if q == 0 { "z".to_string() } else { format!("c{q}") };
    MarkedGroup::new(
        format!("gamma({tag},{n})"),
        format!("Gamma_{n}({tag})"),
        TranslationGraphProduct::new(q, EdgeRule::UpTo(n), None),
    )
}

/// Graph product of arbitrary marked groups over a finite simple graph.
pub struct GraphProduct {
    alphabet: Alphabet,
    factors: Vec<MarkedGroup>,
    adjacency: Vec<Vec<bool>>,
    /// Product letter index to (vertex, local generator).
    letter_map: Vec<(usize, u16)>,
}

impl Syllables for GraphProduct {
    type P = Word;

    fn adjacent(&self, u: i64, v: i64) -> bool {
        self.adjacency[u as usize][v as usize]
    }

    fn merge(&self, v: i64, a: &Word, b: &Word) -> Option<Word> {
        let m = a.mul(b);
        match self.factors[v as usize].is_identity(&m) {
            Verdict3::True => None,
            _ => Some(m),
        }
    }

    fn key(&self, v: i64, p: &Word) -> Option<String> {
        self.factors[v as usize].normal_form(p)
    }
}

impl GraphProduct {
    pub fn new(factors: Vec<MarkedGroup>, edges: &[(usize, usize)]) -> Result<Self> {
        let k = factors.len();
        if k == 0 {
            return Err(Error::ParamError("graph product needs at least one vertex".into()));
        }
        let mut adjacency = vec![vec![false; k]; k];
        for &(u, v) in edges {
            if u >= k || v >= k || u == v {
                return Err(Error::ParamError(format!("bad edge {u}-{v}")));
            }
            adjacency[u][v] = true;
            adjacency[v][u] = true;
        }
        let mut names: Vec<char> = Vec::new();
        let mut letter_map = Vec::new();
        for (vi, f) in factors.iter().enumerate() {
            for (gi, &c) in f.alphabet().names().iter().enumerate() {
                let name = if names.contains(&c) {
                    ('a'..='z')
                        .find(|x| !names.contains(x) && !factors.iter().any(|g| g.alphabet().names().contains(x)))
                        .or_else(|| ('a'..='z').find(|x| !names.contains(x)))
                        .ok_or_else(|| Error::InvalidAlphabet("graph product needs more than 26 letters".into()))?
                } else {
                    c
                };
                names.push(name);
                letter_map.push((vi, gi as u16));
            }
        }
        Ok(GraphProduct { alphabet: Alphabet::new(names)?, factors, adjacency, letter_map })
    }

    fn syllables(&self, w: &Word) -> Vec<(i64, Word)> {
        let mut stack: Vec<(i64, Word)> = Vec::new();
        for l in w.letters() {
            let (v, g) = self.letter_map[l.gen as usize];
            pile(self, &mut stack, v as i64, Word::letter(Letter::new(g, l.inv)));
        }
        stack
    }

    /// Product word to factor-word projection killing all other vertices.
    pub fn retract(&self, w: &Word, vertex: usize) -> Word {
        Word::reduced_from(w.letters().iter().filter_map(|l| {
            let (v, g) = self.letter_map[l.gen as usize];
            (v == vertex).then_some(Letter::new(g, l.inv))
        }))
    }

    /// Embedding of a factor word into the product alphabet.
    pub fn embed(&self, w: &Word, vertex: usize) -> Word {
        Word::reduced_from(w.letters().iter().map(|l| {
            let idx = self.letter_map.iter().position(|&(v, g)| v == vertex && g == l.gen).expect("factor letter");
            Letter::new(idx as u16, l.inv)
        }))
    }

    pub fn factors(&self) -> &[MarkedGroup] {
        &self.factors
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.factors.len();
        (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))).filter(|&(u, v)| self.adjacency[u][v]).collect()
    }
}

impl GroupOracle for GraphProduct {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        let stack = self.syllables(w);
        if stack.is_empty() {
            return Verdict3::True;
        }
        // A surviving syllable is nontrivial only if its factor decided so.
        for (v, p) in &stack {
            if let Verdict3::Unknown { spent } = self.factors[*v as usize].is_identity(p) {
                return Verdict3::Unknown { spent };
            }
        }
        Verdict3::False
    }

    fn normal_form(&self, w: &Word) -> Option<NfKey> {
        if !self.factors.iter().all(|f| f.has_normal_form()) {
            return None;
        }
        canonical_key(self, &self.syllables(w))
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        let mut h = 0u64;
        for v in 0..self.factors.len() {
            h = h.rotate_left(17) ^ self.factors[v].fingerprint(&self.retract(w, v));
        }
        h
    }

    fn is_exact(&self) -> bool {
        self.factors.iter().all(|f| f.is_exact())
    }
}

pub fn graph_product_group(factors: Vec<MarkedGroup>, edges: &[(usize, usize)]) -> Result<MarkedGroup> {
    let specs: Vec<&str> = factors.iter().map(|f| f.spec()).collect();
    let edge_str: Vec<String> = edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
    let spec = if edges.is_empty() {
        format!("graph_product({})", specs.join(", "))
    } else {
        format!("graph_product({}; edges={})", specs.join(", "), edge_str.join(","))
    };
    let gp = GraphProduct::new(factors, edges)?;
    Ok(MarkedGroup::new(spec.clone(), spec, gp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::basic::free_group;
    use crate::oracles::catalog::cyclic_group;

    #[test]
    fn infinite_dihedral_and_commuting_pair() {
        let c2 = || cyclic_group(2).unwrap();
        let d = graph_product_group(vec![c2(), c2()], &[]).unwrap();
        assert_eq!(d.format(&d.parse("xa").unwrap()), "xa");
        let w = d.parse("xaxaxa").unwrap();
        assert_eq!(d.is_identity(&w), Verdict3::False);
        assert_eq!(d.is_identity(&d.parse("xx").unwrap()), Verdict3::True);
        let z2 = graph_product_group(vec![free_group(1).unwrap(), free_group(1).unwrap()], &[(0, 1)]).unwrap();
        assert_eq!(z2.is_identity(&z2.parse("xaXA").unwrap()), Verdict3::True);
        assert_eq!(z2.normal_form(&z2.parse("xa").unwrap()), z2.normal_form(&z2.parse("ax").unwrap()));
    }

    #[test]
    fn partial_wreath_examples() {
        let g = partial_wreath_group(&BTreeSet::from([2]), None);
        assert_eq!(g.is_identity(&g.parse("t^2 x t^-2 x t^2 X t^-2 X").unwrap()), Verdict3::True);
        assert_eq!(g.is_identity(&g.parse("txTxtXTX").unwrap()), Verdict3::False);
        let free = partial_wreath_group(&BTreeSet::new(), None);
        assert_eq!(free.is_identity(&free.parse("txTxtXTX").unwrap()), Verdict3::False);
        let bounded = partial_wreath_group(&BTreeSet::from([2]), Some(1));
        assert!(matches!(bounded.is_identity(&bounded.parse("ttxTTX").unwrap()), Verdict3::Unknown { .. }));
    }

    #[test]
    fn words_far_apart_generate_free_product() {
        // s and t^n s t^-n in Γ_{n-1} have no edge between them.
        let n = 3;
        let g = gamma_group(0, n - 1);
        let s = g.parse("x").unwrap();
        let c = g.parse("ttt").unwrap();
        let conj = s.conjugate_by(&c);
        assert_eq!(g.is_identity(&s.commutator(&conj)), Verdict3::False);
        let near = s.conjugate_by(&g.parse("tt").unwrap());
        assert_eq!(g.is_identity(&s.commutator(&near)), Verdict3::True);
    }
}
