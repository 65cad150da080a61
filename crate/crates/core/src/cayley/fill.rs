//! Filling search: writing a relation as a product of conjugates of short relations.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::certify::filling::verify_filling;
use crate::error::{Error, Result};
use crate::freewords::{Letter, Word};
use crate::oracles::{MarkedGroup, Verdict3};

use super::ball::{ball, relations_from_ball};

/// Default cap on distinct intermediate words visited by one search.
pub const DEFAULT_STATE_CAP: usize = 200_000;

/// `target = ∏ cᵢ rᵢ cᵢ⁻¹` in the free group, with every `|rᵢ| ≤ max_piece_len`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingDiagram {
    pub target: Word,
    pub pieces: Vec<(Word, Word)>,
    pub max_piece_len: usize,
}

impl FillingDiagram {
    pub fn product(&self) -> Word {
        let mut out = Word::empty();
        for (c, r) in &self.pieces {
            out = out.mul(&r.conjugate_by(c));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FillOutcome {
    Filled(FillingDiagram),
    NotFilledWithinBudget,
}

const NONE: u32 = u32::MAX;

/// Trie over all cyclic rotations of a relator set and its inverses.
pub struct FillPool {
    letters: usize,
    max_len: usize,
    words: Vec<Word>,
    children: Vec<Vec<u32>>,
    /// Relators whose prefix ends at the node and covers at least half of them.
    ends: Vec<Vec<u32>>,
}

impl FillPool {
    pub fn new(gens: usize, relators: &[Word], max_len: usize) -> Self {
        let mut words: Vec<Word> = Vec::new();
        for r in relators {
            if r.is_empty() || r.len() > max_len || !r.is_cyclically_reduced() {
                continue;
            }
            for base in [r.clone(), r.inverse()] {
                for i in 0..base.len() {
                    words.push(base.rotate(i));
                }
            }
        }
        words.sort();
        words.dedup();
        let letters = 2 * gens;
        let mut pool = FillPool { letters, max_len, words, children: vec![vec![NONE; letters]], ends: vec![Vec::new()] };
        for id in 0..pool.words.len() {
            let len = pool.words[id].len();
            let mut node = 0usize;
            for (d, l) in pool.words[id].letters().to_vec().into_iter().enumerate() {
                let k = l.key();
                if pool.children[node][k] == NONE {
                    pool.children.push(vec![NONE; letters]);
                    pool.ends.push(Vec::new());
                    pool.children[node][k] = (pool.children.len() - 1) as u32;
                }
                node = pool.children[node][k] as usize;
                if 2 * (d + 1) >= len {
                    pool.ends[node].push(id as u32);
                }
            }
        }
        pool
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Breadth-first over the number of pieces. Moves are taken in order of
    /// conjugator length, then relator order.
    pub fn search(&self, target: &Word, area_budget: usize, state_cap: usize) -> Option<Vec<(Word, Word)>> {
        if target.is_empty() {
            return Some(Vec::new());
        }
        let len_cap = target.len().max(self.max_len);
        let mut states: Vec<(Word, usize, Option<(Word, Word)>)> = vec![(target.clone(), usize::MAX, None)];
        let mut seen: HashSet<Word> = HashSet::from([target.clone()]);
        let mut frontier = vec![0usize];
        for _ in 0..area_budget {
            let mut next = Vec::new();
            for &sid in &frontier {
                let w = states[sid].0.clone();
                let letters = w.letters();
                let m = letters.len();
                for j in 0..m {
                    let mut node = 0usize;
                    for d in 0..m {
                        let l = letters[(j + d) % m];
                        let c = self.children[node][l.key()];
                        if c == NONE {
                            break;
                        }
                        node = c as usize;
                        for &id in &self.ends[node] {
                            let rel = &self.words[id as usize];
                            let p = d + 1;
                            let x = Word::reduced_from(letters[..j].iter().copied());
                            let s_inv = rel.slice(p, rel.len()).inverse();
                            let b: Vec<Letter> = (p..m).map(|k| letters[(j + k) % m]).collect();
                            let mut raw = x.letters().to_vec();
                            raw.extend_from_slice(s_inv.letters());
                            raw.extend(b);
                            raw.extend_from_slice(x.inverse().letters());
                            let nw = Word::reduced_from(raw);
                            if nw.len() > len_cap || seen.contains(&nw) {
                                continue;
                            }
                            seen.insert(nw.clone());
                            let done = nw.is_empty();
                            states.push((nw, sid, Some((x, rel.clone()))));
                            if done {
                                return Some(Self::unwind(&states, states.len() - 1));
                            }
                            if states.len() >= state_cap {
                                return None;
                            }
                            next.push(states.len() - 1);
                        }
                    }
                }
            }
            if next.is_empty() {
                return None;
            }
            frontier = next;
        }
        None
    }

    fn unwind(states: &[(Word, usize, Option<(Word, Word)>)], mut sid: usize) -> Vec<(Word, Word)> {
        let mut pieces = Vec::new();
        while let Some(piece) = &states[sid].2 {
            pieces.push(piece.clone());
            sid = states[sid].1;
        }
        pieces.reverse();
        pieces
    }

    pub fn gens(&self) -> usize {
        self.letters / 2
    }
}

/// Tries to certify `w ∈ N_n` using relations read off the ball of radius `ball_radius`.
pub fn fill(g: &MarkedGroup, w: &Word, n: usize, ball_radius: usize, area_budget: usize) -> Result<FillOutcome> {
    match g.is_identity(w) {
        Verdict3::True => {}
        Verdict3::False => return Err(Error::NotARelation(g.format(w))),
        Verdict3::Unknown { .. } => return Err(Error::OracleUnknown(format!("is {} trivial", g.format(w)))),
    }
    if w.is_empty() {
        return Ok(FillOutcome::Filled(FillingDiagram { target: Word::empty(), pieces: Vec::new(), max_piece_len: n }));
    }
    let radius = ball_radius.min(n.div_ceil(2));
    let b = ball(g, radius)?;
    let rels = relations_from_ball(&b, n.min(2 * radius));
    let pool = FillPool::new(g.alphabet().len(), &rels, n);
    fill_with_pool(g, w, n, &pool, area_budget)
}

/// Same as [`fill`] with a prebuilt pool of relations of length `≤ n`.
pub fn fill_with_pool(g: &MarkedGroup, w: &Word, n: usize, pool: &FillPool, area_budget: usize) -> Result<FillOutcome> {
    match pool.search(w, area_budget, DEFAULT_STATE_CAP) {
        Some(pieces) => {
            let d = FillingDiagram { target: w.clone(), pieces, max_piece_len: n };
            if !verify_filling(g, &d)? {
                return Err(Error::OracleUnknown(format!("filling of {} failed verification", g.format(w))));
            }
            Ok(FillOutcome::Filled(d))
        }
        None => Ok(FillOutcome::NotFilledWithinBudget),
    }
}
