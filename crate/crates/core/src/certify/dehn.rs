//! Symmetrized relator sets, the C'(1/7) piece check and Dehn's algorithm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::{cyclic_reduce, Letter, Word};

const NONE: u32 = u32::MAX;

/// All cyclic permutations of the relators and their inverses, indexed by a trie.
#[derive(Clone, Debug)]
pub struct SymmetrizedSet {
    letters: usize,
    words: Vec<Word>,
    children: Vec<Vec<u32>>,
    /// Relator ids through each node, in shortlex order of the relator.
    through: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceViolation {
    pub first: String,
    pub second: String,
    pub piece_len: usize,
    pub relator_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DehnOutcome {
    Empty,
    Irreducible(Word),
}

impl SymmetrizedSet {
    pub fn new(gens: usize, relators: &[Word]) -> Result<Self> {
        let mut words: Vec<Word> = Vec::new();
        for r in relators {
            let (core, conj) = cyclic_reduce(r);
            if !conj.is_empty() || core.is_empty() {
                return Err(Error::ParamError("relators must be nonempty and cyclically reduced".into()));
            }
            for base in [core.clone(), core.inverse()] {
                for i in 0..base.len() {
                    words.push(base.rotate(i));
                }
            }
        }
        words.sort();
        words.dedup();
        let letters = 2 * gens;
        let mut set = SymmetrizedSet { letters, words, children: vec![vec![NONE; letters]], through: vec![Vec::new()] };
        for id in 0..set.words.len() {
            let mut node = 0usize;
            set.through[0].push(id as u32);
            for l in set.words[id].letters().to_vec() {
                let k = l.key();
                if set.children[node][k] == NONE {
                    set.children.push(vec![NONE; letters]);
                    set.through.push(Vec::new());
                    set.children[node][k] = (set.children.len() - 1) as u32;
                }
                node = set.children[node][k] as usize;
                set.through[node].push(id as u32);
            }
        }
        Ok(set)
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Longest common prefix shared by two distinct elements, if any violates `7·p < len`.
    pub fn piece_violation(&self) -> Option<PieceViolation> {
        let mut stack = vec![(0usize, 0usize)];
        let mut worst: Option<PieceViolation> = None;
        while let Some((node, depth)) = stack.pop() {
            let ids = &self.through[node];
            if depth > 0 && ids.len() >= 2 {
                let shortest = ids.iter().map(|&i| self.words[i as usize].len()).min().unwrap_or(0);
                if 7 * depth >= shortest && worst.as_ref().map_or(true, |w| depth > w.piece_len) {
                    let (a, b) = (ids[0] as usize, ids[1] as usize);
                    worst = Some(PieceViolation {
                        first: format!("{:?}", self.words[a].letters().iter().map(|l| l.key()).collect::<Vec<_>>()),
                        second: format!("{:?}", self.words[b].letters().iter().map(|l| l.key()).collect::<Vec<_>>()),
                        piece_len: depth,
                        relator_len: shortest,
                    });
                }
            }
            if ids.len() >= 2 {
                for &c in &self.children[node] {
                    if c != NONE {
                        stack.push((c as usize, depth + 1));
                    }
                }
            }
        }
        worst
    }

    /// Length of the longest piece (common prefix of two distinct elements).
    pub fn max_piece(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((node, depth)) = stack.pop() {
            if self.through[node].len() >= 2 {
                best = best.max(depth);
                for &c in &self.children[node] {
                    if c != NONE {
                        stack.push((c as usize, depth + 1));
                    }
                }
            }
        }
        best
    }

    /// Leftmost position with an over-half match: `(position, match length, relator id)`.
    fn find_match(&self, w: &[Letter]) -> Option<(usize, usize, usize)> {
        for i in 0..w.len() {
            let mut node = 0usize;
            let mut best: Option<(usize, usize)> = None;
            for (m, l) in w[i..].iter().enumerate() {
                let next = self.children[node][l.key()];
                if next == NONE {
                    break;
                }
                node = next as usize;
                let depth = m + 1;
                if let Some(&id) = self.through[node].iter().find(|&&id| self.words[id as usize].len() < 2 * depth) {
                    best = Some((depth, id as usize));
                }
            }
            if let Some((m, id)) = best {
                return Some((i, m, id));
            }
        }
        None
    }

    /// Greedy Dehn reduction: replace the leftmost longest over-half subword by
    /// the inverse of its complement, freely reduce, repeat.
    pub fn dehn_reduce(&self, w: &Word) -> DehnOutcome {
        let mut cur: Vec<Letter> = w.letters().to_vec();
        while let Some((i, m, id)) = self.find_match(&cur) {
            let r = &self.words[id];
            let complement = r.slice(m, r.len()).inverse();
            let mut next: Vec<Letter> = cur[..i].to_vec();
            next.extend_from_slice(complement.letters());
            next.extend_from_slice(&cur[i + m..]);
            cur = Word::reduced_from(next).letters().to_vec();
        }
        if cur.is_empty() {
            DehnOutcome::Empty
        } else {
            DehnOutcome::Irreducible(Word::reduced_from(cur))
        }
    }

    pub fn gens(&self) -> usize {
        self.letters / 2
    }
}

/// Builds the symmetrized set and enforces C'(1/7).
pub fn check_c7(gens: usize, relators: &[Word]) -> Result<SymmetrizedSet> {
    let set = SymmetrizedSet::new(gens, relators)?;
    if let Some(v) = set.piece_violation() {
        return Err(Error::NotSmallCancellation(format!(
            "piece of length {} shared by {} and {} (7·{} ≥ {})",
            v.piece_len, v.first, v.second, v.piece_len, v.relator_len
        )));
    }
    Ok(set)
}

pub fn dehn_reduce(w: &Word, relators: &SymmetrizedSet) -> DehnOutcome {
    relators.dehn_reduce(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Alphabet;

    // Length 20 over {x,y,z} with all cyclic 3-subwords of r and r⁻¹ distinct.
    const R20: &str = "zxzyZXYZYXyxyxYZyXzy";

    fn alpha() -> Alphabet {
        Alphabet::from_str_static("xyz")
    }

    #[test]
    fn single_relator_reduces() {
        let a = alpha();
        let r = a.parse(R20).unwrap();
        let set = SymmetrizedSet::new(3, &[r.clone()]).unwrap();
        assert_eq!(set.dehn_reduce(&r), DehnOutcome::Empty);
        assert_eq!(set.dehn_reduce(&a.parse("x").unwrap()), DehnOutcome::Irreducible(a.parse("x").unwrap()));
        assert_eq!(set.dehn_reduce(&r.rotate(7).inverse()), DehnOutcome::Empty);
    }

    #[test]
    fn over_half_prefix_is_replaced() {
        let a = alpha();
        let r = a.parse(R20).unwrap();
        let set = SymmetrizedSet::new(3, &[r.clone()]).unwrap();
        let max_piece = set.max_piece();
        assert!(max_piece <= 2, "piece {max_piece}");
        let prefix = r.slice(0, 11);
        let tail = a.parse("zz").unwrap();
        let w = prefix.mul(&tail);
        assert_eq!(w.len(), 13);
        match set.dehn_reduce(&w) {
            DehnOutcome::Irreducible(v) => assert_eq!(v, r.slice(11, 20).inverse().mul(&tail)),
            DehnOutcome::Empty => panic!("not trivial"),
        }
    }

    #[test]
    fn long_shared_prefix_rejected() {
        let a = alpha();
        let r = a.parse(R20).unwrap();
        let mut s = r.slice(0, 5).letters().to_vec();
        s.extend(a.parse("xxyyzzxxyyzzxxy").unwrap().letters());
        let r2 = Word::reduced_from(s);
        match check_c7(3, &[r, r2]) {
            Err(Error::NotSmallCancellation(msg)) => assert!(msg.contains("length")),
            other => panic!("{other:?}"),
        }
    }
}
