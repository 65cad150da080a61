//! Todd–Coxeter enumeration of the cosets of the trivial subgroup (HLT order).

use crate::freewords::Word;

/// Default coset cap.
pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CosetOutcome {
    /// Regular permutation representation: `table[c][letter.key()]`, coset 0 is the identity.
    FiniteIndex { table: Vec<Vec<u32>>, order: usize },
    Overflow,
}

impl CosetOutcome {
    pub fn order(&self) -> Option<usize> {
        match self {
            CosetOutcome::FiniteIndex { order, .. } => Some(*order),
            CosetOutcome::Overflow => None,
        }
    }
}

/// Image of the identity coset under `w`; `w` is trivial in the group iff the result is 0.
pub fn trace(table: &[Vec<u32>], w: &Word) -> u32 {
    w.letters().iter().fold(0u32, |c, l| table[c as usize][l.key()])
}

struct Enumerator {
    cols: usize,
    table: Vec<Vec<u32>>,
    parent: Vec<u32>,
    cap: usize,
    overflow: bool,
}

impl Enumerator {
    fn rep(&mut self, mut c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[c as usize] != root {
            let next = self.parent[c as usize];
            self.parent[c as usize] = root;
            c = next;
        }
        root
    }

    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> bool {
        if self.table.len() >= self.cap {
            self.overflow = true;
            return false;
        }
        let d = self.table.len() as u32;
        self.table.push(vec![NONE; self.cols]);
        self.parent.push(d);
        self.table[c as usize][x] = d;
        self.table[d as usize][x ^ 1] = c;
        true
    }

    fn merge(&mut self, k: u32, l: u32, queue: &mut Vec<u32>) {
        let (a, b) = (self.rep(k), self.rep(l));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi as usize] = lo;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let g = queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.table[g as usize][x];
                if d == NONE {
                    continue;
                }
                self.table[d as usize][x ^ 1] = NONE;
                let mu = self.rep(g);
                let nu = self.rep(d);
                if self.table[mu as usize][x] != NONE {
                    let t = self.table[mu as usize][x];
                    self.merge(nu, t, &mut queue);
                } else if self.table[nu as usize][x ^ 1] != NONE {
                    let t = self.table[nu as usize][x ^ 1];
                    self.merge(mu, t, &mut queue);
                } else {
                    self.table[mu as usize][x] = nu;
                    self.table[nu as usize][x ^ 1] = mu;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: u32, w: &[usize]) {
        if w.is_empty() {
            return;
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.table[f as usize][w[i]] != NONE {
                f = self.table[f as usize][w[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            while j >= i as isize && self.table[b as usize][w[j as usize] ^ 1] != NONE {
                b = self.table[b as usize][w[j as usize] ^ 1];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return;
            } else if j == i as isize {
                self.table[f as usize][w[i]] = b;
                self.table[b as usize][w[i] ^ 1] = f;
                return;
            } else if !self.define(f, w[i]) {
                return;
            }
        }
    }
}

/// Enumerates `⟨gens | relators⟩` if it is finite with at most `max_cosets` elements.
pub fn coset_enumeration(gens: usize, relators: &[Word], max_cosets: usize) -> CosetOutcome {
    let cols = 2 * gens;
    let rels: Vec<Vec<usize>> = relators.iter().map(|r| r.letters().iter().map(|l| l.key()).collect()).collect();
    let mut e = Enumerator { cols, table: vec![vec![NONE; cols]], parent: vec![0], cap: max_cosets.max(1), overflow: false };
    let mut c = 0u32;
    while (c as usize) < e.table.len() {
        for r in &rels {
            if !e.alive(c) {
                break;
            }
            e.scan_and_fill(c, r);
            if e.overflow {
                return CosetOutcome::Overflow;
            }
        }
        for x in 0..cols {
            if e.alive(c) && e.table[c as usize][x] == NONE && !e.define(c, x) {
                return CosetOutcome::Overflow;
            }
        }
        c += 1;
    }
    let mut relabel = vec![NONE; e.table.len()];
    let mut order = 0u32;
    for k in 0..e.table.len() {
        if e.alive(k as u32) {
            relabel[k] = order;
            order += 1;
        }
    }
    let table: Vec<Vec<u32>> = (0..e.table.len())
        .filter(|&k| e.alive(k as u32))
        .map(|k| e.table[k].iter().map(|&t| relabel[t as usize]).collect())
        .collect();
    CosetOutcome::FiniteIndex { order: order as usize, table }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Alphabet;

    #[test]
    fn classic_examples() {
        let a = Alphabet::from_str_static("ab");
        let rels: Vec<Word> = ["aa", "bb", "ababab"].iter().map(|s| a.parse(s).unwrap()).collect();
        let out = coset_enumeration(2, &rels, 1000);
        assert_eq!(out.order(), Some(6));
        if let CosetOutcome::FiniteIndex { table, .. } = &out {
            assert_eq!(trace(table, &a.parse("abab").unwrap()), trace(table, &a.parse("ba").unwrap()));
            assert_ne!(trace(table, &a.parse("ab").unwrap()), 0);
        }
        let c = Alphabet::from_str_static("a");
        assert_eq!(coset_enumeration(1, &[c.parse("aaaaa").unwrap()], 100).order(), Some(5));
        assert_eq!(coset_enumeration(2, &[], 100), CosetOutcome::Overflow);
    }

    #[test]
    fn larger_quotients() {
        let a = Alphabet::from_str_static("ab");
        // (2,3,5) triangle group, isomorphic to A₅.
        let rels: Vec<Word> = ["aa", "bbb", "ababababab"].iter().map(|s| a.parse(s).unwrap()).collect();
        assert_eq!(coset_enumeration(2, &rels, 10_000).order(), Some(60));
        let q8: Vec<Word> = ["aaaa", "aaBB", "abaB"].iter().map(|s| a.parse(s).unwrap()).collect();
        assert_eq!(coset_enumeration(2, &q8, 10_000).order(), Some(8));
        assert_eq!(coset_enumeration(2, &[a.parse("abAB").unwrap()], 5_000), CosetOutcome::Overflow);
    }
}
