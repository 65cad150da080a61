//! Seeded random C'(1/7) presentations with prescribed relator lengths.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::freewords::{Letter, Word};

const STEP_BUDGET: u64 = 2_000_000;
const RESTARTS: usize = 64;

/// Smallest piece length forbidden in a relator of length `len`.
pub fn forbidden_piece_len(len: usize) -> usize {
    (len - 1) / 7 + 1
}

fn inv_keys(w: &[u8]) -> Vec<u8> {
    w.iter().rev().map(|k| k ^ 1).collect()
}

struct Search<'a> {
    len: usize,
    own_k: usize,
    letters: u8,
    forbidden: &'a HashMap<usize, HashSet<Vec<u8>>>,
    word: Vec<u8>,
    own: HashSet<Vec<u8>>,
    steps: u64,
}

impl Search<'_> {
    fn window(&self, end: usize, k: usize) -> Vec<u8> {
        let l = self.word.len();
        (0..k).map(|j| self.word[(end + l + 1 - k + j) % l.max(1)]).collect()
    }

    fn linear_window(&self, end: usize, k: usize) -> Vec<u8> {
        self.word[end + 1 - k..=end].to_vec()
    }

    fn clashes(&self, u: &[u8], k: usize) -> bool {
        self.forbidden.get(&k).map_or(false, |s| s.contains(u) || s.contains(&inv_keys(u)))
    }

    fn run(&mut self, rng: &mut ChaCha8Rng) -> Option<bool> {
        self.steps += 1;
        if self.steps > STEP_BUDGET {
            return None;
        }
        let i = self.word.len();
        if i == self.len {
            return Some(self.close());
        }
        let mut cand: Vec<u8> = (0..self.letters).collect();
        cand.shuffle(rng);
        for c in cand {
            if let Some(&p) = self.word.last() {
                if p ^ 1 == c {
                    continue;
                }
            }
            if i + 1 == self.len && self.word[0] ^ 1 == c {
                continue;
            }
            self.word.push(c);
            let mut ok = true;
            for &k in self.forbidden.keys() {
                if i + 1 >= k && self.clashes(&self.linear_window(i, k), k) {
                    ok = false;
                    break;
                }
            }
            let mut inserted = None;
            if ok && i + 1 >= self.own_k {
                let u = self.linear_window(i, self.own_k);
                let ui = inv_keys(&u);
                if self.own.contains(&u) || self.own.contains(&ui) {
                    ok = false;
                } else {
                    self.own.insert(u.clone());
                    self.own.insert(ui.clone());
                    inserted = Some((u, ui));
                }
            }
            if ok {
                match self.run(rng) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            if let Some((u, ui)) = inserted {
                self.own.remove(&u);
                self.own.remove(&ui);
            }
            self.word.pop();
        }
        Some(false)
    }

    /// Checks the windows that wrap around the end.
    fn close(&mut self) -> bool {
        let l = self.len;
        let mut extra = HashSet::new();
        for &k in self.forbidden.keys() {
            for end in 0..k.saturating_sub(1).min(l) {
                if self.clashes(&self.window(end, k), k) {
                    return false;
                }
            }
        }
        for end in 0..(self.own_k - 1).min(l) {
            let u = self.window(end, self.own_k);
            let ui = inv_keys(&u);
            if u == ui || self.own.contains(&u) || self.own.contains(&ui) || extra.contains(&u) || extra.contains(&ui) {
                return false;
            }
            extra.insert(u);
            extra.insert(ui);
        }
        true
    }
}

/// Relators of the given lengths over `gens` generators whose symmetrized
/// closure satisfies C'(1/7). Deterministic in `seed`.
pub fn generate(lengths: &[usize], gens: usize, seed: u64) -> Result<Vec<Word>> {
    if gens < 2 {
        return Err(Error::ParamError("need at least 2 generators".into()));
    }
    if lengths.iter().any(|&l| l < 7) {
        return Err(Error::ParamError("relator lengths must be at least 7".into()));
    }
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| lengths[i]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut forbidden: HashMap<usize, HashSet<Vec<u8>>> = HashMap::new();
    let mut out: Vec<Option<Word>> = vec![None; lengths.len()];
    for &idx in &order {
        let len = lengths[idx];
        let own_k = forbidden_piece_len(len);
        let mut found = None;
        for _ in 0..RESTARTS {
            let mut s = Search {
                len,
                own_k,
                letters: (2 * gens) as u8,
                forbidden: &forbidden,
                word: Vec::with_capacity(len),
                own: HashSet::new(),
                steps: 0,
            };
            if s.run(&mut rng) == Some(true) {
                found = Some(s.word);
                break;
            }
        }
        let word = found.ok_or_else(|| Error::BudgetExceeded(format!("no C'(1/7) relator of length {len} found")))?;
        let set = forbidden.entry(own_k).or_default();
        for i in 0..len {
            let u: Vec<u8> = (0..own_k).map(|j| word[(i + j) % len]).collect();
            set.insert(inv_keys(&u));
            set.insert(u);
        }
        out[idx] = Some(Word::reduced_from(word.iter().map(|&k| Letter::from_key(k as usize))));
    }
    Ok(out.into_iter().map(|w| w.expect("every length generated")).collect())
}
