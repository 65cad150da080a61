//! Free-group words over a small marked alphabet.
//!
//! Lowercase letters name generators and uppercase letters their inverses;
//! that string form is the only external representation of a [`Word`].

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on [`enumerate_words`].
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

/// A signed generator. Ordering follows generator index, then `+` before `-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub gen: u16,
    pub inv: bool,
}

impl Letter {
    pub const fn new(gen: u16, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub const fn pos(gen: u16) -> Self {
        Letter { gen, inv: false }
    }

    pub const fn neg(gen: u16) -> Self {
        Letter { gen, inv: true }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// `2·gen + inv`; the total order used for all tie-breaking.
    pub fn key(self) -> usize {
        2 * self.gen as usize + self.inv as usize
    }

    pub fn from_key(key: usize) -> Self {
        Letter { gen: (key / 2) as u16, inv: key % 2 == 1 }
    }

    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<char>,
}

impl Alphabet {
    pub fn new(names: impl IntoIterator<Item = char>) -> Result<Self> {
        let names: Vec<char> = names.into_iter().collect();
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("empty alphabet".into()));
        }
        for (i, c) in names.iter().enumerate() {
            if !c.is_ascii_lowercase() {
                return Err(Error::InvalidAlphabet(format!("{c:?} is not a lowercase ASCII letter")));
            }
            if names[..i].contains(c) {
                return Err(Error::InvalidAlphabet(format!("duplicate generator {c:?}")));
            }
        }
        Ok(Alphabet { names })
    }

    /// Panics on invalid names; meant for the built-in catalog.
    pub fn from_str_static(names: &str) -> Self {
        Alphabet::new(names.chars()).expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn index_of(&self, c: char) -> Option<u16> {
        self.names.iter().position(|&n| n == c).map(|i| i as u16)
    }

    pub fn letter(&self, c: char) -> Result<Letter> {
        let lower = c.to_ascii_lowercase();
        let gen = self.index_of(lower).ok_or_else(|| Error::UnknownGenerator(c.to_string()))?;
        Ok(Letter::new(gen, c.is_ascii_uppercase()))
    }

    /// All signed letters in tie-breaking order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..2 * self.len()).map(Letter::from_key)
    }

    /// Parses the canonical syntax. Whitespace is ignored and `^k` raises the
    /// preceding letter to the power `k` (negative allowed).
    pub fn parse(&self, s: &str) -> Result<Word> {
        let mut raw: Vec<Letter> = Vec::with_capacity(s.len());
        let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(c) = chars.next() {
            if c == '^' {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || (d == '-' && digits.is_empty()) {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let k: i64 = digits
                    .parse()
                    .map_err(|_| Error::parse(s, format!("bad exponent {digits:?}")))?;
                let last = raw.pop().ok_or_else(|| Error::parse(s, "exponent without base letter"))?;
                let l = if k < 0 { last.inverse() } else { last };
                raw.extend(std::iter::repeat(l).take(k.unsigned_abs() as usize));
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(Error::parse(s, format!("unexpected character {c:?}")));
            }
            raw.push(self.letter(c)?);
        }
        reduce(self, &raw)
    }

    pub fn format(&self, w: &Word) -> String {
        w.letters()
            .iter()
            .map(|l| {
                let c = self.names[l.gen as usize];
                if l.inv {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.names.iter().collect();
        write!(f, "{{{s}}}")
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// Free reduction of a raw letter sequence, checked against `alphabet`.
pub fn reduce(alphabet: &Alphabet, raw: &[Letter]) -> Result<Word> {
    if let Some(bad) = raw.iter().find(|l| l.gen as usize >= alphabet.len()) {
        return Err(Error::UnknownGenerator(format!("index {}", bad.gen)));
    }
    Ok(Word::reduced_from(raw.iter().copied()))
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Reduces without alphabet checking.
    pub fn reduced_from(raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut buf = Vec::new();
        for l in raw {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn gen_power(gen: u16, k: i64) -> Self {
        let l = Letter::new(gen, k < 0);
        Word(vec![l; k.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut buf = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut buf, l);
        }
        Word(buf)
    }

    pub fn mul_letter(&self, l: Letter) -> Word {
        let mut buf = self.0.clone();
        push_reduced(&mut buf, l);
        Word(buf)
    }

    pub fn product<'a>(words: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut buf = Vec::new();
        for w in words {
            for &l in &w.0 {
                push_reduced(&mut buf, l);
            }
        }
        Word(buf)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::empty();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(&self, other: &Word) -> Word {
        Word::product([self, other, &self.inverse(), &other.inverse()])
    }

    /// `c · self · c⁻¹`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        Word::product([c, self, &c.inverse()])
    }

    /// Subword `[from, to)`; subwords of reduced words are reduced.
    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    /// The cyclic rotation starting at position `i`, freely reduced.
    pub fn rotate(&self, i: usize) -> Word {
        if self.is_empty() {
            return Word::empty();
        }
        let i = i % self.len();
        Word::reduced_from(self.0[i..].iter().chain(self.0[..i].iter()).copied())
    }

    /// Signed exponent sum of generator `gen`.
    pub fn exponent_sum(&self, gen: u16) -> i64 {
        self.0.iter().filter(|l| l.gen == gen).map(|l| l.sign()).sum()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Largest generator index used plus one.
    pub fn max_gen(&self) -> usize {
        self.0.iter().map(|l| l.gen as usize + 1).max().unwrap_or(0)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex: length first, then lexicographic by letter key.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// Returns `(core, conjugator)` with `w = conjugator · core · conjugator⁻¹`
/// and `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let l = w.letters();
    let mut i = 0;
    let mut j = l.len();
    while j - i >= 2 && l[i] == l[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    (Word(l[i..j].to_vec()), Word(l[..i].to_vec()))
}

/// Substitution homomorphism `F(source) → F(target)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    pub source: Alphabet,
    pub target: Alphabet,
    pub images: Vec<Word>,
}

impl GroupHom {
    pub fn new(source: Alphabet, target: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::ParamError(format!(
                "{} images for {} generators",
                images.len(),
                source.len()
            )));
        }
        if let Some(w) = images.iter().find(|w| w.max_gen() > target.len()) {
            return Err(Error::UnknownGenerator(format!("image {w:?} leaves target alphabet")));
        }
        Ok(GroupHom { source, target, images })
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        let images = (0..alphabet.len() as u16).map(|g| Word::letter(Letter::pos(g))).collect();
        GroupHom { source: alphabet.clone(), target: alphabet.clone(), images }
    }

    /// Builds a hom from `(source letter, target word string)` pairs; every
    /// source generator must be listed.
    pub fn from_strings(source: &Alphabet, target: &Alphabet, pairs: &[(char, &str)]) -> Result<Self> {
        let mut images = vec![None; source.len()];
        for (c, s) in pairs {
            let g = source.index_of(*c).ok_or_else(|| Error::UnknownGenerator(c.to_string()))?;
            images[g as usize] = Some(target.parse(s)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| Error::ParamError(format!("no image for {}", source.names()[i]))))
            .collect::<Result<Vec<_>>>()?;
        GroupHom::new(source.clone(), target.clone(), images)
    }

    pub fn image_of(&self, l: Letter) -> Word {
        let w = &self.images[l.gen as usize];
        if l.inv {
            w.inverse()
        } else {
            w.clone()
        }
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut buf = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.gen as usize];
            if l.inv {
                for &m in img.letters().iter().rev() {
                    push_reduced(&mut buf, m.inverse());
                }
            } else {
                for &m in img.letters() {
                    push_reduced(&mut buf, m);
                }
            }
        }
        Word(buf)
    }

    pub fn compose(&self, after: &GroupHom) -> GroupHom {
        GroupHom {
            source: self.source.clone(),
            target: after.target.clone(),
            images: self.images.iter().map(|w| after.apply(w)).collect(),
        }
    }
}

/// `substitute(h, w)`: the reduced image of `w` under `h`.
pub fn substitute(h: &GroupHom, w: &Word) -> Word {
    h.apply(w)
}

/// Number of reduced words of length `≤ max_len` over `gens` generators,
/// saturating at `u64::MAX`.
pub fn reduced_word_count(gens: usize, max_len: usize) -> u64 {
    let mut total: u64 = 1;
    let mut sphere: u64 = 2 * gens as u64;
    for _ in 1..=max_len {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul((2 * gens as u64).saturating_sub(1));
    }
    total
}

/// Shortlex stream of every reduced word of length `≤ max_len`.
pub struct WordEnumeration {
    letters: usize,
    max_len: usize,
    current: Option<Vec<usize>>,
}

impl WordEnumeration {
    fn first_of_len(&self, len: usize) -> Option<Vec<usize>> {
        let mut d = Vec::with_capacity(len);
        for _ in 0..len {
            let v = smallest_after(d.last().copied(), 0, self.letters)?;
            d.push(v);
        }
        Some(d)
    }

    fn advance(&self, d: &[usize]) -> Option<Vec<usize>> {
        let mut d = d.to_vec();
        let mut pos = d.len();
        while pos > 0 {
            pos -= 1;
            let prev = if pos == 0 { None } else { Some(d[pos - 1]) };
            if let Some(v) = smallest_after(prev, d[pos] + 1, self.letters) {
                d[pos] = v;
                for k in pos + 1..d.len() {
                    d[k] = smallest_after(Some(d[k - 1]), 0, self.letters)?;
                }
                return Some(d);
            }
        }
        None
    }
}

fn smallest_after(prev: Option<usize>, from: usize, letters: usize) -> Option<usize> {
    (from..letters).find(|&v| prev.map_or(true, |p| v != (p ^ 1)))
}

impl Iterator for WordEnumeration {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let cur = self.current.take()?;
        let word = Word(cur.iter().map(|&k| Letter::from_key(k)).collect());
        self.current = match self.advance(&cur) {
            Some(next) => Some(next),
            None if cur.len() < self.max_len => self.first_of_len(cur.len() + 1),
            None => None,
        };
        Some(word)
    }
}

pub fn enumerate_words(alphabet: &Alphabet, max_len: usize) -> Result<WordEnumeration> {
    enumerate_words_capped(alphabet, max_len, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_words_capped(alphabet: &Alphabet, max_len: usize, cap: u64) -> Result<WordEnumeration> {
    let count = reduced_word_count(alphabet.len(), max_len);
    if count > cap {
        return Err(Error::BudgetExceeded(format!("{count} words exceed cap {cap}")));
    }
    Ok(WordEnumeration { letters: 2 * alphabet.len(), max_len, current: Some(Vec::new()) })
}
