//! Marked groups and their word-problem oracles.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::{Alphabet, GroupHom, Letter, Word};

pub mod basic;
pub mod catalog;
pub mod companion;
pub mod graph_product;
pub mod grigorchuk;
pub mod hnn;
pub mod small_cancellation;
pub mod wreath;

pub use catalog::parse_group;

/// Step budget handed to a single oracle call.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict3 {
    True,
    False,
    Unknown { spent: u64 },
}

impl Verdict3 {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict3::True
        } else {
            Verdict3::False
        }
    }

    pub fn decided(self) -> Option<bool> {
        match self {
            Verdict3::True => Some(true),
            Verdict3::False => Some(false),
            Verdict3::Unknown { .. } => None,
        }
    }
}

/// Canonical key of a group element.
pub type NfKey = String;

pub trait GroupOracle: Send + Sync {
    fn alphabet(&self) -> &Alphabet;

    fn is_identity(&self, w: &Word, budget: u64) -> Verdict3;

    /// Equal keys exactly for equal elements.
    fn normal_form(&self, _w: &Word) -> Option<NfKey> {
        None
    }

    /// Hash of a homomorphic image; equal elements always collide.
    fn fingerprint(&self, _w: &Word) -> u64 {
        0
    }

    /// Whether `is_identity` always decides.
    fn is_exact(&self) -> bool {
        true
    }

    /// Every nonempty reduced word shorter than this is nontrivial.
    fn girth(&self) -> usize {
        0
    }
}

#[derive(Clone)]
pub struct MarkedGroup {
    spec: String,
    name: String,
    oracle: Arc<dyn GroupOracle>,
}

impl fmt::Debug for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkedGroup").field("spec", &self.spec).field("alphabet", self.alphabet()).finish()
    }
}

impl MarkedGroup {
    pub fn new(spec: impl Into<String>, name: impl Into<String>, oracle: impl GroupOracle + 'static) -> Self {
        MarkedGroup { spec: spec.into(), name: name.into(), oracle: Arc::new(oracle) }
    }

    pub fn from_arc(spec: impl Into<String>, name: impl Into<String>, oracle: Arc<dyn GroupOracle>) -> Self {
        MarkedGroup { spec: spec.into(), name: name.into(), oracle }
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn oracle(&self) -> &Arc<dyn GroupOracle> {
        &self.oracle
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.oracle.alphabet()
    }

    pub fn parse(&self, s: &str) -> Result<Word> {
        self.alphabet().parse(s)
    }

    pub fn format(&self, w: &Word) -> String {
        self.alphabet().format(w)
    }

    pub fn is_identity(&self, w: &Word) -> Verdict3 {
        self.oracle.is_identity(w, DEFAULT_BUDGET)
    }

    pub fn is_identity_budget(&self, w: &Word, budget: u64) -> Verdict3 {
        self.oracle.is_identity(w, budget)
    }

    /// Decided triviality, or `OracleUnknown`.
    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        self.is_identity(w)
            .decided()
            .ok_or_else(|| Error::OracleUnknown(format!("{} on {}", self.spec, self.format(w))))
    }

    pub fn same_element(&self, u: &Word, v: &Word) -> Result<bool> {
        if let (Some(a), Some(b)) = (self.normal_form(u), self.normal_form(v)) {
            return Ok(a == b);
        }
        if self.fingerprint(u) != self.fingerprint(v) {
            return Ok(false);
        }
        self.is_trivial(&u.mul(&v.inverse()))
    }

    pub fn normal_form(&self, w: &Word) -> Option<NfKey> {
        self.oracle.normal_form(w)
    }

    pub fn has_normal_form(&self) -> bool {
        self.oracle.normal_form(&Word::empty()).is_some()
    }

    pub fn fingerprint(&self, w: &Word) -> u64 {
        self.oracle.fingerprint(w)
    }

    pub fn is_exact(&self) -> bool {
        self.oracle.is_exact()
    }

    pub fn girth(&self) -> usize {
        self.oracle.girth()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LawCheck {
    Holds { samples: usize },
    Violated { witness: Vec<String> },
}

/// Random reduced word of length `≤ max_len`.
pub fn random_word(rng: &mut impl Rng, alphabet: &Alphabet, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    random_word_exact(rng, alphabet, len)
}

/// Random reduced word of length exactly `len`.
pub fn random_word_exact(rng: &mut impl Rng, alphabet: &Alphabet, len: usize) -> Word {
    let k = 2 * alphabet.len();
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_key(rng.gen_range(0..k));
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    Word::reduced_from(letters)
}

/// Samples tuples of words and substitutes them into `law`; the first nontrivial
/// value is reported as a violation.
pub fn check_law(g: &MarkedGroup, law: &Word, vars: usize, samples: usize, len_bound: usize, seed: u64) -> Result<LawCheck> {
    if law.is_empty() {
        return Err(Error::ParamError("trivial law".into()));
    }
    if law.max_gen() > vars {
        return Err(Error::ParamError("law uses more variables than declared".into()));
    }
    let var_alpha = Alphabet::new((0..vars).map(|i| (b'a' + i as u8) as char))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let images: Vec<Word> = (0..vars).map(|_| random_word(&mut rng, g.alphabet(), len_bound)).collect();
        let hom = GroupHom::new(var_alpha.clone(), g.alphabet().clone(), images.clone())?;
        let value = hom.apply(law);
        if !g.is_trivial(&value)? {
            return Ok(LawCheck::Violated { witness: images.iter().map(|w| g.format(w)).collect() });
        }
    }
    Ok(LawCheck::Holds { samples })
}

/// `[[x₁,x₂],[x₃,x₄]]` over the variable letters `a b c d`.
pub fn metabelian_law() -> Word {
    let a = Word::letter(Letter::pos(0));
    let b = Word::letter(Letter::pos(1));
    let c = Word::letter(Letter::pos(2));
    let d = Word::letter(Letter::pos(3));
    a.commutator(&b).commutator(&c.commutator(&d))
}

pub(crate) fn hash_str(s: &str) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    s.hash(&mut h);
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metabelian_law_shape() {
        assert_eq!(metabelian_law().len(), 16);
    }

    #[test]
    fn random_words_are_reduced() {
        let a = Alphabet::from_str_static("tx");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let w = random_word_exact(&mut rng, &a, 9);
            assert_eq!(w.len(), 9);
        }
    }
}
