use std::sync::Arc;

use num_bigint::BigInt;

use crate::certify::dehn::{check_c7, DehnOutcome, SymmetrizedSet};
use crate::error::{Error, Result};
use crate::freewords::{Alphabet, Word};
use crate::intmat::Lattice;

use super::{hash_str, GroupOracle, MarkedGroup, Verdict3};

/// `⟨S | R⟩` with `R` satisfying C'(1/7), decided by Dehn's algorithm.
pub struct SmallCancellation {
    alphabet: Alphabet,
    relators: Vec<Word>,
    symmetrized: Arc<SymmetrizedSet>,
    abelian: Lattice,
}

impl SmallCancellation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        if relators.iter().any(|r| r.max_gen() > alphabet.len()) {
            return Err(Error::UnknownGenerator("relator outside alphabet".into()));
        }
        let symmetrized = Arc::new(check_c7(alphabet.len(), &relators)?);
        let g = alphabet.len() as u16;
        let rows: Vec<Vec<BigInt>> =
            relators.iter().map(|r| (0..g).map(|i| BigInt::from(r.exponent_sum(i))).collect()).collect();
        let abelian = Lattice::from_generators(alphabet.len(), &rows);
        Ok(SmallCancellation { alphabet, relators, symmetrized, abelian })
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn symmetrized(&self) -> &Arc<SymmetrizedSet> {
        &self.symmetrized
    }
}

impl GroupOracle for SmallCancellation {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        Verdict3::from_bool(self.symmetrized.dehn_reduce(w) == DehnOutcome::Empty)
    }

    /// Greendlinger: a nonempty trivial reduced word contains more than 4/7 of
    /// some relator, and replacing it cannot reach a shorter nonempty trivial word.
    fn girth(&self) -> usize {
        self.relators.iter().map(Word::len).min().unwrap_or(usize::MAX)
    }

    /// Class in the abelianization.
    fn fingerprint(&self, w: &Word) -> u64 {
        let v: Vec<BigInt> = (0..self.alphabet.len() as u16).map(|i| BigInt::from(w.exponent_sum(i))).collect();
        hash_str(&format!("{:?}", self.abelian.reduce(&v)))
    }
}

pub fn small_cancellation_group(spec: impl Into<String>, alphabet: Alphabet, relators: Vec<Word>) -> Result<MarkedGroup> {
    let spec = spec.into();
    let sc = SmallCancellation::new(alphabet, relators)?;
    Ok(MarkedGroup::new(spec.clone(), format!("C'(1/7) group {spec}"), sc))
}
