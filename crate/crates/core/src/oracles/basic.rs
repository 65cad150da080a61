use crate::error::{Error, Result};
use crate::freewords::{Alphabet, Word};

use super::{hash_str, GroupOracle, MarkedGroup, NfKey, Verdict3};

const LETTERS: &str = "xyzuvwabcdefghijklmnopqrs";

fn letters(k: usize) -> Result<Alphabet> {
    if k == 0 || k > LETTERS.len() {
        return Err(Error::ParamError(format!("rank {k} out of range")));
    }
    Alphabet::new(LETTERS.chars().take(k))
}

pub struct FreeGroup {
    alphabet: Alphabet,
}

impl GroupOracle for FreeGroup {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        Verdict3::from_bool(w.is_empty())
    }

    fn normal_form(&self, w: &Word) -> Option<NfKey> {
        Some(self.alphabet.format(w))
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        hash_str(&self.alphabet.format(w))
    }

    fn girth(&self) -> usize {
        usize::MAX
    }
}

/// Free group on an explicit alphabet.
pub fn free_on(alphabet: Alphabet) -> FreeGroup {
    FreeGroup { alphabet }
}

pub fn free_group(k: usize) -> Result<MarkedGroup> {
    Ok(MarkedGroup::new(format!("free({k})"), format!("F_{k}"), FreeGroup { alphabet: letters(k)? }))
}

/// `ℤ^d`, the free abelian group.
pub struct FreeAbelian {
    alphabet: Alphabet,
}

impl FreeAbelian {
    fn exponents(&self, w: &Word) -> Vec<i64> {
        (0..self.alphabet.len() as u16).map(|g| w.exponent_sum(g)).collect()
    }
}

impl GroupOracle for FreeAbelian {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        Verdict3::from_bool(self.exponents(w).iter().all(|&e| e == 0))
    }

    fn normal_form(&self, w: &Word) -> Option<NfKey> {
        Some(format!("{:?}", self.exponents(w)))
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        hash_str(&format!("{:?}", self.exponents(w)))
    }
}

pub fn free_abelian(d: usize) -> Result<MarkedGroup> {
    Ok(MarkedGroup::new(format!("zd({d})"), format!("Z^{d}"), FreeAbelian { alphabet: letters(d)? }))
}

/// `ℤ/q` on one generator.
pub struct Cyclic {
    alphabet: Alphabet,
    q: u64,
}

impl Cyclic {
    fn residue(&self, w: &Word) -> i64 {
        w.exponent_sum(0).rem_euclid(self.q as i64)
    }
}

impl GroupOracle for Cyclic {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        Verdict3::from_bool(self.residue(w) == 0)
    }

    fn normal_form(&self, w: &Word) -> Option<NfKey> {
        Some(self.residue(w).to_string())
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        self.residue(w) as u64
    }
}

pub fn cyclic_group(q: u64) -> Result<MarkedGroup> {
    if q < 2 {
        return Err(Error::ParamError(format!("cyclic group needs q ≥ 2, got {q}")));
    }
    Ok(MarkedGroup::new(format!("cyclic({q})"), format!("C_{q}"), Cyclic { alphabet: letters(1)?, q }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_and_abelian() {
        let f = free_group(2).unwrap();
        assert_eq!(f.is_identity(&f.parse("xyXY").unwrap()), Verdict3::False);
        let z = free_abelian(2).unwrap();
        assert_eq!(z.is_identity(&z.parse("xyXY").unwrap()), Verdict3::True);
        assert_eq!(z.is_identity(&z.parse("xy").unwrap()), Verdict3::False);
        assert!(free_group(0).is_err());
        let c3 = cyclic_group(3).unwrap();
        assert_eq!(c3.is_identity(&c3.parse("xxx").unwrap()), Verdict3::True);
        assert_eq!(c3.is_identity(&c3.parse("xX x").unwrap()), Verdict3::False);
    }
}
