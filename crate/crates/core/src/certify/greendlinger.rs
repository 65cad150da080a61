//! Certificates that a relator of a C'(1/7) presentation is not a consequence
//! of the shorter relators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::Word;

use super::dehn::{check_c7, DehnOutcome, SymmetrizedSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreendlingerCertificate {
    pub relator: Word,
    pub shorter: Vec<Word>,
    /// Longest cyclic subword of `relator` that is also a subword of a symmetrized shorter relator.
    pub max_overlap: usize,
    /// Length of the shortest relator in `shorter` (0 if none).
    pub min_shorter_len: usize,
}

/// Longest common prefix between a rotation of `r` and an element of `set`.
fn max_overlap(set: &SymmetrizedSet, r: &Word) -> (usize, usize) {
    let m = r.len();
    let mut best = (0usize, 0usize);
    for j in 0..m {
        for w in set.words() {
            let mut d = 0;
            while d < w.len() && d < m && w.letters()[d] == r.letters()[(j + d) % m] {
                d += 1;
            }
            if d > best.0 || (d == best.0 && w.len() < best.1) {
                best = (d, w.len());
            }
        }
    }
    best
}

pub fn greendlinger_new_relator(gens: usize, r: &Word, shorter: &[Word]) -> Result<GreendlingerCertificate> {
    if shorter.iter().any(|s| s.len() >= r.len()) {
        return Err(Error::ParamError("every comparison relator must be shorter".into()));
    }
    let mut all = shorter.to_vec();
    all.push(r.clone());
    check_c7(gens, &all)?;
    let (overlap, min_len) = if shorter.is_empty() {
        (0, 0)
    } else {
        let set = SymmetrizedSet::new(gens, shorter)?;
        let (d, _) = max_overlap(&set, r);
        (d, shorter.iter().map(Word::len).min().unwrap_or(0))
    };
    let cert = GreendlingerCertificate { relator: r.clone(), shorter: shorter.to_vec(), max_overlap: overlap, min_shorter_len: min_len };
    if !verify_greendlinger(gens, &cert)? {
        return Err(Error::NotSmallCancellation(format!("relator of length {} is Dehn-reducible by shorter relators", r.len())));
    }
    Ok(cert)
}

/// Re-derives the overlap bound and checks that Dehn's algorithm for the
/// shorter presentation leaves the relator untouched.
pub fn verify_greendlinger(gens: usize, cert: &GreendlingerCertificate) -> Result<bool> {
    let mut all = cert.shorter.clone();
    all.push(cert.relator.clone());
    if check_c7(gens, &all).is_err() || cert.shorter.iter().any(|s| s.len() >= cert.relator.len()) {
        return Ok(false);
    }
    if cert.shorter.is_empty() {
        return Ok(cert.max_overlap == 0 && !cert.relator.is_empty());
    }
    let set = SymmetrizedSet::new(gens, &cert.shorter)?;
    let (d, _) = max_overlap(&set, &cert.relator);
    if d != cert.max_overlap || 2 * d >= cert.min_shorter_len {
        return Ok(false);
    }
    for j in 0..cert.relator.len() {
        if set.dehn_reduce(&cert.relator.rotate(j)) == DehnOutcome::Empty {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::sc_family::generate;

    #[test]
    fn family_relators_are_new() {
        let rels = generate(&[21, 63], 3, 5).unwrap();
        let c = greendlinger_new_relator(3, &rels[1], &rels[..1]).unwrap();
        assert!(c.max_overlap <= 2);
        assert!(verify_greendlinger(3, &c).unwrap());
        let vac = greendlinger_new_relator(3, &rels[0], &[]).unwrap();
        assert_eq!(vac.max_overlap, 0);
    }

    #[test]
    fn long_overlap_rejected() {
        let rels = generate(&[21], 3, 5).unwrap();
        let mut letters = rels[0].slice(0, 11).letters().to_vec();
        let tail = generate(&[40], 3, 9).unwrap()[0].clone();
        letters.extend_from_slice(tail.slice(0, 30).letters());
        let r = Word::reduced_from(letters);
        let r = crate::freewords::cyclic_reduce(&r).0;
        assert!(matches!(greendlinger_new_relator(3, &r, &rels), Err(Error::NotSmallCancellation(_))));
    }
}
