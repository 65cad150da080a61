//! Confining the stable-letter path of a relation to a window `[0, n]`.

use crate::error::{Error, Result};
use crate::freewords::{cyclic_reduce, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TRangeOutcome {
    /// `word = conjugator · w · conjugator⁻¹` and its `t`-path stays in `[0, n]`.
    Conjugated { word: Word, conjugator: Word },
    /// The path of the cyclic core spans `range > n`.
    Fail { range: i64 },
}

/// Running `t`-exponent range `(min, max)` of a word.
pub fn t_path_range(w: &Word) -> (i64, i64) {
    let mut k = 0i64;
    let (mut lo, mut hi) = (0i64, 0i64);
    for l in w.letters() {
        if l.gen == 0 {
            k += l.sign();
            lo = lo.min(k);
            hi = hi.max(k);
        }
    }
    (lo, hi)
}

/// `t` is generator 0.
pub fn trange_reduce(w: &Word, n: i64) -> Result<TRangeOutcome> {
    let e = w.exponent_sum(0);
    if e != 0 {
        return Err(Error::NonzeroTExponent(e));
    }
    let (core, outer) = cyclic_reduce(w);
    let (lo, hi) = t_path_range(&core);
    if hi - lo > n {
        return Ok(TRangeOutcome::Fail { range: hi - lo });
    }
    // w = outer · core · outer⁻¹; shift the core's path by −lo.
    let shift = Word::gen_power(0, -lo);
    let word = core.conjugate_by(&shift);
    let conjugator = shift.mul(&outer.inverse());
    debug_assert_eq!(w.conjugate_by(&conjugator), word);
    Ok(TRangeOutcome::Conjugated { word, conjugator })
}
