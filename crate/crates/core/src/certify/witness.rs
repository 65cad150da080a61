//! Quotient witnesses: `w` is a relation of `G`, not of `Q`, and every relation
//! of `G` of length `< n` holds in `Q`; then a new relation of `G` has length in `[n, |w|]`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cayley::ball::{ball_capped, enumerate_relations, Ball};
use crate::error::{Error, Result};
use crate::freewords::{GroupHom, Letter, Word};
use crate::oracles::companion::{ModVec, ModuleGroupSpec, ModuleKind};
use crate::oracles::{random_word_exact, MarkedGroup, Verdict3};

use super::trange::{trange_reduce, TRangeOutcome};

/// Default bound for exhaustive kernel checks.
pub const DEFAULT_EXHAUSTIVE: usize = 12;
/// Default number of sampled relations above the exhaustive bound.
pub const DEFAULT_SAMPLES: usize = 500;

const SAMPLER_BALL_CAP: usize = 400_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "snake_case")]
pub enum StructuralLemma {
    /// Relations of a wreath product of length `< n` hold in the window graph product.
    Wreath,
    /// Relations of `M ⋊ ℤ` of length `≤ 2k+3` conjugate into `[0, k]` and hold in `G_k`.
    TRange { window: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive { bound: usize },
    Sampled { count: usize, seed: u64 },
    /// Exhaustive up to `bound`, then the lemma's per-word check on `samples` random relations.
    Structural { lemma: StructuralLemma, bound: usize, samples: usize, seed: u64 },
}

impl CheckMode {
    pub fn label(&self) -> &'static str {
        match self {
            CheckMode::Sampled { .. } => "supported",
            _ => "certified",
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuotientWitness {
    pub source: MarkedGroup,
    pub quotient: MarkedGroup,
    /// Letter images in the quotient alphabet; `None` is the identity on letters.
    pub hom: Option<GroupHom>,
    pub word: Word,
    pub n: usize,
    pub mode: CheckMode,
    /// Module data of the source when it is `M ⋊ ℤ`, used by the samplers.
    pub module: Option<ModuleGroupSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WitnessVerdict {
    Valid { lo: usize, hi: usize, label: String, checked: usize },
    Invalid { reason: String },
    Undecided { reason: String },
}

impl WitnessVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, WitnessVerdict::Valid { .. })
    }
}

impl QuotientWitness {
    fn image(&self, w: &Word) -> Word {
        match &self.hom {
            Some(h) => h.apply(w),
            None => w.clone(),
        }
    }

    /// `Some(reason)` if a relation fails to die in the quotient.
    fn check_relation(&self, r: &Word) -> Result<Option<String>> {
        if let CheckMode::Structural { lemma: StructuralLemma::TRange { window }, .. } = &self.mode {
            match trange_reduce(r, *window)? {
                TRangeOutcome::Conjugated { word, .. } => {
                    return Ok(match self.quotient.is_identity(&self.image(&word)) {
                        Verdict3::True => None,
                        _ => Some(format!("t-range form of {} is nontrivial in {}", self.source.format(r), self.quotient.spec())),
                    });
                }
                TRangeOutcome::Fail { range } => {
                    return Ok(Some(format!("{} has t-range {range} > {window}", self.source.format(r))));
                }
            }
        }
        Ok(match self.quotient.is_identity(&self.image(r)) {
            Verdict3::True => None,
            Verdict3::False => Some(format!("relation {} is nontrivial in {}", self.source.format(r), self.quotient.spec())),
            Verdict3::Unknown { .. } => return Err(Error::OracleUnknown(format!("image of {}", self.source.format(r)))),
        })
    }
}

pub fn verify_quotient_witness(qw: &QuotientWitness) -> WitnessVerdict {
    match verify_inner(qw) {
        Ok(v) => v,
        Err(Error::OracleUnknown(m)) | Err(Error::BudgetExceeded(m)) => WitnessVerdict::Undecided { reason: m },
        Err(e) => WitnessVerdict::Invalid { reason: e.to_string() },
    }
}

fn verify_inner(qw: &QuotientWitness) -> Result<WitnessVerdict> {
    let g = &qw.source;
    match g.is_identity(&qw.word) {
        Verdict3::True => {}
        Verdict3::False => return Ok(WitnessVerdict::Invalid { reason: format!("{} is not a relation of {}", g.format(&qw.word), g.spec()) }),
        Verdict3::Unknown { .. } => return Ok(WitnessVerdict::Undecided { reason: "source oracle undecided".into() }),
    }
    match qw.quotient.is_identity(&qw.image(&qw.word)) {
        Verdict3::False => {}
        Verdict3::True => {
            return Ok(WitnessVerdict::Invalid { reason: format!("{} is a relation of {}", g.format(&qw.word), qw.quotient.spec()) })
        }
        Verdict3::Unknown { .. } => return Ok(WitnessVerdict::Undecided { reason: "quotient oracle undecided".into() }),
    }
    if qw.n == 0 || qw.n > qw.word.len() {
        return Ok(WitnessVerdict::Invalid { reason: format!("claimed length {} outside [1, {}]", qw.n, qw.word.len()) });
    }
    let need = qw.n - 1;
    let mut checked = 0usize;
    let exhaustive_to = match &qw.mode {
        CheckMode::Exhaustive { bound } => {
            if *bound < need {
                return Ok(WitnessVerdict::Undecided { reason: format!("exhaustive bound {bound} < {need}") });
            }
            need
        }
        CheckMode::Structural { bound, .. } => need.min(*bound),
        CheckMode::Sampled { .. } => need.min(8),
    };
    let short = if exhaustive_to > 0 { enumerate_relations(g, exhaustive_to)? } else { Vec::new() };
    for r in &short {
        if let Some(reason) = qw.check_relation(r)? {
            return Ok(WitnessVerdict::Invalid { reason });
        }
        checked += 1;
    }
    let sampled = match &qw.mode {
        CheckMode::Exhaustive { .. } => None,
        CheckMode::Structural { samples, seed, .. } => (need > exhaustive_to).then_some((*samples, *seed)),
        CheckMode::Sampled { count, seed } => (need > exhaustive_to).then_some((*count, *seed)),
    };
    if let Some((count, seed)) = sampled {
        let lo = if matches!(qw.mode, CheckMode::Sampled { .. }) { 1 } else { exhaustive_to + 1 };
        let even = qw.module.as_ref().is_some_and(even_relations);
        if even && (lo..=need).all(|l| l % 2 == 1) {
            return Ok(WitnessVerdict::Valid { lo: qw.n, hi: qw.word.len(), label: qw.mode.label().into(), checked });
        }
        let rels = sample_relations(g, qw.module.as_ref(), &short, lo, need, count, seed)?;
        if rels.len() < count {
            return Ok(WitnessVerdict::Undecided { reason: format!("only {} of {count} sampled relations found", rels.len()) });
        }
        for r in &rels {
            if let Some(reason) = qw.check_relation(r)? {
                return Ok(WitnessVerdict::Invalid { reason });
            }
            checked += 1;
        }
    }
    Ok(WitnessVerdict::Valid { lo: qw.n, hi: qw.word.len(), label: qw.mode.label().into(), checked })
}

/// Shortest word for a lamp configuration: sweep left then right, or right then
/// left, whichever is shorter.
pub fn lamp_canonical_word(q: u64, lamps: &BTreeMap<i64, i64>, cursor: i64) -> Word {
    let lo = lamps.keys().next().copied().unwrap_or(0).min(0).min(cursor);
    let hi = lamps.keys().next_back().copied().unwrap_or(0).max(0).max(cursor);
    let lamp = |e: i64| -> Word {
        let e = if q == 0 {
            e
        } else {
            let r = e.rem_euclid(q as i64);
            if 2 * r > q as i64 {
                r - q as i64
            } else {
                r
            }
        };
        Word::gen_power(1, e)
    };
    let sweep = |from: i64, to: i64| -> Word {
        let step = if to >= from { 1 } else { -1 };
        let mut w = Word::empty();
        let mut p = from;
        loop {
            if let Some(&e) = lamps.get(&p) {
                w = w.mul(&lamp(e));
            }
            if p == to {
                break;
            }
            w = w.mul(&Word::gen_power(0, step));
            p += step;
        }
        w
    };
    let a = Word::product([&Word::gen_power(0, lo), &sweep(lo, hi), &Word::gen_power(0, cursor - hi)]);
    let b = Word::product([&Word::gen_power(0, hi), &sweep(hi, lo), &Word::gen_power(0, cursor - lo)]);
    if b.len() < a.len() {
        b
    } else {
        a
    }
}

/// Random relations of `g` with length in `[lo, hi]`.
///
/// Lamp modules use `u · canonical(u)⁻¹`; otherwise `u · geodesic(u)⁻¹` from a
/// ball, falling back to products of conjugates of `short`.
/// Whether word length mod 2 is a homomorphism, so every relation has even length.
pub fn even_relations(spec: &ModuleGroupSpec) -> bool {
    matches!(spec.kind, ModuleKind::Lamp { q } if q % 2 == 0)
}

pub fn sample_relations(
    g: &MarkedGroup,
    module: Option<&ModuleGroupSpec>,
    short: &[Word],
    lo: usize,
    hi: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Word>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if lo > hi {
        return Ok(out);
    }
    let attempts = 400 * count.max(1);
    if let Some(spec) = module.filter(|m| matches!(m.kind, ModuleKind::Lamp { .. })) {
        let ModuleKind::Lamp { q } = spec.kind else { unreachable!() };
        for _ in 0..attempts {
            if out.len() >= count {
                break;
            }
            let len = rng.gen_range(lo.div_ceil(2)..=hi);
            let u = random_word_exact(&mut rng, g.alphabet(), len);
            let (v, k) = spec.eval(&u);
            let ModVec::Lamp(lamps) = v else { unreachable!() };
            let r = u.mul(&lamp_canonical_word(q, &lamps, k).inverse());
            if (lo..=hi).contains(&r.len()) {
                out.push(r);
            }
        }
        return Ok(out);
    }
    let radius = hi.div_ceil(2);
    match ball_capped(g, radius, SAMPLER_BALL_CAP) {
        Ok(b) => sample_from_ball(&b, &mut rng, lo, hi, count, attempts, &mut out),
        Err(Error::BudgetExceeded(_)) => sample_products(short, g, &mut rng, lo, hi, count, attempts, &mut out),
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn sample_from_ball(b: &Ball, rng: &mut ChaCha8Rng, lo: usize, hi: usize, count: usize, attempts: usize, out: &mut Vec<Word>) {
    let letters = b.adjacency.first().map_or(0, Vec::len);
    for _ in 0..attempts {
        if out.len() >= count {
            break;
        }
        // Two random reduced walks of lengths summing to at most `hi`, joined at their endpoints.
        let len = rng.gen_range(lo.div_ceil(2)..=b.radius);
        let u = random_walk(b, rng, letters, len);
        let v = &b.vertices[b.walk(&u).expect("inside ball") as usize];
        let r = u.mul(&v.inverse());
        if (lo..=hi).contains(&r.len()) {
            out.push(r);
        }
    }
}

fn random_walk(b: &Ball, rng: &mut ChaCha8Rng, letters: usize, len: usize) -> Word {
    let mut keys: Vec<Letter> = Vec::with_capacity(len);
    let mut v = 0u64;
    while keys.len() < len {
        let l = Letter::from_key(rng.gen_range(0..letters));
        if keys.last() == Some(&l.inverse()) {
            continue;
        }
        match b.step(v, l) {
            Some(t) => {
                v = t;
                keys.push(l);
            }
            None => break,
        }
    }
    Word::reduced_from(keys)
}

#[allow(clippy::too_many_arguments)]
fn sample_products(
    short: &[Word],
    g: &MarkedGroup,
    rng: &mut ChaCha8Rng,
    lo: usize,
    hi: usize,
    count: usize,
    attempts: usize,
    out: &mut Vec<Word>,
) {
    if short.is_empty() {
        return;
    }
    for _ in 0..attempts {
        if out.len() >= count {
            break;
        }
        let mut w = Word::empty();
        for _ in 0..rng.gen_range(1..=3) {
            let r = short.choose(rng).expect("nonempty");
            let clen = rng.gen_range(0..=hi / 2);
            let c = random_word_exact(rng, g.alphabet(), clen);
            w = w.mul(&r.conjugate_by(&c));
        }
        if (lo..=hi).contains(&w.len()) {
            out.push(w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::graph_product::gamma_group;
    use crate::oracles::wreath::{wreath_group, wreath_module, LampBase};

    fn wreath_witness(w: &str, n: usize, q_window: i64, mode: CheckMode) -> QuotientWitness {
        let g = wreath_group(LampBase::Cyclic(2));
        let word = g.parse(w).unwrap();
        QuotientWitness {
            source: g,
            quotient: gamma_group(2, q_window),
            hom: None,
            word,
            n,
            mode,
            module: Some(wreath_module(LampBase::Cyclic(2))),
        }
    }

    #[test]
    fn lamplighter_witnesses() {
        let qw = wreath_witness("ttxTTxttXTTX", 12, 1, CheckMode::Exhaustive { bound: 11 });
        assert!(verify_quotient_witness(&qw).is_valid());
        let bad = wreath_witness("txTxtXTX", 8, 1, CheckMode::Exhaustive { bound: 7 });
        assert!(matches!(verify_quotient_witness(&bad), WitnessVerdict::Invalid { .. }));
        let short_bound = wreath_witness("ttxTTxttXTTX", 12, 1, CheckMode::Exhaustive { bound: 6 });
        assert!(matches!(verify_quotient_witness(&short_bound), WitnessVerdict::Undecided { .. }));
        // Claiming more than is true: Γ₀ kills nothing of length 8.
        let over = wreath_witness("ttxTTxttXTTX", 12, 0, CheckMode::Exhaustive { bound: 11 });
        assert!(matches!(verify_quotient_witness(&over), WitnessVerdict::Invalid { .. }));
    }

    #[test]
    fn canonical_lamp_words_evaluate_correctly() {
        let spec = wreath_module(LampBase::Integers);
        let g = spec.group();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let u = random_word_exact(&mut rng, g.alphabet(), 10);
            let (v, k) = spec.eval(&u);
            let ModVec::Lamp(lamps) = &v else { unreachable!() };
            let c = lamp_canonical_word(0, lamps, k);
            assert_eq!(spec.eval(&c), (v.clone(), k));
            assert!(c.len() <= u.len() + 2 * 10);
        }
    }

    #[test]
    fn samplers_return_relations() {
        let g = wreath_group(LampBase::Integers);
        let m = wreath_module(LampBase::Integers);
        let rels = sample_relations(&g, Some(&m), &[], 13, 19, 50, 1).unwrap();
        assert_eq!(rels.len(), 50);
        assert!(rels.iter().all(|r| g.is_identity(r) == Verdict3::True && (13..=19).contains(&r.len())));
        let z2 = crate::oracles::basic::free_abelian(2).unwrap();
        let rels = sample_relations(&z2, None, &[], 6, 10, 20, 2).unwrap();
        assert_eq!(rels.len(), 20);
        assert!(rels.iter().all(|r| z2.is_identity(r) == Verdict3::True));
    }
}
