//! Relation-range witnesses for wreath products and abelian-by-cyclic groups.

use serde::{Deserialize, Serialize};

use crate::certify::witness::{verify_quotient_witness, CheckMode, QuotientWitness, StructuralLemma, WitnessVerdict};
use crate::certify::{DEFAULT_EXHAUSTIVE, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::freewords::{Alphabet, GroupHom, Letter, Word};
use crate::oracles::companion::{ModVec, ModuleGroupSpec, ModuleKind};
use crate::oracles::graph_product::gamma_group;
use crate::oracles::hnn::{gn_base, gn_group};
use crate::oracles::{check_law, LawCheck, MarkedGroup, Verdict3};

/// A witness together with the interval it certifies.
#[derive(Clone, Debug)]
pub struct RangeWitnessReport {
    pub method: String,
    pub param: i64,
    pub witness: QuotientWitness,
}

impl RangeWitnessReport {
    pub fn group(&self) -> &str {
        self.witness.source.spec()
    }

    /// `[lo, hi]` claimed to meet the relation range.
    pub fn interval(&self) -> (usize, usize) {
        (self.witness.n, self.witness.word.len())
    }

    pub fn verify(&self) -> WitnessVerdict {
        verify_quotient_witness(&self.witness)
    }
}

fn structural(lemma: StructuralLemma, seed: u64) -> CheckMode {
    CheckMode::Structural { lemma, bound: DEFAULT_EXHAUSTIVE, samples: DEFAULT_SAMPLES, seed }
}

/// `t^k m_j t^{−k}` as a word.
pub fn shifted_word(j: usize, k: i64) -> Word {
    Word::product([&Word::gen_power(0, k), &Word::gen_power(j as u16 + 1, 1), &Word::gen_power(0, -k)])
}

/// `[tⁿ x t⁻ⁿ, x]` against `Γ_{n−1}`; every relation shorter than `4n+4` dies there.
pub fn wreath_witness(spec: &ModuleGroupSpec, n: i64) -> Result<RangeWitnessReport> {
    let ModuleKind::Lamp { q } = spec.kind else {
        return Err(Error::ParamError(format!("{} is not a wreath product", spec.spec)));
    };
    if n < 1 {
        return Err(Error::ParamError("wreath witness needs n ≥ 1".into()));
    }
    let x = Word::gen_power(1, 1);
    let word = shifted_word(0, n).commutator(&x);
    let len = word.len();
    let mode = if len - 1 <= DEFAULT_EXHAUSTIVE {
        CheckMode::Exhaustive { bound: len - 1 }
    } else {
        structural(StructuralLemma::Wreath, n as u64)
    };
    Ok(RangeWitnessReport {
        method: "wreath".into(),
        param: n,
        witness: QuotientWitness {
            source: spec.group(),
            quotient: gamma_group(q, n - 1),
            hom: None,
            word,
            n: len,
            mode,
            module: Some(spec.clone()),
        },
    })
}

pub fn mrange_membership(spec: &ModuleGroupSpec, v: &ModVec, u: i64, v_hi: i64) -> bool {
    spec.mrange_contains(v, u, v_hi)
}

/// Smallest `(i, j)` (0-based lamp indices) with `m_i ∉ M_[1,n]` and `m_j^[n] ∉ M_[0,n−1]`.
pub fn lemma_ij_indices(spec: &ModuleGroupSpec, n: i64) -> Result<(usize, usize)> {
    if n < 1 {
        return Err(Error::ParamError("n ≥ 1 required".into()));
    }
    let k = spec.lamp_count();
    let i = (0..k).find(|&i| !spec.mrange_contains(&spec.shifted(i, 0), 1, n));
    let j = (0..k).find(|&j| !spec.mrange_contains(&spec.shifted(j, n), 0, n - 1));
    match (i, j) {
        (Some(i), Some(j)) => Ok((i, j)),
        (None, _) => Err(Error::ContractionDetected(format!("M_[1,{n}] = M_[0,{n}] for {}", spec.spec))),
        (_, None) => Err(Error::ContractionDetected(format!("M_[0,{}] = M_[0,{n}] for {}", n - 1, spec.spec))),
    }
}

/// `[m_i, t^{n+1} m_j t^{−(n+1)}]`: trivial in `G`, not in `G_n`.
pub fn bracket_witness(spec: &ModuleGroupSpec, n: i64) -> Result<RangeWitnessReport> {
    let (i, j) = lemma_ij_indices(spec, n)?;
    let word = shifted_word(i, 0).commutator(&shifted_word(j, n + 1));
    Ok(RangeWitnessReport {
        method: "bracket".into(),
        param: n,
        witness: QuotientWitness {
            source: spec.group(),
            quotient: gn_group(spec, n)?,
            hom: None,
            word,
            n: (2 * n + 4) as usize,
            mode: structural(StructuralLemma::TRange { window: n }, n as u64),
            module: Some(spec.clone()),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreePairReport {
    pub a: String,
    pub b: String,
    pub sweep_len: usize,
    pub checked: usize,
    /// First `{a,b}`-word found trivial in `G_n`, if any.
    pub trivial: Option<String>,
}

/// Every nonempty reduced word over `{a, b}` of length `≤ max_len`.
pub fn reduced_pair_words(max_len: usize) -> Vec<Vec<Letter>> {
    let mut out: Vec<Vec<Letter>> = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for key in 0..4 {
                let l = Letter::from_key(key);
                if w.last() != Some(&l.inverse()) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn free_pair_words(spec: &ModuleGroupSpec, n: i64) -> Result<(Word, Word)> {
    let (i, j) = lemma_ij_indices(spec, n)?;
    let a = shifted_word(i, -2).mul(&shifted_word(j, n - 1));
    let b = shifted_word(i, 0).mul(&shifted_word(j, n + 1));
    Ok((a, b))
}

/// Britton sweep of all reduced `{a,b}`-words up to `sweep_len` in `G_n`.
pub fn free_pair(spec: &ModuleGroupSpec, n: i64, sweep_len: usize) -> Result<FreePairReport> {
    let (a, b) = free_pair_words(spec, n)?;
    let base = gn_base(spec, n)?;
    let hom = pair_hom(&spec.alphabet, &a, &b)?;
    let words = reduced_pair_words(sweep_len);
    let mut trivial = None;
    for w in &words {
        let img = hom.apply(&Word::reduced_from(w.iter().copied()));
        if base.trivial(&img) {
            trivial = Some(Alphabet::from_str_static("ab").format(&Word::reduced_from(w.iter().copied())));
            break;
        }
    }
    Ok(FreePairReport {
        a: spec.alphabet.format(&a),
        b: spec.alphabet.format(&b),
        sweep_len,
        checked: words.len(),
        trivial,
    })
}

fn pair_hom(target: &Alphabet, a: &Word, b: &Word) -> Result<GroupHom> {
    GroupHom::new(Alphabet::from_str_static("ab"), target.clone(), vec![a.clone(), b.clone()])
}

/// Law value at `x_m ↦ aᵐ bᵐ`; length at most `2kℓ(2n+4)`.
pub fn law_witness(g: &MarkedGroup, spec: Option<&ModuleGroupSpec>, law: &Word, vars: usize, n: i64) -> Result<RangeWitnessReport> {
    match check_law(g, law, vars, 200, 12, 0x1a3)? {
        LawCheck::Holds { .. } => {}
        LawCheck::Violated { witness } => {
            return Err(Error::LawViolated(format!("{} at ({})", g.spec(), witness.join(", "))));
        }
    }
    let spec = spec.ok_or_else(|| Error::ParamError(format!("{} is not abelian-by-cyclic", g.spec())))?;
    let (a, b) = free_pair_words(spec, n)?;
    let var_alpha = Alphabet::new((0..vars).map(|i| (b'a' + i as u8) as char))?;
    let images: Vec<Word> = (1..=vars as i64).map(|m| a.pow(m).mul(&b.pow(m))).collect();
    let word = GroupHom::new(var_alpha, spec.alphabet.clone(), images)?.apply(law);
    let bound = 2 * vars * law.len() * (2 * n as usize + 4);
    if word.len() > bound {
        return Err(Error::ParamError(format!("law value of length {} exceeds {bound}", word.len())));
    }
    if g.is_identity(&word) != Verdict3::True {
        return Err(Error::LawViolated(format!("substituted law is nontrivial in {}", g.spec())));
    }
    Ok(RangeWitnessReport {
        method: "law".into(),
        param: n,
        witness: QuotientWitness {
            source: spec.group(),
            quotient: gn_group(spec, n)?,
            hom: None,
            word,
            n: (2 * n + 4) as usize,
            mode: structural(StructuralLemma::TRange { window: n }, n as u64),
            module: Some(spec.clone()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::companion::rat;
    use crate::oracles::metabelian_law;
    use crate::oracles::wreath::{wreath_module, LampBase};

    fn comp() -> ModuleGroupSpec {
        ModuleGroupSpec::companion(2, 3, 1).unwrap()
    }

    #[test]
    fn lemma_indices() {
        assert_eq!(lemma_ij_indices(&comp(), 2).unwrap(), (0, 0));
        assert!(!mrange_membership(&comp(), &ModVec::Rat(vec![rat(1, 1)]), 1, 2));
        assert!(!mrange_membership(&comp(), &ModVec::Rat(vec![rat(9, 4)]), 0, 1));
        let bs12 = ModuleGroupSpec::bs_module(1, 2).unwrap();
        assert!(matches!(lemma_ij_indices(&bs12, 3), Err(Error::ContractionDetected(_))));
        assert_eq!(lemma_ij_indices(&wreath_module(LampBase::Cyclic(2)), 3).unwrap(), (0, 0));
    }

    #[test]
    fn bracket_lengths() {
        let r = bracket_witness(&comp(), 2).unwrap();
        assert_eq!(comp().alphabet.format(&r.witness.word), "xtttxTTTXtttXTTT");
        assert_eq!(r.interval(), (8, 16));
        let w = bracket_witness(&wreath_module(LampBase::Cyclic(2)), 1).unwrap();
        assert_eq!(w.interval(), (6, 12));
        assert!(bracket_witness(&ModuleGroupSpec::bs_module(1, 2).unwrap(), 1).is_err());
    }

    #[test]
    fn bracket_verifies() {
        assert!(bracket_witness(&comp(), 1).unwrap().verify().is_valid());
    }

    #[test]
    fn wreath_n1() {
        let r = wreath_witness(&wreath_module(LampBase::Cyclic(2)), 1).unwrap();
        assert_eq!(r.interval(), (8, 8));
        assert!(r.verify().is_valid());
    }

    #[test]
    fn free_pair_sweep() {
        assert_eq!(reduced_pair_words(6).len(), 1456);
        let (a, b) = free_pair_words(&comp(), 2).unwrap();
        assert_eq!(comp().alphabet.format(&a), "TTxtttxT");
        assert_eq!((a.len(), b.len()), (8, 8));
        let rep = free_pair(&comp(), 2, 6).unwrap();
        assert_eq!(rep.trivial, None);
    }

    #[test]
    fn law_bound_and_free_violation() {
        let spec = comp();
        let r = law_witness(&spec.group(), Some(&spec), &metabelian_law(), 4, 1).unwrap();
        assert!(r.witness.word.len() <= 768);
        let f = crate::oracles::basic::free_group(2).unwrap();
        assert!(matches!(law_witness(&f, None, &metabelian_law(), 4, 1), Err(Error::LawViolated(_))));
    }
}
