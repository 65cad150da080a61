//! Truncated relation-range scans: every length is In (pinned witness), Out
//! (all relations of that length filled by shorter ones) or Unknown.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::ball::{ball, ball_cached, relations_from_ball, Ball};
use crate::cayley::fill::{fill_with_pool, FillOutcome, FillPool};
use crate::certify::certificate::{verify_certificate, Certificate};
use crate::certify::greendlinger::greendlinger_new_relator;
use crate::certify::witness::{verify_quotient_witness, CheckMode, QuotientWitness, WitnessVerdict};
use crate::certify::{DEFAULT_EXHAUSTIVE, DEFAULT_SAMPLES};
use crate::constructions::witnesses::{bracket_witness, shifted_word, wreath_witness};
use crate::error::{Error, Result};
use crate::freewords::{GroupHom, Letter, Word};
use crate::oracles::basic::free_on;
use crate::oracles::catalog::{parse_call, parse_module, sc_relators};
use crate::oracles::companion::ModuleKind;
use crate::oracles::graph_product::partial_wreath_group;
use crate::oracles::{parse_group, MarkedGroup};
use crate::scalesets::{classify, ClassificationVerdict, Scale, ScaleSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub max_length: usize,
    pub ball_radius: Option<usize>,
    pub fill_area: usize,
    pub exhaustive_up_to: usize,
    pub samples: usize,
    pub seed: u64,
    /// Where Cayley balls are cached; `None` disables the cache.
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

impl ScanOptions {
    pub fn new(max_length: usize) -> Self {
        ScanOptions {
            max_length,
            ball_radius: None,
            fill_area: 64,
            exhaustive_up_to: DEFAULT_EXHAUSTIVE,
            samples: DEFAULT_SAMPLES,
            seed: 1,
            cache_dir: None,
        }
    }

    fn ball(&self, g: &MarkedGroup, radius: usize) -> Result<Ball> {
        match &self.cache_dir {
            Some(dir) => ball_cached(g, radius, dir),
            None => ball(g, radius),
        }
    }

    /// Longest length whose relations are enumerated.
    fn enumerated(&self) -> usize {
        let l = self.max_length.min(self.exhaustive_up_to);
        match self.ball_radius {
            Some(r) => l.min(2 * r),
            None => l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowVerdict {
    In,
    Out,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub verdict: RowVerdict,
    pub method: String,
    /// Relations of length `n` checked (Out) or kernel relations checked (In).
    pub checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessInterval {
    pub method: String,
    pub lo: usize,
    pub hi: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub group: String,
    pub options: ScanOptions,
    pub rows: Vec<ScanRow>,
    pub intervals: Vec<WitnessInterval>,
    pub in_set: ScaleSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationVerdict>,
}

impl ScanResult {
    pub fn lengths(&self, v: RowVerdict) -> Vec<usize> {
        self.rows.iter().filter(|r| r.verdict == v).map(|r| r.n).collect()
    }

    pub fn has_unknown(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == RowVerdict::Unknown)
    }
}

/// A candidate new relation with its certificate.
#[derive(Clone, Debug)]
pub enum Pinned {
    Witness { method: String, witness: QuotientWitness },
    Greendlinger(Certificate),
}

impl Pinned {
    fn length(&self) -> usize {
        match self {
            Pinned::Witness { witness, .. } => witness.word.len(),
            Pinned::Greendlinger(c) => c.n,
        }
    }

    fn certificate(&self) -> Certificate {
        match self {
            Pinned::Witness { method, witness } => Certificate::from_witness(method, witness),
            Pinned::Greendlinger(c) => c.clone(),
        }
    }

    fn verify(&self) -> Result<WitnessVerdict> {
        match self {
            Pinned::Witness { witness, .. } => Ok(verify_quotient_witness(witness)),
            Pinned::Greendlinger(c) => verify_certificate(c, None),
        }
    }
}

fn kernel_mode(len: usize, opts: &ScanOptions, lemma: Option<crate::certify::StructuralLemma>) -> CheckMode {
    match lemma {
        Some(lemma) if len - 1 > opts.exhaustive_up_to => {
            CheckMode::Structural { lemma, bound: opts.exhaustive_up_to, samples: opts.samples, seed: opts.seed }
        }
        _ => CheckMode::Exhaustive { bound: len - 1 },
    }
}

/// Witnesses whose interval is a single length `≤ max_length`.
pub fn pinned_witnesses(g: &MarkedGroup, relations: &[Word], opts: &ScanOptions) -> Result<Vec<Pinned>> {
    let spec = g.spec().to_string();
    let mut out = Vec::new();
    if let Some(shortest) = relations.first() {
        let letters: String = g.alphabet().names().iter().collect();
        out.push(Pinned::Witness {
            method: "shortest".into(),
            witness: QuotientWitness {
                source: g.clone(),
                quotient: MarkedGroup::new(format!("freeon({letters})"), format!("F({letters})"), free_on(g.alphabet().clone())),
                hom: None,
                word: shortest.clone(),
                n: shortest.len(),
                mode: CheckMode::Exhaustive { bound: shortest.len() - 1 },
                module: parse_module(&spec).ok(),
            },
        });
    }
    let call = parse_call(&spec)?;
    match call.name.as_str() {
        "wreath" => {
            let module = parse_module(&spec)?;
            for n in 1.. {
                if 4 * n + 4 > opts.max_length as i64 {
                    break;
                }
                let mut r = wreath_witness(&module, n)?;
                r.witness.mode = kernel_mode(r.witness.n, opts, Some(crate::certify::StructuralLemma::Wreath));
                out.push(Pinned::Witness { method: "wreath".into(), witness: r.witness });
            }
        }
        "partial_wreath" => {
            let set: BTreeSet<i64> = call.positional.iter().filter_map(|s| s.parse().ok()).collect();
            for &n in &set {
                let len = 4 * n as usize + 4;
                if len > opts.max_length {
                    continue;
                }
                let lower: BTreeSet<i64> = set.range(..n).copied().collect();
                let x = Word::gen_power(1, 1);
                out.push(Pinned::Witness {
                    method: "partial_wreath".into(),
                    witness: QuotientWitness {
                        source: g.clone(),
                        quotient: partial_wreath_group(&lower, None),
                        hom: None,
                        word: shifted_word(0, n).commutator(&x),
                        n: len,
                        mode: kernel_mode(len, opts, Some(crate::certify::StructuralLemma::Wreath)),
                        module: None,
                    },
                });
            }
        }
        "sc" => {
            let (alphabet, relators) = sc_relators(&spec)?;
            for r in relators.iter().filter(|r| r.len() <= opts.max_length) {
                let shorter: Vec<Word> = relators.iter().filter(|s| s.len() < r.len()).cloned().collect();
                let cert = greendlinger_new_relator(alphabet.len(), r, &shorter)?;
                out.push(Pinned::Greendlinger(Certificate::greendlinger(&spec, &alphabet, r, cert.max_overlap)));
            }
        }
        "graph_product" if call.get("file").is_none() => {
            let factors = call.positional.iter().map(|t| parse_group(t)).collect::<Result<Vec<_>>>()?;
            let mut offset = 0usize;
            for (v, f) in factors.iter().enumerate() {
                let rels = factor_relations(f, opts)?;
                for p in pinned_witnesses(f, &rels, opts)? {
                    if let Pinned::Witness { method, witness } = p {
                        out.push(Pinned::Witness { method: format!("{method}@{v}"), witness: lift_to_product(g, &factors, v, offset, witness)? });
                    }
                }
                offset += f.alphabet().len();
            }
        }
        _ => {}
    }
    Ok(out)
}

fn factor_relations(f: &MarkedGroup, opts: &ScanOptions) -> Result<Vec<Word>> {
    let l = opts.enumerated();
    let b = opts.ball(f, l.div_ceil(2))?;
    Ok(relations_from_ball(&b, l))
}

/// Moves a factor witness into the product: the word is embedded, the
/// quotient map precomposed with the retraction onto the factor.
fn lift_to_product(g: &MarkedGroup, factors: &[MarkedGroup], v: usize, offset: usize, qw: QuotientWitness) -> Result<QuotientWitness> {
    let mut images = Vec::new();
    for (u, f) in factors.iter().enumerate() {
        for gen in 0..f.alphabet().len() as u16 {
            let local = Word::gen_power(gen, 1);
            images.push(if u != v {
                Word::empty()
            } else {
                match &qw.hom {
                    Some(h) => h.apply(&local),
                    None => local,
                }
            });
        }
    }
    let hom = GroupHom::new(g.alphabet().clone(), qw.quotient.alphabet().clone(), images)?;
    let word = Word::reduced_from(qw.word.letters().iter().map(|l| Letter::new(l.gen + offset as u16, l.inv)));
    let len = word.len();
    let mode = match qw.mode {
        CheckMode::Structural { lemma, bound, samples, seed } => CheckMode::Structural { lemma, bound, samples, seed },
        _ => CheckMode::Exhaustive { bound: len - 1 },
    };
    Ok(QuotientWitness { source: g.clone(), quotient: qw.quotient, hom: Some(hom), word, n: qw.n, mode, module: None })
}

/// Cyclically reduced relations of length exactly `n`, one per rotation/inversion class.
fn cyclic_classes(relations: &[Word], n: usize) -> Vec<Word> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for w in relations.iter().filter(|w| w.len() == n && w.is_cyclically_reduced()) {
        let canon = (0..n).flat_map(|i| [w.rotate(i), w.inverse().rotate(i)]).min().expect("nonempty");
        if seen.insert(canon.clone()) {
            out.push(canon);
        }
    }
    out
}

pub fn scan(spec: &str, opts: &ScanOptions, c: Option<Scale>) -> Result<ScanResult> {
    let g = parse_group(spec)?;
    let enumerated = opts.enumerated();
    let relations = if enumerated > 0 {
        let b = opts.ball(&g, enumerated.div_ceil(2))?;
        relations_from_ball(&b, enumerated)
    } else {
        Vec::new()
    };
    let mut pinned: BTreeMap<usize, (String, Certificate, usize)> = BTreeMap::new();
    let mut intervals = Vec::new();
    for p in pinned_witnesses(&g, &relations, opts)? {
        let len = p.length();
        if pinned.contains_key(&len) {
            continue;
        }
        if let WitnessVerdict::Valid { lo, hi, checked, .. } = p.verify()? {
            if lo == hi {
                let cert = p.certificate();
                pinned.insert(len, (cert.method.clone(), cert, checked));
            }
        }
    }
    if let Ok(module) = parse_module(spec) {
        if matches!(module.kind, ModuleKind::Rational { .. }) {
            for n in 1.. {
                let Ok(r) = bracket_witness(&module, n) else { break };
                if r.witness.word.len() > opts.max_length {
                    break;
                }
                if r.verify().is_valid() {
                    let (lo, hi) = r.interval();
                    intervals.push(WitnessInterval { method: "bracket".into(), lo, hi });
                }
            }
        }
    }
    let gens = g.alphabet().len();
    let mut rows = Vec::new();
    for n in 1..=opts.max_length {
        if let Some((method, cert, checked)) = pinned.remove(&n) {
            rows.push(ScanRow { n, verdict: RowVerdict::In, method, checked, certificate: Some(cert), note: None });
            continue;
        }
        if n > enumerated {
            let note = intervals.iter().find(|i| i.lo <= n && n <= i.hi).map(|i| format!("{} interval [{}, {}]", i.method, i.lo, i.hi));
            rows.push(ScanRow { n, verdict: RowVerdict::Unknown, method: "none".into(), checked: 0, certificate: None, note });
            continue;
        }
        let shorter: Vec<Word> = relations.iter().filter(|w| w.len() < n).cloned().collect();
        let pool = FillPool::new(gens, &shorter, n - 1);
        let targets = cyclic_classes(&relations, n);
        let outcomes: Vec<Result<FillOutcome>> = targets.par_iter().map(|w| fill_with_pool(&g, w, n - 1, &pool, opts.fill_area)).collect();
        let mut unfilled = None;
        for (w, o) in targets.iter().zip(outcomes) {
            match o {
                Ok(FillOutcome::Filled(_)) => {}
                Ok(FillOutcome::NotFilledWithinBudget) => {
                    unfilled = Some(format!("{} not filled", g.format(w)));
                    break;
                }
                Err(Error::OracleUnknown(m)) | Err(Error::BudgetExceeded(m)) => {
                    unfilled = Some(m);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        rows.push(match unfilled {
            None => ScanRow { n, verdict: RowVerdict::Out, method: "fill".into(), checked: targets.len(), certificate: None, note: None },
            Some(note) => ScanRow { n, verdict: RowVerdict::Unknown, method: "fill".into(), checked: 0, certificate: None, note: Some(note) },
        });
    }
    let window = rows.iter().filter(|r| r.verdict != RowVerdict::Unknown).map(|r| r.n).max().unwrap_or(0) as u64;
    let window = window.max(rows.iter().filter(|r| r.verdict == RowVerdict::In).map(|r| r.n as u64).max().unwrap_or(0));
    let in_set = ScaleSet::new(rows.iter().filter(|r| r.verdict == RowVerdict::In).map(|r| r.n as u64), window)?;
    // The classified window must stay within the certified one: c·hi ≤ window.
    let classification = match c {
        Some(c) => {
            let hi = (*c.denom() as u128 * window as u128 / (*c.numer()).max(1) as u128) as u64;
            if hi >= 1 { Some(classify(&in_set, c, (1, hi))?) } else { None }
        }
        None => None,
    };
    Ok(ScanResult { group: g.spec().to_string(), options: opts.clone(), rows, intervals, in_set, classification })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lamplighter_to_nine() {
        let r = scan("wreath(c2,z)", &ScanOptions::new(9), None).unwrap();
        assert_eq!(r.lengths(RowVerdict::In), vec![2, 8]);
        assert_eq!(r.lengths(RowVerdict::Out), vec![1, 3, 4, 5, 6, 7, 9]);
    }

    #[test]
    fn abelian_and_free() {
        let r = scan("zd(2)", &ScanOptions::new(6), None).unwrap();
        assert_eq!(r.lengths(RowVerdict::In), vec![4]);
        assert_eq!(r.lengths(RowVerdict::Out), vec![1, 2, 3, 5, 6]);
        let f = scan("free(2)", &ScanOptions::new(12), None).unwrap();
        assert_eq!(f.lengths(RowVerdict::Out).len(), 12);
    }
}
