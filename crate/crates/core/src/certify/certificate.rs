//! Self-contained certificate files and their checker.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cayley::fill::FillingDiagram;
use crate::cayley::graphs::{homology_certificate, Graph, HomologyReport};
use crate::error::{Error, Result};
use crate::freewords::{Alphabet, GroupHom, Word};
use crate::oracles::catalog::{parse_module, sc_relators};
use crate::oracles::hnn::gn_base;
use crate::oracles::parse_group;

use super::filling::verify_filling;
use super::greendlinger::{greendlinger_new_relator, verify_greendlinger};
use super::trange::{trange_reduce, TRangeOutcome};
use super::witness::{verify_quotient_witness, CheckMode, QuotientWitness, WitnessVerdict, DEFAULT_EXHAUSTIVE};

pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    QuotientWitness,
    Greendlinger,
    Filling,
    BrittonNontrivial,
    Trange,
    Homology,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub conjugator: String,
    pub relator: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub version: u32,
    pub variant: Variant,
    pub method: String,
    pub group_spec: String,
    pub n: usize,
    pub word: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient_spec: Option<String>,
    /// Images of the source letters, in the quotient alphabet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_mode: Option<CheckMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<Piece>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<Vec<HomologyReport>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<Value>,
}

impl Certificate {
    fn bare(variant: Variant, method: &str, group_spec: &str, n: usize, word: String) -> Self {
        Certificate {
            version: VERSION,
            variant,
            method: method.into(),
            group_spec: group_spec.into(),
            n,
            word,
            quotient_spec: None,
            hom: None,
            check_mode: None,
            pieces: None,
            homology: None,
            overlap: None,
            interval: None,
            extra: None,
        }
    }

    pub fn from_witness(method: &str, qw: &QuotientWitness) -> Self {
        let mut c = Certificate::bare(Variant::QuotientWitness, method, qw.source.spec(), qw.n, qw.source.format(&qw.word));
        c.quotient_spec = Some(qw.quotient.spec().to_string());
        c.hom = qw.hom.as_ref().map(|h| {
            (0..qw.source.alphabet().len() as u16)
                .map(|g| qw.quotient.format(&h.apply(&Word::gen_power(g, 1))))
                .collect()
        });
        c.check_mode = Some(qw.mode.clone());
        c.interval = Some((qw.n, qw.word.len()));
        c
    }

    pub fn greendlinger(group_spec: &str, alphabet: &Alphabet, r: &Word, overlap: usize) -> Self {
        let mut c = Certificate::bare(Variant::Greendlinger, "greendlinger", group_spec, r.len(), alphabet.format(r));
        c.overlap = Some(overlap);
        c.interval = Some((r.len(), r.len()));
        c
    }

    pub fn filling(group_spec: &str, alphabet: &Alphabet, d: &FillingDiagram) -> Self {
        let mut c = Certificate::bare(Variant::Filling, "fill", group_spec, d.max_piece_len, alphabet.format(&d.target));
        c.pieces = Some(
            d.pieces
                .iter()
                .map(|(conj, r)| Piece { conjugator: alphabet.format(conj), relator: alphabet.format(r) })
                .collect(),
        );
        c
    }

    pub fn britton_pair(group_spec: &str, n: usize, a: &str, b: &str, sweep_len: usize) -> Self {
        let mut c = Certificate::bare(Variant::BrittonNontrivial, "free_pair", group_spec, n, String::new());
        c.extra = Some(serde_json::json!({ "a": a, "b": b, "sweep_len": sweep_len }));
        c
    }

    pub fn trange(group_spec: &str, n: usize, word: String) -> Self {
        Certificate::bare(Variant::Trange, "trange", group_spec, n, word)
    }

    pub fn homology(x: &Graph, n: usize, before: HomologyReport, at: HomologyReport) -> Self {
        let mut c = Certificate::bare(Variant::Homology, "homology", "graph", n, String::new());
        c.homology = Some(vec![before, at]);
        c.extra = Some(serde_json::json!({ "graph": x.to_file_string() }));
        c
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, location: &str) -> Result<Self> {
        let c: Certificate = serde_json::from_str(text).map_err(|e| Error::parse(location, e.to_string()))?;
        if c.version != VERSION {
            return Err(Error::parse(location, format!("unsupported version {}", c.version)));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Certificate::from_json(&text, &path.display().to_string())
    }
}

fn extra_str<'a>(c: &'a Certificate, key: &str) -> Result<&'a str> {
    c.extra
        .as_ref()
        .and_then(|e| e.get(key))
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse("certificate", format!("missing extra.{key}")))
}

fn invalid(reason: impl Into<String>) -> WitnessVerdict {
    WitnessVerdict::Invalid { reason: reason.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RequestedMode {
    Exhaustive,
    Sampled,
    Structural,
}

/// Check mode for re-verifying `cert` as requested by a user; `None` keeps the stored one.
///
/// Exhaustive covers every kernel length when that is at most
/// [`DEFAULT_EXHAUSTIVE`], otherwise it falls back to the stored structural
/// lemma, and without one it stops at the default bound (and so reports Undecided).
pub fn requested_mode(cert: &Certificate, mode: RequestedMode, samples: usize, seed: u64) -> Option<CheckMode> {
    if cert.variant != Variant::QuotientWitness {
        return None;
    }
    let lemma = match &cert.check_mode {
        Some(CheckMode::Structural { lemma, .. }) => Some(lemma.clone()),
        _ => None,
    };
    let kernel = cert.n.saturating_sub(1);
    Some(match (mode, lemma) {
        (RequestedMode::Exhaustive, _) if kernel <= DEFAULT_EXHAUSTIVE => CheckMode::Exhaustive { bound: kernel },
        (RequestedMode::Exhaustive | RequestedMode::Structural, Some(lemma)) => {
            CheckMode::Structural { lemma, bound: DEFAULT_EXHAUSTIVE, samples, seed }
        }
        (RequestedMode::Exhaustive, None) => CheckMode::Exhaustive { bound: DEFAULT_EXHAUSTIVE },
        (RequestedMode::Structural | RequestedMode::Sampled, _) => CheckMode::Sampled { count: samples, seed },
    })
}

/// Re-checks a certificate from its own contents; `mode` overrides a witness's stored check mode.
pub fn verify_certificate(c: &Certificate, mode: Option<CheckMode>) -> Result<WitnessVerdict> {
    match c.variant {
        Variant::QuotientWitness => {
            let source = parse_group(&c.group_spec)?;
            let quotient = parse_group(c.quotient_spec.as_deref().ok_or_else(|| Error::parse("certificate", "missing quotient_spec"))?)?;
            let hom = match &c.hom {
                Some(images) => {
                    let words = images.iter().map(|s| quotient.parse(s)).collect::<Result<Vec<_>>>()?;
                    Some(GroupHom::new(source.alphabet().clone(), quotient.alphabet().clone(), words)?)
                }
                None => {
                    if source.alphabet() != quotient.alphabet() {
                        return Ok(invalid("alphabets differ and no hom is given"));
                    }
                    None
                }
            };
            let mode = mode.or_else(|| c.check_mode.clone()).ok_or_else(|| Error::parse("certificate", "missing check_mode"))?;
            let qw = QuotientWitness {
                word: source.parse(&c.word)?,
                module: parse_module(&c.group_spec).ok(),
                source,
                quotient,
                hom,
                n: c.n,
                mode,
            };
            let v = verify_quotient_witness(&qw);
            if let (WitnessVerdict::Valid { lo, hi, .. }, Some(claimed)) = (&v, c.interval) {
                if (*lo, *hi) != claimed {
                    return Ok(invalid(format!("claimed interval {claimed:?}, witness gives ({lo}, {hi})")));
                }
            }
            Ok(v)
        }
        Variant::Greendlinger => {
            let (alphabet, relators) = sc_relators(&c.group_spec)?;
            let r = alphabet.parse(&c.word)?;
            if !relators.contains(&r) {
                return Ok(invalid(format!("{} is not a defining relator", c.word)));
            }
            let shorter: Vec<Word> = relators.iter().filter(|s| s.len() < r.len()).cloned().collect();
            let cert = greendlinger_new_relator(alphabet.len(), &r, &shorter)?;
            if c.overlap.is_some_and(|o| o != cert.max_overlap) {
                return Ok(invalid(format!("claimed overlap {:?}, found {}", c.overlap, cert.max_overlap)));
            }
            Ok(if verify_greendlinger(alphabet.len(), &cert)? {
                WitnessVerdict::Valid { lo: r.len(), hi: r.len(), label: "certified".into(), checked: shorter.len() }
            } else {
                invalid("overlap too long for Greendlinger's lemma")
            })
        }
        Variant::Filling => {
            let g = parse_group(&c.group_spec)?;
            let pieces = c.pieces.as_ref().ok_or_else(|| Error::parse("certificate", "missing pieces"))?;
            let d = FillingDiagram {
                target: g.parse(&c.word)?,
                pieces: pieces.iter().map(|p| Ok((g.parse(&p.conjugator)?, g.parse(&p.relator)?))).collect::<Result<_>>()?,
                max_piece_len: c.n,
            };
            Ok(if verify_filling(&g, &d)? {
                WitnessVerdict::Valid { lo: 0, hi: c.n, label: "certified".into(), checked: d.pieces.len() }
            } else {
                invalid("filling does not check")
            })
        }
        Variant::BrittonNontrivial => {
            let spec = parse_module(&c.group_spec)?;
            let base = gn_base(&spec, c.n as i64)?;
            let a = spec.alphabet.parse(extra_str(c, "a")?)?;
            let b = spec.alphabet.parse(extra_str(c, "b")?)?;
            let sweep = c.extra.as_ref().and_then(|e| e.get("sweep_len")).and_then(Value::as_u64).unwrap_or(6) as usize;
            let hom = GroupHom::new(Alphabet::from_str_static("ab"), spec.alphabet.clone(), vec![a, b])?;
            let words = crate::constructions::witnesses::reduced_pair_words(sweep);
            for w in &words {
                let w = Word::reduced_from(w.iter().copied());
                if base.trivial(&hom.apply(&w)) {
                    return Ok(invalid(format!("{} is trivial in G_{}", Alphabet::from_str_static("ab").format(&w), c.n)));
                }
            }
            Ok(WitnessVerdict::Valid { lo: 0, hi: 0, label: "certified".into(), checked: words.len() })
        }
        Variant::Trange => {
            let spec = parse_module(&c.group_spec)?;
            let g = spec.group();
            let w = g.parse(&c.word)?;
            match trange_reduce(&w, c.n as i64)? {
                TRangeOutcome::Conjugated { word, conjugator } => {
                    if conjugator.mul(&w).mul(&conjugator.inverse()) != word {
                        return Ok(invalid("conjugator does not produce the reduced word"));
                    }
                    let base = gn_base(&spec, c.n as i64)?;
                    let relation = g.is_trivial(&w)?;
                    Ok(if !relation || base.trivial(&word) {
                        WitnessVerdict::Valid { lo: 0, hi: c.n, label: "certified".into(), checked: 1 }
                    } else {
                        invalid("relation is nontrivial in G_n")
                    })
                }
                TRangeOutcome::Fail { range } => Ok(invalid(format!("t-range {range} exceeds {}", c.n))),
            }
        }
        Variant::Homology => {
            let x = Graph::parse(extra_str(c, "graph")?, "certificate")?;
            let reports = c.homology.as_ref().ok_or_else(|| Error::parse("certificate", "missing homology"))?;
            if reports.len() != 2 || c.n == 0 {
                return Ok(invalid("homology pair required"));
            }
            let before = homology_certificate(&x, c.n - 1)?;
            let at = homology_certificate(&x, c.n)?;
            if before != reports[0] || at != reports[1] {
                return Ok(invalid("recomputed homology differs"));
            }
            Ok(if before != at {
                WitnessVerdict::Valid { lo: c.n, hi: c.n, label: "certified".into(), checked: at.cells }
            } else {
                invalid("homology does not change at n")
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::witnesses::wreath_witness;
    use crate::oracles::wreath::{wreath_module, LampBase};

    #[test]
    fn witness_round_trip() {
        let r = wreath_witness(&wreath_module(LampBase::Cyclic(2)), 1).unwrap();
        let c = Certificate::from_witness("wreath", &r.witness);
        let text = c.to_json();
        let back = Certificate::from_json(&text, "mem").unwrap();
        assert_eq!(back.to_json(), text);
        assert!(verify_certificate(&back, None).unwrap().is_valid());
        let mut bad = back.clone();
        bad.word = "txTX".into();
        assert!(matches!(verify_certificate(&bad, None).unwrap(), WitnessVerdict::Invalid { .. }));
    }

    #[test]
    fn malformed_files_are_parse_errors() {
        assert!(matches!(Certificate::from_json("{", "f"), Err(Error::Parse { .. })));
        assert!(matches!(Certificate::from_json(r#"{"version":1}"#, "f"), Err(Error::Parse { .. })));
    }

    #[test]
    fn homology_and_trange_variants() {
        let x = Graph::cycle(5);
        let c = Certificate::homology(&x, 5, homology_certificate(&x, 4).unwrap(), homology_certificate(&x, 5).unwrap());
        assert!(verify_certificate(&c, None).unwrap().is_valid());
        let t = Certificate::trange("companion(2,3,1)", 1, "txTxtXTX".into());
        assert!(verify_certificate(&t, None).unwrap().is_valid());
        let f = Certificate::trange("companion(2,3,1)", 1, "xttxTTXttXTT".into());
        assert!(!verify_certificate(&f, None).unwrap().is_valid());
    }
}
