//! The group-spec mini-language.
//!
//! ```text
//! free(2)  zd(2)  cyclic(3)  wreath(c2,z)  wreath(z,z)  partial_wreath(1,3)
//! gamma(c2,1)  companion(2,3,1)  bs(2,3)  grigorchuk  c2v4
//! sc(file=PATH)  sc(gens=3;rels=w1:w2)  sc(family=21:63:189;gens=3;seed=1)
//! graph_product(file=PATH)  graph_product(G1, G2; edges=0-1)
//! gn(companion(2,3,1),2)  kquot(bs23,1)
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::freewords::Alphabet;

pub use super::basic::{cyclic_group, free_abelian, free_group, free_on};
use super::companion::{companion_limit_group, ModuleGroupSpec};
use super::graph_product::{gamma_group, graph_product_group, partial_wreath_group};
use super::grigorchuk::{free_product_c2v4, grigorchuk_group};
use super::hnn::{bs_group, gn_group};
use super::small_cancellation::small_cancellation_group;
use super::wreath::{wreath_group, wreath_module, LampBase};
use super::MarkedGroup;

/// Parsed `name(args)` with positional and `key=value` arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecCall {
    pub name: String,
    pub positional: Vec<String>,
    pub keyword: Vec<(String, String)>,
}

impl SpecCall {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.keyword.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Splits on top-level `,` and `;`.
fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' | ';' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out.retain(|a| !a.is_empty());
    out
}

pub fn parse_call(spec: &str) -> Result<SpecCall> {
    let spec = spec.trim();
    let (name, body) = match spec.find('(') {
        Some(i) => {
            if !spec.ends_with(')') {
                return Err(Error::UnknownGroupSpec(format!("unbalanced parentheses in {spec:?}")));
            }
            (&spec[..i], &spec[i + 1..spec.len() - 1])
        }
        None => (spec, ""),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::UnknownGroupSpec(spec.to_string()));
    }
    let mut positional = Vec::new();
    let mut keyword = Vec::new();
    for arg in split_top(body) {
        match arg.split_once('=') {
            Some((k, v)) if !k.contains('(') => keyword.push((k.trim().to_string(), v.trim().to_string())),
            _ => positional.push(arg),
        }
    }
    Ok(SpecCall { name: name.to_string(), positional, keyword })
}

fn int_arg(call: &SpecCall, i: usize) -> Result<u64> {
    call.positional
        .get(i)
        .ok_or_else(|| Error::UnknownGroupSpec(format!("{}: missing argument {}", call.name, i + 1)))?
        .parse()
        .map_err(|_| Error::UnknownGroupSpec(format!("{}: argument {} is not an integer", call.name, i + 1)))
}

fn arity(call: &SpecCall, n: usize) -> Result<()> {
    if call.positional.len() != n {
        return Err(Error::UnknownGroupSpec(format!("{} takes {n} arguments", call.name)));
    }
    Ok(())
}

/// Abelian-by-cyclic data behind a spec, for the module constructions.
pub fn parse_module(spec: &str) -> Result<ModuleGroupSpec> {
    let call = parse_call(spec)?;
    match call.name.as_str() {
        "wreath" => {
            arity(&call, 2)?;
            if call.positional[1] != "z" {
                return Err(Error::UnknownGroupSpec("wreath top group must be z".into()));
            }
            Ok(wreath_module(LampBase::parse(&call.positional[0])?))
        }
        "companion" => {
            arity(&call, 3)?;
            ModuleGroupSpec::companion(int_arg(&call, 0)?, int_arg(&call, 1)?, int_arg(&call, 2)? as usize)
        }
        "bs" | "bsmod" => {
            arity(&call, 2)?;
            ModuleGroupSpec::bs_module(int_arg(&call, 0)?, int_arg(&call, 1)?)
        }
        _ => Err(Error::UnknownGroupSpec(format!("{spec} has no abelian-by-cyclic module data"))),
    }
}

fn parse_words_list(alphabet: &Alphabet, list: &str) -> Result<Vec<crate::freewords::Word>> {
    list.split(':').filter(|s| !s.trim().is_empty()).map(|s| alphabet.parse(s)).collect()
}

fn sc_alphabet(gens: usize) -> Result<Alphabet> {
    if gens == 0 || gens > 6 {
        return Err(Error::ParamError("sc groups use 1 to 6 generators".into()));
    }
    Alphabet::new("xyzuvw".chars().take(gens))
}

/// Canonical `sc(gens=k;rels=...)` spec for explicit relators.
pub fn sc_spec(alphabet: &Alphabet, relators: &[crate::freewords::Word]) -> String {
    let rels: Vec<String> = relators.iter().map(|r| alphabet.format(r)).collect();
    format!("sc(gens={};rels={})", alphabet.len(), rels.join(":"))
}

/// Relator file: one word per line, `#` comments, optional `gens <k>` header.
pub fn read_relator_file(path: &Path) -> Result<(Alphabet, Vec<crate::freewords::Word>)> {
    let text = std::fs::read_to_string(path)?;
    let mut gens: Option<usize> = None;
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(k) = line.strip_prefix("gens") {
            gens = Some(k.trim().parse().map_err(|_| Error::parse(format!("{}:{}", path.display(), i + 1), "bad gens"))?);
            continue;
        }
        raw.push((i + 1, line.to_string()));
    }
    let gens = match gens {
        Some(g) => g,
        None => raw
            .iter()
            .flat_map(|(_, l)| l.chars())
            .filter_map(|c| "xyzuvw".find(c.to_ascii_lowercase()))
            .max()
            .map_or(1, |m| m + 1),
    };
    let alphabet = sc_alphabet(gens)?;
    let words = raw
        .iter()
        .map(|(ln, l)| alphabet.parse(l).map_err(|e| Error::parse(format!("{}:{ln}", path.display()), e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok((alphabet, words))
}

/// Graph-product file: first line `<k> <spec_1> … <spec_k>`, then `u v` edges.
pub fn read_graph_product_file(path: &Path) -> Result<(Vec<String>, Vec<(usize, usize)>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.split('#').next().unwrap_or("").trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::parse(path.display().to_string(), "empty file"))?;
    let mut parts = header.split_whitespace();
    let k: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(format!("{}:1", path.display()), "expected vertex count"))?;
    let tags: Vec<String> = parts.map(String::from).collect();
    if tags.len() != k {
        return Err(Error::parse(format!("{}:1", path.display()), format!("{k} vertices but {} group tags", tags.len())));
    }
    let mut edges = Vec::new();
    for (i, line) in lines {
        let line = line.split('#').next().unwrap_or("");
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::parse(format!("{}:{}", path.display(), i + 1), "bad vertex")))
            .collect::<Result<_>>()?;
        if nums.len() != 2 {
            return Err(Error::parse(format!("{}:{}", path.display(), i + 1), "expected `u v`"));
        }
        edges.push((nums[0], nums[1]));
    }
    Ok((tags, edges))
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(|c| c == ',' || c == ' ')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (u, v) = p.split_once('-').ok_or_else(|| Error::UnknownGroupSpec(format!("edge {p:?}")))?;
            Ok((
                u.trim().parse().map_err(|_| Error::UnknownGroupSpec(format!("edge {p:?}")))?,
                v.trim().parse().map_err(|_| Error::UnknownGroupSpec(format!("edge {p:?}")))?,
            ))
        })
        .collect()
}

/// Alphabet and relators of an `sc(...)` spec.
pub fn sc_relators(spec: &str) -> Result<(Alphabet, Vec<crate::freewords::Word>)> {
    let call = parse_call(spec)?;
    if call.name != "sc" {
        return Err(Error::UnknownGroupSpec(format!("{spec} is not a small-cancellation spec")));
    }
    sc_data(&call)
}

fn sc_data(call: &SpecCall) -> Result<(Alphabet, Vec<crate::freewords::Word>)> {
    Ok(if let Some(path) = call.get("file") {
        read_relator_file(Path::new(path))?
    } else if let Some(family) = call.get("family") {
        let lengths: Vec<usize> = family
            .split(':')
            .map(|s| s.parse().map_err(|_| Error::UnknownGroupSpec(format!("family length {s:?}"))))
            .collect::<Result<_>>()?;
        let gens = call.get("gens").unwrap_or("3").parse().map_err(|_| Error::UnknownGroupSpec("gens".into()))?;
        let seed = call.get("seed").unwrap_or("1").parse().map_err(|_| Error::UnknownGroupSpec("seed".into()))?;
        let alphabet = sc_alphabet(gens)?;
        let rels = crate::constructions::sc_family::generate(&lengths, gens, seed)?;
        (alphabet, rels)
    } else {
        let gens = call.get("gens").ok_or_else(|| Error::UnknownGroupSpec("sc needs file=, family= or gens=;rels=".into()))?;
        let alphabet = sc_alphabet(gens.parse().map_err(|_| Error::UnknownGroupSpec("gens".into()))?)?;
        let rels = parse_words_list(&alphabet, call.get("rels").unwrap_or(""))?;
        (alphabet, rels)
    })
}

pub fn parse_group(spec: &str) -> Result<MarkedGroup> {
    let call = parse_call(spec)?;
    match call.name.as_str() {
        "free" => {
            arity(&call, 1)?;
            free_group(int_arg(&call, 0)? as usize)
        }
        "freeon" => {
            arity(&call, 1)?;
            let alphabet = Alphabet::new(call.positional[0].chars())?;
            Ok(MarkedGroup::new(format!("freeon({})", call.positional[0]), format!("F({})", call.positional[0]), free_on(alphabet)))
        }
        "zd" => {
            arity(&call, 1)?;
            free_abelian(int_arg(&call, 0)? as usize)
        }
        "cyclic" => {
            arity(&call, 1)?;
            cyclic_group(int_arg(&call, 0)?)
        }
        "wreath" => Ok(wreath_group(match parse_module(spec)?.kind {
            super::companion::ModuleKind::Lamp { q: 0 } => LampBase::Integers,
            super::companion::ModuleKind::Lamp { q } => LampBase::Cyclic(q),
            _ => unreachable!(),
        })),
        "partial_wreath" => {
            let set: BTreeSet<i64> = call
                .positional
                .iter()
                .map(|s| s.parse::<i64>().map_err(|_| Error::UnknownGroupSpec(format!("partial_wreath index {s:?}"))))
                .collect::<Result<_>>()?;
            if set.iter().any(|&n| n < 1) {
                return Err(Error::ParamError("partial_wreath indices must be positive".into()));
            }
            let bound = match call.get("bound") {
                Some(b) => Some(b.parse().map_err(|_| Error::UnknownGroupSpec("bad bound".into()))?),
                None => None,
            };
            Ok(partial_wreath_group(&set, bound))
        }
        "gamma" => {
            arity(&call, 2)?;
            let base = LampBase::parse(&call.positional[0])?;
            Ok(gamma_group(base.modulus(), int_arg(&call, 1)? as i64))
        }
        "companion" => {
            arity(&call, 3)?;
            companion_limit_group(int_arg(&call, 0)?, int_arg(&call, 1)?, int_arg(&call, 2)? as usize)
        }
        "bsmod" => Ok(parse_module(spec)?.group()),
        "bs" => {
            arity(&call, 2)?;
            bs_group(int_arg(&call, 0)?, int_arg(&call, 1)?)
        }
        "grigorchuk" => Ok(grigorchuk_group()),
        "c2v4" => Ok(free_product_c2v4()),
        "sc" => {
            let (alphabet, relators) = sc_data(&call)?;
            let spec = sc_spec(&alphabet, &relators);
            small_cancellation_group(spec, alphabet, relators)
        }
        "graph_product" => {
            let (tags, edges) = if let Some(path) = call.get("file") {
                read_graph_product_file(Path::new(path))?
            } else {
                let edges = match call.get("edges") {
                    Some(e) => parse_edges(e)?,
                    None => Vec::new(),
                };
                (call.positional.clone(), edges)
            };
            let factors = tags.iter().map(|t| parse_group(t)).collect::<Result<Vec<_>>>()?;
            graph_product_group(factors, &edges)
        }
        "gn" => {
            arity(&call, 2)?;
            let module = parse_module(&call.positional[0])?;
            gn_group(&module, int_arg(&call, 1)? as i64)
        }
        "kquot" => {
            arity(&call, 2)?;
            crate::constructions::endo::quotient_group(&call.positional[0], int_arg(&call, 1)? as usize)
        }
        other => Err(Error::UnknownGroupSpec(other.to_string())),
    }
}

/// One line per catalog entry: `(example spec, description)`.
pub fn catalog_entries() -> Vec<(&'static str, &'static str)> {
    vec![
        ("free(2)", "free group of rank k"),
        ("freeon(tx)", "free group on the listed letters"),
        ("zd(2)", "free abelian group Z^d"),
        ("cyclic(3)", "cyclic group of order q"),
        ("wreath(c2,z)", "lamplighter C_q wr Z (or wreath(z,z))"),
        ("partial_wreath(1,3)", "Gamma_I = <t,x | [t^n x t^-n, x], n in I>"),
        ("gamma(c2,1)", "Gamma_n: lamps commute at distance <= n"),
        ("companion(2,3,1)", "Z[1/mn]^r semidirect Z by the companion matrix"),
        ("bs(2,3)", "Baumslag-Solitar group BS(m,n)"),
        ("grigorchuk", "first Grigorchuk group"),
        ("c2v4", "free product C2 * (C2 x C2)"),
        ("sc(family=21:63:189;gens=3;seed=1)", "C'(1/7) presentation (also sc(file=PATH))"),
        ("graph_product(wreath(c2,z), zd(2))", "graph product (also graph_product(file=PATH))"),
        ("gn(companion(2,3,1),2)", "HNN quotient G_n of an abelian-by-cyclic group"),
        ("kquot(bs23,1)", "G/K_n for an endomorphism system (bs23 or grigorchuk)"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn call_parsing() {
        let c = parse_call("graph_product(wreath(c2,z), zd(2); edges=0-1)").unwrap();
        assert_eq!(c.positional, vec!["wreath(c2,z)", "zd(2)"]);
        assert_eq!(c.get("edges"), Some("0-1"));
        assert_eq!(parse_call("grigorchuk").unwrap().positional.len(), 0);
        assert!(parse_call("bs(2,3").is_err());
    }

    #[test]
    fn every_entry_parses() {
        for (spec, _) in catalog_entries() {
            let g = parse_group(spec).unwrap_or_else(|e| panic!("{spec}: {e}"));
            assert!(!g.alphabet().is_empty());
        }
        assert!(matches!(parse_group("monster"), Err(Error::UnknownGroupSpec(_))));
    }

    #[test]
    fn graph_product_renames_collisions() {
        let g = parse_group("graph_product(wreath(c2,z), zd(2))").unwrap();
        assert_eq!(g.alphabet().names(), &['t', 'x', 'a', 'y']);
    }
}
