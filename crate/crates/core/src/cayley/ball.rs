//! Cayley balls by breadth-first search.

use std::collections::HashMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::freewords::{Letter, Word};
use crate::oracles::{MarkedGroup, Verdict3};

/// Adjacency marker for a neighbour outside the ball.
pub const EXTERIOR: u64 = u64::MAX;

/// Default cap on the number of vertices in a ball.
pub const DEFAULT_VERTEX_CAP: usize = 5_000_000;

const CACHE_VERSION: u8 = 0x01;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub group: String,
    pub radius: usize,
    /// One geodesic representative per vertex, in BFS order; vertex 0 is the identity.
    pub vertices: Vec<Word>,
    /// `adjacency[v][letter.key()]`.
    pub adjacency: Vec<Vec<u64>>,
}

enum Index {
    Nf(HashMap<String, u64>),
    Buckets(HashMap<u64, Vec<u64>>),
}

impl Index {
    fn lookup(&self, g: &MarkedGroup, vertices: &[Word], w: &Word) -> Result<Option<u64>> {
        match self {
            Index::Nf(map) => Ok(g.normal_form(w).and_then(|k| map.get(&k).copied())),
            Index::Buckets(map) => {
                let Some(ids) = map.get(&g.fingerprint(w)) else { return Ok(None) };
                for &id in ids {
                    match g.is_identity(&w.mul(&vertices[id as usize].inverse())) {
                        Verdict3::True => return Ok(Some(id)),
                        Verdict3::False => {}
                        Verdict3::Unknown { .. } => {
                            return Err(Error::OracleUnknown(format!("comparing {} in {}", g.format(w), g.spec())))
                        }
                    }
                }
                Ok(None)
            }
        }
    }

    fn insert(&mut self, g: &MarkedGroup, w: &Word, id: u64) {
        match self {
            Index::Nf(map) => {
                map.insert(g.normal_form(w).expect("normal form"), id);
            }
            Index::Buckets(map) => map.entry(g.fingerprint(w)).or_default().push(id),
        }
    }
}

impl Ball {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex reached from `v` along `l`, `None` if it leaves the ball.
    pub fn step(&self, v: u64, l: Letter) -> Option<u64> {
        let t = self.adjacency[v as usize][l.key()];
        (t != EXTERIOR).then_some(t)
    }

    /// Endpoint of the path from the identity along `w`.
    pub fn walk(&self, w: &Word) -> Option<u64> {
        w.letters().iter().try_fold(0u64, |v, &l| self.step(v, l))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![CACHE_VERSION];
        out.extend_from_slice(&(self.vertices.len() as u64).to_le_bytes());
        for (w, row) in self.vertices.iter().zip(&self.adjacency) {
            out.extend_from_slice(&(w.len() as u64).to_le_bytes());
            out.extend(w.letters().iter().map(|l| l.key() as u8));
            for &t in row {
                out.extend_from_slice(&t.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(group: &str, radius: usize, letters: usize, bytes: &[u8]) -> Result<Ball> {
        let bad = |m: &str| Error::parse("ball cache", m.to_string());
        let mut pos = 0usize;
        let mut take = |n: usize| -> Result<&[u8]> {
            let s = bytes.get(pos..pos + n).ok_or_else(|| bad("truncated"))?;
            pos += n;
            Ok(s)
        };
        if take(1)?[0] != CACHE_VERSION {
            return Err(bad("unsupported version"));
        }
        let u64_at = |s: &[u8]| u64::from_le_bytes(s.try_into().expect("8 bytes"));
        let count = u64_at(take(8)?) as usize;
        let mut vertices = Vec::with_capacity(count);
        let mut adjacency = Vec::with_capacity(count);
        for _ in 0..count {
            let len = u64_at(take(8)?) as usize;
            let keys = take(len)?;
            if keys.iter().any(|&k| k as usize >= letters) {
                return Err(bad("letter out of range"));
            }
            vertices.push(Word::reduced_from(keys.iter().map(|&k| Letter::from_key(k as usize))));
            let mut row = Vec::with_capacity(letters);
            for _ in 0..letters {
                row.push(u64_at(take(8)?));
            }
            adjacency.push(row);
        }
        if pos != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        Ok(Ball { group: group.to_string(), radius, vertices, adjacency })
    }
}

pub fn ball(g: &MarkedGroup, radius: usize) -> Result<Ball> {
    ball_capped(g, radius, DEFAULT_VERTEX_CAP)
}

pub fn ball_capped(g: &MarkedGroup, radius: usize, cap: usize) -> Result<Ball> {
    if !g.has_normal_form() && !g.is_exact() {
        return Err(Error::OracleUnknown(format!("{} has neither a normal form nor an exact oracle", g.spec())));
    }
    let letters: Vec<Letter> = g.alphabet().letters().collect();
    let mut index = if g.has_normal_form() { Index::Nf(HashMap::new()) } else { Index::Buckets(HashMap::new()) };
    let mut vertices = vec![Word::empty()];
    index.insert(g, &vertices[0], 0);
    let mut adjacency: Vec<Vec<u64>> = Vec::new();
    // Below the girth distinct reduced words are distinct elements.
    let girth = g.girth();
    let mut words: HashMap<Word, u64> = HashMap::from([(Word::empty(), 0)]);
    let mut layer_start = 0usize;
    for depth in 0..=radius {
        let injective = 2 * depth + 1 < girth;
        let layer_end = vertices.len();
        for v in layer_start..layer_end {
            let mut row = vec![EXTERIOR; letters.len()];
            for &l in &letters {
                let w = vertices[v].mul_letter(l);
                let found = if injective { words.get(&w).copied() } else { index.lookup(g, &vertices, &w)? };
                let id = match found {
                    Some(id) => id,
                    None if depth < radius => {
                        if vertices.len() >= cap {
                            return Err(Error::BudgetExceeded(format!("ball of radius {radius} exceeds {cap} vertices")));
                        }
                        let id = vertices.len() as u64;
                        index.insert(g, &w, id);
                        if injective {
                            words.insert(w.clone(), id);
                        }
                        vertices.push(w);
                        id
                    }
                    None => EXTERIOR,
                };
                row[l.key()] = id;
            }
            adjacency.push(row);
        }
        layer_start = layer_end;
    }
    Ok(Ball { group: g.spec().to_string(), radius, vertices, adjacency })
}

pub fn cache_dir() -> PathBuf {
    std::env::var_os("RRLAB_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("./.rrlab-cache"))
}

pub fn ball_cache_path(dir: &Path, spec: &str, radius: usize) -> PathBuf {
    let hash = hex::encode(Sha256::digest(spec.as_bytes()));
    dir.join(hash).join(format!("ball-r{radius}.bin"))
}

/// Loads the ball from `dir` if present, otherwise computes and stores it.
pub fn ball_cached(g: &MarkedGroup, radius: usize, dir: &Path) -> Result<Ball> {
    let path = ball_cache_path(dir, g.spec(), radius);
    let letters = 2 * g.alphabet().len();
    if let Ok(bytes) = std::fs::read(&path) {
        if let Ok(b) = Ball::from_bytes(g.spec(), radius, letters, &bytes) {
            return Ok(b);
        }
    }
    let b = ball(g, radius)?;
    let parent = path.parent().expect("cache path has a parent");
    std::fs::create_dir_all(parent)?;
    let mut tmp = tempfile_in(parent)?;
    tmp.1.write_all(&b.to_bytes())?;
    tmp.1.sync_all()?;
    drop(tmp.1);
    std::fs::rename(&tmp.0, &path)?;
    Ok(b)
}

fn tempfile_in(dir: &Path) -> Result<(PathBuf, std::fs::File)> {
    let pid = std::process::id();
    for i in 0..1000u32 {
        let p = dir.join(format!(".ball-{pid}-{i}.tmp"));
        if let Ok(f) = std::fs::OpenOptions::new().write(true).create_new(true).open(&p) {
            return Ok((p, f));
        }
    }
    Err(Error::Io(format!("cannot create a temporary file in {}", dir.display())))
}

/// All nonempty reduced words of length `≤ max_len` that are trivial in `g`,
/// in shortlex order, read off closed walks in the ball of radius `⌈max_len/2⌉`.
pub fn enumerate_relations(g: &MarkedGroup, max_len: usize) -> Result<Vec<Word>> {
    let b = ball(g, max_len.div_ceil(2))?;
    Ok(relations_from_ball(&b, max_len))
}

pub fn relations_from_ball(b: &Ball, max_len: usize) -> Vec<Word> {
    assert!(2 * b.radius >= max_len, "ball too small for relations of length {max_len}");
    let letters = b.adjacency.first().map_or(0, Vec::len);
    let half = max_len.div_ceil(2);
    // paths[k][v]: reduced words of length k ending at v.
    let mut paths: Vec<HashMap<u64, Vec<Vec<u8>>>> = vec![HashMap::from([(0u64, vec![Vec::new()])])];
    for k in 1..=half {
        let mut next: HashMap<u64, Vec<Vec<u8>>> = HashMap::new();
        for (&v, ws) in &paths[k - 1] {
            for w in ws {
                for key in 0..letters {
                    if w.last().is_some_and(|&p| p as usize == key ^ 1) {
                        continue;
                    }
                    let t = b.adjacency[v as usize][key];
                    debug_assert_ne!(t, EXTERIOR);
                    let mut w2 = w.clone();
                    w2.push(key as u8);
                    next.entry(t).or_default().push(w2);
                }
            }
        }
        paths.push(next);
    }
    let mut out = Vec::new();
    for len in 1..=max_len {
        let (a, c) = (len.div_ceil(2), len / 2);
        for (v, us) in &paths[a] {
            let Some(vs) = paths[c].get(v) else { continue };
            for u in us {
                for w in vs {
                    if c > 0 && u.last() == w.last() {
                        continue;
                    }
                    let mut keys = u.clone();
                    keys.extend(w.iter().rev().map(|&k| k ^ 1));
                    out.push(Word::reduced_from(keys.iter().map(|&k| Letter::from_key(k as usize))));
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::basic::{free_abelian, free_group};
    use crate::oracles::wreath::{wreath_group, LampBase};

    /// Independent count: BFS over (lit lamps, cursor) states.
    fn lamplighter_states(r: usize) -> usize {
        use std::collections::{BTreeSet, HashSet};
        let start = (BTreeSet::<i64>::new(), 0i64);
        let mut seen = HashSet::from([start.clone()]);
        let mut layer = vec![start];
        for _ in 0..r {
            let mut next = Vec::new();
            for (lamps, c) in &layer {
                let mut toggled = lamps.clone();
                if !toggled.remove(c) {
                    toggled.insert(*c);
                }
                for s in [(lamps.clone(), c + 1), (lamps.clone(), c - 1), (toggled, *c)] {
                    if seen.insert(s.clone()) {
                        next.push(s);
                    }
                }
            }
            layer = next;
        }
        seen.len()
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(lamplighter_states(2), 10);
        assert_eq!(ball(&free_group(1).unwrap(), 5).unwrap().len(), 11);
        assert_eq!(ball(&free_group(2).unwrap(), 3).unwrap().len(), 53);
        for r in 0..=4 {
            assert_eq!(ball(&wreath_group(LampBase::Cyclic(2)), r).unwrap().len(), lamplighter_states(r), "radius {r}");
        }
        assert_eq!(ball(&free_abelian(2).unwrap(), 3).unwrap().len(), 25);
    }

    #[test]
    fn relations_of_small_groups() {
        let z2 = free_abelian(2).unwrap();
        let rels = enumerate_relations(&z2, 4).unwrap();
        assert_eq!(rels.len(), 8);
        assert!(rels.iter().all(|w| w.len() == 4));
        assert!(enumerate_relations(&free_group(2).unwrap(), 6).unwrap().is_empty());
        let l = wreath_group(LampBase::Cyclic(2));
        let rels: Vec<String> = enumerate_relations(&l, 2).unwrap().iter().map(|w| l.format(w)).collect();
        assert_eq!(rels, vec!["xx", "XX"]);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = wreath_group(LampBase::Cyclic(2));
        let a = ball_cached(&g, 3, dir.path()).unwrap();
        let path = ball_cache_path(dir.path(), g.spec(), 3);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes[0], 0x01);
        let b = ball_cached(&g, 3, dir.path()).unwrap();
        assert_eq!(a, b);
        assert_eq!(bytes, ball(&g, 3).unwrap().to_bytes());
    }
}
