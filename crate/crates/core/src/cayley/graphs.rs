//! Φ(X) for finite graphs: loops of length `n` against the normal closure of shorter loops.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::{Letter, Word};
use crate::intmat::{smith_diagonal, Lattice};
use crate::scalesets::Scale;

use super::coset::{coset_enumeration, trace, CosetOutcome, DEFAULT_MAX_COSETS};
use super::fill::{FillPool, DEFAULT_STATE_CAP};

/// Default cap on boundary-matrix entries.
pub const DEFAULT_MATRIX_CAP: usize = 4_000_000;

/// Finite simple undirected graph on `0..vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &(u, v) in edges {
            if u == v {
                return Err(Error::ParamError(format!("loop at vertex {u}")));
            }
            if u >= vertices || v >= vertices {
                return Err(Error::ParamError(format!("edge {u}-{v} outside 0..{vertices}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::ParamError(format!("repeated edge {u}-{v}")));
            }
            out.push(e);
        }
        Ok(Graph { vertices, edges: out })
    }

    /// Graph file: one `u v` pair per line, `#` starts a comment.
    pub fn parse(text: &str, location: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::parse(format!("{location}:{}", i + 1), format!("bad vertex {s:?}"))))
                .collect::<Result<_>>()?;
            if nums.len() != 2 {
                return Err(Error::parse(format!("{location}:{}", i + 1), "expected `u v`"));
            }
            edges.push((nums[0], nums[1]));
        }
        let vertices = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(1);
        Graph::new(vertices, &edges)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Graph::parse(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn to_file_string(&self) -> String {
        self.edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect()
    }

    pub fn cycle(k: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Graph::new(k, &edges).expect("cycle graph")
    }

    pub fn path(k: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..k).map(|i| (i - 1, i)).collect();
        Graph::new(k.max(1), &edges).expect("path graph")
    }

    /// Disjoint union glued at vertex 0 of each.
    pub fn wedge(&self, other: &Graph) -> Self {
        let shift = |v: usize| if v == 0 { 0 } else { v + self.vertices - 1 };
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (shift(u), shift(v))));
        Graph::new(self.vertices + other.vertices - 1, &edges).expect("wedge")
    }

    /// Each edge replaced by a path of `k` edges.
    pub fn subdivide(&self, k: usize) -> Self {
        assert!(k >= 1);
        let mut next = self.vertices;
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            let mut prev = u;
            for _ in 1..k {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, v));
        }
        Graph::new(next, &edges).expect("subdivision")
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.neighbours();
        let mut seen = vec![false; self.vertices];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.vertices
    }

    /// Simple cycles of length `≤ max_len`, one per rotation/reflection class,
    /// as vertex sequences starting at their least vertex.
    pub fn simple_cycles(&self, max_len: usize) -> Vec<Vec<usize>> {
        let adj = self.neighbours();
        let mut out = Vec::new();
        for s in 0..self.vertices {
            let mut path = vec![s];
            let mut on = vec![false; self.vertices];
            on[s] = true;
            cycles_from(&adj, s, &mut path, &mut on, max_len, &mut out);
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

fn cycles_from(adj: &[Vec<usize>], s: usize, path: &mut Vec<usize>, on: &mut [bool], max_len: usize, out: &mut Vec<Vec<usize>>) {
    let v = *path.last().expect("nonempty path");
    for &w in &adj[v] {
        if w == s && path.len() >= 3 && path[1] < path[path.len() - 1] {
            out.push(path.clone());
        }
        if w > s && !on[w] && path.len() < max_len {
            on[w] = true;
            path.push(w);
            cycles_from(adj, s, path, on, max_len, out);
            path.pop();
            on[w] = false;
        }
    }
}

/// `π₁(X, 0)` as a free group on the edges outside a BFS spanning tree.
pub struct FundamentalGroup {
    rank: usize,
    /// Generator index and orientation of each non-tree edge, keyed by `(min, max)`.
    gen_of: BTreeMap<(usize, usize), u16>,
}

impl FundamentalGroup {
    pub fn new(x: &Graph) -> Self {
        let adj = x.neighbours();
        let mut seen = vec![false; x.vertices];
        let mut tree = BTreeSet::new();
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree.insert((v.min(w), v.max(w)));
                    queue.push_back(w);
                }
            }
        }
        let mut gen_of = BTreeMap::new();
        for &e in &x.edges {
            if !tree.contains(&e) {
                gen_of.insert(e, gen_of.len() as u16);
            }
        }
        FundamentalGroup { rank: gen_of.len(), gen_of }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cycle_word(&self, cycle: &[usize]) -> Word {
        let mut letters = Vec::new();
        for i in 0..cycle.len() {
            let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            if let Some(&g) = self.gen_of.get(&(u.min(v), u.max(v))) {
                letters.push(Letter::new(g, u > v));
            }
        }
        Word::reduced_from(letters)
    }

    pub fn cycle_vector(&self, cycle: &[usize]) -> Vec<BigInt> {
        let w = self.cycle_word(cycle);
        (0..self.rank as u16).map(|g| BigInt::from(w.exponent_sum(g))).collect()
    }
}

/// `H₁(K_n)` where `K_n` has one 2-cell per simple cycle of length `≤ n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub n: usize,
    pub free_rank: usize,
    /// Smith invariants greater than one.
    pub torsion: Vec<String>,
    pub cells: usize,
}

impl HomologyReport {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().map(|t| t.parse::<BigInt>().expect("integer")).product())
    }
}

pub fn homology_certificate(x: &Graph, n: usize) -> Result<HomologyReport> {
    homology_with_cap(x, n, DEFAULT_MATRIX_CAP)
}

pub fn homology_with_cap(x: &Graph, n: usize, cap: usize) -> Result<HomologyReport> {
    let pi = FundamentalGroup::new(x);
    let cycles = x.simple_cycles(n);
    let rows: Vec<Vec<BigInt>> = cycles.iter().map(|c| pi.cycle_vector(c)).collect();
    let diag = smith_diagonal(&rows, pi.rank(), cap)?;
    Ok(HomologyReport {
        n,
        free_rank: pi.rank() - diag.len(),
        torsion: diag.iter().filter(|d| !d.is_one()).map(|d| d.to_string()).collect(),
        cells: cycles.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphEvidence {
    /// No simple cycle has length `n`.
    NoLoops,
    /// The cycle is nonzero in `H₁(K_{n−1})`.
    Homology { cycle: Vec<usize> },
    /// `π₁(K_{n−1})` enumerated with `order` elements; `cycle` is a surviving loop if any.
    CosetTable { order: usize, cycle: Option<Vec<usize>> },
    /// Every length-`n` cycle written as a product of conjugates of shorter cycles.
    Fillings { areas: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "evidence", rename_all = "snake_case")]
pub enum PhiVerdict {
    In(GraphEvidence),
    Out(GraphEvidence),
    Unknown,
}

impl PhiVerdict {
    pub fn decided(&self) -> Option<bool> {
        match self {
            PhiVerdict::In(_) => Some(true),
            PhiVerdict::Out(_) => Some(false),
            PhiVerdict::Unknown => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphBudgets {
    pub max_cosets: usize,
    pub area_budget: usize,
    pub matrix_cap: usize,
}

impl Default for GraphBudgets {
    fn default() -> Self {
        GraphBudgets { max_cosets: DEFAULT_MAX_COSETS, area_budget: 64, matrix_cap: DEFAULT_MATRIX_CAP }
    }
}

/// Verdict for every `1 ≤ n ≤ max_n`.
pub fn graph_phi(x: &Graph, max_n: usize, budgets: GraphBudgets) -> Result<BTreeMap<usize, PhiVerdict>> {
    if !x.is_connected() {
        return Err(Error::ParamError("graph is not connected".into()));
    }
    let pi = FundamentalGroup::new(x);
    let cycles = x.simple_cycles(max_n);
    let mut out = BTreeMap::new();
    for n in 1..=max_n {
        let (shorter, current): (Vec<&Vec<usize>>, Vec<&Vec<usize>>) =
            cycles.iter().filter(|c| c.len() <= n).partition(|c| c.len() < n);
        out.insert(n, phi_at(&pi, &shorter, &current, budgets));
    }
    Ok(out)
}

fn phi_at(pi: &FundamentalGroup, shorter: &[&Vec<usize>], current: &[&Vec<usize>], budgets: GraphBudgets) -> PhiVerdict {
    if current.is_empty() {
        return PhiVerdict::Out(GraphEvidence::NoLoops);
    }
    let rows: Vec<Vec<BigInt>> = shorter.iter().map(|c| pi.cycle_vector(c)).collect();
    let lattice = Lattice::from_generators(pi.rank(), &rows);
    for c in current {
        if !lattice.contains(&pi.cycle_vector(c)) {
            return PhiVerdict::In(GraphEvidence::Homology { cycle: c.to_vec() });
        }
    }
    let relators: Vec<Word> = shorter.iter().map(|c| pi.cycle_word(c)).collect();
    if lattice.rank() == pi.rank() && !lattice.pivot_product().is_zero() {
        if let CosetOutcome::FiniteIndex { table, order } = coset_enumeration(pi.rank(), &relators, budgets.max_cosets) {
            let survivor = current.iter().find(|c| trace(&table, &pi.cycle_word(c)) != 0);
            return match survivor {
                Some(c) => PhiVerdict::In(GraphEvidence::CosetTable { order, cycle: Some(c.to_vec()) }),
                None => PhiVerdict::Out(GraphEvidence::CosetTable { order, cycle: None }),
            };
        }
    }
    let max_len = relators.iter().map(Word::len).max().unwrap_or(0);
    let pool = FillPool::new(pi.rank(), &relators, max_len);
    let mut areas = Vec::new();
    for c in current {
        let w = pi.cycle_word(c);
        match pool.search(&w, budgets.area_budget, DEFAULT_STATE_CAP) {
            Some(pieces) => {
                let prod = pieces.iter().fold(Word::empty(), |acc, (k, r)| acc.mul(&r.conjugate_by(k)));
                if prod != w {
                    return PhiVerdict::Unknown;
                }
                areas.push(pieces.len());
            }
            None => return PhiVerdict::Unknown,
        }
    }
    PhiVerdict::Out(GraphEvidence::Fillings { areas })
}

/// Lengths with a certified `In` verdict.
pub fn certified_in(phi: &BTreeMap<usize, PhiVerdict>) -> Vec<usize> {
    phi.iter().filter(|(_, v)| matches!(v, PhiVerdict::In(_))).map(|(&n, _)| n).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionReport {
    pub k: usize,
    pub factor: String,
    pub phi_x: Vec<usize>,
    pub phi_y: Vec<usize>,
    pub matched: Vec<(usize, usize)>,
    pub violations: Vec<String>,
}

impl SubdivisionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn within(a: usize, b: usize, f: Scale) -> bool {
    let (a, b) = (Scale::from_integer(a as u64), Scale::from_integer(b as u64));
    a <= f * b && b <= f * a
}

/// Compares Φ of `x` (up to `max_n`) with Φ of its `k`-fold subdivision (up to `k·max_n`).
pub fn compare_phi_subdivision(x: &Graph, k: usize, max_n: usize, c: Scale, budgets: GraphBudgets) -> Result<SubdivisionReport> {
    let kk = Scale::from_integer(k as u64);
    let f = if kk > c { kk } else { c };
    let phi_x = certified_in(&graph_phi(x, max_n, budgets)?);
    let phi_y = certified_in(&graph_phi(&x.subdivide(k), k * max_n, budgets)?);
    let mut matched = Vec::new();
    let mut violations = Vec::new();
    for &n in &phi_x {
        let best = phi_y.iter().filter(|&&m| within(n, m, f)).min_by_key(|&&m| (m as i64 - (k * n) as i64).abs());
        match best {
            Some(&m) => matched.push((n, m)),
            None => violations.push(format!("{n} in Φ(X) has no partner in Φ(Y)")),
        }
    }
    for &m in &phi_y {
        if Scale::from_integer(m as u64) > f * Scale::from_integer(max_n as u64) {
            continue;
        }
        if !phi_x.iter().any(|&n| within(n, m, f)) {
            violations.push(format!("{m} in Φ(Y) has no partner in Φ(X)"));
        }
    }
    Ok(SubdivisionReport { k, factor: f.to_string(), phi_x, phi_y, matched, violations })
}
