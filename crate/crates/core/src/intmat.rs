//! Exact integer linear algebra: Hermite and Smith forms, rational lattices,
//! and row echelon over a prime field.
//!
//! Pivots are always the entry of minimal absolute value, ties broken by
//! row-major position.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntVec = Vec<BigInt>;
pub type RatVec = Vec<BigRational>;

/// Full-rank-in-its-span lattice in `ℤ^dim`, stored as its reduced Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: Vec<IntVec>,
    pivots: Vec<usize>,
}

fn sub_mul(target: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(src) {
        *t -= q * s;
    }
}

impl Lattice {
    pub fn zero(dim: usize) -> Self {
        Lattice { dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_generators(dim: usize, gens: &[IntVec]) -> Self {
        let mut rows: Vec<IntVec> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
        for r in &rows {
            assert_eq!(r.len(), dim, "generator dimension mismatch");
        }
        let mut basis = Vec::new();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..dim {
            loop {
                let pick = rows[top..]
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| !r[col].is_zero())
                    .min_by(|(i, a), (j, b)| a[col].abs().cmp(&b[col].abs()).then(i.cmp(j)))
                    .map(|(i, _)| i + top);
                let Some(p) = pick else { break };
                rows.swap(top, p);
                let pivot_row = rows[top].clone();
                let mut done = true;
                for r in rows.iter_mut().skip(top + 1) {
                    if r[col].is_zero() {
                        continue;
                    }
                    let q = r[col].div_floor(&pivot_row[col]);
                    sub_mul(r, &pivot_row, &q);
                    if !r[col].is_zero() {
                        done = false;
                    }
                }
                if done {
                    if rows[top][col].is_negative() {
                        for x in rows[top].iter_mut() {
                            *x = -x.clone();
                        }
                    }
                    pivots.push(col);
                    top += 1;
                    break;
                }
            }
            if top == rows.len() {
                break;
            }
        }
        rows.truncate(top);
        for (k, &col) in pivots.iter().enumerate() {
            let pivot_row = rows[k].clone();
            for upper in rows.iter_mut().take(k) {
                let q = upper[col].div_floor(&pivot_row[col]);
                sub_mul(upper, &pivot_row, &q);
            }
        }
        basis.extend(rows);
        Lattice { dim, basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IntVec] {
        &self.basis
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut r = v.to_vec();
        for (row, &col) in self.basis.iter().zip(&self.pivots) {
            if r[col].is_zero() {
                continue;
            }
            let (q, rem) = r[col].div_rem(&row[col]);
            if !rem.is_zero() {
                return false;
            }
            sub_mul(&mut r, row, &q);
        }
        r.iter().all(|x| x.is_zero())
    }

    /// Canonical coset representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &[BigInt]) -> IntVec {
        let mut r = v.to_vec();
        for (row, &col) in self.basis.iter().zip(&self.pivots) {
            let q = r[col].div_floor(&row[col]);
            sub_mul(&mut r, row, &q);
        }
        r
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn join(&self, other: &Lattice) -> Lattice {
        let gens: Vec<IntVec> = self.basis.iter().chain(&other.basis).cloned().collect();
        Lattice::from_generators(self.dim, &gens)
    }

    /// Index-like size of the quotient of `ℤ^dim` upper bound: product of pivots.
    pub fn pivot_product(&self) -> BigInt {
        self.basis.iter().zip(&self.pivots).map(|(r, &c)| r[c].clone()).product()
    }
}

/// Lattice in `ℚ^dim`: `den⁻¹ · inner`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatLattice {
    den: BigInt,
    inner: Lattice,
}

fn lcm_denoms<'a>(vs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    vs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn scale_to_int(v: &[BigRational], den: &BigInt) -> Option<IntVec> {
    v.iter()
        .map(|x| {
            let y = x * BigRational::from_integer(den.clone());
            y.is_integer().then(|| y.to_integer())
        })
        .collect()
}

impl RatLattice {
    pub fn from_generators(dim: usize, gens: &[RatVec]) -> Self {
        let den = lcm_denoms(gens.iter().flatten());
        let ints: Vec<IntVec> = gens.iter().map(|g| scale_to_int(g, &den).expect("common denominator")).collect();
        RatLattice { den, inner: Lattice::from_generators(dim, &ints) }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn rank(&self) -> usize {
        self.inner.rank()
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        match scale_to_int(v, &self.den) {
            Some(iv) => self.inner.contains(&iv),
            None => false,
        }
    }

    pub fn basis(&self) -> Vec<RatVec> {
        self.inner
            .basis
            .iter()
            .map(|r| r.iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect())
            .collect()
    }

    pub fn contains_lattice(&self, other: &RatLattice) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    pub fn same_as(&self, other: &RatLattice) -> bool {
        self.contains_lattice(other) && other.contains_lattice(self)
    }
}

/// Nonzero Smith invariants (positive, each dividing the next) of an integer matrix.
pub fn smith_diagonal(matrix: &[IntVec], cols: usize, cap: usize) -> Result<Vec<BigInt>> {
    if matrix.len().saturating_mul(cols) > cap {
        return Err(Error::MatrixTooLarge(format!("{}×{cols} exceeds cap {cap}", matrix.len())));
    }
    let mut a: Vec<IntVec> = matrix.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut diag = Vec::new();
    let mut t = 0;
    loop {
        let rows = a.len();
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&p);
                let pivot_row = a[t].clone();
                sub_mul(&mut a[i], &pivot_row, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&p);
                for r in a.iter_mut() {
                    let v = &q * &r[t];
                    r[j] -= v;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| {
                    !(&a[i][j] % &p).is_zero()
                });
                match bad {
                    None => break,
                    Some((i, _)) => {
                        let src = a[i].clone();
                        for (x, y) in a[t].iter_mut().zip(&src) {
                            *x += y;
                        }
                        continue;
                    }
                }
            }
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if (i == t || j == t) && !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let (bi, bj) = best.expect("nonzero pivot cross");
            a.swap(t, bi);
            for r in a.iter_mut() {
                r.swap(t, bj);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
        if t == a.len() || t == cols {
            break;
        }
    }
    Ok(diag)
}

/// Row echelon over `𝔽_p`.
#[derive(Clone, Debug)]
pub struct FpEchelon {
    p: u64,
    dim: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl FpEchelon {
    pub fn new(p: u64, dim: usize) -> Self {
        FpEchelon { p, dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn inv(&self, a: u64) -> u64 {
        let mut result = 1u64;
        let mut base = a % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        result
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut r: Vec<u64> = v.iter().map(|x| x % self.p).collect();
        for (col, row) in &self.rows {
            let f = r[*col];
            if f != 0 {
                for (x, y) in r.iter_mut().zip(row) {
                    *x = (*x + self.p - f * y % self.p) % self.p;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.dim);
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Inserts `v`, returning whether the span grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let mut r = self.reduce(v);
        let Some(col) = r.iter().position(|&x| x != 0) else { return false };
        let inv = self.inv(r[col]);
        for x in r.iter_mut() {
            *x = *x * inv % self.p;
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[col];
            if f != 0 {
                for (x, y) in row.iter_mut().zip(&r) {
                    *x = (*x + self.p - f * y % self.p) % self.p;
                }
            }
        }
        self.rows.push((col, r));
        true
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}
