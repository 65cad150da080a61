//! Groups of the form `M ⋊ ℤ` with `M` abelian: rational modules `ℚ^r` with an
//! invertible action matrix, and lamp modules `(ℤ/q)[t^{±1}]` or `ℤ[t^{±1}]`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::freewords::{Alphabet, Word};
use crate::intmat::{RatLattice, RatVec};

use super::{hash_str, GroupOracle, MarkedGroup, NfKey, Verdict3};

pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn mat_vec(m: &RatMatrix, v: &[BigRational]) -> RatVec {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn mat_inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let r = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.extend((0..r).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for col in 0..r {
        let p = (col..r).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot = a[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[r..].to_vec()).collect())
}

/// Coefficient ring of a lamp module: `ℤ/q`, or `ℤ` when `q == 0`.
fn lamp_norm(q: u64, v: i64) -> i64 {
    if q == 0 {
        v
    } else {
        v.rem_euclid(q as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    Rational { matrix: RatMatrix, inverse: RatMatrix, gens: Vec<RatVec> },
    Lamp { q: u64 },
}

/// Element of the module `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModVec {
    Rat(RatVec),
    Lamp(BTreeMap<i64, i64>),
}

impl ModVec {
    pub fn is_zero(&self) -> bool {
        match self {
            ModVec::Rat(v) => v.iter().all(|x| x.is_zero()),
            ModVec::Lamp(m) => m.is_empty(),
        }
    }

    pub fn key(&self) -> String {
        let mut s = String::new();
        match self {
            ModVec::Rat(v) => {
                for x in v {
                    let _ = write!(s, "{x},");
                }
            }
            ModVec::Lamp(m) => {
                for (k, v) in m {
                    let _ = write!(s, "{k}:{v},");
                }
            }
        }
        s
    }
}

/// `M ⋊ ℤ` with stable letter `t` (generator 0) and lamp generators `m_1..m_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleGroupSpec {
    pub spec: String,
    pub kind: ModuleKind,
    pub alphabet: Alphabet,
}

const LAMP_NAMES: &str = "xyzuvw";

impl ModuleGroupSpec {
    pub fn rational(spec: impl Into<String>, matrix: RatMatrix, gens: Vec<RatVec>) -> Result<Self> {
        let r = matrix.len();
        if r == 0 || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::ParamError("action matrix must be square and nonempty".into()));
        }
        if gens.is_empty() || gens.len() > LAMP_NAMES.len() || gens.iter().any(|g| g.len() != r) {
            return Err(Error::ParamError("bad lamp generators".into()));
        }
        let inverse = mat_inverse(&matrix).ok_or_else(|| Error::ParamError("action matrix is singular".into()))?;
        let alphabet = Alphabet::new(std::iter::once('t').chain(LAMP_NAMES.chars().take(gens.len())))?;
        Ok(ModuleGroupSpec { spec: spec.into(), kind: ModuleKind::Rational { matrix, inverse, gens }, alphabet })
    }

    pub fn lamp(spec: impl Into<String>, q: u64) -> Self {
        ModuleGroupSpec { spec: spec.into(), kind: ModuleKind::Lamp { q }, alphabet: Alphabet::from_str_static("tx") }
    }

    /// `ℤ[1/m n]^r` with the companion matrix of `X^r − n/m`.
    pub fn companion(m: u64, n: u64, r: usize) -> Result<Self> {
        if m < 1 || n < 1 || r < 1 {
            return Err(Error::ParamError("companion parameters must be positive".into()));
        }
        if m.gcd(&n) != 1 {
            return Err(Error::ParamError(format!("gcd({m},{n}) ≠ 1")));
        }
        let mut matrix = vec![vec![BigRational::zero(); r]; r];
        for i in 1..r {
            matrix[i][i - 1] = BigRational::one();
        }
        matrix[0][r - 1] = rat(n as i64, m as i64);
        let mut e1 = vec![BigRational::zero(); r];
        e1[0] = BigRational::one();
        ModuleGroupSpec::rational(format!("companion({m},{n},{r})"), matrix, vec![e1])
    }

    /// The module of `BS(m, n)`'s metabelian image: `ℚ` with action `× n/m`.
    pub fn bs_module(m: u64, n: u64) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::ParamError("bs parameters must be positive".into()));
        }
        ModuleGroupSpec::rational(format!("bsmod({m},{n})"), vec![vec![rat(n as i64, m as i64)]], vec![vec![BigRational::one()]])
    }

    pub fn lamp_count(&self) -> usize {
        self.alphabet.len() - 1
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            ModuleKind::Rational { matrix, .. } => matrix.len(),
            ModuleKind::Lamp { .. } => 0,
        }
    }

    pub fn zero(&self) -> ModVec {
        match &self.kind {
            ModuleKind::Rational { matrix, .. } => ModVec::Rat(vec![BigRational::zero(); matrix.len()]),
            ModuleKind::Lamp { .. } => ModVec::Lamp(BTreeMap::new()),
        }
    }

    /// `m_j^[k] = t^k m_j t^{−k}`, i.e. `M^k s_j`.
    pub fn shifted(&self, j: usize, k: i64) -> ModVec {
        match &self.kind {
            ModuleKind::Rational { matrix, inverse, gens } => {
                let step = if k >= 0 { matrix } else { inverse };
                let mut v = gens[j].clone();
                for _ in 0..k.unsigned_abs() {
                    v = mat_vec(step, &v);
                }
                ModVec::Rat(v)
            }
            ModuleKind::Lamp { .. } => ModVec::Lamp(BTreeMap::from([(k, 1)])),
        }
    }

    pub fn add(&self, a: &ModVec, b: &ModVec) -> ModVec {
        match (a, b) {
            (ModVec::Rat(x), ModVec::Rat(y)) => ModVec::Rat(x.iter().zip(y).map(|(p, q)| p + q).collect()),
            (ModVec::Lamp(x), ModVec::Lamp(y)) => {
                let q = match self.kind {
                    ModuleKind::Lamp { q } => q,
                    _ => 0,
                };
                let mut out = x.clone();
                for (k, v) in y {
                    let e = out.entry(*k).or_insert(0);
                    *e = lamp_norm(q, *e + v);
                    if *e == 0 {
                        out.remove(k);
                    }
                }
                ModVec::Lamp(out)
            }
            _ => panic!("mixed module vectors"),
        }
    }

    pub fn neg(&self, a: &ModVec) -> ModVec {
        match a {
            ModVec::Rat(x) => ModVec::Rat(x.iter().map(|p| -p).collect()),
            ModVec::Lamp(x) => {
                let q = match self.kind {
                    ModuleKind::Lamp { q } => q,
                    _ => 0,
                };
                ModVec::Lamp(x.iter().map(|(k, v)| (*k, lamp_norm(q, -v))).filter(|(_, v)| *v != 0).collect())
            }
        }
    }

    /// Action of `t^k` on the module.
    pub fn act(&self, v: &ModVec, k: i64) -> ModVec {
        match (&self.kind, v) {
            (ModuleKind::Rational { matrix, inverse, .. }, ModVec::Rat(x)) => {
                let step = if k >= 0 { matrix } else { inverse };
                let mut y = x.clone();
                for _ in 0..k.unsigned_abs() {
                    y = mat_vec(step, &y);
                }
                ModVec::Rat(y)
            }
            (ModuleKind::Lamp { .. }, ModVec::Lamp(m)) => ModVec::Lamp(m.iter().map(|(p, c)| (p + k, *c)).collect()),
            _ => panic!("mixed module vectors"),
        }
    }

    /// `(module element, t-exponent)` of a word.
    pub fn eval(&self, w: &Word) -> (ModVec, i64) {
        match &self.kind {
            ModuleKind::Rational { matrix, inverse, gens } => {
                let mut cur: Vec<RatVec> = gens.clone();
                let mut acc = vec![BigRational::zero(); matrix.len()];
                let mut k = 0i64;
                for l in w.letters() {
                    if l.gen == 0 {
                        let step = if l.inv { inverse } else { matrix };
                        for c in cur.iter_mut() {
                            *c = mat_vec(step, c);
                        }
                        k += l.sign();
                    } else {
                        let c = &cur[l.gen as usize - 1];
                        for (a, b) in acc.iter_mut().zip(c) {
                            if l.inv {
                                *a -= b;
                            } else {
                                *a += b;
                            }
                        }
                    }
                }
                (ModVec::Rat(acc), k)
            }
            ModuleKind::Lamp { q } => {
                let mut lamps: BTreeMap<i64, i64> = BTreeMap::new();
                let mut k = 0i64;
                for l in w.letters() {
                    if l.gen == 0 {
                        k += l.sign();
                    } else {
                        let e = lamps.entry(k).or_insert(0);
                        *e = lamp_norm(*q, *e + l.sign());
                        if *e == 0 {
                            lamps.remove(&k);
                        }
                    }
                }
                (ModVec::Lamp(lamps), k)
            }
        }
    }

    /// Whether `v ∈ M_[u, w]`, the span of `M^k s_j` for `u ≤ k ≤ w`.
    pub fn mrange_contains(&self, v: &ModVec, u: i64, w: i64) -> bool {
        match (&self.kind, v) {
            (ModuleKind::Rational { .. }, ModVec::Rat(x)) => self.mrange_lattice(u, w).contains(x),
            (ModuleKind::Lamp { .. }, ModVec::Lamp(m)) => m.keys().all(|&p| u <= p && p <= w),
            _ => false,
        }
    }

    /// `M_[u, w]` as a rational lattice (rational modules only).
    pub fn mrange_lattice(&self, u: i64, w: i64) -> RatLattice {
        let r = self.rank();
        let mut gens = Vec::new();
        if u <= w {
            for j in 0..self.lamp_count() {
                for k in u..=w {
                    if let ModVec::Rat(x) = self.shifted(j, k) {
                        gens.push(x);
                    }
                }
            }
        }
        RatLattice::from_generators(r, &gens)
    }

    /// Whether `M_[a,b] ⊆ M_[c,d]` (checked on generators).
    pub fn mrange_included(&self, a: i64, b: i64, c: i64, d: i64) -> bool {
        (0..self.lamp_count()).all(|j| (a..=b).all(|k| self.mrange_contains(&self.shifted(j, k), c, d)))
    }

    pub fn group(&self) -> MarkedGroup {
        let name = match &self.kind {
            ModuleKind::Rational { .. } => format!("{} ⋊ Z", self.spec),
            ModuleKind::Lamp { q: 0 } => "Z wr Z".to_string(),
            ModuleKind::Lamp { q } => format!("C{q} wr Z"),
        };
        MarkedGroup::new(self.spec.clone(), name, ModuleGroup { spec: self.clone() })
    }
}

pub struct ModuleGroup {
    spec: ModuleGroupSpec,
}

impl ModuleGroup {
    fn key(&self, w: &Word) -> String {
        let (v, k) = self.spec.eval(w);
        format!("{}|{k}", v.key())
    }
}

impl GroupOracle for ModuleGroup {
    fn alphabet(&self) -> &Alphabet {
        &self.spec.alphabet
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        let (v, k) = self.spec.eval(w);
        Verdict3::from_bool(k == 0 && v.is_zero())
    }

    fn normal_form(&self, w: &Word) -> Option<NfKey> {
        Some(self.key(w))
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        hash_str(&self.key(w))
    }
}

pub fn companion_limit_group(m: u64, n: u64, r: usize) -> Result<MarkedGroup> {
    Ok(ModuleGroupSpec::companion(m, n, r)?.group())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_examples() {
        let g = companion_limit_group(2, 3, 1).unwrap();
        assert_eq!(g.is_identity(&g.parse("t x^2 T x^-3").unwrap()), Verdict3::True);
        assert_eq!(g.is_identity(&g.parse("x txT X tXT").unwrap()), Verdict3::True);
        for k in 1..6 {
            assert_eq!(g.is_identity(&Word::gen_power(1, k)), Verdict3::False);
        }
        assert!(matches!(companion_limit_group(2, 4, 1), Err(Error::ParamError(_))));
    }

    #[test]
    fn companion_rank_two() {
        let g = companion_limit_group(2, 3, 2).unwrap();
        assert_eq!(g.is_identity(&g.parse("t^2 x^2 t^-2 x^-3").unwrap()), Verdict3::True);
        assert_eq!(g.is_identity(&g.parse("t x^2 T x^-3").unwrap()), Verdict3::False);
    }

    #[test]
    fn mrange_examples() {
        let s = ModuleGroupSpec::companion(2, 3, 1).unwrap();
        assert!(s.mrange_contains(&ModVec::Rat(vec![rat(1, 2)]), 0, 1));
        assert!(!s.mrange_contains(&ModVec::Rat(vec![rat(1, 4)]), 0, 1));
        assert!(s.mrange_contains(&ModVec::Rat(vec![rat(1, 1)]), 0, 0));
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let m = vec![vec![rat(0, 1), rat(3, 2)], vec![rat(1, 1), rat(0, 1)]];
        let inv = mat_inverse(&m).unwrap();
        let v = vec![rat(5, 7), rat(-2, 3)];
        assert_eq!(mat_vec(&inv, &mat_vec(&m, &v)), v);
    }
}
