//! HNN extensions of abelian base groups, decided by Britton reduction.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::freewords::{Alphabet, Word};
use crate::intmat::{RatLattice, RatVec};

use super::companion::{mat_inverse, mat_vec, rat, ModVec, ModuleGroupSpec, RatMatrix};
use super::{hash_str, GroupOracle, MarkedGroup, NfKey, Verdict3};

/// Abelian base group with two associated subgroups and an isomorphism
/// `iso: A_in → A_out`; the stable letter is generator 0.
pub trait HnnBase: Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;
    fn alphabet(&self) -> &Alphabet;
    fn zero(&self) -> Self::Elem;
    /// Image of base generator `gen ≥ 1`.
    fn letter(&self, gen: u16) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn in_a_in(&self, a: &Self::Elem) -> bool;
    fn in_a_out(&self, a: &Self::Elem) -> bool;
    fn iso(&self, a: &Self::Elem) -> Self::Elem;
    fn iso_inv(&self, a: &Self::Elem) -> Self::Elem;
    fn describe(&self, a: &Self::Elem) -> String;
}

/// Pinch-free form `g_0 t^{e_1} g_1 … t^{e_k} g_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BrittonForm<E> {
    pub bases: Vec<E>,
    pub stable: Vec<i8>,
    pub pinches: usize,
}

impl<E> BrittonForm<E> {
    pub fn stable_len(&self) -> usize {
        self.stable.len()
    }
}

pub fn britton_reduce<B: HnnBase>(base: &B, w: &Word) -> BrittonForm<B::Elem> {
    let mut bases = vec![base.zero()];
    let mut stable: Vec<i8> = Vec::new();
    let mut pinches = 0;
    for l in w.letters() {
        if l.gen == 0 {
            let e: i8 = if l.inv { -1 } else { 1 };
            if stable.last() == Some(&-e) {
                let g = bases.last().expect("nonempty");
                // t g t⁻¹ with g ∈ A_in, or t⁻¹ g t with g ∈ A_out.
                let image = if e == -1 && base.in_a_in(g) {
                    Some(base.iso(g))
                } else if e == 1 && base.in_a_out(g) {
                    Some(base.iso_inv(g))
                } else {
                    None
                };
                if let Some(img) = image {
                    bases.pop();
                    stable.pop();
                    let last = bases.last_mut().expect("nonempty");
                    *last = base.add(last, &img);
                    pinches += 1;
                    continue;
                }
            }
            stable.push(e);
            bases.push(base.zero());
        } else {
            let mut g = base.letter(l.gen);
            if l.inv {
                g = base.neg(&g);
            }
            let last = bases.last_mut().expect("nonempty");
            *last = base.add(last, &g);
        }
    }
    BrittonForm { bases, stable, pinches }
}

pub fn britton_trivial<B: HnnBase>(base: &B, w: &Word) -> bool {
    let f = britton_reduce(base, w);
    f.stable.is_empty() && base.is_zero(&f.bases[0])
}

/// Base a sublattice of `ℚ^r`, associated subgroups given as lattices.
#[derive(Clone, Debug)]
pub struct LatticeHnn {
    alphabet: Alphabet,
    base: RatLattice,
    a_in: RatLattice,
    a_out: RatLattice,
    iso: RatMatrix,
    iso_inv: RatMatrix,
    letters: Vec<RatVec>,
}

impl LatticeHnn {
    pub fn new(
        alphabet: Alphabet,
        base: RatLattice,
        a_in: RatLattice,
        a_out: RatLattice,
        iso: RatMatrix,
        letters: Vec<RatVec>,
    ) -> Result<Self> {
        let iso_inv = mat_inverse(&iso).ok_or_else(|| Error::IllFormedHnn("iso is singular".into()))?;
        if letters.len() + 1 != alphabet.len() {
            return Err(Error::IllFormedHnn("one base letter per non-stable generator".into()));
        }
        if !base.contains_lattice(&a_in) || !base.contains_lattice(&a_out) {
            return Err(Error::IllFormedHnn("associated subgroups must lie in the base".into()));
        }
        if letters.iter().any(|l| !base.contains(l)) {
            return Err(Error::IllFormedHnn("base letter outside base lattice".into()));
        }
        let image = RatLattice::from_generators(a_in.dim(), &a_in.basis().iter().map(|b| mat_vec(&iso, b)).collect::<Vec<_>>());
        if !image.same_as(&a_out) {
            return Err(Error::IllFormedHnn("iso(A_in) ≠ A_out".into()));
        }
        Ok(LatticeHnn { alphabet, base, a_in, a_out, iso, iso_inv, letters })
    }

    pub fn base(&self) -> &RatLattice {
        &self.base
    }
}

impl HnnBase for LatticeHnn {
    type Elem = RatVec;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn zero(&self) -> RatVec {
        vec![BigRational::zero(); self.base.dim()]
    }

    fn letter(&self, gen: u16) -> RatVec {
        self.letters[gen as usize - 1].clone()
    }

    fn add(&self, a: &RatVec, b: &RatVec) -> RatVec {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn neg(&self, a: &RatVec) -> RatVec {
        a.iter().map(|x| -x).collect()
    }

    fn is_zero(&self, a: &RatVec) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    fn in_a_in(&self, a: &RatVec) -> bool {
        self.a_in.contains(a)
    }

    fn in_a_out(&self, a: &RatVec) -> bool {
        self.a_out.contains(a)
    }

    fn iso(&self, a: &RatVec) -> RatVec {
        mat_vec(&self.iso, a)
    }

    fn iso_inv(&self, a: &RatVec) -> RatVec {
        mat_vec(&self.iso_inv, a)
    }

    fn describe(&self, a: &RatVec) -> String {
        let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Base: lamps supported on `[0, n]` over `ℤ/q` (`ℤ` if `q = 0`); associated
/// subgroups are supports in `[0, n−1]` and `[1, n]`, iso is the unit shift.
#[derive(Clone, Debug)]
pub struct LampHnn {
    alphabet: Alphabet,
    q: u64,
    n: i64,
}

impl LampHnn {
    pub fn new(q: u64, n: i64) -> Result<Self> {
        if n < 1 {
            return Err(Error::IllFormedHnn("lamp window needs n ≥ 1".into()));
        }
        Ok(LampHnn { alphabet: Alphabet::from_str_static("tx"), q, n })
    }
}

impl HnnBase for LampHnn {
    type Elem = BTreeMap<i64, i64>;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn zero(&self) -> Self::Elem {
        BTreeMap::new()
    }

    fn letter(&self, _gen: u16) -> Self::Elem {
        BTreeMap::from([(0, 1)])
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = a.clone();
        for (k, v) in b {
            let e = out.entry(*k).or_insert(0);
            *e = if self.q == 0 { *e + v } else { (*e + v).rem_euclid(self.q as i64) };
            if *e == 0 {
                out.remove(k);
            }
        }
        out
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter()
            .map(|(k, v)| (*k, if self.q == 0 { -v } else { (-v).rem_euclid(self.q as i64) }))
            .filter(|(_, v)| *v != 0)
            .collect()
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_empty()
    }

    fn in_a_in(&self, a: &Self::Elem) -> bool {
        a.keys().all(|&k| (0..self.n).contains(&k))
    }

    fn in_a_out(&self, a: &Self::Elem) -> bool {
        a.keys().all(|&k| (1..=self.n).contains(&k))
    }

    fn iso(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|(k, v)| (k + 1, *v)).collect()
    }

    fn iso_inv(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|(k, v)| (k - 1, *v)).collect()
    }

    fn describe(&self, a: &Self::Elem) -> String {
        format!("{a:?}")
    }
}

/// Marked HNN group; an optional module image serves as fingerprint.
pub struct HnnGroup<B: HnnBase> {
    base: B,
    image: Option<ModuleGroupSpec>,
}

impl<B: HnnBase> HnnGroup<B> {
    pub fn new(base: B, image: Option<ModuleGroupSpec>) -> Self {
        HnnGroup { base, image }
    }

    pub fn base(&self) -> &B {
        &self.base
    }
}

impl<B: HnnBase> GroupOracle for HnnGroup<B> {
    fn alphabet(&self) -> &Alphabet {
        self.base.alphabet()
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        Verdict3::from_bool(britton_trivial(&self.base, w))
    }

    fn normal_form(&self, _w: &Word) -> Option<NfKey> {
        None
    }

    fn fingerprint(&self, w: &Word) -> u64 {
        match &self.image {
            Some(spec) => {
                let (v, k) = spec.eval(w);
                hash_str(&format!("{}|{k}", v.key()))
            }
            None => 0,
        }
    }
}

/// `BS(m, n) = ⟨t, x | t x^m t⁻¹ = x^n⟩` as an HNN extension of `ℤ`.
pub fn bs_hnn(m: u64, n: u64) -> Result<LatticeHnn> {
    if m == 0 || n == 0 {
        return Err(Error::ParamError("bs parameters must be nonzero".into()));
    }
    let one = vec![vec![BigRational::one()]];
    LatticeHnn::new(
        Alphabet::from_str_static("tx"),
        RatLattice::from_generators(1, &one),
        RatLattice::from_generators(1, &[vec![rat(m as i64, 1)]]),
        RatLattice::from_generators(1, &[vec![rat(n as i64, 1)]]),
        vec![vec![rat(n as i64, m as i64)]],
        vec![vec![BigRational::one()]],
    )
}

pub fn bs_group(m: u64, n: u64) -> Result<MarkedGroup> {
    let image = ModuleGroupSpec::bs_module(m, n)?;
    Ok(MarkedGroup::new(format!("bs({m},{n})"), format!("BS({m},{n})"), HnnGroup::new(bs_hnn(m, n)?, Some(image))))
}

/// Either flavour of the HNN quotient `G_n` of a module group.
pub enum GnBase {
    Lattice(LatticeHnn),
    Lamp(LampHnn),
}

/// `G_n`: HNN extension of `M_[0,n]` along `t: M_[0,n−1] → M_[1,n]`.
pub fn gn_base(spec: &ModuleGroupSpec, n: i64) -> Result<GnBase> {
    if n < 1 {
        return Err(Error::ParamError("G_n needs n ≥ 1".into()));
    }
    match &spec.kind {
        super::companion::ModuleKind::Lamp { q } => Ok(GnBase::Lamp(LampHnn::new(*q, n)?)),
        super::companion::ModuleKind::Rational { matrix, gens, .. } => {
            let base = spec.mrange_lattice(0, n);
            let a_in = spec.mrange_lattice(0, n - 1);
            let a_out = spec.mrange_lattice(1, n);
            Ok(GnBase::Lattice(LatticeHnn::new(spec.alphabet.clone(), base, a_in, a_out, matrix.clone(), gens.clone())?))
        }
    }
}

pub fn gn_group(spec: &ModuleGroupSpec, n: i64) -> Result<MarkedGroup> {
    let s = format!("gn({},{n})", spec.spec);
    let name = format!("G_{n}[{}]", spec.spec);
    Ok(match gn_base(spec, n)? {
        GnBase::Lattice(b) => MarkedGroup::new(s, name, HnnGroup::new(b, Some(spec.clone()))),
        GnBase::Lamp(b) => MarkedGroup::new(s, name, HnnGroup::new(b, Some(spec.clone()))),
    })
}

impl GnBase {
    pub fn trivial(&self, w: &Word) -> bool {
        match self {
            GnBase::Lattice(b) => britton_trivial(b, w),
            GnBase::Lamp(b) => britton_trivial(b, w),
        }
    }

    /// `(stable letters, pinches)` of the Britton form.
    pub fn reduce_summary(&self, w: &Word) -> (usize, usize) {
        match self {
            GnBase::Lattice(b) => {
                let f = britton_reduce(b, w);
                (f.stable_len(), f.pinches)
            }
            GnBase::Lamp(b) => {
                let f = britton_reduce(b, w);
                (f.stable_len(), f.pinches)
            }
        }
    }

    /// Evaluation of a `t`-free-after-reduction word as a base element, if it is one.
    pub fn base_element(&self, w: &Word) -> Option<ModVec> {
        match self {
            GnBase::Lattice(b) => {
                let f = britton_reduce(b, w);
                f.stable.is_empty().then(|| ModVec::Rat(f.bases[0].clone()))
            }
            GnBase::Lamp(b) => {
                let f = britton_reduce(b, w);
                f.stable.is_empty().then(|| ModVec::Lamp(f.bases[0].clone()))
            }
        }
    }
}
