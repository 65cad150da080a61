//! Endomorphism systems `(G, H, φ_1..φ_r)`, their kernel chains `K_n` and the
//! relation-range witnesses of their limit groups.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::cayley::ball::{ball_capped, enumerate_relations};
use crate::certify::witness::{CheckMode, QuotientWitness};
use crate::error::{Error, Result};
use crate::freewords::{GroupHom, Word};
use crate::oracles::companion::companion_limit_group;
use crate::oracles::grigorchuk::{self, fp_reduce, free_product_c2v4, grigorchuk_group, letters_word, word_letters};
use crate::oracles::hnn::bs_group;
use crate::oracles::{hash_str, GroupOracle, MarkedGroup, NfKey, Verdict3};

use super::witnesses::RangeWitnessReport;

/// Levels tried when locating a relation in the chain.
pub const MAX_LEVEL: usize = 12;
/// Default number of `H`-elements searched for hypotheses (1) and (3).
pub const SEARCH_BOUND: usize = 100_000;

type Rewrite = Arc<dyn Fn(&Word) -> Option<Vec<(usize, bool)>> + Send + Sync>;
type Simplify = Arc<dyn Fn(&Word) -> Word + Send + Sync>;

pub struct EndomorphismSystem {
    pub name: String,
    pub g: MarkedGroup,
    pub limit: MarkedGroup,
    /// Generators of `H` as words in `G`.
    pub h_gens: Vec<Word>,
    rewrite: Rewrite,
    simplify: Simplify,
    /// `images[i][j] = φ_i(h_j)`.
    pub images: Vec<Vec<Word>>,
    pub reps: Vec<Word>,
    /// `perm[i][j] = k` with `φ_i ∘ μ_{x_j} = φ_k`.
    pub perm: Vec<Vec<usize>>,
    /// Per `H`-generator, a diagonal preimage `h` with `φ_i(h) = h_j` for all `i`.
    pub sigma: Vec<Word>,
    pub c_sigma: usize,
    /// Nontrivial element of `⋂ ker φ_i`.
    pub kernel_witness: Word,
    /// Why hypothesis (3) failed, for systems assembled without it.
    pub sigma_failure: Option<String>,
    chain_lift: Option<Simplify>,
    cache: Mutex<HashMap<(NfKey, usize), bool>>,
}

/// Raw data of a system before its hypotheses are checked.
pub struct SystemData {
    pub name: String,
    pub g: MarkedGroup,
    pub limit: MarkedGroup,
    /// Group deciding the diagonal targets of the `Σ` search.
    pub target: MarkedGroup,
    pub h_gens: Vec<Word>,
    pub rewrite: Rewrite,
    pub simplify: Simplify,
    pub images: Vec<Vec<Word>>,
    pub reps: Vec<Word>,
    /// Lift used when no `Σ` table exists: `w ∈ K_n ⇒ lift(w) ∈ K_{n+1}` is checked, not assumed.
    pub chain_lift: Option<Simplify>,
}

impl std::fmt::Debug for EndomorphismSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EndomorphismSystem").field("name", &self.name).field("c_sigma", &self.c_sigma).finish()
    }
}

impl EndomorphismSystem {
    pub fn r(&self) -> usize {
        self.images.len()
    }

    pub fn in_h(&self, w: &Word) -> bool {
        (self.rewrite)(w).is_some()
    }

    /// `φ_i(w)` for `w ∈ H`.
    pub fn apply(&self, i: usize, w: &Word) -> Option<Word> {
        let parts = (self.rewrite)(w)?;
        Some(map_parts(&self.images[i], &parts, &self.simplify))
    }

    /// Diagonal lift through `Σ`: `φ_i(lift(w)) = w` for every `i`, up to the `Σ` targets.
    pub fn lift(&self, w: &Word) -> Option<Word> {
        if self.sigma_failure.is_some() {
            return self.chain_lift.as_ref().map(|f| f(w));
        }
        let parts = (self.rewrite)(w)?;
        Some(map_parts(&self.sigma, &parts, &self.simplify))
    }

    pub fn k_membership(&self, w: &Word, n: usize) -> bool {
        let w = (self.simplify)(w);
        let key = self.g.normal_form(&w).map(|k| (k, n));
        if let Some(k) = &key {
            if let Some(&v) = self.cache.lock().expect("cache").get(k) {
                return v;
            }
        }
        let v = if n == 0 {
            self.g.is_identity(&w) == Verdict3::True
        } else {
            match (self.rewrite)(&w) {
                None => false,
                Some(parts) => (0..self.r()).all(|i| self.k_membership(&map_parts(&self.images[i], &parts, &self.simplify), n - 1)),
            }
        };
        if let Some(k) = key {
            self.cache.lock().expect("cache").insert(k, v);
        }
        v
    }

    /// Smallest `n ≤ max` with `w ∈ K_n`.
    pub fn level(&self, w: &Word, max: usize) -> Option<usize> {
        (0..=max).find(|&n| self.k_membership(w, n))
    }

    /// `e_1 = ` kernel witness, `e_{n+1} = lift(e_n)`; `e_n ∈ K_n ∖ K_{n−1}`.
    pub fn chain(&self, depth: usize) -> Vec<Word> {
        let mut out = vec![self.kernel_witness.clone()];
        while out.len() < depth {
            let next = self.lift(out.last().expect("nonempty")).expect("lifts lie in H");
            out.push(next);
        }
        out
    }
}

fn map_parts(images: &[Word], parts: &[(usize, bool)], simplify: &Simplify) -> Word {
    let mut w = Word::empty();
    for &(j, inv) in parts {
        w = if inv { w.mul(&images[j].inverse()) } else { w.mul(&images[j]) };
    }
    simplify(&w)
}

/// Checks hypotheses (2), (1) and (3) in that order and fills the tables.
pub fn build_endo_system(data: SystemData, search_bound: usize) -> Result<EndomorphismSystem> {
    let sys = assemble_endo_system(data, search_bound)?;
    match &sys.sigma_failure {
        Some(reason) => Err(Error::HypothesisFailed(3, reason.clone())),
        None => Ok(sys),
    }
}

/// As [`build_endo_system`], but a failed `Σ` search is recorded instead of returned.
pub fn assemble_endo_system(data: SystemData, search_bound: usize) -> Result<EndomorphismSystem> {
    let r = data.images.len();
    if r == 0 || data.images.iter().any(|im| im.len() != data.h_gens.len()) {
        return Err(Error::ParamError("one image per H-generator is required".into()));
    }
    let mut sys = EndomorphismSystem {
        name: data.name,
        g: data.g,
        limit: data.limit,
        h_gens: data.h_gens,
        rewrite: data.rewrite,
        simplify: data.simplify,
        images: data.images,
        reps: data.reps,
        perm: Vec::new(),
        sigma: Vec::new(),
        c_sigma: 0,
        kernel_witness: Word::empty(),
        sigma_failure: None,
        chain_lift: data.chain_lift,
        cache: Mutex::new(HashMap::new()),
    };
    for i in 0..r {
        let mut row = Vec::new();
        for x in sys.reps.iter() {
            let conj: Vec<Word> = sys.h_gens.iter().map(|h| h.conjugate_by(x)).collect();
            let k = (0..r).find(|&k| {
                conj.iter().enumerate().all(|(s, c)| match sys.apply(i, c) {
                    Some(img) => sys.g.same_element(&img, &sys.images[k][s]).unwrap_or(false),
                    None => false,
                })
            });
            match k {
                Some(k) => row.push(k),
                None => return Err(Error::HypothesisFailed(2, format!("φ_{i} ∘ μ_{} matches no φ_k", sys.g.format(x)))),
            }
        }
        sys.perm.push(row);
    }
    // Largest ball within the search bound, up to radius 16.
    let mut b = ball_capped(&sys.g, 1, search_bound)?;
    for radius in 2..=16 {
        match ball_capped(&sys.g, radius, search_bound) {
            Ok(next) => b = next,
            Err(Error::BudgetExceeded(_)) => break,
            Err(e) => return Err(e),
        }
    }
    sys.kernel_witness = b
        .vertices
        .iter()
        .skip(1)
        .find(|h| sys.in_h(h) && (0..r).all(|i| sys.g.is_identity(&sys.apply(i, h).expect("in H")) == Verdict3::True))
        .cloned()
        .ok_or_else(|| Error::HypothesisFailed(1, format!("no kernel element within {} H-elements", b.len())))?;
    let mut sigma = Vec::new();
    for (j, target_word) in sys.h_gens.iter().enumerate() {
        let found = b.vertices.iter().find(|h| {
            sys.in_h(h)
                && (0..r).all(|i| {
                    let img = sys.apply(i, h).expect("in H");
                    data.target.is_identity(&img.mul(&target_word.inverse())) == Verdict3::True
                })
        });
        match found {
            Some(h) => sigma.push(h.clone()),
            None => {
                sys.sigma_failure =
                    Some(format!("no diagonal preimage of {} (generator {j}) within {} elements", sys.g.format(target_word), b.len()));
                return Ok(sys);
            }
        }
    }
    sys.c_sigma = sigma.iter().map(Word::len).max().unwrap_or(0);
    sys.sigma = sigma;
    Ok(sys)
}

/// `BS(2,3)` with `φ: x ↦ x², t ↦ t` and `H = G`; the limit is `ℤ[1/6] ⋊ ℤ`.
pub fn bs23_data() -> Result<SystemData> {
    let g = bs_group(2, 3)?;
    let a = g.alphabet().clone();
    let phi = GroupHom::from_strings(&a, &a, &[('t', "t"), ('x', "xx")])?;
    let h_gens = vec![a.parse("t")?, a.parse("x")?];
    Ok(SystemData {
        name: "bs23".into(),
        limit: companion_limit_group(2, 3, 1)?,
        target: g.clone(),
        g,
        images: vec![h_gens.iter().map(|h| phi.apply(h)).collect()],
        h_gens,
        rewrite: Arc::new(|w: &Word| Some(w.letters().iter().map(|l| (l.gen as usize, l.inv)).collect())),
        simplify: Arc::new(|w: &Word| w.clone()),
        reps: vec![Word::empty()],
        chain_lift: None,
    })
}

/// `C₂ ∗ (C₂ × C₂)` with `H` the words with evenly many `a`s, generated by
/// `b, c, d, aba, aca, ada`, and `φ_0, φ_1` the two wreath sections.
pub fn grigorchuk_data() -> Result<SystemData> {
    let g = free_product_c2v4();
    let a = g.alphabet().clone();
    let h_gens: Vec<Word> = ["b", "c", "d", "aba", "aca", "ada"].iter().map(|s| a.parse(s)).collect::<Result<_>>()?;
    let phi0: Vec<Word> = ["a", "a", "", "c", "d", "b"].iter().map(|s| a.parse(s)).collect::<Result<_>>()?;
    // φ_1 = φ_0 ∘ μ_a.
    let phi1: Vec<Word> = ["c", "d", "b", "a", "a", ""].iter().map(|s| a.parse(s)).collect::<Result<_>>()?;
    Ok(SystemData {
        name: "grigorchuk".into(),
        limit: grigorchuk_group(),
        target: grigorchuk_group(),
        g,
        images: vec![phi0, phi1],
        h_gens,
        rewrite: Arc::new(grigorchuk_rewrite),
        simplify: Arc::new(|w: &Word| letters_word(&fp_reduce(word_letters(w)))),
        reps: vec![Word::empty(), a.parse("a").expect("letter")],
        chain_lift: Some(Arc::new(lysenok_substitution)),
    })
}

/// `a ↦ aca, b ↦ d, c ↦ b, d ↦ c`; the second section of `σ(w)` is `w` letter for letter.
pub fn lysenok_substitution(w: &Word) -> Word {
    let img: Vec<u8> = fp_reduce(word_letters(w))
        .into_iter()
        .flat_map(|l| match l {
            grigorchuk::A => vec![grigorchuk::A, grigorchuk::C, grigorchuk::A],
            grigorchuk::B => vec![grigorchuk::D],
            grigorchuk::C => vec![grigorchuk::B],
            _ => vec![grigorchuk::C],
        })
        .collect();
    letters_word(&fp_reduce(img))
}

/// `τ` with `τ(φ_0(h)) = swap_{a↔d}(τ(φ_1(h)))` for every `h ∈ H`; a diagonal
/// pair `(g, g)` can only be an image if `τ(g)` is fixed by the swap, i.e. trivial.
pub fn grigorchuk_tau(w: &Word) -> Word {
    let img: Vec<u8> = word_letters(w)
        .into_iter()
        .filter_map(|l| match l {
            grigorchuk::A => Some(grigorchuk::D),
            grigorchuk::B => None,
            _ => Some(grigorchuk::A),
        })
        .collect();
    letters_word(&fp_reduce(img))
}

fn grigorchuk_rewrite(w: &Word) -> Option<Vec<(usize, bool)>> {
    let mut odd = false;
    let mut out = Vec::new();
    for l in fp_reduce(word_letters(w)) {
        if l == grigorchuk::A {
            odd = !odd;
        } else {
            out.push(((l - 1) as usize + if odd { 3 } else { 0 }, false));
        }
    }
    (!odd).then_some(out)
}

pub fn bs23_system() -> Result<Arc<EndomorphismSystem>> {
    static SYS: OnceLock<std::result::Result<Arc<EndomorphismSystem>, Error>> = OnceLock::new();
    SYS.get_or_init(|| Ok(Arc::new(build_endo_system(bs23_data()?, SEARCH_BOUND)?))).clone()
}

pub fn grigorchuk_system() -> Result<Arc<EndomorphismSystem>> {
    static SYS: OnceLock<std::result::Result<Arc<EndomorphismSystem>, Error>> = OnceLock::new();
    SYS.get_or_init(|| Ok(Arc::new(assemble_endo_system(grigorchuk_data()?, SEARCH_BOUND)?))).clone()
}

pub fn system_by_name(name: &str) -> Result<Arc<EndomorphismSystem>> {
    match name.trim() {
        "bs23" => bs23_system(),
        "grigorchuk" => grigorchuk_system(),
        other => Err(Error::UnknownGroupSpec(format!("endomorphism system {other}"))),
    }
}

/// `G / K_n`, decided by the `K_n` recursion.
pub struct KQuotient {
    sys: Arc<EndomorphismSystem>,
    n: usize,
}

impl GroupOracle for KQuotient {
    fn alphabet(&self) -> &crate::freewords::Alphabet {
        self.sys.g.alphabet()
    }

    fn is_identity(&self, w: &Word, _budget: u64) -> Verdict3 {
        Verdict3::from_bool(self.sys.k_membership(w, self.n))
    }

    /// The limit group is a quotient of `G / K_n`.
    fn fingerprint(&self, w: &Word) -> u64 {
        hash_str(&format!("{}", self.sys.limit.fingerprint(w)))
    }
}

pub fn quotient_group(system: &str, n: usize) -> Result<MarkedGroup> {
    let sys = system_by_name(system)?;
    let name = format!("{}/K_{n}", sys.g.name());
    Ok(MarkedGroup::new(format!("kquot({},{n})", sys.name), name, KQuotient { sys, n }))
}

/// Witness at scale `k`, or `None` if every relation of length `≤ k` already holds in `G`.
pub fn endo_witness(sys: &Arc<EndomorphismSystem>, k: usize) -> Result<Option<RangeWitnessReport>> {
    let rels = enumerate_relations(&sys.limit, k)?;
    let mut levels = Vec::with_capacity(rels.len());
    for w in &rels {
        let n = sys
            .level(w, MAX_LEVEL)
            .ok_or_else(|| Error::BudgetExceeded(format!("{} not in K_{MAX_LEVEL}", sys.limit.format(w))))?;
        levels.push(n);
    }
    let Some(&n_k) = levels.iter().max() else { return Ok(None) };
    if n_k == 0 {
        return Ok(None);
    }
    for (w, _) in rels.iter().zip(&levels).filter(|(_, &n)| n == n_k) {
        let Some(lifted) = sys.lift(w) else { continue };
        if sys.limit.is_identity(&lifted) == Verdict3::True && !sys.k_membership(&lifted, n_k) {
            return Ok(Some(RangeWitnessReport {
                method: "endo".into(),
                param: k as i64,
                witness: QuotientWitness {
                    source: sys.limit.clone(),
                    quotient: quotient_group(&sys.name, n_k)?,
                    hom: None,
                    word: lifted,
                    n: k + 1,
                    mode: CheckMode::Exhaustive { bound: k },
                    module: None,
                },
            }));
        }
    }
    Err(Error::HypothesisFailed(3, format!("no Σ-lift of a level-{n_k} relation escapes K_{n_k}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bs23_tables() {
        let sys = bs23_system().unwrap();
        let a = sys.g.alphabet();
        assert_eq!(sys.kernel_witness.len(), 8);
        assert_eq!(a.format(&sys.sigma[1]), "txTX");
        assert_eq!(sys.c_sigma, 4);
        let w = a.parse("txTxtXTX").unwrap();
        assert!(sys.k_membership(&w, 1) && !sys.k_membership(&w, 0));
        assert!(sys.k_membership(&Word::empty(), 0));
    }

    #[test]
    fn grigorchuk_tables() {
        let sys = grigorchuk_system().unwrap();
        let a = sys.g.alphabet();
        assert_eq!(sys.perm[0][1], 1);
        assert_eq!(sys.perm[1][1], 0);
        assert_eq!(a.format(&sys.apply(0, &a.parse("aba").unwrap()).unwrap()), "c");
        let w = a.parse("adadadad").unwrap();
        assert!(sys.k_membership(&w, 1) && !sys.k_membership(&w, 0));
        assert!(sys.kernel_witness.len() <= 16);
        let chain = sys.chain(5);
        for (n, e) in chain.iter().enumerate() {
            assert!(sys.k_membership(e, n + 1) && !sys.k_membership(e, n), "level {n}");
        }
    }

    #[test]
    fn grigorchuk_diagonal_obstruction() {
        let data = grigorchuk_data().unwrap();
        let a = data.g.alphabet().clone();
        let swap = |w: &Word| -> Word {
            let l: Vec<u8> = word_letters(w).into_iter().map(|x| if x == grigorchuk::A { grigorchuk::D } else { grigorchuk::A }).collect();
            letters_word(&fp_reduce(l))
        };
        for h in &data.h_gens {
            let (l, r) = (data.images[0].clone(), data.images[1].clone());
            let j = data.h_gens.iter().position(|x| x == h).unwrap();
            assert_eq!(grigorchuk_tau(&l[j]), swap(&grigorchuk_tau(&r[j])), "{}", a.format(h));
        }
        assert!(!grigorchuk_tau(&a.parse("c").unwrap()).is_empty());
        assert!(matches!(build_endo_system(data, 20_000), Err(Error::HypothesisFailed(3, _))));
    }

    #[test]
    fn bs23_endo_witness() {
        let sys = bs23_system().unwrap();
        for k in [8usize, 12, 16] {
            let t = std::time::Instant::now();
            let r = endo_witness(&sys, k).unwrap().expect("new relation");
            let v = r.verify();
            eprintln!("k={k} |w'|={} {:?} {:?}", r.witness.word.len(), v, t.elapsed());
            assert!(v.is_valid());
            assert!(r.witness.word.len() <= sys.c_sigma * k);
        }
        assert!(endo_witness(&sys, 6).unwrap().is_none());
    }

    #[test]
    fn non_surjective_fails_three() {
        let mut data = bs23_data().unwrap();
        let a = data.g.alphabet().clone();
        data.images = vec![vec![a.parse("tt").unwrap(), a.parse("xx").unwrap()]];
        assert!(matches!(build_endo_system(data, 2000), Err(Error::HypothesisFailed(_, _))));
    }
}
