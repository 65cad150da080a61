//! One pass/fail line per acceptance criterion. Exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rrlab::cayley::ball::{ball, relations_from_ball};
use rrlab::cayley::coset::{coset_enumeration, trace, CosetOutcome};
use rrlab::cayley::graphs::GraphBudgets;
use rrlab::cayley::{graph_phi, Graph, PhiVerdict};
use rrlab::certify::certificate::{requested_mode, verify_certificate, Certificate, RequestedMode};
use rrlab::certify::dehn::{check_c7, DehnOutcome};
use rrlab::certify::greendlinger::{greendlinger_new_relator, verify_greendlinger};
use rrlab::certify::{trange_reduce, TRangeOutcome, WitnessVerdict};
use rrlab::constructions::abels::abels_xell;
use rrlab::constructions::endo::{
    bs23_system, build_endo_system, endo_witness, grigorchuk_data, grigorchuk_system, EndomorphismSystem, SEARCH_BOUND,
};
use rrlab::constructions::sc_family::generate;
use rrlab::constructions::witnesses::{bracket_witness, free_pair, lemma_ij_indices, law_witness, wreath_witness};
use rrlab::error::Error;
use rrlab::freewords::{Alphabet, Letter, Word};
use rrlab::oracles::catalog::{parse_module, sc_spec};
use rrlab::oracles::hnn::gn_group;
use rrlab::oracles::{metabelian_law, parse_group, Verdict3};
use rrlab::scalesets::{classify, Kind, Scale, ScaleSet};
use rrlab::scan::{scan, RowVerdict, ScanOptions};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn wreath_witnesses() -> Outcome {
    let mut lengths = Vec::new();
    for spec in ["wreath(c2,z)", "wreath(z,z)"] {
        let module = parse_module(spec).map_err(e)?;
        for n in 1..=6i64 {
            let report = wreath_witness(&module, n).map_err(e)?;
            let len = report.witness.word.len();
            ensure(len == 4 * n as usize + 4, || format!("{spec} n={n}: |w| = {len}"))?;
            let text = Certificate::from_witness("wreath", &report.witness).to_json();
            let cert = Certificate::from_json(&text, "roundtrip").map_err(e)?;
            let mode = requested_mode(&cert, RequestedMode::Exhaustive, 500, n as u64);
            match verify_certificate(&cert, mode).map_err(e)? {
                WitnessVerdict::Valid { checked, .. } => lengths.push((len, checked)),
                other => return Err(format!("{spec} n={n}: {other:?}")),
            }
        }
    }
    Ok(format!("12 witnesses Valid, (length, relations checked) = {lengths:?}"))
}

fn gamma_ranges() -> Outcome {
    let r = scan("partial_wreath(1,3)", &ScanOptions::new(20), None).map_err(e)?;
    let ins = r.lengths(RowVerdict::In);
    let allowed: BTreeSet<usize> = [2, 8, 16].into();
    ensure(ins.contains(&8) && ins.contains(&16), || format!("In = {ins:?}"))?;
    ensure(ins.iter().all(|n| allowed.contains(n)), || format!("stray In in {ins:?}"))?;
    for row in r.rows.iter().filter(|r| r.verdict == RowVerdict::In) {
        let cert = row.certificate.as_ref().ok_or("In row without certificate")?;
        ensure(verify_certificate(cert, None).map_err(e)?.is_valid(), || format!("n={} not re-verified", row.n))?;
    }
    Ok(format!("In = {ins:?}, Out = {:?}, Unknown = {:?}", r.lengths(RowVerdict::Out), r.lengths(RowVerdict::Unknown)))
}

fn rrp_check() -> Outcome {
    let mut checked = 0usize;
    for spec in ["wreath(c2,z)", "companion(2,3,1)"] {
        let module = parse_module(spec).map_err(e)?;
        let g = module.group();
        let rels = relations_from_ball(&ball(&g, 6).map_err(e)?, 11);
        for n in 1..=4i64 {
            let gn = gn_group(&module, n).map_err(e)?;
            for w in rels.iter().filter(|w| w.len() <= 2 * n as usize + 3) {
                match trange_reduce(w, n).map_err(e)? {
                    TRangeOutcome::Conjugated { .. } => {}
                    TRangeOutcome::Fail { range } => return Err(format!("{spec}: {} spans {range}", g.format(w))),
                }
                ensure(gn.is_identity(w) == Verdict3::True, || format!("{spec}: {} nontrivial in G_{n}", g.format(w)))?;
                checked += 1;
            }
            let x = Word::gen_power(1, 1);
            let m = x.conjugate_by(&Word::gen_power(0, n + 1));
            let opt = x.commutator(&m);
            ensure(matches!(trange_reduce(&opt, n).map_err(e)?, TRangeOutcome::Fail { .. }), || format!("{spec}: bracket reduced at n={n}"))?;
        }
    }
    Ok(format!("{checked} relation checks, optimality brackets fail for n = 1..4"))
}

fn bracket_pipeline() -> Outcome {
    let module = parse_module("companion(2,3,1)").map_err(e)?;
    let g = module.group();
    let law = metabelian_law();
    let mut lens = Vec::new();
    for n in 1..=5i64 {
        let r = bracket_witness(&module, n).map_err(e)?;
        ensure(r.verify().is_valid(), || format!("bracket n={n}: {:?}", r.verify()))?;
        let fp = free_pair(&module, n, 6).map_err(e)?;
        ensure(fp.trivial.is_none(), || format!("free pair n={n}: {:?} trivial", fp.trivial))?;
        ensure(fp.checked == 1456, || format!("free pair n={n}: swept {}", fp.checked))?;
        let lw = law_witness(&g, Some(&module), &law, 4, n).map_err(e)?;
        let w = &lw.witness.word;
        ensure(g.is_identity(w) == Verdict3::True, || format!("law n={n}: W nontrivial in G"))?;
        let gn = gn_group(&module, n).map_err(e)?;
        ensure(gn.is_identity(w) == Verdict3::False, || format!("law n={n}: W trivial in G_n"))?;
        let bound = 2 * 4 * 16 * (2 * n as usize + 4);
        ensure(w.len() <= bound, || format!("law n={n}: |W| = {} > {bound}", w.len()))?;
        lens.push(w.len());
    }
    Ok(format!("n = 1..5 all legs pass, |W| = {lens:?}"))
}

fn contraction() -> Outcome {
    for spec in ["bs(1,2)", "bs(1,3)"] {
        let module = parse_module(spec).map_err(e)?;
        for n in 1..=6 {
            match lemma_ij_indices(&module, n) {
                Err(Error::ContractionDetected(_)) => {}
                other => return Err(format!("{spec} n={n}: {other:?}")),
            }
        }
    }
    Ok("bs(1,2), bs(1,3): ContractionDetected for n = 1..6".into())
}

fn abels() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..100 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let i: BTreeSet<usize> = (0..=12).filter(|_| rng.gen_bool(0.4)).collect();
        let v: Vec<usize> = i.iter().copied().collect();
        let x = abels_xell(&v, p, 12).map_err(e)?;
        let got: Vec<usize> = x.elements().iter().map(|&n| n as usize).collect();
        ensure(got == v, || format!("trial {trial}: I = {v:?}, p = {p}, X = {got:?}"))?;
    }
    Ok("100 random instances reproduce I".into())
}

fn scale_sets() -> Outcome {
    let c8 = Scale::from_integer(8);
    let c3 = Scale::from_integer(3);
    // Both sets are known in closed form, so they are materialized past c·10³.
    let a = ScaleSet::arithmetic(8, 4, 8000);
    let v = classify(&a, c8, (1, 1000)).map_err(e)?;
    ensure(v.kind == Kind::Dense, || format!("{{4n+4}}: {:?}", v.kind))?;
    let f = ScaleSet::factorials(10_000);
    let v = classify(&f, c3, (1, 1000)).map_err(e)?;
    ensure(v.kind == Kind::Lacunary, || format!("{{n!}}: {:?}", v.kind))?;
    ensure(v.gaps.iter().any(|&(lo, hi)| lo <= 25 && 25 <= hi), || format!("gaps {:?}", v.gaps))?;
    let opts = ScanOptions::new(8);
    let p = scan("graph_product(wreath(c2,z), zd(2))", &opts, None).map_err(e)?;
    let f1 = scan("wreath(c2,z)", &opts, None).map_err(e)?;
    let f2 = scan("zd(2)", &opts, None).map_err(e)?;
    let union = f1.in_set.union(&f2.in_set);
    ensure(p.in_set.elements() == union.elements(), || format!("product {:?} vs union {:?}", p.in_set.elements(), union.elements()))?;
    ensure(!p.has_unknown(), || format!("product has Unknown rows {:?}", p.lengths(RowVerdict::Unknown)))?;
    Ok(format!("Dense, Lacunary with gap at 25, product In = union = {:?}", union.elements()))
}

/// Connected simple graphs on `v` vertices, one per isomorphism class.
fn connected_graphs(v: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    let perms = permutations(v);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let canon = perms
            .iter()
            .map(|p| {
                let mut es: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
                es.sort();
                es
            })
            .min()
            .unwrap_or_default();
        if !seen.insert(canon) {
            continue;
        }
        let g = Graph::new(v, &edges).expect("simple graph");
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// π₁ words of all cyclically non-backtracking closed walks, grouped by length.
struct LoopWords {
    rank: usize,
    by_len: BTreeMap<usize, Vec<Word>>,
}

fn loop_words(x: &Graph, max_len: usize) -> LoopWords {
    let mut adj = vec![Vec::new(); x.vertices];
    for &(a, b) in &x.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut in_tree = vec![false; x.vertices];
    let mut tree = HashSet::new();
    let mut stack = vec![0usize];
    in_tree[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !in_tree[w] {
                in_tree[w] = true;
                tree.insert((v.min(w), v.max(w)));
                stack.push(w);
            }
        }
    }
    let gens: BTreeMap<(usize, usize), u16> =
        x.edges.iter().filter(|e| !tree.contains(e)).enumerate().map(|(i, &e)| (e, i as u16)).collect();
    let word_of = |walk: &[usize]| {
        let letters = walk.windows(2).filter_map(|p| {
            let (a, b) = (p[0], p[1]);
            gens.get(&(a.min(b), a.max(b))).map(|&g| Letter::new(g, a > b))
        });
        Word::reduced_from(letters)
    };
    let mut by_len: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
    let mut walk = Vec::new();
    fn extend(
        adj: &[Vec<usize>],
        walk: &mut Vec<usize>,
        max_len: usize,
        found: &mut dyn FnMut(&[usize]),
    ) {
        let len = walk.len() - 1;
        let (start, last) = (walk[0], *walk.last().expect("nonempty"));
        if len >= 3 && last == start && walk[1] != walk[len - 1] {
            found(walk);
        }
        if len == max_len {
            return;
        }
        for &w in &adj[last] {
            if len >= 1 && w == walk[len - 1] {
                continue;
            }
            walk.push(w);
            extend(adj, walk, max_len, found);
            walk.pop();
        }
    }
    for v in 0..x.vertices {
        walk.clear();
        walk.push(v);
        let mut found = |w: &[usize]| by_len.entry(w.len() - 1).or_default().push(word_of(w));
        extend(&adj, &mut walk, max_len, &mut found);
    }
    LoopWords { rank: gens.len(), by_len }
}

/// Brute-force Φ at `n`: enumerate `π₁/N_{n−1}` and test every loop of length `n`.
fn phi_oracle(loops: &LoopWords, n: usize, max_cosets: usize) -> Option<bool> {
    let current = loops.by_len.get(&n).map(Vec::as_slice).unwrap_or(&[]);
    if current.iter().all(Word::is_empty) {
        return Some(false);
    }
    let relators: Vec<Word> = loops
        .by_len
        .range(..n)
        .flat_map(|(_, ws)| ws.iter().filter(|w| !w.is_empty()).cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    match coset_enumeration(loops.rank, &relators, max_cosets) {
        CosetOutcome::FiniteIndex { table, .. } => Some(current.iter().any(|w| trace(&table, w) != 0)),
        CosetOutcome::Overflow => None,
    }
}

fn graph_oracle() -> Outcome {
    let (mut graphs, mut both, mut agree) = (0usize, 0usize, 0usize);
    let max_n = 8;
    for v in 1..=6 {
        for x in connected_graphs(v) {
            graphs += 1;
            let phi = graph_phi(&x, max_n, GraphBudgets::default()).map_err(e)?;
            let loops = loop_words(&x, max_n);
            for (&n, verdict) in &phi {
                let (Some(fast), Some(slow)) = (verdict.decided(), phi_oracle(&loops, n, 50_000)) else { continue };
                both += 1;
                ensure(fast == slow, || format!("{:?} n={n}: graph_phi {fast}, oracle {slow}", x.edges))?;
                agree += 1;
            }
        }
    }
    for k in 3..=8 {
        let phi = graph_phi(&Graph::cycle(k), 10, GraphBudgets::default()).map_err(e)?;
        let ins: Vec<usize> = phi.iter().filter(|(_, v)| matches!(v, PhiVerdict::In(_))).map(|(&n, _)| n).collect();
        ensure(ins == vec![k], || format!("Φ(C_{k}) = {ins:?}"))?;
        ensure(phi.values().all(|v| v.decided().is_some()), || format!("Φ(C_{k}) has Unknown"))?;
    }
    let tree = Graph::new(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).map_err(e)?;
    let phi = graph_phi(&tree, 8, GraphBudgets::default()).map_err(e)?;
    ensure(phi.values().all(|v| matches!(v, PhiVerdict::Out(_))), || "tree has a non-Out verdict".into())?;
    Ok(format!("{graphs} graphs, {agree}/{both} jointly decided verdicts agree; Φ(C_k) = {{k}} for k = 3..8; Φ(tree) = ∅"))
}

fn check_chain(sys: &EndomorphismSystem, depth: usize) -> Result<Vec<usize>, String> {
    let chain = sys.chain(depth + 1);
    ensure(chain.len() > depth, || format!("{}: chain has {} elements", sys.name, chain.len()))?;
    for (n, w) in chain.iter().enumerate().take(depth + 1) {
        ensure(!sys.k_membership(w, n) && sys.k_membership(w, n + 1), || format!("{}: level {n} element misplaced", sys.name))?;
    }
    Ok(chain.iter().take(depth + 1).map(Word::len).collect())
}

fn endomorphisms() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let bs = bs23_system().map_err(e)?;
    notes.push(format!("bs23 (1)(2)(3) validated, c_Σ = {}", bs.c_sigma));
    match grigorchuk_data().and_then(|d| build_endo_system(d, SEARCH_BOUND)) {
        Ok(_) => notes.push("grigorchuk (1)(2)(3) validated".into()),
        Err(err) => failures.push(format!("grigorchuk hypotheses not validated: {err}")),
    }
    let grig = grigorchuk_system().map_err(e)?;
    notes.push(format!("chains bs23 {:?}", check_chain(&bs, 4)?));
    let lens = check_chain(&grig, 4)?;
    let ad4 = grig.g.parse("adadadad").map_err(e)?;
    ensure(grig.chain(1)[0] == ad4, || "grigorchuk chain does not start at (ad)^4".into())?;
    notes.push(format!("grigorchuk {lens:?}"));
    for k in [8, 12, 16] {
        let r = endo_witness(&bs, k).map_err(e)?.ok_or_else(|| format!("no endo witness at k={k}"))?;
        let v = r.verify();
        ensure(v.is_valid(), || format!("endo k={k}: {v:?}"))?;
        notes.push(format!("k={k} |w|={}", r.witness.word.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=20);
        let g = rrlab::oracles::random_word_exact(&mut rng, bs.g.alphabet(), len);
        let h = bs.lift(&g).ok_or("lift undefined")?;
        for i in 0..bs.r() {
            let img = bs.apply(i, &h).ok_or("image undefined")?;
            ensure(bs.g.same_element(&img, &g).map_err(e)?, || format!("φ_{i}(Σ(g)) ≠ g for {}", bs.g.format(&g)))?;
        }
        worst = worst.max(h.len() as f64 / len as f64);
    }
    ensure(worst <= bs.c_sigma as f64, || format!("lift ratio {worst} > c_Σ = {}", bs.c_sigma))?;
    notes.push(format!("lift ratio ≤ {worst:.2} ≤ c_Σ"));
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{}; passed legs: {}", failures.join("; "), notes.join("; ")))
    }
}

fn small_cancellation() -> Outcome {
    let alphabet = Alphabet::from_str_static("xyz");
    let rels = generate(&[21, 63, 189], 3, 1).map_err(e)?;
    let set = check_c7(3, &rels).map_err(e)?;
    let spec = sc_spec(&alphabet, &rels);
    let g = parse_group(&spec).map_err(e)?;
    // Ball side: no two words of length ≤ 6 collide, so nothing of length ≤ 12 is trivial.
    // Below the Greendlinger girth (21) the ball is built without oracle calls.
    let b = ball(&g, 6).map_err(e)?;
    let free_count = 1 + 6 * (5usize.pow(6) - 1) / 4;
    ensure(b.len() == free_count, || format!("ball has {} vertices, free ball {free_count}", b.len()))?;
    ensure(relations_from_ball(&b, 12).is_empty(), || "ball shows a relation of length ≤ 12".into())?;
    // Dehn side: all words up to length 8, then every word of length 9..12 that Dehn can act on.
    let mut dehn_checked = 0usize;
    let all = rrlab::freewords::enumerate_words(&alphabet, 8).map_err(e)?;
    for w in all {
        ensure(!w.is_empty() && set.dehn_reduce(&w) != DehnOutcome::Empty || w.is_empty(), || format!("{} Dehn-trivial", alphabet.format(&w)))?;
        dehn_checked += 1;
    }
    let letters: Vec<Letter> = alphabet.letters().flat_map(|l| [l, l.inverse()]).collect();
    for r in set.words().iter().filter(|r| r.len() == 21) {
        for m in 11..=12 {
            let core = r.slice(0, m);
            let mut candidates = vec![core.clone()];
            if m == 11 {
                for &l in &letters {
                    candidates.push(Word::letter(l).mul(&core));
                    candidates.push(core.mul_letter(l));
                }
            }
            for w in candidates.into_iter().filter(|w| w.len() >= 9) {
                ensure(set.dehn_reduce(&w) != DehnOutcome::Empty, || format!("{} Dehn-trivial", alphabet.format(&w)))?;
                dehn_checked += 1;
            }
        }
    }
    for (i, r) in rels.iter().enumerate() {
        let shorter: Vec<Word> = rels.iter().filter(|s| s.len() < r.len()).cloned().collect();
        let cert = greendlinger_new_relator(3, r, &shorter).map_err(e)?;
        ensure(verify_greendlinger(3, &cert).map_err(e)?, || format!("relator {i} not certified"))?;
    }
    let s = scan(&spec, &ScanOptions::new(200), None).map_err(e)?;
    let ins = s.lengths(RowVerdict::In);
    ensure(ins == vec![21, 63, 189], || format!("scan In = {ins:?}"))?;
    Ok(format!("piece check ok, {dehn_checked} Dehn checks agree with the ball, 3 Greendlinger certificates, scan In = {ins:?}"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "wreath witnesses", wreath_witnesses),
        (2, "partial wreath ranges", gamma_ranges),
        (3, "graph phi oracle", graph_oracle),
        (4, "t-range reduction", rrp_check),
        (5, "bracket, free pair, law", bracket_pipeline),
        (6, "contraction alternative", contraction),
        (7, "endomorphism systems", endomorphisms),
        (8, "small cancellation", small_cancellation),
        (9, "abels central lengths", abels),
        (10, "scale sets and union law", scale_sets),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (num, name, f) in criteria {
        if only.is_some_and(|o| o != num) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {num:>2} PASS [{name}] ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {num:>2} FAIL [{name}] ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
