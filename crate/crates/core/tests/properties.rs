use std::collections::BTreeSet;

use proptest::prelude::*;

use rrlab::certify::dehn::{DehnOutcome, SymmetrizedSet};
use rrlab::certify::{trange_reduce, TRangeOutcome};
use rrlab::constructions::abels::abels_xell;
use rrlab::constructions::endo::bs23_system;
use rrlab::constructions::sc_family::generate;
use rrlab::constructions::witnesses::{bracket_witness, lemma_ij_indices};
use rrlab::certify::trange::t_path_range;
use rrlab::error::Error;
use rrlab::freewords::{Letter, Word};
use rrlab::oracles::catalog::parse_module;
use rrlab::scalesets::{classify, preceq, Kind, Scale, ScaleSet};

fn word(gens: u16, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..gens, any::<bool>()), 0..=max_len)
        .prop_map(|ls| Word::reduced_from(ls.into_iter().map(|(g, inv)| Letter::new(g, inv))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inverse_cancels(w in word(3, 20), v in word(3, 20)) {
        prop_assert!(w.mul(&w.inverse()).is_empty());
        prop_assert_eq!(w.mul(&v).inverse(), v.inverse().mul(&w.inverse()));
        prop_assert_eq!(w.inverse().inverse(), w);
    }

    #[test]
    fn conjugating_keeps_exponent_sums(w in word(2, 16), c in word(2, 8)) {
        let u = w.conjugate_by(&c);
        for g in 0..2 {
            prop_assert_eq!(u.exponent_sum(g), w.exponent_sum(g));
        }
    }

    #[test]
    fn trange_conjugate_is_confined(w in word(2, 14), n in 1i64..5) {
        let balanced = w.mul(&Word::gen_power(0, -w.exponent_sum(0)));
        match trange_reduce(&balanced, n).unwrap() {
            TRangeOutcome::Conjugated { word, conjugator } => {
                prop_assert_eq!(&word, &balanced.conjugate_by(&conjugator));
                let (lo, hi) = t_path_range(&word);
                prop_assert!(lo >= 0 && hi <= n, "path [{}, {}]", lo, hi);
            }
            TRangeOutcome::Fail { range } => prop_assert!(range > n),
        }
    }

    #[test]
    fn preceq_is_reflexive(elems in prop::collection::btree_set(1u64..500, 1..30), c in 1u64..5) {
        let a = ScaleSet::new(elems, 500).unwrap();
        prop_assert!(preceq(&a, &a, Scale::from_integer(c), (1, 500 / c)).unwrap().holds);
    }

    #[test]
    fn supersets_stay_dense(elems in prop::collection::btree_set(1u64..1000, 0..40)) {
        let base = ScaleSet::powers(2, 1000);
        let a = base.union(&ScaleSet::new(elems, 1000).unwrap());
        prop_assert_eq!(classify(&a, Scale::from_integer(2), (1, 500)).unwrap().kind, Kind::Dense);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn abels_lengths_are_the_index_set(set in prop::collection::btree_set(0usize..=12, 0..8), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let i: Vec<usize> = set.iter().copied().collect();
        let x = abels_xell(&i, p, 12).unwrap();
        let got: Vec<usize> = x.elements().iter().map(|&n| n as usize).collect();
        prop_assert_eq!(got, i);
    }

    #[test]
    fn dehn_kills_products_of_relator_conjugates(
        picks in prop::collection::vec((0usize..2, any::<bool>(), word(3, 6)), 1..4),
    ) {
        let rels = generate(&[21, 35], 3, 5).unwrap();
        let set = SymmetrizedSet::new(3, &rels).unwrap();
        let w = picks.iter().fold(Word::empty(), |acc, (i, inv, c)| {
            let r = if *inv { rels[*i].inverse() } else { rels[*i].clone() };
            acc.mul(&r.conjugate_by(c))
        });
        prop_assert_eq!(set.dehn_reduce(&w), DehnOutcome::Empty);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sigma_lift_is_a_bounded_diagonal_preimage(g in word(2, 20).prop_filter("nonempty", |w| !w.is_empty())) {
        let sys = bs23_system().unwrap();
        let h = sys.lift(&g).unwrap();
        prop_assert!(h.len() <= sys.c_sigma * g.len());
        for i in 0..sys.r() {
            let img = sys.apply(i, &h).unwrap();
            prop_assert!(sys.g.same_element(&img, &g).unwrap());
        }
    }
}

#[test]
fn bracket_witnesses_up_to_six() {
    for spec in ["companion(2,3,1)", "wreath(c2,z)"] {
        let module = parse_module(spec).unwrap();
        for n in 1..=6 {
            let r = bracket_witness(&module, n).unwrap();
            assert!(r.verify().is_valid(), "{spec} n={n}: {:?}", r.verify());
        }
    }
}

#[test]
fn contraction_means_ascending() {
    for spec in ["bs(1,2)", "bs(1,3)"] {
        let module = parse_module(spec).unwrap();
        for n in 1..=6i64 {
            assert!(matches!(lemma_ij_indices(&module, n), Err(Error::ContractionDetected(_))));
            assert!(module.mrange_included(0, n - 1, 0, n) && module.mrange_included(0, n, 0, n - 1), "{spec} n={n}");
        }
    }
}

#[test]
fn scale_set_union_is_truncated_to_the_smaller_window() {
    let a = ScaleSet::new([3u64, 9, 27], 100).unwrap();
    let b = ScaleSet::new([4u64, 9], 20).unwrap();
    let u = a.union(&b);
    let elems: BTreeSet<u64> = u.elements().iter().copied().collect();
    assert_eq!(elems, [3, 4, 9].into());
    assert_eq!(u.window_hi(), 20);
}
