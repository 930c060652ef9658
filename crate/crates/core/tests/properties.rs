mod common;

use std::collections::{BTreeSet, HashMap};

use common::{
    brute_colorable, brute_key, from_sets, permutation, relabel, small_families, small_hypergraph,
};
use ks_core::canon::{are_isomorphic, canonical_form};
use ks_core::coloring::{find_coloring, is_critical, is_ks};
use ks_core::geometry::build_600cell;
use ks_core::mmp::parse_edges;
use ks_core::strip::{colex_rank, enumerate_subsets, SamplerSeed, SelectionMode, StripPlan};
use ks_core::{is_connected, parse_mmp, serialize_mmp, Hypergraph, ParseOptions, VertexId};
use proptest::prelude::*;
use rand::seq::SliceRandom;

#[test]
fn solver_matches_brute_force_on_small_families() {
    let mut checked = 0;
    for (_, hs) in small_families() {
        for h in &hs {
            let expected = brute_colorable(h);
            match find_coloring(h) {
                Some(c) => {
                    assert!(expected, "{}", serialize_mmp(h));
                    assert!(c.is_valid_for(h), "{}", serialize_mmp(h));
                }
                None => assert!(!expected, "{}", serialize_mmp(h)),
            }
            assert_eq!(is_ks(h), !expected);
            checked += 1;
        }
    }
    // Non-empty edge sets only: 847 + 847 + 9948.
    assert_eq!(checked, 11642);
}

#[test]
fn canonical_forms_partition_like_the_permutation_oracle() {
    for (n, hs) in small_families() {
        let perms = common::all_permutations(n as usize);
        let mut by_key: HashMap<Vec<Vec<u32>>, String> = HashMap::new();
        let mut by_form: HashMap<String, Vec<Vec<u32>>> = HashMap::new();
        for h in &hs {
            let key = brute_key(h, &perms);
            let form = canonical_form(h).0;
            // Soundness: one form per oracle class; completeness: one class
            // per form.
            assert_eq!(
                by_key.entry(key.clone()).or_insert_with(|| form.clone()),
                &form
            );
            assert_eq!(by_form.entry(form).or_insert_with(|| key.clone()), &key);
        }
        assert_eq!(by_key.len(), by_form.len());
    }
}

#[test]
fn colorability_is_monotone_along_random_strip_chains() {
    let cell = build_600cell().unwrap().hypergraph;
    let mut rng = SamplerSeed::user(17).rng();
    for _ in 0..12 {
        let mut order: Vec<usize> = (0..cell.num_edges()).collect();
        order.shuffle(&mut rng);
        let mut removed = vec![false; cell.num_edges()];
        let mut was_ks = true;
        for &e in &order {
            removed[e] = true;
            let h = cell.retain_edges(|i| !removed[i]);
            let now_ks = is_ks(&h);
            assert!(
                was_ks || !now_ks,
                "a colorable set became KS after removing an edge"
            );
            if now_ks && is_critical(&h) {
                // Every single-edge removal of a critical set is colorable.
                assert!((0..h.num_edges()).all(|i| !is_ks(&h.without_edge(i))));
            }
            was_ks = now_ks;
        }
        assert!(!was_ks);
    }
}

#[test]
fn strip_counts_match_a_bitmask_enumerator() {
    let mut rng = SamplerSeed::user(3).rng();
    for n in 1..=12usize {
        let edges: BTreeSet<BTreeSet<u32>> = (0..n as u32)
            .map(|i| {
                let mut e: BTreeSet<u32> = [i, i + 1].into();
                e.insert(rand::Rng::gen_range(&mut rng, 0..n as u32 + 2));
                e
            })
            .collect();
        let h = from_sets(&edges);
        let n = h.num_edges();
        for k in 0..=n {
            let mut expected = Vec::new();
            for mask in 0u32..1 << n {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let child = h.retain_edges(|i| mask >> i & 1 == 0);
                if is_connected(&child) {
                    expected.push(mask);
                }
            }
            let got: Vec<u32> = enumerate_subsets(&h, &StripPlan::remove(k).connected_only(true))
                .unwrap()
                .map(|s| s.removed.iter().map(|&i| 1u32 << i).sum())
                .collect();
            let mut sorted_expected = expected.clone();
            sorted_expected.sort_by_key(|&m| {
                colex_rank(&(0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
            });
            assert_eq!(got, sorted_expected, "n={n} k={k}");

            let total = ks_core::strip::binomial_u128(n, k).unwrap() as usize;
            for inc in [1.0, 2.0, 2.5, 7.0] {
                let kept = enumerate_subsets(
                    &h,
                    &StripPlan::remove(k).increment(inc, SelectionMode::Uniform),
                )
                .unwrap()
                .count();
                // Kept ranks are ⌈j·i⌉ below the total.
                let expected = (0..)
                    .take_while(|&j| ((j as f64) * inc).ceil() < total as f64)
                    .count();
                assert_eq!(kept, expected, "n={n} k={k} i={inc}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn serialize_parse_round_trip(
        edges in prop::collection::vec(prop::collection::btree_set(0u32..400, 1..=6), 1..12)
    ) {
        let h = Hypergraph::from_index_lists(edges.iter().map(|e| e.iter().copied().collect::<Vec<_>>())).unwrap();
        let line = serialize_mmp(&h);
        let back = parse_edges(&line, ParseOptions::strict()).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(serialize_mmp(&back), line);
    }

    #[test]
    fn parser_never_panics(s in "[0-9A-Za-z+,. !#]{0,40}") {
        for opts in [ParseOptions::strict(), ParseOptions::lenient()] {
            if let Ok(h) = parse_mmp(&s, opts) {
                let again = parse_mmp(&serialize_mmp(&h), ParseOptions::strict()).unwrap();
                prop_assert_eq!(again, h);
            }
        }
    }

    #[test]
    fn canonical_form_ignores_labels_and_order(
        h in small_hypergraph(9, 7),
        perm in permutation(9),
        rotate in 0usize..7,
    ) {
        let g = relabel(&h, &perm, rotate);
        prop_assert_eq!(canonical_form(&h), canonical_form(&g));
        let m = are_isomorphic(&h, &g).expect("relabeled copy is isomorphic");
        prop_assert!(m.verify(&h, &g));
        let form = canonical_form(&h);
        let reparsed = parse_edges(form.as_str(), ParseOptions::strict()).unwrap();
        prop_assert_eq!(canonical_form(&reparsed), form);
    }

    #[test]
    fn isomorphism_verdicts_agree_with_the_oracle(
        a in small_hypergraph(6, 5),
        b in small_hypergraph(6, 5),
    ) {
        let perms = common::all_permutations(6);
        let same = brute_key(&a, &perms) == brute_key(&b, &perms);
        let mapping = are_isomorphic(&a, &b);
        prop_assert_eq!(mapping.is_some(), same);
        if let Some(m) = mapping {
            prop_assert!(m.verify(&a, &b));
            prop_assert_eq!(m.vertex_map.len(), a.num_vertices());
            prop_assert!(m.vertex_map.values().all(|v: &VertexId| v.index() < 6));
        }
    }

    #[test]
    fn solver_agrees_with_brute_force(h in small_hypergraph(12, 9)) {
        prop_assert_eq!(find_coloring(&h).is_some(), brute_colorable(&h));
    }
}
