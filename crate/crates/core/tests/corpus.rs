mod common;

use std::collections::HashSet;

use common::corpus;
use ks_core::canon::{canonical_form, dedupe_isomorphic};
use ks_core::coloring::{classify, has_parity_proof, is_critical, is_ks};
use ks_core::geometry::build_600cell;
use ks_core::survey::{find_criticals, known_kind, KnownKind};
use ks_core::{validate_mmp, Hypergraph};

#[test]
fn corpus_entries_match_their_names_and_are_critical() {
    let entries = corpus();
    assert_eq!(entries.len(), 36);
    for c in &entries {
        let h = &c.hypergraph;
        assert_eq!(
            (h.num_vertices(), h.num_edges()),
            (c.vertices, c.edges),
            "{}",
            c.name
        );
        assert!(validate_mmp(h).is_valid(), "{}", c.name);
        assert!(is_ks(h), "{} is colorable", c.name);
        assert!(is_critical(h), "{} is not critical", c.name);
        let v = classify(h);
        assert!(!v.colorable && v.witness.is_none(), "{}", c.name);
        assert_eq!(v.critical, Some(true), "{}", c.name);
    }
}

#[test]
fn parity_follows_edge_parity_in_the_corpus() {
    for c in corpus() {
        assert_eq!(
            has_parity_proof(&c.hypergraph),
            c.edges % 2 == 1,
            "{}",
            c.name
        );
    }
}

#[test]
fn corpus_sets_are_pairwise_non_isomorphic_and_known_kinds() {
    let entries = corpus();
    let forms: HashSet<_> = entries
        .iter()
        .map(|c| canonical_form(&c.hypergraph))
        .collect();
    assert_eq!(forms.len(), entries.len());
    for c in &entries {
        // The printed examples include kinds tallied by other methods.
        assert_ne!(
            known_kind(c.vertices, c.edges),
            KnownKind::New,
            "{}",
            c.name
        );
    }
    let found = find_criticals(entries.iter().map(|c| c.hypergraph.clone())).unwrap();
    assert_eq!(found.len(), entries.len());
}

/// Edge sets of `parent` that contain edge 0, have exactly `size` edges and
/// give every covered vertex degree 2. The 600-cell hypergraph is
/// edge-transitive, so every class of such subsets has a member here.
fn degree_two_subsets(parent: &Hypergraph, size: usize) -> Vec<Hypergraph> {
    fn extend(
        parent: &Hypergraph,
        inc: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        deg: &mut [u8],
        size: usize,
        out: &mut HashSet<Vec<usize>>,
    ) {
        let open = deg.iter().filter(|&&d| d == 1).count();
        if chosen.len() == size {
            if open == 0 {
                let mut s = chosen.clone();
                s.sort_unstable();
                out.insert(s);
            }
            return;
        }
        let Some(v) = deg.iter().position(|&d| d == 1) else {
            return;
        };
        if open > 4 * (size - chosen.len()) {
            return;
        }
        for &e in &inc[v] {
            let verts = parent.edges()[e].vertices();
            if chosen.contains(&e) || verts.iter().any(|u| deg[u.index()] >= 2) {
                continue;
            }
            chosen.push(e);
            verts.iter().for_each(|u| deg[u.index()] += 1);
            extend(parent, inc, chosen, deg, size, out);
            verts.iter().for_each(|u| deg[u.index()] -= 1);
            chosen.pop();
        }
    }
    let inc = parent.incidence();
    let mut deg = vec![0u8; parent.id_bound()];
    parent.edges()[0]
        .vertices()
        .iter()
        .for_each(|u| deg[u.index()] += 1);
    let mut out = HashSet::new();
    extend(parent, &inc, &mut vec![0], &mut deg, size, &mut out);
    let mut sets: Vec<_> = out.into_iter().collect();
    sets.sort();
    sets.iter()
        .map(|s| parent.retain_edges(|i| s.binary_search(&i).is_ok()))
        .collect()
}

#[test]
fn smallest_parity_criticals_inside_the_600_cell() {
    let cell = build_600cell().unwrap().hypergraph;
    let small = find_criticals(degree_two_subsets(&cell, 13)).unwrap();
    assert_eq!(small.len(), 1);
    let c = &small[0];
    assert_eq!(
        (c.hypergraph.num_vertices(), c.hypergraph.num_edges()),
        (26, 13)
    );
    assert!(c.parity);
    assert_eq!(c.kind, KnownKind::Counted(1));

    let next = degree_two_subsets(&cell, 15);
    let classes: Vec<_> = dedupe_isomorphic(next.iter().cloned()).collect();
    let found = find_criticals(next).unwrap();
    assert_eq!(classes.len(), 3);
    assert_eq!(found.len(), 3);
    assert!(found
        .iter()
        .all(|c| c.parity && c.kind == KnownKind::Counted(3)));
}

#[test]
fn the_600_cell_itself_is_not_critical() {
    let cell = build_600cell().unwrap().hypergraph;
    assert!(is_ks(&cell));
    assert!(!is_critical(&cell));
    assert!(find_criticals([cell]).unwrap().is_empty());
}
