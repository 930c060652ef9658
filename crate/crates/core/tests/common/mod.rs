#![allow(dead_code)]

use std::collections::BTreeSet;

use ks_core::{parse_mmp, Hypergraph, ParseOptions, VertexId};
use proptest::prelude::*;

pub struct CorpusEntry {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    /// Printed biggest-loop size, when there is one.
    pub loop_size: Option<usize>,
    pub hypergraph: Hypergraph,
}

pub fn corpus() -> Vec<CorpusEntry> {
    include_str!("../data/corpus.mmp")
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut parts = l.split_whitespace();
            let name = parts.next().unwrap().to_string();
            let loop_size = parts.next().unwrap().parse().ok();
            let line = parts.next().unwrap();
            let (v, e) = name.split_once('-').unwrap();
            CorpusEntry {
                vertices: v.parse().unwrap(),
                edges: e.parse().unwrap(),
                loop_size,
                hypergraph: parse_mmp(line, ParseOptions::lenient())
                    .unwrap_or_else(|e| panic!("{name}: {e}")),
                name,
            }
        })
        .collect()
}

pub fn entry(name: &str) -> Hypergraph {
    corpus()
        .into_iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no {name} in corpus"))
        .hypergraph
}

pub fn from_sets(edges: &BTreeSet<BTreeSet<u32>>) -> Hypergraph {
    Hypergraph::from_index_lists(edges.iter().map(|e| e.iter().copied().collect::<Vec<_>>()))
        .unwrap()
}

/// Hypergraphs with up to `max_edges` distinct edges of 2 to 4 vertices
/// drawn from `0..vertices`.
pub fn small_hypergraph(vertices: u32, max_edges: usize) -> impl Strategy<Value = Hypergraph> {
    prop::collection::btree_set(
        prop::collection::btree_set(0..vertices, 2..=4),
        1..=max_edges,
    )
    .prop_map(|edges| from_sets(&edges))
}

/// The same hypergraph with vertices renamed by `perm` (a permutation of
/// `0..id_bound`) and edges listed in rotated order.
pub fn relabel(h: &Hypergraph, perm: &[u32], rotate: usize) -> Hypergraph {
    let map: Vec<VertexId> = perm.iter().map(|&v| VertexId(v)).collect();
    let g = h.relabel(&map);
    let n = g.num_edges();
    let order: Vec<usize> = (0..n).map(|i| (i + rotate) % n.max(1)).collect();
    g.permute_edges(&order)
}

pub fn permutation(n: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle()
}

/// Every permutation of `0..n`, in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<u32>> {
    let mut p: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
        out.push(p.clone());
    }
}

/// Whether some 0/1 assignment puts exactly one 1 in every edge, by trying
/// all `2^id_bound` assignments.
pub fn brute_colorable(h: &Hypergraph) -> bool {
    let n = h.id_bound();
    (0u32..1 << n).any(|bits| {
        h.edges()
            .iter()
            .all(|e| e.vertices().iter().filter(|v| bits >> v.0 & 1 == 1).count() == 1)
    })
}

/// Lexicographically least sorted edge list over all relabelings of
/// `0..n`: equal exactly for isomorphic hypergraphs on that ground set.
pub fn brute_key(h: &Hypergraph, perms: &[Vec<u32>]) -> Vec<Vec<u32>> {
    perms
        .iter()
        .map(|p| {
            let mut edges: Vec<Vec<u32>> = h
                .edges()
                .iter()
                .map(|e| {
                    let mut v: Vec<u32> = e.vertices().iter().map(|v| p[v.index()]).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            edges.sort();
            edges
        })
        .min()
        .unwrap()
}

/// Every hypergraph with at most `max_edges` edges drawn from the
/// `rank`-subsets of `0..vertices`.
pub fn family(vertices: u32, rank: usize, max_edges: usize) -> Vec<Hypergraph> {
    let pool: Vec<BTreeSet<u32>> = (0u32..1 << vertices)
        .filter(|m| m.count_ones() as usize == rank)
        .map(|m| (0..vertices).filter(|v| m >> v & 1 == 1).collect())
        .collect();
    let mut out = Vec::new();
    for mask in 1u32..1 << pool.len() {
        if mask.count_ones() as usize > max_edges {
            continue;
        }
        let edges: BTreeSet<BTreeSet<u32>> = (0..pool.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pool[i].clone())
            .collect();
        out.push(from_sets(&edges));
    }
    out
}

pub fn small_families() -> Vec<(u32, Vec<Hypergraph>)> {
    vec![
        (5, family(5, 2, 6)),
        (5, family(5, 3, 6)),
        (6, family(6, 4, 6)),
    ]
}
