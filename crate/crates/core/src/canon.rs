//! Canonical labeling and isomorphism of hypergraphs.
//!
//! A hypergraph is turned into its bipartite incidence graph (one node per
//! vertex, one per edge). An individualization-refinement search over
//! ordered partitions of that graph produces a canonical discrete partition;
//! the canonical form is the hypergraph relabeled by that partition and
//! written as an MMP line, so two hypergraphs are isomorphic exactly when
//! their canonical forms are equal.
//!
//! The search tree is pruned three ways: by comparing refinement traces
//! against the best leaf, by orbits of automorphisms found so far (only
//! generators fixing the current path pointwise are used), and by jumping
//! back to the divergence point whenever a leaf proves to be an automorphic
//! image of an earlier one.

use std::collections::{HashMap, HashSet};
use std::fmt;

use smallvec::SmallVec;

use crate::mmp::{Edge, Hypergraph, VertexId};

/// Canonical MMP line of a hypergraph; equal forms ⇔ isomorphic inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Vertex and edge bijections taking one hypergraph onto another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoMapping {
    pub vertex_map: HashMap<VertexId, VertexId>,
    /// `edge_map[i]` is the index in the target of source edge `i`.
    pub edge_map: Vec<usize>,
}

impl IsoMapping {
    /// Applies the vertex map to `from` and checks that each edge lands on
    /// the edge named by `edge_map` in `to`.
    pub fn verify(&self, from: &Hypergraph, to: &Hypergraph) -> bool {
        if from.num_edges() != to.num_edges() || self.edge_map.len() != from.num_edges() {
            return false;
        }
        let mut used = vec![false; to.num_edges()];
        for (i, e) in from.edges().iter().enumerate() {
            let j = self.edge_map[i];
            if j >= to.num_edges() || std::mem::replace(&mut used[j], true) {
                return false;
            }
            let Some(mut image) = e
                .vertices()
                .iter()
                .map(|v| self.vertex_map.get(v).copied())
                .collect::<Option<Vec<_>>>()
            else {
                return false;
            };
            image.sort_unstable();
            if image != to.edges()[j].sorted() {
                return false;
            }
        }
        true
    }
}

/// Result of labeling one hypergraph.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub form: CanonicalForm,
    /// Original vertex id → canonical vertex index.
    pub vertex_label: HashMap<VertexId, u32>,
    /// Original edge index → canonical edge index.
    pub edge_label: Vec<usize>,
}

pub fn canonical_form(h: &Hypergraph) -> CanonicalForm {
    canonical_labeling(h).form
}

pub fn canonical_labeling(h: &Hypergraph) -> Labeling {
    let graph = IncidenceGraph::new(h);
    if graph.num_edges == 0 {
        return Labeling {
            form: CanonicalForm(".".to_string()),
            vertex_label: HashMap::new(),
            edge_label: Vec::new(),
        };
    }
    let mut search = Search::new(&graph);
    let root = Partition::initial(&graph);
    search.run(root);
    let best = search.best.expect("search reaches at least one leaf");
    graph.labeling(&best.lab)
}

/// An isomorphism `h1 → h2`, when one exists.
pub fn are_isomorphic(h1: &Hypergraph, h2: &Hypergraph) -> Option<IsoMapping> {
    if h1.num_vertices() != h2.num_vertices() || h1.num_edges() != h2.num_edges() {
        return None;
    }
    let l1 = canonical_labeling(h1);
    let l2 = canonical_labeling(h2);
    if l1.form != l2.form {
        return None;
    }
    let by_label: HashMap<u32, VertexId> = l2.vertex_label.iter().map(|(&v, &l)| (l, v)).collect();
    let vertex_map = l1
        .vertex_label
        .iter()
        .map(|(&v, l)| (v, by_label[l]))
        .collect();
    let mut edge_by_label = vec![0; l2.edge_label.len()];
    for (i, &l) in l2.edge_label.iter().enumerate() {
        edge_by_label[l] = i;
    }
    let edge_map = l1.edge_label.iter().map(|&l| edge_by_label[l]).collect();
    let mapping = IsoMapping {
        vertex_map,
        edge_map,
    };
    debug_assert!(mapping.verify(h1, h2));
    Some(mapping)
}

/// Keeps the first hypergraph of each isomorphism class, preserving order.
pub fn dedupe_isomorphic<I>(hs: I) -> impl Iterator<Item = Hypergraph>
where
    I: IntoIterator<Item = Hypergraph>,
{
    let mut seen = HashSet::new();
    hs.into_iter()
        .filter(move |h| seen.insert(canonical_form(h)))
}

/// Set of canonical forms seen so far; `insert` is insert-if-absent.
#[derive(Debug, Default)]
pub struct IsoFilter {
    seen: HashSet<CanonicalForm>,
}

impl IsoFilter {
    pub fn new() -> Self {
        Self::default()
    }

    /// True when `form` was not present before.
    pub fn insert(&mut self, form: CanonicalForm) -> bool {
        self.seen.insert(form)
    }

    pub fn contains(&self, form: &CanonicalForm) -> bool {
        self.seen.contains(form)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Dense incidence graph: nodes `0..nv` are vertices, `nv..nv+ne` edges.
struct IncidenceGraph {
    num_vertices: usize,
    num_edges: usize,
    /// Dense vertex index → original id.
    vertex_ids: Vec<VertexId>,
    adj: Vec<SmallVec<[u32; 6]>>,
}

impl IncidenceGraph {
    fn new(h: &Hypergraph) -> Self {
        let mut dense = vec![u32::MAX; h.id_bound()];
        let mut vertex_ids = Vec::with_capacity(h.num_vertices());
        for v in h.edges().iter().flat_map(|e| e.vertices().iter()) {
            if dense[v.index()] == u32::MAX {
                dense[v.index()] = vertex_ids.len() as u32;
                vertex_ids.push(*v);
            }
        }
        let nv = vertex_ids.len();
        let ne = h.num_edges();
        let mut adj = vec![SmallVec::new(); nv + ne];
        for (i, e) in h.edges().iter().enumerate() {
            let en = (nv + i) as u32;
            for v in e.vertices() {
                let vn = dense[v.index()];
                adj[en as usize].push(vn);
                adj[vn as usize].push(en);
            }
        }
        IncidenceGraph {
            num_vertices: nv,
            num_edges: ne,
            vertex_ids,
            adj,
        }
    }

    fn len(&self) -> usize {
        self.num_vertices + self.num_edges
    }

    /// Edges of the relabeled hypergraph in canonical order, each as its
    /// sorted canonical vertex labels, flattened with a length prefix.
    fn certificate(&self, lab: &[u32]) -> Vec<u32> {
        let mut pos = vec![0u32; self.len()];
        for (p, &node) in lab.iter().enumerate() {
            pos[node as usize] = p as u32;
        }
        let mut cert = Vec::with_capacity(self.num_edges * 5);
        let mut buf: SmallVec<[u32; 8]> = SmallVec::new();
        for &node in &lab[self.num_vertices..] {
            buf.clear();
            buf.extend(self.adj[node as usize].iter().map(|&v| pos[v as usize]));
            buf.sort_unstable();
            cert.push(buf.len() as u32);
            cert.extend_from_slice(&buf);
        }
        cert
    }

    fn labeling(&self, lab: &[u32]) -> Labeling {
        let nv = self.num_vertices;
        let mut vertex_label = HashMap::with_capacity(nv);
        let mut edge_label = vec![0; self.num_edges];
        let mut pos = vec![0u32; self.len()];
        for (p, &node) in lab.iter().enumerate() {
            pos[node as usize] = p as u32;
            if (node as usize) < nv {
                vertex_label.insert(self.vertex_ids[node as usize], p as u32);
            } else {
                edge_label[node as usize - nv] = p - nv;
            }
        }
        let edges = lab[nv..]
            .iter()
            .map(|&node| {
                let mut vs: SmallVec<[u32; 8]> = self.adj[node as usize]
                    .iter()
                    .map(|&v| pos[v as usize])
                    .collect();
                vs.sort_unstable();
                Edge::new(vs.into_iter().map(VertexId)).expect("distinct labels")
            })
            .collect();
        let form = CanonicalForm(crate::mmp::serialize_mmp(&Hypergraph::new(edges)));
        Labeling {
            form,
            vertex_label,
            edge_label,
        }
    }
}

/// Ordered partition of the nodes. `lab` lists nodes cell by cell; every
/// cell is identified by its start position.
#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    cell_of: Vec<u32>,
    /// Indexed by cell start: one past the cell's last position.
    cell_end: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn initial(g: &IncidenceGraph) -> Self {
        let n = g.len();
        let key = |node: usize| ((node >= g.num_vertices) as usize, g.adj[node].len());
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&x| (key(x as usize), x));
        let mut p = Partition {
            lab,
            cell_of: vec![0; n],
            cell_end: vec![0; n],
            cells: 0,
        };
        let mut start = 0;
        for i in 1..=n {
            if i == n || key(p.lab[i] as usize) != key(p.lab[start] as usize) {
                for k in start..i {
                    p.cell_of[p.lab[k] as usize] = start as u32;
                }
                p.cell_end[start] = i as u32;
                p.cells += 1;
                start = i;
            }
        }
        p
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    /// Splits `node` off the front of its cell.
    fn individualize(&mut self, node: u32) {
        let start = self.cell_of[node as usize] as usize;
        let end = self.cell_end[start] as usize;
        debug_assert!(end - start > 1);
        let at = self.lab[start..end]
            .iter()
            .position(|&x| x == node)
            .unwrap()
            + start;
        self.lab.swap(start, at);
        self.cell_end[start] = start as u32 + 1;
        self.cell_end[start + 1] = end as u32;
        for k in start + 1..end {
            self.cell_of[self.lab[k] as usize] = start as u32 + 1;
        }
        self.cells += 1;
    }

    /// Refines to the coarsest equitable partition finer than the current
    /// one and returns a hash of the result (an isomorphism invariant of
    /// the graph together with the individualized nodes).
    fn refine(&mut self, g: &IncidenceGraph) -> u64 {
        let n = self.lab.len();
        let mut scratch: Vec<(SmallVec<[u32; 8]>, u32)> = Vec::new();
        loop {
            let mut changed = false;
            let mut start = 0;
            while start < n {
                let end = self.cell_end[start] as usize;
                if end - start > 1 {
                    scratch.clear();
                    for &node in &self.lab[start..end] {
                        let mut sig: SmallVec<[u32; 8]> = g.adj[node as usize]
                            .iter()
                            .map(|&m| self.cell_of[m as usize])
                            .collect();
                        sig.sort_unstable();
                        scratch.push((sig, node));
                    }
                    if scratch.iter().any(|(s, _)| *s != scratch[0].0) {
                        scratch.sort_unstable();
                        let mut cell = start;
                        for (k, (sig, node)) in scratch.iter().enumerate() {
                            let p = start + k;
                            if k > 0 && *sig != scratch[k - 1].0 {
                                self.cell_end[cell] = p as u32;
                                cell = p;
                                self.cells += 1;
                            }
                            self.lab[p] = *node;
                        }
                        self.cell_end[cell] = end as u32;
                        let mut cell = start;
                        for p in start..end {
                            if p > start && scratch[p - start].0 != scratch[p - start - 1].0 {
                                cell = p;
                            }
                            self.cell_of[self.lab[p] as usize] = cell as u32;
                        }
                        changed = true;
                    }
                }
                start = end;
            }
            if !changed {
                break;
            }
        }
        self.trace(g)
    }

    fn trace(&self, g: &IncidenceGraph) -> u64 {
        let mut h = Fnv::default();
        let n = self.lab.len();
        let mut start = 0;
        let mut sig: SmallVec<[u32; 8]> = SmallVec::new();
        while start < n {
            let end = self.cell_end[start] as usize;
            h.write(start as u64);
            h.write(end as u64);
            sig.clear();
            sig.extend(
                g.adj[self.lab[start] as usize]
                    .iter()
                    .map(|&m| self.cell_of[m as usize]),
            );
            sig.sort_unstable();
            for &s in &sig {
                h.write(s as u64);
            }
            start = end;
        }
        h.finish()
    }

    /// First smallest non-singleton cell, as (start, end).
    fn target_cell(&self) -> Option<(usize, usize)> {
        let n = self.lab.len();
        let mut best: Option<(usize, usize)> = None;
        let mut start = 0;
        while start < n {
            let end = self.cell_end[start] as usize;
            let size = end - start;
            if size > 1 && best.is_none_or(|(s, e)| size < e - s) {
                best = Some((start, end));
                if size == 2 {
                    break;
                }
            }
            start = end;
        }
        best
    }
}

/// FNV-1a over 64-bit words; fixed so canonical forms are stable across
/// builds and platforms.
struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn write(&mut self, x: u64) {
        for b in x.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

#[derive(Clone)]
struct Leaf {
    traces: Vec<u64>,
    cert: Vec<u32>,
    lab: Vec<u32>,
    path: Vec<u32>,
}

const MAX_GENERATORS: usize = 128;

struct Search<'g> {
    g: &'g IncidenceGraph,
    best: Option<Leaf>,
    first: Option<Leaf>,
    generators: Vec<Vec<u32>>,
    path: Vec<u32>,
    traces: Vec<u64>,
}

impl<'g> Search<'g> {
    fn new(g: &'g IncidenceGraph) -> Self {
        Search {
            g,
            best: None,
            first: None,
            generators: Vec::new(),
            path: Vec::new(),
            traces: Vec::new(),
        }
    }

    fn run(&mut self, root: Partition) {
        self.visit(root);
    }

    /// Explores the subtree at `part`. Returns `Some(k)` when the search
    /// should unwind to the node at depth `k`.
    fn visit(&mut self, mut part: Partition) -> Option<usize> {
        let depth = self.path.len();
        let trace = part.refine(self.g);
        self.traces.truncate(depth);
        self.traces.push(trace);
        if let Some(best) = &self.best {
            let k = self.traces.len().min(best.traces.len());
            if self.traces[..k] > best.traces[..k] {
                return None;
            }
        }
        if part.is_discrete() {
            return self.leaf(part);
        }
        let (start, end) = part
            .target_cell()
            .expect("non-discrete partition has a target");
        let mut members = part.lab[start..end].to_vec();
        members.sort_unstable();
        let mut explored: Vec<u32> = Vec::new();
        let mut orbits: Option<(usize, Vec<u32>)> = None;
        for v in members {
            if !explored.is_empty() {
                let stale = orbits
                    .as_ref()
                    .is_none_or(|(n, _)| *n != self.generators.len());
                if stale {
                    orbits = Some((self.generators.len(), self.orbits_fixing_path()));
                }
                let orb = &orbits.as_ref().unwrap().1;
                if explored.iter().any(|&w| orb[w as usize] == orb[v as usize]) {
                    continue;
                }
            }
            let mut child = part.clone();
            child.individualize(v);
            self.path.push(v);
            let jump = self.visit(child);
            self.path.pop();
            self.traces.truncate(depth + 1);
            explored.push(v);
            if let Some(k) = jump {
                if k < depth {
                    return Some(k);
                }
            }
        }
        None
    }

    fn leaf(&mut self, part: Partition) -> Option<usize> {
        let cert = self.g.certificate(&part.lab);
        for known in [&self.first, &self.best].into_iter().flatten() {
            if known.traces == self.traces && known.cert == cert {
                let mut gamma = vec![0u32; part.lab.len()];
                for (p, &node) in known.lab.iter().enumerate() {
                    gamma[node as usize] = part.lab[p];
                }
                let diverge = known
                    .path
                    .iter()
                    .zip(&self.path)
                    .take_while(|(a, b)| a == b)
                    .count();
                if self.generators.len() < MAX_GENERATORS
                    && gamma.iter().enumerate().any(|(i, &x)| i as u32 != x)
                {
                    self.generators.push(gamma);
                }
                return Some(diverge);
            }
        }
        let leaf = Leaf {
            traces: self.traces.clone(),
            cert,
            lab: part.lab,
            path: self.path.clone(),
        };
        let better = match &self.best {
            None => true,
            Some(b) => (&leaf.traces, &leaf.cert) < (&b.traces, &b.cert),
        };
        if self.first.is_none() {
            self.first = Some(leaf.clone());
        }
        if better {
            self.best = Some(leaf);
        }
        None
    }

    /// Orbit representative per node under the generators that fix every
    /// node on the current path.
    fn orbits_fixing_path(&self) -> Vec<u32> {
        let n = self.g.len();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for gamma in &self.generators {
            if self.path.iter().any(|&v| gamma[v as usize] != v) {
                continue;
            }
            for (i, &j) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            }
        }
        (0..n as u32).map(|x| find(&mut parent, x)).collect()
    }
}
