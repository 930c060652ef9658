//! 0/1 colorings: every edge gets exactly one vertex valued 1.
//!
//! A hypergraph admitting no such coloring is a Kochen-Specker set. The
//! solver is a backtracking search with propagation: a vertex set to 1
//! zeroes every vertex sharing an edge with it, an edge whose other vertices
//! are all 0 forces its last vertex to 1, and an all-zero edge is a
//! contradiction.

use std::collections::BTreeMap;

use crate::mmp::{Hypergraph, VertexId};

/// A 0/1 assignment to vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    pub assignment: BTreeMap<VertexId, bool>,
}

impl Coloring {
    /// Checks the exactly-one-per-edge condition directly, independently of
    /// the solver. Unassigned vertices count as 0.
    pub fn is_valid_for(&self, h: &Hypergraph) -> bool {
        h.edges().iter().all(|e| {
            e.vertices()
                .iter()
                .filter(|v| self.assignment.get(v).copied().unwrap_or(false))
                .count()
                == 1
        })
    }

    /// Vertices valued 1, ascending.
    pub fn ones(&self) -> Vec<VertexId> {
        self.assignment
            .iter()
            .filter(|(_, &b)| b)
            .map(|(&v, _)| v)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KsVerdict {
    pub colorable: bool,
    pub witness: Option<Coloring>,
    /// Only computed for non-colorable inputs.
    pub critical: Option<bool>,
    pub parity: bool,
}

/// Full verdict: colorability with witness, criticality when non-colorable,
/// and the parity test.
pub fn classify(h: &Hypergraph) -> KsVerdict {
    let witness = find_coloring(h);
    let colorable = witness.is_some();
    KsVerdict {
        colorable,
        critical: (!colorable).then(|| critical_given_ks(h)),
        witness,
        parity: has_parity_proof(h),
    }
}

pub fn is_colorable(h: &Hypergraph) -> (bool, Option<Coloring>) {
    let c = find_coloring(h);
    (c.is_some(), c)
}

/// A coloring, or `None` when the exhaustive search finds none.
pub fn find_coloring(h: &Hypergraph) -> Option<Coloring> {
    let mut s = Solver::new(h);
    if !s.solve() {
        return None;
    }
    let assignment = s
        .value
        .iter()
        .enumerate()
        .filter(|(v, _)| s.degree[*v] > 0)
        .map(|(v, val)| (VertexId(v as u32), *val == Val::One))
        .collect();
    Some(Coloring { assignment })
}

/// True when no 0/1 coloring exists.
pub fn is_ks(h: &Hypergraph) -> bool {
    !Solver::new(h).solve()
}

/// Non-colorable, and colorable after removing any single edge.
pub fn is_critical(h: &Hypergraph) -> bool {
    is_ks(h) && critical_given_ks(h)
}

fn critical_given_ks(h: &Hypergraph) -> bool {
    // Orphaned vertices carry no constraint, so the residual need not be
    // renormalized before testing.
    (0..h.num_edges()).all(|skip| {
        let mut s = Solver::with_skipped_edge(h, Some(skip));
        s.solve()
    })
}

/// Every vertex has even degree and the edge count is odd. Then the ones of
/// a coloring would be counted an even number of times over the edges, but
/// each of an odd number of edges holds exactly one, so no coloring exists.
pub fn has_parity_proof(h: &Hypergraph) -> bool {
    h.num_edges() % 2 == 1 && h.degrees().iter().all(|d| d % 2 == 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Val {
    Unset,
    Zero,
    One,
}

enum Change {
    Vertex(usize),
    EdgeOne(usize),
    EdgeZero(usize),
}

/// Per-call solver state. Edges are stored as index lists; `edge_zeros` and
/// `edge_has_one` are maintained incrementally and undone from the trail.
struct Solver {
    edges: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    degree: Vec<usize>,
    value: Vec<Val>,
    edge_zeros: Vec<usize>,
    edge_has_one: Vec<bool>,
    trail: Vec<Change>,
    queue: Vec<(usize, Val)>,
}

impl Solver {
    fn new(h: &Hypergraph) -> Self {
        Self::with_skipped_edge(h, None)
    }

    fn with_skipped_edge(h: &Hypergraph, skip: Option<usize>) -> Self {
        let n = h.id_bound();
        let edges: Vec<Vec<usize>> = h
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, e)| e.vertices().iter().map(|v| v.index()).collect())
            .collect();
        let mut incident = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                incident[v].push(i);
            }
        }
        let degree = incident.iter().map(Vec::len).collect();
        Solver {
            edge_zeros: vec![0; edges.len()],
            edge_has_one: vec![false; edges.len()],
            edges,
            incident,
            degree,
            value: vec![Val::Unset; n],
            trail: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn solve(&mut self) -> bool {
        if self.edges.iter().any(Vec::is_empty) {
            return false;
        }
        self.search()
    }

    fn search(&mut self) -> bool {
        // Branch on the unsatisfied edge with the fewest open vertices.
        let mut best: Option<(usize, usize)> = None;
        for (i, e) in self.edges.iter().enumerate() {
            if self.edge_has_one[i] {
                continue;
            }
            let open = e.len() - self.edge_zeros[i];
            if best.is_none_or(|(_, o)| open < o) {
                best = Some((i, open));
            }
        }
        let Some((edge, _)) = best else {
            return true;
        };
        // Within it, the open vertex of maximum degree, lowest id first.
        let mut candidates: Vec<usize> = self.edges[edge]
            .iter()
            .copied()
            .filter(|&v| self.value[v] == Val::Unset)
            .collect();
        candidates.sort_by_key(|&v| (std::cmp::Reverse(self.degree[v]), v));
        let v = candidates[0];
        for val in [Val::One, Val::Zero] {
            let mark = self.trail.len();
            if self.assign(v, val) && self.search() {
                return true;
            }
            self.undo(mark);
        }
        false
    }

    /// Sets `v` and propagates; false on contradiction (state must then be
    /// undone by the caller).
    fn assign(&mut self, v: usize, val: Val) -> bool {
        self.queue.clear();
        self.queue.push((v, val));
        while let Some((v, val)) = self.queue.pop() {
            match self.value[v] {
                Val::Unset => {}
                cur if cur == val => continue,
                _ => return false,
            }
            self.value[v] = val;
            self.trail.push(Change::Vertex(v));
            for k in 0..self.incident[v].len() {
                let e = self.incident[v][k];
                match val {
                    Val::One => {
                        if self.edge_has_one[e] {
                            return false;
                        }
                        self.edge_has_one[e] = true;
                        self.trail.push(Change::EdgeOne(e));
                        for &w in &self.edges[e] {
                            if w != v && self.value[w] == Val::Unset {
                                self.queue.push((w, Val::Zero));
                            }
                        }
                    }
                    Val::Zero => {
                        self.edge_zeros[e] += 1;
                        self.trail.push(Change::EdgeZero(e));
                        if self.edge_has_one[e] {
                            continue;
                        }
                        let size = self.edges[e].len();
                        let zeros = self.edge_zeros[e];
                        if zeros == size {
                            return false;
                        }
                        if zeros + 1 == size {
                            if let Some(&w) =
                                self.edges[e].iter().find(|&&w| self.value[w] == Val::Unset)
                            {
                                self.queue.push((w, Val::One));
                            }
                        }
                    }
                    Val::Unset => unreachable!(),
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail") {
                Change::Vertex(v) => self.value[v] = Val::Unset,
                Change::EdgeOne(e) => self.edge_has_one[e] = false,
                Change::EdgeZero(e) => self.edge_zeros[e] -= 1,
            }
        }
    }
}
