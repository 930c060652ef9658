//! Loops (n-gons) in a hypergraph.
//!
//! A loop is a cyclic sequence of distinct edges `e0 .. e(n-1)`, `n >= 3`,
//! in which consecutive edges share exactly one vertex (the joint `vi` of
//! `ei` and `e(i+1 mod n)`) and non-consecutive edges share none. These are
//! the cycles that can be drawn as the sides of a polygon: every loop
//! vertex lies on one side, or on two when it is a corner. Without the
//! second condition almost every KS set has a loop through all its edges.
//!
//! Loops are searched depth-first from their smallest edge, pruning a
//! partial path when the edges still reachable from its tail cannot extend
//! it past the current goal.

use std::collections::HashSet;
use std::fmt::Write as _;

use smallvec::SmallVec;
use thiserror::Error;

use crate::mmp::{Hypergraph, VertexId};

/// Edge sets are bitmasks; larger hypergraphs are rejected.
pub const MAX_LOOP_EDGES: usize = 128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoopError {
    #[error("loop search supports at most {MAX_LOOP_EDGES} edges, got {0}")]
    TooManyEdges(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Loop {
    pub edges: Vec<usize>,
    /// `joints[i]` is shared by `edges[i]` and `edges[(i + 1) % n]`.
    pub joints: Vec<VertexId>,
}

impl Loop {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The same cycle traversed the other way, from the same first edge.
    pub fn reversed(&self) -> Loop {
        let n = self.edges.len();
        let mut edges = vec![self.edges[0]];
        edges.extend(self.edges[1..].iter().rev());
        let joints = (0..n).map(|i| self.joints[(2 * n - 1 - i) % n]).collect();
        Loop { edges, joints }
    }

    /// Checks the loop conditions against `h`.
    pub fn is_valid_for(&self, h: &Hypergraph) -> bool {
        let n = self.edges.len();
        if n < 3 || self.joints.len() != n {
            return false;
        }
        let distinct_edges: HashSet<_> = self.edges.iter().collect();
        let distinct_joints: HashSet<_> = self.joints.iter().collect();
        if distinct_edges.len() != n || distinct_joints.len() != n {
            return false;
        }
        if self.edges.iter().any(|&e| e >= h.num_edges()) {
            return false;
        }
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let common = h.edges()[self.edges[i]].intersection(&h.edges()[self.edges[j]]);
                if j == i + 1 {
                    common.as_slice() == [self.joints[i]]
                } else if i == 0 && j == n - 1 {
                    common.as_slice() == [self.joints[n - 1]]
                } else {
                    common.is_empty()
                }
            })
        })
    }
}

/// Size of the largest loop and one loop of that size; `(0, None)` when the
/// hypergraph has no loop.
pub fn biggest_loop(h: &Hypergraph) -> Result<(usize, Option<Loop>), LoopError> {
    let mut s = LoopSearch::new(h)?;
    s.run(Goal::Longest);
    Ok((s.best_len, s.best))
}

/// When two loops count as the same arrangement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// Rotations and reflections identified.
    Undirected,
    /// Only rotations identified; each cycle appears once per direction.
    Directed,
}

/// Every loop with exactly `n` edges, one per class under rotation and
/// reflection. Each loop starts at its smallest edge and runs in the
/// direction whose second edge is smaller than its last.
pub fn loop_arrangements(h: &Hypergraph, n: usize) -> Result<Vec<Loop>, LoopError> {
    loop_arrangements_with(h, n, Equivalence::Undirected)
}

/// As [`loop_arrangements`]; under `Directed` each undirected loop is
/// followed by its reversal (same start edge).
pub fn loop_arrangements_with(
    h: &Hypergraph,
    n: usize,
    eq: Equivalence,
) -> Result<Vec<Loop>, LoopError> {
    let mut s = LoopSearch::new(h)?;
    if n < 3 || n > h.num_edges() {
        return Ok(Vec::new());
    }
    s.run(Goal::AllOfSize(n));
    Ok(match eq {
        Equivalence::Undirected => s.found,
        Equivalence::Directed => s
            .found
            .into_iter()
            .flat_map(|lp| {
                let rev = lp.reversed();
                [lp, rev]
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClassification {
    pub polygon: Vec<usize>,
    pub free: Vec<usize>,
    pub span: Vec<usize>,
    pub free_vertices: Vec<VertexId>,
}

/// Splits edges relative to a loop. Loop vertices are all vertices of the
/// loop's edges; free vertices are the rest. Free edges contain a free
/// vertex, span edges are the remaining non-loop edges.
pub fn classify_edges(h: &Hypergraph, lp: &Loop) -> EdgeClassification {
    let mut on_loop = vec![false; h.id_bound()];
    let mut is_polygon = vec![false; h.num_edges()];
    for &e in &lp.edges {
        is_polygon[e] = true;
        for v in h.edges()[e].vertices() {
            on_loop[v.index()] = true;
        }
    }
    let mut c = EdgeClassification {
        polygon: lp.edges.clone(),
        free: Vec::new(),
        span: Vec::new(),
        free_vertices: Vec::new(),
    };
    let mut seen = vec![false; h.id_bound()];
    for (i, e) in h.edges().iter().enumerate() {
        for v in e.vertices() {
            if !on_loop[v.index()] && !std::mem::replace(&mut seen[v.index()], true) {
                c.free_vertices.push(*v);
            }
        }
        if is_polygon[i] {
            continue;
        }
        if e.vertices().iter().any(|v| !on_loop[v.index()]) {
            c.free.push(i);
        } else {
            c.span.push(i);
        }
    }
    c.free_vertices.sort_unstable();
    c
}

/// One-line listing in the loop notation: the polygon edges as an MMP line,
/// each oriented from its incoming joint to its outgoing joint, then every
/// other edge with each vertex marked `*` (on the loop) or `.` (free).
pub fn annotate(h: &Hypergraph, lp: &Loop) -> String {
    let n = lp.len();
    let mut on_loop = vec![false; h.id_bound()];
    for &e in &lp.edges {
        for v in h.edges()[e].vertices() {
            on_loop[v.index()] = true;
        }
    }
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push(',');
        }
        for v in oriented_polygon_edge(h, lp, i) {
            v.write_to(&mut out);
        }
    }
    out.push('.');
    let polygon: HashSet<usize> = lp.edges.iter().copied().collect();
    for (i, e) in h.edges().iter().enumerate() {
        if polygon.contains(&i) {
            continue;
        }
        out.push(' ');
        for v in e.vertices() {
            v.write_to(&mut out);
            out.push(if on_loop[v.index()] { '*' } else { '.' });
        }
    }
    out
}

/// Vertices of polygon edge `i`: incoming joint, interior vertices in edge
/// order, outgoing joint.
fn oriented_polygon_edge(h: &Hypergraph, lp: &Loop, i: usize) -> Vec<VertexId> {
    let n = lp.len();
    let incoming = lp.joints[(i + n - 1) % n];
    let outgoing = lp.joints[i];
    let mut vs = vec![incoming];
    vs.extend(
        h.edges()[lp.edges[i]]
            .vertices()
            .iter()
            .filter(|&&v| v != incoming && v != outgoing),
    );
    vs.push(outgoing);
    vs
}

enum Goal {
    Longest,
    AllOfSize(usize),
}

struct LoopSearch {
    m: usize,
    /// Edges sharing at least one vertex.
    adj: Vec<u128>,
    /// Edges sharing exactly one vertex.
    adj1: Vec<u128>,
    /// The shared vertex of each `adj1` pair, row-major `m × m`.
    joint: Vec<Option<VertexId>>,
    edge_vertices: Vec<SmallVec<[usize; 4]>>,
    best_len: usize,
    best: Option<Loop>,
    found: Vec<Loop>,
    path: Vec<usize>,
    joints: Vec<VertexId>,
    /// How many path edges contain each vertex.
    cover: Vec<u8>,
}

impl LoopSearch {
    fn new(h: &Hypergraph) -> Result<Self, LoopError> {
        let m = h.num_edges();
        if m > MAX_LOOP_EDGES {
            return Err(LoopError::TooManyEdges(m));
        }
        let mut adj = vec![0u128; m];
        let mut adj1 = vec![0u128; m];
        let mut joint = vec![None; m * m];
        for a in 0..m {
            for b in a + 1..m {
                let common = h.edges()[a].intersection(&h.edges()[b]);
                if !common.is_empty() {
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                }
                if common.len() == 1 {
                    adj1[a] |= 1 << b;
                    adj1[b] |= 1 << a;
                    joint[a * m + b] = Some(common[0]);
                    joint[b * m + a] = Some(common[0]);
                }
            }
        }
        Ok(LoopSearch {
            m,
            adj,
            adj1,
            joint,
            edge_vertices: h
                .edges()
                .iter()
                .map(|e| e.vertices().iter().map(|v| v.index()).collect())
                .collect(),
            best_len: 0,
            best: None,
            found: Vec::new(),
            path: Vec::new(),
            joints: Vec::new(),
            cover: vec![0; h.id_bound()],
        })
    }

    fn run(&mut self, goal: Goal) {
        for e0 in 0..self.m {
            let free = mask_below(self.m) & !mask_below(e0 + 1);
            if let Goal::Longest = goal {
                if self.best_len > free.count_ones() as usize {
                    break;
                }
            }
            self.push(e0, None);
            self.extend(&goal, free);
            self.pop();
        }
    }

    fn push(&mut self, e: usize, joint: Option<VertexId>) {
        self.path.push(e);
        self.joints.extend(joint);
        for &v in &self.edge_vertices[e] {
            self.cover[v] += 1;
        }
    }

    fn pop(&mut self) {
        let e = self.path.pop().unwrap();
        if !self.path.is_empty() {
            self.joints.pop();
        }
        for &v in &self.edge_vertices[e] {
            self.cover[v] -= 1;
        }
    }

    /// The smallest loop length still worth finding.
    fn target(&self, goal: &Goal) -> usize {
        match goal {
            Goal::Longest => self.best_len.max(2) + 1,
            Goal::AllOfSize(n) => *n,
        }
    }

    /// `free` holds the edges above the start edge that are unused and
    /// touch no interior path edge.
    fn extend(&mut self, goal: &Goal, free: u128) {
        let m = self.m;
        let e0 = self.path[0];
        let tail = *self.path.last().unwrap();
        let len = self.path.len();
        let closers = if len >= 2 { self.adj[e0] } else { 0 };

        // Edges touching e0 can only be the last edge of the loop, so the
        // walk from the tail may stop at them but not pass through.
        let start = self.adj1[tail] & free;
        let mut reach = start;
        let mut frontier = start & !closers;
        while frontier != 0 {
            let mut grown = 0u128;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                grown |= self.adj1[x];
            }
            let new = grown & free & !reach;
            reach |= new;
            frontier = new & !closers;
        }
        if len + (reach.count_ones() as usize) < self.target(goal) || reach & self.adj1[e0] == 0 {
            return;
        }

        let mut next = start;
        while next != 0 {
            let u = next.trailing_zeros() as usize;
            next &= next - 1;
            let j = self.joint[tail * m + u].unwrap();
            let mut touched = 0;
            let mut ok = true;
            for &v in &self.edge_vertices[u] {
                match self.cover[v] {
                    0 => {}
                    1 => touched += 1,
                    _ => ok = false,
                }
            }
            if !ok {
                continue;
            }
            if touched == 1 {
                if closers & (1 << u) != 0 {
                    continue;
                }
                if let Goal::AllOfSize(n) = goal {
                    if len + 1 >= *n {
                        continue;
                    }
                }
                let interior = if tail == e0 { 0 } else { self.adj[tail] };
                self.push(u, Some(j));
                self.extend(goal, free & !(1 << u) & !interior);
                self.pop();
            } else if touched == 2 && len >= 2 && self.adj1[e0] & (1 << u) != 0 {
                let n = len + 1;
                let wanted = match goal {
                    Goal::Longest => n > self.best_len,
                    Goal::AllOfSize(k) => n == *k && self.path[1] < u,
                };
                if !wanted {
                    continue;
                }
                let mut edges = self.path.clone();
                edges.push(u);
                let mut joints = self.joints.clone();
                joints.push(j);
                joints.push(self.joint[u * m + e0].unwrap());
                let lp = Loop { edges, joints };
                match goal {
                    Goal::Longest => {
                        self.best_len = n;
                        self.best = Some(lp);
                    }
                    Goal::AllOfSize(_) => self.found.push(lp),
                }
            }
            if len + (reach.count_ones() as usize) < self.target(goal) {
                return;
            }
        }
    }
}

fn mask_below(m: usize) -> u128 {
    if m >= 128 {
        !0
    } else {
        (1u128 << m) - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Asymptote,
    Svg,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayoutConfig {
    /// Default tension of non-polygon edge curves; must be positive.
    pub tension: f64,
    /// Default curl at the curve endpoints.
    pub curl: f64,
    /// Per-edge `(tension, curl)` overrides, by edge index.
    pub edge_overrides: Vec<(usize, f64, f64)>,
    /// Horizontal distance between columns of free vertices.
    pub column_spacing: f64,
    pub per_column: usize,
    pub backend: Backend,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            tension: 1.0,
            curl: 1.0,
            edge_overrides: Vec::new(),
            column_spacing: 18.0,
            per_column: 4,
            backend: Backend::Svg,
        }
    }
}

impl LayoutConfig {
    fn params(&self, edge: usize) -> (f64, f64) {
        self.edge_overrides
            .iter()
            .rev()
            .find(|(e, _, _)| *e == edge)
            .map(|&(_, t, c)| (t, c))
            .unwrap_or((self.tension, self.curl))
    }
}

const RADIUS: f64 = 100.0;

type Point = (f64, f64);

/// Vertex positions: joints on a regular n-gon, interior vertices of
/// polygon edges evenly along their side, free vertices in columns inside
/// the polygon left of centre.
fn place(h: &Hypergraph, lp: &Loop, cfg: &LayoutConfig) -> Vec<Option<Point>> {
    let n = lp.len();
    let mut pos = vec![None; h.id_bound()];
    let corner = |i: usize| {
        let a = std::f64::consts::FRAC_PI_2 - std::f64::consts::TAU * i as f64 / n as f64;
        (RADIUS * a.cos(), RADIUS * a.sin())
    };
    for (i, v) in lp.joints.iter().enumerate() {
        pos[v.index()] = Some(corner(i));
    }
    for i in 0..n {
        let side = oriented_polygon_edge(h, lp, i);
        let (a, b) = (corner((i + n - 1) % n), corner(i));
        let k = side.len() - 1;
        for (j, v) in side.iter().enumerate().take(k).skip(1) {
            if pos[v.index()].is_none() {
                let t = j as f64 / k as f64;
                pos[v.index()] = Some((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
            }
        }
    }
    let free = classify_edges(h, lp).free_vertices;
    let per = cfg.per_column.max(1);
    let columns = free.len().div_ceil(per);
    let x0 = -0.25 * RADIUS - cfg.column_spacing * (columns as f64 - 1.0) / 2.0;
    for (k, v) in free.iter().enumerate() {
        let (col, row) = (k / per, k % per);
        let in_col = per.min(free.len() - col * per);
        let y = 0.5 * RADIUS * (row as f64 - (in_col as f64 - 1.0) / 2.0) / per as f64 * 2.0;
        pos[v.index()] = Some((x0 + col as f64 * cfg.column_spacing, y));
    }
    pos
}

/// Drawing source for `h` around `lp`, in the configured backend.
pub fn emit_layout(h: &Hypergraph, lp: &Loop, cfg: &LayoutConfig) -> String {
    let pos = place(h, lp, cfg);
    let polygon: HashSet<usize> = lp.edges.iter().copied().collect();
    let at = |v: &VertexId| pos[v.index()].expect("every vertex is placed");
    match cfg.backend {
        Backend::Asymptote => {
            let mut s = String::from("unitsize(1.5pt);\ndefaultpen(fontsize(7pt));\n");
            for i in 0..lp.len() {
                let side = oriented_polygon_edge(h, lp, i);
                let (a, b) = (at(&side[0]), at(side.last().unwrap()));
                writeln!(s, "draw(({:.3},{:.3})--({:.3},{:.3}));", a.0, a.1, b.0, b.1).unwrap();
            }
            for (i, e) in h.edges().iter().enumerate() {
                if polygon.contains(&i) {
                    continue;
                }
                let (t, c) = cfg.params(i);
                let pts: Vec<String> = e
                    .vertices()
                    .iter()
                    .map(|v| {
                        let p = at(v);
                        format!("({:.3},{:.3})", p.0, p.1)
                    })
                    .collect();
                let last = pts.len() - 1;
                let mut path = String::new();
                for (k, p) in pts.iter().enumerate() {
                    if k > 0 {
                        write!(path, "..tension {t:.3}..").unwrap();
                    }
                    if k == 0 || k == last {
                        write!(path, "{p}{{curl {c:.3}}}").unwrap();
                    } else {
                        path.push_str(p);
                    }
                }
                writeln!(s, "draw({path});").unwrap();
            }
            for_each_vertex(h, |v| {
                let p = at(&v);
                writeln!(
                    s,
                    "dot(({:.3},{:.3}));\nlabel(\"{}\",({:.3},{:.3}),NE);",
                    p.0,
                    p.1,
                    escape_asy(&v.to_string()),
                    p.0,
                    p.1
                )
                .unwrap();
            });
            s
        }
        Backend::Svg => {
            let m = RADIUS * 1.3;
            let mut s = format!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.3} {:.3} {:.3} {:.3}\">\n<g transform=\"scale(1,-1)\" fill=\"none\" stroke=\"black\" stroke-width=\"0.8\">\n",
                -m,
                -m,
                2.0 * m,
                2.0 * m
            );
            for i in 0..lp.len() {
                let side = oriented_polygon_edge(h, lp, i);
                let (a, b) = (at(&side[0]), at(side.last().unwrap()));
                writeln!(
                    s,
                    "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\"/>",
                    a.0, a.1, b.0, b.1
                )
                .unwrap();
            }
            for (i, e) in h.edges().iter().enumerate() {
                if polygon.contains(&i) {
                    continue;
                }
                let (t, c) = cfg.params(i);
                let pts: Vec<Point> = e.vertices().iter().map(at).collect();
                writeln!(s, "<path d=\"{}\"/>", bezier_path(&pts, t, c)).unwrap();
            }
            s.push_str("</g>\n<g font-size=\"7\">\n");
            for_each_vertex(h, |v| {
                let p = at(&v);
                writeln!(
                    s,
                    "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"1.5\"/><text x=\"{:.3}\" y=\"{:.3}\">{}</text>",
                    p.0,
                    -p.1,
                    p.0 + 2.0,
                    -p.1 - 2.0,
                    escape_xml(&v.to_string())
                )
                .unwrap();
            });
            s.push_str("</g>\n</svg>\n");
            s
        }
    }
}

/// Smooth cubic Bézier through `pts`. Interior tangents follow the
/// neighbouring points (Catmull-Rom), scaled down by the tension; at the
/// ends the tangent points at the next point, scaled by the curl.
fn bezier_path(pts: &[Point], tension: f64, curl: f64) -> String {
    let n = pts.len();
    let mut d = format!("M {:.3} {:.3}", pts[0].0, pts[0].1);
    let tangent = |i: usize| -> Point {
        let (a, b) = if i == 0 {
            (pts[0], pts[1.min(n - 1)])
        } else if i == n - 1 {
            (pts[n.saturating_sub(2)], pts[n - 1])
        } else {
            (pts[i - 1], pts[i + 1])
        };
        let scale = if i == 0 || i == n - 1 { curl } else { 0.5 } / tension;
        ((b.0 - a.0) * scale, (b.1 - a.1) * scale)
    };
    for i in 1..n {
        let (p, q) = (pts[i - 1], pts[i]);
        let (tp, tq) = (tangent(i - 1), tangent(i));
        write!(
            d,
            " C {:.3} {:.3} {:.3} {:.3} {:.3} {:.3}",
            p.0 + tp.0 / 3.0,
            p.1 + tp.1 / 3.0,
            q.0 - tq.0 / 3.0,
            q.1 - tq.1 / 3.0,
            q.0,
            q.1
        )
        .unwrap();
    }
    d
}

fn for_each_vertex(h: &Hypergraph, mut f: impl FnMut(VertexId)) {
    let mut seen = vec![false; h.id_bound()];
    for v in h.edges().iter().flat_map(|e| e.vertices().iter()) {
        if !std::mem::replace(&mut seen[v.index()], true) {
            f(*v);
        }
    }
}

fn escape_asy(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
