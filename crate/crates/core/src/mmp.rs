//! MMP hypergraphs: data model, the line-oriented text encoding, validation
//! against the MMP conditions, renormalization and connectivity.
//!
//! A line looks like `1234,4567,7891.`: every character (optionally preceded
//! by one or more `+`) names a vertex, edges are separated by commas and the
//! line ends with a full stop.

use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

/// Printable characters naming vertices 0..90, in order. Index `i + 90·p` is
/// written as `p` plus signs followed by `VERTEX_CHARS[i]`.
pub const VERTEX_CHARS: &[u8; 90] = b"123456789\
ABCDEFGHIJKLMNOPQRSTUVWXYZ\
abcdefghijklmnopqrstuvwxyz\
!\"#$%&'()*-/:;<=>?@[\\]^_`{|}~";

const BASE: u32 = VERTEX_CHARS.len() as u32;

fn char_index(c: u8) -> Option<u32> {
    static TABLE: std::sync::OnceLock<[u8; 256]> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [u8::MAX; 256];
        for (i, &c) in VERTEX_CHARS.iter().enumerate() {
            t[c as usize] = i as u8;
        }
        t
    });
    match table[c as usize] {
        u8::MAX => None,
        i => Some(i as u32),
    }
}

/// Dense vertex identifier; `VertexId(0)` is written `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Appends the MMP spelling of this vertex to `out`.
    pub fn write_to(self, out: &mut String) {
        for _ in 0..self.0 / BASE {
            out.push('+');
        }
        out.push(VERTEX_CHARS[(self.0 % BASE) as usize] as char);
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_to(&mut s);
        f.write_str(&s)
    }
}

/// An edge: an ordered list of distinct vertices. A sorted copy is kept
/// alongside for intersection tests.
#[derive(Clone, Debug)]
pub struct Edge {
    vertices: SmallVec<[VertexId; 4]>,
    sorted: SmallVec<[VertexId; 4]>,
}

impl Edge {
    /// Builds an edge, rejecting repeated vertices. Size is not checked here;
    /// see [`validate_mmp`].
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Result<Self, MmpError> {
        let vertices: SmallVec<[VertexId; 4]> = vertices.into_iter().collect();
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(MmpError::RepeatedVertex { vertex: w[0] });
        }
        Ok(Edge { vertices, sorted })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Vertices in ascending id order.
    pub fn sorted(&self) -> &[VertexId] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.sorted.binary_search(&v).is_ok()
    }

    /// Number of vertices shared with `other`.
    pub fn intersection_size(&self, other: &Edge) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        let (a, b) = (&self.sorted, &other.sorted);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// Shared vertices, ascending.
    pub fn intersection(&self, other: &Edge) -> SmallVec<[VertexId; 4]> {
        self.sorted
            .iter()
            .copied()
            .filter(|v| other.contains(*v))
            .collect()
    }
}

impl PartialEq for Edge {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for Edge {}

/// A hypergraph as an ordered list of edges. The vertex set is the set of
/// vertices used by the edges, so MMP condition (i) holds by construction;
/// ids need not be contiguous until [`renormalize`] is applied.
#[derive(Clone, Debug, Default)]
pub struct Hypergraph {
    edges: Vec<Edge>,
    num_vertices: usize,
    id_bound: usize,
    label: Option<String>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

impl Hypergraph {
    pub fn new(edges: Vec<Edge>) -> Self {
        let id_bound = edges
            .iter()
            .flat_map(|e| e.vertices().iter())
            .map(|v| v.index() + 1)
            .max()
            .unwrap_or(0);
        let mut seen = vec![false; id_bound];
        let mut num_vertices = 0;
        for v in edges.iter().flat_map(|e| e.vertices().iter()) {
            if !seen[v.index()] {
                seen[v.index()] = true;
                num_vertices += 1;
            }
        }
        Hypergraph {
            edges,
            num_vertices,
            id_bound,
            label: None,
        }
    }

    /// Convenience constructor from raw index lists.
    pub fn from_index_lists<I, E>(edges: I) -> Result<Self, MmpError>
    where
        I: IntoIterator<Item = E>,
        E: IntoIterator<Item = u32>,
    {
        let edges = edges
            .into_iter()
            .map(|e| Edge::new(e.into_iter().map(VertexId)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Hypergraph::new(edges))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of distinct vertices appearing in edges.
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// One past the largest vertex id in use.
    pub fn id_bound(&self) -> usize {
        self.id_bound
    }

    /// True when ids are exactly `0..num_vertices`.
    pub fn is_dense(&self) -> bool {
        self.id_bound == self.num_vertices
    }

    /// `"V-E"` signature, e.g. `"60-75"`.
    pub fn signature(&self) -> String {
        format!("{}-{}", self.num_vertices, self.edges.len())
    }

    /// Vertex degrees indexed by vertex id (length `id_bound`).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.id_bound];
        for v in self.edges.iter().flat_map(|e| e.vertices().iter()) {
            deg[v.index()] += 1;
        }
        deg
    }

    /// For each vertex id, the indices of edges containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.id_bound];
        for (i, e) in self.edges.iter().enumerate() {
            for v in e.vertices() {
                inc[v.index()].push(i);
            }
        }
        inc
    }

    /// The sub-hypergraph keeping the edges whose index satisfies `keep`,
    /// in their original order and with the original vertex ids.
    pub fn retain_edges(&self, mut keep: impl FnMut(usize) -> bool) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, e)| e.clone())
            .collect();
        Hypergraph::new(edges)
    }

    /// Removes a single edge.
    pub fn without_edge(&self, index: usize) -> Hypergraph {
        self.retain_edges(|i| i != index)
    }

    /// Applies a vertex relabeling; `map[v]` is the new id of vertex `v`.
    pub fn relabel(&self, map: &[VertexId]) -> Hypergraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.vertices().iter().map(|v| map[v.index()])))
            .collect::<Result<Vec<_>, _>>()
            .expect("relabeling must be injective");
        Hypergraph {
            label: self.label.clone(),
            ..Hypergraph::new(edges)
        }
    }

    /// Reorders edges; `order[i]` is the old index of the new i-th edge.
    pub fn permute_edges(&self, order: &[usize]) -> Hypergraph {
        let edges = order.iter().map(|&i| self.edges[i].clone()).collect();
        Hypergraph {
            label: self.label.clone(),
            ..Hypergraph::new(edges)
        }
    }

    /// Edge sets compared as sets of vertex sets, ignoring edge order and
    /// within-edge order.
    pub fn same_edge_set(&self, other: &Hypergraph) -> bool {
        let key = |h: &Hypergraph| {
            let mut v: Vec<Vec<VertexId>> = h.edges.iter().map(|e| e.sorted().to_vec()).collect();
            v.sort();
            v
        };
        self.edges.len() == other.edges.len() && key(self) == key(other)
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_mmp(self))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MmpError {
    #[error("empty input")]
    Empty,
    #[error("invalid character {ch:?} at byte {pos}")]
    BadChar { ch: char, pos: usize },
    #[error("dangling '+' prefix at byte {pos}")]
    DanglingPrefix { pos: usize },
    #[error("vertex {vertex} repeated within an edge")]
    RepeatedVertex { vertex: VertexId },
    #[error("empty edge at byte {pos}")]
    EmptyEdge { pos: usize },
    #[error("missing terminating '.'")]
    MissingTerminator,
    #[error("trailing characters after '.' at byte {pos}")]
    TrailingInput { pos: usize },
    #[error("not an MMP hypergraph: {0}")]
    Invalid(ValidationReport),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Skip empty edge tokens and accept a missing final '.'.
    pub lenient: bool,
}

impl ParseOptions {
    pub fn strict() -> Self {
        ParseOptions { lenient: false }
    }

    pub fn lenient() -> Self {
        ParseOptions { lenient: true }
    }
}

/// Parses the edge structure of one MMP line without checking the MMP
/// conditions. Surrounding whitespace is ignored; whitespace inside the
/// line is not allowed.
pub fn parse_edges(text: &str, opts: ParseOptions) -> Result<Hypergraph, MmpError> {
    let line = text.trim();
    if line.is_empty() {
        return Err(MmpError::Empty);
    }
    let bytes = line.as_bytes();
    let mut edges = Vec::new();
    let mut current: Vec<VertexId> = Vec::new();
    let mut token_start = 0;
    let mut pluses = 0u32;
    let mut terminated = false;
    let mut pos = 0;

    let finish_edge = |current: &mut Vec<VertexId>, at: usize, edges: &mut Vec<Edge>| {
        if current.is_empty() {
            return if opts.lenient {
                Ok(())
            } else {
                Err(MmpError::EmptyEdge { pos: at })
            };
        }
        edges.push(Edge::new(current.drain(..))?);
        Ok(())
    };

    while pos < bytes.len() {
        let c = bytes[pos];
        match c {
            b'+' => pluses += 1,
            b',' | b'.' => {
                if pluses > 0 {
                    return Err(MmpError::DanglingPrefix { pos });
                }
                finish_edge(&mut current, token_start, &mut edges)?;
                token_start = pos + 1;
                if c == b'.' {
                    terminated = true;
                    pos += 1;
                    break;
                }
            }
            _ => match char_index(c) {
                Some(i) => {
                    current.push(VertexId(pluses * BASE + i));
                    pluses = 0;
                }
                None => {
                    let ch = line[pos..].chars().next().unwrap_or('?');
                    return Err(MmpError::BadChar { ch, pos });
                }
            },
        }
        pos += 1;
    }
    if terminated {
        if pos < bytes.len() {
            return Err(MmpError::TrailingInput { pos });
        }
    } else {
        if !opts.lenient {
            return Err(MmpError::MissingTerminator);
        }
        if pluses > 0 {
            return Err(MmpError::DanglingPrefix { pos });
        }
        finish_edge(&mut current, token_start, &mut edges)?;
    }
    if edges.is_empty() {
        return Err(MmpError::Empty);
    }
    Ok(Hypergraph::new(edges))
}

/// Parses one MMP line and checks the MMP conditions.
pub fn parse_mmp(text: &str, opts: ParseOptions) -> Result<Hypergraph, MmpError> {
    let h = parse_edges(text, opts)?;
    let report = validate_mmp(&h);
    if report.is_valid() {
        Ok(h)
    } else {
        Err(MmpError::Invalid(report))
    }
}

/// Writes `h` as one MMP line (no newline).
pub fn serialize_mmp(h: &Hypergraph) -> String {
    let mut out = String::with_capacity(h.num_edges() * 5 + 1);
    for (i, e) in h.edges().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        for v in e.vertices() {
            v.write_to(&mut out);
        }
    }
    out.push('.');
    out
}

/// Renames vertices to `0..k` in order of first appearance, scanning edges
/// left to right. Edge order and within-edge order are kept.
pub fn renormalize(h: &Hypergraph) -> Hypergraph {
    let mut map = vec![VertexId(u32::MAX); h.id_bound()];
    let mut next = 0u32;
    for v in h.edges().iter().flat_map(|e| e.vertices().iter()) {
        if map[v.index()].0 == u32::MAX {
            map[v.index()] = VertexId(next);
            next += 1;
        }
    }
    h.relabel(&map)
}

/// True when the edge-intersection graph has a single component. A
/// hypergraph without edges counts as connected.
pub fn is_connected(h: &Hypergraph) -> bool {
    let m = h.num_edges();
    if m <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut first_edge = vec![usize::MAX; h.id_bound()];
    let mut components = m;
    for (i, e) in h.edges().iter().enumerate() {
        for v in e.vertices() {
            let f = &mut first_edge[v.index()];
            if *f == usize::MAX {
                *f = i;
            } else {
                let (a, b) = (find(&mut parent, *f), find(&mut parent, i));
                if a != b {
                    parent[a] = b;
                    components -= 1;
                }
            }
        }
    }
    components == 1
}

/// One violated MMP condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Condition (ii): the edge has fewer than 3 vertices.
    EdgeTooSmall { edge: usize, size: usize },
    /// Condition (iii): two edges share `shared` vertices but one of them has
    /// fewer than `shared + 2`.
    SharedTooMany {
        edges: (usize, usize),
        shared: usize,
    },
    /// Two edges with the same vertex set.
    DuplicateEdge { edges: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeTooSmall { edge, size } => {
                write!(f, "(ii) edge #{edge} has only {size} vertices")
            }
            Violation::SharedTooMany { edges, shared } => write!(
                f,
                "(iii) edges #{} and #{} share {shared} vertices",
                edges.0, edges.1
            ),
            Violation::DuplicateEdge { edges } => {
                write!(f, "edges #{} and #{} are identical", edges.0, edges.1)
            }
        }
    }
}

/// Every MMP condition violation found; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks MMP conditions (ii) and (iii) and rejects duplicate edges.
/// Condition (i) holds by construction of [`Hypergraph`].
///
/// Condition (iii) is read as: two edges sharing `k` vertices must each have
/// at least `k + 2` vertices.
pub fn validate_mmp(h: &Hypergraph) -> ValidationReport {
    let mut violations = Vec::new();
    for (i, e) in h.edges().iter().enumerate() {
        if e.len() < 3 {
            violations.push(Violation::EdgeTooSmall {
                edge: i,
                size: e.len(),
            });
        }
    }
    // Only pairs sharing a vertex can violate (iii).
    let inc = h.incidence();
    let mut checked: HashMap<(usize, usize), ()> = HashMap::new();
    for list in &inc {
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                if checked.insert((i, j), ()).is_some() {
                    continue;
                }
                let (ei, ej) = (&h.edges()[i], &h.edges()[j]);
                let shared = ei.intersection_size(ej);
                if shared == ei.len() && shared == ej.len() {
                    violations.push(Violation::DuplicateEdge { edges: (i, j) });
                } else if ei.len() < shared + 2 || ej.len() < shared + 2 {
                    violations.push(Violation::SharedTooMany {
                        edges: (i, j),
                        shared,
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Parses a newline-delimited file of MMP lines, skipping blank lines and
/// lines starting with `#`.
pub fn parse_mmp_lines(
    text: &str,
    opts: ParseOptions,
) -> Result<Vec<Hypergraph>, (usize, MmpError)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(n, l)| parse_mmp(l, opts).map_err(|e| (n + 1, e)))
        .collect()
}
