//! Exact 600-cell geometry over the golden field Q(√5).
//!
//! The 120 unit vertices of the 600-cell come in 60 antipodal pairs; each
//! pair is one ray. The 75 maximal sets of four mutually orthogonal rays are
//! the edges of the 60-75 hypergraph every search starts from.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use dashu::base::Signed;
use dashu::rational::RBig;
use thiserror::Error;

use crate::mmp::{Edge, Hypergraph, VertexId};

/// `a + b·τ` with rational `a`, `b` and `τ = (1 + √5) / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GoldenNumber {
    pub a: RBig,
    pub b: RBig,
}

impl GoldenNumber {
    pub fn new(a: impl Into<RBig>, b: impl Into<RBig>) -> Self {
        GoldenNumber {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    /// τ = (1 + √5) / 2.
    pub fn tau() -> Self {
        Self::new(0, 1)
    }

    /// κ = 1/τ = τ − 1.
    pub fn kappa() -> Self {
        Self::new(-1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a == RBig::ZERO && self.b == RBig::ZERO
    }

    /// Scales both coefficients by a rational.
    pub fn scale(&self, r: &RBig) -> Self {
        GoldenNumber {
            a: &self.a * r,
            b: &self.b * r,
        }
    }

    /// Sign of the real value: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        // a + bτ = p + q√5 with p = a + b/2, q = b/2.
        let half = RBig::from_parts(1.into(), 2u8.into());
        let p = &self.a + &self.b * &half;
        let q = &self.b * &half;
        let sp = sign(&p);
        let sq = sign(&q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // opposite signs: compare p² with 5q²
        let p2 = &p * &p;
        let q2 = &q * &q * RBig::from(5);
        match p2.cmp(&q2) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    /// Approximate value, for display and drawing only.
    pub fn to_f64(&self) -> f64 {
        let tau = (1.0 + 5f64.sqrt()) / 2.0;
        self.a.to_f64().value() + self.b.to_f64().value() * tau
    }
}

fn sign(r: &RBig) -> i8 {
    match r.cmp(&RBig::ZERO) {
        Ordering::Greater => 1,
        Ordering::Less => -1,
        Ordering::Equal => 0,
    }
}

impl PartialOrd for GoldenNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoldenNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl Add for &GoldenNumber {
    type Output = GoldenNumber;
    fn add(self, rhs: Self) -> GoldenNumber {
        GoldenNumber {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub for &GoldenNumber {
    type Output = GoldenNumber;
    fn sub(self, rhs: Self) -> GoldenNumber {
        GoldenNumber {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul for &GoldenNumber {
    type Output = GoldenNumber;
    fn mul(self, rhs: Self) -> GoldenNumber {
        // τ² = τ + 1
        let bb = &self.b * &rhs.b;
        GoldenNumber {
            a: &self.a * &rhs.a + &bb,
            b: &self.a * &rhs.b + &self.b * &rhs.a + bb,
        }
    }
}

impl Neg for &GoldenNumber {
    type Output = GoldenNumber;
    fn neg(self) -> GoldenNumber {
        GoldenNumber {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GoldenNumber {
            type Output = GoldenNumber;
            fn $m(self, rhs: Self) -> GoldenNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Written as `a+b t`, e.g. `1/2+0 t` or `-1+1/2 t`.
impl fmt::Display for GoldenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = if self.b.is_negative() {
            format!("-{}", -&self.b)
        } else {
            format!("+{}", self.b)
        };
        write!(f, "{}{} t", self.a, b)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("cannot parse golden number {0:?}")]
    BadNumber(String),
    #[error("a ray needs four components, got {0}")]
    BadArity(usize),
    #[error("the zero vector is not a ray")]
    ZeroRay,
    #[error("600-cell construction: {0}")]
    Construction(String),
}

impl FromStr for GoldenNumber {
    type Err = GeometryError;

    /// Parses the `a+b t` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeometryError::BadNumber(s.to_string());
        let body = s.trim().strip_suffix('t').ok_or_else(bad)?.trim_end();
        // split at the sign introducing b, skipping a leading sign of a
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let (a, b) = body.split_at(split);
        let b = b.strip_prefix('+').unwrap_or(b);
        let a = RBig::from_str(a.trim()).map_err(|_| bad())?;
        let b = RBig::from_str(b.trim()).map_err(|_| bad())?;
        Ok(GoldenNumber { a, b })
    }
}

/// A 4-vector over the golden field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ray(pub [GoldenNumber; 4]);

impl Ray {
    pub fn new(components: [GoldenNumber; 4]) -> Result<Self, GeometryError> {
        if components.iter().all(GoldenNumber::is_zero) {
            return Err(GeometryError::ZeroRay);
        }
        Ok(Ray(components))
    }

    pub fn components(&self) -> &[GoldenNumber; 4] {
        &self.0
    }

    /// The representative whose first nonzero component is positive.
    pub fn canonical(&self) -> Ray {
        let first = self.0.iter().find(|c| !c.is_zero()).expect("nonzero ray");
        if first.signum() < 0 {
            Ray(self.0.clone().map(|c| -&c))
        } else {
            self.clone()
        }
    }

    /// True when the two vectors span the same ray.
    pub fn same_ray(&self, other: &Ray) -> bool {
        (0..4).all(|i| (i + 1..4).all(|j| &self.0[i] * &other.0[j] == &self.0[j] * &other.0[i]))
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.0;
        write!(f, "{a} {b} {c} {d}")
    }
}

impl FromStr for Ray {
    type Err = GeometryError;

    /// Four whitespace-separated `a+b t` numbers (the `t` sticks to `b`
    /// after a single space, so components are split on `t`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s
            .split_inclusive('t')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 4 {
            return Err(GeometryError::BadArity(parts.len()));
        }
        let mut comps: [GoldenNumber; 4] = Default::default();
        for (slot, p) in comps.iter_mut().zip(&parts) {
            *slot = p.parse()?;
        }
        Ray::new(comps)
    }
}

/// Exact Euclidean inner product.
pub fn inner_product(u: &Ray, v: &Ray) -> GoldenNumber {
    u.0.iter()
        .zip(&v.0)
        .fold(GoldenNumber::zero(), |acc, (x, y)| &acc + &(x * y))
}

/// The 60 rays of the 600-cell, its 75 orthogonal bases and the induced
/// hypergraph. Vertex `i` of the hypergraph is `rays[i]`.
#[derive(Clone, Debug)]
pub struct RaySet600 {
    pub rays: Vec<Ray>,
    pub bases: Vec<[usize; 4]>,
    pub hypergraph: Hypergraph,
}

impl RaySet600 {
    /// Ray assignment in the form [`verify_assignment`] expects.
    pub fn assignment(&self) -> HashMap<VertexId, Ray> {
        self.rays
            .iter()
            .enumerate()
            .map(|(i, r)| (VertexId(i as u32), r.clone()))
            .collect()
    }
}

fn even_permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut s = p;
                    s.sort_unstable();
                    if s != [0, 1, 2, 3] {
                        continue;
                    }
                    let inversions = (0..4)
                        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                        .filter(|&(i, j)| p[i] > p[j])
                        .count();
                    if inversions % 2 == 0 {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// The 120 unit vertices of the 600-cell.
pub fn cell600_vertices() -> Vec<Ray> {
    let half = RBig::from_parts(1.into(), 2u8.into());
    let g = |a: i32, b: i32| GoldenNumber::new(a, b);
    let mut out = Vec::with_capacity(120);
    // 8: ±unit axes
    for axis in 0..4 {
        for s in [1, -1] {
            let mut c: [GoldenNumber; 4] = Default::default();
            c[axis] = g(s, 0);
            out.push(Ray(c));
        }
    }
    // 16: (±1/2, ±1/2, ±1/2, ±1/2)
    for signs in 0..16u32 {
        let c = [0, 1, 2, 3].map(|i| {
            let s = if signs >> i & 1 == 1 { -1 } else { 1 };
            g(s, 0).scale(&half)
        });
        out.push(Ray(c));
    }
    // 96: even permutations of (±τ, ±1, ±κ, 0)/2
    let base = [g(0, 1), g(1, 0), g(-1, 1)];
    for perm in even_permutations() {
        for signs in 0..8u32 {
            let mut vals: [GoldenNumber; 4] = Default::default();
            for k in 0..3 {
                let v = if signs >> k & 1 == 1 {
                    -&base[k]
                } else {
                    base[k].clone()
                };
                vals[k] = v.scale(&half);
            }
            let mut c: [GoldenNumber; 4] = Default::default();
            for (k, &slot) in perm.iter().enumerate() {
                c[slot] = vals[k].clone();
            }
            out.push(Ray(c));
        }
    }
    out
}

/// Builds the 60 rays, the 75 orthogonal bases and the 60-75 hypergraph.
///
/// Rays are sorted by their canonical component tuple (exact real order);
/// bases are sorted by member ids and each basis lists its members
/// ascending.
pub fn build_600cell() -> Result<RaySet600, GeometryError> {
    let vertices = cell600_vertices();
    if vertices.len() != 120 {
        return Err(GeometryError::Construction(format!(
            "expected 120 vertices, got {}",
            vertices.len()
        )));
    }
    let mut rays: Vec<Ray> = vertices.iter().map(Ray::canonical).collect();
    rays.sort();
    rays.dedup();
    if rays.len() != 60 {
        return Err(GeometryError::Construction(format!(
            "expected 60 rays, got {}",
            rays.len()
        )));
    }
    let n = rays.len();
    let mut orth = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let z = inner_product(&rays[i], &rays[j]).is_zero();
            orth[i][j] = z;
            orth[j][i] = z;
        }
    }
    // 4-cliques of the orthogonality graph; in four dimensions these are
    // exactly the maximal orthogonal sets.
    let mut bases = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !orth[a][b] {
                continue;
            }
            for c in b + 1..n {
                if !orth[a][c] || !orth[b][c] {
                    continue;
                }
                bases.extend(
                    (c + 1..n)
                        .filter(|&d| orth[a][d] && orth[b][d] && orth[c][d])
                        .map(|d| [a, b, c, d]),
                );
            }
        }
    }
    if bases.len() != 75 {
        return Err(GeometryError::Construction(format!(
            "expected 75 bases, got {}",
            bases.len()
        )));
    }
    let mut membership = vec![0usize; n];
    for b in &bases {
        for &r in b {
            membership[r] += 1;
        }
    }
    if let Some(r) = membership.iter().position(|&m| m != 5) {
        return Err(GeometryError::Construction(format!(
            "ray {r} lies in {} bases, expected 5",
            membership[r]
        )));
    }
    let edges = bases
        .iter()
        .map(|b| Edge::new(b.iter().map(|&i| VertexId(i as u32))))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| GeometryError::Construction(e.to_string()))?;
    let hypergraph = Hypergraph::new(edges).with_label("60-75");
    Ok(RaySet600 {
        rays,
        bases,
        hypergraph,
    })
}

/// A within-edge pair of vertices whose assigned vectors are not orthogonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonOrthogonalPair {
    pub edge: usize,
    pub u: VertexId,
    pub v: VertexId,
    pub product: GoldenNumber,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssignmentReport {
    /// Vertices of the hypergraph without an assigned vector.
    pub missing: Vec<VertexId>,
    pub violations: Vec<NonOrthogonalPair>,
}

impl AssignmentReport {
    pub fn is_valid(&self) -> bool {
        self.missing.is_empty() && self.violations.is_empty()
    }

    /// Edges with at least one violation, ascending.
    pub fn violating_edges(&self) -> Vec<usize> {
        let mut e: Vec<usize> = self.violations.iter().map(|p| p.edge).collect();
        e.dedup();
        e
    }
}

/// Checks that vectors assigned to vertices of each edge are mutually
/// orthogonal.
pub fn verify_assignment(h: &Hypergraph, assignment: &HashMap<VertexId, Ray>) -> AssignmentReport {
    let mut report = AssignmentReport::default();
    let mut missing = BTreeMap::new();
    for (ei, e) in h.edges().iter().enumerate() {
        let vs = e.vertices();
        for (i, &u) in vs.iter().enumerate() {
            let Some(ru) = assignment.get(&u) else {
                missing.insert(u, ());
                continue;
            };
            for &v in &vs[i + 1..] {
                let Some(rv) = assignment.get(&v) else {
                    continue;
                };
                let product = inner_product(ru, rv);
                if !product.is_zero() {
                    report.violations.push(NonOrthogonalPair {
                        edge: ei,
                        u,
                        v,
                        product,
                    });
                }
            }
        }
    }
    report.missing = missing.into_keys().collect();
    report
}

/// Writes one ray per line in the `a+b t` form.
pub fn format_vectors(rays: &[Ray]) -> String {
    let mut s = String::new();
    for r in rays {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}

/// Reads the format written by [`format_vectors`].
pub fn parse_vectors(text: &str) -> Result<Vec<Ray>, GeometryError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::parse)
        .collect()
}
