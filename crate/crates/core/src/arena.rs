//! Finite weighted game graphs.
//!
//! An [`Arena`] is a directed multigraph with integer edge weights whose
//! vertices are split between Eve (the minimizer) and Adam. Vertices are kept
//! sorted by id; edges keep their input order, and an edge's position in that
//! order is its stable index. Every vertex must have at least one outgoing
//! edge, so infinite plays exist from everywhere.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArenaError {
    #[error("malformed arena JSON: {0}")]
    Json(String),
    #[error("arena has no vertices")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateId(String),
    #[error("dangling endpoint: edge {edge} references undeclared vertex {id:?}")]
    DanglingEndpoint { edge: usize, id: String },
    #[error("dead end: vertex {0:?} has no outgoing edge")]
    DeadEnd(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("edge {edge}: rational weight {text:?} needs the scaling pipeline")]
    RationalWeight { edge: usize, text: String },
    #[error("edge {edge}: cannot parse weight {text:?}")]
    BadWeight { edge: usize, text: String },
    #[error("edge {edge}: zero denominator")]
    ZeroDenominator { edge: usize },
    #[error("integer overflow while scaling weights")]
    Overflow,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, ArenaError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Eve,
    Adam,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Owner::Eve => f.write_str("eve"),
            Owner::Adam => f.write_str("adam"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub owner: Owner,
}

/// An edge between two vertex positions (indices into [`Arena::vertices`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arena {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

/// One-player view of an arena: ownership is ignored and the objective is
/// quantified over every infinite path.
pub type WeightedGraph = Arena;

impl Arena {
    /// Builds and validates an arena from ids. Vertices are re-ordered by id;
    /// edge order is preserved.
    pub fn new<S, T>(vertices: Vec<(S, Owner)>, edges: Vec<(T, T, i64)>) -> Result<Self>
    where
        S: Into<String>,
        T: AsRef<str>,
    {
        let mut vertices: Vec<Vertex> = vertices
            .into_iter()
            .map(|(id, owner)| Vertex { id: id.into(), owner })
            .collect();
        if vertices.is_empty() {
            return Err(ArenaError::Empty);
        }
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in vertices.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(ArenaError::DuplicateId(pair[0].id.clone()));
            }
        }
        let position: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        let lookup = |edge: usize, id: &str| {
            position.get(id).copied().ok_or_else(|| ArenaError::DanglingEndpoint {
                edge,
                id: id.to_owned(),
            })
        };
        let mut resolved = Vec::with_capacity(edges.len());
        for (i, (src, dst, weight)) in edges.iter().enumerate() {
            resolved.push(Edge {
                src: lookup(i, src.as_ref())?,
                dst: lookup(i, dst.as_ref())?,
                weight: *weight,
            });
        }
        Self::from_parts(vertices, resolved)
    }

    /// Validates already-resolved parts. `vertices` must be sorted by id.
    fn from_parts(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        debug_assert!(vertices.windows(2).all(|p| p[0].id < p[1].id));
        let mut out = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.src].push(i);
        }
        if let Some(v) = out.iter().position(Vec::is_empty) {
            return Err(ArenaError::DeadEnd(vertices[v].id.clone()));
        }
        Ok(Arena { vertices, edges, out })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> Edge {
        self.edges[index]
    }

    /// Indices of the edges leaving vertex `v`, in edge-index order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.vertices[v].owner
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices
            .binary_search_by(|v| v.id.as_str().cmp(id))
            .ok()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| ArenaError::UnknownVertex(id.to_owned()))
    }

    /// `max(1, max |w|)` over all edges.
    pub fn weight_bound(&self) -> u64 {
        self.edges
            .iter()
            .map(|e| e.weight.unsigned_abs())
            .max()
            .unwrap_or(0)
            .max(1)
    }

    /// Marks every vertex reachable from `root` (including `root`).
    pub fn reachable_from(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            for &e in &self.out[u] {
                let v = self.edges[e].dst;
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// The subgraph induced by the vertices reachable from `root`.
    pub fn reachable_restriction(&self, root: &str) -> Result<Arena> {
        self.reachable_restriction_indexed(root).map(|(a, _)| a)
    }

    /// Like [`Arena::reachable_restriction`], also returning for each edge of
    /// the restriction its index in `self`.
    pub fn reachable_restriction_indexed(&self, root: &str) -> Result<(Arena, Vec<usize>)> {
        let root = self.require(root)?;
        let keep = self.reachable_from(root);
        let mut renumber = vec![usize::MAX; self.vertex_count()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if keep[i] {
                renumber[i] = vertices.len();
                vertices.push(v.clone());
            }
        }
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if keep[e.src] {
                edges.push(Edge {
                    src: renumber[e.src],
                    dst: renumber[e.dst],
                    weight: e.weight,
                });
                origin.push(i);
            }
        }
        Ok((Self::from_parts(vertices, edges)?, origin))
    }

    /// Same graph with every weight replaced by `f(weight)`.
    pub fn map_weights<F>(&self, mut f: F) -> Arena
    where
        F: FnMut(i64) -> i64,
    {
        let mut a = self.clone();
        for e in &mut a.edges {
            e.weight = f(e.weight);
        }
        a
    }

    /// Same graph with every weight replaced by `f(weight)`, failing on `None`.
    pub fn try_map_weights<F>(&self, mut f: F) -> Option<Arena>
    where
        F: FnMut(i64) -> Option<i64>,
    {
        let mut a = self.clone();
        for e in &mut a.edges {
            e.weight = f(e.weight)?;
        }
        Some(a)
    }

    /// Same graph with every owner replaced by `owner`.
    pub fn with_owner(&self, owner: Owner) -> Arena {
        let mut a = self.clone();
        for v in &mut a.vertices {
            v.owner = owner;
        }
        a
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArenaDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: String,
    owner: Owner,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    src: String,
    dst: String,
    weight: WeightDoc,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum WeightDoc {
    Int(i64),
    Text(String),
}

fn parse_doc(text: &str) -> Result<ArenaDoc> {
    serde_json::from_str(text).map_err(|e| ArenaError::Json(e.to_string()))
}

/// Parses an arena whose weights are all JSON integers.
pub fn parse_arena(text: &str) -> Result<Arena> {
    let doc = parse_doc(text)?;
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (i, e) in doc.edges.into_iter().enumerate() {
        match e.weight {
            WeightDoc::Int(w) => edges.push((e.src, e.dst, w)),
            WeightDoc::Text(text) => return Err(ArenaError::RationalWeight { edge: i, text }),
        }
    }
    Arena::new(
        doc.vertices.into_iter().map(|v| (v.id, v.owner)).collect(),
        edges,
    )
}

/// An arena skeleton whose weights are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalArena {
    pub vertices: Vec<(String, Owner)>,
    pub edges: Vec<(String, String, Ratio<i64>)>,
}

fn parse_ratio(edge: usize, text: &str) -> Result<Ratio<i64>> {
    let bad = || ArenaError::BadWeight {
        edge,
        text: text.to_owned(),
    };
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text.trim(), "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(ArenaError::ZeroDenominator { edge });
    }
    if den < 0 {
        return Err(bad());
    }
    Ok(Ratio::new(num, den))
}

/// Parses an arena whose weights may be integers or `"p/q"` strings.
pub fn parse_rational_arena(text: &str) -> Result<RationalArena> {
    let doc = parse_doc(text)?;
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (i, e) in doc.edges.into_iter().enumerate() {
        let w = match e.weight {
            WeightDoc::Int(w) => Ratio::from_integer(w),
            WeightDoc::Text(t) => parse_ratio(i, &t)?,
        };
        edges.push((e.src, e.dst, w));
    }
    Ok(RationalArena {
        vertices: doc.vertices.into_iter().map(|v| (v.id, v.owner)).collect(),
        edges,
    })
}

/// Multiplies every weight by the lcm `L` of the denominators and returns the
/// integer arena together with `L`. Positive scaling preserves the sign of
/// every limsup average, so winning regions are unchanged.
pub fn scale_weights(raw: &RationalArena) -> Result<(Arena, i64)> {
    let mut factor: i64 = 1;
    for (i, (_, _, w)) in raw.edges.iter().enumerate() {
        if *w.denom() == 0 {
            return Err(ArenaError::ZeroDenominator { edge: i });
        }
        let d = w.denom().abs();
        factor = (factor / factor.gcd(&d))
            .checked_mul(d)
            .ok_or(ArenaError::Overflow)?;
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (src, dst, w) in &raw.edges {
        let scaled = w.numer().checked_mul(factor / w.denom()).ok_or(ArenaError::Overflow)?;
        edges.push((src.as_str(), dst.as_str(), scaled));
    }
    let arena = Arena::new(raw.vertices.clone(), edges)?;
    Ok((arena, factor))
}

/// Parses either schema. Returns the scaling factor when any weight was given
/// as a string (the rational pipeline was used).
pub fn parse_arena_scaled(text: &str) -> Result<(Arena, Option<i64>)> {
    match parse_arena(text) {
        Err(ArenaError::RationalWeight { .. }) => {
            let raw = parse_rational_arena(text)?;
            let (a, factor) = scale_weights(&raw)?;
            Ok((a, Some(factor)))
        }
        other => other.map(|a| (a, None)),
    }
}

pub fn arena_to_json(a: &Arena) -> Value {
    let vertices: Vec<Value> = a
        .vertices
        .iter()
        .map(|v| json!({ "id": v.id, "owner": v.owner }))
        .collect();
    let edges: Vec<Value> = a
        .edges
        .iter()
        .map(|e| json!({ "src": a.id(e.src), "dst": a.id(e.dst), "weight": e.weight }))
        .collect();
    json!({ "vertices": vertices, "edges": edges })
}

/// Deterministic JSON: sorted keys, vertices by id, edges by index.
pub fn serialize_arena(a: &Arena) -> String {
    serde_json::to_string_pretty(&arena_to_json(a)).expect("arena JSON is always serializable")
}

/// Seeded random arena: `n` vertices, each with 1..=`d` out-edges of weight
/// uniform in `[-wmax, wmax]`, owners drawn uniformly.
pub fn generate_arena(n: usize, d: usize, wmax: i64, seed: u64) -> Result<Arena> {
    if n == 0 {
        return Err(ArenaError::InvalidParameters("n must be at least 1".into()));
    }
    if d == 0 {
        return Err(ArenaError::InvalidParameters("d must be at least 1".into()));
    }
    if wmax < 0 {
        return Err(ArenaError::InvalidParameters("wmax must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = (n - 1).to_string().len();
    let vertices: Vec<Vertex> = (0..n)
        .map(|i| Vertex {
            id: format!("v{i:0width$}"),
            owner: if rng.gen_bool(0.5) { Owner::Eve } else { Owner::Adam },
        })
        .collect();
    let mut edges = Vec::new();
    for src in 0..n {
        let degree = rng.gen_range(1..=d);
        for _ in 0..degree {
            edges.push(Edge {
                src,
                dst: rng.gen_range(0..n),
                weight: rng.gen_range(-wmax..=wmax),
            });
        }
    }
    Arena::from_parts(vertices, edges)
}
