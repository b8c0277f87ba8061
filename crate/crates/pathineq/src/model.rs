//! Reversible nearest-neighbor Markov models on finite connected graphs.
//!
//! A model is a triple (graph, rates, stationary measure). Vertices carry
//! opaque string labels; everything internal runs on dense indices. Edges are
//! oriented: an undirected edge {x, y} is stored as the two oriented edges
//! (x, y) and (y, x), each with its own jump rate q(x, y) > 0.
//!
//! Reversibility means detailed balance: mu(x) q(x, y) = mu(y) q(y, x) on
//! every edge. The shared value is the conductance Q(x, y) = Q(y, x), the
//! edge weight of the Dirichlet form
//!
//! ```text
//!     E(f, g) = 1/2 * sum_e D_e f * D_e g * Q(e),    D_e f = f(to) - f(from),
//! ```
//!
//! where the sum runs over oriented edges (each undirected edge twice).
//!
//! The graph Laplacian model takes q(x, y) = 1/deg(x); its stationary measure
//! is mu(x) = deg(x)/|E| with |E| the number of oriented edges, and every
//! conductance equals 1/|E|.

use std::collections::HashMap;
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Relative tolerance for the detailed-balance check in [`build_model`].
pub const REVERSIBILITY_REL_TOL: f64 = 1e-9;

/// Relative tolerance for recognizing Laplacian rates q(x, y) = 1/deg(x).
pub const LAPLACIAN_REL_TOL: f64 = 1e-12;

/// One oriented edge with its jump rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedEdge {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// A finite connected graph with positive jump rates on oriented edges.
///
/// Invariants established at construction: no self-loops, no duplicate
/// edges, the adjacency relation is symmetric (every oriented edge has its
/// reverse), all rates are strictly positive, and the graph is connected.
#[derive(Debug, Clone)]
pub struct RateGraph {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    edges: Vec<OrientedEdge>,
    out_edges: Vec<Vec<usize>>,
    reverse: Vec<usize>,
}

impl RateGraph {
    /// Builds a graph from a list of oriented edges `(from, to, rate)`.
    /// Every oriented edge must appear exactly once and have its reverse
    /// present.
    pub fn new(labels: Vec<String>, oriented: &[(usize, usize, f64)]) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::BadParams("graph needs at least one vertex".into()));
        }
        let mut label_index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if label_index.insert(l.clone(), i).is_some() {
                return Err(Error::BadParams(format!("duplicate vertex label {l:?}")));
            }
        }
        let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
        for &(u, v, q) in oriented {
            if u >= n || v >= n {
                return Err(Error::BadParams(format!(
                    "edge ({u}, {v}) references a vertex out of range"
                )));
            }
            if u == v {
                return Err(Error::SelfLoop(labels[u].clone()));
            }
            if q <= 0.0 || !q.is_finite() {
                return Err(Error::NonpositiveRate {
                    u: labels[u].clone(),
                    v: labels[v].clone(),
                    rate: q,
                });
            }
            if seen.insert((u, v), q).is_some() {
                return Err(Error::DuplicateEdge {
                    u: labels[u].clone(),
                    v: labels[v].clone(),
                });
            }
        }
        for &(u, v) in seen.keys() {
            if !seen.contains_key(&(v, u)) {
                return Err(Error::AsymmetricAdjacency {
                    u: labels[u].clone(),
                    v: labels[v].clone(),
                });
            }
        }

        let mut keys: Vec<(usize, usize)> = seen.keys().copied().collect();
        keys.sort_unstable();
        let mut edges = Vec::with_capacity(keys.len());
        let mut id_of = HashMap::with_capacity(keys.len());
        for (id, &(u, v)) in keys.iter().enumerate() {
            edges.push(OrientedEdge {
                from: u,
                to: v,
                rate: seen[&(u, v)],
            });
            id_of.insert((u, v), id);
        }
        let reverse: Vec<usize> = edges.iter().map(|e| id_of[&(e.to, e.from)]).collect();
        let mut out_edges = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            out_edges[e.from].push(id);
        }

        let g = RateGraph {
            labels,
            label_index,
            edges,
            out_edges,
            reverse,
        };
        if !g.bfs_reaches_all(0) {
            return Err(Error::NotConnected);
        }
        Ok(g)
    }

    /// Builds a graph from undirected edges `(u, v, q_uv, q_vu)`.
    pub fn from_undirected(
        labels: Vec<String>,
        edges: &[(usize, usize, f64, f64)],
    ) -> Result<Self> {
        let mut oriented = Vec::with_capacity(2 * edges.len());
        for &(u, v, quv, qvu) in edges {
            oriented.push((u, v, quv));
            oriented.push((v, u, qvu));
        }
        Self::new(labels, &oriented)
    }

    fn bfs_reaches_all(&self, start: usize) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &eid in &self.out_edges[x] {
                let y = self.edges[eid].to;
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == self.vertex_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of oriented edges (twice the undirected edge count).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> OrientedEdge {
        self.edges[id]
    }

    /// Id of the reversed edge (to, from).
    pub fn reverse(&self, id: usize) -> usize {
        self.reverse[id]
    }

    /// Id of the oriented edge (from, to), if present.
    pub fn edge_id(&self, from: usize, to: usize) -> Option<usize> {
        if from >= self.vertex_count() {
            return None;
        }
        self.out_edges[from]
            .binary_search_by_key(&to, |&e| self.edges[e].to)
            .ok()
            .map(|i| self.out_edges[from][i])
    }

    /// Ids of edges leaving `x`, sorted by target vertex.
    pub fn out_edges(&self, x: usize) -> &[usize] {
        &self.out_edges[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.out_edges[x].len()
    }

    /// Undirected edges as `(u, v)` pairs with `u < v`, in edge-id order of
    /// the `u -> v` orientation.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|e| e.from < e.to)
            .map(|e| (e.from, e.to))
            .collect()
    }

    /// True when the graph is a tree (connected with |V| - 1 undirected edges).
    pub fn is_tree(&self) -> bool {
        self.edge_count() == 2 * (self.vertex_count() - 1)
    }
}

/// A reversible model: graph, verified stationary measure and conductances.
///
/// Invariants: `mu` is strictly positive and sums to 1 within 1e-12;
/// `conductance(e) == conductance(reverse(e))` exactly as stored.
#[derive(Debug, Clone)]
pub struct ReversibleModel {
    graph: RateGraph,
    mu: Vec<f64>,
    conductance: Vec<f64>,
}

impl ReversibleModel {
    pub fn graph(&self) -> &RateGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Conductance Q(e) = mu(from) * rate(e), symmetric under edge reversal.
    pub fn conductance(&self, edge_id: usize) -> f64 {
        self.conductance[edge_id]
    }

    /// Jump rate q(from, to) of an oriented edge.
    pub fn rate(&self, edge_id: usize) -> f64 {
        self.graph.edges()[edge_id].rate
    }

    /// True when every rate equals 1/deg(from) within [`LAPLACIAN_REL_TOL`].
    pub fn is_laplacian(&self) -> bool {
        self.graph
            .edges()
            .iter()
            .all(|e| (e.rate * self.graph.degree(e.from) as f64 - 1.0).abs() <= LAPLACIAN_REL_TOL)
    }
}

/// Propagates a stationary measure over a BFS spanning tree, normalizes it,
/// and verifies detailed balance on every edge within [`REVERSIBILITY_REL_TOL`]
/// (relative to the larger side). The conductance of each undirected edge is
/// the average of the two sides, stored identically for both orientations.
pub fn build_model(graph: RateGraph) -> Result<ReversibleModel> {
    let n = graph.vertex_count();
    let mut mu = vec![0.0; n];
    mu[0] = 1.0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for &eid in graph.out_edges(x) {
            let e = graph.edge(eid);
            if !seen[e.to] {
                seen[e.to] = true;
                let back = graph.edge(graph.reverse(eid));
                mu[e.to] = mu[x] * e.rate / back.rate;
                queue.push_back(e.to);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::NotConnected);
    }
    let total: f64 = mu.iter().sum();
    for m in &mut mu {
        *m /= total;
    }

    let mut conductance = vec![0.0; graph.edge_count()];
    for (eid, e) in graph.edges().iter().enumerate() {
        if e.from > e.to {
            continue;
        }
        let rid = graph.reverse(eid);
        let lhs = mu[e.from] * e.rate;
        let rhs = mu[e.to] * graph.edge(rid).rate;
        if (lhs - rhs).abs() > REVERSIBILITY_REL_TOL * lhs.max(rhs) {
            return Err(Error::NotReversible {
                u: graph.label(e.from).to_string(),
                v: graph.label(e.to).to_string(),
                lhs,
                rhs,
            });
        }
        let q = 0.5 * (lhs + rhs);
        conductance[eid] = q;
        conductance[rid] = q;
    }

    Ok(ReversibleModel {
        graph,
        mu,
        conductance,
    })
}

/// Builds the graph Laplacian model on an undirected graph: rates 1/deg(x),
/// measure deg(x)/|E|, conductance exactly 1/|E| on every edge (|E| counts
/// oriented edges).
pub fn laplacian_model(
    labels: Vec<String>,
    undirected: &[(usize, usize)],
) -> Result<ReversibleModel> {
    let n = labels.len();
    let mut deg = vec![0usize; n];
    for &(u, v) in undirected {
        if u < n && v < n && u != v {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    let oriented: Vec<(usize, usize, f64)> = undirected
        .iter()
        .flat_map(|&(u, v)| {
            let qu = if u < n && deg[u] > 0 {
                1.0 / deg[u] as f64
            } else {
                1.0
            };
            let qv = if v < n && deg[v] > 0 {
                1.0 / deg[v] as f64
            } else {
                1.0
            };
            [(u, v, qu), (v, u, qv)]
        })
        .collect();
    let graph = RateGraph::new(labels, &oriented)?;
    let m = graph.edge_count() as f64;
    let mu: Vec<f64> = (0..n).map(|x| graph.degree(x) as f64 / m).collect();
    let conductance = vec![1.0 / m; graph.edge_count()];
    Ok(ReversibleModel {
        graph,
        mu,
        conductance,
    })
}

/// Built-in graph families.
///
/// All families produce the Laplacian model except `Path` with explicit
/// rates, which runs [`build_model`] on the given birth-death rates.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Complete graph on n >= 2 vertices.
    Complete(usize),
    /// Star with one center (`v0`) and n >= 1 leaves (`v1` .. `vn`).
    Star(usize),
    /// Cycle on p >= 3 vertices.
    Cycle(usize),
    /// Full binary tree of depth d >= 1 (2^(d+1) - 1 vertices).
    BinaryTree(usize),
    /// Path on n >= 2 vertices; `rates[i]` is (q(i, i+1), q(i+1, i)).
    Path {
        n: usize,
        rates: Option<Vec<(f64, f64)>>,
    },
    /// Johnson graph J(n, k): k-subsets of {1..n}, adjacent when the
    /// intersection has size k - 1. Requires 1 <= k < n.
    Johnson(usize, usize),
}

impl Family {
    /// Parses a `gallery:NAME:PARAMS` URI, e.g. `gallery:complete:4` or
    /// `gallery:johnson:5:2`.
    pub fn from_uri(uri: &str) -> Result<Family> {
        let parts: Vec<&str> = uri.split(':').collect();
        let bad = |msg: &str| Error::BadParams(format!("bad gallery uri {uri:?}: {msg}"));
        if parts.len() < 3 || parts[0] != "gallery" {
            return Err(bad("expected gallery:NAME:PARAMS"));
        }
        let num = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| bad(&format!("{s:?} is not a number")))
        };
        match (parts[1], parts.len()) {
            ("complete", 3) => Ok(Family::Complete(num(parts[2])?)),
            ("star", 3) => Ok(Family::Star(num(parts[2])?)),
            ("cycle", 3) => Ok(Family::Cycle(num(parts[2])?)),
            ("binary_tree", 3) => Ok(Family::BinaryTree(num(parts[2])?)),
            ("path", 3) => Ok(Family::Path {
                n: num(parts[2])?,
                rates: None,
            }),
            ("johnson", 4) => Ok(Family::Johnson(num(parts[2])?, num(parts[3])?)),
            _ => Err(bad("unknown family or wrong parameter count")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Complete(n) => write!(f, "complete:{n}"),
            Family::Star(n) => write!(f, "star:{n}"),
            Family::Cycle(p) => write!(f, "cycle:{p}"),
            Family::BinaryTree(d) => write!(f, "binary_tree:{d}"),
            Family::Path { n, rates } => match rates {
                None => write!(f, "path:{n}"),
                Some(_) => write!(f, "path:{n}:custom-rates"),
            },
            Family::Johnson(n, k) => write!(f, "johnson:{n}:{k}"),
        }
    }
}

/// Desk-scale ceilings for gallery construction. Everything downstream
/// holds dense |V| x |V| matrices, so absurd parameters must fail as input
/// errors here instead of exhausting memory mid-build.
const MAX_GALLERY_VERTICES: u128 = 4096;
const MAX_GALLERY_ORIENTED_EDGES: u128 = 1 << 20;

/// (vertex count, oriented edge count) a family would materialize,
/// saturating instead of overflowing.
fn family_size(family: &Family) -> (u128, u128) {
    let big = (u128::MAX, u128::MAX);
    match family {
        Family::Complete(n) => {
            let n = *n as u128;
            (n, n * n.saturating_sub(1))
        }
        Family::Star(n) => (*n as u128 + 1, 2 * *n as u128),
        Family::Cycle(p) => (*p as u128, 2 * *p as u128),
        Family::BinaryTree(d) => {
            if *d >= 64 {
                return big;
            }
            let v = (1u128 << (d + 1)) - 1;
            (v, 2 * (v - 1))
        }
        Family::Path { n, .. } => (*n as u128, 2 * (*n as u128).saturating_sub(1)),
        Family::Johnson(n, k) => {
            let (n, k) = (*n as u128, *k as u128);
            if k > n {
                return (0, 0);
            }
            let mut binom: u128 = 1;
            for i in 0..k {
                binom = match binom.checked_mul(n - i) {
                    Some(v) => v / (i + 1),
                    None => return big,
                };
            }
            match binom.checked_mul(k * (n - k)) {
                Some(e) => (binom, e),
                None => big,
            }
        }
    }
}

fn check_gallery_size(family: &Family) -> Result<()> {
    let clamp = |v: u128| usize::try_from(v).unwrap_or(usize::MAX);
    let (v, e) = family_size(family);
    if v > MAX_GALLERY_VERTICES {
        return Err(Error::TooLarge {
            what: "gallery vertex count",
            limit: MAX_GALLERY_VERTICES as usize,
            got: clamp(v),
        });
    }
    if e > MAX_GALLERY_ORIENTED_EDGES {
        return Err(Error::TooLarge {
            what: "gallery oriented edge count",
            limit: MAX_GALLERY_ORIENTED_EDGES as usize,
            got: clamp(e),
        });
    }
    Ok(())
}

/// Instantiates a gallery family.
pub fn gallery(family: &Family) -> Result<ReversibleModel> {
    check_gallery_size(family)?;
    let vlabels = |n: usize| (0..n).map(|i| format!("v{i}")).collect::<Vec<_>>();
    match family {
        Family::Complete(n) => {
            if *n < 2 {
                return Err(Error::BadParams("complete(n) needs n >= 2".into()));
            }
            let mut edges = Vec::new();
            for u in 0..*n {
                for v in (u + 1)..*n {
                    edges.push((u, v));
                }
            }
            laplacian_model(vlabels(*n), &edges)
        }
        Family::Star(n) => {
            if *n < 1 {
                return Err(Error::BadParams("star(n) needs n >= 1".into()));
            }
            let edges: Vec<(usize, usize)> = (1..=*n).map(|k| (0, k)).collect();
            laplacian_model(vlabels(*n + 1), &edges)
        }
        Family::Cycle(p) => {
            if *p < 3 {
                return Err(Error::BadParams("cycle(p) needs p >= 3".into()));
            }
            let edges: Vec<(usize, usize)> = (0..*p).map(|i| (i, (i + 1) % p)).collect();
            laplacian_model(vlabels(*p), &edges)
        }
        Family::BinaryTree(d) => {
            if *d < 1 {
                return Err(Error::BadParams("binary_tree(d) needs d >= 1".into()));
            }
            let n = (1usize << (d + 1)) - 1;
            let mut edges = Vec::new();
            for i in 0..n {
                for c in [2 * i + 1, 2 * i + 2] {
                    if c < n {
                        edges.push((i, c));
                    }
                }
            }
            laplacian_model(vlabels(n), &edges)
        }
        Family::Path { n, rates } => {
            if *n < 2 {
                return Err(Error::BadParams("path(n) needs n >= 2".into()));
            }
            match rates {
                None => {
                    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
                    laplacian_model(vlabels(*n), &edges)
                }
                Some(r) => {
                    if r.len() != n - 1 {
                        return Err(Error::BadParams(format!(
                            "path({n}) needs {} rate pairs, got {}",
                            n - 1,
                            r.len()
                        )));
                    }
                    let edges: Vec<(usize, usize, f64, f64)> = r
                        .iter()
                        .enumerate()
                        .map(|(i, &(up, down))| (i, i + 1, up, down))
                        .collect();
                    build_model(RateGraph::from_undirected(vlabels(*n), &edges)?)
                }
            }
        }
        Family::Johnson(n, k) => {
            if *k < 1 || *k >= *n {
                return Err(Error::BadParams("johnson(n, k) needs 1 <= k < n".into()));
            }
            let subsets = k_subsets(*n, *k);
            if subsets.len() > 4096 {
                return Err(Error::TooLarge {
                    what: "johnson vertex count",
                    limit: 4096,
                    got: subsets.len(),
                });
            }
            let labels: Vec<String> = subsets
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|i| (i + 1).to_string())
                        .collect::<Vec<_>>()
                        .join("-")
                })
                .collect();
            let mut edges = Vec::new();
            for i in 0..subsets.len() {
                for j in (i + 1)..subsets.len() {
                    let inter = subsets[i].iter().filter(|x| subsets[j].contains(x)).count();
                    if inter == *k - 1 {
                        edges.push((i, j));
                    }
                }
            }
            laplacian_model(labels, &edges)
        }
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Degree and rate statistics used by the corollary-style bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    /// Maximum vertex degree d*.
    pub max_degree: usize,
    /// B = max_x sum_y q(x, y), the largest total jump rate.
    pub max_total_rate: f64,
    /// Number of oriented edges.
    pub oriented_edge_count: usize,
    pub vertex_count: usize,
}

pub fn degree_stats(model: &ReversibleModel) -> DegreeStats {
    let g = model.graph();
    let max_degree = (0..g.vertex_count())
        .map(|x| g.degree(x))
        .max()
        .unwrap_or(0);
    let max_total_rate = (0..g.vertex_count())
        .map(|x| g.out_edges(x).iter().map(|&e| g.edge(e).rate).sum::<f64>())
        .fold(0.0, f64::max);
    DegreeStats {
        max_degree,
        max_total_rate,
        oriented_edge_count: g.edge_count(),
        vertex_count: g.vertex_count(),
    }
}

#[derive(Deserialize)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<EdgeSpec>,
    #[serde(default)]
    laplacian: bool,
}

#[derive(Deserialize)]
struct EdgeSpec {
    u: String,
    v: String,
    q_uv: Option<f64>,
    q_vu: Option<f64>,
}

/// Parses a graph JSON document:
///
/// ```text
/// {"vertices": ["a", "b"],
///  "edges": [{"u": "a", "v": "b", "q_uv": 1.0, "q_vu": 2.0}],
///  "laplacian": false}
/// ```
///
/// With `"laplacian": true` the rates must be omitted and the Laplacian model
/// is built; otherwise `q_uv` is required and `q_vu` defaults to `q_uv`.
pub fn load_graph_json(text: &str) -> Result<ReversibleModel> {
    let file: GraphFile = serde_json::from_str(text)?;
    let mut labels = file.vertices.clone();
    let mut index = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        index.insert(l.clone(), i);
    }
    let resolve = |l: &String| -> Result<usize> {
        index
            .get(l)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(l.clone()))
    };
    if file.laplacian {
        let mut edges = Vec::new();
        for e in &file.edges {
            if e.q_uv.is_some() || e.q_vu.is_some() {
                return Err(Error::BadParams(
                    "rates must be omitted when \"laplacian\" is true".into(),
                ));
            }
            edges.push((resolve(&e.u)?, resolve(&e.v)?));
        }
        laplacian_model(std::mem::take(&mut labels), &edges)
    } else {
        let mut edges = Vec::new();
        for e in &file.edges {
            let quv = e.q_uv.ok_or_else(|| {
                Error::BadParams(format!("edge {} -> {}: q_uv is required", e.u, e.v))
            })?;
            let qvu = e.q_vu.unwrap_or(quv);
            edges.push((resolve(&e.u)?, resolve(&e.v)?, quv, qvu));
        }
        build_model(RateGraph::from_undirected(
            std::mem::take(&mut labels),
            &edges,
        )?)
    }
}
