//! Edge length functions and vertex metrics.
//!
//! A length function w assigns a positive length to every undirected edge
//! (stored per oriented edge, symmetric under reversal). Bounds use w only
//! through path lengths |gamma|_w = sum of w over the edges of a path;
//! shortest-path structure is always taken with unit lengths, w never
//! changes which paths are geodesics.
//!
//! A [`Metric`] is a dense symmetric matrix of pairwise distances with a
//! kind tag:
//!
//! | kind              | rho(x, y)                                    |
//! |-------------------|----------------------------------------------|
//! | graph             | unit-length shortest-path distance rho_1     |
//! | discrete          | 1 when x != y                                |
//! | w-induced         | shortest-path distance with edge lengths w   |
//! | weighted-discrete | (phi(x) + phi(y)) when x != y, phi >= 0      |
//! | custom            | caller-supplied                              |
//!
//! The first four kinds satisfy the triangle inequality by construction
//! (weighted-discrete is a pseudometric when phi vanishes somewhere).
//! Custom matrices are validated for symmetry, zero diagonal and
//! nonnegativity only.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::{RateGraph, ReversibleModel};

/// Positive edge lengths, symmetric under edge reversal.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthFunction {
    values: Vec<f64>,
}

impl LengthFunction {
    /// w(e) = 1 on every edge.
    pub fn uniform(graph: &RateGraph) -> Self {
        LengthFunction {
            values: vec![1.0; graph.edge_count()],
        }
    }

    /// w(e) = 1 / Q(e), the choice that turns the weighted Poincare bound
    /// into the unweighted one.
    pub fn inverse_conductance(model: &ReversibleModel) -> Self {
        let values = (0..model.graph().edge_count())
            .map(|e| 1.0 / model.conductance(e))
            .collect();
        LengthFunction { values }
    }

    /// Builds from per-undirected-edge values `(u, v, w)`.
    pub fn from_undirected(graph: &RateGraph, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut values = vec![0.0; graph.edge_count()];
        let mut set = vec![false; graph.edge_count()];
        for &(u, v, w) in entries {
            let eid = graph
                .edge_id(u, v)
                .ok_or_else(|| Error::BadParams(format!("length given for non-edge ({u}, {v})")))?;
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::BadParams(format!(
                    "edge length must be positive and finite, got {w} on ({u}, {v})"
                )));
            }
            let rid = graph.reverse(eid);
            if set[eid] {
                return Err(Error::BadParams(format!(
                    "duplicate length for edge ({u}, {v})"
                )));
            }
            values[eid] = w;
            values[rid] = w;
            set[eid] = true;
            set[rid] = true;
        }
        if set.iter().any(|s| !s) {
            return Err(Error::BadParams("length missing for some edge".into()));
        }
        Ok(LengthFunction { values })
    }

    pub fn get(&self, edge_id: usize) -> f64 {
        self.values[edge_id]
    }

    /// Sets the length of the undirected edge containing `edge_id` (both
    /// orientations).
    pub fn set(&mut self, graph: &RateGraph, edge_id: usize, value: f64) {
        self.values[edge_id] = value;
        self.values[graph.reverse(edge_id)] = value;
    }

    /// Multiplies every length by `c > 0`.
    pub fn scale(&self, c: f64) -> Self {
        LengthFunction {
            values: self.values.iter().map(|w| w * c).collect(),
        }
    }

    /// Sum of lengths over undirected edges (each counted once).
    pub fn undirected_total(&self, graph: &RateGraph) -> f64 {
        graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.from < e.to)
            .map(|(id, _)| self.values[id])
            .sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Metric kinds; see the module doc for definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Graph,
    Discrete,
    WInduced,
    WeightedDiscrete,
    Custom,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Graph => "graph",
            MetricKind::Discrete => "discrete",
            MetricKind::WInduced => "w-induced",
            MetricKind::WeightedDiscrete => "weighted-discrete",
            MetricKind::Custom => "custom",
        }
    }
}

/// A symmetric pairwise distance matrix with zero diagonal.
#[derive(Debug, Clone)]
pub struct Metric {
    kind: MetricKind,
    rho: Array2<f64>,
}

impl Metric {
    /// Unit-length shortest-path metric rho_1.
    pub fn graph(model: &ReversibleModel) -> Self {
        let n = model.vertex_count();
        let mut rho = Array2::zeros((n, n));
        for x in 0..n {
            let d = bfs_distances(model.graph(), x);
            for y in 0..n {
                rho[[x, y]] = d[y] as f64;
            }
        }
        Metric {
            kind: MetricKind::Graph,
            rho,
        }
    }

    /// rho(x, y) = 1 for x != y.
    pub fn discrete(n: usize) -> Self {
        let mut rho = Array2::ones((n, n));
        for x in 0..n {
            rho[[x, x]] = 0.0;
        }
        Metric {
            kind: MetricKind::Discrete,
            rho,
        }
    }

    /// rho(x, y) = 1_{x != y} (phi(x) + phi(y)) for phi >= 0.
    pub fn weighted_discrete(model: &ReversibleModel, phi: &[f64]) -> Result<Self> {
        let n = model.vertex_count();
        if phi.len() != n {
            return Err(Error::BadParams(format!(
                "phi has {} entries, expected {n}",
                phi.len()
            )));
        }
        for (x, &p) in phi.iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::NegativePhi {
                    vertex: model.graph().label(x).to_string(),
                    value: p,
                });
            }
        }
        let mut rho = Array2::zeros((n, n));
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    rho[[x, y]] = phi[x] + phi[y];
                }
            }
        }
        Ok(Metric {
            kind: MetricKind::WeightedDiscrete,
            rho,
        })
    }

    /// Caller-supplied matrix; validated for shape, symmetry, zero diagonal,
    /// nonnegative finite entries. The triangle inequality is not checked.
    pub fn custom(rho: Array2<f64>) -> Result<Self> {
        let (r, c) = rho.dim();
        if r != c {
            return Err(Error::BadParams("metric matrix must be square".into()));
        }
        for x in 0..r {
            if rho[[x, x]] != 0.0 {
                return Err(Error::BadParams(format!(
                    "metric diagonal must be zero at {x}"
                )));
            }
            for y in 0..r {
                let v = rho[[x, y]];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::BadParams(format!(
                        "metric entry ({x}, {y}) = {v} must be finite and nonnegative"
                    )));
                }
                if (v - rho[[y, x]]).abs() > 0.0 {
                    return Err(Error::BadParams(format!(
                        "metric must be symmetric; mismatch at ({x}, {y})"
                    )));
                }
            }
        }
        Ok(Metric {
            kind: MetricKind::Custom,
            rho,
        })
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn d(&self, x: usize, y: usize) -> f64 {
        self.rho[[x, y]]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.rho
    }

    /// max over edges of rho(from, to); useful as a crude diameter bound.
    pub fn max_entry(&self) -> f64 {
        self.rho.iter().fold(0.0, |a, &b| a.max(b))
    }

    /// Lipschitz seminorm of g: max over all pairs x != y of
    /// |g(x) - g(y)| / rho(x, y). Pairs at distance zero contribute 0 when
    /// g agrees on them and infinity otherwise.
    pub fn lipschitz_seminorm(&self, g: &[f64]) -> f64 {
        let n = self.dim();
        let mut lip: f64 = 0.0;
        for x in 0..n {
            for y in (x + 1)..n {
                let num = (g[x] - g[y]).abs();
                let den = self.rho[[x, y]];
                if den > 0.0 {
                    lip = lip.max(num / den);
                } else if num > 0.0 {
                    return f64::INFINITY;
                }
            }
        }
        lip
    }
}

fn bfs_distances(graph: &RateGraph, start: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.vertex_count()];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &eid in graph.out_edges(x) {
            let y = graph.edge(eid).to;
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Shortest-path distances with edge lengths w (dense Dijkstra per source).
/// With w = 1 the values coincide with the graph metric.
pub fn all_pairs_distance(model: &ReversibleModel, w: &LengthFunction) -> Metric {
    let g = model.graph();
    let n = g.vertex_count();
    let mut rho = Array2::zeros((n, n));
    for s in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[s] = 0.0;
        for _ in 0..n {
            let mut best = usize::MAX;
            let mut bd = f64::INFINITY;
            for x in 0..n {
                if !done[x] && dist[x] < bd {
                    bd = dist[x];
                    best = x;
                }
            }
            if best == usize::MAX {
                break;
            }
            done[best] = true;
            for &eid in g.out_edges(best) {
                let y = g.edge(eid).to;
                let cand = dist[best] + w.get(eid);
                if cand < dist[y] {
                    dist[y] = cand;
                }
            }
        }
        for y in 0..n {
            rho[[s, y]] = dist[y];
        }
    }
    // The two directions sum the same edge lengths in opposite order and can
    // land an ulp apart; take the min so the matrix is exactly symmetric.
    for x in 0..n {
        for y in (x + 1)..n {
            let d = rho[[x, y]].min(rho[[y, x]]);
            rho[[x, y]] = d;
            rho[[y, x]] = d;
        }
    }
    Metric {
        kind: MetricKind::WInduced,
        rho,
    }
}
