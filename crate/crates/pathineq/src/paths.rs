//! Path systems, geodesic counting, and per-edge traversal expectations.
//!
//! Every bound in this crate is driven by sums of the form
//!
//! ```text
//!     h(e) = sum_{x != y}  E[ 1_{e in gamma_xy} * |gamma_xy|_w ] * kernel(x, y) * mu(x) mu(y)
//! ```
//!
//! where gamma_xy is a (possibly random) path from x to y, 1_{e in gamma}
//! indicates that the path traverses the oriented edge e in its travel
//! direction, and |gamma|_w is the total w-length of the path.
//!
//! Three path systems are supported:
//!
//! * **uniform-geodesic**: gamma_xy is drawn uniformly from all unit-length
//!   geodesics from x to y. Geodesics are always taken with unit edge
//!   lengths; the length function w enters only through |gamma|_w. On even
//!   cycles the two antipodal geodesics are split uniformly.
//! * **tree-unique**: the unique simple path in a tree.
//! * **explicit**: one caller-supplied deterministic path per ordered pair.
//!
//! Uniform-geodesic expectations are computed in closed form from geodesic
//! counts, never by enumeration. With sigma(x, y) the number of geodesics
//! and Wsum(x, y) the total w-length summed over all of them, a geodesic
//! from x to y crosses e = (u, v) exactly when
//! d(x, u) + 1 + d(v, y) = d(x, y), and then
//!
//! ```text
//!     #geodesics through e      = sigma(x, u) * sigma(v, y)
//!     total w-length through e  = Wsum(x, u) sigma(v, y)
//!                               + sigma(x, u) sigma(v, y) w(e)
//!                               + sigma(x, u) Wsum(v, y)
//! ```
//!
//! Both tables come from breadth-first dynamic programming, so everything
//! here is polynomial in the graph size even when the geodesic count is
//! exponential.

use ndarray::Array2;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::metric::LengthFunction;
use crate::model::{RateGraph, ReversibleModel};

/// Unit-length distances, geodesic counts, and w-length sums for all ordered
/// pairs, plus closed-form per-edge crossing data.
#[derive(Debug, Clone)]
pub struct GeodesicTable {
    dist: Vec<Vec<u32>>,
    sigma: Array2<f64>,
    wsum: Array2<f64>,
    edge_ends: Vec<(usize, usize)>,
    edge_w: Vec<f64>,
}

impl GeodesicTable {
    pub fn new(model: &ReversibleModel, w: &LengthFunction) -> Self {
        let g = model.graph();
        let (dist, sigma) = shortest_path_counts(g);
        let wsum = weighted_path_sums(g, &dist, &sigma, w);
        GeodesicTable {
            dist,
            sigma,
            wsum,
            edge_ends: g.edges().iter().map(|e| (e.from, e.to)).collect(),
            edge_w: (0..g.edge_count()).map(|e| w.get(e)).collect(),
        }
    }

    /// Unit-length distance rho_1(x, y).
    pub fn dist(&self, x: usize, y: usize) -> u32 {
        self.dist[x][y]
    }

    /// Number of unit-length geodesics from x to y (1 when x == y).
    pub fn sigma(&self, x: usize, y: usize) -> f64 {
        self.sigma[[x, y]]
    }

    /// Total w-length summed over all geodesics from x to y.
    pub fn wsum(&self, x: usize, y: usize) -> f64 {
        self.wsum[[x, y]]
    }

    /// Number of geodesics from x to y crossing the oriented edge `eid`.
    pub fn through_count(&self, eid: usize, x: usize, y: usize) -> f64 {
        let (u, v) = self.edge_ends[eid];
        if self.dist[x][u] + 1 + self.dist[v][y] == self.dist[x][y] {
            self.sigma[[x, u]] * self.sigma[[v, y]]
        } else {
            0.0
        }
    }

    /// Total w-length of the geodesics from x to y crossing `eid`.
    pub fn through_wsum(&self, eid: usize, x: usize, y: usize) -> f64 {
        let (u, v) = self.edge_ends[eid];
        if self.dist[x][u] + 1 + self.dist[v][y] == self.dist[x][y] {
            self.wsum[[x, u]] * self.sigma[[v, y]]
                + self.sigma[[x, u]] * self.sigma[[v, y]] * self.edge_w[eid]
                + self.sigma[[x, u]] * self.wsum[[v, y]]
        } else {
            0.0
        }
    }

    /// Probability that a uniform geodesic from x to y crosses `eid`.
    pub fn traversal_probability(&self, eid: usize, x: usize, y: usize) -> f64 {
        self.through_count(eid, x, y) / self.sigma[[x, y]]
    }

    /// E[ 1_{e in gamma} |gamma|_w ] for a uniform geodesic from x to y.
    pub fn expected_crossing_wlen(&self, eid: usize, x: usize, y: usize) -> f64 {
        self.through_wsum(eid, x, y) / self.sigma[[x, y]]
    }
}

/// BFS layer counting: distances and geodesic counts from every source.
fn shortest_path_counts(g: &RateGraph) -> (Vec<Vec<u32>>, Array2<f64>) {
    let n = g.vertex_count();
    let mut dist = vec![vec![u32::MAX; n]; n];
    let mut sigma = Array2::zeros((n, n));
    for s in 0..n {
        dist[s][s] = 0;
        sigma[[s, s]] = 1.0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &eid in g.out_edges(x) {
                let y = g.edge(eid).to;
                if dist[s][y] == u32::MAX {
                    dist[s][y] = dist[s][x] + 1;
                    queue.push_back(y);
                }
                if dist[s][y] == dist[s][x] + 1 {
                    sigma[[s, y]] += sigma[[s, x]];
                }
            }
        }
    }
    (dist, sigma)
}

/// Total w-length over all geodesics, by the same layer recursion:
/// Wsum(s, y) = sum over predecessors x of Wsum(s, x) + sigma(s, x) w(x, y).
fn weighted_path_sums(
    g: &RateGraph,
    dist: &[Vec<u32>],
    sigma: &Array2<f64>,
    w: &LengthFunction,
) -> Array2<f64> {
    let n = g.vertex_count();
    let mut wsum = Array2::zeros((n, n));
    let mut order: Vec<usize> = (0..n).collect();
    for s in 0..n {
        order.sort_unstable_by_key(|&x| dist[s][x]);
        for &x in &order {
            for &eid in g.out_edges(x) {
                let y = g.edge(eid).to;
                if dist[s][y] == dist[s][x] + 1 {
                    wsum[[s, y]] += wsum[[s, x]] + sigma[[s, x]] * w.get(eid);
                }
            }
        }
    }
    wsum
}

#[derive(Debug, Clone)]
enum Paths {
    Uniform {
        dist: Vec<Vec<u32>>,
        sigma: Array2<f64>,
    },
    Explicit {
        /// paths[x][y] = edge ids of the path x -> y (empty on the diagonal).
        paths: Vec<Vec<Vec<usize>>>,
        tree_derived: bool,
    },
}

/// A choice of path (distribution) for every ordered pair of distinct
/// vertices. Bound to the graph it was built from.
#[derive(Debug, Clone)]
pub struct PathSystem {
    inner: Paths,
}

impl PathSystem {
    /// Uniform distribution over unit-length geodesics for every pair.
    pub fn uniform_geodesic(model: &ReversibleModel) -> Self {
        let (dist, sigma) = shortest_path_counts(model.graph());
        PathSystem {
            inner: Paths::Uniform { dist, sigma },
        }
    }

    /// The unique simple path of a tree, for every ordered pair.
    #[allow(clippy::needless_range_loop)] // (x, y) are vertex-pair ids
    pub fn tree_unique(model: &ReversibleModel) -> Result<Self> {
        let g = model.graph();
        if !g.is_tree() {
            return Err(Error::NotATree);
        }
        let n = g.vertex_count();
        // parent_toward[y][x] = first edge on the path x -> y.
        let mut step_toward = vec![vec![usize::MAX; n]; n];
        for y in 0..n {
            let mut queue = std::collections::VecDeque::from([y]);
            let mut seen = vec![false; n];
            seen[y] = true;
            while let Some(v) = queue.pop_front() {
                for &eid in g.out_edges(v) {
                    let x = g.edge(eid).to;
                    if !seen[x] {
                        seen[x] = true;
                        step_toward[y][x] = g.reverse(eid);
                        queue.push_back(x);
                    }
                }
            }
        }
        let mut paths = vec![vec![Vec::new(); n]; n];
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let mut at = x;
                while at != y {
                    let eid = step_toward[y][at];
                    paths[x][y].push(eid);
                    at = g.edge(eid).to;
                }
            }
        }
        Ok(PathSystem {
            inner: Paths::Explicit {
                paths,
                tree_derived: true,
            },
        })
    }

    /// One caller-supplied simple path per ordered pair; every ordered pair
    /// of distinct vertices must appear exactly once.
    #[allow(clippy::needless_range_loop)] // (x, y) are vertex-pair ids
    pub fn explicit(model: &ReversibleModel, given: &[(usize, usize, Vec<usize>)]) -> Result<Self> {
        let g = model.graph();
        let n = g.vertex_count();
        let mut paths = vec![vec![Vec::new(); n]; n];
        let mut have = vec![vec![false; n]; n];
        for (x, y, vertices) in given {
            let (x, y) = (*x, *y);
            if x >= n || y >= n || x == y {
                return Err(Error::InvalidPath(format!("bad endpoint pair ({x}, {y})")));
            }
            if have[x][y] {
                return Err(Error::InvalidPath(format!(
                    "duplicate path for pair ({}, {})",
                    g.label(x),
                    g.label(y)
                )));
            }
            if vertices.first() != Some(&x) || vertices.last() != Some(&y) {
                return Err(Error::InvalidPath(format!(
                    "path for ({}, {}) must start and end at its endpoints",
                    g.label(x),
                    g.label(y)
                )));
            }
            let mut seen = vec![false; n];
            let mut edges = Vec::with_capacity(vertices.len() - 1);
            for step in vertices.windows(2) {
                let (a, b) = (step[0], step[1]);
                if a >= n || b >= n || seen[a] {
                    return Err(Error::InvalidPath(format!(
                        "path for ({}, {}) revisits a vertex or leaves the graph",
                        g.label(x),
                        g.label(y)
                    )));
                }
                seen[a] = true;
                let eid = g.edge_id(a, b).ok_or_else(|| {
                    Error::InvalidPath(format!(
                        "path for ({}, {}) uses non-edge ({}, {})",
                        g.label(x),
                        g.label(y),
                        g.label(a),
                        g.label(b)
                    ))
                })?;
                edges.push(eid);
            }
            paths[x][y] = edges;
            have[x][y] = true;
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && !have[x][y] {
                    return Err(Error::InvalidPath(format!(
                        "no path given for pair ({}, {})",
                        g.label(x),
                        g.label(y)
                    )));
                }
            }
        }
        Ok(PathSystem {
            inner: Paths::Explicit {
                paths,
                tree_derived: false,
            },
        })
    }

    /// Parses `{"paths": [{"from": .., "to": .., "vertices": [..]}]}` with
    /// vertex labels and delegates to [`PathSystem::explicit`].
    pub fn explicit_from_json(model: &ReversibleModel, text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct PathsFile {
            paths: Vec<PathSpec>,
        }
        #[derive(Deserialize)]
        struct PathSpec {
            from: String,
            to: String,
            vertices: Vec<String>,
        }
        let file: PathsFile = serde_json::from_str(text)?;
        let g = model.graph();
        let resolve = |l: &String| -> Result<usize> {
            g.vertex_by_label(l)
                .ok_or_else(|| Error::UnknownVertex(l.clone()))
        };
        let mut given = Vec::with_capacity(file.paths.len());
        for p in &file.paths {
            let vertices = p
                .vertices
                .iter()
                .map(resolve)
                .collect::<Result<Vec<usize>>>()?;
            given.push((resolve(&p.from)?, resolve(&p.to)?, vertices));
        }
        Self::explicit(model, &given)
    }

    pub fn mode_name(&self) -> &'static str {
        match &self.inner {
            Paths::Uniform { .. } => "uniform-geodesic",
            Paths::Explicit {
                tree_derived: true, ..
            } => "tree-unique",
            Paths::Explicit {
                tree_derived: false,
                ..
            } => "explicit",
        }
    }

    /// True when paths are reversal-symmetric by construction (uniform
    /// geodesics and tree paths; not guaranteed for explicit systems).
    pub fn reversal_symmetric(&self) -> bool {
        !matches!(
            &self.inner,
            Paths::Explicit {
                tree_derived: false,
                ..
            }
        )
    }
}

/// Core accumulation: calls `sink(e, x, y, p, wl)` for every oriented edge e
/// and ordered pair (x, y) with p = E[1_{e in gamma_xy}] > 0 and
/// wl = E[1_{e in gamma_xy} |gamma_xy|_w].
#[allow(clippy::needless_range_loop)] // (x, y) are vertex-pair ids
fn accumulate<F: FnMut(usize, usize, usize, f64, f64)>(
    model: &ReversibleModel,
    paths: &PathSystem,
    w: &LengthFunction,
    mut sink: F,
) {
    let g = model.graph();
    let n = g.vertex_count();
    match &paths.inner {
        Paths::Uniform { dist, sigma } => {
            let wsum = weighted_path_sums(g, dist, sigma, w);
            for (eid, e) in g.edges().iter().enumerate() {
                let (u, v) = (e.from, e.to);
                let we = w.get(eid);
                for x in 0..n {
                    let dxu = dist[x][u];
                    let sxu = sigma[[x, u]];
                    let wxu = wsum[[x, u]];
                    for y in 0..n {
                        if x == y || dxu + 1 + dist[v][y] != dist[x][y] {
                            continue;
                        }
                        let svy = sigma[[v, y]];
                        let sxy = sigma[[x, y]];
                        let p = sxu * svy / sxy;
                        let wl = (wxu * svy + sxu * svy * we + sxu * wsum[[v, y]]) / sxy;
                        sink(eid, x, y, p, wl);
                    }
                }
            }
        }
        Paths::Explicit { paths: pl, .. } => {
            for x in 0..n {
                for y in 0..n {
                    if x == y {
                        continue;
                    }
                    let path = &pl[x][y];
                    let wl: f64 = path.iter().map(|&e| w.get(e)).sum();
                    for &e in path {
                        sink(e, x, y, 1.0, wl);
                    }
                }
            }
        }
    }
}

/// h(e) = sum over ordered pairs of E[1_e |gamma|_w] kernel(x, y) mu(x) mu(y).
pub fn edge_expectation(
    model: &ReversibleModel,
    paths: &PathSystem,
    w: &LengthFunction,
    kernel: impl Fn(usize, usize) -> f64,
) -> Vec<f64> {
    let mu = model.mu();
    let mut h = vec![0.0; model.graph().edge_count()];
    accumulate(model, paths, w, |e, x, y, _p, wl| {
        h[e] += wl * kernel(x, y) * mu[x] * mu[y];
    });
    h
}

/// h(e) = sum over ordered pairs of E[1_e] kernel(x, y) mu(x) mu(y);
/// the w-free analogue of [`edge_expectation`].
pub fn edge_visit_expectation(
    model: &ReversibleModel,
    paths: &PathSystem,
    kernel: impl Fn(usize, usize) -> f64,
) -> Vec<f64> {
    let mu = model.mu();
    let w = LengthFunction::uniform(model.graph());
    let mut h = vec![0.0; model.graph().edge_count()];
    accumulate(model, paths, &w, |e, x, y, p, _wl| {
        h[e] += p * kernel(x, y) * mu[x] * mu[y];
    });
    h
}

/// L[e][x] = sum over targets y of E[1_e |gamma_xy|_w] mu(y); the
/// source-resolved edge congestion entering the log-Sobolev machinery.
pub fn edge_source_wlen(
    model: &ReversibleModel,
    paths: &PathSystem,
    w: &LengthFunction,
) -> Vec<Vec<f64>> {
    let mu = model.mu();
    let mut l = vec![vec![0.0; model.vertex_count()]; model.graph().edge_count()];
    accumulate(model, paths, w, |e, x, y, _p, wl| {
        l[e][x] += wl * mu[y];
    });
    l
}

/// b = max over oriented edges of the number of unit-length geodesics
/// (over all ordered pairs) crossing the edge. Counts are exact integers.
pub fn b_constant(model: &ReversibleModel) -> u64 {
    let g = model.graph();
    let n = g.vertex_count();
    let (dist, sigma) = shortest_path_counts(g);
    let mut best = 0.0f64;
    for e in g.edges() {
        let (u, v) = (e.from, e.to);
        let mut total = 0.0;
        for x in 0..n {
            for y in 0..n {
                if x != y && dist[x][u] + 1 + dist[v][y] == dist[x][y] {
                    total += sigma[[x, u]] * sigma[[v, y]];
                }
            }
        }
        best = best.max(total);
    }
    best.round() as u64
}

/// Largest unit-length distance.
pub fn diameter(model: &ReversibleModel) -> u32 {
    let (dist, _) = shortest_path_counts(model.graph());
    dist.iter()
        .flat_map(|row| row.iter().copied())
        .max()
        .unwrap_or(0)
}
