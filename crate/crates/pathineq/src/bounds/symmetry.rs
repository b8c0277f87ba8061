//! Symmetry-based bounds that bypass per-edge congestion sums.
//!
//! On graphs whose automorphism group acts transitively on edges, the
//! maximum over edges in the kappa bound collapses into an average, giving
//!
//! ```text
//!     kappa <= E_{mu x mu}[rho_1(X, Y)^2]            (edge-transitive)
//!     kappa <= index(G) E_mu[rho_1(X, v0)^2]         (vertex-transitive)
//!     K     <= index(G) E_mu[rho_1(X, v0)^4]         (vertex-transitive)
//! ```
//!
//! with index(G) = max_i |E0| / |E0_i| over undirected-edge orbits (1 for
//! distance-transitive graphs). These statements are for the graph
//! Laplacian model with the graph metric; the base vertex v0 is arbitrary
//! by transitivity.
//!
//! Orbits come from brute-force enumeration of graph automorphisms, which
//! is only attempted on small graphs.

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::model::{RateGraph, ReversibleModel};

/// Vertex-count cap for automorphism enumeration.
const ORBIT_MAX_VERTICES: usize = 10;
/// Safety valve: abort enumeration past this many automorphisms.
const AUTOMORPHISM_CAP: u64 = 1_000_000;
/// Uniformity tolerance for the stationary measure.
const UNIFORM_TOL: f64 = 1e-12;

/// Orbit decomposition of the undirected edges under the full automorphism
/// group, with the derived transitivity flags.
#[derive(Debug, Clone)]
pub struct EdgeOrbits {
    /// Orbits as sorted lists of undirected-edge indices (indexing
    /// [`RateGraph::undirected_edges`]).
    pub orbits: Vec<Vec<usize>>,
    /// index(G) = max_i |E0| / |E0_i|.
    pub index: f64,
    /// True when there is a single edge orbit.
    pub edge_transitive: bool,
    /// True when there is a single vertex orbit.
    pub vertex_transitive: bool,
    /// Size of the automorphism group.
    pub automorphism_count: u64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let root = self.find(self.0[x]);
            self.0[x] = root;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Enumerates all adjacency-preserving vertex permutations by backtracking,
/// calling `visit` on each. Returns the group size.
fn enumerate_automorphisms(g: &RateGraph, visit: &mut impl FnMut(&[usize])) -> Result<u64> {
    let n = g.vertex_count();
    let adjacent = |a: usize, b: usize| g.edge_id(a, b).is_some();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut count: u64 = 0;

    fn recurse(
        g: &RateGraph,
        adjacent: &impl Fn(usize, usize) -> bool,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        depth: usize,
        count: &mut u64,
        visit: &mut impl FnMut(&[usize]),
    ) -> Result<()> {
        let n = g.vertex_count();
        if depth == n {
            *count += 1;
            if *count > AUTOMORPHISM_CAP {
                return Err(Error::TooLarge {
                    what: "automorphism group size",
                    limit: AUTOMORPHISM_CAP as usize,
                    got: usize::MAX,
                });
            }
            visit(image);
            return Ok(());
        }
        for candidate in 0..n {
            if used[candidate] || g.degree(candidate) != g.degree(depth) {
                continue;
            }
            let consistent =
                (0..depth).all(|prev| adjacent(depth, prev) == adjacent(candidate, image[prev]));
            if !consistent {
                continue;
            }
            image[depth] = candidate;
            used[candidate] = true;
            recurse(g, adjacent, image, used, depth + 1, count, visit)?;
            used[candidate] = false;
            image[depth] = usize::MAX;
        }
        Ok(())
    }

    recurse(g, &adjacent, &mut image, &mut used, 0, &mut count, visit)?;
    Ok(count)
}

/// Computes the undirected-edge orbits, index(G), and transitivity flags.
#[allow(clippy::needless_range_loop)] // x is a vertex id shared across tables
pub fn edge_orbits(model: &ReversibleModel) -> Result<EdgeOrbits> {
    let g = model.graph();
    let n = g.vertex_count();
    if n > ORBIT_MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "vertex count for automorphism enumeration",
            limit: ORBIT_MAX_VERTICES,
            got: n,
        });
    }
    let undirected = g.undirected_edges();
    let edge_index = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        undirected
            .iter()
            .position(|&e| e == key)
            .expect("image of an edge is an edge")
    };

    let mut edge_uf = UnionFind::new(undirected.len());
    let mut vertex_uf = UnionFind::new(n);
    let count = enumerate_automorphisms(g, &mut |image| {
        for x in 0..n {
            vertex_uf.union(x, image[x]);
        }
        for (i, &(u, v)) in undirected.iter().enumerate() {
            edge_uf.union(i, edge_index(image[u], image[v]));
        }
    })?;

    let mut orbit_of_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..undirected.len() {
        let root = edge_uf.find(i);
        orbit_of_root.entry(root).or_default().push(i);
    }
    let orbits: Vec<Vec<usize>> = orbit_of_root.into_values().collect();
    let total = undirected.len() as f64;
    let index = orbits
        .iter()
        .map(|o| total / o.len() as f64)
        .fold(1.0f64, f64::max);
    let vertex_orbits = (0..n)
        .map(|x| vertex_uf.find(x))
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    Ok(EdgeOrbits {
        edge_transitive: orbits.len() == 1,
        vertex_transitive: vertex_orbits == 1,
        index,
        orbits,
        automorphism_count: count,
    })
}

/// How the caller vouches for the symmetry class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryAssertion {
    /// Run the automorphism search and derive the flags (small graphs only).
    Verify,
    /// Caller asserts one edge orbit.
    EdgeTransitive,
    /// Caller asserts one vertex orbit and supplies index(G).
    VertexTransitive { index: f64 },
    /// Caller asserts distance transitivity (index 1).
    DistanceTransitive,
}

/// One symmetry-derived bound value.
#[derive(Debug, Clone)]
pub struct SymmetryEntry {
    pub name: &'static str,
    pub value: f64,
    pub formula: &'static str,
}

/// The symmetry bounds that apply under the given assertion, with
/// provenance recorded.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub entries: Vec<SymmetryEntry>,
    /// True when the flags below come from an automorphism search rather
    /// than a caller assertion.
    pub orbit_verified: bool,
    pub edge_transitive: Option<bool>,
    pub vertex_transitive: Option<bool>,
    pub index: Option<f64>,
    /// Base vertex used for the vertex-transitive moments.
    pub base_vertex: usize,
    pub automorphism_count: Option<u64>,
}

fn mu_is_uniform(model: &ReversibleModel) -> bool {
    let n = model.vertex_count() as f64;
    model
        .mu()
        .iter()
        .all(|&m| (m - 1.0 / n).abs() <= UNIFORM_TOL)
}

/// Second moment E_{mu x mu}[rho(X, Y)^2].
fn pair_second_moment(model: &ReversibleModel, rho: &Metric) -> f64 {
    let mu = model.mu();
    let n = model.vertex_count();
    let mut total = 0.0;
    for x in 0..n {
        for y in 0..n {
            let d = rho.d(x, y);
            total += d * d * mu[x] * mu[y];
        }
    }
    total
}

/// Moment E_mu[rho(X, v0)^p] for p in {2, 4}.
fn base_moment(model: &ReversibleModel, rho: &Metric, v0: usize, p: i32) -> f64 {
    let mu = model.mu();
    (0..model.vertex_count())
        .map(|x| rho.d(x, v0).powi(p) * mu[x])
        .sum()
}

/// Evaluates the applicable symmetry bounds for the graph metric. Defined
/// for the Laplacian model only; vertex-transitive entries additionally
/// require the (then automatic) uniform stationary measure and error with
/// NotUniform otherwise.
pub fn symmetry_bounds(
    model: &ReversibleModel,
    v0: Option<usize>,
    assertion: SymmetryAssertion,
) -> Result<SymmetryReport> {
    if !model.is_laplacian() {
        return Err(Error::NotLaplacian);
    }
    let v0 = v0.unwrap_or(0);
    if v0 >= model.vertex_count() {
        return Err(Error::BadParams(format!(
            "base vertex {v0} outside 0..{}",
            model.vertex_count()
        )));
    }
    let rho = Metric::graph(model);

    let (orbit_verified, et, vt, index, auto_count) = match assertion {
        SymmetryAssertion::Verify => {
            let orbits = edge_orbits(model)?;
            (
                true,
                orbits.edge_transitive,
                orbits.vertex_transitive,
                orbits.index,
                Some(orbits.automorphism_count),
            )
        }
        SymmetryAssertion::EdgeTransitive => (false, true, false, 1.0, None),
        SymmetryAssertion::VertexTransitive { index } => {
            if !(index.is_finite() && index >= 1.0) {
                return Err(Error::BadParams(format!("index(G) = {index} invalid")));
            }
            (false, false, true, index, None)
        }
        SymmetryAssertion::DistanceTransitive => (false, true, true, 1.0, None),
    };

    let mut entries = Vec::new();
    if et {
        entries.push(SymmetryEntry {
            name: "kappa_edge_transitive",
            value: pair_second_moment(model, &rho),
            formula: "edge-orbit-average",
        });
    }
    if vt {
        if !mu_is_uniform(model) {
            return Err(Error::NotUniform);
        }
        entries.push(SymmetryEntry {
            name: "kappa_vertex_transitive",
            value: index * base_moment(model, &rho, v0, 2),
            formula: "vertex-orbit-moment",
        });
        entries.push(SymmetryEntry {
            name: "k_vertex_transitive",
            value: index * base_moment(model, &rho, v0, 4),
            formula: "vertex-orbit-moment",
        });
    }

    Ok(SymmetryReport {
        entries,
        orbit_verified,
        edge_transitive: Some(et),
        vertex_transitive: Some(vt),
        index: Some(index),
        base_vertex: v0,
        automorphism_count: auto_count,
    })
}

/// Binomial coefficient as f64 (exact for the desk-scale arguments used).
fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (n - i) as u128;
        den *= (i + 1) as u128;
    }
    (num / den) as f64
}

/// Closed-form kappa bound for the Johnson graph J(n, k) whose vertices
/// are the k-subsets of an n-set:
///
/// ```text
///     kappa <= (1 / C(n, k)) sum_j j^2 C(k, j) C(n - k, j).
/// ```
pub fn johnson_kappa_formula(n: u32, k: u32) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::BadParams(format!(
            "johnson parameters need 1 <= k < n, got n = {n}, k = {k}"
        )));
    }
    let (n, k) = (n as u64, k as u64);
    let mut total = 0.0;
    for j in 0..=k.min(n - k) {
        total += (j * j) as f64 * binomial(k, j) * binomial(n - k, j);
    }
    Ok(total / binomial(n, k))
}
