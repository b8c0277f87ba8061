//! Path-method upper bounds for functional-inequality constants.
//!
//! Every bound here has the shape "maximum over oriented edges of a
//! congestion sum". With Q(e) the edge conductance, w a positive symmetric
//! length function, |gamma|_w the w-length of a chosen path and E^gamma the
//! average over the path system's tie-breaking randomness:
//!
//! ```text
//!   Poincare:      c_P  <= max_e 1/(Q(e)w(e)) sum_{x,y} E[1_e |g|_w] mu mu
//!   log-Sobolev:   c_LS <= max_e 1/(Q(e)w(e))
//!                          (Ent_mu(L_{w,e}) + mu(L_{w,e}) log(e^2 + 1))
//!   weighted:      c(phi, w) = max_e 2/(Q(e)w(e)) sum_x L_{w,e}(x) phi(x) mu(x)
//!   K constant:    K(w) = max_e 1/(Q(e)w(e)) sum E[1_e |g|_w] rho^2 mu mu
//!   kappa:         kappa = max_e 1/Q(e)      sum E[1_e]         rho   mu mu
//! ```
//!
//! where L_{w,e}(x) = sum_y E[1_{gamma_xy}(e) |gamma_xy|_w] mu(y). The
//! classical Poincare variant, which measures paths in the 1/Q length, is
//! the same formula at w = 1/Q (the prefactor collapses to 1); the two are
//! reported under distinct tags. kappa controls the transport/total
//! variation comparison (W1(f mu, mu) <= kappa/2 sum |D_e f| Q) and K the
//! transport/information one (W1(nu, mu)^2 <= 2 K I(nu | mu)); both feed
//! the Gaussian concentration machinery in [`crate::sim`].

pub mod symmetry;

use crate::error::{Error, Result};
use crate::metric::{LengthFunction, Metric};
use crate::model::{degree_stats, ReversibleModel};
use crate::oracles::{ent_mu, mean};
use crate::paths::{
    b_constant, diameter, edge_expectation, edge_source_wlen, edge_visit_expectation, PathSystem,
};

/// The additive constant log(e^2 + 1) appearing in the log-Sobolev bound.
pub fn log_e2_plus_1() -> f64 {
    (std::f64::consts::E.powi(2) + 1.0).ln()
}

/// The fixed set of formula tags reports attach to bound entries. Each tag
/// names the computation that produced the value, so entries with the same
/// tag are comparable across runs.
pub mod tag {
    /// Poincare path bound with paths measured in the 1/Q length.
    pub const INVERSE_CONDUCTANCE_PATH: &str = "inverse-conductance-path";
    /// Weighted path bound (Poincare form or the K constant).
    pub const WEIGHTED_PATH: &str = "weighted-path";
    /// Log-Sobolev bound from entropy of the edge congestion function.
    pub const ENTROPY_CONGESTION: &str = "entropy-congestion";
    /// Weighted Poincare constant c(phi, w).
    pub const WEIGHTED_MOMENT: &str = "weighted-moment";
    /// kappa, built from visit probabilities instead of w-lengths.
    pub const VISIT_CONGESTION: &str = "visit-congestion";
    /// Degree/diameter corollary bounds for Laplacian models.
    pub const DEGREE_DIAMETER: &str = "degree-diameter";
    /// Constants of the transportation-entropy inequality (M, sqrt(2KM)).
    pub const TRANSPORT_ENTROPY: &str = "transport-entropy";
    /// kappa^2 B upper bound for the Gaussian constant.
    pub const CHEEGER_SQUARED: &str = "cheeger-squared";
    /// Edge-transitive second-moment average.
    pub const EDGE_ORBIT_AVERAGE: &str = "edge-orbit-average";
    /// Vertex-transitive moment bound scaled by index(G).
    pub const VERTEX_ORBIT_MOMENT: &str = "vertex-orbit-moment";
    /// Plain graph statistics (b, diameter, degrees, rate caps).
    pub const GRAPH_STATISTIC: &str = "graph-statistic";

    /// Every tag a report may carry.
    pub fn all() -> [&'static str; 11] {
        [
            INVERSE_CONDUCTANCE_PATH,
            WEIGHTED_PATH,
            ENTROPY_CONGESTION,
            WEIGHTED_MOMENT,
            VISIT_CONGESTION,
            DEGREE_DIAMETER,
            TRANSPORT_ENTROPY,
            CHEEGER_SQUARED,
            EDGE_ORBIT_AVERAGE,
            VERTEX_ORBIT_MOMENT,
            GRAPH_STATISTIC,
        ]
    }
}

/// Tolerance for the orientation-pair equality assertion: for reversal
/// symmetric path systems the per-edge value must match on e and its
/// reversal.
const ORIENTATION_PAIR_TOL: f64 = 1e-9;

/// Result of a max-over-oriented-edges bound.
#[derive(Debug, Clone)]
pub struct EdgeMaxBound {
    /// The bound: the largest per-edge value.
    pub value: f64,
    /// Oriented edge id attaining the maximum (first in edge order).
    pub argmax_edge: usize,
    /// The per-edge values, indexed by oriented edge id.
    pub per_edge: Vec<f64>,
}

/// Wraps per-edge values into the max. `pair_symmetric` marks bounds whose
/// per-edge sum ranges over unordered pair contributions (Poincare, K,
/// kappa): for those, reversal-symmetric path systems force equal values on
/// an edge and its reversal, which is asserted. Source-resolved bounds
/// (log-Sobolev, weighted Poincare) see different L functions per
/// orientation and carry no such identity.
fn finish(
    model: &ReversibleModel,
    paths: &PathSystem,
    per_edge: Vec<f64>,
    pair_symmetric: bool,
) -> EdgeMaxBound {
    let g = model.graph();
    if pair_symmetric && paths.reversal_symmetric() {
        let scale = per_edge.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        for e in 0..g.edge_count() {
            let r = g.reverse(e);
            assert!(
                (per_edge[e] - per_edge[r]).abs() <= ORIENTATION_PAIR_TOL * scale,
                "orientation pair mismatch on edge {e}: {} vs {}",
                per_edge[e],
                per_edge[r]
            );
        }
    }
    let mut argmax = 0;
    for (e, &v) in per_edge.iter().enumerate() {
        if v > per_edge[argmax] {
            argmax = e;
        }
    }
    EdgeMaxBound {
        value: per_edge[argmax],
        argmax_edge: argmax,
        per_edge,
    }
}

fn check_w(model: &ReversibleModel, w: &LengthFunction) -> Result<()> {
    if w.len() != model.graph().edge_count() {
        return Err(Error::BadParams(format!(
            "length function covers {} oriented edges, graph has {}",
            w.len(),
            model.graph().edge_count()
        )));
    }
    Ok(())
}

/// L_{w,e}(x) for every oriented edge e and vertex x.
pub fn l_we(model: &ReversibleModel, paths: &PathSystem, w: &LengthFunction) -> Vec<Vec<f64>> {
    edge_source_wlen(model, paths, w)
}

/// Poincare constant upper bound. With a length function the weighted-path
/// form above is used; without one the unit-length variant (w = 1/Q, so the
/// prefactor collapses to 1) is evaluated through the same code path.
pub fn poincare_bound(
    model: &ReversibleModel,
    paths: &PathSystem,
    w: Option<&LengthFunction>,
) -> Result<EdgeMaxBound> {
    let owned;
    let w = match w {
        Some(w) => {
            check_w(model, w)?;
            w
        }
        None => {
            owned = LengthFunction::inverse_conductance(model);
            &owned
        }
    };
    let h = edge_expectation(model, paths, w, |_, _| 1.0);
    let per_edge: Vec<f64> = h
        .iter()
        .enumerate()
        .map(|(e, &v)| v / (model.conductance(e) * w.get(e)))
        .collect();
    Ok(finish(model, paths, per_edge, true))
}

/// Log-Sobolev constant upper bound (see the module header display).
pub fn ls_bound(
    model: &ReversibleModel,
    paths: &PathSystem,
    w: &LengthFunction,
) -> Result<EdgeMaxBound> {
    check_w(model, w)?;
    let l = edge_source_wlen(model, paths, w);
    let log_c = log_e2_plus_1();
    let per_edge: Vec<f64> = l
        .iter()
        .enumerate()
        .map(|(e, le)| {
            (ent_mu(model, le) + mean(model, le) * log_c) / (model.conductance(e) * w.get(e))
        })
        .collect();
    Ok(finish(model, paths, per_edge, false))
}

/// Weighted Poincare constant c(phi, w) for a nonnegative weight phi;
/// at phi = 1 it is exactly twice the weighted-path Poincare bound.
pub fn weighted_poincare(
    model: &ReversibleModel,
    paths: &PathSystem,
    w: &LengthFunction,
    phi: &[f64],
) -> Result<EdgeMaxBound> {
    check_w(model, w)?;
    if phi.len() != model.vertex_count() {
        return Err(Error::BadParams(format!(
            "phi has {} entries, expected {}",
            phi.len(),
            model.vertex_count()
        )));
    }
    for (x, &p) in phi.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::NegativePhi {
                vertex: model.graph().label(x).to_string(),
                value: p,
            });
        }
    }
    let mu = model.mu();
    let l = edge_source_wlen(model, paths, w);
    let per_edge: Vec<f64> = l
        .iter()
        .enumerate()
        .map(|(e, le)| {
            let s: f64 = le
                .iter()
                .zip(phi)
                .zip(mu)
                .map(|((&lx, &px), &mx)| lx * px * mx)
                .sum();
            2.0 * s / (model.conductance(e) * w.get(e))
        })
        .collect();
    Ok(finish(model, paths, per_edge, false))
}

/// Geometric constant K(w) for the transport-information inequality
/// W1_rho(nu, mu)^2 <= 2 K I(nu | mu).
pub fn k_constant(
    model: &ReversibleModel,
    paths: &PathSystem,
    w: &LengthFunction,
    rho: &Metric,
) -> Result<EdgeMaxBound> {
    check_w(model, w)?;
    if rho.dim() != model.vertex_count() {
        return Err(Error::BadParams(format!(
            "metric dimension {} does not match vertex count {}",
            rho.dim(),
            model.vertex_count()
        )));
    }
    let h = edge_expectation(model, paths, w, |x, y| {
        let d = rho.d(x, y);
        d * d
    });
    let per_edge: Vec<f64> = h
        .iter()
        .enumerate()
        .map(|(e, &v)| v / (model.conductance(e) * w.get(e)))
        .collect();
    Ok(finish(model, paths, per_edge, true))
}

/// Geometric constant kappa for the transport/total-variation inequality
/// W1_rho(f mu, mu) <= (kappa / 2) sum_e |D_e f| Q(e). No length function
/// enters: paths contribute visit probabilities only.
pub fn kappa_constant(
    model: &ReversibleModel,
    paths: &PathSystem,
    rho: &Metric,
) -> Result<EdgeMaxBound> {
    if rho.dim() != model.vertex_count() {
        return Err(Error::BadParams(format!(
            "metric dimension {} does not match vertex count {}",
            rho.dim(),
            model.vertex_count()
        )));
    }
    let h = edge_visit_expectation(model, paths, |x, y| rho.d(x, y));
    let per_edge: Vec<f64> = h
        .iter()
        .enumerate()
        .map(|(e, &v)| v / model.conductance(e))
        .collect();
    Ok(finish(model, paths, per_edge, true))
}

/// Degree/diameter corollary bounds valid for the graph Laplacian model
/// with unit-length geodesic paths and the graph metric.
#[derive(Debug, Clone)]
pub struct CorollaryBounds {
    /// d*^2 b D^3 / |E|, an upper bound for K (graph metric, w = 1).
    pub k_bound: f64,
    /// d*^2 b D / |E|, an upper bound for kappa (graph metric).
    pub kappa_bound: f64,
    /// Largest geodesic count through one oriented edge.
    pub b: u64,
    /// Graph diameter D.
    pub diameter: u32,
    /// Maximum degree d*.
    pub max_degree: usize,
    /// Number of oriented edges |E|.
    pub oriented_edges: usize,
}

/// Evaluates the closed-form corollary bounds; defined only for the
/// Laplacian model (q(x, y) = 1/d_x), where Q = 1/|E| exactly.
pub fn laplacian_corollary_bounds(model: &ReversibleModel) -> Result<CorollaryBounds> {
    if !model.is_laplacian() {
        return Err(Error::NotLaplacian);
    }
    let stats = degree_stats(model);
    let b = b_constant(model);
    let d = diameter(model);
    let d_star = stats.max_degree as f64;
    let e_count = stats.oriented_edge_count as f64;
    let df = d as f64;
    Ok(CorollaryBounds {
        k_bound: d_star * d_star * b as f64 * df * df * df / e_count,
        kappa_bound: d_star * d_star * b as f64 * df / e_count,
        b,
        diameter: d,
        max_degree: stats.max_degree,
        oriented_edges: stats.oriented_edge_count,
    })
}

/// Constants feeding the concentration statements: the local second moment
/// M, the transportation-entropy constant sqrt(2 K M), and the Cheeger
/// route bound kappa^2 B on the Gaussian constant.
#[derive(Debug, Clone)]
pub struct ConcentrationConstants {
    /// M = max_x (1/2) sum_{y ~ x} rho(x, y)^2 q(x, y).
    pub m: f64,
    /// sqrt(2 K M); constant of W1(nu, mu)^2 <= sqrt(2 K M) H(nu | mu).
    pub te_constant: f64,
    /// B = max_x sum_y q(x, y).
    pub b_rate: f64,
    /// kappa^2 B, an upper bound for the Gaussian constant; present when
    /// kappa was supplied.
    pub cg_cheeger: Option<f64>,
}

pub fn concentration_constants(
    model: &ReversibleModel,
    rho: &Metric,
    k_value: f64,
    kappa_value: Option<f64>,
) -> ConcentrationConstants {
    let g = model.graph();
    let mut m = 0.0f64;
    for x in 0..g.vertex_count() {
        let local: f64 = g
            .out_edges(x)
            .iter()
            .map(|&e| {
                let edge = g.edge(e);
                let d = rho.d(x, edge.to);
                d * d * edge.rate
            })
            .sum();
        m = m.max(0.5 * local);
    }
    let b_rate = degree_stats(model).max_total_rate;
    ConcentrationConstants {
        m,
        te_constant: (2.0 * k_value * m).sqrt(),
        b_rate,
        cg_cheeger: kappa_value.map(|k| k * k * b_rate),
    }
}

/// Verifies the sub-Gaussian moment bound
///
/// ```text
///     mu(exp(lambda (g - mu g))) <= exp(lambda^2 te |g|_Lip^2 / 4)
/// ```
///
/// on a grid of lambda values. Returns the pass flag and the worst
/// lhs/rhs ratio. A zero Lipschitz seminorm makes the right side 1.
pub fn mgf_check(
    model: &ReversibleModel,
    rho: &Metric,
    g: &[f64],
    lambda_grid: &[f64],
    te_constant: f64,
) -> (bool, f64) {
    let mu = model.mu();
    let g_mean = mean(model, g);
    let lip = rho.lipschitz_seminorm(g);
    let lip2 = if lip.is_finite() {
        lip * lip
    } else {
        f64::INFINITY
    };
    let mut worst: f64 = 0.0;
    for &lambda in lambda_grid {
        let lhs: f64 = g
            .iter()
            .zip(mu)
            .map(|(&gx, &mx)| mx * (lambda * (gx - g_mean)).exp())
            .sum();
        let rhs = if lip2 == 0.0 {
            1.0
        } else {
            (lambda * lambda * te_constant * lip2 / 4.0).exp()
        };
        worst = worst.max(lhs / rhs);
    }
    (worst <= 1.0 + 1e-12, worst)
}
