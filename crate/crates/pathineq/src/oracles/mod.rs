//! Exact reference quantities computed without path arguments.
//!
//! Everything here is either a direct finite-dimensional computation
//! (Dirichlet forms, entropies, spectra, linear solves, transportation
//! simplex) or an exhaustive/certified search (subset enumeration for the
//! Cheeger-type constant, ascent whose output is re-evaluated before being
//! reported). These serve as ground truth against the path-method upper
//! bounds.

pub mod lslower;
pub mod spectral;
pub mod transport;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::model::ReversibleModel;
pub use lslower::{ls_lower, ls_ratio, LsLower, LsLowerConfig};
pub use spectral::{asymptotic_variance, spectral_cp, SpectralGap};
pub use transport::{wasserstein1, W1Result};

/// Largest vertex count for which subset enumeration is attempted.
const CHEEGER_MAX_VERTICES: usize = 20;

/// Dirichlet form E(f, g) = (1/2) sum_e D_e f D_e g Q(e) over oriented
/// edges; pass None for g to get the energy E(f, f).
pub fn dirichlet(model: &ReversibleModel, f: &[f64], g: Option<&[f64]>) -> f64 {
    let graph = model.graph();
    let mut total = 0.0;
    for (eid, e) in graph.edges().iter().enumerate() {
        let df = f[e.to] - f[e.from];
        let dg = match g {
            Some(g) => g[e.to] - g[e.from],
            None => df,
        };
        total += df * dg * model.conductance(eid);
    }
    0.5 * total
}

/// Stationary mean mu(f).
pub fn mean(model: &ReversibleModel, f: &[f64]) -> f64 {
    f.iter().zip(model.mu()).map(|(&v, &m)| v * m).sum()
}

/// Stationary variance Var_mu(f).
pub fn variance(model: &ReversibleModel, f: &[f64]) -> f64 {
    let m = mean(model, f);
    f.iter()
        .zip(model.mu())
        .map(|(&v, &w)| (v - m) * (v - m) * w)
        .sum()
}

/// Entropy Ent_mu(g) = mu(g log g) - mu(g) log mu(g) for g >= 0, with the
/// convention 0 log 0 = 0.
pub fn ent_mu(model: &ReversibleModel, g: &[f64]) -> f64 {
    let mu = model.mu();
    let mut g_log_g = 0.0;
    let mut g_mean = 0.0;
    for (&v, &m) in g.iter().zip(mu) {
        debug_assert!(v >= 0.0, "entropy needs a nonnegative function");
        g_mean += v * m;
        if v > 0.0 {
            g_log_g += v * v.ln() * m;
        }
    }
    if g_mean <= 0.0 {
        return 0.0;
    }
    g_log_g - g_mean * g_mean.ln()
}

/// Ent_mu(f^2), the numerator of the log-Sobolev ratio.
pub fn entropy_of_square(model: &ReversibleModel, f: &[f64]) -> f64 {
    let squares: Vec<f64> = f.iter().map(|&v| v * v).collect();
    ent_mu(model, &squares)
}

/// A mu-median of f: a value m with mu(f < m) <= 1/2 and mu(f > m) <= 1/2.
/// Returns the smallest attained value with cumulative mass >= 1/2.
pub fn median(model: &ReversibleModel, f: &[f64]) -> f64 {
    let mu = model.mu();
    let mut pairs: Vec<(f64, f64)> = f.iter().copied().zip(mu.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut cum = 0.0;
    for &(value, weight) in &pairs {
        cum += weight;
        if cum >= 0.5 {
            return value;
        }
    }
    pairs.last().map(|p| p.0).unwrap_or(0.0)
}

/// A validated probability vector on the vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    /// Checks nonnegativity and total mass one (within 1e-9).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let mut total = 0.0;
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadMeasure(format!("measure entry {v}")));
            }
            total += v;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::BadMeasure(format!(
                "measure sums to {total}, expected 1"
            )));
        }
        Ok(ProbabilityVector(values))
    }

    /// The unit mass at one vertex.
    pub fn point_mass(n: usize, x: usize) -> Result<Self> {
        if x >= n {
            return Err(Error::BadMeasure(format!(
                "point mass at vertex {x} outside 0..{n}"
            )));
        }
        let mut v = vec![0.0; n];
        v[x] = 1.0;
        Ok(ProbabilityVector(v))
    }

    /// The stationary measure of the model.
    pub fn stationary(model: &ReversibleModel) -> Self {
        ProbabilityVector(model.mu().to_vec())
    }

    /// Parses `{"label": mass, ...}`; labels not listed get mass zero.
    pub fn from_json(model: &ReversibleModel, value: &serde_json::Value) -> Result<Self> {
        let map: BTreeMap<String, f64> = serde_json::from_value(value.clone())
            .map_err(|e| Error::BadMeasure(format!("measure object: {e}")))?;
        let mut v = vec![0.0; model.vertex_count()];
        for (label, mass) in map {
            let x = model
                .graph()
                .vertex_by_label(&label)
                .ok_or_else(|| Error::UnknownVertex(label.clone()))?;
            v[x] = mass;
        }
        ProbabilityVector::new(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Relative entropy H(nu | mu) and Fisher-type information
/// I(nu | mu) = (1/2) sum_e (D_e sqrt(nu/mu))^2 Q(e).
///
/// H is finite only when nu is absolutely continuous with respect to mu;
/// mu is strictly positive here, so both are always finite.
pub fn entropy_info(model: &ReversibleModel, nu: &ProbabilityVector) -> Result<(f64, f64)> {
    let n = model.vertex_count();
    if nu.len() != n {
        return Err(Error::BadMeasure(format!(
            "measure has {} entries, expected {n}",
            nu.len()
        )));
    }
    let mu = model.mu();
    let nu = nu.as_slice();
    let mut h = 0.0;
    for x in 0..n {
        if nu[x] > 0.0 {
            h += nu[x] * (nu[x] / mu[x]).ln();
        }
    }
    let sqrt_density: Vec<f64> = (0..n).map(|x| (nu[x] / mu[x]).sqrt()).collect();
    let i = dirichlet(model, &sqrt_density, None);
    Ok((h, i))
}

/// Certified lower bound for the metric-Cheeger constant by exhausting
/// indicator witnesses.
#[derive(Debug, Clone)]
pub struct CheegerLower {
    /// max over nonempty proper A of W1(mu(.|A), mu) mu(A) / Q(boundary A).
    pub value: f64,
    /// Vertex set attaining the maximum.
    pub subset: Vec<usize>,
}

/// Evaluates, for every nonempty proper subset A, the ratio
///
/// ```text
///     2 W1(f_A mu, mu) / sum_e |D_e f_A| Q(e),     f_A = 1_A / mu(A),
/// ```
///
/// which simplifies to W1(mu(.|A), mu) mu(A) / Q(dA) with Q(dA) the total
/// conductance leaving A. Every ratio is a valid lower bound for the best
/// constant in the W1-versus-total-variation-energy inequality; the
/// maximum over this witness family is returned.
///
/// Enumeration is exponential: graphs beyond 20 vertices are rejected. For
/// the discrete metric the ratio is invariant under complementation, so
/// only subsets containing vertex 0 are visited.
pub fn cheeger_lower(model: &ReversibleModel, metric: &Metric) -> Result<CheegerLower> {
    let g = model.graph();
    let n = g.vertex_count();
    if n > CHEEGER_MAX_VERTICES {
        return Err(Error::TooLarge {
            what: "vertex count for subset enumeration",
            limit: CHEEGER_MAX_VERTICES,
            got: n,
        });
    }
    if metric.dim() != n {
        return Err(Error::BadParams(format!(
            "metric dimension {} does not match vertex count {n}",
            metric.dim()
        )));
    }
    let mu = model.mu();
    let complement_symmetric = matches!(metric.kind(), crate::metric::MetricKind::Discrete);

    let mut best = f64::NEG_INFINITY;
    let mut best_mask: u32 = 0;
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for mask in 1..full {
        if complement_symmetric && mask & 1 == 0 {
            continue;
        }
        let mu_a: f64 = (0..n).filter(|&x| mask >> x & 1 == 1).map(|x| mu[x]).sum();
        let mut boundary = 0.0;
        for (eid, e) in g.edges().iter().enumerate() {
            if mask >> e.from & 1 == 1 && mask >> e.to & 1 == 0 {
                boundary += model.conductance(eid);
            }
        }
        if boundary <= 0.0 {
            continue;
        }
        let nu_a: Vec<f64> = (0..n)
            .map(|x| {
                if mask >> x & 1 == 1 {
                    mu[x] / mu_a
                } else {
                    0.0
                }
            })
            .collect();
        let w1 = wasserstein1(metric, &nu_a, mu)?.value;
        let ratio = w1 * mu_a / boundary;
        if ratio > best {
            best = ratio;
            best_mask = mask;
        }
    }
    Ok(CheegerLower {
        value: best,
        subset: (0..n).filter(|&x| best_mask >> x & 1 == 1).collect(),
    })
}
