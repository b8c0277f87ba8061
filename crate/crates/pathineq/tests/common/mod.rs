//! Shared helpers for the integration suites: seeded random reversible
//! models, random functions and measures, and small numeric utilities.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use pathineq::model::{build_model, RateGraph, ReversibleModel};
use pathineq::oracles::ProbabilityVector;

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// LHS <= RHS up to absolute-and-relative slack.
pub fn leq(lhs: f64, rhs: f64, slack: f64) -> bool {
    lhs <= rhs + slack * rhs.abs().max(1.0)
}

/// A random connected reversible model with 2..=max_vertices vertices:
/// a random spanning tree plus random chords, with rates q(x, y) = s(xy) /
/// m(x) for symmetric edge weights s and vertex weights m, which satisfies
/// detailed balance with stationary measure proportional to m.
pub fn random_model(rng: &mut ChaCha8Rng, max_vertices: usize) -> ReversibleModel {
    let n = rng.random_range(2..=max_vertices);
    let m: Vec<f64> = (0..n).map(|_| 0.2 + 1.8 * rng.random::<f64>()).collect();

    let mut undirected: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        undirected.push((u, v));
    }
    let chords = rng.random_range(0..=n);
    for _ in 0..chords {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if !undirected.contains(&key) {
            undirected.push(key);
        }
    }

    let mut oriented = Vec::with_capacity(2 * undirected.len());
    for &(u, v) in &undirected {
        let s = 0.5 + 1.5 * rng.random::<f64>();
        oriented.push((u, v, s / m[u]));
        oriented.push((v, u, s / m[v]));
    }
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    build_model(RateGraph::new(labels, &oriented).expect("valid random graph"))
        .expect("random model is reversible by construction")
}

/// A random function with entries in [-2, 2).
pub fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect()
}

/// A random nonnegative function with entries in [0, 2).
pub fn random_nonnegative(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.random::<f64>()).collect()
}

/// A random probability vector; occasionally sparse (some zero entries) to
/// exercise boundary cases, but never all-zero.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> ProbabilityVector {
    let sparse = rng.random::<f64>() < 0.3;
    let mut weights: Vec<f64> = (0..n)
        .map(|_| {
            if sparse && rng.random::<f64>() < 0.4 {
                0.0
            } else {
                0.05 + rng.random::<f64>()
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        weights[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    // Renormalize exactly enough for the validator.
    let sum: f64 = weights.iter().sum();
    weights[n - 1] += 1.0 - sum;
    if weights[n - 1] < 0.0 {
        weights[n - 1] = 0.0;
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
    ProbabilityVector::new(weights).expect("normalized weights form a measure")
}

/// The density f = d nu / d mu of a random measure, so f mu is a
/// probability measure.
pub fn random_density(rng: &mut ChaCha8Rng, model: &ReversibleModel) -> Vec<f64> {
    let nu = random_measure(rng, model.vertex_count());
    nu.as_slice()
        .iter()
        .zip(model.mu())
        .map(|(&n, &m)| n / m)
        .collect()
}
