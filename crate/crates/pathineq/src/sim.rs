//! Continuous-time simulation of the reversible process and empirical
//! checks of the Gaussian concentration bound for time averages.
//!
//! Trajectories use the jump-chain construction: at vertex x the process
//! waits an exponential time with rate R(x) = sum_y q(x, y), then jumps to
//! a neighbor y with probability q(x, y) / R(x). Time integrals along a
//! trajectory are exact sums of g(x) * (interval length) over the holding
//! intervals, with no quadrature error.
//!
//! The concentration experiment estimates
//!     P_nu( (1/t) int_0^t g(X_s) ds  >  mu(g) + r )
//! by Monte Carlo and compares it to the theoretical tail
//!     ||d nu / d mu||_{L2(mu)} * exp( - t r^2 / (2 c ||g||_Lip^2) ),
//! where c is a Gaussian-transport upper constant supplied by the caller.
//! Monte Carlo noise must not produce false failures, so a run passes when
//! the empirical frequency is at most the bound plus three binomial
//! standard errors.
//!
//! All randomness comes from the ChaCha8 stream cipher; trial i of a run
//! with master seed s uses the seed-s generator on stream i + 1, so runs
//! are reproducible and trials are independent and embarrassingly parallel.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::model::ReversibleModel;
use crate::oracles::{mean, ProbabilityVector};

/// Where a trajectory starts.
#[derive(Debug, Clone)]
pub enum Start {
    /// A fixed vertex.
    Vertex(usize),
    /// A draw from the given distribution.
    Distribution(ProbabilityVector),
}

/// One sampled path of the process on [0, horizon].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// State at time 0.
    pub initial: usize,
    /// (jump time, new state), strictly increasing times within the horizon.
    pub jumps: Vec<(f64, usize)>,
    /// End of the observation window.
    pub horizon: f64,
}

impl Trajectory {
    /// Exact time integral (1/horizon) * int_0^horizon g(X_s) ds.
    ///
    /// For a zero horizon this is g at the initial state (the limit of the
    /// average as the window shrinks).
    pub fn time_average(&self, g: &[f64]) -> f64 {
        if self.horizon == 0.0 {
            return g[self.initial];
        }
        let mut total = 0.0;
        let mut state = self.initial;
        let mut clock = 0.0;
        for &(when, next) in &self.jumps {
            total += g[state] * (when - clock);
            clock = when;
            state = next;
        }
        total += g[state] * (self.horizon - clock);
        total / self.horizon
    }
}

fn sample_from(nu: &ProbabilityVector, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let weights = nu.as_slice();
    let mut cumulative = 0.0;
    for (x, &p) in weights.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return x;
        }
    }
    // Rounding can leave the cumulative sum a hair below 1; the draw then
    // belongs to the last state of positive mass.
    weights
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("a probability vector has positive mass")
}

fn check_start(model: &ReversibleModel, start: &Start) -> Result<()> {
    match start {
        Start::Vertex(x) => {
            if *x >= model.vertex_count() {
                return Err(Error::BadParams(format!(
                    "start vertex {x} outside 0..{}",
                    model.vertex_count()
                )));
            }
        }
        Start::Distribution(nu) => {
            if nu.len() != model.vertex_count() {
                return Err(Error::BadMeasure(format!(
                    "start distribution has {} entries, expected {}",
                    nu.len(),
                    model.vertex_count()
                )));
            }
        }
    }
    Ok(())
}

fn run_trajectory(
    model: &ReversibleModel,
    start: &Start,
    horizon: f64,
    rng: &mut ChaCha8Rng,
) -> Trajectory {
    let g = model.graph();
    let initial = match start {
        Start::Vertex(x) => *x,
        Start::Distribution(nu) => sample_from(nu, rng),
    };
    let mut jumps = Vec::new();
    let mut state = initial;
    let mut clock = 0.0;
    while clock < horizon {
        let exits = g.out_edges(state);
        let total_rate: f64 = exits.iter().map(|&e| model.rate(e)).sum();
        let mut wait = 0.0;
        while wait == 0.0 {
            let u: f64 = rng.random();
            wait = -(1.0 - u).ln() / total_rate;
        }
        clock += wait;
        if clock >= horizon {
            break;
        }
        let mut pick: f64 = rng.random::<f64>() * total_rate;
        let mut next = g.edge(*exits.last().expect("connected graph, so exits")).to;
        for &e in exits {
            pick -= model.rate(e);
            if pick < 0.0 {
                next = g.edge(e).to;
                break;
            }
        }
        jumps.push((clock, next));
        state = next;
    }
    Trajectory {
        initial,
        jumps,
        horizon,
    }
}

/// Samples one trajectory on [0, horizon], reproducibly from the seed.
///
/// A zero horizon yields an empty jump list.
pub fn simulate(
    model: &ReversibleModel,
    start: &Start,
    horizon: f64,
    seed: u64,
) -> Result<Trajectory> {
    if horizon < 0.0 || !horizon.is_finite() {
        return Err(Error::BadParams(format!("horizon {horizon} invalid")));
    }
    check_start(model, start)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(run_trajectory(model, start, horizon, &mut rng))
}

/// Configuration of a tail-frequency experiment.
#[derive(Debug, Clone)]
pub struct ConcentrationConfig {
    /// Averaging window t.
    pub t: f64,
    /// Deviations r to test (each >= 0).
    pub r_list: Vec<f64>,
    /// Monte Carlo sample size (>= 1).
    pub trials: usize,
    /// Upper estimate of the Gaussian-transport constant.
    pub cg_upper: f64,
    /// Master seed; trial i runs on stream i + 1.
    pub seed: u64,
}

/// Outcome of the experiment at one deviation r.
#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub t: f64,
    pub r: f64,
    pub trials: usize,
    /// Fraction of trials with time average above mu(g) + r.
    pub tail_frequency: f64,
    /// Theoretical tail: density norm times exp(-t r^2 / (2 c lip^2)).
    pub bound: f64,
    /// L2(mu) norm of the density of the start distribution.
    pub density_norm: f64,
    /// Lipschitz seminorm of g in the experiment's metric.
    pub lipschitz: f64,
    /// True when tail_frequency <= bound + 3 binomial standard errors.
    pub pass: bool,
}

/// Runs the Monte Carlo tail check; one report per entry of `r_list`.
///
/// `nu` of `None` starts trials from the stationary measure (density norm
/// one). The comparison bound uses the Lipschitz seminorm of `g` in `rho`.
pub fn concentration_experiment(
    model: &ReversibleModel,
    nu: Option<&ProbabilityVector>,
    g: &[f64],
    rho: &Metric,
    config: &ConcentrationConfig,
) -> Result<Vec<ConcentrationReport>> {
    if config.trials == 0 {
        return Err(Error::BadParams("trials must be at least 1".into()));
    }
    if config.t <= 0.0 || !config.t.is_finite() {
        return Err(Error::BadParams(format!("window t = {} invalid", config.t)));
    }
    if config.cg_upper <= 0.0 || !config.cg_upper.is_finite() {
        return Err(Error::BadParams(format!(
            "transport constant {} invalid",
            config.cg_upper
        )));
    }
    for &r in &config.r_list {
        if r < 0.0 || !r.is_finite() {
            return Err(Error::BadParams(format!("deviation r = {r} invalid")));
        }
    }
    if g.len() != model.vertex_count() {
        return Err(Error::BadParams(format!(
            "g has {} entries, expected {}",
            g.len(),
            model.vertex_count()
        )));
    }
    if rho.dim() != model.vertex_count() {
        return Err(Error::BadParams(format!(
            "metric dimension {} does not match vertex count {}",
            rho.dim(),
            model.vertex_count()
        )));
    }
    let start = match nu {
        Some(v) => {
            if v.len() != model.vertex_count() {
                return Err(Error::BadMeasure(format!(
                    "start distribution has {} entries, expected {}",
                    v.len(),
                    model.vertex_count()
                )));
            }
            Start::Distribution(v.clone())
        }
        None => Start::Distribution(ProbabilityVector::stationary(model)),
    };
    let density_norm = match nu {
        None => 1.0,
        Some(v) => v
            .as_slice()
            .iter()
            .zip(model.mu())
            .map(|(&n, &m)| n * n / m)
            .sum::<f64>()
            .sqrt(),
    };
    let lipschitz = rho.lipschitz_seminorm(g);
    let mean_g = mean(model, g);

    let averages: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial as u64 + 1);
            run_trajectory(model, &start, config.t, &mut rng).time_average(g)
        })
        .collect();

    let n = config.trials as f64;
    let reports = config
        .r_list
        .iter()
        .map(|&r| {
            let hits = averages.iter().filter(|&&a| a > mean_g + r).count();
            let tail_frequency = hits as f64 / n;
            let exponent = if r == 0.0 {
                0.0
            } else {
                config.t * r * r / (2.0 * config.cg_upper * lipschitz * lipschitz)
            };
            let bound = density_norm * (-exponent).exp();
            let slack = 3.0 * (tail_frequency * (1.0 - tail_frequency) / n).sqrt();
            ConcentrationReport {
                t: config.t,
                r,
                trials: config.trials,
                tail_frequency,
                bound,
                density_norm,
                lipschitz,
                pass: tail_frequency <= bound + slack,
            }
        })
        .collect();
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gallery, Family};
    use crate::oracles::{asymptotic_variance, variance};

    #[test]
    fn zero_horizon_has_no_jumps() {
        let m = gallery(&Family::Complete(3)).unwrap();
        let t = simulate(&m, &Start::Vertex(1), 0.0, 7).unwrap();
        assert_eq!(t.initial, 1);
        assert!(t.jumps.is_empty());
        assert_eq!(t.time_average(&[5.0, 9.0, 2.0]), 9.0);
    }

    #[test]
    fn trajectories_are_valid_and_reproducible() {
        let m = gallery(&Family::Cycle(5)).unwrap();
        let a = simulate(&m, &Start::Vertex(0), 30.0, 1234).unwrap();
        let b = simulate(&m, &Start::Vertex(0), 30.0, 1234).unwrap();
        assert_eq!(a, b);
        assert!(!a.jumps.is_empty());
        let mut prev_t = 0.0;
        let mut prev_x = a.initial;
        for &(when, x) in &a.jumps {
            assert!(when > prev_t && when <= a.horizon);
            assert!(m.graph().edge_id(prev_x, x).is_some(), "non-adjacent jump");
            prev_t = when;
            prev_x = x;
        }
        let c = simulate(&m, &Start::Vertex(0), 30.0, 1235).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn two_point_occupation_matches_stationary_measure() {
        let m = gallery(&Family::Path { n: 2, rates: None }).unwrap();
        let g = [1.0, 0.0];
        let trials = 400;
        let mut samples = Vec::with_capacity(trials);
        for i in 0..trials {
            let t = simulate(&m, &Start::Vertex(0), 50.0, 9000 + i as u64).unwrap();
            samples.push(t.time_average(&g));
        }
        let n = trials as f64;
        let mean_hat: f64 = samples.iter().sum::<f64>() / n;
        let var_hat: f64 = samples
            .iter()
            .map(|a| (a - mean_hat) * (a - mean_hat))
            .sum::<f64>()
            / (n - 1.0);
        let se = (var_hat / n).sqrt();
        assert!(
            (mean_hat - 0.5).abs() <= 3.0 * se,
            "occupation {mean_hat} vs 1/2, se {se}"
        );
    }

    #[test]
    fn eigenfunction_time_average_variance_matches_the_oracle() {
        // On the complete graph every centered function is an
        // eigenfunction; the long-run variance of sqrt(t) times the time
        // average should be within a factor two of the exact asymptotic
        // variance.
        let m = gallery(&Family::Complete(3)).unwrap();
        let h = vec![1.0 - 1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        let sigma2 = asymptotic_variance(&m, &h).unwrap();
        let t = 200.0;
        let trials = 600usize;
        let cfg = ConcentrationConfig {
            t,
            r_list: vec![],
            trials,
            cg_upper: 1.0,
            seed: 31,
        };
        let start = Start::Distribution(ProbabilityVector::stationary(&m));
        let averages: Vec<f64> = (0..cfg.trials)
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(trial as u64 + 1);
                run_trajectory(&m, &start, t, &mut rng).time_average(&h)
            })
            .collect();
        let n = trials as f64;
        let mean_hat: f64 = averages.iter().sum::<f64>() / n;
        let var_hat: f64 = averages
            .iter()
            .map(|a| (a - mean_hat) * (a - mean_hat))
            .sum::<f64>()
            / (n - 1.0)
            * t;
        assert!(
            var_hat >= sigma2 / 2.0 && var_hat <= sigma2 * 2.0,
            "scaled variance {var_hat} vs sigma^2 {sigma2}"
        );
        // Sanity anchor for the oracle itself: sigma^2 = 2 Var(h) / lambda.
        let expected = 2.0 * variance(&m, &h) / 1.5;
        assert!((sigma2 - expected).abs() <= 1e-10);
    }

    #[test]
    fn concentration_passes_on_the_complete_graph() {
        let m = gallery(&Family::Complete(3)).unwrap();
        let g = vec![2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        let rho = Metric::graph(&m);
        let cfg = ConcentrationConfig {
            t: 50.0,
            r_list: vec![0.1, 0.2, 0.4, 10.0],
            trials: 2000,
            cg_upper: 2.0 / 3.0,
            seed: 4242,
        };
        let reports = concentration_experiment(&m, None, &g, &rho, &cfg).unwrap();
        assert_eq!(reports.len(), 4);
        for rep in &reports {
            assert!(rep.pass, "failed at r = {}: {:?}", rep.r, rep);
            assert!((0.0..=1.0).contains(&rep.tail_frequency));
            assert!((rep.density_norm - 1.0).abs() <= 1e-12);
        }
        // r far beyond the range of g makes the frequency exactly zero and
        // the bound tiny but positive.
        assert_eq!(reports[3].tail_frequency, 0.0);
        // The experiment is reproducible.
        let again = concentration_experiment(&m, None, &g, &rho, &cfg).unwrap();
        assert_eq!(reports[1].tail_frequency, again[1].tail_frequency);
    }

    #[test]
    fn leaf_start_density_norm_is_sqrt_six() {
        let m = gallery(&Family::Star(3)).unwrap();
        let leaf = m.graph().vertex_by_label("v1").unwrap();
        let nu = ProbabilityVector::point_mass(m.vertex_count(), leaf).unwrap();
        let g = vec![0.0, 1.0, 0.0, 0.0];
        let rho = Metric::graph(&m);
        let cfg = ConcentrationConfig {
            t: 20.0,
            r_list: vec![0.3],
            trials: 500,
            cg_upper: 2.0,
            seed: 7,
        };
        let reports = concentration_experiment(&m, Some(&nu), &g, &rho, &cfg).unwrap();
        assert!((reports[0].density_norm - 6f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn zero_trials_rejected() {
        let m = gallery(&Family::Complete(3)).unwrap();
        let rho = Metric::graph(&m);
        let cfg = ConcentrationConfig {
            t: 1.0,
            r_list: vec![0.1],
            trials: 0,
            cg_upper: 1.0,
            seed: 1,
        };
        let err = concentration_experiment(&m, None, &[0.0; 3], &rho, &cfg).unwrap_err();
        assert!(matches!(err, Error::BadParams(_)));
        assert!(err.is_input_error());
    }
}
