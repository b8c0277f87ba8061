//! Command-line front end.
//!
//! Three subcommands share a small amount of plumbing:
//!
//! * `bounds GRAPH` computes the full table of path-method bounds;
//! * `exact GRAPH --quantity ...` runs one exact oracle;
//! * `simulate --config FILE` runs the Monte Carlo concentration check.
//!
//! `GRAPH` is either a JSON file path or a `gallery:NAME:PARAMS` URI
//! (for example `gallery:complete:4`). Reports are JSON on stdout, with
//! `--out FILE` writing a copy; every report embeds a manifest with input
//! hashes, the seed, the version, and a timestamp. Two runs with the same
//! seed produce identical reports except for the timestamp.
//!
//! Exit codes: 0 success, 1 invalid input, 2 a computation failed on valid
//! input. The seed is taken from `--seed`, else the `INEQ_SEED` environment
//! variable, else a fixed default. `--threads N` caps the worker pool.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::bounds::{
    concentration_constants, k_constant, kappa_constant, laplacian_corollary_bounds, ls_bound,
    poincare_bound, symmetry::symmetry_bounds, symmetry::SymmetryAssertion, tag, weighted_poincare,
};
use crate::error::{Error, Result};
use crate::metric::{all_pairs_distance, LengthFunction, Metric};
use crate::model::{gallery, load_graph_json, Family, ReversibleModel};
use crate::oracles::{
    asymptotic_variance, cheeger_lower, entropy_info, ls_lower, spectral_cp, wasserstein1,
    LsLowerConfig, ProbabilityVector,
};
use crate::paths::PathSystem;
use crate::report::{document, BoundEntry, Json, RunManifest};
use crate::sim::{concentration_experiment, ConcentrationConfig};
use crate::wopt::{optimize_w, Objective, WoptConfig};

/// Seed used when neither `--seed` nor `INEQ_SEED` is given.
pub const DEFAULT_SEED: u64 = 17;

#[derive(Parser, Debug)]
#[command(
    name = "pathineq",
    version,
    about = "Path-method bounds, exact oracles, and concentration experiments \
             for reversible nearest-neighbor Markov processes on finite graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Random seed; overrides the INEQ_SEED environment variable.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Cap the number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the report to this file as well as stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the table of path-method bounds for a model.
    Bounds {
        /// Graph JSON file or gallery:NAME:PARAMS.
        graph: String,

        /// Metric: graph | discrete | wdist | phi:FILE.
        #[arg(long, default_value = "graph")]
        metric: String,

        /// Length function: uniform | invq | file:PATH | optimize.
        #[arg(long, default_value = "uniform")]
        w: String,

        /// Path system: geodesic | tree | file:PATH.
        #[arg(long, default_value = "geodesic")]
        paths: String,
    },

    /// Run one exact oracle on a model.
    Exact {
        /// Graph JSON file or gallery:NAME:PARAMS.
        graph: String,

        /// cp | w1 | entropy | cheeger | lslower | avar.
        #[arg(long)]
        quantity: String,

        /// Metric for w1/cheeger: graph | discrete | wdist | phi:FILE.
        #[arg(long, default_value = "graph")]
        metric: String,

        /// Measure file {label: mass} (w1, entropy).
        #[arg(long)]
        nu: Option<PathBuf>,

        /// Second measure file for w1; defaults to the stationary measure.
        #[arg(long)]
        nu2: Option<PathBuf>,

        /// Observable file {label: value} (avar).
        #[arg(long)]
        h: Option<PathBuf>,
    },

    /// Run the Monte Carlo concentration experiment described by a config.
    Simulate {
        /// JSON config: graph, g, t, r_list, trials, optional nu, cg_upper,
        /// metric, seed.
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses arguments and runs; returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, &args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                1
            } else {
                2
            }
        }
    }
}

fn resolve_seed(flag: Option<u64>, fallback: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Ok(text) = std::env::var("INEQ_SEED") {
        return text.trim().parse::<u64>().map_err(|_| {
            Error::BadParams(format!(
                "INEQ_SEED must be an unsigned integer, got {text:?}"
            ))
        });
    }
    Ok(fallback.unwrap_or(DEFAULT_SEED))
}

fn execute(cli: Cli, args: &[String]) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::BadParams("--threads must be at least 1".into()));
        }
        // Ignore the error: the global pool can only be sized once per
        // process, and a second initialization keeps the first size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let command_line = args.join(" ");
    match &cli.command {
        Command::Bounds {
            graph,
            metric,
            w,
            paths,
        } => {
            let seed = resolve_seed(cli.seed, None)?;
            let mut manifest = RunManifest::new(command_line, seed);
            cmd_bounds(
                graph,
                metric,
                w,
                paths,
                seed,
                cli.out.as_deref(),
                &mut manifest,
            )
        }
        Command::Exact {
            graph,
            quantity,
            metric,
            nu,
            nu2,
            h,
        } => {
            let seed = resolve_seed(cli.seed, None)?;
            let mut manifest = RunManifest::new(command_line, seed);
            cmd_exact(
                graph,
                quantity,
                metric,
                nu.as_deref(),
                nu2.as_deref(),
                h.as_deref(),
                seed,
                cli.out.as_deref(),
                &mut manifest,
            )
        }
        Command::Simulate { config } => {
            cmd_simulate(config, cli.seed, cli.out.as_deref(), command_line)
        }
    }
}

// ---------------------------------------------------------------- loading

fn load_model(arg: &str, manifest: &mut RunManifest) -> Result<ReversibleModel> {
    if arg.starts_with("gallery:") {
        manifest.record_input(arg, arg.as_bytes());
        let family = Family::from_uri(arg)?;
        gallery(&family)
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| Error::BadParams(format!("cannot read graph file {arg:?}: {e}")))?;
        manifest.record_input(arg, text.as_bytes());
        load_graph_json(&text)
    }
}

fn load_json_file(path: &Path, manifest: &mut RunManifest) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::BadParams(format!("cannot read {path:?}: {e}")))?;
    manifest.record_input(path.to_string_lossy(), text.as_bytes());
    Ok(serde_json::from_str(&text)?)
}

/// Reads a `{label: number}` object into a per-vertex vector; labels may be
/// omitted (value 0).
fn vertex_function(model: &ReversibleModel, value: &serde_json::Value) -> Result<Vec<f64>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::BadParams("expected an object {label: number}".into()))?;
    let mut out = vec![0.0; model.vertex_count()];
    for (label, v) in obj {
        let x = model
            .graph()
            .vertex_by_label(label)
            .ok_or_else(|| Error::UnknownVertex(label.clone()))?;
        out[x] = v
            .as_f64()
            .ok_or_else(|| Error::BadParams(format!("value for {label:?} is not a number")))?;
    }
    Ok(out)
}

fn labeled_vector(model: &ReversibleModel, values: &[f64]) -> Json {
    Json::Obj(
        values
            .iter()
            .enumerate()
            .map(|(x, &v)| (model.graph().label(x).to_string(), Json::Num(v)))
            .collect(),
    )
}

enum WMode {
    Uniform,
    InverseConductance,
    File(LengthFunction),
    Optimize,
}

impl WMode {
    fn name(&self) -> &'static str {
        match self {
            WMode::Uniform => "uniform",
            WMode::InverseConductance => "invq",
            WMode::File(_) => "file",
            WMode::Optimize => "optimize",
        }
    }

    /// The concrete length function the mode starts from.
    fn base(&self, model: &ReversibleModel) -> LengthFunction {
        match self {
            WMode::Uniform | WMode::Optimize => LengthFunction::uniform(model.graph()),
            WMode::InverseConductance => LengthFunction::inverse_conductance(model),
            WMode::File(w) => w.clone(),
        }
    }
}

fn load_w(arg: &str, model: &ReversibleModel, manifest: &mut RunManifest) -> Result<WMode> {
    match arg {
        "uniform" => Ok(WMode::Uniform),
        "invq" => Ok(WMode::InverseConductance),
        "optimize" => Ok(WMode::Optimize),
        _ => {
            let path = arg.strip_prefix("file:").ok_or_else(|| {
                Error::BadParams(format!(
                    "--w must be uniform, invq, optimize, or file:PATH; got {arg:?}"
                ))
            })?;
            let value = load_json_file(Path::new(path), manifest)?;
            let list = value.as_array().ok_or_else(|| {
                Error::BadParams("length file must be a JSON array of {u, v, w}".into())
            })?;
            let mut entries = Vec::with_capacity(list.len());
            for item in list {
                let get_label = |key: &str| -> Result<usize> {
                    let label = item
                        .get(key)
                        .and_then(|v| v.as_str())
                        .ok_or_else(|| Error::BadParams(format!("entry missing {key:?}")))?;
                    model
                        .graph()
                        .vertex_by_label(label)
                        .ok_or_else(|| Error::UnknownVertex(label.to_string()))
                };
                let u = get_label("u")?;
                let v = get_label("v")?;
                let w = item
                    .get("w")
                    .and_then(|v| v.as_f64())
                    .ok_or_else(|| Error::BadParams("entry missing numeric \"w\"".into()))?;
                entries.push((u, v, w));
            }
            Ok(WMode::File(LengthFunction::from_undirected(
                model.graph(),
                &entries,
            )?))
        }
    }
}

fn load_paths(
    arg: &str,
    model: &ReversibleModel,
    manifest: &mut RunManifest,
) -> Result<PathSystem> {
    match arg {
        "geodesic" => Ok(PathSystem::uniform_geodesic(model)),
        "tree" => PathSystem::tree_unique(model),
        _ => {
            let path = arg.strip_prefix("file:").ok_or_else(|| {
                Error::BadParams(format!(
                    "--paths must be geodesic, tree, or file:PATH; got {arg:?}"
                ))
            })?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::BadParams(format!("cannot read {path:?}: {e}")))?;
            manifest.record_input(path, text.as_bytes());
            PathSystem::explicit_from_json(model, &text)
        }
    }
}

/// The metric plus the weight vector when the metric came from `phi:FILE`.
struct MetricChoice {
    rho: Metric,
    name: String,
    phi: Option<Vec<f64>>,
}

fn load_metric(
    arg: &str,
    model: &ReversibleModel,
    base_w: &LengthFunction,
    manifest: &mut RunManifest,
) -> Result<MetricChoice> {
    match arg {
        "graph" => Ok(MetricChoice {
            rho: Metric::graph(model),
            name: "graph".into(),
            phi: None,
        }),
        "discrete" => Ok(MetricChoice {
            rho: Metric::discrete(model.vertex_count()),
            name: "discrete".into(),
            phi: None,
        }),
        "wdist" => Ok(MetricChoice {
            rho: all_pairs_distance(model, base_w),
            name: "wdist".into(),
            phi: None,
        }),
        _ => {
            let path = arg.strip_prefix("phi:").ok_or_else(|| {
                Error::BadParams(format!(
                    "--metric must be graph, discrete, wdist, or phi:FILE; got {arg:?}"
                ))
            })?;
            let value = load_json_file(Path::new(path), manifest)?;
            let phi = vertex_function(model, &value)?;
            Ok(MetricChoice {
                rho: Metric::weighted_discrete(model, &phi)?,
                name: "phi".into(),
                phi: Some(phi),
            })
        }
    }
}

fn emit(doc: &Json, out: Option<&Path>) -> Result<()> {
    let text = doc.render();
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, &text)
            .map_err(|e| Error::BadParams(format!("cannot write {path:?}: {e}")))?;
    }
    Ok(())
}

// ----------------------------------------------------------------- bounds

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    graph: &str,
    metric_arg: &str,
    w_arg: &str,
    paths_arg: &str,
    seed: u64,
    out: Option<&Path>,
    manifest: &mut RunManifest,
) -> Result<()> {
    let model = load_model(graph, manifest)?;
    let w_mode = load_w(w_arg, &model, manifest)?;
    let base_w = w_mode.base(&model);
    let metric = load_metric(metric_arg, &model, &base_w, manifest)?;
    let paths = load_paths(paths_arg, &model, manifest)?;

    let optimize = matches!(w_mode, WMode::Optimize);
    let wopt_config = WoptConfig {
        seed,
        ..WoptConfig::default()
    };
    let inputs_base = [
        ("metric", metric.name.as_str()),
        ("w", w_mode.name()),
        ("paths", paths.mode_name()),
    ];
    // Resolves a w-dependent value: either evaluate at the base w, or
    // optimize the dedicated objective and report the optimized value.
    let resolve = |objective: Objective,
                   at_base: &dyn Fn(&LengthFunction) -> Result<f64>|
     -> Result<(f64, Vec<(&'static str, String)>)> {
        if optimize {
            let r = optimize_w(&model, &paths, &objective, &wopt_config)?;
            Ok((
                r.value_best,
                vec![
                    ("sweeps", r.sweeps.to_string()),
                    ("converged", r.converged.to_string()),
                    (
                        "value_at_uniform",
                        crate::report::fmt_float(r.value_at_uniform),
                    ),
                ],
            ))
        } else {
            Ok((at_base(&base_w)?, Vec::new()))
        }
    };

    let mut entries: Vec<BoundEntry> = Vec::new();
    let mut push = |name: &str, value: f64, formula: &str, extra: &[(&str, String)]| {
        let mut inputs: Vec<(String, String)> = inputs_base
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        for (k, v) in extra {
            inputs.push((k.to_string(), v.clone()));
        }
        entries.push(BoundEntry {
            name: name.to_string(),
            value,
            formula: formula.to_string(),
            inputs,
        });
    };

    // Classical Poincare path bound: the weighted formula at w = 1/Q.
    let invq = LengthFunction::inverse_conductance(&model);
    push(
        "poincare_classical",
        poincare_bound(&model, &paths, Some(&invq))?.value,
        tag::INVERSE_CONDUCTANCE_PATH,
        &[("w_used", "invq".to_string())],
    );

    let (cp_weighted, notes) = resolve(Objective::Poincare, &|w| {
        Ok(poincare_bound(&model, &paths, Some(w))?.value)
    })?;
    push("poincare_weighted", cp_weighted, tag::WEIGHTED_PATH, &notes);

    let (ls, notes) = resolve(Objective::LogSobolev, &|w| {
        Ok(ls_bound(&model, &paths, w)?.value)
    })?;
    push("log_sobolev", ls, tag::ENTROPY_CONGESTION, &notes);

    let (k_value, notes) = resolve(Objective::KConstant(metric.rho.clone()), &|w| {
        Ok(k_constant(&model, &paths, w, &metric.rho)?.value)
    })?;
    push("k_constant", k_value, tag::WEIGHTED_PATH, &notes);

    let kappa = kappa_constant(&model, &paths, &metric.rho)?.value;
    push("kappa", kappa, tag::VISIT_CONGESTION, &[]);

    if let Some(phi) = &metric.phi {
        let (value, notes) = resolve(Objective::WeightedPoincare(phi.clone()), &|w| {
            Ok(weighted_poincare(&model, &paths, w, phi)?.value)
        })?;
        push("weighted_poincare", value, tag::WEIGHTED_MOMENT, &notes);
    }

    let cc = concentration_constants(&model, &metric.rho, k_value, Some(kappa));
    push("m_constant", cc.m, tag::TRANSPORT_ENTROPY, &[]);
    push("te_constant", cc.te_constant, tag::TRANSPORT_ENTROPY, &[]);
    push("b_rate", cc.b_rate, tag::GRAPH_STATISTIC, &[]);
    if let Some(cg) = cc.cg_cheeger {
        push("cg_cheeger", cg, tag::CHEEGER_SQUARED, &[]);
    }

    if model.is_laplacian() {
        let cor = laplacian_corollary_bounds(&model)?;
        push("k_degree_diameter", cor.k_bound, tag::DEGREE_DIAMETER, &[]);
        push(
            "kappa_degree_diameter",
            cor.kappa_bound,
            tag::DEGREE_DIAMETER,
            &[],
        );
        push("b_geodesic", cor.b as f64, tag::GRAPH_STATISTIC, &[]);
        push("diameter", cor.diameter as f64, tag::GRAPH_STATISTIC, &[]);
        push(
            "max_degree",
            cor.max_degree as f64,
            tag::GRAPH_STATISTIC,
            &[],
        );
        push(
            "oriented_edges",
            cor.oriented_edges as f64,
            tag::GRAPH_STATISTIC,
            &[],
        );

        match symmetry_bounds(&model, None, SymmetryAssertion::Verify) {
            Ok(sym) => {
                for entry in &sym.entries {
                    push(entry.name, entry.value, entry.formula, &[]);
                }
                if let Some(index) = sym.index {
                    push("index", index, tag::GRAPH_STATISTIC, &[]);
                }
                if let Some(count) = sym.automorphism_count {
                    push(
                        "automorphism_count",
                        count as f64,
                        tag::GRAPH_STATISTIC,
                        &[],
                    );
                }
            }
            // Orbit enumeration is capped; size overruns just omit the
            // symmetry entries.
            Err(Error::TooLarge { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    if let Some(path) = out {
        manifest.record_output(path.to_string_lossy());
    }
    let body = vec![
        (
            "graph",
            Json::obj([
                ("vertices", Json::Int(model.vertex_count() as i64)),
                (
                    "oriented_edges",
                    Json::Int(model.graph().edge_count() as i64),
                ),
                ("laplacian", Json::Bool(model.is_laplacian())),
            ]),
        ),
        (
            "entries",
            Json::Arr(entries.iter().map(|e| e.to_json()).collect()),
        ),
    ];
    emit(&document("bounds", body, manifest), out)
}

// ------------------------------------------------------------------ exact

#[allow(clippy::too_many_arguments)]
fn cmd_exact(
    graph: &str,
    quantity: &str,
    metric_arg: &str,
    nu: Option<&Path>,
    nu2: Option<&Path>,
    h: Option<&Path>,
    seed: u64,
    out: Option<&Path>,
    manifest: &mut RunManifest,
) -> Result<()> {
    let model = load_model(graph, manifest)?;
    let need = |path: Option<&Path>, flag: &str| -> Result<PathBuf> {
        path.map(Path::to_path_buf)
            .ok_or_else(|| Error::BadParams(format!("--quantity {quantity} needs {flag}")))
    };
    let load_measure = |path: &Path, manifest: &mut RunManifest| -> Result<ProbabilityVector> {
        let value = load_json_file(path, manifest)?;
        ProbabilityVector::from_json(&model, &value)
    };

    let mut body: Vec<(&'static str, Json)> = vec![("quantity", Json::str(quantity))];
    match quantity {
        "cp" => {
            let gap = spectral_cp(&model)?;
            body.push(("value", Json::Num(gap.c_p)));
            body.push(("lambda_1", Json::Num(gap.lambda_1)));
            body.push(("eigenfunction", labeled_vector(&model, &gap.eigenfunction)));
        }
        "w1" => {
            let base_w = LengthFunction::uniform(model.graph());
            let metric = load_metric(metric_arg, &model, &base_w, manifest)?;
            let a = load_measure(&need(nu, "--nu")?, manifest)?;
            let b = match nu2 {
                Some(p) => load_measure(p, manifest)?,
                None => ProbabilityVector::stationary(&model),
            };
            let r = wasserstein1(&metric.rho, a.as_slice(), b.as_slice())?;
            body.push(("value", Json::Num(r.value)));
            body.push(("dual_value", Json::Num(r.dual_value)));
            body.push(("pivots", Json::Int(r.pivots as i64)));
            body.push(("potential", labeled_vector(&model, &r.potential)));
            body.push(("metric", Json::str(&metric.name)));
        }
        "entropy" => {
            let a = load_measure(&need(nu, "--nu")?, manifest)?;
            let (entropy, information) = entropy_info(&model, &a)?;
            body.push(("entropy", Json::Num(entropy)));
            body.push(("information", Json::Num(information)));
        }
        "cheeger" => {
            let base_w = LengthFunction::uniform(model.graph());
            let metric = load_metric(metric_arg, &model, &base_w, manifest)?;
            let r = cheeger_lower(&model, &metric.rho)?;
            body.push(("value", Json::Num(r.value)));
            body.push((
                "subset",
                Json::Arr(
                    r.subset
                        .iter()
                        .map(|&x| Json::str(model.graph().label(x)))
                        .collect(),
                ),
            ));
            body.push(("metric", Json::str(&metric.name)));
        }
        "lslower" => {
            let config = LsLowerConfig {
                seed,
                ..LsLowerConfig::default()
            };
            let r = ls_lower(&model, &config)?;
            body.push(("value", Json::Num(r.value)));
            body.push(("witness", labeled_vector(&model, &r.witness)));
        }
        "avar" => {
            let value = load_json_file(&need(h, "--h")?, manifest)?;
            let hv = vertex_function(&model, &value)?;
            body.push(("value", Json::Num(asymptotic_variance(&model, &hv)?)));
        }
        _ => {
            return Err(Error::BadParams(format!(
                "unknown quantity {quantity:?}; expected cp, w1, entropy, cheeger, lslower, or avar"
            )));
        }
    }

    if let Some(path) = out {
        manifest.record_output(path.to_string_lossy());
    }
    emit(&document("exact", body, manifest), out)
}

// --------------------------------------------------------------- simulate

fn cmd_simulate(
    config_path: &Path,
    seed_flag: Option<u64>,
    out: Option<&Path>,
    command_line: String,
) -> Result<()> {
    // The manifest seed is resolved after reading the config, which may
    // supply a default; build the manifest first so the config hash is
    // recorded, then fix the seed.
    let mut manifest = RunManifest::new(command_line, DEFAULT_SEED);
    let config = load_json_file(config_path, &mut manifest)?;
    let obj = config
        .as_object()
        .ok_or_else(|| Error::BadParams("config must be a JSON object".into()))?;

    let graph_arg = obj
        .get("graph")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::BadParams("config needs a \"graph\" string".into()))?;
    let model = load_model(graph_arg, &mut manifest)?;

    let g = vertex_function(
        &model,
        obj.get("g")
            .ok_or_else(|| Error::BadParams("config needs a \"g\" object".into()))?,
    )?;
    let t = obj
        .get("t")
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::BadParams("config needs a numeric \"t\"".into()))?;
    let r_list: Vec<f64> = obj
        .get("r_list")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::BadParams("config needs an \"r_list\" array".into()))?
        .iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::BadParams("r_list entries must be numbers".into()))
        })
        .collect::<Result<_>>()?;
    let trials = obj
        .get("trials")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::BadParams("config needs an integer \"trials\"".into()))?
        as usize;
    let nu = match obj.get("nu") {
        Some(v) => Some(ProbabilityVector::from_json(&model, v)?),
        None => None,
    };
    let config_seed = obj.get("seed").and_then(|v| v.as_u64());
    let seed = resolve_seed(seed_flag, config_seed)?;
    manifest.seed = seed;

    let metric_arg = obj
        .get("metric")
        .and_then(|v| v.as_str())
        .unwrap_or("graph");
    let base_w = LengthFunction::uniform(model.graph());
    let metric = load_metric(metric_arg, &model, &base_w, &mut manifest)?;

    // The transport constant defaults to the K bound at w = 1 over uniform
    // geodesics in the experiment's metric.
    let (cg_upper, cg_source) = match obj.get("cg_upper").and_then(|v| v.as_f64()) {
        Some(v) => (v, "config"),
        None => {
            let paths = PathSystem::uniform_geodesic(&model);
            let k = k_constant(&model, &paths, &base_w, &metric.rho)?.value;
            (k, "k-constant")
        }
    };

    let sim_config = ConcentrationConfig {
        t,
        r_list,
        trials,
        cg_upper,
        seed,
    };
    let reports = concentration_experiment(&model, nu.as_ref(), &g, &metric.rho, &sim_config)?;

    if let Some(path) = out {
        manifest.record_output(path.to_string_lossy());
    }
    let body = vec![
        ("graph", Json::str(graph_arg)),
        ("t", Json::Num(t)),
        ("trials", Json::Int(trials as i64)),
        ("cg_upper", Json::Num(cg_upper)),
        ("cg_source", Json::str(cg_source)),
        ("metric", Json::str(&metric.name)),
        (
            "density_norm",
            Json::Num(reports.first().map_or(1.0, |r| r.density_norm)),
        ),
        (
            "g_lipschitz",
            Json::Num(reports.first().map_or(0.0, |r| r.lipschitz)),
        ),
        (
            "results",
            Json::Arr(
                reports
                    .iter()
                    .map(|r| {
                        Json::obj([
                            ("r", Json::Num(r.r)),
                            ("tail_frequency", Json::Num(r.tail_frequency)),
                            ("bound", Json::Num(r.bound)),
                            ("pass", Json::Bool(r.pass)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ];
    emit(&document("simulate", body, &manifest), out)
}
