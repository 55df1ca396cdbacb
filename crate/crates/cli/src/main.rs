//! `expander`: build, verify and benchmark expander-graph designs.
//!
//! Exit status: 0 when every asserted check passes, 1 when a check fails,
//! 2 on usage or input errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use expander_core::experiment::{
    mvse_sweep, ols_oracle_comparison, oracle_factors, run_dantzig_experiment, run_lasso_experiment,
    run_recovery_experiment, DesignSource, Estimator, ExperimentConfig, Manifest, MvseConfig,
};
use expander_core::field::FieldSpec;
use expander_core::graph::{pv_expander, random_left_regular};
use expander_core::nalgebra::DMatrix;
use expander_core::noise::{empirical_noise_bound, Correlation, NoiseModel};
use expander_core::solve::{basis_pursuit, dantzig, lasso, ols_on_support};
use expander_core::verify::{
    check_expansion_exhaustive, check_expansion_sampled, check_h_condition_sampled, check_kernel_concentration,
    check_rip1_sampled, check_up2_sampled, nullspace_property_oracle, search_random_expander, ExpansionCertificate,
    VerificationReport,
};
use expander_core::{BipartiteGraph, Design, DesignMatrix, Error};

#[derive(Parser)]
#[command(name = "expander", version, about = "Expander-graph designs for sparse regression")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when absent). The manifest goes to `<out>.manifest.json`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph.
    #[command(subcommand)]
    Construct(Construct),
    /// Check a graph or its design against a condition.
    Verify(VerifyArgs),
    /// Solve one estimation problem from a JSON file.
    Solve {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Run an experiment.
    #[command(subcommand)]
    Bench(Bench),
    /// Monte Carlo check of the noise bound P(||X^T z||_inf <= Lambda_t).
    NoiseCheck(NoiseArgs),
}

#[derive(Subcommand)]
enum Construct {
    /// Code-based construction over GF(q).
    Pv {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        h: u64,
    },
    /// Uniformly random left-regular graph (uses --seed).
    Random {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
    /// Search random graphs for one passing the exhaustive expansion check.
    Search {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0.125)]
        eps: f64,
        /// Seeds tried per right size.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Exhaustive,
    Sampled,
    Rip1,
    Up2,
    HCondition,
    Kernel,
    Nsp,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 0.125)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
}

#[derive(Subcommand)]
enum Bench {
    Lasso {
        #[arg(long)]
        config: PathBuf,
    },
    Dantzig {
        #[arg(long)]
        config: PathBuf,
    },
    /// Exact recovery; the design must pass the exhaustive (2s, 1/8) check.
    Recovery {
        #[arg(long)]
        config: PathBuf,
    },
    Ols {
        #[arg(long)]
        config: PathBuf,
    },
    /// Selection-error sweep (config fields default when omitted).
    Mvse {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    Factors {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 8.0)]
        theta: f64,
    },
}

#[derive(Args, Serialize)]
struct NoiseArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// `iid` or `ar1:RHO`.
    #[arg(long, default_value = "iid")]
    model: String,
    /// Design graph; the n x n identity when absent.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ProblemKind {
    Lasso,
    Dantzig,
    BasisPursuit,
    Ols,
}

/// Input of `solve`: a design (graph source or dense row-major matrix) and
/// the observations.
#[derive(Deserialize)]
struct Problem {
    estimator: ProblemKind,
    #[serde(default)]
    design: Option<DesignSource>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
    y: Vec<f64>,
    #[serde(default)]
    lambda: Option<f64>,
    #[serde(default)]
    support: Option<Vec<usize>>,
}

/// What a command produced.
struct Outcome {
    passed: bool,
    json: Value,
    csv: Option<String>,
    parameters: Value,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precondition(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = Result<Outcome, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match execute(&cli).and_then(|o| emit(&cli, &name, o)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Construct(Construct::Pv { .. }) => "construct pv",
        Command::Construct(Construct::Random { .. }) => "construct random",
        Command::Construct(Construct::Search { .. }) => "construct search",
        Command::Verify(_) => "verify",
        Command::Solve { .. } => "solve",
        Command::Bench(Bench::Lasso { .. }) => "bench lasso",
        Command::Bench(Bench::Dantzig { .. }) => "bench dantzig",
        Command::Bench(Bench::Recovery { .. }) => "bench recovery",
        Command::Bench(Bench::Ols { .. }) => "bench ols",
        Command::Bench(Bench::Mvse { .. }) => "bench mvse",
        Command::Bench(Bench::Factors { .. }) => "bench factors",
        Command::NoiseCheck(_) => "noise-check",
    }
    .into()
}

fn execute(cli: &Cli) -> Run {
    match &cli.command {
        Command::Construct(c) => construct(c, cli.seed),
        Command::Verify(args) => verify(args, cli.seed),
        Command::Solve { problem } => solve(problem),
        Command::Bench(b) => bench(b, cli.seed),
        Command::NoiseCheck(args) => noise_check(args, cli.seed),
    }
}

/// Writes the result and its manifest; returns whether the checks passed.
fn emit(cli: &Cli, name: &str, outcome: Outcome) -> Result<bool, Failure> {
    let body = match (cli.format, &outcome.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        (Format::Csv, None) => return Err(Failure::Usage(format!("{name} has no CSV output"))),
        (Format::Json, _) => serde_json::to_string_pretty(&outcome.json)? + "\n",
    };
    let mut manifest = Manifest::new(name, cli.seed, outcome.parameters);
    manifest.parameters["format"] = json!(if cli.format == Format::Csv { "csv" } else { "json" });
    match &cli.out {
        Some(path) => {
            fs::write(path, body)?;
            manifest.outputs.push(path.display().to_string());
            fs::write(manifest_path(path), manifest.to_json().map_err(Failure::from)? + "\n")?;
        }
        None => {
            io::stdout().write_all(body.as_bytes())?;
            eprintln!("{}", manifest.to_json().map_err(Failure::from)?);
        }
    }
    Ok(outcome.passed)
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn load_graph(path: &Path) -> Result<BipartiteGraph, Failure> {
    Ok(BipartiteGraph::from_json(&fs::read_to_string(path)?)?)
}

fn graph_outcome(g: BipartiteGraph, parameters: Value) -> Run {
    let mut csv = Vec::new();
    DesignMatrix::from_graph(&g).write_csv(&mut csv)?;
    Ok(Outcome {
        passed: true,
        json: serde_json::to_value(&g)?,
        csv: Some(String::from_utf8(csv).expect("ascii csv")),
        parameters,
    })
}

fn construct(c: &Construct, seed: u64) -> Run {
    match *c {
        Construct::Pv { q, l, m, h } => {
            let g = pv_expander(&FieldSpec::from_order(q)?, l, m, h)?;
            graph_outcome(g, json!({"q": q, "l": l, "m": m, "h": h}))
        }
        Construct::Random { p, d, n } => {
            graph_outcome(random_left_regular(p, d, n, seed)?, json!({"p": p, "d": d, "n": n}))
        }
        Construct::Search {
            p,
            d,
            n_min,
            n_max,
            s,
            eps,
            seeds,
        } => {
            let parameters = json!({
                "p": p, "d": d, "n_min": n_min, "n_max": n_max, "s": s, "eps": eps, "seeds": seeds
            });
            match search_random_expander(p, d, n_min..=n_max, seeds, seed, s, eps)? {
                Some(g) => graph_outcome(g, parameters),
                None => Err(Failure::Check(format!(
                    "no graph among {} candidates is an ({s}, {eps}) expander",
                    (n_max + 1).saturating_sub(n_min) as u64 * seeds
                ))),
            }
        }
    }
}

fn report_csv(r: &VerificationReport) -> String {
    format!(
        "condition,ok,worst_ratio,trials,seed\n{},{},{},{},{}\n",
        r.condition,
        r.ok,
        r.worst_ratio,
        r.trials,
        r.seed.map(|s| s.to_string()).unwrap_or_default()
    )
}

fn verify(args: &VerifyArgs, seed: u64) -> Run {
    let g = load_graph(&args.graph)?;
    let x = DesignMatrix::from_graph(&g);
    let report = match args.mode {
        Mode::Exhaustive => check_expansion_exhaustive(&g, args.s, args.eps)?,
        Mode::Sampled => check_expansion_sampled(&g, args.s, args.eps, args.trials, seed)?,
        Mode::Rip1 => check_rip1_sampled(&x, args.s, args.eps, args.trials, seed)?,
        Mode::Up2 => check_up2_sampled(&x, args.s, args.trials, seed)?,
        Mode::HCondition => check_h_condition_sampled(&x, args.s, args.trials, seed)?,
        Mode::Kernel => check_kernel_concentration(&x, args.s, args.trials, seed)?,
        Mode::Nsp => nullspace_property_oracle(&x, args.s)?,
    };
    Ok(Outcome {
        passed: report.ok,
        csv: Some(report_csv(&report)),
        json: serde_json::to_value(&report)?,
        parameters: json!({"args": args, "graph_content": g}),
    })
}

fn solve(path: &Path) -> Run {
    let text = fs::read_to_string(path)?;
    let problem: Problem = serde_json::from_str(&text)?;
    let dense = match (&problem.design, &problem.matrix) {
        (Some(src), None) => DesignMatrix::from_graph(&src.load(path.parent())?).to_dense(),
        (None, Some(rows)) => {
            let ncols = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != ncols) {
                return Err(Failure::Usage("matrix rows differ in length".into()));
            }
            nalgebra_from_rows(rows)
        }
        _ => return Err(Failure::Usage("give exactly one of `design` and `matrix`".into())),
    };
    let need_lambda = || {
        problem
            .lambda
            .ok_or_else(|| Failure::Usage("`lambda` is required".into()))
    };
    let (beta, extra) = match problem.estimator {
        ProblemKind::Lasso => {
            let sol = lasso(&dense, &problem.y, need_lambda()?)?;
            let extra = json!({"objective": sol.objective, "kkt_residual": sol.kkt_residual,
                "iterations": sol.iterations, "converged": sol.converged});
            (sol.beta, extra)
        }
        ProblemKind::Dantzig => {
            let sol = dantzig(&dense, &problem.y, need_lambda()?)?;
            let extra = json!({"objective": sol.objective, "slack": sol.slack, "status": sol.status});
            (sol.beta, extra)
        }
        ProblemKind::BasisPursuit => (basis_pursuit(&dense, &problem.y)?, json!({})),
        ProblemKind::Ols => {
            let support = problem
                .support
                .clone()
                .ok_or_else(|| Failure::Usage("`support` is required".into()))?;
            (ols_on_support(&dense, &problem.y, &support)?, json!({}))
        }
    };
    let mut json = json!({"beta": beta});
    json.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
    let mut csv = String::from("index,value\n");
    for (i, b) in beta.iter().enumerate() {
        csv.push_str(&format!("{i},{b}\n"));
    }
    Ok(Outcome {
        passed: true,
        json,
        csv: Some(csv),
        parameters: json!({"problem": path.display().to_string(), "input": serde_json::from_str::<Value>(&text)?}),
    })
}

fn nalgebra_from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let ncols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

fn load_config(path: &Path) -> Result<(ExperimentConfig, BipartiteGraph, Value), Failure> {
    let text = fs::read_to_string(path)?;
    let (cfg, graph) = ExperimentConfig::load(path)?;
    let mut params: Value = serde_json::from_str(&text)?;
    params["config_path"] = json!(path.display().to_string());
    params["graph"] = serde_json::to_value(&graph)?;
    Ok((cfg, graph, params))
}

fn experiment_csv(r: &expander_core::experiment::ExperimentReport) -> Result<String, Failure> {
    let mut buf = Vec::new();
    r.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("ascii csv"))
}

fn bench(b: &Bench, seed: u64) -> Run {
    match b {
        Bench::Lasso { config } | Bench::Dantzig { config } => {
            let (cfg, graph, parameters) = load_config(config)?;
            let lasso_run = matches!(b, Bench::Lasso { .. });
            let est = if lasso_run {
                Estimator::Lasso
            } else {
                Estimator::Dantzig
            };
            let inst = cfg.instance(graph, est)?;
            let report = if lasso_run {
                run_lasso_experiment(&inst, cfg.trials)?
            } else {
                run_dantzig_experiment(&inst, cfg.trials)?
            };
            Ok(Outcome {
                passed: report.pass,
                csv: Some(experiment_csv(&report)?),
                json: serde_json::to_value(&report)?,
                parameters,
            })
        }
        Bench::Recovery { config } => {
            let (cfg, graph, parameters) = load_config(config)?;
            let s = cfg.target.s;
            let cert = ExpansionCertificate::issue(&graph, 2 * s, 0.125)?;
            let report = run_recovery_experiment(&graph, &cert, s, cfg.trials, cfg.seed)?;
            let csv = format!(
                "s,trials,recovered,failures,max_relative_error,pass\n{},{},{},{},{},{}\n",
                report.s, report.trials, report.recovered, report.failures, report.max_relative_error, report.pass
            );
            Ok(Outcome {
                passed: report.pass,
                csv: Some(csv),
                json: serde_json::to_value(&report)?,
                parameters,
            })
        }
        Bench::Ols { config } => {
            let (cfg, graph, parameters) = load_config(config)?;
            let est = cfg.estimator.unwrap_or(Estimator::Lasso);
            let report = ols_oracle_comparison(&cfg.instance(graph, est)?, cfg.trials)?;
            let json = serde_json::to_value(&report)?;
            let csv = flat_csv(&json);
            Ok(Outcome {
                passed: report.within_tolerance,
                csv: Some(csv),
                json,
                parameters,
            })
        }
        Bench::Mvse { config } => {
            let cfg: MvseConfig = match config {
                Some(path) => {
                    let mut v: Value = serde_json::to_value(MvseConfig {
                        seed,
                        ..Default::default()
                    })?;
                    let given: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
                    for (k, val) in given.as_object().into_iter().flatten() {
                        v[k] = val.clone();
                    }
                    serde_json::from_value(v)?
                }
                None => MvseConfig {
                    seed,
                    ..Default::default()
                },
            };
            let table = mvse_sweep(&cfg)?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            let within = table.rows.iter().all(|r| r.within_bound != Some(false));
            Ok(Outcome {
                passed: within,
                csv: Some(String::from_utf8(buf).expect("ascii csv")),
                json: serde_json::to_value(&table)?,
                parameters: serde_json::to_value(&cfg)?,
            })
        }
        Bench::Factors { s, p, alpha, theta } => {
            let f = oracle_factors(*s, *p, *alpha, *theta)?;
            Ok(Outcome {
                passed: true,
                csv: Some(format!(
                    "s,p,alpha,theta,rho,tau\n{s},{p},{alpha},{theta},{},{}\n",
                    f.rho, f.tau
                )),
                json: serde_json::to_value(f)?,
                parameters: json!({"s": s, "p": p, "alpha": alpha, "theta": theta}),
            })
        }
    }
}

/// Two-line CSV from a flat JSON object (nested values are skipped).
fn flat_csv(v: &Value) -> String {
    let obj = v.as_object().expect("object");
    let fields: Vec<(&String, String)> = obj
        .iter()
        .filter(|(_, x)| !x.is_object() && !x.is_array())
        .map(|(k, x)| (k, x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string())))
        .collect();
    let head: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
    let vals: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
    format!("{}\n{}\n", head.join(","), vals.join(","))
}

fn parse_model(spec: &str, n: usize, sigma: f64) -> Result<NoiseModel, Failure> {
    let correlation = match spec.split_once(':') {
        None if spec == "iid" => Correlation::Iid,
        Some(("ar1", rho)) => Correlation::Ar1(
            rho.parse()
                .map_err(|_| Failure::Usage(format!("bad ar1 coefficient {rho:?}")))?,
        ),
        _ => {
            return Err(Failure::Usage(format!(
                "unknown noise model {spec:?} (use iid or ar1:RHO)"
            )))
        }
    };
    Ok(NoiseModel { n, sigma, correlation })
}

fn noise_check(args: &NoiseArgs, seed: u64) -> Run {
    let model = parse_model(&args.model, args.n, args.sigma)?;
    let report = match &args.graph {
        Some(path) => {
            let x = DesignMatrix::from_graph(&load_graph(path)?);
            empirical_noise_bound(&x, &model, args.t, args.trials, seed)?
        }
        None => {
            let x = DesignMatrix::from_graph(&BipartiteGraph::matching(args.n)?);
            empirical_noise_bound(&x, &model, args.t, args.trials, seed)?
        }
    };
    let json = serde_json::to_value(&report)?;
    Ok(Outcome {
        passed: report.pass && report.non_amplification_violations == 0,
        csv: Some(flat_csv(&json)),
        json,
        parameters: serde_json::to_value(args)?,
    })
}
