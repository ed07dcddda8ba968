//! Command-line front end.
//!
//! Every command writes machine-readable output to stdout and a short human
//! summary to stderr. Exit status is 0 on success, 1 when the answer is
//! "unstable" or "infeasible", 2 on input errors.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::budget::{self, ControlSolution, NodeAssessment, Threshold};
use crate::io::load_model;
use crate::linalg::{self, Tolerance};
use crate::model::{self, NetworkModel, Node, DEFAULT_EQUILIBRIUM_TOL};
use crate::northeast;
use crate::oracle::{self, CrossCheckReport};
use crate::simulate::{self, Control, SimParams};
use crate::spectral;

/// Margin suggested on top of a reported infimum.
pub const SUGGESTED_MARGIN: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Parse and validate a model file
    Validate,
    /// Smallest eigenvalue of Δ-B and the healthy-state verdict
    Stability,
    /// Epidemic equilibrium (zero when the healthy state is stable)
    Equilibrium,
    /// Minimum single-node curing budget
    MinBudget,
    /// Integrate the dynamics and write a trajectory CSV
    Simulate,
    /// Run everything on the embedded northeast rail network
    CaseStudy,
}

/// Minimum single-node curing budget for networked SIS epidemics.
#[derive(Debug, Clone, Parser)]
#[command(name = "sis-budget", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// Model JSON file (not used by case-study)
    pub model_path: Option<PathBuf>,

    /// Absolute eigenvalue tolerance for the definiteness tests
    /// [default: 1e-8 * max(1, ||M||_inf)]
    #[arg(long)]
    pub tol: Option<f64>,

    /// Compare every analytic threshold with direct bisection
    #[arg(long)]
    pub cross_check: bool,

    /// Restrict min-budget to one node (1-based)
    #[arg(long)]
    pub node: Option<usize>,

    /// Constant curing boost `i:u` (1-based node, nonnegative budget)
    #[arg(long, value_parser = parse_control)]
    pub control: Option<ControlSpec>,

    /// Initial state: `a,b,c,...` or `uniform:p` [default: uniform:0.5]
    #[arg(long)]
    pub x0: Option<String>,

    /// Integration step
    #[arg(long, default_value_t = simulate::DEFAULT_DT)]
    pub dt: f64,

    /// Integration horizon
    #[arg(long, default_value_t = simulate::DEFAULT_T_END)]
    pub t_end: f64,

    /// Store every k-th step in the trajectory
    #[arg(long, default_value_t = 1)]
    pub every: usize,

    /// Output file (trajectory CSV for simulate)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Include dense matrices in the JSON output
    #[arg(long)]
    pub dump_matrices: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSpec {
    pub node: usize,
    pub input: f64,
}

impl FromStr for ControlSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (node, input) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `i:u`, got `{s}`"))?;
        let node: usize = node
            .trim()
            .parse()
            .map_err(|_| format!("bad node index `{node}`"))?;
        let input: f64 = input
            .trim()
            .parse()
            .map_err(|_| format!("bad budget `{input}`"))?;
        if node == 0 {
            return Err("node indices are 1-based".into());
        }
        if !input.is_finite() || input < 0.0 {
            return Err(format!("budget must be finite and nonnegative, got {input}"));
        }
        Ok(ControlSpec { node, input })
    }
}

fn parse_control(s: &str) -> Result<ControlSpec, String> {
    s.parse()
}

/// Parses `--x0` for an `n`-node model.
pub fn parse_x0(spec: Option<&str>, n: usize) -> Result<Vec<f64>, String> {
    let Some(spec) = spec else {
        return Ok(vec![simulate::DEFAULT_X0; n]);
    };
    let x: Vec<f64> = if let Some(p) = spec.strip_prefix("uniform:") {
        let p: f64 = p.trim().parse().map_err(|_| format!("bad uniform value `{p}`"))?;
        vec![p; n]
    } else {
        spec.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad x0 entry `{v}`")))
            .collect::<Result<_, _>>()?
    };
    if x.len() != n {
        return Err(format!("x0 has {} entries, model has {n} nodes", x.len()));
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(format!("x0 entry {v} outside [0, 1]"));
    }
    Ok(x)
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

struct Emit {
    code: i32,
    json: Option<serde_json::Value>,
    raw_stdout: Option<String>,
    summary: String,
}

type CmdResult = Result<Emit, String>;

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("report types serialize")
}

impl RunConfig {
    fn tolerance(&self) -> Result<Tolerance, String> {
        match self.tol {
            None => Ok(Tolerance::default()),
            Some(t) if t > 0.0 && t.is_finite() => Ok(Tolerance::Absolute(t)),
            Some(t) => Err(format!("--tol must be positive, got {t}")),
        }
    }

    fn model(&self) -> Result<NetworkModel, String> {
        let path = self
            .model_path
            .as_ref()
            .ok_or("this command needs a model file")?;
        load_model(path).map_err(|e| e.to_string())
    }

    fn control(&self, n: usize) -> Result<Option<Control>, String> {
        self.control
            .map(|c| {
                if c.node > n {
                    return Err(format!("control node {} out of range 1..={n}", c.node));
                }
                Ok(Control {
                    node: Node::from_one_based(c.node).map_err(|e| e.to_string())?,
                    input: c.input,
                })
            })
            .transpose()
    }

    fn sim_params(&self) -> SimParams {
        SimParams {
            dt: self.dt,
            t_end: self.t_end,
            every: self.every,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    let result = match config.command {
        Command::Validate => cmd_validate(config),
        Command::Stability => cmd_stability(config),
        Command::Equilibrium => cmd_equilibrium(config),
        Command::MinBudget => cmd_min_budget(config),
        Command::Simulate => cmd_simulate(config),
        Command::CaseStudy => cmd_case_study(config),
    };
    match result {
        Ok(emit) => {
            let mut stdout = emit.raw_stdout.unwrap_or_default();
            if let Some(json) = emit.json {
                stdout.push_str(&serde_json::to_string_pretty(&json).expect("json"));
                stdout.push('\n');
            }
            Outcome {
                code: emit.code,
                stdout,
                stderr: emit.summary,
            }
        }
        Err(message) => Outcome::input_error(message),
    }
}

fn cmd_validate(config: &RunConfig) -> CmdResult {
    let model = config.model()?;
    let n = model.n();
    let beta = model.beta();
    let edges = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| beta[(i, j)] != 0.0)
        .count();
    let self_loops = (0..n).filter(|&i| beta[(i, i)] != 0.0).count();
    Ok(Emit {
        code: 0,
        json: Some(json!({
            "valid": true,
            "n": n,
            "edges": edges,
            "self_loops": self_loops,
            "connected": model::is_connected(&model),
        })),
        raw_stdout: None,
        summary: format!("valid model: {n} nodes, {edges} edges, {self_loops} self-loops\n"),
    })
}

fn cmd_stability(config: &RunConfig) -> CmdResult {
    let model = config.model()?;
    let report = model::healthy_stability(&model, config.tolerance()?).map_err(|e| e.to_string())?;
    let verdict = if report.stable { "stable" } else { "unstable" };
    Ok(Emit {
        code: if report.stable { 0 } else { 1 },
        json: Some(to_json(&report)),
        raw_stdout: None,
        summary: format!(
            "lambda_min(Delta - B) = {:.6}: healthy state is {verdict}\n",
            report.lambda_min
        ),
    })
}

fn cmd_equilibrium(config: &RunConfig) -> CmdResult {
    let model = config.model()?;
    let eq = model::epidemic_equilibrium(&model, DEFAULT_EQUILIBRIUM_TOL, config.tolerance()?)
        .map_err(|e| e.to_string())?;
    let summary = format!(
        "equilibrium: [{}] (residual {:.2e})\n",
        eq.x_star.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", "),
        eq.residual_inf_norm
    );
    Ok(Emit {
        code: 0,
        json: Some(to_json(&eq)),
        raw_stdout: None,
        summary,
    })
}

fn matrices_json(model: &NetworkModel, assessments: &[NodeAssessment], tol: Tolerance) -> Result<serde_json::Value, String> {
    let mut pseudoinverses = Vec::new();
    for a in assessments.iter().filter(|a| a.effective_resistance.is_some()) {
        let p = spectral::laplacian_pseudoinverse(&a.grounded_laplacian, tol).map_err(|e| e.to_string())?;
        pseudoinverses.push(json!({ "node": a.node, "matrix": linalg::to_rows(&p) }));
    }
    Ok(json!({
        "beta": linalg::to_rows(model.beta()),
        "delta_minus_beta": linalg::to_rows(&model.delta_minus_beta()),
        "grounded_pseudoinverses": pseudoinverses,
    }))
}

fn threshold_text(t: Threshold) -> String {
    match t {
        Threshold::Finite(u) => format!("{u:.6}"),
        Threshold::Infeasible => "infeasible".into(),
    }
}

fn budget_summary(assessments: &[NodeAssessment], best: Option<(Node, Threshold)>) -> String {
    let mut s = String::new();
    for a in assessments {
        let _ = writeln!(
            s,
            "node {:>3}: {}{}",
            a.node,
            threshold_text(a.threshold),
            if a.no_control_needed { " (no control needed)" } else { "" }
        );
    }
    match best {
        Some((node, Threshold::Finite(u))) => {
            let _ = writeln!(
                s,
                "best: node {node}, budget must exceed {u:.6} (infimum; e.g. use {:.6})",
                u + SUGGESTED_MARGIN
            );
        }
        _ => {
            let _ = writeln!(s, "no single node can stabilize the healthy state");
        }
    }
    s
}

fn cross_check_summary(report: &CrossCheckReport) -> String {
    let mut s = String::new();
    if report.all_agree() {
        let _ = writeln!(s, "cross-check: theorem and oracle agree on every node");
    }
    for e in report.nodes.iter().filter(|e| !e.agree) {
        let oracle = match e.oracle_threshold.value() {
            Some(u) => format!("{u:.6}"),
            None => "unbounded".into(),
        };
        let _ = writeln!(
            s,
            "cross-check DISCREPANCY at node {}: theorem {}, oracle {oracle}",
            e.node,
            threshold_text(e.theorem_threshold)
        );
    }
    s
}

fn cmd_min_budget(config: &RunConfig) -> CmdResult {
    let model = config.model()?;
    let tol = config.tolerance()?;
    let fail = |e: crate::Error| e.to_string();

    let (mut json, assessments, best) = if let Some(label) = config.node {
        let node = Node::from_one_based(label).map_err(fail)?;
        let a = budget::assess_node(&model, node, tol).map_err(fail)?;
        let best = a.feasible.then_some((a.node, a.threshold));
        (to_json(&a), vec![a], best)
    } else {
        let solution: ControlSolution = budget::solve_min_budget(&model, tol).map_err(fail)?;
        let best = solution.best_node.map(|n| (n, solution.threshold));
        (to_json(&solution), solution.per_node, best)
    };

    let mut summary = budget_summary(&assessments, best);
    let mut code = if best.is_some() { 0 } else { 1 };
    let map = json.as_object_mut().expect("object");
    if config.cross_check {
        let report = oracle::cross_check(&model, &assessments).map_err(fail)?;
        summary.push_str(&cross_check_summary(&report));
        if !report.all_agree() {
            code = code.max(1);
        }
        map.insert("cross_check".into(), to_json(&report));
    }
    if config.dump_matrices {
        map.insert("matrices".into(), matrices_json(&model, &assessments, tol)?);
    }
    Ok(Emit {
        code,
        json: Some(json),
        raw_stdout: None,
        summary,
    })
}

fn cmd_simulate(config: &RunConfig) -> CmdResult {
    let model = config.model()?;
    let x0 = parse_x0(config.x0.as_deref(), model.n())?;
    let control = config.control(model.n())?;
    let traj = simulate::simulate(&model, &x0, control, config.sim_params()).map_err(|e| e.to_string())?;
    let final_max = traj.final_state().iter().copied().fold(0.0, f64::max);
    let summary = format!(
        "simulated to t = {} with {} stored states; final max x_i = {:.3e}\n",
        traj.final_time(),
        traj.times.len(),
        final_max
    );

    match &config.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
            traj.write_csv(BufWriter::new(file))
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            Ok(Emit {
                code: 0,
                json: Some(json!({
                    "out": path.display().to_string(),
                    "stored_states": traj.times.len(),
                    "final_time": traj.final_time(),
                    "final_state": traj.final_state(),
                    "final_max": final_max,
                    "control": traj.control,
                })),
                raw_stdout: None,
                summary,
            })
        }
        None => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf).map_err(|e| e.to_string())?;
            Ok(Emit {
                code: 0,
                json: None,
                raw_stdout: Some(String::from_utf8(buf).expect("csv is utf-8")),
                summary,
            })
        }
    }
}

/// One row of the case-study comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseCheck {
    pub quantity: String,
    pub published: serde_json::Value,
    pub computed: serde_json::Value,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(quantity: impl Into<String>, published: f64, computed: f64, tolerance: f64) -> CaseCheck {
    CaseCheck {
        quantity: quantity.into(),
        published: json!(published),
        computed: json!(computed),
        tolerance,
        pass: (published - computed).abs() <= tolerance,
    }
}

/// Stability, equilibrium, minimum budget and a controlled simulation on
/// the embedded northeast network, tabulated against published values.
pub fn case_study(config: &RunConfig) -> Result<serde_json::Value, crate::Error> {
    use northeast::published;

    let model = northeast::model();
    let tol = config.tolerance().map_err(crate::Error::InvalidParameter)?;
    let mut checks = Vec::new();

    let stability = model::healthy_stability(&model, tol)?;
    checks.push(check("lambda_min(Delta - B)", published::LAMBDA_MIN, stability.lambda_min, 5e-4));

    let eq = model::epidemic_equilibrium(&model, DEFAULT_EQUILIBRIUM_TOL, tol)?;
    for (k, (&p, &c)) in published::X_STAR.iter().zip(&eq.x_star).enumerate() {
        checks.push(check(format!("x*_{}", k + 1), p, c, 5e-4));
    }

    let solution = budget::solve_min_budget(&model, tol)?;
    let feasible: Vec<usize> = solution.feasible_set.iter().map(|n| n.one_based()).collect();
    checks.push(CaseCheck {
        quantity: "feasible set".into(),
        published: json!([published::FEASIBLE_NODE]),
        computed: json!(feasible),
        tolerance: 0.0,
        pass: feasible == [published::FEASIBLE_NODE],
    });
    let threshold = solution.threshold.value().unwrap_or(f64::NAN);
    checks.push(check(
        format!("u_{}", published::FEASIBLE_NODE),
        published::THRESHOLD,
        threshold,
        5e-3,
    ));

    let cross = if config.cross_check {
        let report = oracle::cross_check(&model, &solution.per_node)?;
        let node5 = report.nodes[published::FEASIBLE_NODE - 1];
        checks.push(check(
            format!("theorem vs oracle u_{}", published::FEASIBLE_NODE),
            threshold,
            node5.oracle_threshold.value().unwrap_or(f64::NAN),
            oracle::CROSS_CHECK_AGREEMENT_TOL,
        ));
        Some(report)
    } else {
        None
    };

    let control = match config.control {
        Some(c) => Control {
            node: Node::from_one_based(c.node)?,
            input: c.input,
        },
        None => Control {
            node: solution.best_node.unwrap_or(Node::from_index(0)),
            input: threshold + SUGGESTED_MARGIN,
        },
    };
    let traj = simulate::simulate(&model, &eq.x_star, Some(control), config.sim_params())?;
    let initial_max = eq.x_star.iter().copied().fold(0.0, f64::max);
    let final_max = traj.final_state().iter().copied().fold(0.0, f64::max);
    checks.push(CaseCheck {
        quantity: "controlled run decays from x*".into(),
        published: json!("converges to healthy state"),
        computed: json!(final_max),
        tolerance: initial_max,
        pass: final_max < initial_max,
    });

    let mut report = json!({
        "checks": checks,
        "all_pass": checks.iter().all(|c| c.pass),
        "stability": stability,
        "equilibrium": eq,
        "solution": {
            "best_node": solution.best_node,
            "threshold": solution.threshold,
            "feasible_set": solution.feasible_set,
        },
        "simulation": {
            "control": control,
            "dt": config.dt,
            "t_end": traj.final_time(),
            "initial_max": initial_max,
            "final_max": final_max,
        },
    });
    if let Some(cross) = cross {
        report["cross_check"] = to_json(&cross);
    }
    Ok(report)
}

fn cmd_case_study(config: &RunConfig) -> CmdResult {
    if config.model_path.is_some() {
        return Err("case-study uses the embedded model and takes no model file".into());
    }
    let report = case_study(config).map_err(|e| e.to_string())?;
    let mut summary = String::new();
    let _ = writeln!(summary, "{:<34} {:>22} {:>22} {:>6}", "quantity", "published", "computed", "pass");
    for c in report["checks"].as_array().expect("checks") {
        let _ = writeln!(
            summary,
            "{:<34} {:>22} {:>22} {:>6}",
            c["quantity"].as_str().unwrap_or_default(),
            short(&c["published"]),
            short(&c["computed"]),
            if c["pass"].as_bool() == Some(true) { "yes" } else { "NO" }
        );
    }
    let all_pass = report["all_pass"].as_bool() == Some(true);
    Ok(Emit {
        code: if all_pass { 0 } else { 1 },
        json: Some(report),
        raw_stdout: None,
        summary,
    })
}

fn short(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(n) => format!("{:.6}", n.as_f64().unwrap_or(f64::NAN)),
        serde_json::Value::String(s) => s.chars().take(22).collect(),
        other => other.to_string(),
    }
}
