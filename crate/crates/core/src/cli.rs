//! Command-line front end.
//!
//! Exit status: 0 success, 1 violations or table mismatch, 2 configuration
//! error, 3 solver domain error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::analysis::{
    convergence_study, error_record, fit_order, sweep_table, time_error_sweep,
};
use crate::error::{Error, Result};
use crate::geomcalc::ComplexNum;
use crate::hybrid::{solve_hybrid, HybridConfig};
use crate::problems::{self, from_expression, ProblemSpec, RhsKind};
use crate::report::{diff_tables, Cell, Manifest, Table};
use crate::solvers::{solve, MIvp, Method, Trajectory};
use crate::tableau::{classical_mrk4, multiplicative_heun, MButcherTableau};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Environment variable capping bench parallelism.
pub const THREADS_ENV: &str = "MULRK_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mulrk", version, about = "Multiplicative Runge-Kutta solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one problem and print the trajectory.
    Solve(SolveArgs),
    /// Side-by-side mrk4 and rk4 trajectories.
    Compare(CompareArgs),
    /// Final-point errors under step halving and the fitted order.
    Convergence(ConvergenceArgs),
    /// Wall time against final relative error over a list of step sizes.
    Bench(BenchArgs),
    /// Registered problems and their defaults.
    ListProblems(OutputArgs),
    /// Check a tableau against its order conditions.
    ValidateTableau(ValidateArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("rhs").required(true).args(["problem", "mrhs", "orhs"])))]
pub struct ProblemArgs {
    /// Registered problem name.
    #[arg(long)]
    pub problem: Option<String>,
    /// Multiplicative right-hand side f(x, y).
    #[arg(long, allow_hyphen_values = true)]
    pub mrhs: Option<String>,
    /// Ordinary right-hand side g(x, y).
    #[arg(long, allow_hyphen_values = true)]
    pub orhs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Initial value as `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub y0: Option<String>,
    /// Step size.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_end: Option<f64>,
    /// Override a problem parameter, `key=value`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Compare the produced table against this CSV instead of writing it.
    #[arg(long, value_name = "FILE")]
    pub from_csv: Option<PathBuf>,
    /// Relative tolerance of the `--from-csv` comparison.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct HybridArgs {
    /// Bypass roots with ordinary RK4 steps (mrk4 only).
    #[arg(long)]
    pub hybrid: bool,
    /// Zero band: hand over when |y| < eps.
    #[arg(long, requires = "hybrid")]
    pub eps: Option<f64>,
    /// Minimum ordinary steps before handing back.
    #[arg(long, requires = "hybrid")]
    pub min_steps: Option<usize>,
    /// Hand back once |y| > rearm * eps.
    #[arg(long, requires = "hybrid")]
    pub rearm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value = "mrk4")]
    pub method: Method,
    /// Tableau JSON file for mrk2 or mrk4.
    #[arg(long)]
    pub tableau: Option<PathBuf>,
    /// State component to print.
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    #[command(flatten)]
    pub hybrid: HybridArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    #[command(flatten)]
    pub hybrid: HybridArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value = "mrk4")]
    pub method: Method,
    #[arg(long)]
    pub tableau: Option<PathBuf>,
    /// Number of step sizes h, h/2, ...
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "mrk4,rk4")]
    pub methods: Vec<Method>,
    /// Comma-separated step sizes; defaults to four halvings of the problem's h.
    #[arg(long, value_delimiter = ',')]
    pub h_list: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["tableau", "builtin"])))]
pub struct ValidateArgs {
    /// Tableau JSON file.
    #[arg(long)]
    pub tableau: Option<PathBuf>,
    /// Built-in tableau: mrk2 or mrk4.
    #[arg(long)]
    pub builtin: Option<Method>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A finished command: the table, its manifest and the exit status.
struct Outcome {
    table: Table,
    manifest: Manifest,
    status: i32,
    notes: Vec<String>,
}

impl Outcome {
    fn ok(table: Table, manifest: Manifest) -> Self {
        Outcome {
            table,
            manifest,
            status: EXIT_OK,
            notes: Vec::new(),
        }
    }
}

/// Parses `args` and runs the command, returning the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // Through the print macros so the test harness captures it.
            if e.use_stderr() {
                eprint!("{}", e.render());
                return EXIT_CONFIG;
            }
            print!("{}", e.render());
            return EXIT_OK;
        }
    };
    match run(cli) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = hint_for(&e) {
                eprintln!("hint: {hint}");
            }
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain { .. } | Error::UnrecoverableZero { .. } | Error::Eval(_) => EXIT_DOMAIN,
        Error::Degenerate { .. } => EXIT_VIOLATION,
        _ => EXIT_CONFIG,
    }
}

fn hint_for(e: &Error) -> Option<&'static str> {
    match e {
        Error::Domain { .. } => Some(
            "the multiplicative derivative is undefined at a root of the solution; \
             rerun with --hybrid to step across it with ordinary RK4",
        ),
        Error::UnrecoverableZero { .. } => {
            Some("supply the ordinary form with --orhs so the bypass can step through zero")
        }
        _ => None,
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let (outcome, out) = match cli.command {
        Command::Solve(a) => (cmd_solve(&a)?, a.out),
        Command::Compare(a) => (cmd_compare(&a)?, a.out),
        Command::Convergence(a) => (cmd_convergence(&a)?, a.out),
        Command::Bench(a) => (cmd_bench(&a)?, a.out),
        Command::ListProblems(a) => (cmd_list()?, a),
        Command::ValidateTableau(a) => (cmd_validate(&a)?, a.out),
    };
    for n in &outcome.notes {
        eprintln!("{n}");
    }
    let status = emit(&outcome, &out)?;
    Ok(status.max(outcome.status))
}

fn emit(o: &Outcome, out: &OutputArgs) -> Result<i32> {
    if let Some(path) = &out.from_csv {
        let src = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let expected = Table::from_csv(&src)?;
        let diffs = diff_tables(&expected, &o.table, &["wall_time_s"], out.tol);
        if diffs.is_empty() {
            eprintln!("match: {} rows agree with {}", o.table.rows.len(), path.display());
            return Ok(EXIT_OK);
        }
        for d in diffs.iter().take(20) {
            eprintln!("mismatch: {d}");
        }
        if diffs.len() > 20 {
            eprintln!("mismatch: ... {} more", diffs.len() - 20);
        }
        return Ok(EXIT_VIOLATION);
    }
    let text = match out.format {
        Format::Csv => o.table.to_csv(),
        Format::Json => o.table.to_json(&o.manifest),
    };
    match &out.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error of the run
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    Ok(EXIT_OK)
}

/// Parses `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<ComplexNum> {
    let bad = || Error::Config(format!("expected `re` or `re,im`, got `{s}`"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    match parts.as_slice() {
        [re] => Ok(ComplexNum::new(num(re)?, 0.0)),
        [re, im] => Ok(ComplexNum::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn parse_param(s: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("expected key=value, got `{s}`")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("parameter `{k}` needs a number, got `{v}`")))?;
    Ok((k.trim().to_string(), v))
}

/// A problem ready to integrate.
struct Resolved {
    spec: Option<ProblemSpec>,
    mivp: MIvp,
    h: f64,
    x_end: f64,
    config: Value,
}

impl Resolved {
    fn problem_for(&self, method: Method) -> &MIvp {
        match &self.spec {
            Some(s) => s.problem_for(method),
            None => &self.mivp,
        }
    }
}

fn resolve(a: &ProblemArgs) -> Result<Resolved> {
    let params = a
        .params
        .iter()
        .map(|p| parse_param(p))
        .collect::<Result<Vec<_>>>()?;
    if let Some(name) = &a.problem {
        if a.x0.is_some() || a.y0.is_some() {
            return Err(Error::Config(
                "--x0/--y0 apply to expressions; use --param to change a registered problem".into(),
            ));
        }
        let spec = problems::lookup_with(name, &params)?;
        let h = a.h.unwrap_or(spec.default_h);
        let x_end = a.x_end.unwrap_or(spec.default_x_end);
        let config = json!({
            "problem": name,
            "params": spec.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
            "h": h,
            "x_end": x_end,
        });
        return Ok(Resolved {
            mivp: spec.mivp.clone(),
            spec: Some(spec),
            h,
            x_end,
            config,
        });
    }
    if !params.is_empty() {
        return Err(Error::Config("--param applies to registered problems only".into()));
    }
    let (kind, src) = match (&a.mrhs, &a.orhs) {
        (Some(s), None) => (RhsKind::Mult, s),
        (None, Some(s)) => (RhsKind::Ordinary, s),
        _ => unreachable!("clap enforces exactly one right-hand side"),
    };
    let x0 = a.x0.unwrap_or(0.0);
    let y0 = parse_complex(a.y0.as_deref().unwrap_or("1"))?;
    let h = a
        .h
        .ok_or_else(|| Error::Config("--h is required with an expression".into()))?;
    let x_end = a
        .x_end
        .ok_or_else(|| Error::Config("--x-end is required with an expression".into()))?;
    let mivp = from_expression(kind, src, x0, y0)?;
    let config = json!({
        match kind { RhsKind::Mult => "mrhs", RhsKind::Ordinary => "orhs" }: src,
        "x0": x0,
        "y0": [y0.re, y0.im],
        "h": h,
        "x_end": x_end,
    });
    Ok(Resolved {
        spec: None,
        mivp,
        h,
        x_end,
        config,
    })
}

fn load_tableau(path: &Option<PathBuf>, method: Method) -> Result<Option<MButcherTableau>> {
    let Some(path) = path else { return Ok(None) };
    if method == Method::Rk4 {
        return Err(Error::Config("--tableau applies to mrk2 and mrk4 only".into()));
    }
    let src = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let t = MButcherTableau::from_json(&src)?;
    let want = if method == Method::Mrk2 { 2 } else { 4 };
    if t.stages() != want {
        return Err(Error::Config(format!(
            "{method} needs a {want}-stage tableau, {} has {}",
            path.display(),
            t.stages()
        )));
    }
    Ok(Some(t))
}

fn hybrid_config(a: &HybridArgs, p: &MIvp) -> Result<Option<HybridConfig>> {
    if !a.hybrid {
        return Ok(None);
    }
    let d = HybridConfig::for_problem(p);
    Ok(Some(HybridConfig::new(
        a.eps.unwrap_or(d.zero_threshold),
        a.min_steps.unwrap_or(d.min_ordinary_steps),
        a.rearm.unwrap_or(d.rearm_factor),
    )?))
}

fn hybrid_json(cfg: &Option<HybridConfig>) -> Value {
    match cfg {
        Some(c) => json!({
            "eps": c.zero_threshold,
            "min_steps": c.min_ordinary_steps,
            "rearm": c.rearm_factor,
        }),
        None => Value::Null,
    }
}

fn check_component(p: &MIvp, k: usize) -> Result<()> {
    if k >= p.dim() {
        return Err(Error::Config(format!(
            "component {k} out of range for a {}-dimensional problem",
            p.dim()
        )));
    }
    Ok(())
}

fn integrate(
    r: &Resolved,
    method: Method,
    tableau: Option<&MButcherTableau>,
    hybrid: &Option<HybridConfig>,
) -> Result<Trajectory> {
    match hybrid {
        Some(cfg) => solve_hybrid(&r.mivp, r.h, r.x_end, cfg),
        None => solve(r.problem_for(method), method, r.h, r.x_end, tableau),
    }
}

/// `(value, rel_error)` cells of sample `i`, component `k`.
fn value_cells(p: &MIvp, traj: &Trajectory, i: usize, k: usize) -> (ComplexNum, Option<f64>) {
    let s = &traj.samples[i];
    let v = s.state.to_complex()[k];
    let rel = p
        .exact(s.x)
        .and_then(|ex| error_record(s, k, ex[k]).ok())
        .map(|r| r.rel_error);
    (v, rel)
}

fn cmd_solve(a: &SolveArgs) -> Result<Outcome> {
    let r = resolve(&a.problem)?;
    let hybrid = hybrid_config(&a.hybrid, &r.mivp)?;
    if hybrid.is_some() && a.method != Method::Mrk4 {
        return Err(Error::Config("--hybrid runs mrk4; drop --method or set it to mrk4".into()));
    }
    if hybrid.is_some() && a.tableau.is_some() {
        return Err(Error::Config("--hybrid uses the classical tableau".into()));
    }
    let tableau = load_tableau(&a.tableau, a.method)?;
    let p = r.problem_for(a.method);
    check_component(p, a.component)?;
    let traj = integrate(&r, a.method, tableau.as_ref(), &hybrid)?;

    let mut t = Table::new(["x", "re", "im", "exact_re", "exact_im", "rel_error", "method_tag"]);
    for (i, s) in traj.samples.iter().enumerate() {
        let (v, rel) = value_cells(p, &traj, i, a.component);
        let ex = p.exact(s.x).map(|e| e[a.component]);
        t.push(vec![
            s.x.into(),
            v.re.into(),
            v.im.into(),
            ex.map(|e| e.re).into(),
            ex.map(|e| e.im).into(),
            rel.into(),
            s.method.as_str().into(),
        ]);
    }
    let mut config = r.config.clone();
    config["method"] = json!(a.method.as_str());
    config["component"] = json!(a.component);
    config["hybrid"] = hybrid_json(&hybrid);
    if let Some(t) = &tableau {
        config["tableau"] = serde_json::to_value(t).expect("tableau serializes");
    }
    Ok(Outcome::ok(t, Manifest::new("solve", config)))
}

fn cmd_compare(a: &CompareArgs) -> Result<Outcome> {
    let r = resolve(&a.problem)?;
    let hybrid = hybrid_config(&a.hybrid, &r.mivp)?;
    check_component(&r.mivp, a.component)?;
    check_component(r.problem_for(Method::Rk4), a.component)?;
    let m = integrate(&r, Method::Mrk4, None, &hybrid)?;
    let o = integrate(&r, Method::Rk4, None, &None)?;
    let (pm, po) = (&r.mivp, r.problem_for(Method::Rk4));

    let mut t = Table::new([
        "x",
        "exact_re",
        "exact_im",
        "mrk4_re",
        "mrk4_im",
        "mrk4_rel_error",
        "rk4_re",
        "rk4_im",
        "rk4_rel_error",
    ]);
    for (i, s) in m.samples.iter().enumerate() {
        let ex = pm.exact(s.x).map(|e| e[a.component]);
        let (vm, em) = value_cells(pm, &m, i, a.component);
        let (vo, eo) = value_cells(po, &o, i, a.component);
        t.push(vec![
            s.x.into(),
            ex.map(|e| e.re).into(),
            ex.map(|e| e.im).into(),
            vm.re.into(),
            vm.im.into(),
            em.into(),
            vo.re.into(),
            vo.im.into(),
            eo.into(),
        ]);
    }
    let mut config = r.config.clone();
    config["component"] = json!(a.component);
    config["hybrid"] = hybrid_json(&hybrid);
    Ok(Outcome::ok(t, Manifest::new("compare", config)))
}

fn cmd_convergence(a: &ConvergenceArgs) -> Result<Outcome> {
    let r = resolve(&a.problem)?;
    let tableau = load_tableau(&a.tableau, a.method)?;
    let p = r.problem_for(a.method);
    let rows = convergence_study(p, a.method, r.h, a.levels, r.x_end, tableau.as_ref())?;
    let mut t = Table::new(["h", "steps", "log_error", "rel_error"]);
    for row in &rows {
        t.push(vec![
            row.h.into(),
            row.steps.into(),
            row.log_error.into(),
            row.rel_error.into(),
        ]);
    }
    let mut config = r.config.clone();
    config["method"] = json!(a.method.as_str());
    config["levels"] = json!(a.levels);
    let manifest = Manifest::new("convergence", config);
    Ok(match fit_order(&rows) {
        Ok(order) => Outcome {
            table: t,
            manifest: manifest.with("order", json!(order)),
            status: EXIT_OK,
            notes: vec![format!("estimated order: {order:.6}")],
        },
        Err(e @ Error::Degenerate { .. }) => Outcome {
            table: t,
            manifest: manifest.with("order", Value::Null),
            status: EXIT_VIOLATION,
            notes: vec![format!("order undefined: {e}")],
        },
        Err(e) => return Err(e),
    })
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<Outcome> {
    let r = resolve(&a.problem)?;
    let threads = threads_from_env()?;
    let h_list: Vec<f64> = if a.h_list.is_empty() {
        (0..4).map(|l| r.h / f64::powi(2.0, l)).collect()
    } else {
        a.h_list.clone()
    };
    let mut methods = a.methods.clone();
    methods.sort();
    methods.dedup();
    let mut samples = Vec::new();
    for &m in &methods {
        samples.extend(time_error_sweep(r.problem_for(m), &[m], &h_list, r.x_end, a.repeats, threads)?);
    }
    let notes = samples
        .iter()
        .filter_map(|s| {
            s.error
                .as_ref()
                .map(|e| format!("cell {} h={} failed: {e}", s.method, s.h))
        })
        .collect();
    let mut config = r.config.clone();
    config["methods"] = json!(methods.iter().map(|m| m.as_str()).collect::<Vec<_>>());
    config["h_list"] = json!(h_list);
    config["repeats"] = json!(a.repeats);
    config["threads"] = json!(threads);
    Ok(Outcome {
        table: sweep_table(&samples),
        manifest: Manifest::new("bench", config),
        status: EXIT_OK,
        notes,
    })
}

fn cmd_list() -> Result<Outcome> {
    let mut t = Table::new([
        "name",
        "dim",
        "x0",
        "default_h",
        "default_x_end",
        "exact",
        "params",
        "rhs",
    ]);
    for s in problems::registry() {
        let params = s
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let rhs = match &s.expr {
            Some((RhsKind::Mult, e)) => format!("y* = {e}"),
            Some((RhsKind::Ordinary, e)) => format!("y' = {e}"),
            None => String::new(),
        };
        t.push(vec![
            s.name.as_str().into(),
            s.mivp.dim().into(),
            s.mivp.x0().into(),
            s.default_h.into(),
            s.default_x_end.into(),
            if s.mivp.exact_fn().is_some() { "yes" } else { "no" }.into(),
            params.into(),
            if rhs.is_empty() { Cell::Empty } else { rhs.into() },
        ]);
    }
    Ok(Outcome::ok(t, Manifest::new("list-problems", json!({}))))
}

fn cmd_validate(a: &ValidateArgs) -> Result<Outcome> {
    let (t, source) = match (&a.tableau, a.builtin) {
        (Some(path), _) => {
            let src = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            (MButcherTableau::from_json(&src)?, json!(path.display().to_string()))
        }
        (None, Some(Method::Mrk2)) => (multiplicative_heun(), json!("mrk2")),
        (None, Some(Method::Mrk4)) => (classical_mrk4(), json!("mrk4")),
        (None, Some(Method::Rk4)) => {
            return Err(Error::Config("rk4 has no multiplicative tableau; use mrk2 or mrk4".into()))
        }
        (None, None) => unreachable!("clap requires a tableau source"),
    };
    let violations = t.validate()?;
    let mut table = Table::new(["condition", "inherited", "actual", "expected"]);
    for v in &violations {
        table.push(vec![
            v.condition.to_string().into(),
            if v.condition.is_inherited() { "yes" } else { "no" }.into(),
            v.actual.into(),
            v.expected.into(),
        ]);
    }
    let status = if violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    let note = if violations.is_empty() {
        format!("ok: {}-stage tableau satisfies all order conditions", t.stages())
    } else {
        format!("{} order condition(s) violated", violations.len())
    };
    Ok(Outcome {
        table,
        manifest: Manifest::new("validate-tableau", json!({ "tableau": source })),
        status,
        notes: vec![note],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_flag_grammar() {
        assert_eq!(parse_complex("2").unwrap(), ComplexNum::new(2.0, 0.0));
        assert_eq!(parse_complex("-1.5, 0.25").unwrap(), ComplexNum::new(-1.5, 0.25));
        assert!(parse_complex("e^1.5").is_err());
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("nan").is_err());
    }

    #[test]
    fn param_grammar() {
        assert_eq!(parse_param("t_end=30").unwrap(), ("t_end".into(), 30.0));
        assert!(parse_param("t_end").is_err());
        assert!(parse_param("t_end=x").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::domain("x")), EXIT_DOMAIN);
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::StepCount { ratio: 1.5 }), EXIT_CONFIG);
        assert_eq!(
            exit_code(&Error::Syntax {
                offset: 0,
                expected: "x".into()
            }),
            EXIT_CONFIG
        );
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(main_with(["mulrk", "solve"]), EXIT_CONFIG);
        assert_eq!(main_with(["mulrk", "solve", "--problem", "sqrt", "--orhs", "1"]), EXIT_CONFIG);
        assert_eq!(main_with(["mulrk", "solve", "--problem", "sqrt", "--eps", "0.1"]), EXIT_CONFIG);
        assert_eq!(main_with(["mulrk", "frobnicate"]), EXIT_CONFIG);
    }

    #[test]
    fn config_errors_exit_2() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o.csv");
        let out = out.to_str().unwrap();
        assert_eq!(
            main_with(["mulrk", "solve", "--problem", "sqrt", "--h", "0.7", "-o", out]),
            EXIT_CONFIG
        );
        assert_eq!(
            main_with(["mulrk", "solve", "--problem", "nope", "-o", out]),
            EXIT_CONFIG
        );
        assert_eq!(
            main_with(["mulrk", "solve", "--mrhs", "exp(", "--h", "0.1", "--x-end", "1", "-o", out]),
            EXIT_CONFIG
        );
    }
}
