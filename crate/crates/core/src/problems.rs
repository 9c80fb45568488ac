//! Registry of benchmark problems, addressable by name.
//!
//! Every problem is built from named parameters so callers can override them
//! (`lookup_with`). Problems carry their ordinary form `y' = g(x, y)` and,
//! where known, the exact solution.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprparse::{parse, Expr};
use crate::geomcalc::{from_complex, ComplexNum, LogValue};
use crate::solvers::{reduce_higher_order, solve, step_count, MIvp, Method, Trajectory};

/// Tolerance of `consistency_check` on `|ln f - g / y|`.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Which right-hand side an expression defines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsKind {
    /// Multiplicative `y* = f(x, y)`.
    Mult,
    /// Ordinary `y' = g(x, y)`.
    Ordinary,
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub mivp: MIvp,
    /// Ordinary formulation used by the rk4 baseline when it differs from
    /// `mivp`'s own ordinary form.
    pub baseline: Option<MIvp>,
    pub default_h: f64,
    pub default_x_end: f64,
    /// Named constants in declaration order.
    pub params: Vec<(String, f64)>,
    pub provenance: String,
    /// Expression form of a scalar right-hand side.
    pub expr: Option<(RhsKind, String)>,
    /// Step size of the pinned reference solution for problems without a closed form.
    pub reference_h: Option<f64>,
}

impl ProblemSpec {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Problem to integrate with `method`: the baseline for rk4 when present.
    pub fn problem_for(&self, method: Method) -> &MIvp {
        match (method, &self.baseline) {
            (Method::Rk4, Some(b)) => b,
            _ => &self.mivp,
        }
    }

    /// MRK4 at `reference_h` over the default interval, for problems that have one.
    pub fn reference_trajectory(&self) -> Option<Result<Trajectory>> {
        let h = self.reference_h?;
        Some(solve(&self.mivp, Method::Mrk4, h, self.default_x_end, None))
    }
}

type Builder = fn(&Params) -> Result<ProblemSpec>;

struct Params(Vec<(String, f64)>);

impl Params {
    fn get(&self, name: &str) -> f64 {
        self.0
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
            .expect("builder asks only for declared parameters")
    }
}

struct Entry {
    name: &'static str,
    defaults: &'static [(&'static str, f64)],
    build: Builder,
}

const ENTRIES: [Entry; 4] = [
    Entry {
        name: "sqrt",
        defaults: &[("x0", 0.0), ("y0", 1.0)],
        build: build_sqrt,
    },
    Entry {
        name: "baranyi",
        defaults: &[
            ("lambda", 3.21),
            ("mu_max", 0.644),
            ("alpha", 4.0),
            ("y_max", 18.0),
            ("y0", 7.0),
            ("t_end", 25.0),
        ],
        build: build_baranyi,
    },
    Entry {
        name: "second_order",
        defaults: &[("alpha", 1.0), ("beta", 1.0), ("x0", 1.0)],
        build: build_second_order,
    },
    Entry {
        name: "root_cross",
        defaults: &[("x0", 0.0), ("y0", 1.0)],
        build: build_root_cross,
    },
];

fn c(re: f64) -> ComplexNum {
    ComplexNum::new(re, 0.0)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("parameter {name} = {v} must be positive")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("parameter {name} = {v} must be finite")))
    }
}

/// `y* = exp(1 / (2 y^2))`, exact `sqrt(y0^2 + x - x0)`.
fn build_sqrt(ps: &Params) -> Result<ProblemSpec> {
    let x0 = finite("x0", ps.get("x0"))?;
    let y0 = positive("y0", ps.get("y0"))?;
    let mivp = MIvp::new("sqrt", x0, vec![LogValue::from_positive(y0)?], |_x, y| {
        y.iter()
            .map(|v| LogValue::from_ln(0.5 * (-2.0 * v.ln()).exp()))
            .collect()
    })?
    .with_ordinary(|_x, y| Ok(y.iter().map(|y| 0.5 / y).collect()))?
    .with_exact(move |x| vec![(c(y0 * y0 + x - x0)).sqrt()]);
    Ok(ProblemSpec {
        name: "sqrt".into(),
        mivp,
        baseline: None,
        default_h: 0.3,
        default_x_end: x0 + 3.0,
        params: ps.0.clone(),
        provenance: "y* = exp(1/(2y^2)): a multiplicative problem whose right-hand side \
                     involves no exponential or logarithm of the solution"
            .into(),
        expr: Some((RhsKind::Mult, "exp(1/(2*y^2))".into())),
        reference_h: None,
    })
}

/// Baranyi growth `y' = mu (1 - e^(y - y_max)) / (1 + e^(-alpha (t - lambda)))`.
fn build_baranyi(ps: &Params) -> Result<ProblemSpec> {
    let lambda = finite("lambda", ps.get("lambda"))?;
    let mu = finite("mu_max", ps.get("mu_max"))?;
    let alpha = finite("alpha", ps.get("alpha"))?;
    let y_max = finite("y_max", ps.get("y_max"))?;
    let y0 = positive("y0", ps.get("y0"))?;
    let t_end = positive("t_end", ps.get("t_end"))?;
    let switch = move |t: f64| 1.0 / (1.0 + (-alpha * (t - lambda)).exp());

    let mivp = MIvp::new("baranyi", 0.0, vec![LogValue::from_positive(y0)?], move |t, y| {
        let s = switch(t);
        y.iter()
            .map(|v| {
                let yc = v.to_complex();
                let growth = mu * (1.0 - (yc - y_max).exp()) * s;
                LogValue::from_ln(growth * (-v.ln()).exp())
            })
            .collect()
    })?
    .with_ordinary(move |t, y| {
        let s = switch(t);
        Ok(y.iter().map(|y| mu * (1.0 - (y - y_max).exp()) * s).collect())
    })?;
    let expr = format!(
        "({mu:?})*(1-exp(y-({y_max:?})))/(1+exp(-({alpha:?})*(x-({lambda:?}))))"
    );
    Ok(ProblemSpec {
        name: "baranyi".into(),
        mivp,
        baseline: None,
        default_h: 0.1,
        default_x_end: t_end,
        params: ps.0.clone(),
        provenance: "Baranyi bacterial growth model with lag lambda, maximal rate mu_max, \
                     sharpness alpha and log carrying capacity y_max; no closed-form solution"
            .into(),
        expr: Some((RhsKind::Ordinary, expr)),
        reference_h: Some(0.01),
    })
}

/// `y** = e` as the system `y0* = y1`, `y1* = e`; exact `alpha exp(x^2/2 + beta x)`.
///
/// The rk4 baseline integrates `y'' = y'^2 / y + y` on the state `(y, y')`.
fn build_second_order(ps: &Params) -> Result<ProblemSpec> {
    let a = positive("alpha", ps.get("alpha"))?;
    let b = finite("beta", ps.get("beta"))?;
    let x0 = finite("x0", ps.get("x0"))?;
    let y = move |x: f64| a * (0.5 * x * x + b * x).exp();
    let ystar = move |x: f64| (x + b).exp();

    let mivp = reduce_higher_order("second_order", x0, (c(y(x0)), c(ystar(x0))), |_x, _y, _ys| {
        LogValue::new(1.0, 0.0)
    })?
    .with_ordinary(|_x, s| Ok(vec![s[0] * s[1].ln(), s[1]]))?
    .with_exact(move |x| vec![c(y(x)), c(ystar(x))]);

    let y0 = y(x0);
    let baseline = MIvp::from_ordinary("second_order", x0, &[c(y0), c(y0 * (x0 + b))], |_x, s| {
        Ok(vec![s[1], s[1] * s[1] / s[0] + s[0]])
    })?
    .with_exact(move |x| vec![c(y(x)), c(y(x) * (x + b))]);

    Ok(ProblemSpec {
        name: "second_order".into(),
        mivp,
        baseline: Some(baseline),
        default_h: 0.25,
        default_x_end: x0 + 0.75,
        params: ps.0.clone(),
        provenance: "second-order problem y** = e reduced to a first-order system; \
                     ordinary counterpart y'' = y'^2/y + y"
            .into(),
        expr: None,
        reference_h: None,
    })
}

/// `y' = -1`, exact `y0 - (x - x0)`; crosses zero at `x0 + y0`.
fn build_root_cross(ps: &Params) -> Result<ProblemSpec> {
    let x0 = finite("x0", ps.get("x0"))?;
    let y0 = finite("y0", ps.get("y0"))?;
    if y0 == 0.0 {
        return Err(Error::Config("parameter y0 must be nonzero".into()));
    }
    let mivp = MIvp::from_ordinary("root_cross", x0, &[c(y0)], |_x, y| {
        Ok(vec![c(-1.0); y.len()])
    })?
    .with_exact(move |x| vec![c(y0 - (x - x0))]);
    Ok(ProblemSpec {
        name: "root_cross".into(),
        mivp,
        baseline: None,
        default_h: 0.05,
        default_x_end: x0 + 2.0,
        params: ps.0.clone(),
        provenance: "linear decay through a root; exercises the ordinary bypass".into(),
        expr: Some((RhsKind::Ordinary, "-1".into())),
        reference_h: None,
    })
}

/// All problems with default parameters.
pub fn registry() -> Vec<ProblemSpec> {
    ENTRIES
        .iter()
        .map(|e| lookup(e.name).expect("default parameters are valid"))
        .collect()
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn lookup(name: &str) -> Result<ProblemSpec> {
    lookup_with(name, &[])
}

/// Builds `name` with some parameters replaced.
pub fn lookup_with(name: &str, overrides: &[(String, f64)]) -> Result<ProblemSpec> {
    let entry = ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| {
        Error::Config(format!(
            "unknown problem `{name}` (known: {})",
            names().join(", ")
        ))
    })?;
    let mut params: Vec<(String, f64)> = entry
        .defaults
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
    for (k, v) in overrides {
        match params.iter_mut().find(|(p, _)| p == k) {
            Some(slot) => slot.1 = *v,
            None => {
                return Err(Error::Config(format!(
                    "problem `{name}` has no parameter `{k}` (parameters: {})",
                    entry
                        .defaults
                        .iter()
                        .map(|(k, _)| *k)
                        .collect::<Vec<_>>()
                        .join(", ")
                )))
            }
        }
    }
    (entry.build)(&Params(params))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyViolation {
    pub x: f64,
    pub gap: f64,
}

/// Points where `exp(g / y)` and `f` disagree by more than [`CONSISTENCY_TOL`],
/// sampled evenly along the exact solution (or an MRK4 solution at the
/// default step when there is none). Roots of the exact solution are skipped.
pub fn consistency_check(spec: &ProblemSpec, sample_count: usize) -> Result<Vec<ConsistencyViolation>> {
    let p = &spec.mivp;
    if !p.has_ordinary() {
        return Err(Error::Config(format!(
            "problem `{}` has no ordinary form to compare",
            spec.name
        )));
    }
    let n = step_count(p.x0(), spec.default_h, spec.default_x_end)?;
    let numeric = match p.exact_fn() {
        Some(_) => None,
        None => Some(solve(p, Method::Mrk4, spec.default_h, spec.default_x_end, None)?),
    };
    let mut out = Vec::new();
    for i in 0..sample_count {
        // evenly spread over the grid, endpoints included
        let j = if sample_count > 1 { i * n / (sample_count - 1) } else { 0 };
        let (x, y) = match &numeric {
            Some(t) => {
                let s = &t.samples[j];
                (s.x, s.state.as_log().expect("mrk4 states are multiplicative").to_vec())
            }
            None => {
                let x = p.x0() + (spec.default_x_end - p.x0()) * j as f64 / n as f64;
                let ex = p.exact(x).expect("checked above");
                // y* is undefined at a root
                if ex.iter().any(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                let y = ex
                    .into_iter()
                    .map(|z| from_complex(z, None))
                    .collect::<Result<Vec<_>>>()?;
                (x, y)
            }
        };
        let gap = p.consistency_gap(x, &y)?.expect("ordinary form present");
        if !(gap <= CONSISTENCY_TOL) {
            out.push(ConsistencyViolation { x, gap });
        }
    }
    Ok(out)
}

/// Scalar problem from a user expression.
///
/// A multiplicative right-hand side of the form `exp(u)` is evaluated as
/// `ln f = u` without leaving log coordinates; other forms take the
/// principal logarithm of `f`.
pub fn from_expression(kind: RhsKind, src: &str, x0: f64, y0: ComplexNum) -> Result<MIvp> {
    let expr = parse(src)?;
    let name = src.trim().to_string();
    match kind {
        RhsKind::Ordinary => MIvp::from_ordinary(name, x0, &[y0], move |x, y| {
            y.iter().map(|&y| expr.eval(x, y)).collect()
        }),
        RhsKind::Mult => {
            let y0 = from_complex(y0, None)?;
            let ln_f: Box<dyn Fn(f64, ComplexNum) -> Result<ComplexNum> + Send + Sync> =
                match expr.exp_argument().cloned() {
                    Some(u) => Box::new(move |x, y| u.eval(x, y)),
                    None => Box::new(move |x, y| {
                        let f = expr.eval(x, y)?;
                        Ok(from_complex(f, None)?.ln())
                    }),
                };
            MIvp::new(name, x0, vec![y0], move |x, y| {
                y.iter()
                    .map(|v| LogValue::from_ln(ln_f(x, v.to_complex())?))
                    .collect()
            })
        }
    }
}

/// Same as [`from_expression`] with an already parsed tree; used by tests
/// comparing registry closures with their expression forms.
pub fn expr_rhs(kind: RhsKind, expr: &Expr, x: f64, y: LogValue) -> Result<LogValue> {
    let yc = y.to_complex();
    match kind {
        RhsKind::Ordinary => LogValue::from_ln(expr.eval(x, yc)? * (-y.ln()).exp()),
        RhsKind::Mult => match expr.exp_argument() {
            Some(u) => LogValue::from_ln(u.eval(x, yc)?),
            None => from_complex(expr.eval(x, yc)?, None),
        },
    }
}
