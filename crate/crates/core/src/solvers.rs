//! Fixed-step multiplicative Runge-Kutta solvers and the ordinary RK4 baseline.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomcalc::{from_complex, mmul, mpow, ratio_to_state, ComplexNum, LogValue};
use crate::tableau::{classical_mrk4, multiplicative_heun, MButcherTableau};

/// `(x, y) -> y*`, returned as log coordinates of each component.
pub type MultRhs = Arc<dyn Fn(f64, &[LogValue]) -> Result<Vec<LogValue>> + Send + Sync>;
/// `(x, y) -> y'`
pub type OrdRhs = Arc<dyn Fn(f64, &[ComplexNum]) -> Result<Vec<ComplexNum>> + Send + Sync>;
pub type ExactFn = Arc<dyn Fn(f64) -> Vec<ComplexNum> + Send + Sync>;

/// Registration-time tolerance for `f = exp(g / y)`.
const CONSISTENCY_TOL: f64 = 1e-10;

/// Relative slack when checking that the step grid divides the interval.
const GRID_TOL: f64 = 1e-9;

/// Multiplicative initial value problem `y* = f(x, y)`, `y(x0) = y0`.
#[derive(Clone)]
pub struct MIvp {
    name: String,
    x0: f64,
    y0: Vec<LogValue>,
    f_mult: MultRhs,
    g_ord: Option<OrdRhs>,
    exact: Option<ExactFn>,
}

impl fmt::Debug for MIvp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MIvp")
            .field("name", &self.name)
            .field("x0", &self.x0)
            .field("y0", &self.y0)
            .field("ordinary", &self.g_ord.is_some())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl MIvp {
    pub fn new<F>(name: impl Into<String>, x0: f64, y0: Vec<LogValue>, f_mult: F) -> Result<Self>
    where
        F: Fn(f64, &[LogValue]) -> Result<Vec<LogValue>> + Send + Sync + 'static,
    {
        if y0.is_empty() {
            return Err(Error::Config("problem dimension must be at least 1".into()));
        }
        if !x0.is_finite() {
            return Err(Error::Config(format!("x0 = {x0} is not finite")));
        }
        Ok(MIvp {
            name: name.into(),
            x0,
            y0,
            f_mult: Arc::new(f_mult),
            g_ord: None,
            exact: None,
        })
    }

    /// Builds the multiplicative problem `y* = exp(g / y)` from an ordinary
    /// one `y' = g(x, y)`, keeping `g` for the baseline and root bypass.
    pub fn from_ordinary<G>(
        name: impl Into<String>,
        x0: f64,
        y0: &[ComplexNum],
        g: G,
    ) -> Result<Self>
    where
        G: Fn(f64, &[ComplexNum]) -> Result<Vec<ComplexNum>> + Send + Sync + 'static,
    {
        let y0 = y0
            .iter()
            .map(|&z| from_complex(z, None))
            .collect::<Result<Vec<_>>>()?;
        let g: OrdRhs = Arc::new(g);
        let g_for_f = Arc::clone(&g);
        let f = move |x: f64, y: &[LogValue]| -> Result<Vec<LogValue>> {
            let yc: Vec<ComplexNum> = y.iter().map(LogValue::to_complex).collect();
            let gv = g_for_f(x, &yc)?;
            gv.iter()
                .zip(y)
                .map(|(g, y)| {
                    let w = ratio_to_state(*g, y);
                    if !w.re.is_finite() || !w.im.is_finite() {
                        return Err(Error::domain(format!(
                            "y* = exp(g / y) is not finite for |y| = {:e}",
                            y.modulus()
                        )));
                    }
                    LogValue::from_ln(w)
                })
                .collect()
        };
        let mut p = MIvp::new(name, x0, y0, f)?;
        p.g_ord = Some(g);
        Ok(p)
    }

    /// Attaches the ordinary form, checking `f = exp(g / y)` at a handful of
    /// points around the initial state.
    pub fn with_ordinary<G>(self, g: G) -> Result<Self>
    where
        G: Fn(f64, &[ComplexNum]) -> Result<Vec<ComplexNum>> + Send + Sync + 'static,
    {
        let p = self.with_ordinary_unchecked(g);
        for (dx, scale) in [(0.0, 1.0), (0.1, 0.9), (0.2, 1.1)] {
            let x = p.x0 + dx;
            let y: Vec<LogValue> = p
                .y0
                .iter()
                .map(|v| mmul(*v, LogValue::from_positive(scale).unwrap()))
                .collect();
            if let Some(worst) = p.consistency_gap(x, &y)? {
                if worst > CONSISTENCY_TOL {
                    return Err(Error::Config(format!(
                        "multiplicative and ordinary forms of `{}` disagree by {worst:e} at x = {x}",
                        p.name
                    )));
                }
            }
        }
        Ok(p)
    }

    pub fn with_ordinary_unchecked<G>(mut self, g: G) -> Self
    where
        G: Fn(f64, &[ComplexNum]) -> Result<Vec<ComplexNum>> + Send + Sync + 'static,
    {
        self.g_ord = Some(Arc::new(g));
        self
    }

    pub fn with_exact<E>(mut self, exact: E) -> Self
    where
        E: Fn(f64) -> Vec<ComplexNum> + Send + Sync + 'static,
    {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> &[LogValue] {
        &self.y0
    }

    pub fn has_ordinary(&self) -> bool {
        self.g_ord.is_some()
    }

    pub fn exact_fn(&self) -> Option<&ExactFn> {
        self.exact.as_ref()
    }

    pub fn exact(&self, x: f64) -> Option<Vec<ComplexNum>> {
        self.exact.as_ref().map(|e| e(x))
    }

    /// `f(x, y)` with shape and finiteness checks.
    pub fn eval_mult(&self, x: f64, y: &[LogValue]) -> Result<Vec<LogValue>> {
        let f = (self.f_mult)(x, y).map_err(|e| e.at(x))?;
        if f.len() != y.len() {
            return Err(Error::Config(format!(
                "right-hand side of `{}` returned {} components for a {}-dimensional state",
                self.name,
                f.len(),
                y.len()
            )));
        }
        if let Some(bad) = f.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                x: Some(x),
                msg: format!("multiplicative derivative is not finite ({bad:?})"),
            });
        }
        Ok(f)
    }

    /// `g(x, y)`; derived as `y ln f(x, y)` when no ordinary form was given.
    pub fn eval_ordinary(&self, x: f64, y: &[ComplexNum]) -> Result<Vec<ComplexNum>> {
        let g = match &self.g_ord {
            Some(g) => g(x, y).map_err(|e| e.at(x))?,
            None => {
                let lifted = y
                    .iter()
                    .map(|&z| from_complex(z, None))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| e.at(x))?;
                let f = self.eval_mult(x, &lifted)?;
                y.iter().zip(&f).map(|(y, f)| y * f.ln()).collect()
            }
        };
        if g.len() != y.len() {
            return Err(Error::Config(format!(
                "ordinary right-hand side of `{}` has the wrong dimension",
                self.name
            )));
        }
        if let Some(bad) = g.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain {
                x: Some(x),
                msg: format!("ordinary derivative is not finite ({bad})"),
            });
        }
        Ok(g)
    }

    /// Largest `|ln f - g / y|` over components at `(x, y)`, or `None` when
    /// the problem has no explicit ordinary form.
    pub fn consistency_gap(&self, x: f64, y: &[LogValue]) -> Result<Option<f64>> {
        let Some(g) = &self.g_ord else {
            return Ok(None);
        };
        let f = self.eval_mult(x, y)?;
        let yc: Vec<ComplexNum> = y.iter().map(LogValue::to_complex).collect();
        let gv = g(x, &yc)?;
        let worst = f
            .iter()
            .zip(gv.iter().zip(y))
            .map(|(f, (g, y))| (f.ln() - ratio_to_state(*g, y)).norm())
            .fold(0.0, f64::max);
        Ok(Some(worst))
    }
}

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mrk2,
    Mrk4,
    Rk4,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Mrk2, Method::Mrk4, Method::Rk4];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mrk2 => "mrk2",
            Method::Mrk4 => "mrk4",
            Method::Rk4 => "rk4",
        }
    }

    pub fn default_tableau(self) -> Option<MButcherTableau> {
        match self {
            Method::Mrk2 => Some(multiplicative_heun()),
            Method::Mrk4 => Some(classical_mrk4()),
            Method::Rk4 => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mrk2" => Ok(Method::Mrk2),
            "mrk4" => Ok(Method::Mrk4),
            "rk4" => Ok(Method::Rk4),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// Solver state at a grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum State {
    /// Multiplicative representation with tracked phase.
    Log(Vec<LogValue>),
    /// Plain complex values, used inside a root-bypass band where zero is allowed.
    Ordinary(Vec<ComplexNum>),
}

impl State {
    pub fn to_complex(&self) -> Vec<ComplexNum> {
        match self {
            State::Log(v) => v.iter().map(LogValue::to_complex).collect(),
            State::Ordinary(v) => v.clone(),
        }
    }

    pub fn as_log(&self) -> Option<&[LogValue]> {
        match self {
            State::Log(v) => Some(v),
            State::Ordinary(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            State::Log(v) => v.len(),
            State::Ordinary(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub x: f64,
    pub state: State,
    /// Scheme that produced this sample (the starting scheme for the first one).
    pub method: Method,
    /// Set on the first sample after a switch between schemes.
    pub handover: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub problem: String,
    pub h: f64,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.samples.len().saturating_sub(1)
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has its initial sample")
    }

    pub fn xs(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    /// Complex values of one component along the trajectory.
    pub fn component(&self, k: usize) -> Vec<ComplexNum> {
        self.samples.iter().map(|s| s.state.to_complex()[k]).collect()
    }

    pub fn methods(&self) -> Vec<Method> {
        self.samples.iter().map(|s| s.method).collect()
    }
}

/// Number of steps of size `h` from `x0` to `x_end`.
pub fn step_count(x0: f64, h: f64, x_end: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Config(format!("step size h = {h} must be positive")));
    }
    let ratio = (x_end - x0) / h;
    let n = ratio.round();
    if !(n >= 1.0) || (ratio - n).abs() > GRID_TOL * n.max(1.0) {
        return Err(Error::StepCount { ratio });
    }
    Ok(n as usize)
}

/// Grid abscissa `i`; the last one is pinned to `x_end`.
pub(crate) fn grid_x(x0: f64, h: f64, i: usize, n: usize, x_end: f64) -> f64 {
    if i == n {
        x_end
    } else {
        x0 + i as f64 * h
    }
}

fn check_state(x: f64, y: &[LogValue]) -> Result<()> {
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain {
            x: Some(x),
            msg: format!("stage state is not finite ({bad:?})"),
        });
    }
    Ok(())
}

/// One explicit multiplicative step under any tableau, in log coordinates.
pub fn mrk_step(
    p: &MIvp,
    x: f64,
    y: &[LogValue],
    h: f64,
    t: &MButcherTableau,
) -> Result<Vec<LogValue>> {
    let s = t.stages();
    let mut stages: Vec<Vec<LogValue>> = Vec::with_capacity(s);
    for i in 0..s {
        let row = &t.exponents()[i];
        let stage_state: Vec<LogValue> = (0..y.len())
            .map(|k| {
                row.iter()
                    .zip(&stages)
                    .filter(|(q, _)| **q != 0.0)
                    .fold(y[k], |acc, (q, f)| mmul(acc, mpow(f[k], q * h)))
            })
            .collect();
        let xi = x + t.nodes()[i] * h;
        check_state(xi, &stage_state)?;
        stages.push(p.eval_mult(xi, &stage_state).map_err(|e| e.at(x))?);
    }
    let next: Vec<LogValue> = (0..y.len())
        .map(|k| {
            t.weights()
                .iter()
                .zip(&stages)
                .filter(|(w, _)| **w != 0.0)
                .fold(y[k], |acc, (w, f)| mmul(acc, mpow(f[k], w * h)))
        })
        .collect();
    check_state(x, &next)?;
    Ok(next)
}

fn expect_stages(t: &MButcherTableau, s: usize) -> Result<()> {
    if t.stages() != s {
        return Err(Error::Shape(format!(
            "expected a {s}-stage tableau, got {}",
            t.stages()
        )));
    }
    Ok(())
}

/// Two-stage step `y f0^(ah) f1^(bh)`.
pub fn mrk2_step(
    p: &MIvp,
    x: f64,
    y: &[LogValue],
    h: f64,
    t: &MButcherTableau,
) -> Result<Vec<LogValue>> {
    expect_stages(t, 2)?;
    mrk_step(p, x, y, h, t)
}

/// Four-stage step `y f0^(ah) f1^(bh) f2^(ch) f3^(dh)`.
pub fn mrk4_step(
    p: &MIvp,
    x: f64,
    y: &[LogValue],
    h: f64,
    t: &MButcherTableau,
) -> Result<Vec<LogValue>> {
    expect_stages(t, 4)?;
    mrk_step(p, x, y, h, t)
}

fn axpy(y: &[ComplexNum], a: f64, k: &[ComplexNum]) -> Vec<ComplexNum> {
    y.iter().zip(k).map(|(y, k)| y + k * a).collect()
}

/// Classical RK4 on `y' = g(x, y)`.
pub fn rk4_step(p: &MIvp, x: f64, y: &[ComplexNum], h: f64) -> Result<Vec<ComplexNum>> {
    let k1 = p.eval_ordinary(x, y)?;
    rk4_step_from_slope(p, x, y, h, k1)
}

/// RK4 step whose first slope is already known (e.g. `y ln y*` at a handover).
pub(crate) fn rk4_step_from_slope(
    p: &MIvp,
    x: f64,
    y: &[ComplexNum],
    h: f64,
    k1: Vec<ComplexNum>,
) -> Result<Vec<ComplexNum>> {
    let k2 = p.eval_ordinary(x + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = p.eval_ordinary(x + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = p.eval_ordinary(x + h, &axpy(y, h, &k3))?;
    Ok(y.iter()
        .enumerate()
        .map(|(i, y)| y + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0))
        .collect())
}

/// Lifts an ordinary state back to log coordinates, continuing each phase
/// from `prev`.
pub(crate) fn lift_state(x: f64, y: &[ComplexNum], prev: &[LogValue]) -> Result<Vec<LogValue>> {
    y.iter()
        .zip(prev)
        .map(|(&z, hint)| from_complex(z, Some(hint)))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at(x))
}

/// A single step of `method` from a log-coordinate state.
pub fn step(
    p: &MIvp,
    method: Method,
    x: f64,
    y: &[LogValue],
    h: f64,
    tableau: Option<&MButcherTableau>,
) -> Result<Vec<LogValue>> {
    match method {
        Method::Rk4 => {
            let yc: Vec<ComplexNum> = y.iter().map(LogValue::to_complex).collect();
            let next = rk4_step(p, x, &yc, h)?;
            lift_state(x + h, &next, y)
        }
        Method::Mrk2 => match tableau {
            Some(t) => mrk2_step(p, x, y, h, t),
            None => mrk2_step(p, x, y, h, &multiplicative_heun()),
        },
        Method::Mrk4 => match tableau {
            Some(t) => mrk4_step(p, x, y, h, t),
            None => mrk4_step(p, x, y, h, &classical_mrk4()),
        },
    }
}

/// Integrates `p` on the fixed grid `x0, x0 + h, ..., x_end`.
///
/// For `rk4` the ordinary states are lifted to log coordinates at output.
/// A failing step reports the grid point it started from.
pub fn solve(
    p: &MIvp,
    method: Method,
    h: f64,
    x_end: f64,
    tableau: Option<&MButcherTableau>,
) -> Result<Trajectory> {
    let n = step_count(p.x0, h, x_end)?;
    let owned;
    let tableau = match (tableau, method) {
        (Some(t), _) => Some(t),
        (None, Method::Rk4) => None,
        (None, m) => {
            owned = m.default_tableau();
            owned.as_ref()
        }
    };
    match (method, tableau) {
        (Method::Mrk2, Some(t)) => expect_stages(t, 2)?,
        (Method::Mrk4, Some(t)) => expect_stages(t, 4)?,
        _ => {}
    }

    let mut samples = Vec::with_capacity(n + 1);
    samples.push(Sample {
        x: p.x0,
        state: State::Log(p.y0.clone()),
        method,
        handover: false,
    });
    let mut y = p.y0.clone();
    let mut yc: Vec<ComplexNum> = y.iter().map(LogValue::to_complex).collect();
    for i in 0..n {
        let x = grid_x(p.x0, h, i, n, x_end);
        let x_next = grid_x(p.x0, h, i + 1, n, x_end);
        y = match method {
            Method::Rk4 => {
                // keep the ordinary state unrounded between steps
                yc = rk4_step(p, x, &yc, h).map_err(|e| e.at(x))?;
                lift_state(x_next, &yc, &y)?
            }
            _ => mrk_step(p, x, &y, h, tableau.expect("multiplicative method has a tableau"))
                .map_err(|e| e.at(x))?,
        };
        samples.push(Sample {
            x: x_next,
            state: State::Log(y.clone()),
            method,
            handover: false,
        });
    }
    Ok(Trajectory {
        problem: p.name.clone(),
        h,
        samples,
    })
}

/// Dimension-2 system `y0* = y1`, `y1* = f(x, y0, y1)` for `y** = f(x, y, y*)`.
pub fn reduce_higher_order<F>(
    name: impl Into<String>,
    x0: f64,
    ics: (ComplexNum, ComplexNum),
    f: F,
) -> Result<MIvp>
where
    F: Fn(f64, LogValue, LogValue) -> Result<LogValue> + Send + Sync + 'static,
{
    let y0 = from_complex(ics.0, None)?;
    let y1 = from_complex(ics.1, None)?;
    MIvp::new(name, x0, vec![y0, y1], move |x, y| Ok(vec![y[1], f(x, y[0], y[1])?]))
}
