//! C ABI for the mulrk solvers.
//!
//! Problems and trajectories are opaque heap handles owned by the caller and
//! released with the matching `_free` function. Every entry point returns a
//! [`MulrkStatus`]; on failure `mulrk_last_error` describes the cause on the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mulrk::hybrid::{solve_hybrid, HybridConfig};
use mulrk::problems::{self, from_expression, ProblemSpec, RhsKind};
use mulrk::solvers::{solve, MIvp, Method, Trajectory};
use mulrk::{ComplexNum, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulrkStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Bad argument, unknown name, or a step grid that does not divide the interval.
    InvalidArgument = 2,
    /// The multiplicative representation broke down (typically at a root).
    Domain = 3,
    /// Expression could not be parsed.
    Syntax = 4,
    /// Index outside the trajectory.
    OutOfRange = 5,
    /// Internal error; the library caught a panic.
    Internal = 6,
}

pub const MULRK_METHOD_MRK2: c_int = 0;
pub const MULRK_METHOD_MRK4: c_int = 1;
pub const MULRK_METHOD_RK4: c_int = 2;

/// `rhs_kind` of `mulrk_problem_from_expr`: multiplicative f(x, y).
pub const MULRK_RHS_MULT: c_int = 0;
/// `rhs_kind` of `mulrk_problem_from_expr`: ordinary g(x, y).
pub const MULRK_RHS_ORDINARY: c_int = 1;

/// Opaque problem handle.
pub struct MulrkProblem {
    spec: Option<ProblemSpec>,
    mivp: MIvp,
}

/// Opaque trajectory handle.
pub struct MulrkTrajectory {
    traj: Trajectory,
}

/// Root-bypass settings.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MulrkHybridConfig {
    /// Hand over to RK4 when any |y| falls below this.
    pub zero_threshold: f64,
    /// Minimum RK4 steps before handing back.
    pub min_ordinary_steps: usize,
    /// Hand back once every |y| exceeds rearm_factor * zero_threshold.
    pub rearm_factor: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Fail(MulrkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Domain { .. } | Error::UnrecoverableZero { .. } | Error::Eval(_) => {
                MulrkStatus::Domain
            }
            Error::Syntax { .. } | Error::UnknownIdentifier { .. } => MulrkStatus::Syntax,
            _ => MulrkStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MulrkStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(MulrkStatus::InvalidArgument, msg.into())
}

/// Runs `f`, recording any failure for `mulrk_last_error`.
fn guard<F>(f: F) -> MulrkStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MulrkStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error: panic caught at the C boundary");
            MulrkStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

fn method_arg(m: c_int) -> Result<Method, Fail> {
    match m {
        MULRK_METHOD_MRK2 => Ok(Method::Mrk2),
        MULRK_METHOD_MRK4 => Ok(Method::Mrk4),
        MULRK_METHOD_RK4 => Ok(Method::Rk4),
        other => Err(invalid(format!("unknown method code {other}"))),
    }
}

fn method_code(m: Method) -> c_int {
    match m {
        Method::Mrk2 => MULRK_METHOD_MRK2,
        Method::Mrk4 => MULRK_METHOD_MRK4,
        Method::Rk4 => MULRK_METHOD_RK4,
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Looks up a registered problem, optionally overriding `n_params` named
/// parameters (`keys[i] = values[i]`). `keys`/`values` may be null when
/// `n_params` is 0.
///
/// # Safety
/// `name` and every `keys[i]` must be NUL-terminated strings; `keys` and
/// `values` must hold `n_params` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mulrk_problem_from_registry(
    name: *const c_char,
    keys: *const *const c_char,
    values: *const f64,
    n_params: usize,
    out: *mut *mut MulrkProblem,
) -> MulrkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let name = str_arg(name, "name")?;
        let mut overrides = Vec::with_capacity(n_params);
        if n_params > 0 {
            if keys.is_null() || values.is_null() {
                return Err(null("keys or values"));
            }
            for i in 0..n_params {
                let k = str_arg(*keys.add(i), "parameter name")?;
                overrides.push((k.to_string(), *values.add(i)));
            }
        }
        let spec = problems::lookup_with(name, &overrides)?;
        put(
            out,
            MulrkProblem {
                mivp: spec.mivp.clone(),
                spec: Some(spec),
            },
        );
        Ok(())
    })
}

/// Scalar problem from an expression in `x` and `y`.
///
/// # Safety
/// `expr` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mulrk_problem_from_expr(
    rhs_kind: c_int,
    expr: *const c_char,
    x0: f64,
    y0_re: f64,
    y0_im: f64,
    out: *mut *mut MulrkProblem,
) -> MulrkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let kind = match rhs_kind {
            MULRK_RHS_MULT => RhsKind::Mult,
            MULRK_RHS_ORDINARY => RhsKind::Ordinary,
            other => return Err(invalid(format!("unknown rhs kind {other}"))),
        };
        let src = str_arg(expr, "expr")?;
        let mivp = from_expression(kind, src, x0, ComplexNum::new(y0_re, y0_im))?;
        put(out, MulrkProblem { spec: None, mivp });
        Ok(())
    })
}

/// Default step and end point of a registered problem.
///
/// # Safety
/// `problem` must come from this library; `h` and `x_end` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mulrk_problem_defaults(
    problem: *const MulrkProblem,
    h: *mut f64,
    x_end: *mut f64,
) -> MulrkStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if h.is_null() || x_end.is_null() {
            return Err(null("h or x_end"));
        }
        let spec = p
            .spec
            .as_ref()
            .ok_or_else(|| invalid("expression problems have no defaults"))?;
        *h = spec.default_h;
        *x_end = spec.default_x_end;
        Ok(())
    })
}

/// State dimension, or 0 for a null handle.
///
/// # Safety
/// `problem` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn mulrk_problem_dim(problem: *const MulrkProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.mivp.dim())
}

/// # Safety
/// `problem` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mulrk_problem_free(problem: *mut MulrkProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Integrates on the grid `x0, x0 + h, ..., x_end`. For registered
/// second-order problems `MULRK_METHOD_RK4` integrates the ordinary system.
///
/// # Safety
/// `problem` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn mulrk_solve(
    problem: *const MulrkProblem,
    method: c_int,
    h: f64,
    x_end: f64,
    out: *mut *mut MulrkTrajectory,
) -> MulrkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let method = method_arg(method)?;
        let target = match &p.spec {
            Some(s) => s.problem_for(method),
            None => &p.mivp,
        };
        let traj = solve(target, method, h, x_end, None)?;
        put(out, MulrkTrajectory { traj });
        Ok(())
    })
}

/// Default root-bypass settings for `problem`.
///
/// # Safety
/// `problem` must come from this library and `cfg` be writable.
#[no_mangle]
pub unsafe extern "C" fn mulrk_hybrid_default(
    problem: *const MulrkProblem,
    cfg: *mut MulrkHybridConfig,
) -> MulrkStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        let d = HybridConfig::for_problem(&p.mivp);
        *cfg = MulrkHybridConfig {
            zero_threshold: d.zero_threshold,
            min_ordinary_steps: d.min_ordinary_steps,
            rearm_factor: d.rearm_factor,
        };
        Ok(())
    })
}

/// MRK4 with an ordinary RK4 bypass around roots. `cfg` may be null for defaults.
///
/// # Safety
/// `problem` must come from this library, `cfg` be null or readable, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mulrk_solve_hybrid(
    problem: *const MulrkProblem,
    h: f64,
    x_end: f64,
    cfg: *const MulrkHybridConfig,
    out: *mut *mut MulrkTrajectory,
) -> MulrkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let cfg = match cfg.as_ref() {
            Some(c) => HybridConfig::new(c.zero_threshold, c.min_ordinary_steps, c.rearm_factor)?,
            None => HybridConfig::for_problem(&p.mivp),
        };
        let traj = solve_hybrid(&p.mivp, h, x_end, &cfg)?;
        put(out, MulrkTrajectory { traj });
        Ok(())
    })
}

/// Number of samples (steps + 1), or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn mulrk_trajectory_len(traj: *const MulrkTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.traj.len())
}

/// State dimension, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn mulrk_trajectory_dim(traj: *const MulrkTrajectory) -> usize {
    traj.as_ref()
        .and_then(|t| t.traj.samples.first())
        .map_or(0, |s| s.state.dim())
}

/// Sample `index`, component `component`. Any of the output pointers may be
/// null. `method` receives the `MULRK_METHOD_*` code of the producing scheme.
///
/// # Safety
/// `traj` must come from this library; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mulrk_trajectory_sample(
    traj: *const MulrkTrajectory,
    index: usize,
    component: usize,
    x: *mut f64,
    re: *mut f64,
    im: *mut f64,
    method: *mut c_int,
) -> MulrkStatus {
    guard(|| {
        let t = &traj.as_ref().ok_or_else(|| null("traj"))?.traj;
        let s = t.samples.get(index).ok_or_else(|| {
            Fail(
                MulrkStatus::OutOfRange,
                format!("sample {index} of {}", t.len()),
            )
        })?;
        let v = s.state.to_complex();
        let v = v.get(component).ok_or_else(|| {
            Fail(
                MulrkStatus::OutOfRange,
                format!("component {component} of {}", v.len()),
            )
        })?;
        if let Some(x) = x.as_mut() {
            *x = s.x;
        }
        if let Some(re) = re.as_mut() {
            *re = v.re;
        }
        if let Some(im) = im.as_mut() {
            *im = v.im;
        }
        if let Some(m) = method.as_mut() {
            *m = method_code(s.method);
        }
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mulrk_trajectory_free(traj: *mut MulrkTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn mulrk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mulrk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
