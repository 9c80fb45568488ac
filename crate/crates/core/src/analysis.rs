//! Multiplicative error metrics, empirical convergence order, bound checks
//! and the time-versus-error sweep.
//!
//! The global error is the ratio `e = eta / y` of numerical to exact value.
//! Two scalar views are reported: `log_error = |ln e|` (phase taken on the
//! branch nearest the numerical value) and the fraction `rel_error = |e - 1|`.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geomcalc::{from_complex, mpow, ComplexNum, LogValue};
use crate::report::{Cell, Table};
use crate::solvers::{mrk4_step, solve, step, step_count, MIvp, Method, Sample, State, Trajectory};
use crate::tableau::{classical_mrk4, MButcherTableau};

/// Errors below this are treated as the rounding floor.
pub const ERROR_FLOOR: f64 = 1e-14;
pub const MIN_REF_SUBSTEPS: usize = 64;
pub const MIN_REPEATS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub x: f64,
    pub eta: ComplexNum,
    pub y_exact: ComplexNum,
    /// `eta / y`; absent when the numerical value is exactly zero.
    pub mult_error: Option<LogValue>,
    pub log_error: f64,
    pub rel_error: f64,
}

/// `exp(w) - 1` without cancellation for small `w`.
fn exp_m1(w: ComplexNum) -> ComplexNum {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    ComplexNum::new(
        w.re.exp_m1() * c - 2.0 * half * half,
        w.re.exp() * s,
    )
}

/// Error of one component of one sample against the exact value `y`.
pub fn error_record(sample: &Sample, k: usize, y: ComplexNum) -> Result<ErrorRecord> {
    let x = sample.x;
    let (eta, eta_log) = match &sample.state {
        State::Log(v) => (v[k].to_complex(), Some(v[k])),
        State::Ordinary(v) => {
            let z = v[k];
            let lifted = if z.re == 0.0 && z.im == 0.0 {
                None
            } else {
                Some(from_complex(z, None).map_err(|e| e.at(x))?)
            };
            (z, lifted)
        }
    };
    if y.re == 0.0 && y.im == 0.0 {
        return Err(Error::Domain {
            x: Some(x),
            msg: "exact solution vanishes; the multiplicative error is undefined".into(),
        });
    }
    let Some(eta_log) = eta_log else {
        return Ok(ErrorRecord {
            x,
            eta,
            y_exact: y,
            mult_error: None,
            log_error: f64::INFINITY,
            rel_error: 1.0,
        });
    };
    let y_log = from_complex(y, Some(&eta_log)).map_err(|e| e.at(x))?;
    let e = eta_log / y_log;
    Ok(ErrorRecord {
        x,
        eta,
        y_exact: y,
        mult_error: Some(e),
        log_error: e.ln().norm(),
        rel_error: exp_m1(e.ln()).norm(),
    })
}

/// One record per sample for component `k`.
pub fn global_error<E>(traj: &Trajectory, exact: E, k: usize) -> Result<Vec<ErrorRecord>>
where
    E: Fn(f64) -> Vec<ComplexNum>,
{
    traj.samples
        .iter()
        .map(|s| {
            let y = exact(s.x);
            let yk = *y.get(k).ok_or_else(|| {
                Error::Shape(format!("exact solution has no component {k}"))
            })?;
            error_record(s, k, yk)
        })
        .collect()
}

/// Largest `rel_error` over all components at the final sample.
pub fn final_rel_error(p: &MIvp, traj: &Trajectory) -> Result<f64> {
    let exact = p
        .exact(traj.last().x)
        .ok_or_else(|| Error::Config(format!("problem `{}` has no exact solution", p.name())))?;
    (0..p.dim())
        .map(|k| error_record(traj.last(), k, exact[k]).map(|r| r.rel_error))
        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
}

fn final_errors(p: &MIvp, traj: &Trajectory) -> Result<(f64, f64)> {
    let exact = p
        .exact(traj.last().x)
        .ok_or_else(|| Error::Config(format!("problem `{}` has no exact solution", p.name())))?;
    let mut worst = (0.0f64, 0.0f64);
    for (k, &y) in exact.iter().enumerate() {
        let r = error_record(traj.last(), k, y)?;
        worst = (worst.0.max(r.log_error), worst.1.max(r.rel_error));
    }
    Ok(worst)
}

/// Local error `tau = Delta / Phi = (z_ref / eta_1)^(1/h)` per component.
///
/// `z_ref` is MRK4 from `(x, y)` with `ref_substeps` steps of `h / ref_substeps`.
pub fn local_error(
    p: &MIvp,
    method: Method,
    x: f64,
    y: &[LogValue],
    h: f64,
    tableau: Option<&MButcherTableau>,
    ref_substeps: usize,
) -> Result<Vec<LogValue>> {
    if ref_substeps < MIN_REF_SUBSTEPS {
        return Err(Error::Config(format!(
            "reference needs at least {MIN_REF_SUBSTEPS} substeps, got {ref_substeps}"
        )));
    }
    if h == 0.0 || !h.is_finite() {
        return Err(Error::Config(format!("step size h = {h} must be nonzero")));
    }
    let eta = step(p, method, x, y, h, tableau)?;
    let rk = classical_mrk4();
    let hr = h / ref_substeps as f64;
    let mut z = y.to_vec();
    for i in 0..ref_substeps {
        z = mrk4_step(p, x + i as f64 * hr, &z, hr, &rk)?;
    }
    Ok(z.iter()
        .zip(&eta)
        .map(|(z, e)| mpow(*z / *e, 1.0 / h))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub steps: usize,
    /// Final-point `log_error`, worst component.
    pub log_error: f64,
    pub rel_error: f64,
}

/// Final-point errors for `h0, h0/2, ..., h0/2^(levels-1)`.
pub fn convergence_study(
    p: &MIvp,
    method: Method,
    h0: f64,
    levels: usize,
    x_end: f64,
    tableau: Option<&MButcherTableau>,
) -> Result<Vec<ConvergenceRow>> {
    if levels < 2 {
        return Err(Error::Config(format!("need at least 2 levels, got {levels}")));
    }
    if p.exact_fn().is_none() {
        return Err(Error::Config(format!(
            "problem `{}` has no exact solution",
            p.name()
        )));
    }
    (0..levels)
        .map(|l| {
            let h = h0 / f64::powi(2.0, l as i32);
            let traj = solve(p, method, h, x_end, tableau)?;
            let (log_error, rel_error) = final_errors(p, &traj)?;
            Ok(ConvergenceRow {
                h,
                steps: traj.steps(),
                log_error,
                rel_error,
            })
        })
        .collect()
}

/// Least-squares slope of `ln log_error` against `ln h`.
pub fn fit_order(rows: &[ConvergenceRow]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::Config("need at least 2 step sizes".into()));
    }
    if let Some(r) = rows.iter().find(|r| !(r.log_error >= ERROR_FLOOR)) {
        return Err(Error::Degenerate {
            h: r.h,
            log_error: r.log_error,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h.ln(), r.log_error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Empirical order `p` from step halving.
pub fn estimate_order(
    p: &MIvp,
    method: Method,
    h0: f64,
    levels: usize,
    x_end: f64,
) -> Result<f64> {
    fit_order(&convergence_study(p, method, h0, levels, x_end, None)?)
}

/// `|xi_0|^(e^(n delta)) * B^((e^(n delta) - 1) / delta)`, evaluated in log space.
pub fn lemma1_bound(xi0: f64, delta: f64, b: f64, n: u32) -> f64 {
    if n == 0 {
        return xi0.abs();
    }
    let growth = (n as f64 * delta).exp();
    let ln = growth * xi0.abs().ln() + (growth - 1.0) / delta * b.ln();
    if ln.is_nan() {
        // 0 * inf only arises from xi0 = 0 with B = inf or similar; bound is 0
        return 0.0;
    }
    ln.exp()
}

/// The bound obtained by unrolling the recursion exactly:
/// `|xi_0|^((1+delta)^n) * B^(((1+delta)^n - 1) / delta)`.
pub fn lemma1_recursion_bound(xi0: f64, delta: f64, b: f64, n: u32) -> f64 {
    if n == 0 {
        return xi0.abs();
    }
    let growth = (1.0 + delta).powi(n as i32);
    let ln = growth * xi0.abs().ln() + (growth - 1.0) / delta * b.ln();
    if ln.is_nan() {
        return 0.0;
    }
    ln.exp()
}

/// `h^p (e^(M |x - x0|) - 1) / M`
pub fn theorem_envelope(x: f64, x0: f64, h: f64, m: f64, p: f64) -> f64 {
    h.abs().powf(p) * (m * (x - x0).abs()).exp_m1() / m
}

/// True iff every record satisfies `|ln e| <= N h^p (e^(M |x - x0|) - 1) / M`.
///
/// This is the two-sided form of `|e| <= exp(...)`. The domain-of-validity
/// constants of the convergence theorem (`gamma`, `h_bar`, `G`) are the
/// caller's responsibility.
pub fn check_theorem_bound(
    records: &[ErrorRecord],
    h: f64,
    m: f64,
    n: f64,
    p: f64,
    x0: f64,
) -> bool {
    records
        .iter()
        .all(|r| r.log_error <= n * theorem_envelope(r.x, x0, h, m, p))
}

/// Smallest `N` for which `check_theorem_bound` holds on `records` with the given `M`.
pub fn fit_theorem_n(records: &[ErrorRecord], h: f64, m: f64, p: f64, x0: f64) -> f64 {
    records
        .iter()
        .filter(|r| r.x != x0)
        .map(|r| r.log_error / theorem_envelope(r.x, x0, h, m, p))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSample {
    pub problem: String,
    pub method: Method,
    pub h: f64,
    pub steps: usize,
    /// Median over the timed repeats, seconds.
    pub wall_time_s: f64,
    pub final_rel_error: f64,
    /// Solver failure for this cell, if any.
    pub error: Option<String>,
}

pub const SWEEP_COLUMNS: [&str; 6] = ["problem", "method", "h", "steps", "wall_time_s", "final_rel_error"];

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn run_cell(p: &MIvp, method: Method, h: f64, x_end: f64, repeats: usize) -> BenchSample {
    let mut sample = BenchSample {
        problem: p.name().to_string(),
        method,
        h,
        steps: step_count(p.x0(), h, x_end).unwrap_or(0),
        wall_time_s: f64::NAN,
        final_rel_error: f64::NAN,
        error: None,
    };
    // warm-up, discarded
    let first = solve(p, method, h, x_end, None);
    let traj = match first {
        Ok(t) => t,
        Err(e) => {
            sample.error = Some(e.to_string());
            return sample;
        }
    };
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t0 = Instant::now();
        let r = solve(p, method, h, x_end, None);
        let dt = t0.elapsed().as_secs_f64().max(1e-9);
        std::hint::black_box(&r);
        times.push(dt);
    }
    sample.wall_time_s = median(times);
    match final_rel_error(p, &traj) {
        Ok(e) => sample.final_rel_error = e,
        Err(e) => sample.error = Some(e.to_string()),
    }
    sample
}

/// Median wall time and final relative error for every `(method, h)` cell.
///
/// Cells may run concurrently (at most `threads` at once when given); the
/// repeats of one cell run sequentially. Output is sorted by method, then by
/// `h` descending. Solver failures become samples with `error` set.
pub fn time_error_sweep(
    p: &MIvp,
    methods: &[Method],
    h_list: &[f64],
    x_end: f64,
    repeats: usize,
    threads: Option<usize>,
) -> Result<Vec<BenchSample>> {
    use rayon::prelude::*;

    if repeats < MIN_REPEATS {
        return Err(Error::Config(format!(
            "at least {MIN_REPEATS} repeats are required, got {repeats}"
        )));
    }
    if p.exact_fn().is_none() {
        return Err(Error::Config(format!(
            "problem `{}` has no exact solution",
            p.name()
        )));
    }
    if let Some(&h) = h_list.iter().find(|h| !(**h > 0.0) || !h.is_finite()) {
        return Err(Error::Config(format!("step size h = {h} must be positive")));
    }
    let cells: Vec<(Method, f64)> = methods
        .iter()
        .flat_map(|&m| h_list.iter().map(move |&h| (m, h)))
        .collect();
    let run = || -> Vec<BenchSample> {
        cells
            .par_iter()
            .map(|&(m, h)| run_cell(p, m, h, x_end, repeats))
            .collect()
    };
    let mut out = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    out.sort_by(|a, b| a.method.cmp(&b.method).then(b.h.total_cmp(&a.h)));
    Ok(out)
}

/// Sweep rows as a table with [`SWEEP_COLUMNS`].
pub fn sweep_table(samples: &[BenchSample]) -> Table {
    let mut t = Table::new(SWEEP_COLUMNS);
    for s in samples {
        t.push(vec![
            Cell::from(s.problem.as_str()),
            Cell::from(s.method.as_str()),
            s.h.into(),
            s.steps.into(),
            s.wall_time_s.into(),
            s.final_rel_error.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::make_order2;
    use std::f64::consts::E;

    fn c(re: f64) -> ComplexNum {
        ComplexNum::new(re, 0.0)
    }

    fn sqrt_problem() -> MIvp {
        MIvp::new("sqrt", 0.0, vec![LogValue::ONE], |_x, y| {
            y.iter()
                .map(|v| LogValue::from_ln(0.5 * (-2.0 * v.ln()).exp()))
                .collect()
        })
        .unwrap()
        .with_exact(|x| vec![c((x + 1.0).sqrt())])
    }

    fn sample(x: f64, v: f64) -> Sample {
        Sample {
            x,
            state: State::Log(vec![LogValue::from_positive(v).unwrap()]),
            method: Method::Mrk4,
            handover: false,
        }
    }

    #[test]
    fn record_examples() {
        let r = error_record(&sample(0.0, 2.0), 0, c(2.0)).unwrap();
        assert_eq!(r.log_error, 0.0);
        assert_eq!(r.rel_error, 0.0);
        let r = error_record(&sample(3.0, 2.0000034), 0, c(2.0)).unwrap();
        assert!((r.rel_error - 1.7e-6).abs() < 1e-12);
        let r = error_record(&sample(1.25, 7.61823131), 0, c(7.62360992)).unwrap();
        assert!((r.rel_error - 7.055e-4).abs() < 1e-6);
        assert!((r.log_error - r.rel_error).abs() <= r.rel_error * r.rel_error);
    }

    #[test]
    fn zero_exact_is_domain_error() {
        let err = error_record(&sample(1.0, 1.0), 0, c(0.0)).unwrap_err();
        assert!(matches!(err, Error::Domain { x: Some(x), .. } if x == 1.0));
    }

    #[test]
    fn zero_numerical_value_in_band() {
        let s = Sample {
            x: 1.0,
            state: State::Ordinary(vec![c(0.0)]),
            method: Method::Rk4,
            handover: false,
        };
        let r = error_record(&s, 0, c(0.5)).unwrap();
        assert!(r.mult_error.is_none());
        assert_eq!(r.rel_error, 1.0);
    }

    #[test]
    fn phase_branch_follows_numerical_value() {
        // eta wound once around the origin, exact value principal
        let eta = LogValue::new(0.0, 2.0 * std::f64::consts::PI + 1e-3).unwrap();
        let s = Sample {
            x: 0.0,
            state: State::Log(vec![eta]),
            method: Method::Mrk4,
            handover: false,
        };
        let r = error_record(&s, 0, c(1.0)).unwrap();
        assert!((r.log_error - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn exact_trajectory_has_unit_error() {
        let p = MIvp::new("e", 0.0, vec![LogValue::ONE], |_x, _y| Ok(vec![LogValue::new(1.0, 0.0)?]))
            .unwrap()
            .with_exact(|x| vec![c(x.exp())]);
        let traj = solve(&p, Method::Mrk4, 0.25, 2.0, None).unwrap();
        let recs = global_error(&traj, |x| p.exact(x).unwrap(), 0).unwrap();
        assert_eq!(recs.len(), 9);
        assert!(recs.iter().all(|r| r.log_error < 1e-14));
    }

    #[test]
    fn global_error_telescopes() {
        let p = sqrt_problem();
        let traj = solve(&p, Method::Mrk2, 0.2, 1.0, None).unwrap();
        let recs = global_error(&traj, |x| p.exact(x).unwrap(), 0).unwrap();
        let mut acc = ComplexNum::new(0.0, 0.0);
        for w in traj.samples.windows(2) {
            let (a, b) = (w[0].state.as_log().unwrap()[0], w[1].state.as_log().unwrap()[0]);
            let ya = c((w[0].x + 1.0).sqrt().ln());
            let yb = c((w[1].x + 1.0).sqrt().ln());
            acc += (b.ln() - a.ln()) - (yb - ya);
        }
        let last = recs.last().unwrap().mult_error.unwrap().ln();
        assert!((acc - last).norm() < 1e-12);
    }

    #[test]
    fn local_error_examples() {
        let p = MIvp::new("e", 0.0, vec![LogValue::ONE], |_x, _y| Ok(vec![LogValue::new(1.0, 0.0)?]))
            .unwrap();
        let tau = local_error(&p, Method::Mrk2, 0.0, p.y0(), 0.1, None, 64).unwrap();
        assert!(tau[0].ln().norm() < 1e-13);

        let p = sqrt_problem();
        let t2 = local_error(&p, Method::Mrk2, 0.0, p.y0(), 0.1, None, 256).unwrap();
        let l2 = t2[0].ln().norm();
        assert!((1e-6..=1e-3).contains(&l2), "{l2}");
        let t4 = local_error(&p, Method::Mrk4, 0.0, p.y0(), 0.1, None, 256).unwrap();
        // closed-form oracle: one RK4 step on z' = exp(-2z)/2 against ln(1.1)/2
        let l4 = t4[0].ln().norm();
        assert!((l4 - 1.472_596_09e-7).abs() < 1e-12, "{l4}");
        assert!(l4 < l2 * 1e-2);
        assert!(matches!(
            local_error(&p, Method::Mrk4, 0.0, p.y0(), 0.1, None, 10),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn orders_on_sqrt() {
        let p = sqrt_problem();
        let p4 = estimate_order(&p, Method::Mrk4, 0.2, 3, 3.0).unwrap();
        assert!((3.8..=4.2).contains(&p4), "{p4}");
        let p2 = estimate_order(&p, Method::Mrk2, 0.2, 3, 3.0).unwrap();
        assert!((1.8..=2.2).contains(&p2), "{p2}");
        let rk = estimate_order(&p, Method::Rk4, 0.2, 3, 3.0).unwrap();
        assert!((3.5..=4.5).contains(&rk), "{rk}");
    }

    #[test]
    fn order_is_scale_invariant() {
        let base = sqrt_problem();
        let p4 = estimate_order(&base, Method::Mrk4, 0.2, 3, 3.0).unwrap();
        // y -> 5 y with f(x, y) = exp(25 / (2 y^2))
        let scaled = MIvp::new("sqrt5", 0.0, vec![LogValue::from_positive(5.0).unwrap()], |_x, y| {
            y.iter()
                .map(|v| LogValue::from_ln(12.5 * (-2.0 * v.ln()).exp()))
                .collect()
        })
        .unwrap()
        .with_exact(|x| vec![c(5.0 * (x + 1.0).sqrt())]);
        let q4 = estimate_order(&scaled, Method::Mrk4, 0.2, 3, 3.0).unwrap();
        assert!((p4 - q4).abs() <= 0.05, "{p4} {q4}");
    }

    #[test]
    fn exact_scheme_is_degenerate() {
        let p = MIvp::new("e", 0.0, vec![LogValue::ONE], |_x, _y| Ok(vec![LogValue::new(1.0, 0.0)?]))
            .unwrap()
            .with_exact(|x| vec![c(x.exp())]);
        assert!(matches!(
            estimate_order(&p, Method::Mrk4, 0.25, 3, 2.0),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn lemma_examples() {
        assert_eq!(lemma1_bound(0.7, 0.3, 1.2, 0), 0.7);
        assert!((lemma1_bound(2.0, 1.0, 1.0, 1) - 2f64.powf(E)).abs() < 1e-12);
        assert!((lemma1_bound(2.0, 1.0, 1.0, 1) - 6.5809).abs() < 1e-4);
        assert_eq!(lemma1_bound(0.0, 0.5, 2.0, 3), 0.0);
    }

    #[test]
    fn lemma_monotone_above_one() {
        let base = lemma1_bound(1.1, 0.2, 1.3, 4);
        assert!(lemma1_bound(1.2, 0.2, 1.3, 4) >= base);
        assert!(lemma1_bound(1.1, 0.3, 1.3, 4) >= base);
        assert!(lemma1_bound(1.1, 0.2, 1.4, 4) >= base);
        assert!(lemma1_bound(1.1, 0.2, 1.3, 5) >= base);
    }

    #[test]
    fn recursion_bound_is_attained() {
        // equality in every step of the recursion
        let (delta, b) = (0.5, 0.8);
        let mut xi: f64 = 0.9;
        for n in 1..=6 {
            xi = xi.powf(1.0 + delta) * b;
            let bound = lemma1_recursion_bound(0.9, delta, b, n);
            assert!((xi - bound).abs() <= 1e-12 * bound.max(1e-300), "{n}");
        }
    }

    #[test]
    fn theorem_bound_trivia() {
        let recs = vec![ErrorRecord {
            x: 1.0,
            eta: c(1.0),
            y_exact: c(1.0),
            mult_error: Some(LogValue::ONE),
            log_error: 1e-9,
            rel_error: 1e-9,
        }];
        assert!(!check_theorem_bound(&recs, 0.1, 1.0, 0.0, 4.0, 0.0));
        let exact = vec![ErrorRecord { log_error: 0.0, rel_error: 0.0, ..recs[0] }];
        assert!(check_theorem_bound(&exact, 0.1, 2.0, 0.0, 1.0, 0.0));
        let n = fit_theorem_n(&recs, 0.1, 1.0, 4.0, 0.0);
        assert!(check_theorem_bound(&recs, 0.1, 1.0, n * (1.0 + 1e-12), 4.0, 0.0));
    }

    #[test]
    fn sweep_shape_and_order() {
        let p = sqrt_problem();
        let out = time_error_sweep(&p, &[Method::Rk4, Method::Mrk4], &[0.15, 0.3], 3.0, 3, Some(2))
            .unwrap();
        let keys: Vec<_> = out.iter().map(|s| (s.method, s.h)).collect();
        assert_eq!(
            keys,
            [(Method::Mrk4, 0.3), (Method::Mrk4, 0.15), (Method::Rk4, 0.3), (Method::Rk4, 0.15)]
        );
        assert!(out.iter().all(|s| s.wall_time_s > 0.0 && s.error.is_none()));
        assert!(time_error_sweep(&p, &[Method::Mrk4], &[], 3.0, 3, None).unwrap().is_empty());
        let one = time_error_sweep(&p, &[Method::Mrk4], &[0.3], 3.0, 3, None).unwrap();
        assert_eq!(one.len(), 1);
        assert!(matches!(
            time_error_sweep(&p, &[Method::Mrk4], &[0.3], 3.0, 2, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn sweep_records_failures() {
        let p = sqrt_problem();
        let out = time_error_sweep(&p, &[Method::Mrk4], &[0.7], 3.0, 3, None).unwrap();
        assert!(out[0].error.is_some());
        let t = sweep_table(&out);
        assert_eq!(t.columns, SWEEP_COLUMNS);
    }

    #[test]
    fn custom_order2_tableau_converges() {
        let p = sqrt_problem();
        let t = make_order2(0.75).unwrap();
        let rows = convergence_study(&p, Method::Mrk2, 0.2, 3, 3.0, Some(&t)).unwrap();
        let q = fit_order(&rows).unwrap();
        assert!((1.8..=2.2).contains(&q), "{q}");
    }
}
