//! Root bypass: multiplicative stepping with an ordinary RK4 detour around
//! zeros of the solution, where `y*` is undefined.
//!
//! The controller runs MRK4 until the state enters the band `|y| < eps` (or
//! the multiplicative derivative blows up), converts `(y, y*)` to `(y, y')`,
//! takes at least `min_ordinary_steps` RK4 steps on the same grid and hands
//! back once every component satisfies `|y| > rearm_factor * eps`.

use crate::error::{Error, Result};
use crate::geomcalc::{from_complex, mult_to_ordinary_state, ComplexNum, LogValue};
use crate::solvers::{
    grid_x, lift_state, mrk4_step, rk4_step_from_slope, step_count, MIvp, Method, Sample, State,
    Trajectory,
};
use crate::tableau::classical_mrk4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridConfig {
    /// Handover when any `|y_k| < zero_threshold`.
    pub zero_threshold: f64,
    pub min_ordinary_steps: usize,
    /// Hand back once every `|y_k| > rearm_factor * zero_threshold`.
    pub rearm_factor: f64,
}

impl HybridConfig {
    pub const DEFAULT_BAND: f64 = 0.1;
    pub const DEFAULT_MIN_STEPS: usize = 2;
    pub const DEFAULT_REARM: f64 = 1.5;

    pub fn new(zero_threshold: f64, min_ordinary_steps: usize, rearm_factor: f64) -> Result<Self> {
        if !(zero_threshold > 0.0) || !zero_threshold.is_finite() {
            return Err(Error::Config(format!(
                "zero threshold must be positive, got {zero_threshold}"
            )));
        }
        if min_ordinary_steps < 1 {
            return Err(Error::Config("at least one ordinary step is required".into()));
        }
        if !(rearm_factor > 1.0) || !rearm_factor.is_finite() {
            return Err(Error::Config(format!(
                "rearm factor must exceed 1, got {rearm_factor}"
            )));
        }
        Ok(HybridConfig {
            zero_threshold,
            min_ordinary_steps,
            rearm_factor,
        })
    }

    /// `eps = 0.1 |y0|` (smallest component), `m = 2`, `rho = 1.5`.
    pub fn for_problem(p: &MIvp) -> Self {
        let smallest = p
            .y0()
            .iter()
            .map(LogValue::modulus)
            .fold(f64::INFINITY, f64::min);
        HybridConfig {
            zero_threshold: Self::DEFAULT_BAND * smallest,
            min_ordinary_steps: Self::DEFAULT_MIN_STEPS,
            rearm_factor: Self::DEFAULT_REARM,
        }
    }

    fn rearm_level(&self) -> f64 {
        self.rearm_factor * self.zero_threshold
    }

    /// `|ln f|` above this counts as a blow-up of the multiplicative derivative.
    fn blow_up_level(&self) -> f64 {
        1.0 / (self.zero_threshold * self.zero_threshold)
    }
}

/// True when the state is inside the zero band or the stage value is
/// unusable (evaluation failed, non-finite, or `|ln f| > 1 / eps^2`).
pub fn detect_handover(cfg: &HybridConfig, y: &[LogValue], f_val: &Result<Vec<LogValue>>) -> bool {
    if y.iter().any(|v| v.modulus() < cfg.zero_threshold) {
        return true;
    }
    match f_val {
        Err(_) => true,
        Ok(f) => f
            .iter()
            .any(|f| !f.is_finite() || f.ln().norm() > cfg.blow_up_level()),
    }
}

enum Mode {
    Multiplicative(Vec<LogValue>),
    Ordinary {
        y: Vec<ComplexNum>,
        /// Phase reference carried through the band for the hand-back lift.
        hint: Vec<LogValue>,
        steps: usize,
    },
}

/// MRK4 with an ordinary RK4 bypass around zeros of the solution.
///
/// When no handover triggers the result is bitwise identical to
/// `solve(p, Method::Mrk4, h, x_end, None)`.
pub fn solve_hybrid(p: &MIvp, h: f64, x_end: f64, cfg: &HybridConfig) -> Result<Trajectory> {
    let n = step_count(p.x0(), h, x_end)?;
    let tableau = classical_mrk4();

    let mut samples = Vec::with_capacity(n + 1);
    samples.push(Sample {
        x: p.x0(),
        state: State::Log(p.y0().to_vec()),
        method: Method::Mrk4,
        handover: false,
    });

    let mut mode = Mode::Multiplicative(p.y0().to_vec());
    let mut just_rearmed = false;
    for i in 0..n {
        let x = grid_x(p.x0(), h, i, n, x_end);
        let x_next = grid_x(p.x0(), h, i + 1, n, x_end);

        if let Mode::Multiplicative(y) = &mode {
            let f0 = p.eval_mult(x, y);
            let attempt = if detect_handover(cfg, y, &f0) {
                None
            } else {
                mrk4_step(p, x, y, h, &tableau).ok()
            };
            match attempt {
                Some(next) => {
                    samples.push(Sample {
                        x: x_next,
                        state: State::Log(next.clone()),
                        method: Method::Mrk4,
                        handover: just_rearmed,
                    });
                    just_rearmed = false;
                    mode = Mode::Multiplicative(next);
                    continue;
                }
                None => {
                    let y = y.clone();
                    // (y, y') from (y, y*) when y* is still usable
                    let (yc, slope): (Vec<ComplexNum>, Option<Vec<ComplexNum>>) = match f0 {
                        Ok(f) if f.iter().all(LogValue::is_finite) => {
                            let (yc, yp) = y
                                .iter()
                                .zip(&f)
                                .map(|(y, f)| mult_to_ordinary_state(*y, *f))
                                .unzip();
                            (yc, Some(yp))
                        }
                        _ => (y.iter().map(LogValue::to_complex).collect(), None),
                    };
                    let k1 = match slope {
                        Some(s) if p.has_ordinary() => s,
                        _ => p.eval_ordinary(x, &yc).map_err(|e| e.at(x))?,
                    };
                    let next = rk4_step_from_slope(p, x, &yc, h, k1).map_err(|e| e.at(x))?;
                    let hint = advance_hint(&y, &next);
                    samples.push(Sample {
                        x: x_next,
                        state: State::Ordinary(next.clone()),
                        method: Method::Rk4,
                        handover: true,
                    });
                    just_rearmed = false;
                    mode = Mode::Ordinary {
                        y: next,
                        hint,
                        steps: 1,
                    };
                }
            }
        } else if let Mode::Ordinary { y, hint, steps } = &mode {
            check_recoverable(p, x, y)?;
            let k1 = p.eval_ordinary(x, y).map_err(|e| e.at(x))?;
            let next = rk4_step_from_slope(p, x, y, h, k1).map_err(|e| e.at(x))?;
            let hint = advance_hint(hint, &next);
            samples.push(Sample {
                x: x_next,
                state: State::Ordinary(next.clone()),
                method: Method::Rk4,
                handover: false,
            });
            mode = Mode::Ordinary {
                y: next,
                hint,
                steps: steps + 1,
            };
        }

        if let Mode::Ordinary { y, hint, steps } = &mode {
            if *steps >= cfg.min_ordinary_steps && y.iter().all(|v| v.norm() > cfg.rearm_level()) {
                let lifted = lift_state(x_next, y, hint)?;
                mode = Mode::Multiplicative(lifted);
                just_rearmed = true;
            }
        }
    }

    Ok(Trajectory {
        problem: p.name().to_string(),
        h,
        samples,
    })
}

/// A state exactly at 0+0i can only be stepped through with an explicit
/// ordinary right-hand side; the derived one needs `ln f` at the state.
fn check_recoverable(p: &MIvp, x: f64, y: &[ComplexNum]) -> Result<()> {
    if !p.has_ordinary() && y.iter().any(|v| v.re == 0.0 && v.im == 0.0) {
        return Err(Error::UnrecoverableZero { x });
    }
    Ok(())
}

/// Carries each component's phase forward; exact zeros keep the old reference.
fn advance_hint(prev: &[LogValue], y: &[ComplexNum]) -> Vec<LogValue> {
    prev.iter()
        .zip(y)
        .map(|(hint, &z)| from_complex(z, Some(hint)).unwrap_or(*hint))
        .collect()
}
