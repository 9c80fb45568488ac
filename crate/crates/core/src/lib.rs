//! Multiplicative (geometric-calculus) Runge-Kutta solvers.
//!
//! Problems `y* = f(x, y)` are integrated in log coordinates, where a
//! multiplicative Runge-Kutta step is an ordinary Runge-Kutta step on
//! `z' = ln f(x, e^z)`. Complex solutions keep an unwrapped phase, and the
//! [`hybrid`] controller steps across roots with ordinary RK4.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod exprparse;
pub mod geomcalc;
pub mod hybrid;
pub mod problems;
pub mod report;
pub mod solvers;
pub mod tableau;

pub use error::{Error, Result};
pub use geomcalc::{ComplexNum, LogValue};
pub use solvers::{solve, MIvp, Method, Trajectory};
