//! Multiplicative Butcher tableaus and their order conditions.
//!
//! A tableau with nodes `p_i`, stage exponents `q_ij` and weights `w_i`
//! defines the explicit step
//!
//! ```text
//! f_i    = f(x + p_i h, y * prod_j f_j^(q_ij h))
//! y_next = y * prod_i f_i^(w_i h)
//! ```
//!
//! In log coordinates this is an ordinary explicit Runge-Kutta step on
//! `z' = ln f(x, e^z)`, so the classical coefficient algebra applies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on every order condition.
pub const CONDITION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTableau")]
pub struct MButcherTableau {
    nodes: Vec<f64>,
    /// Strictly lower-triangular; row `i` has `i` entries.
    exponents: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTableau {
    nodes: Vec<f64>,
    exponents: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<RawTableau> for MButcherTableau {
    type Error = Error;

    fn try_from(raw: RawTableau) -> Result<Self> {
        let mut exponents = raw.exponents;
        // the empty first row may be left out
        if exponents.len() + 1 == raw.weights.len() {
            exponents.insert(0, Vec::new());
        }
        MButcherTableau::new(raw.nodes, exponents, raw.weights)
    }
}

impl MButcherTableau {
    pub fn new(nodes: Vec<f64>, exponents: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let s = weights.len();
        if s == 0 {
            return Err(Error::Shape("tableau has no stages".into()));
        }
        if nodes.len() != s || exponents.len() != s {
            return Err(Error::Shape(format!(
                "{s} weights but {} nodes and {} exponent rows",
                nodes.len(),
                exponents.len()
            )));
        }
        for (i, row) in exponents.iter().enumerate() {
            if row.len() != i {
                return Err(Error::Shape(format!(
                    "exponent row {i} has {} entries, expected {i}",
                    row.len()
                )));
            }
        }
        let all = nodes.iter().chain(weights.iter()).chain(exponents.iter().flatten());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("non-finite coefficient".into()));
        }
        Ok(MButcherTableau {
            nodes,
            exponents,
            weights,
        })
    }

    pub fn stages(&self) -> usize {
        self.weights.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn exponents(&self) -> &[Vec<f64>] {
        &self.exponents
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Flat list of every coefficient: nodes, exponents row by row, weights.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut out = self.nodes.clone();
        out.extend(self.exponents.iter().flatten());
        out.extend(&self.weights);
        out
    }

    /// Inverse of [`coefficients`](Self::coefficients) for the same stage count.
    pub fn with_coefficients(&self, coeffs: &[f64]) -> Result<Self> {
        let s = self.stages();
        let needed = 2 * s + s * (s - 1) / 2;
        if coeffs.len() != needed {
            return Err(Error::Shape(format!(
                "expected {needed} coefficients, got {}",
                coeffs.len()
            )));
        }
        let nodes = coeffs[..s].to_vec();
        let mut at = s;
        let mut exponents = Vec::with_capacity(s);
        for i in 0..s {
            exponents.push(coeffs[at..at + i].to_vec());
            at += i;
        }
        let weights = coeffs[at..].to_vec();
        MButcherTableau::new(nodes, exponents, weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tableau serializes")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Config(format!("tableau JSON: {e}")))
    }

    /// Runs the validator matching the stage count.
    pub fn validate(&self) -> Result<Vec<Violation>> {
        match self.stages() {
            2 => validate_order2(self),
            4 => validate_order4(self),
            s => Err(Error::Shape(format!("no order conditions for {s} stages"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// The first stage sits at the left end of the step.
    FirstNode,
    /// Stage `i` node equals the sum of its exponents.
    RowSum(usize),
    /// Weights sum to one.
    WeightSum,
    /// `sum w_i p_i = 1/2`
    FirstMoment,
    /// `sum w_i q_i = 1/2` for the two-stage scheme.
    ExponentMoment,
    /// `sum w_i p_i^2 = 1/3`
    SecondMoment,
    /// `sum w_i p_i^3 = 1/4`
    ThirdMoment,
    /// `sum w_i q_ij p_j = 1/6`
    Chain,
    /// `sum w_i p_i q_ij p_j = 1/8`
    NodeChain,
    /// `sum w_i q_ij p_j^2 = 1/12`
    ChainSquared,
    /// `sum w_i q_ij q_jk p_k = 1/24`
    DoubleChain,
}

impl Condition {
    /// Conditions carried over from the classical fourth-order theory on top
    /// of the moment and row-sum conditions.
    pub fn is_inherited(self) -> bool {
        matches!(
            self,
            Condition::ThirdMoment
                | Condition::Chain
                | Condition::NodeChain
                | Condition::ChainSquared
                | Condition::DoubleChain
        )
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::FirstNode => write!(f, "p_0 = 0"),
            Condition::RowSum(i) => write!(f, "p_{i} = sum_j q_{i}j"),
            Condition::WeightSum => write!(f, "sum w = 1"),
            Condition::FirstMoment => write!(f, "sum w p = 1/2"),
            Condition::ExponentMoment => write!(f, "sum w q = 1/2"),
            Condition::SecondMoment => write!(f, "sum w p^2 = 1/3"),
            Condition::ThirdMoment => write!(f, "sum w p^3 = 1/4 (inherited)"),
            Condition::Chain => write!(f, "sum w q p = 1/6 (inherited)"),
            Condition::NodeChain => write!(f, "sum w p q p = 1/8 (inherited)"),
            Condition::ChainSquared => write!(f, "sum w q p^2 = 1/12 (inherited)"),
            Condition::DoubleChain => write!(f, "sum w q q p = 1/24 (inherited)"),
        }
    }
}

/// A failed order condition with the value the tableau actually produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub actual: f64,
    pub expected: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: got {:.17e}, expected {}", self.condition, self.actual, self.expected)
    }
}

fn check(out: &mut Vec<Violation>, condition: Condition, actual: f64, expected: f64) {
    if !((actual - expected).abs() <= CONDITION_TOL) {
        out.push(Violation {
            condition,
            actual,
            expected,
        });
    }
}

fn expect_stages(t: &MButcherTableau, s: usize) -> Result<()> {
    if t.stages() != s {
        return Err(Error::Shape(format!(
            "expected a {s}-stage tableau, got {} stages",
            t.stages()
        )));
    }
    Ok(())
}

/// Order-2 conditions `a + b = 1`, `b p = 1/2`, `b q = 1/2`.
pub fn validate_order2(t: &MButcherTableau) -> Result<Vec<Violation>> {
    expect_stages(t, 2)?;
    let (a, b) = (t.weights[0], t.weights[1]);
    let (p, q) = (t.nodes[1], t.exponents[1][0]);
    let mut out = Vec::new();
    check(&mut out, Condition::FirstNode, t.nodes[0], 0.0);
    check(&mut out, Condition::WeightSum, a + b, 1.0);
    check(&mut out, Condition::FirstMoment, b * p, 0.5);
    check(&mut out, Condition::ExponentMoment, b * q, 0.5);
    Ok(out)
}

/// Row-sum and moment conditions for four stages, plus the remaining
/// classical fourth-order conditions (reported as inherited).
pub fn validate_order4(t: &MButcherTableau) -> Result<Vec<Violation>> {
    expect_stages(t, 4)?;
    let w = &t.weights;
    let p = &t.nodes;
    let q = &t.exponents;
    let mut out = Vec::new();

    check(&mut out, Condition::FirstNode, p[0], 0.0);
    for i in 1..4 {
        check(&mut out, Condition::RowSum(i), q[i].iter().sum(), p[i]);
    }
    let moment = |k: i32| (0..4).map(|i| w[i] * p[i].powi(k)).sum::<f64>();
    check(&mut out, Condition::WeightSum, w.iter().sum(), 1.0);
    check(&mut out, Condition::FirstMoment, moment(1), 0.5);
    check(&mut out, Condition::SecondMoment, moment(2), 1.0 / 3.0);

    // (Q p)_i and (Q p^2)_i
    let qp: Vec<f64> = (0..4).map(|i| (0..i).map(|j| q[i][j] * p[j]).sum()).collect();
    let qp2: Vec<f64> = (0..4)
        .map(|i| (0..i).map(|j| q[i][j] * p[j] * p[j]).sum())
        .collect();
    let qqp: Vec<f64> = (0..4).map(|i| (0..i).map(|j| q[i][j] * qp[j]).sum()).collect();
    let dot = |v: &[f64]| (0..4).map(|i| w[i] * v[i]).sum::<f64>();

    check(&mut out, Condition::ThirdMoment, moment(3), 0.25);
    check(&mut out, Condition::Chain, dot(&qp), 1.0 / 6.0);
    let pqp: Vec<f64> = (0..4).map(|i| p[i] * qp[i]).collect();
    check(&mut out, Condition::NodeChain, dot(&pqp), 0.125);
    check(&mut out, Condition::ChainSquared, dot(&qp2), 1.0 / 12.0);
    check(&mut out, Condition::DoubleChain, dot(&qqp), 1.0 / 24.0);
    Ok(out)
}

/// Classical fourth-order coefficients: nodes `(0, 1/2, 1/2, 1)`, weights
/// `(1/6, 1/3, 1/3, 1/6)`.
pub fn classical_mrk4() -> MButcherTableau {
    MButcherTableau::new(
        vec![0.0, 0.5, 0.5, 1.0],
        vec![vec![], vec![0.5], vec![0.0, 0.5], vec![0.0, 0.0, 1.0]],
        vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
    )
    .expect("classical tableau is well-formed")
}

/// One member of the two-stage family: `a = 1 - b`, `p = q = 1/(2b)`.
pub fn make_order2(b: f64) -> Result<MButcherTableau> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::domain(format!(
            "order-2 weight b = {b} cannot satisfy b p = 1/2"
        )));
    }
    let p = 1.0 / (2.0 * b);
    MButcherTableau::new(vec![0.0, p], vec![vec![], vec![p]], vec![1.0 - b, b])
}

/// Endpoint scheme with equal weights (`b = 1/2`, `p = q = 1`).
pub fn multiplicative_heun() -> MButcherTableau {
    make_order2(0.5).expect("b = 1/2 is valid")
}
