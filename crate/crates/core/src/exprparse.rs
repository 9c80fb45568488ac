//! Arithmetic expressions in `x` and `y`, evaluated over complex numbers.
//!
//! Grammar, loosest to tightest: `+ -`, `* /`, unary `-`, `^` (right
//! associative). Functions: `exp`, `ln`, `sqrt`, `sin`, `cos`.

use std::fmt;

use crate::error::{Error, Result};
use crate::geomcalc::ComplexNum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    /// Left and right binding power.
    fn binding(self) -> (u8, u8) {
        match self {
            BinOp::Add | BinOp::Sub => (1, 2),
            BinOp::Mul | BinOp::Div => (3, 4),
            BinOp::Pow => (8, 7),
        }
    }
}

const UNARY_BP: u8 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Ident,
    Op(BinOp),
    LParen,
    RParen,
    End,
}

struct Token<'a> {
    tok: Tok,
    text: &'a str,
    offset: usize,
}

fn syntax(offset: usize, expected: &str) -> Error {
    Error::Syntax {
        offset,
        expected: expected.to_string(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Token<'_>>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match b {
            b'+' => Tok::Op(BinOp::Add),
            b'-' => Tok::Op(BinOp::Sub),
            b'*' => Tok::Op(BinOp::Mul),
            b'/' => Tok::Op(BinOp::Div),
            b'^' => Tok::Op(BinOp::Pow),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when digits follow
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| syntax(start, "a number"))?;
                if !v.is_finite() {
                    return Err(syntax(start, "a finite number"));
                }
                out.push(Token {
                    tok: Tok::Num(v),
                    text,
                    offset: start,
                });
                continue;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident,
                    text: &src[start..i],
                    offset: start,
                });
                continue;
            }
            _ => return Err(syntax(start, "an operator, number, name or parenthesis")),
        };
        i += 1;
        out.push(Token {
            tok,
            text: &src[start..i],
            offset: start,
        });
    }
    out.push(Token {
        tok: Tok::End,
        text: "",
        offset: src.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token<'a> {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> &Token<'a> {
        let t = &self.tokens[self.pos];
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.peek();
        if t.tok != tok {
            return Err(syntax(t.offset, what));
        }
        self.bump();
        Ok(())
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        while let Tok::Op(op) = self.peek().tok {
            let (lbp, rbp) = op.binding();
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(rbp)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let (tok, text, offset) = {
            let t = self.peek();
            (t.tok, t.text, t.offset)
        };
        match tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Op(BinOp::Sub) => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.expr(UNARY_BP)?)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident => {
                self.bump();
                match text {
                    "x" => Ok(Expr::Var(Var::X)),
                    "y" => Ok(Expr::Var(Var::Y)),
                    name => match Func::from_name(name) {
                        Some(f) => {
                            self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                            let arg = self.expr(0)?;
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(Expr::Call(f, Box::new(arg)))
                        }
                        None => Err(Error::UnknownIdentifier {
                            offset,
                            name: name.to_string(),
                        }),
                    },
                }
            }
            Tok::Op(_) | Tok::RParen | Tok::End => Err(syntax(offset, "an expression")),
        }
    }
}

/// Parses `src` into an expression tree.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
    };
    let e = p.expr(0)?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.offset, "an operator or end of input"));
    }
    Ok(e)
}

fn finite(z: ComplexNum, what: &str) -> Result<ComplexNum> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Eval(format!("{what} is not finite")))
    }
}

fn is_zero(z: ComplexNum) -> bool {
    z.re == 0.0 && z.im == 0.0
}

fn power(base: ComplexNum, exp: ComplexNum) -> Result<ComplexNum> {
    if exp.im == 0.0 && exp.re.fract() == 0.0 && exp.re.abs() <= 64.0 {
        let n = exp.re as i32;
        if n < 0 && is_zero(base) {
            return Err(Error::Eval("zero raised to a negative power".into()));
        }
        return Ok(base.powi(n));
    }
    if is_zero(base) {
        if exp.re > 0.0 {
            return Ok(ComplexNum::new(0.0, 0.0));
        }
        return Err(Error::Eval("zero raised to a non-positive power".into()));
    }
    Ok(base.powc(exp))
}

impl Expr {
    /// Complex evaluation; `ln`, `sqrt` and non-integer powers use principal branches.
    pub fn eval(&self, x: f64, y: ComplexNum) -> Result<ComplexNum> {
        let v = match self {
            Expr::Num(v) => ComplexNum::new(*v, 0.0),
            Expr::Var(Var::X) => ComplexNum::new(x, 0.0),
            Expr::Var(Var::Y) => y,
            Expr::Neg(e) => -e.eval(x, y)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(x, y)?, b.eval(x, y)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if is_zero(b) {
                            return Err(Error::Eval("division by zero".into()));
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b)?,
                }
            }
            Expr::Call(f, arg) => {
                let a = arg.eval(x, y)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if is_zero(a) {
                            return Err(Error::Eval("logarithm of zero".into()));
                        }
                        a.ln()
                    }
                    Func::Sqrt => a.sqrt(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                }
            }
        };
        finite(v, "intermediate value")
    }

    /// The argument `u` when the expression is `exp(u)`.
    pub fn exp_argument(&self) -> Option<&Expr> {
        match self {
            Expr::Call(Func::Exp, arg) => Some(arg),
            _ => None,
        }
    }
}

/// Canonical form: every compound subexpression parenthesized.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Parses and evaluates in one go.
pub fn eval_str(src: &str, x: f64, y: ComplexNum) -> Result<ComplexNum> {
    parse(src)?.eval(x, y)
}
