//! Resolved expressions: variables are slots, unit conversions are explicit
//! and domain extrema are already computed.

use std::fmt;

use thiserror::Error;

use crate::expr::BinaryOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Abs,
    Min,
    Max,
}

impl Func {
    pub fn lookup(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "abs" => Some(Func::Abs),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("expression is not valid in this model: {0}")]
    Invalid(String),
}

/// A type-checked expression. Booleans evaluate to 0/1 and enum values to
/// their codes.
#[derive(Debug, Clone, PartialEq)]
pub enum TExpr {
    Const(f64),
    Var(usize),
    Neg(Box<TExpr>),
    Not(Box<TExpr>),
    Binary(BinaryOp, Box<TExpr>, Box<TExpr>),
    /// Multiplies by a unit conversion factor.
    Scale(f64, Box<TExpr>),
    Call(Func, Vec<TExpr>),
    /// `max(body)` / `min(body)` over the domain of `var`; `value` holds
    /// the precomputed result.
    Extremum { max: bool, var: usize, body: Box<TExpr>, value: f64 },
}

/// Relative tolerance of `=` and `!=` on numbers.
const EQ_TOLERANCE: f64 = 1e-9;

fn numbers_equal(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= EQ_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn truth(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

impl TExpr {
    pub fn eval(&self, env: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            TExpr::Const(c) => *c,
            TExpr::Var(slot) => env[*slot],
            TExpr::Neg(e) => -e.eval(env)?,
            TExpr::Not(e) => truth(e.eval(env)? == 0.0),
            TExpr::Scale(k, e) => k * e.eval(env)?,
            TExpr::Extremum { value, .. } => *value,
            TExpr::Binary(op, a, b) => {
                // short-circuit logic so guards can protect divisions
                match op {
                    BinaryOp::And => {
                        return Ok(truth(a.eval(env)? != 0.0 && b.eval(env)? != 0.0));
                    }
                    BinaryOp::Or => {
                        return Ok(truth(a.eval(env)? != 0.0 || b.eval(env)? != 0.0));
                    }
                    _ => {}
                }
                let x = a.eval(env)?;
                let y = b.eval(env)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        x / y
                    }
                    BinaryOp::Lt => truth(x < y),
                    BinaryOp::Le => truth(x <= y),
                    BinaryOp::Gt => truth(x > y),
                    BinaryOp::Ge => truth(x >= y),
                    BinaryOp::Eq => truth(numbers_equal(x, y)),
                    BinaryOp::Ne => truth(!numbers_equal(x, y)),
                    BinaryOp::And | BinaryOp::Or => unreachable!(),
                }
            }
            TExpr::Call(func, args) => match func {
                Func::Exp => args[0].eval(env)?.exp(),
                Func::Abs => args[0].eval(env)?.abs(),
                Func::Min | Func::Max => {
                    let mut acc = args[0].eval(env)?;
                    for a in &args[1..] {
                        let v = a.eval(env)?;
                        acc = if *func == Func::Min { acc.min(v) } else { acc.max(v) };
                    }
                    acc
                }
            },
        })
    }

    /// Slots read by the expression, ascending. The variable bound by an
    /// extremum is not free.
    pub fn slots(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_slots(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_slots(&self, out: &mut Vec<usize>) {
        match self {
            TExpr::Var(s) => out.push(*s),
            TExpr::Neg(e) | TExpr::Not(e) | TExpr::Scale(_, e) => e.collect_slots(out),
            TExpr::Binary(_, a, b) => {
                a.collect_slots(out);
                b.collect_slots(out);
            }
            TExpr::Call(_, args) => args.iter().for_each(|a| a.collect_slots(out)),
            TExpr::Const(_) | TExpr::Extremum { .. } => {}
        }
    }

    /// Whether the expression is affine in the given slot, treating every
    /// other slot as a constant.
    pub fn is_affine_in(&self, slot: usize) -> bool {
        self.is_affine(&[slot])
    }

    /// Whether the expression is jointly affine in `vars`, treating every
    /// other slot as a constant.
    pub fn is_affine(&self, vars: &[usize]) -> bool {
        let depends = |e: &TExpr| e.slots().iter().any(|s| vars.contains(s));
        match self {
            TExpr::Const(_) | TExpr::Var(_) | TExpr::Extremum { .. } => true,
            TExpr::Neg(e) | TExpr::Scale(_, e) => e.is_affine(vars),
            TExpr::Binary(BinaryOp::Add | BinaryOp::Sub, a, b) => a.is_affine(vars) && b.is_affine(vars),
            TExpr::Binary(BinaryOp::Mul, a, b) => {
                (!depends(a) && b.is_affine(vars)) || (!depends(b) && a.is_affine(vars))
            }
            TExpr::Binary(BinaryOp::Div, a, b) => !depends(b) && a.is_affine(vars),
            other => !depends(other),
        }
    }

    /// Renders the expression with slot names supplied by `name`.
    pub fn display<'a>(&'a self, name: &'a dyn Fn(usize) -> String) -> TExprDisplay<'a> {
        TExprDisplay { expr: self, name }
    }
}

pub struct TExprDisplay<'a> {
    expr: &'a TExpr,
    name: &'a dyn Fn(usize) -> String,
}

impl<'a> fmt::Display for TExprDisplay<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e: &'a TExpr| TExprDisplay { expr: e, name: self.name };
        match self.expr {
            TExpr::Const(c) => write!(f, "{c}"),
            TExpr::Var(s) => f.write_str(&(self.name)(*s)),
            TExpr::Neg(e) => write!(f, "-({})", sub(e)),
            TExpr::Not(e) => write!(f, "!({})", sub(e)),
            TExpr::Scale(k, e) => write!(f, "({k} * {})", sub(e)),
            TExpr::Binary(op, a, b) => write!(f, "({} {} {})", sub(a), op.symbol(), sub(b)),
            TExpr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", sub(a))?;
                }
                f.write_str(")")
            }
            TExpr::Extremum { value, .. } => write!(f, "{value}"),
        }
    }
}
