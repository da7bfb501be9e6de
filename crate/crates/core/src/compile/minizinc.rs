//! MiniZinc text for a [`ConstraintProblem`].
//!
//! Contexts become parameters, variation points decision variables, rules
//! `guard -> relation` constraints, and nonlinear definitions an auxiliary
//! variable tied to its chord segments. Output order follows declarations.

use std::fmt::Write;

use thiserror::Error;

use crate::analysis::{ExprType, Func, TExpr};
use crate::domain::ValueType;
use crate::expr::BinaryOp;

use super::{ConstraintProblem, NormalizedFn, ObjectiveTerm, Sign};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmitError {
    #[error("definition `{function}` of property `{property}` is nonlinear and has no linear surrogate")]
    NonLinearizedTerm { property: String, function: String },
}

/// `100.0`, `0.1`, `(-2.5)`.
pub(crate) fn fmt_float(x: f64) -> String {
    let s = if x.fract() == 0.0 && x.abs() < 1e15 { format!("{x:.1}") } else { format!("{x:?}") };
    if x < 0.0 {
        format!("({s})")
    } else {
        s
    }
}

fn fmt_int(x: f64) -> String {
    let s = format!("{}", x as i64);
    if x < 0.0 {
        format!("({s})")
    } else {
        s
    }
}

const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_CMP: u8 = 4;
const P_ADD: u8 = 5;
const P_MUL: u8 = 6;
const P_UNARY: u8 = 7;
const P_ATOM: u8 = 8;

struct Printer<'a> {
    cp: &'a ConstraintProblem,
    /// Integer-valued slots (int parameters and decision variables).
    int_slot: Vec<bool>,
}

impl<'a> Printer<'a> {
    fn new(cp: &'a ConstraintProblem) -> Self {
        let mut int_slot = vec![false; cp.slot_count()];
        for p in &cp.parameters {
            int_slot[p.slot] = is_int(&p.ty);
        }
        for v in &cp.variables {
            int_slot[v.slot] = is_int(&v.ty);
        }
        for a in &cp.auxiliaries {
            int_slot[a.slot] = matches!(a.ty, ExprType::Enum(_));
        }
        Printer { cp, int_slot }
    }

    fn name(&self, slot: usize) -> &str {
        &self.cp.slot_names[slot]
    }

    /// Renders `e`; in a float context integer variables are coerced and
    /// literals written as floats.
    fn expr(&self, e: &TExpr, float: bool) -> (String, u8) {
        match e {
            TExpr::Const(c) => {
                let s = if float || c.fract() != 0.0 { fmt_float(*c) } else { fmt_int(*c) };
                (s, P_ATOM)
            }
            TExpr::Extremum { value, .. } => (fmt_float(*value), P_ATOM),
            TExpr::Var(s) => {
                if float && self.int_slot[*s] {
                    (format!("int2float({})", self.name(*s)), P_ATOM)
                } else {
                    (self.name(*s).to_string(), P_ATOM)
                }
            }
            TExpr::Neg(inner) => (format!("-{}", self.wrap(inner, float, P_UNARY)), P_UNARY),
            TExpr::Not(inner) => {
                let (s, _) = self.expr(inner, false);
                (format!("not ({s})"), P_UNARY)
            }
            TExpr::Scale(k, inner) => {
                (format!("{} * {}", fmt_float(*k), self.wrap(inner, true, P_MUL + 1)), P_MUL)
            }
            TExpr::Call(func, args) => {
                let inner: Vec<String> = args.iter().map(|a| self.expr(a, true).0).collect();
                let s = match func {
                    Func::Min | Func::Max if inner.len() > 2 => {
                        format!("{}([{}])", func.name(), inner.join(", "))
                    }
                    _ => format!("{}({})", func.name(), inner.join(", ")),
                };
                (s, P_ATOM)
            }
            TExpr::Binary(op, a, b) => {
                let (prec, sym) = match op {
                    BinaryOp::Or => (P_OR, "\\/"),
                    BinaryOp::And => (P_AND, "/\\"),
                    BinaryOp::Lt => (P_CMP, "<"),
                    BinaryOp::Le => (P_CMP, "<="),
                    BinaryOp::Gt => (P_CMP, ">"),
                    BinaryOp::Ge => (P_CMP, ">="),
                    BinaryOp::Eq => (P_CMP, "="),
                    BinaryOp::Ne => (P_CMP, "!="),
                    BinaryOp::Add => (P_ADD, "+"),
                    BinaryOp::Sub => (P_ADD, "-"),
                    BinaryOp::Mul => (P_MUL, "*"),
                    BinaryOp::Div => (P_MUL, "/"),
                };
                let (float, left_min, right_min) = match op {
                    BinaryOp::Or | BinaryOp::And => (false, prec, prec),
                    // comparisons do not chain
                    _ if op.is_comparison() => (float, prec + 1, prec + 1),
                    // a division makes the whole operand real
                    BinaryOp::Div => (true, prec, prec + 1),
                    _ => (float, prec, prec + 1),
                };
                let logical = matches!(op, BinaryOp::Or | BinaryOp::And);
                let side = |x: &TExpr, min: u8| {
                    if logical {
                        if let TExpr::Const(c) = x {
                            return (*c != 0.0).to_string();
                        }
                    }
                    self.wrap(x, float, min)
                };
                (format!("{} {sym} {}", side(a, left_min), side(b, right_min)), prec)
            }
        }
    }

    fn wrap(&self, e: &TExpr, float: bool, min: u8) -> String {
        let (s, p) = self.expr(e, float);
        if p < min {
            format!("({s})")
        } else {
            s
        }
    }

    fn normalized(&self, f: &NormalizedFn, top: Option<f64>) -> String {
        let body = self.wrap(&f.function.body, true, P_ADD + 1);
        let (lo, hi) = (fmt_float(f.extrema.min), fmt_float(f.extrema.max));
        match top {
            Some(t) => format!("{} * ({body} - {lo}) / ({hi} - {lo})", fmt_float(t)),
            None => format!("({body} - {lo}) / ({hi} - {lo})"),
        }
    }
}

fn is_int(t: &ValueType) -> bool {
    match t {
        ValueType::Numeric(n) => n.is_integral(),
        ValueType::Enum(_) => true,
        ValueType::Bool(_) => false,
    }
}

fn mean(parts: Vec<String>) -> String {
    if parts.len() == 1 {
        return parts.into_iter().next().unwrap();
    }
    let n = parts.len();
    let sum: Vec<String> = parts.into_iter().map(|p| format!("({p})")).collect();
    format!("({}) / {}", sum.join(" + "), fmt_float(n as f64))
}

fn aux_name(term: &ObjectiveTerm, i: usize) -> String {
    if term.values.len() == 1 {
        format!("aux_{}", term.property)
    } else {
        format!("aux_{}_{}", term.property, i + 1)
    }
}

fn literal_comment(ty: &ValueType) -> String {
    match ty {
        ValueType::Enum(e) => {
            let codes: Vec<String> = e.literals.iter().map(|l| format!("{}={}", l.name, l.code)).collect();
            format!("  % {}", codes.join(", "))
        }
        _ => String::new(),
    }
}

pub fn emit_minizinc(cp: &ConstraintProblem) -> Result<String, EmitError> {
    for term in &cp.objective {
        for (v, s) in term.values.iter().zip(&term.surrogates) {
            if s.is_none() && !v.function.body.is_affine(&v.function.params) {
                return Err(EmitError::NonLinearizedTerm {
                    property: term.property.clone(),
                    function: v.function.name.clone(),
                });
            }
        }
    }
    let pr = Printer::new(cp);
    let mut out = String::new();

    for p in &cp.parameters {
        let kind = match &p.ty {
            ValueType::Bool(_) => "bool",
            t if is_int(t) => "int",
            _ => "float",
        };
        let _ = writeln!(out, "{kind}: {};{}", p.name, literal_comment(&p.ty));
    }
    for a in &cp.auxiliaries {
        let (kind, float) = match a.ty {
            ExprType::Bool => ("bool", false),
            ExprType::Enum(_) => ("int", false),
            _ => ("float", true),
        };
        let _ = writeln!(out, "{kind}: {} = {};", a.name, pr.expr(&a.expr, float).0);
    }
    for term in &cp.objective {
        let parts = term.weights.iter().map(|w| pr.normalized(w, None)).collect();
        let _ = writeln!(out, "float: priority_{} = {};", term.property, mean(parts));
    }

    for v in &cp.variables {
        let d = &v.domain;
        let (lo, hi) = (d.first().unwrap_or(0.0), d.last().unwrap_or(0.0));
        let range = match &v.ty {
            ValueType::Bool(_) => "bool".to_string(),
            ValueType::Enum(_) => {
                let contiguous = d.values().windows(2).all(|w| w[1] - w[0] == 1.0);
                if contiguous {
                    format!("{}..{}", fmt_int(lo), fmt_int(hi))
                } else {
                    let codes: Vec<String> = d.values().iter().map(|&c| fmt_int(c)).collect();
                    format!("{{{}}}", codes.join(", "))
                }
            }
            t if is_int(t) => format!("{}..{}", fmt_int(lo), fmt_int(hi)),
            _ => format!("{}..{}", fmt_float(lo), fmt_float(hi)),
        };
        let _ = writeln!(out, "var {range}: {};{}", v.name, literal_comment(&v.ty));
    }

    for c in &cp.constraints {
        let relation = pr.expr(&c.relation, false).0;
        let _ = match &c.guard {
            Some(g) => writeln!(out, "constraint {} -> {relation};", pr.wrap(g, false, P_OR)),
            None => writeln!(out, "constraint {relation};"),
        };
    }

    for term in &cp.objective {
        for (i, s) in term.surrogates.iter().enumerate() {
            let Some(pl) = s else { continue };
            let aux = aux_name(term, i);
            let x = cp.slot_names[pl.slot].as_str();
            let int = pr.int_slot[pl.slot];
            let point = |b: f64| if int { fmt_int(b) } else { fmt_float(b) };
            let xf = if int { format!("int2float({x})") } else { x.to_string() };
            let _ = writeln!(out, "\nvar 0.0..100.0: {aux};");
            let last = pl.segments() - 1;
            for j in 0..pl.segments() {
                let (b0, b1) = (pl.breakpoints[j], pl.breakpoints[j + 1]);
                let upper = if j == last { "<=" } else { "<" };
                let c = pl.intercepts[j];
                let offset = if c < 0.0 {
                    format!(" - {}", fmt_float(-c))
                } else {
                    format!(" + {}", fmt_float(c))
                };
                let _ = writeln!(
                    out,
                    "constraint {x} >= {} /\\ {x} {upper} {} -> {aux} = {} * {xf}{offset};",
                    point(b0),
                    point(b1),
                    fmt_float(pl.slopes[j]),
                );
            }
        }
    }

    if cp.objective.is_empty() {
        out.push_str("solve satisfy;\n");
        return Ok(out);
    }
    let terms: Vec<String> = cp
        .objective
        .iter()
        .map(|term| {
            let parts: Vec<String> = term
                .values
                .iter()
                .zip(&term.surrogates)
                .enumerate()
                .map(|(i, (v, s))| match s {
                    Some(_) => aux_name(term, i),
                    None => pr.normalized(v, Some(100.0)),
                })
                .collect();
            let simple = parts.len() == 1 && term.surrogates[0].is_some();
            let value = mean(parts);
            let signed = match (term.sign, simple) {
                (Sign::Plus, true) => value,
                (Sign::Plus, false) => format!("({value})"),
                (Sign::Minus, _) => format!("(-1.0 * ({value}))"),
            };
            format!("priority_{} * {signed}", term.property)
        })
        .collect();
    let _ = writeln!(out, "solve minimize {};", terms.join(" + "));
    Ok(out)
}
