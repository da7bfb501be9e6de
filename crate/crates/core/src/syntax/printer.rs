//! Canonical text form of a [`Model`]. Comments are not preserved;
//! everything else round-trips through [`parse_model`](super::parse_model).

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(model: &Model) -> String {
    let mut out = String::new();
    for item in &model.items {
        print_item(&mut out, item);
        out.push('\n');
    }
    out
}

fn print_item(out: &mut String, item: &Item) {
    match item {
        Item::Type(TypeDef::Enum(e)) => {
            let _ = write!(out, "enum {} {{", e.name.name);
            for lit in &e.literals {
                let _ = match lit.code {
                    Some(code) => write!(out, " {}({});", lit.name.name, code),
                    None => write!(out, " {};", lit.name.name),
                };
            }
            out.push_str(" }");
        }
        Item::Type(TypeDef::Number(n)) => {
            let _ = write!(
                out,
                "number {} {{ range: [{}, {}]; precision: {};",
                n.name.name, n.lo, n.hi, n.precision
            );
            if let Some(unit) = &n.unit {
                let _ = write!(out, " unit: \"{unit}\";");
            }
            out.push_str(" }");
        }
        Item::Type(TypeDef::Boolean(b)) => {
            let _ = write!(out, "boolean {};", b.name.name);
        }
        Item::Var(VarDef::General(g)) => {
            let _ = match &g.ty {
                Some(ty) => write!(out, "var {} : {} = {};", g.name.name, ty.name, g.value),
                None => write!(out, "var {} = {};", g.name.name, g.value),
            };
        }
        Item::Var(VarDef::Context(c)) => {
            let _ = write!(out, "context {} : {};", c.name.name, c.ty.name);
        }
        Item::Var(VarDef::VarPoint(v)) => {
            let _ = write!(out, "varpoint {} : {}", v.name.name, v.ty.name);
            if v.body.is_empty() {
                out.push(';');
            } else {
                out.push_str(" { ");
                for (i, c) in v.body.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = match c {
                        Constraint::Invariant(e) => write!(out, "{e}"),
                        Constraint::Implication(imp) => {
                            write!(out, "{} => {}", imp.condition, imp.consequence)
                        }
                    };
                }
                out.push_str("; }");
            }
        }
        Item::Var(VarDef::Property(p)) => {
            let _ = write!(out, "property {} : {}", p.name.name, p.ty.name);
            match p.direction {
                Some(Direction::Maximized) => out.push_str(" maximized"),
                Some(Direction::Minimized) => out.push_str(" minimized"),
                None => {}
            }
            out.push_str(" {\n  priorities: ");
            print_functions(out, &p.priorities);
            out.push_str(";\n  definitions: ");
            print_functions(out, &p.definitions);
            out.push_str(";\n}");
        }
        Item::Rule(r) => {
            let _ = write!(
                out,
                "rule {} : {} => {};",
                r.name.name, r.implication.condition, r.implication.consequence
            );
        }
    }
}

fn print_functions(out: &mut String, funcs: &[FunctionDef]) {
    for (i, f) in funcs.iter().enumerate() {
        if i > 0 {
            out.push_str(",\n    ");
        }
        let params: Vec<&str> = f.params.iter().map(|p| p.name.as_str()).collect();
        let _ = write!(out, "{}({}) = {}", f.name.name, params.join(", "), f.body);
    }
}
