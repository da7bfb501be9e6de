//! Evaluator for the emitted MiniZinc subset: parameter and decision
//! declarations, implication constraints, `solve minimize` / `satisfy`.

use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(&'static str),
}

const SYMS: [&str; 20] = [
    "/\\", "\\/", "->", "..", "<=", ">=", "!=", "<", ">", "=", "+", "-", "*", "/", "(", ")", "{", "}", ",", ":",
];

fn lex(text: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('%').next().unwrap();
        let b = line.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let c = b[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                    i += 1;
                    if b[i] == b'-' || b[i] == b'+' {
                        i += 1;
                    }
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push(Tok::Num(line[start..i].parse().unwrap()));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push(Tok::Ident(line[start..i].to_string()));
            } else if c == ';' {
                out.push(Tok::Sym(";"));
                i += 1;
            } else {
                let s = SYMS.iter().find(|s| line[i..].starts_with(**s)).unwrap_or_else(|| panic!("lex: {line}"));
                out.push(Tok::Sym(s));
                i += s.len();
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub enum E {
    Num(f64),
    Var(String),
    Neg(Box<E>),
    Bin(&'static str, Box<E>, Box<E>),
    Call(String, Vec<E>),
}

#[derive(Debug, Clone)]
pub enum Domain {
    Range(f64, f64),
    Set(Vec<f64>),
    Bool,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Param { name: String, value: Option<E> },
    Var { name: String, domain: Domain },
    Constraint(E),
    Minimize(E),
    Satisfy,
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Tok {
        self.pos += 1;
        self.toks[self.pos - 1].clone()
    }
    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, s: &str) {
        assert!(self.eat(s), "expected `{s}` at {:?}", self.peek());
    }
    fn ident(&mut self) -> String {
        match self.next() {
            Tok::Ident(s) => s,
            t => panic!("expected identifier, got {t:?}"),
        }
    }

    fn expr(&mut self) -> E {
        let lhs = self.binary(0);
        if self.eat("->") {
            E::Bin("->", Box::new(lhs), Box::new(self.expr()))
        } else {
            lhs
        }
    }

    fn binary(&mut self, level: usize) -> E {
        const LEVELS: [&[&str]; 5] =
            [&["\\/"], &["/\\"], &["<=", ">=", "!=", "<", ">", "="], &["+", "-"], &["*", "/"]];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1);
        loop {
            let op = match self.peek() {
                Some(Tok::Sym(s)) if LEVELS[level].contains(s) => *s,
                _ => return lhs,
            };
            self.pos += 1;
            let rhs = self.binary(level + 1);
            lhs = E::Bin(op, Box::new(lhs), Box::new(rhs));
            // comparisons do not chain
            if level == 2 {
                return lhs;
            }
        }
    }

    fn unary(&mut self) -> E {
        if self.eat("-") {
            return E::Neg(Box::new(self.unary()));
        }
        match self.next() {
            Tok::Num(x) => E::Num(x),
            Tok::Ident(name) => {
                if self.eat("(") {
                    let mut args = vec![self.expr()];
                    while self.eat(",") {
                        args.push(self.expr());
                    }
                    self.expect(")");
                    E::Call(name, args)
                } else {
                    E::Var(name)
                }
            }
            Tok::Sym("(") => {
                let e = self.expr();
                self.expect(")");
                e
            }
            t => panic!("unexpected {t:?}"),
        }
    }

    fn stmt(&mut self) -> Stmt {
        match self.ident().as_str() {
            "int" | "float" | "bool" => {
                self.expect(":");
                let name = self.ident();
                let value = self.eat("=").then(|| self.expr());
                Stmt::Param { name, value }
            }
            "var" => {
                let domain = if matches!(self.peek(), Some(Tok::Ident(s)) if s == "bool") {
                    self.pos += 1;
                    Domain::Bool
                } else if self.eat("{") {
                    let mut vals = Vec::new();
                    loop {
                        vals.push(eval(&self.unary(), &HashMap::new()).unwrap());
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect("}");
                    Domain::Set(vals)
                } else {
                    let lo = eval(&self.unary(), &HashMap::new()).unwrap();
                    self.expect("..");
                    let hi = eval(&self.unary(), &HashMap::new()).unwrap();
                    Domain::Range(lo, hi)
                };
                self.expect(":");
                Stmt::Var { name: self.ident(), domain }
            }
            "constraint" => Stmt::Constraint(self.expr()),
            "solve" => match self.ident().as_str() {
                "minimize" => Stmt::Minimize(self.expr()),
                "satisfy" => Stmt::Satisfy,
                other => panic!("solve {other}"),
            },
            other => panic!("unknown statement `{other}`"),
        }
    }
}

pub fn eval(e: &E, env: &HashMap<String, f64>) -> Result<f64, String> {
    let b = |x: bool| if x { 1.0 } else { 0.0 };
    Ok(match e {
        E::Num(x) => *x,
        E::Var(n) => *env.get(n).ok_or_else(|| format!("unbound `{n}`"))?,
        E::Neg(a) => -eval(a, env)?,
        E::Call(f, args) => {
            let v: Vec<f64> = args.iter().map(|a| eval(a, env)).collect::<Result<_, _>>()?;
            match f.as_str() {
                "exp" => v[0].exp(),
                "abs" => v[0].abs(),
                "int2float" | "bool2int" => v[0],
                "not" => b(v[0] == 0.0),
                "min" => v[0].min(v[1]),
                "max" => v[0].max(v[1]),
                _ => return Err(format!("unknown function `{f}`")),
            }
        }
        E::Bin(op, l, r) => {
            let x = eval(l, env)?;
            if *op == "->" && x == 0.0 {
                return Ok(1.0);
            }
            let y = eval(r, env)?;
            match *op {
                "->" => b(y != 0.0),
                "/\\" => b(x != 0.0 && y != 0.0),
                "\\/" => b(x != 0.0 || y != 0.0),
                "<" => b(x < y),
                "<=" => b(x <= y),
                ">" => b(x > y),
                ">=" => b(x >= y),
                "=" => b(x == y),
                "!=" => b(x != y),
                "+" => x + y,
                "-" => x - y,
                "*" => x * y,
                "/" => {
                    if y == 0.0 {
                        return Err("division by zero".into());
                    }
                    x / y
                }
                _ => unreachable!(),
            }
        }
    })
}

#[derive(Debug)]
pub struct Model {
    pub stmts: Vec<Stmt>,
}

impl Model {
    pub fn parse(text: &str) -> Model {
        let toks = lex(text);
        let mut stmts = Vec::new();
        let mut p = P { toks, pos: 0 };
        while p.peek().is_some() {
            stmts.push(p.stmt());
            p.expect(";");
        }
        Model { stmts }
    }

    pub fn params(&self) -> Vec<&str> {
        self.stmts
            .iter()
            .filter_map(|s| match s {
                Stmt::Param { name, value: None } => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn decisions(&self) -> Vec<(&str, &Domain)> {
        self.stmts
            .iter()
            .filter_map(|s| match s {
                Stmt::Var { name, domain } => Some((name.as_str(), domain)),
                _ => None,
            })
            .collect()
    }

    /// Evaluates the model at the given parameters and decisions. Decision
    /// variables not given are auxiliaries: they take the value of the
    /// implication whose guard holds. Fails if any constraint or domain is
    /// violated; returns the objective (`None` for satisfaction problems).
    pub fn evaluate(&self, inputs: &[(&str, f64)]) -> Result<Option<f64>, String> {
        let mut env: HashMap<String, f64> = inputs.iter().map(|(n, v)| (n.to_string(), *v)).collect();
        for s in &self.stmts {
            if let Stmt::Param { name, value: Some(e) } = s {
                let v = eval(e, &env)?;
                env.insert(name.clone(), v);
            }
        }
        for s in &self.stmts {
            if let Stmt::Constraint(E::Bin("->", g, rel)) = s {
                if let E::Bin("=", lhs, rhs) = rel.as_ref() {
                    if let E::Var(aux) = lhs.as_ref() {
                        if !env.contains_key(aux) && eval(g, &env).is_ok_and(|v| v != 0.0) {
                            let v = eval(rhs, &env)?;
                            env.insert(aux.clone(), v);
                        }
                    }
                }
            }
        }
        for (name, dom) in self.decisions() {
            let x = *env.get(name).ok_or_else(|| format!("no value for `{name}`"))?;
            let ok = match dom {
                Domain::Range(lo, hi) => *lo - 1e-9 <= x && x <= *hi + 1e-9,
                Domain::Set(vals) => vals.contains(&x),
                Domain::Bool => x == 0.0 || x == 1.0,
            };
            if !ok {
                return Err(format!("`{name}` = {x} outside its domain"));
            }
        }
        let mut objective = None;
        for s in &self.stmts {
            match s {
                Stmt::Constraint(c) => {
                    if eval(c, &env)? == 0.0 {
                        return Err(format!("violated: {c:?}"));
                    }
                }
                Stmt::Minimize(e) => objective = Some(eval(e, &env)?),
                _ => {}
            }
        }
        Ok(objective)
    }
}
