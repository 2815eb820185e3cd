//! Tiny arithmetic grammar for user-supplied bound shapes `H_i(ρ̄_i)`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'pi' | rhoK | func '(' expr ')' | '(' expr ')'
//! func  := sin | cos | abs | sqrt | exp | tanh
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Abs,
    Sqrt,
    Exp,
    Tanh,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    /// 0-based state index.
    Var(usize),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Parsed expression; keeps its source text for echoing.
#[derive(Debug, Clone)]
pub struct Expr {
    source: String,
    root: Node,
    max_var: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expression(format!("unexpected trailing input in `{src}`")));
        }
        let mut max_var = 0;
        visit_vars(&root, &mut |k| max_var = max_var.max(k + 1));
        Ok(Self { source: src.trim().to_string(), root, max_var })
    }

    pub fn constant(v: f64) -> Self {
        Self { source: format!("{v}"), root: Node::Const(v), max_var: 0 }
    }

    /// Highest 1-based state index referenced (0 for constants).
    pub fn max_state_index(&self) -> usize {
        self.max_var
    }

    pub fn is_constant_one(&self) -> bool {
        self.root == Node::Const(1.0)
    }

    pub fn eval(&self, rho: &[f64]) -> f64 {
        eval(&self.root, rho)
    }
}

fn visit_vars(n: &Node, f: &mut impl FnMut(usize)) {
    match n {
        Node::Const(_) => {}
        Node::Var(k) => f(*k),
        Node::Neg(a) | Node::Call(_, a) => visit_vars(a, f),
        Node::Bin(_, a, b) => {
            visit_vars(a, f);
            visit_vars(b, f);
        }
    }
}

fn eval(n: &Node, rho: &[f64]) -> f64 {
    match n {
        Node::Const(v) => *v,
        Node::Var(k) => rho.get(*k).copied().unwrap_or(f64::NAN),
        Node::Neg(a) => -eval(a, rho),
        Node::Bin(op, a, b) => {
            let (x, y) = (eval(a, rho), eval(b, rho));
            match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                '/' => x / y,
                _ => x.powf(y),
            }
        }
        Node::Call(func, a) => {
            let x = eval(a, rho);
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Abs => x.abs(),
                Func::Sqrt => x.sqrt(),
                Func::Exp => x.exp(),
                Func::Tanh => x.tanh(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number `{text}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect::<String>().to_ascii_lowercase()));
        } else if "+-*/^".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Tok::RParen);
            i += 1;
        } else {
            return Err(Error::Expression(format!("unexpected character `{c}`")));
        }
    }
    if out.is_empty() {
        return Err(Error::Expression("empty expression".into()));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            return Ok(Node::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Node::Const(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "pi" => return Ok(Node::Const(std::f64::consts::PI)),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "abs" => Func::Abs,
                    "sqrt" => Func::Sqrt,
                    "exp" => Func::Exp,
                    "tanh" => Func::Tanh,
                    _ => {
                        let idx = name
                            .strip_prefix("rho")
                            .and_then(|d| d.parse::<usize>().ok())
                            .filter(|&k| k >= 1)
                            .ok_or_else(|| Error::Expression(format!("unknown identifier `{name}`")))?;
                        return Ok(Node::Var(idx - 1));
                    }
                };
                match self.next() {
                    Some(Tok::LParen) => {}
                    _ => return Err(Error::Expression(format!("expected `(` after `{name}`"))),
                }
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            other => Err(Error::Expression(format!("unexpected token {other:?}"))),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.next() {
            Some(Tok::RParen) => Ok(()),
            _ => Err(Error::Expression("expected `)`".into())),
        }
    }
}
