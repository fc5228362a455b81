//! A small arithmetic expression language for user-supplied test functions.
//!
//! ```text
//! expr  := term  { ("+" | "-") term }
//! term  := unary { ("*" | "/") unary }
//! unary := "-" unary | power
//! power := primary [ "^" unary ]
//! primary := number | ident [ "(" expr { "," expr } ")" ] | "(" expr ")"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2 = -4` and
//! `2^-1 = 0.5`. Variables are `x1 .. xN`; at arity 1 plain `x` is accepted as well.
//! Functions: `abs sqrt exp log` (one argument), `pow` (two), `min max` (two or more).
//! The Unicode operators `−`, `×` and `÷` are accepted as well.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{to_f64_vec, Real};

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
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Exp,
    Log,
    Min,
    Max,
    Pow,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Min => "min",
            Func::Max => "max",
            Func::Pow => "pow",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "min" => Func::Min,
            "max" => Func::Max,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    fn accepts(self, argc: usize) -> bool {
        match self {
            Func::Abs | Func::Sqrt | Func::Exp | Func::Log => argc == 1,
            Func::Pow => argc == 2,
            Func::Min | Func::Max => argc >= 2,
        }
    }
}

/// Syntax tree. Variables are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// A parsed expression together with its declared arity.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Expr,
    arity: usize,
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalEnv<T> {
    values: Vec<T>,
}

impl<T: Real> EvalEnv<T> {
    pub fn new(values: Vec<T>) -> Self {
        EvalEnv { values }
    }

    pub fn arity(&self) -> usize {
        self.values.len()
    }
}

pub fn parse(text: &str, arity: usize) -> Result<Expression> {
    if arity == 0 {
        return Err(Error::domain("arity must be at least 1"));
    }
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(Error::Syntax {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        arity,
        end: text.len(),
    };
    let root = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(Error::Syntax {
            position: tok.offset,
            message: format!("unexpected {}", tok.kind),
        });
    }
    Ok(Expression { root, arity })
}

impl Expression {
    pub fn new(root: Expr, arity: usize) -> Result<Self> {
        fn check(e: &Expr, arity: usize) -> Result<()> {
            match e {
                Expr::Var(i) if *i == 0 || *i > arity => Err(Error::VariableOutOfRange { index: *i, arity }),
                Expr::Neg(a) => check(a, arity),
                Expr::Bin(_, a, b) => check(a, arity).and_then(|_| check(b, arity)),
                Expr::Call(f, args) => {
                    if !f.accepts(args.len()) {
                        return Err(Error::domain(format!("{} does not take {} arguments", f.name(), args.len())));
                    }
                    args.iter().try_for_each(|a| check(a, arity))
                }
                _ => Ok(()),
            }
        }
        check(&root, arity)?;
        Ok(Expression { root, arity })
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluates the expression; any non-finite intermediate value is an error naming
    /// the offending subexpression and the inputs.
    pub fn eval<T: Real>(&self, env: &EvalEnv<T>) -> Result<T> {
        if env.arity() != self.arity {
            return Err(Error::domain(format!(
                "expression has arity {}, environment binds {} values",
                self.arity,
                env.arity()
            )));
        }
        self.eval_slice(&env.values)
    }

    /// Same as [`Expression::eval`] without building an environment.
    pub fn eval_slice<T: Real>(&self, values: &[T]) -> Result<T> {
        if values.len() != self.arity {
            return Err(Error::domain(format!(
                "expression has arity {}, got {} values",
                self.arity,
                values.len()
            )));
        }
        self.node(&self.root, values)
    }

    fn node<T: Real>(&self, e: &Expr, x: &[T]) -> Result<T> {
        let v = match e {
            Expr::Num(c) => T::lit(*c),
            Expr::Var(i) => x[i - 1],
            Expr::Neg(a) => -self.node(a, x)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.node(a, x)?, self.node(b, x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, args) => {
                let vals = args.iter().map(|a| self.node(a, x)).collect::<Result<Vec<T>>>()?;
                match f {
                    Func::Abs => vals[0].abs(),
                    Func::Sqrt => vals[0].sqrt(),
                    Func::Exp => vals[0].exp(),
                    Func::Log => vals[0].ln(),
                    Func::Pow => vals[0].powf(vals[1]),
                    Func::Min => vals.iter().copied().fold(T::infinity(), T::min),
                    Func::Max => vals.iter().copied().fold(T::neg_infinity(), T::max),
                }
            }
        };
        if !v.is_finite() {
            return Err(Error::evaluation(
                to_f64_vec(x),
                format!("`{}` evaluated to {v}", self.show(e, true)),
            ));
        }
        Ok(v)
    }

    /// Fully parenthesized canonical form; [`parse`] of the result reproduces the tree.
    pub fn print(&self) -> String {
        self.show(&self.root, true)
    }

    fn show(&self, e: &Expr, wrap: bool) -> String {
        let inner = match e {
            Expr::Num(c) => return format!("{c}"),
            Expr::Var(_) if self.arity == 1 => return "x".to_string(),
            Expr::Var(i) => return format!("x{i}"),
            Expr::Neg(a) => format!("-{}", self.show(a, true)),
            Expr::Bin(op, a, b) => format!("{}{}{}", self.show(a, true), op.symbol(), self.show(b, true)),
            Expr::Call(f, args) => {
                let args: Vec<String> = args.iter().map(|a| self.show(a, false)).collect();
                format!("{}({})", f.name(), args.join(","))
            }
        };
        if wrap {
            format!("({inner})")
        } else {
            inner
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.print())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Num(v) => write!(f, "number {v}"),
            TokKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokKind::Op(c) => write!(f, "`{c}`"),
            TokKind::LParen => f.write_str("`(`"),
            TokKind::RParen => f.write_str("`)`"),
            TokKind::Comma => f.write_str("`,`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => TokKind::Op('+'),
            '-' | '−' => TokKind::Op('-'),
            '*' | '×' => TokKind::Op('*'),
            '/' | '÷' => TokKind::Op('/'),
            '^' => TokKind::Op('^'),
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            ',' => TokKind::Comma,
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                if i < chars.len() && matches!(chars[i].1, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && matches!(chars[j].1, '+' | '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].1.is_ascii_digit() {
                        while j < chars.len() && chars[j].1.is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let end = chars.get(i).map_or(text.len(), |c| c.0);
                let lit = &text[offset..end];
                let v: f64 = lit.parse().map_err(|_| Error::Syntax {
                    position: chars[start].0,
                    message: format!("malformed number `{lit}`"),
                })?;
                out.push(Token {
                    kind: TokKind::Num(v),
                    offset,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let end = chars.get(i).map_or(text.len(), |c| c.0);
                out.push(Token {
                    kind: TokKind::Ident(text[offset..end].to_string()),
                    offset,
                });
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    position: offset,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Token { kind, offset });
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    arity: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokKind::Op(c), ..
            }) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, want: TokKind) -> Result<()> {
        match self.peek() {
            Some(t) if t.kind == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(Error::Syntax {
                position: t.offset,
                message: format!("expected {want}, found {}", t.kind),
            }),
            None => Err(Error::Syntax {
                position: self.end,
                message: format!("expected {want}, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax {
                position: self.end,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok.kind {
            TokKind::Num(v) => Ok(Expr::Num(v)),
            TokKind::LParen => {
                let e = self.expr()?;
                self.expect(TokKind::RParen)?;
                Ok(e)
            }
            TokKind::Ident(name) => {
                if let Some(f) = Func::lookup(&name) {
                    self.expect(TokKind::LParen)?;
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(Token { kind: TokKind::Comma, .. })) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(TokKind::RParen)?;
                    if !f.accepts(args.len()) {
                        return Err(Error::Syntax {
                            position: tok.offset,
                            message: format!("{} does not take {} arguments", f.name(), args.len()),
                        });
                    }
                    return Ok(Expr::Call(f, args));
                }
                self.variable(&name)
            }
            other => Err(Error::Syntax {
                position: tok.offset,
                message: format!("unexpected {other}"),
            }),
        }
    }

    fn variable(&self, name: &str) -> Result<Expr> {
        if name == "x" {
            return if self.arity == 1 {
                Ok(Expr::Var(1))
            } else {
                Err(Error::UnknownIdentifier(format!("{name} (use x1..x{})", self.arity)))
            };
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                let index: usize = digits.parse().map_err(|_| Error::UnknownIdentifier(name.into()))?;
                if index == 0 || index > self.arity {
                    return Err(Error::VariableOutOfRange {
                        index,
                        arity: self.arity,
                    });
                }
                return Ok(Expr::Var(index));
            }
        }
        Err(Error::UnknownIdentifier(name.into()))
    }
}
