//! Arithmetic expressions over `x1..xn`, used for `--fn` strings.
//!
//! ```text
//! expr  := "if" cond "then" expr "else" expr | sum
//! cond  := conj ("or" conj)*
//! conj  := cmp ("and" cmp)*
//! cmp   := sum ("==" | "!=" | "<" | "<=" | ">" | ">=") sum | "(" cond ")"
//! sum   := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | pow
//! pow   := atom ("^" unary)?
//! atom  := number | "pi" | "e" | "x" | xK | func "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//! A top-level `[e1, e2, ...]` gives a vector-valued map. `x` is short for `x1`.

use metric_jet::FunctionHandle;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at offset {at}")]
    BadChar { ch: char, at: usize },
    #[error("bad number `{0}`")]
    BadNumber(String),
    #[error("expected {expected} at offset {at}, found {found}")]
    Expected { expected: String, at: usize, found: String },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` takes {want} argument(s), got {got}")]
    Arity { name: String, want: usize, got: usize },
    #[error("variable x{index} is out of range for dimension {dim}")]
    VarOutOfRange { index: usize, dim: usize },
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(&'static str),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    const OPS: [&str; 17] = ["<=", ">=", "==", "!=", "&&", "||", "+", "-", "*", "/", "^", "(", ")", ",", "<", ">", "["];
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s = &src[start..i];
            let v = s.parse().map_err(|_| ParseError::BadNumber(s.into()))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c == ']' {
            out.push((Tok::Op("]"), i));
            i += 1;
        } else if let Some(op) = OPS.iter().find(|op| src[i..].starts_with(**op)) {
            out.push((Tok::Op(op), i));
            i += op.len();
        } else {
            return Err(ParseError::BadChar { ch: c, at: i });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Log,
    Exp,
    Abs,
    Sqrt,
    Sign,
    Min,
    Max,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "log" | "ln" => Func::Log,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "sign" => Func::Sign,
            "min" => Func::Min,
            "max" => Func::Max,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    /// `None` for variadic.
    fn arity(self) -> Option<usize> {
        match self {
            Func::Min | Func::Max => None,
            Func::Pow => Some(2),
            _ => Some(1),
        }
    }

    fn apply(self, a: &[f64]) -> f64 {
        match self {
            Func::Sin => a[0].sin(),
            Func::Cos => a[0].cos(),
            Func::Log => a[0].ln(),
            Func::Exp => a[0].exp(),
            Func::Abs => a[0].abs(),
            Func::Sqrt => a[0].sqrt(),
            Func::Sign => {
                if a[0] > 0.0 {
                    1.0
                } else if a[0] < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Func::Min => a.iter().cloned().fold(f64::INFINITY, f64::min),
            Func::Max => a.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            Func::Pow => a[0].powf(a[1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    If(Box<Cond>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Cond {
    Cmp(&'static str, Expr, Expr),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Expr {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Expr::Call(f, args) => {
                let v: Vec<f64> = args.iter().map(|a| a.eval(x)).collect();
                f.apply(&v)
            }
            Expr::If(c, t, e) => {
                if c.eval(x) {
                    t.eval(x)
                } else {
                    e.eval(x)
                }
            }
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) => e.max_var(),
            Expr::Bin(_, a, b) => a.max_var().max(b.max_var()),
            Expr::Call(_, args) => args.iter().filter_map(Expr::max_var).max(),
            Expr::If(c, t, e) => c.max_var().max(t.max_var()).max(e.max_var()),
        }
    }
}

impl Cond {
    fn eval(&self, x: &[f64]) -> bool {
        match self {
            Cond::Cmp(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match *op {
                    "==" => a == b,
                    "!=" => a != b,
                    "<" => a < b,
                    "<=" => a <= b,
                    ">" => a > b,
                    _ => a >= b,
                }
            }
            Cond::And(a, b) => a.eval(x) && b.eval(x),
            Cond::Or(a, b) => a.eval(x) || b.eval(x),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Cond::Cmp(_, a, b) => a.max_var().max(b.max_var()),
            Cond::And(a, b) | Cond::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn found(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Num(v)) => format!("`{v}`"),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Op(o)) => format!("`{o}`"),
        }
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Expected { expected: expected.into(), at: self.at(), found: self.found() })
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Op(o)) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> Result<(), ParseError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            self.fail(&format!("`{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if self.eat_word("if") {
            let c = self.cond()?;
            if !self.eat_word("then") {
                return self.fail("`then`");
            }
            let t = self.expr()?;
            if !self.eat_word("else") {
                return self.fail("`else`");
            }
            let e = self.expr()?;
            return Ok(Expr::If(Box::new(c), Box::new(t), Box::new(e)));
        }
        self.sum()
    }

    fn cond(&mut self) -> Result<Cond, ParseError> {
        let mut c = self.conj()?;
        while self.eat_word("or") || self.eat_op("||") {
            c = Cond::Or(Box::new(c), Box::new(self.conj()?));
        }
        Ok(c)
    }

    fn conj(&mut self) -> Result<Cond, ParseError> {
        let mut c = self.cmp()?;
        while self.eat_word("and") || self.eat_op("&&") {
            c = Cond::And(Box::new(c), Box::new(self.cmp()?));
        }
        Ok(c)
    }

    fn cmp(&mut self) -> Result<Cond, ParseError> {
        // a parenthesised condition, or a comparison whose left side starts with "("
        if matches!(self.peek(), Some(Tok::Op("("))) {
            let save = self.pos;
            self.pos += 1;
            if let Ok(c) = self.cond() {
                if self.eat_op(")") {
                    return Ok(c);
                }
            }
            self.pos = save;
        }
        let a = self.sum()?;
        for op in ["==", "!=", "<=", ">=", "<", ">"] {
            if self.eat_op(op) {
                return Ok(Cond::Cmp(op, a, self.sum()?));
            }
        }
        self.fail("a comparison")
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            if self.eat_op("+") {
                e = Expr::Bin('+', Box::new(e), Box::new(self.term()?));
            } else if self.eat_op("-") {
                e = Expr::Bin('-', Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            if self.eat_op("*") {
                e = Expr::Bin('*', Box::new(e), Box::new(self.unary()?));
            } else if self.eat_op("/") {
                e = Expr::Bin('/', Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op("+") {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat_op("^") {
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Op("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_op(")")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => return Ok(Expr::Num(std::f64::consts::E)),
                    "x" => return Ok(Expr::Var(0)),
                    _ => {}
                }
                if let Some(k) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    if k == 0 {
                        self.pos -= 1;
                        return self.fail("a variable x1, x2, ...");
                    }
                    return Ok(Expr::Var(k - 1));
                }
                let f = Func::lookup(&name).ok_or_else(|| ParseError::UnknownFunction(name.clone()))?;
                self.expect_op("(")?;
                let mut args = vec![self.expr()?];
                while self.eat_op(",") {
                    args.push(self.expr()?);
                }
                self.expect_op(")")?;
                match f.arity() {
                    Some(n) if n != args.len() => Err(ParseError::Arity { name, want: n, got: args.len() }),
                    _ => Ok(Expr::Call(f, args)),
                }
            }
            _ => self.fail("a number, variable, function or `(`"),
        }
    }
}

/// A parsed `--fn` expression with optional point overrides.
#[derive(Debug, Clone)]
pub struct ExprFunction {
    pub source: String,
    components: Vec<Expr>,
    overrides: Vec<(Vec<f64>, Vec<f64>)>,
}

impl ExprFunction {
    pub fn parse(source: &str) -> Result<ExprFunction, ParseError> {
        let toks = lex(source)?;
        if toks.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut p = Parser { toks, pos: 0, end: source.len() };
        let components = if p.eat_op("[") {
            let mut c = vec![p.expr()?];
            while p.eat_op(",") {
                c.push(p.expr()?);
            }
            p.expect_op("]")?;
            c
        } else {
            vec![p.expr()?]
        };
        if p.peek().is_some() {
            return p.fail("end of input");
        }
        Ok(ExprFunction { source: source.to_string(), components, overrides: vec![] })
    }

    /// Number of variables the expression refers to.
    pub fn arity(&self) -> usize {
        self.components.iter().filter_map(Expr::max_var).max().map_or(0, |i| i + 1)
    }

    pub fn dim_out(&self) -> usize {
        self.components.len()
    }

    /// Declares `f(point) = value`.
    pub fn with_override(mut self, point: Vec<f64>, value: Vec<f64>) -> Self {
        self.overrides.push((point, value));
        self
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        if let Some((_, v)) = self.overrides.iter().find(|(p, _)| p.as_slice() == x) {
            return v.clone();
        }
        self.components.iter().map(|e| e.eval(x)).collect()
    }

    /// A handle on `ℝ^dim`; points where some component is not finite are outside the domain.
    pub fn into_handle(self, dim: usize) -> Result<FunctionHandle, ParseError> {
        let need = self.arity();
        if need > dim {
            return Err(ParseError::VarOutOfRange { index: need, dim });
        }
        let label = self.source.clone();
        let dim_out = self.dim_out();
        let f = std::sync::Arc::new(self);
        let g = f.clone();
        Ok(FunctionHandle::new(label, dim, dim_out, move |x| f.eval(x))
            .with_domain(move |x| g.eval(x).iter().all(|v| v.is_finite())))
    }
}
