//! A small arithmetic expression language for problem-specification files.
//!
//! Coefficient functions use the variable `xi`; nonlinear right-hand sides
//! may also use `z` and `zp`. The grammar is deliberately rigid:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          (right-associative)
//! atom   := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! so `^` binds tighter than unary minus (`-2^2` is `-(2^2)`), which binds
//! tighter than `*` and `/`. Numbers are decimal with optional scientific
//! exponent. There is no implicit multiplication: `2xi` is a parse error.
//! Recognized names are the variables `xi`, `z`, `zp`, the constants `pi`,
//! `e`, and the functions `sin cos tan exp ln sqrt abs gamma`.

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    Xi,
    Z,
    Zp,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::Xi => "xi",
            Var::Z => "z",
            Var::Zp => "zp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Gamma,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Gamma => "gamma",
        }
    }
}

/// Abstract syntax tree of one expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(NamedConst),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("parse error at byte {offset}: expected {expected}, found {found}")]
    Parse {
        offset: usize,
        expected: &'static str,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("ln of non-positive value {0}")]
    LnDomain(f64),
    #[error("sqrt of negative value {0}")]
    SqrtDomain(f64),
    #[error("gamma of non-positive value {0}")]
    GammaDomain(f64),
    #[error("evaluation produced a non-finite value in `{context}`")]
    NonFinite { context: String },
}

// ---------------------------------------------------------------------
// lexer
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let b = self.src[self.pos];
        let single = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if b.is_ascii_digit() {
            let mut end = self.pos;
            while end < self.src.len() && self.src[end].is_ascii_digit() {
                end += 1;
            }
            if end < self.src.len() && self.src[end] == b'.' {
                end += 1;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
            }
            if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                let mut exp_end = end + 1;
                if exp_end < self.src.len()
                    && (self.src[exp_end] == b'+' || self.src[exp_end] == b'-')
                {
                    exp_end += 1;
                }
                if exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                    while exp_end < self.src.len() && self.src[exp_end].is_ascii_digit() {
                        exp_end += 1;
                    }
                    end = exp_end;
                }
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).expect("ascii digits");
            let value: f64 = text.parse().map_err(|_| ExprError::Parse {
                offset: start,
                expected: "a number",
                found: text.to_string(),
            })?;
            self.pos = end;
            return Ok((Tok::Num(value), start));
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).expect("ascii ident");
            self.pos = end;
            return Ok((Tok::Ident(text.to_string()), start));
        }
        Err(ExprError::Parse {
            offset: start,
            expected: "a token",
            found: format!("byte {:?}", b as char),
        })
    }
}

// ---------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ExprError> {
        let mut lexer = Lexer::new(src);
        let (tok, offset) = lexer.next()?;
        Ok(Self { lexer, tok, offset })
    }

    fn advance(&mut self) -> Result<(), ExprError> {
        let (tok, offset) = self.lexer.next()?;
        self.tok = tok;
        self.offset = offset;
        Ok(())
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ExprError> {
        if self.tok == want {
            self.advance()
        } else {
            Err(ExprError::Parse {
                offset: self.offset,
                expected,
                found: self.tok.to_string(),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.tok == Tok::Minus {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.advance()?;
            // right-associative; a unary exponent keeps `2^-3` legal
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let offset = self.offset;
                self.advance()?;
                if let Some(func) = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "tan" => Some(Func::Tan),
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::Ln),
                    "sqrt" => Some(Func::Sqrt),
                    "abs" => Some(Func::Abs),
                    "gamma" => Some(Func::Gamma),
                    _ => None,
                } {
                    self.expect(Tok::LParen, "'(' after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match name.as_str() {
                    "xi" => Ok(Expr::Var(Var::Xi)),
                    "z" => Ok(Expr::Var(Var::Z)),
                    "zp" => Ok(Expr::Var(Var::Zp)),
                    "pi" => Ok(Expr::Const(NamedConst::Pi)),
                    "e" => Ok(Expr::Const(NamedConst::E)),
                    _ => Err(ExprError::UnknownIdentifier { name, offset }),
                }
            }
            tok => Err(ExprError::Parse {
                offset: self.offset,
                expected: "a number, name, or '('",
                found: tok.to_string(),
            }),
        }
    }
}

/// Parse an expression over the variables xi, z, zp.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.tok != Tok::Eof {
        return Err(ExprError::Parse {
            offset: p.offset,
            expected: "end of input",
            found: p.tok.to_string(),
        });
    }
    Ok(e)
}

/// Evaluate with the given variable bindings. Domain violations are
/// reported as errors rather than silent NaN/inf.
pub fn eval(e: &Expr, xi: f64, z: f64, zp: f64) -> Result<f64, ExprError> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Var(Var::Xi) => xi,
        Expr::Var(Var::Z) => z,
        Expr::Var(Var::Zp) => zp,
        Expr::Const(NamedConst::Pi) => std::f64::consts::PI,
        Expr::Const(NamedConst::E) => std::f64::consts::E,
        Expr::Neg(inner) => -eval(inner, xi, z, zp)?,
        Expr::Bin(op, lhs, rhs) => {
            let a = eval(lhs, xi, z, zp)?;
            let b = eval(rhs, xi, z, zp)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(ExprError::DivisionByZero);
                    }
                    a / b
                }
                BinOp::Pow => a.powf(b),
            }
        }
        Expr::Call(func, arg) => {
            let a = eval(arg, xi, z, zp)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Exp => a.exp(),
                Func::Ln => {
                    if a <= 0.0 {
                        return Err(ExprError::LnDomain(a));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(ExprError::SqrtDomain(a));
                    }
                    a.sqrt()
                }
                Func::Abs => a.abs(),
                Func::Gamma => crate::fracops::gamma(a).map_err(|_| ExprError::GammaDomain(a))?,
            }
        }
    };
    if !v.is_finite() {
        return Err(ExprError::NonFinite {
            context: e.to_string(),
        });
    }
    Ok(v)
}

/// The exact set of variables appearing in the expression.
pub fn free_vars(e: &Expr) -> BTreeSet<Var> {
    fn walk(e: &Expr, out: &mut BTreeSet<Var>) {
        match e {
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Neg(inner) | Expr::Call(_, inner) => walk(inner, out),
            Expr::Bin(_, lhs, rhs) => {
                walk(lhs, out);
                walk(rhs, out);
            }
            Expr::Num(_) | Expr::Const(_) => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(e, &mut out);
    out
}

impl fmt::Display for Expr {
    /// Fully parenthesized form; parsing it back yields an identical tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Const(NamedConst::Pi) => write!(f, "pi"),
            Expr::Const(NamedConst::E) => write!(f, "e"),
            Expr::Neg(inner) => write!(f, "(-{inner})"),
            Expr::Bin(op, lhs, rhs) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({lhs} {sym} {rhs})")
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}
