//! Lexer and recursive-descent parser for scalar expressions.
//!
//! ```text
//! add     := mul (("+" | "-") mul)*
//! mul     := unary (("*" | "/") unary)*
//! unary   := ("-" | "+") unary | power
//! power   := primary ("^" exponent)?
//! exponent:= "-"? INT | "(" "-"? INT ")"
//! primary := NUMBER | "i" | IDENT | IDENT "(" add ("," add)* ")" | "(" add ")"
//! ```
//!
//! The token stream and [`ExprParser`] are public so that file formats built on top of
//! expressions can reuse them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::expr::Expr;
use super::number::CRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: expected {expected}, found {found}")]
    Syntax { line: usize, col: usize, expected: String, found: String },
    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {message}")]
    Invalid { line: usize, col: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::UnknownIdentifier { line, col, .. }
            | ParseError::Invalid { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Number(BigRational),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "`{s}`"),
            TokenKind::Number(n) => write!(f, "number {n}"),
            TokenKind::Plus => write!(f, "`+`"),
            TokenKind::Minus => write!(f, "`-`"),
            TokenKind::Star => write!(f, "`*`"),
            TokenKind::Slash => write!(f, "`/`"),
            TokenKind::Caret => write!(f, "`^`"),
            TokenKind::LParen => write!(f, "`(`"),
            TokenKind::RParen => write!(f, "`)`"),
            TokenKind::LBracket => write!(f, "`[`"),
            TokenKind::RBracket => write!(f, "`]`"),
            TokenKind::Comma => write!(f, "`,`"),
            TokenKind::Equals => write!(f, "`=`"),
            TokenKind::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub col: usize,
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(k) => (&text[..k], text[k + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = if scale >= 0 {
        num_traits::pow(ten, scale as usize)
    } else {
        num_traits::pow(ten, (-scale) as usize).recip()
    };
    Some(BigRational::from_integer(digits) * factor)
}

/// Splits `text` into tokens. `#` starts a comment; newlines are whitespace.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '/' => Some(TokenKind::Slash),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            ',' => Some(TokenKind::Comma),
            '=' => Some(TokenKind::Equals),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token { kind, line: tl, col: tc });
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { kind: TokenKind::Ident(s), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let value = parse_decimal(&s).ok_or_else(|| ParseError::Syntax {
                line: tl,
                col: tc,
                expected: "a number".into(),
                found: format!("`{s}`"),
            })?;
            out.push(Token { kind: TokenKind::Number(value), line: tl, col: tc });
            continue;
        }
        return Err(ParseError::Syntax {
            line: tl,
            col: tc,
            expected: "a token".into(),
            found: format!("character `{c}`"),
        });
    }
    out.push(Token { kind: TokenKind::Eof, line, col });
    Ok(out)
}

pub const BUILTINS: [&str; 4] = ["exp", "sin", "cos", "ln"];

/// Names visible to the expression parser.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    vars: BTreeSet<String>,
    funcs: BTreeMap<String, Vec<Expr>>,
    named: BTreeMap<String, Expr>,
}

impl Scope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars<S: AsRef<str>>(vars: &[S]) -> Self {
        let mut s = Self::new();
        for v in vars {
            s.add_var(v.as_ref());
        }
        s
    }

    pub fn add_var(&mut self, name: &str) {
        self.vars.insert(name.to_string());
    }

    /// Declares an abstract function; a bare use of `name` means `name(default_args)`.
    pub fn add_func(&mut self, name: &str, default_args: Vec<Expr>) {
        self.funcs.insert(name.to_string(), default_args);
    }

    pub fn add_named(&mut self, name: &str, value: Expr) {
        self.named.insert(name.to_string(), value);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vars.contains(name) || self.funcs.contains_key(name) || self.named.contains_key(name)
    }

    pub fn func_arity(&self, name: &str) -> Option<usize> {
        self.funcs.get(name).map(Vec::len)
    }
}

/// Recursive-descent parser over a token slice.
pub struct ExprParser<'a> {
    tokens: &'a [Token],
    pub pos: usize,
    scope: &'a Scope,
    basis_vars: Option<&'a [String]>,
}

impl<'a> ExprParser<'a> {
    pub fn new(tokens: &'a [Token], scope: &'a Scope) -> Self {
        ExprParser { tokens, pos: 0, scope, basis_vars: None }
    }

    /// Treat `d<var>` identifiers as basis differentials that terminate a product.
    pub fn with_basis(mut self, vars: &'a [String]) -> Self {
        self.basis_vars = Some(vars);
        self
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    pub fn peek_at(&self, offset: usize) -> &Token {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)]
    }

    pub fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    pub fn error_here(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::Syntax { line: t.line, col: t.col, expected: expected.into(), found: t.kind.to_string() }
    }

    pub fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.error_here(expected))
        }
    }

    pub fn expect_ident(&mut self, expected: &str) -> Result<(String, Token), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                Ok((s, self.advance()))
            }
            _ => Err(self.error_here(expected)),
        }
    }

    /// Index of the variety variable named by a `d<var>` token, if basis parsing is enabled.
    pub fn basis_index(&self, tok: &Token) -> Option<usize> {
        let vars = self.basis_vars?;
        match &tok.kind {
            TokenKind::Ident(s) => {
                let rest = s.strip_prefix('d')?;
                vars.iter().position(|v| v == rest)
            }
            _ => None,
        }
    }

    pub fn parse_add(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.parse_mul()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.advance();
                    acc = &acc + &self.parse_mul()?;
                }
                TokenKind::Minus => {
                    self.advance();
                    acc = &acc - &self.parse_mul()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    pub fn parse_mul(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.parse_unary()?;
        loop {
            match self.peek().kind {
                TokenKind::Star => {
                    if self.basis_index(self.peek_at(1)).is_some() {
                        return Ok(acc);
                    }
                    self.advance();
                    acc = &acc * &self.parse_unary()?;
                }
                TokenKind::Slash => {
                    let op = self.advance();
                    let rhs = self.parse_unary()?;
                    acc = acc.checked_div(&rhs).ok_or_else(|| ParseError::Invalid {
                        line: op.line,
                        col: op.col,
                        message: "division by zero".into(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().kind {
            TokenKind::Minus => {
                self.advance();
                Ok(-self.parse_unary()?)
            }
            TokenKind::Plus => {
                self.advance();
                self.parse_unary()
            }
            _ => self.parse_power(),
        }
    }

    fn parse_int_exponent(&mut self) -> Result<i64, ParseError> {
        let negative = if self.peek().kind == TokenKind::Minus {
            self.advance();
            true
        } else {
            false
        };
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Number(n) if n.is_integer() => {
                self.advance();
                let v = n.to_integer().to_i64().filter(|v| *v <= 1024).ok_or_else(|| ParseError::Invalid {
                    line: tok.line,
                    col: tok.col,
                    message: "exponent too large".into(),
                })?;
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.error_here("an integer exponent")),
        }
    }

    fn parse_power(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_primary()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        let caret = self.advance();
        let n = if self.peek().kind == TokenKind::LParen {
            self.advance();
            let n = self.parse_int_exponent()?;
            self.expect(TokenKind::RParen, "`)`")?;
            n
        } else {
            self.parse_int_exponent()?
        };
        base.checked_powi(n).ok_or_else(|| ParseError::Invalid {
            line: caret.line,
            col: caret.col,
            message: "zero raised to a negative power".into(),
        })
    }

    fn parse_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(TokenKind::LParen, "`(`")?;
        let mut args = vec![self.parse_add()?];
        while self.peek().kind == TokenKind::Comma {
            self.advance();
            args.push(self.parse_add()?);
        }
        self.expect(TokenKind::RParen, "`,` or `)`")?;
        Ok(args)
    }

    fn parse_primary(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Number(n) => {
                self.advance();
                Ok(Expr::constant(CRational::real(n.clone())))
            }
            TokenKind::LParen => {
                self.advance();
                let e = self.parse_add()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                if self.basis_index(&tok).is_some() && !self.scope.contains(name) {
                    return Err(self.error_here("an expression (basis differentials must follow `*`)"));
                }
                self.advance();
                self.resolve(name, &tok)
            }
            _ => Err(self.error_here("an expression")),
        }
    }

    fn resolve(&mut self, name: &str, tok: &Token) -> Result<Expr, ParseError> {
        if name == "i" {
            return Ok(Expr::imag());
        }
        if BUILTINS.contains(&name) {
            let args = self.parse_args()?;
            if args.len() != 1 {
                return Err(ParseError::Invalid {
                    line: tok.line,
                    col: tok.col,
                    message: format!("`{name}` takes 1 argument, got {}", args.len()),
                });
            }
            let u = &args[0];
            return Ok(match name {
                "exp" => Expr::exp(u),
                "sin" => Expr::sin(u),
                "cos" => Expr::cos(u),
                _ => Expr::ln(u),
            });
        }
        if let Some(defaults) = self.scope.funcs.get(name) {
            let args = if self.peek().kind == TokenKind::LParen {
                let args = self.parse_args()?;
                if args.len() != defaults.len() {
                    return Err(ParseError::Invalid {
                        line: tok.line,
                        col: tok.col,
                        message: format!("`{name}` takes {} argument(s), got {}", defaults.len(), args.len()),
                    });
                }
                args
            } else {
                defaults.clone()
            };
            return Ok(Expr::func(name, args));
        }
        if let Some(e) = self.scope.named.get(name) {
            return Ok(e.clone());
        }
        if self.scope.vars.contains(name) {
            return Ok(Expr::var(name));
        }
        Err(ParseError::UnknownIdentifier { line: tok.line, col: tok.col, name: name.to_string() })
    }

    pub fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }
}

/// Parses a complete expression over the given variables.
pub fn parse_expr<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Expr, ParseError> {
    parse_expr_in(text, &Scope::with_vars(vars))
}

pub fn parse_expr_in(text: &str, scope: &Scope) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = ExprParser::new(&tokens, scope);
    let e = p.parse_add()?;
    if !p.at_eof() {
        return Err(p.error_here("an operator or end of input"));
    }
    Ok(e)
}

/// Parses `"x=1, y=1/2"` into exact bindings.
pub fn parse_bindings(text: &str, scope: &Scope) -> Result<Vec<(String, CRational)>, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = ExprParser::new(&tokens, scope);
    let empty = Scope::new();
    let mut out = Vec::new();
    loop {
        let (name, tok) = p.expect_ident("a variable name")?;
        if !scope.contains(&name) {
            return Err(ParseError::UnknownIdentifier { line: tok.line, col: tok.col, name });
        }
        p.expect(TokenKind::Equals, "`=`")?;
        let vt = p.peek().clone();
        let mut sub = ExprParser { tokens: &tokens, pos: p.pos, scope: &empty, basis_vars: None };
        let value = sub.parse_add()?;
        p.pos = sub.pos;
        let c = value.as_constant().ok_or_else(|| ParseError::Invalid {
            line: vt.line,
            col: vt.col,
            message: "binding values must be constants".into(),
        })?;
        out.push((name, c));
        match p.peek().kind {
            TokenKind::Comma => {
                p.advance();
            }
            TokenKind::Eof => return Ok(out),
            _ => return Err(p.error_here("`,` or end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_product_and_constant() {
        let e = parse_expr("x*y + 2", &["x", "y"]).unwrap();
        assert_eq!(e, &(&Expr::var("x") * &Expr::var("y")) + &Expr::int(2));
    }

    #[test]
    fn decay_factor() {
        let e = parse_expr("exp(-a*t)", &["a", "t"]).unwrap();
        assert_eq!(e, Expr::exp(&-(&Expr::var("a") * &Expr::var("t"))));
    }

    #[test]
    fn imaginary_unit_squared() {
        assert_eq!(parse_expr::<&str>("i^2", &[]).unwrap(), Expr::int(-1));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_expr::<&str>("1.5", &[]).unwrap(), Expr::ratio(3, 2));
        assert_eq!(parse_expr::<&str>("2.5e-1", &[]).unwrap(), Expr::ratio(1, 4));
    }

    #[test]
    fn precedence() {
        let e = parse_expr("-x^2 + 2*x/4", &["x"]).unwrap();
        let x = Expr::var("x");
        assert_eq!(e, &(-&x.powi(2)) + &(&x * &Expr::ratio(1, 2)));
        assert_eq!(parse_expr("x^(-1)", &["x"]).unwrap(), x.powi(-1));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_expr("x + * y", &["x", "y"]).unwrap_err();
        assert_eq!(err.position(), (1, 5));
        let err = parse_expr("x + w", &["x"]).unwrap_err();
        assert!(matches!(err, ParseError::UnknownIdentifier { ref name, .. } if name == "w"));
        let err = parse_expr("1/(x-x)", &["x"]).unwrap_err();
        assert!(matches!(err, ParseError::Invalid { .. }));
        let err = parse_expr("x^y", &["x", "y"]).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn declared_functions_expand() {
        let mut scope = Scope::with_vars(&["z"]);
        scope.add_func("A_x", vec![Expr::var("z")]);
        let a = parse_expr_in("A_x", &scope).unwrap();
        assert_eq!(a, parse_expr_in("A_x(z)", &scope).unwrap());
        assert!(parse_expr_in("A_x(z, z)", &scope).is_err());
    }

    #[test]
    fn bindings() {
        let scope = Scope::with_vars(&["x", "t"]);
        let b = parse_bindings("x=1/2, t=-3", &scope).unwrap();
        assert_eq!(b, vec![("x".to_string(), CRational::ratio(1, 2)), ("t".to_string(), CRational::from_int(-3))]);
    }
}
