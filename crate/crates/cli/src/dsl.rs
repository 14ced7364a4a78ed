//! System-definition files.
//!
//! ```text
//! file    := decl+
//! decl    := "vars" ident+ | "func" ident "(" ident ("," ident)* ")" | "scalar" ident
//!          | "let" ident "=" expr | "form" ident "=" form
//!          | "field" ident "=" "[" expr ("," expr)* "]" ("rho" expr)?
//!          | "run" command ident*
//! form    := term (("+" | "-") term)*
//! term    := ("+" | "-")? basis | expr "*" basis | expr
//! basis   := "d" ident ("^" "d" ident)*
//! ```
//!
//! Newlines are whitespace and `#` starts a comment, so declarations are delimited by their
//! leading keyword. Keywords cannot be used as names.

use std::collections::BTreeSet;

use pfaff_core::exterior::{DifferentialForm, DirectionField, Variety};
use pfaff_core::symbolic::parse::{tokenize, ExprParser, ParseError, Scope, Token, TokenKind};
use pfaff_core::Expr;
use serde::Serialize;

const KEYWORDS: [&str; 7] = ["vars", "func", "scalar", "let", "form", "field", "run"];

/// Analyses a `run` declaration may request.
pub const REQUESTS: [&str; 7] = ["classify", "sequence", "torsion", "process", "spinors", "ns", "cartan_hilbert"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuncDecl {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRequest {
    pub command: String,
    pub targets: Vec<String>,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct SystemFile {
    pub variety: Variety,
    pub scope: Scope,
    pub functions: Vec<FuncDecl>,
    pub scalars: Vec<String>,
    pub lets: Vec<(String, Expr)>,
    pub forms: Vec<(String, DifferentialForm)>,
    pub fields: Vec<(String, DirectionField)>,
    pub runs: Vec<RunRequest>,
}

impl SystemFile {
    pub fn form(&self, name: &str) -> Option<&DifferentialForm> {
        self.forms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn field(&self, name: &str) -> Option<&DirectionField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn binding(&self, name: &str) -> Option<&Expr> {
        self.lets.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    /// Coordinates followed by scalars; the names a `--at` binding may assign.
    pub fn symbols(&self) -> Vec<String> {
        self.variety.names().iter().chain(&self.scalars).cloned().collect()
    }
}

fn is_keyword(t: &Token) -> bool {
    matches!(&t.kind, TokenKind::Ident(s) if KEYWORDS.contains(&s.as_str()))
}

fn ends_decl(t: &Token) -> bool {
    t.kind == TokenKind::Eof || is_keyword(t)
}

struct Builder {
    tokens: Vec<Token>,
    pos: usize,
    scope: Scope,
    vars: Vec<String>,
    names: BTreeSet<String>,
    file: Partial,
}

#[derive(Default)]
struct Partial {
    functions: Vec<FuncDecl>,
    scalars: Vec<String>,
    lets: Vec<(String, Expr)>,
    forms: Vec<(String, DifferentialForm)>,
    fields: Vec<(String, DirectionField)>,
    runs: Vec<RunRequest>,
    variety: Option<Variety>,
}

fn invalid(t: &Token, message: impl Into<String>) -> ParseError {
    ParseError::Invalid { line: t.line, col: t.col, message: message.into() }
}

impl Builder {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::Syntax { line: t.line, col: t.col, expected: expected.into(), found: t.kind.to_string() }
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.syntax(expected))
        }
    }

    /// A fresh, unique, non-keyword name.
    fn new_name(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        let t = self.peek().clone();
        let TokenKind::Ident(name) = &t.kind else {
            return Err(self.syntax(&format!("a {what} name")));
        };
        if is_keyword(&t) {
            return Err(self.syntax(&format!("a {what} name")));
        }
        if name == "i" || pfaff_core::symbolic::parse::BUILTINS.contains(&name.as_str()) {
            return Err(invalid(&t, format!("`{name}` is reserved")));
        }
        if !self.names.insert(name.clone()) {
            return Err(invalid(&t, format!("`{name}` is already declared")));
        }
        self.advance();
        Ok((name.clone(), t))
    }

    fn variety(&self) -> Result<&Variety, ParseError> {
        self.file.variety.as_ref().ok_or_else(|| invalid(self.peek(), "`vars` must come before this declaration"))
    }

    fn with_parser<R>(
        &mut self,
        basis: bool,
        f: impl FnOnce(&mut ExprParser<'_>) -> Result<R, ParseError>,
    ) -> Result<R, ParseError> {
        let mut p = ExprParser::new(&self.tokens, &self.scope);
        if basis {
            p = p.with_basis(&self.vars);
        }
        p.pos = self.pos;
        let r = f(&mut p)?;
        let end = p.pos;
        self.pos = end;
        Ok(r)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.peek().clone();
        if ends_decl(&start) {
            return Err(self.syntax("an expression"));
        }
        self.with_parser(false, |p| p.parse_add())
    }

    fn decl(&mut self) -> Result<(), ParseError> {
        let kw = self.advance();
        let TokenKind::Ident(word) = &kw.kind else {
            return Err(ParseError::Syntax {
                line: kw.line,
                col: kw.col,
                expected: "a declaration keyword".into(),
                found: kw.kind.to_string(),
            });
        };
        match word.as_str() {
            "vars" => self.vars_decl(&kw),
            "func" => self.func_decl(),
            "scalar" => {
                self.variety()?;
                let (name, _) = self.new_name("scalar")?;
                self.scope.add_var(&name);
                self.file.scalars.push(name);
                Ok(())
            }
            "let" => {
                self.variety()?;
                let (name, _) = self.new_name("binding")?;
                self.expect(TokenKind::Equals, "`=`")?;
                let e = self.expr()?;
                self.scope.add_named(&name, e.clone());
                self.file.lets.push((name, e));
                Ok(())
            }
            "form" => self.form_decl(),
            "field" => self.field_decl(),
            "run" => self.run_decl(&kw),
            _ => Err(ParseError::Syntax {
                line: kw.line,
                col: kw.col,
                expected: "a declaration keyword".into(),
                found: kw.kind.to_string(),
            }),
        }
    }

    fn vars_decl(&mut self, kw: &Token) -> Result<(), ParseError> {
        if self.file.variety.is_some() {
            return Err(invalid(kw, "`vars` may appear only once"));
        }
        let mut vars = Vec::new();
        while !ends_decl(self.peek()) {
            let (name, _) = self.new_name("variable")?;
            vars.push(name);
        }
        if vars.is_empty() {
            return Err(self.syntax("a variable name"));
        }
        for v in &vars {
            self.scope.add_var(v);
        }
        self.file.variety = Some(Variety::new(&vars).map_err(|e| invalid(kw, e.to_string()))?);
        self.vars = vars;
        Ok(())
    }

    fn func_decl(&mut self) -> Result<(), ParseError> {
        self.variety()?;
        let (name, _) = self.new_name("function")?;
        self.expect(TokenKind::LParen, "`(`")?;
        let mut args = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.kind {
                TokenKind::Ident(a) if self.vars.contains(a) || self.file.scalars.contains(a) => {
                    if args.contains(a) {
                        return Err(invalid(&t, format!("repeated argument `{a}`")));
                    }
                    args.push(a.clone());
                    self.advance();
                }
                TokenKind::Ident(a) => {
                    return Err(ParseError::UnknownIdentifier { line: t.line, col: t.col, name: a.clone() })
                }
                _ => return Err(self.syntax("an argument name")),
            }
            if self.peek().kind == TokenKind::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(TokenKind::RParen, "`,` or `)`")?;
        self.scope.add_func(&name, args.iter().map(|a| Expr::var(a)).collect());
        self.file.functions.push(FuncDecl { name, args });
        Ok(())
    }

    fn basis_here(&self, offset: usize) -> Option<usize> {
        let t = &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)];
        match &t.kind {
            TokenKind::Ident(s) if !self.scope.contains(s) => {
                s.strip_prefix('d').and_then(|rest| self.vars.iter().position(|v| v == rest))
            }
            _ => None,
        }
    }

    fn basis(&mut self) -> Result<Vec<usize>, ParseError> {
        let first = self.peek().clone();
        let mut idx = vec![self.basis_here(0).ok_or_else(|| self.syntax("a differential such as `dx`"))?];
        self.advance();
        while self.peek().kind == TokenKind::Caret {
            self.advance();
            let t = self.peek().clone();
            let k = self.basis_here(0).ok_or_else(|| self.syntax("a differential after `^`"))?;
            if idx.contains(&k) {
                return Err(invalid(&t, "repeated differential in a wedge product"));
            }
            idx.push(k);
            self.advance();
        }
        if idx.len() > self.vars.len() {
            return Err(invalid(&first, "wedge product longer than the number of variables"));
        }
        Ok(idx)
    }

    /// One term as `(coefficient, basis indices)`; no basis means a 0-form term.
    fn form_term(&mut self, negate: bool) -> Result<(Expr, Vec<usize>, Token), ParseError> {
        let start = self.peek().clone();
        if ends_decl(&start) {
            return Err(self.syntax("a form term"));
        }
        let sign = |e: Expr| if negate { -e } else { e };
        if self.basis_here(0).is_some() {
            let idx = self.basis()?;
            return Ok((sign(Expr::one()), idx, start));
        }
        if matches!(self.peek().kind, TokenKind::Minus | TokenKind::Plus) && self.basis_here(1).is_some() {
            let neg = self.advance().kind == TokenKind::Minus;
            let idx = self.basis()?;
            return Ok((sign(Expr::int(if neg { -1 } else { 1 })), idx, start));
        }
        let coeff = self.with_parser(true, |p| p.parse_mul())?;
        if self.peek().kind == TokenKind::Star && self.basis_here(1).is_some() {
            self.advance();
            let idx = self.basis()?;
            return Ok((sign(coeff), idx, start));
        }
        Ok((sign(coeff), Vec::new(), start))
    }

    fn form_decl(&mut self) -> Result<(), ParseError> {
        let variety = self.variety()?.clone();
        let (name, _) = self.new_name("form")?;
        self.expect(TokenKind::Equals, "`=`")?;
        let mut degree: Option<usize> = None;
        let mut form: Option<DifferentialForm> = None;
        let mut negate = false;
        loop {
            let (coeff, idx, at) = self.form_term(negate)?;
            match degree {
                Some(k) if k != idx.len() => {
                    return Err(invalid(&at, format!("term of degree {} in a {k}-form", idx.len())));
                }
                _ => degree = Some(idx.len()),
            }
            let term = if idx.is_empty() {
                DifferentialForm::scalar(&variety, coeff)
            } else {
                DifferentialForm::monomial(&variety, idx, coeff)
            };
            form = Some(match form {
                None => term,
                Some(f) => f.add(&term).map_err(|e| invalid(&at, e.to_string()))?,
            });
            match self.peek().kind {
                TokenKind::Plus | TokenKind::Minus => negate = self.advance().kind == TokenKind::Minus,
                _ if ends_decl(self.peek()) => break,
                _ => return Err(self.syntax("`+`, `-` or the next declaration")),
            }
        }
        let form = form.expect("at least one term parsed");
        self.file.forms.push((name, form));
        Ok(())
    }

    fn field_decl(&mut self) -> Result<(), ParseError> {
        let variety = self.variety()?.clone();
        let (name, name_tok) = self.new_name("field")?;
        self.expect(TokenKind::Equals, "`=`")?;
        self.expect(TokenKind::LBracket, "`[`")?;
        let mut comps = vec![self.expr()?];
        while self.peek().kind == TokenKind::Comma {
            self.advance();
            comps.push(self.expr()?);
        }
        self.expect(TokenKind::RBracket, "`,` or `]`")?;
        if comps.len() != variety.dim() {
            return Err(invalid(
                &name_tok,
                format!("field `{name}` has {} components but there are {} variables", comps.len(), variety.dim()),
            ));
        }
        let mut field = DirectionField::new(&variety, comps).map_err(|e| invalid(&name_tok, e.to_string()))?;
        if matches!(&self.peek().kind, TokenKind::Ident(s) if s == "rho") {
            self.advance();
            field = field.with_rho(self.expr()?);
        }
        self.file.fields.push((name, field));
        Ok(())
    }

    fn run_decl(&mut self, kw: &Token) -> Result<(), ParseError> {
        let t = self.peek().clone();
        let command = match &t.kind {
            TokenKind::Ident(c) if REQUESTS.contains(&c.as_str()) => c.clone(),
            _ => return Err(self.syntax(&format!("one of {}", REQUESTS.join(", ")))),
        };
        self.advance();
        let mut targets = Vec::new();
        while !ends_decl(self.peek()) {
            let t = self.advance();
            match t.kind {
                TokenKind::Ident(s) => targets.push(s),
                _ => {
                    return Err(ParseError::Syntax {
                        line: t.line,
                        col: t.col,
                        expected: "a declared name".into(),
                        found: t.kind.to_string(),
                    })
                }
            }
        }
        self.file.runs.push(RunRequest { command, targets, line: kw.line });
        Ok(())
    }
}

/// Parses a system file. Run targets are checked by the command layer.
pub fn parse_system(text: &str) -> Result<SystemFile, ParseError> {
    let tokens = tokenize(text)?;
    let mut b = Builder {
        tokens,
        pos: 0,
        scope: Scope::new(),
        vars: Vec::new(),
        names: BTreeSet::new(),
        file: Partial::default(),
    };
    if b.peek().kind == TokenKind::Eof {
        return Err(b.syntax("a declaration"));
    }
    while b.peek().kind != TokenKind::Eof {
        b.decl()?;
    }
    if b.file.variety.is_none() {
        return Err(invalid(b.peek(), "missing `vars` declaration"));
    }
    let Partial { functions, scalars, lets, forms, fields, runs, variety } = b.file;
    let variety = variety.expect("checked above");
    Ok(SystemFile { variety, scope: b.scope, functions, scalars, lets, forms, fields, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contact_form() {
        let s = parse_system("vars x y z\nform A = x*dy + dz\n").unwrap();
        assert_eq!(s.form("A").unwrap().to_string(), "x*dy + dz");
    }

    #[test]
    fn signed_and_wedged_terms() {
        let s = parse_system("vars x y z t\nfunc phi(z)\nform A = -phi*dt - dx\nform F = (x + 1)*dy^dx + dz^dt").unwrap();
        assert_eq!(s.form("A").unwrap().to_string(), "-dx - phi(z)*dt");
        assert_eq!(s.form("F").unwrap().to_string(), "(-x - 1)*dx^dy + dz^dt");
    }

    #[test]
    fn fields_lets_and_runs() {
        let src = "vars x y z\nfunc rho(x, y, z)\nscalar a\nlet b = a^2\nfield V = [1, i, b] rho rho\nform A = x*dy + dz\nrun process A V";
        let s = parse_system(src).unwrap();
        let v = s.field("V").unwrap();
        assert_eq!(v.rho().to_string(), "rho(x,y,z)");
        assert_eq!(v.components()[2].to_string(), "a^2");
        assert_eq!(s.runs[0].targets, vec!["A", "V"]);
    }

    #[test]
    fn rejects_with_positions() {
        let cases = [
            ("vars x y\nform A = x*dq", (2, 12)),
            ("vars x y\nform A = x + dy", (2, 14)),
            ("form A = dx", (1, 6)),
            ("vars x x", (1, 8)),
        ];
        for (src, pos) in cases {
            let err = parse_system(src).unwrap_err();
            assert_eq!(err.position(), pos, "{src}: {err}");
        }
    }
}
