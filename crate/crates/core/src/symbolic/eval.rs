//! Numeric evaluation of expressions at a point.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use thiserror::Error;

use super::expr::{Atom, Expr};
use super::number::{CRational, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("no instantiation for function `{0}`")]
    UnboundFunction(String),
    #[error("domain error: {0}")]
    DomainError(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Exact wherever only rational operations are involved.
    #[default]
    Exact,
    Float,
}

/// Values for the free variables of an expression.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Point {
    values: BTreeMap<String, Value>,
    pub mode: EvalMode,
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: CRational) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: CRational) {
        self.values.insert(name.to_string(), Value::Exact(value));
    }

    pub fn set_float(&mut self, name: &str, value: Complex64) {
        self.values.insert(name.to_string(), Value::Float(value));
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.values.iter()
    }

    /// Exact bindings as substitutable constants; float bindings are skipped.
    pub fn exact_bindings(&self) -> BTreeMap<String, Expr> {
        self.values
            .iter()
            .filter_map(|(k, v)| match v {
                Value::Exact(c) => Some((k.clone(), Expr::constant(c.clone()))),
                Value::Float(_) => None,
            })
            .collect()
    }
}

/// Concrete stand-ins for abstract function symbols.
///
/// A body is an expression in the slot variables `#0`, `#1`, …; derivative atoms evaluate
/// the corresponding derivative of the body.
#[derive(Debug, Default)]
pub struct FunctionEnv {
    bodies: BTreeMap<String, Expr>,
    derived: RefCell<HashMap<(String, Vec<usize>), Expr>>,
}

impl FunctionEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn slot(k: usize) -> Expr {
        Expr::var(&format!("#{k}"))
    }

    pub fn define(&mut self, name: &str, body: Expr) {
        self.bodies.insert(name.to_string(), body);
        self.derived.borrow_mut().clear();
    }

    fn body(&self, name: &str, partials: &[usize]) -> Option<Expr> {
        let base = self.bodies.get(name)?;
        if partials.is_empty() {
            return Some(base.clone());
        }
        let key = (name.to_string(), partials.to_vec());
        if let Some(e) = self.derived.borrow().get(&key) {
            return Some(e.clone());
        }
        let mut e = base.clone();
        for &j in partials {
            e = e.diff(&format!("#{j}"));
        }
        self.derived.borrow_mut().insert(key, e.clone());
        Some(e)
    }
}

fn add(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(&x + &y),
        (x, y) => Value::Float(x.to_c64() + y.to_c64()),
    }
}

fn mul(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(&x * &y),
        (x, y) => Value::Float(x.to_c64() * y.to_c64()),
    }
}

fn powi(a: Value, n: i64) -> Result<Value, EvalError> {
    match a {
        Value::Exact(x) => x
            .powi(n)
            .map(Value::Exact)
            .ok_or_else(|| EvalError::DomainError("zero raised to a negative power".into())),
        Value::Float(z) => {
            if n < 0 && z == Complex64::new(0.0, 0.0) {
                return Err(EvalError::DomainError("zero raised to a negative power".into()));
            }
            Ok(Value::Float(z.powi(n as i32)))
        }
    }
}

fn float(v: &Value, mode: EvalMode) -> Value {
    match mode {
        EvalMode::Exact => v.clone(),
        EvalMode::Float => Value::Float(v.to_c64()),
    }
}

/// Evaluates `e` at `p`; abstract functions must be instantiated in `env`.
pub fn eval_with(e: &Expr, p: &Point, env: &FunctionEnv) -> Result<Value, EvalError> {
    Ok(eval_scaled(e, p, env)?.0)
}

pub fn eval(e: &Expr, p: &Point) -> Result<Value, EvalError> {
    eval_with(e, p, &FunctionEnv::new())
}

/// Value plus the sum of absolute values of the top-level terms (the cancellation scale).
pub(crate) fn eval_scaled(e: &Expr, p: &Point, env: &FunctionEnv) -> Result<(Value, f64), EvalError> {
    let mut sum = Value::Exact(CRational::zero());
    let mut scale = 0.0;
    for t in e.terms() {
        let mut prod = float(&Value::Exact(t.coeff.clone()), p.mode);
        for (atom, k) in &t.mono {
            let base = eval_atom(atom, p, env)?;
            prod = mul(prod, powi(base, *k)?);
        }
        scale += prod.norm();
        sum = add(sum, prod);
    }
    Ok((sum, scale))
}

fn eval_atom(atom: &Atom, p: &Point, env: &FunctionEnv) -> Result<Value, EvalError> {
    let inner = |u: &Expr| eval_with(u, p, env);
    Ok(match atom {
        Atom::Var(n) => float(p.get(n).ok_or_else(|| EvalError::UnboundVariable(n.to_string()))?, p.mode),
        Atom::Func(app) => {
            let body = env
                .body(&app.name, &app.partials)
                .ok_or_else(|| EvalError::UnboundFunction(app.name.to_string()))?;
            let mut slots = Point { values: BTreeMap::new(), mode: p.mode };
            for (k, a) in app.args.iter().enumerate() {
                slots.values.insert(format!("#{k}"), inner(a)?);
            }
            eval_with(&body, &slots, env)?
        }
        Atom::Exp(u) => match inner(u)? {
            Value::Exact(c) if c.is_zero() => Value::Exact(CRational::one()),
            v => Value::Float(v.to_c64().exp()),
        },
        Atom::Sin(u) => match inner(u)? {
            Value::Exact(c) if c.is_zero() => Value::Exact(CRational::zero()),
            v => Value::Float(v.to_c64().sin()),
        },
        Atom::Cos(u) => match inner(u)? {
            Value::Exact(c) if c.is_zero() => Value::Exact(CRational::one()),
            v => Value::Float(v.to_c64().cos()),
        },
        Atom::Ln(u) => match inner(u)? {
            Value::Exact(c) if c.is_zero() => return Err(EvalError::DomainError("ln of zero".into())),
            Value::Exact(c) if c.is_one() => Value::Exact(CRational::zero()),
            v => {
                let z = v.to_c64();
                if z.norm() == 0.0 {
                    return Err(EvalError::DomainError("ln of zero".into()));
                }
                Value::Float(z.ln())
            }
        },
        Atom::Recip(q) => powi(inner(q)?, -1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_complex_result() {
        let e = &Expr::var("x") + &(&Expr::imag() * &Expr::var("y"));
        let p = Point::new().with("x", CRational::from_int(1)).with("y", CRational::from_int(2));
        let v = eval(&e, &p).unwrap();
        assert_eq!(v, Value::Exact(CRational::new(num_rational::BigRational::from_integer(1.into()), num_rational::BigRational::from_integer(2.into()))));
    }

    #[test]
    fn exp_at_zero_is_exact_one() {
        let e = Expr::exp(&-Expr::var("t"));
        let p = Point::new().with("t", CRational::zero());
        assert_eq!(eval(&e, &p).unwrap(), Value::Exact(CRational::one()));
    }

    #[test]
    fn errors() {
        let e = Expr::ln(&Expr::var("x"));
        assert!(matches!(eval(&e, &Point::new()), Err(EvalError::UnboundVariable(_))));
        let p = Point::new().with("x", CRational::zero());
        assert!(matches!(eval(&e, &p), Err(EvalError::DomainError(_))));
    }

    #[test]
    fn function_derivatives_use_instantiation() {
        let mut env = FunctionEnv::new();
        let s = FunctionEnv::slot(0);
        env.define("f", &s * &s);
        let e = Expr::func("f", vec![Expr::var("z")]).diff("z");
        let p = Point::new().with("z", CRational::from_int(3));
        assert_eq!(eval_with(&e, &p, &env).unwrap(), Value::Exact(CRational::from_int(6)));
    }
}
