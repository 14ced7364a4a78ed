//! Exact symbolic scalars: canonical expressions, differentiation, evaluation and zero testing.

mod display;
mod eval;
mod expr;
mod number;
pub mod parse;
mod zero;

pub use eval::{eval, eval_with, EvalError, EvalMode, FunctionEnv, Point};
pub use expr::{Atom, Expr, FuncApp};
pub use number::{rational_sqrt, CRational, Value};
pub use parse::{parse_expr, ParseError};
pub use zero::{is_zero, Confidence, SamplerConfig, Witness, ZeroStatus, ZeroVerdict};
