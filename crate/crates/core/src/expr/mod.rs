//! A small arithmetic expression language over the variables `t` and `s`.
//!
//! Kernels, discontinuity curves, right-hand sides and exact solutions are
//! all written in this language. Expressions are parsed once, are immutable
//! afterwards, and can be evaluated or differentiated symbolically.
//!
//! ```
//! use vie_core::expr::{Expr, Var};
//!
//! let e: Expr = "t^4/108 - 25*t^3/81".parse().unwrap();
//! let de = e.differentiate(Var::T);
//! assert_eq!(de.eval(0.0, 0.0).unwrap(), 0.0);
//! ```

mod diff;
mod parse;

use std::fmt;
use std::str::FromStr;

pub use parse::parse;

/// Free variable of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    S,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::S => "s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryOp {
    /// Function-call spelling, `None` for negation.
    pub fn function_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Sin => Some("sin"),
            UnaryOp::Cos => Some("cos"),
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Ln => Some("ln"),
            UnaryOp::Sqrt => Some("sqrt"),
        }
    }

    pub(crate) fn from_function_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    /// The named constant `pi`.
    Pi,
    Variable(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("result is not finite: {0}")]
    NonFinite(String),
}

impl Expr {
    pub fn constant(value: f64) -> Self {
        Expr::Constant(value)
    }

    pub fn var(v: Var) -> Self {
        Expr::Variable(v)
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Self {
        Expr::Unary(op, Box::new(child))
    }

    pub fn binary(op: BinaryOp, left: Expr, right: Expr) -> Self {
        Expr::Binary(op, Box::new(left), Box::new(right))
    }

    /// Whether `v` occurs anywhere in the tree.
    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Constant(_) | Expr::Pi => false,
            Expr::Variable(w) => *w == v,
            Expr::Unary(_, c) => c.depends_on(v),
            Expr::Binary(_, l, r) => l.depends_on(v) || r.depends_on(v),
        }
    }

    /// Evaluates the expression at `(t, s)`.
    ///
    /// Every intermediate result must be finite; otherwise a
    /// [`ExprError::NonFinite`] is returned. `ln` and `sqrt` outside their
    /// real domains, division by zero, and a negative base raised to a
    /// non-integer power are [`ExprError::Domain`] errors.
    pub fn eval(&self, t: f64, s: f64) -> Result<f64, ExprError> {
        let value = match self {
            Expr::Constant(c) => *c,
            Expr::Pi => std::f64::consts::PI,
            Expr::Variable(Var::T) => t,
            Expr::Variable(Var::S) => s,
            Expr::Unary(op, child) => {
                let x = child.eval(t, s)?;
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Ln => {
                        if x <= 0.0 {
                            return Err(ExprError::Domain(format!("ln({x})")));
                        }
                        x.ln()
                    }
                    UnaryOp::Sqrt => {
                        if x < 0.0 {
                            return Err(ExprError::Domain(format!("sqrt({x})")));
                        }
                        x.sqrt()
                    }
                }
            }
            Expr::Binary(op, left, right) => {
                let a = left.eval(t, s)?;
                let b = right.eval(t, s)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(ExprError::Domain(format!("{a} / 0")));
                        }
                        a / b
                    }
                    BinaryOp::Pow => pow(a, b)?,
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ExprError::NonFinite(self.to_string()))
        }
    }

    /// Evaluates an expression of `t` alone.
    pub fn eval_t(&self, t: f64) -> Result<f64, ExprError> {
        self.eval(t, 0.0)
    }

    /// Exact symbolic derivative with respect to `v`. No simplification is
    /// attempted beyond folding trivially zero terms.
    pub fn differentiate(&self, v: Var) -> Expr {
        diff::differentiate(self, v)
    }
}

fn pow(base: f64, exponent: f64) -> Result<f64, ExprError> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(ExprError::Domain(format!("({base})^{exponent}")));
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(ExprError::Domain(format!("0^{exponent}")));
    }
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        Ok(base.powi(exponent as i32))
    } else {
        Ok(base.powf(exponent))
    }
}

impl FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// Binary nodes are always parenthesised so the output re-parses to the same
// tree shape regardless of precedence.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(c) => {
                if *c < 0.0 {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Pi => f.write_str("pi"),
            Expr::Variable(v) => f.write_str(v.name()),
            Expr::Unary(UnaryOp::Neg, c) => write!(f, "(-{c})"),
            Expr::Unary(op, c) => write!(f, "{}({c})", op.function_name().unwrap_or_default()),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(text: &str, t: f64, s: f64) -> Result<f64, ExprError> {
        text.parse::<Expr>().unwrap().eval(t, s)
    }

    #[test]
    fn evaluates_affine_kernel() {
        assert_eq!(ev("1+t-s", 2.0, 0.5).unwrap(), 2.5);
    }

    #[test]
    fn evaluates_trig_curve() {
        let v = ev("2*sin(t/3)", std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(ev("ln(t)", 0.0, 0.0), Err(ExprError::Domain(_))));
        assert!(matches!(ev("sqrt(t)", -1.0, 0.0), Err(ExprError::Domain(_))));
        assert!(matches!(ev("1/t", 0.0, 0.0), Err(ExprError::Domain(_))));
        assert!(matches!(ev("t^0.5", -4.0, 0.0), Err(ExprError::Domain(_))));
        assert!(matches!(ev("exp(t)", 1000.0, 0.0), Err(ExprError::NonFinite(_))));
    }

    #[test]
    fn negative_base_with_integer_exponent() {
        assert_eq!(ev("t^3", -2.0, 0.0).unwrap(), -8.0);
        assert_eq!(ev("t^(1+1)", -3.0, 0.0).unwrap(), 9.0);
        assert_eq!(ev("t^-1", -2.0, 0.0).unwrap(), -0.5);
    }

    #[test]
    fn display_reparses_to_same_tree() {
        for text in ["1 + t - s", "-t^2", "2^3^2", "sin(t/2)*exp(-s)", "pi - 1e-3", "-(2)"] {
            let e: Expr = text.parse().unwrap();
            let again: Expr = e.to_string().parse().unwrap();
            assert_eq!(e, again, "{text}");
        }
    }
}
