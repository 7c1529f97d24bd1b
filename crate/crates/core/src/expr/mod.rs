//! Closed-form coefficient expressions in the independent variable `t`.
//!
//! Grammar (EBNF, whitespace ignored):
//!
//! ```text
//! expr    = term , { ("+" | "-") , term } ;
//! term    = unary , { ("*" | "/") , unary } ;
//! unary   = "-" , unary | power ;
//! power   = primary , { "^" , integer } ;
//! integer = [ "-" ] , digits | "(" , [ "-" ] , digits , ")" ;
//! primary = number | "t" | func , "(" , expr , ")" | "(" , expr , ")" ;
//! func    = "sin" | "cos" | "exp" | "log" | "sqrt" | "abs" | "sign" ;
//! number  = digits , [ "." , digits ] , [ ("e" | "E") , [ "+" | "-" ] , digits ] ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-t^2` is `-(t^2)`. Exponents are
//! integer literals only. `sign` is accepted so that printed derivatives of
//! `abs` parse back.

mod diff;
mod parse;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use parse::ParseError;

/// Elementary functions available in the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    /// `sign(0) = 0`; appears as the derivative of `abs`.
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

/// Expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// Kind of singular sub-operation hit during evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    DivisionByZero,
    LogNonPositive,
    SqrtNegative,
    /// A finite input produced an infinite or NaN result (e.g. `exp(1000)`).
    Overflow,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogNonPositive => "log of a non-positive value",
            DomainKind::SqrtNegative => "sqrt of a negative value",
            DomainKind::Overflow => "non-finite result",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error("{kind} at t = {t}")]
pub struct DomainError {
    pub kind: DomainKind,
    pub t: f64,
}

impl Expr {
    pub fn eval(&self, t: f64) -> Result<f64, DomainError> {
        let err = |kind| DomainError { kind, t };
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => t,
            Expr::Neg(a) => -a.eval(t)?,
            Expr::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Expr::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Expr::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Expr::Div(a, b) => {
                let num = a.eval(t)?;
                let den = b.eval(t)?;
                if den == 0.0 {
                    return Err(err(DomainKind::DivisionByZero));
                }
                num / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval(t)?;
                if *n < 0 && base == 0.0 {
                    return Err(err(DomainKind::DivisionByZero));
                }
                base.powi(*n)
            }
            Expr::Call(func, a) => {
                let x = a.eval(t)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(err(DomainKind::LogNonPositive));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(err(DomainKind::SqrtNegative));
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                    Func::Sign => {
                        if x > 0.0 {
                            1.0
                        } else if x < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(DomainKind::Overflow))
        }
    }

    /// True when the tree does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.node_count(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var | Expr::Call(..) => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` is the shortest representation that round-trips exactly.
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => f.write_str("t"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
            // Left-associative: the right operand needs strictly higher precedence.
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" + ")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" - ")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("*")?;
                write_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("/")?;
                write_child(f, b, 3)
            }
            Expr::Pow(a, n) => {
                write_child(f, a, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A parsed, immutable coefficient function of `t`.
///
/// Cloning is cheap; the tree is shared.
#[derive(Clone, Debug)]
pub struct CoeffExpr {
    root: Arc<Expr>,
}

impl CoeffExpr {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        parse::parse(source).map(Self::from_expr)
    }

    pub fn from_expr(expr: Expr) -> Self {
        CoeffExpr {
            root: Arc::new(expr),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_expr(Expr::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn expr(&self) -> &Expr {
        &self.root
    }

    pub fn eval(&self, t: f64) -> Result<f64, DomainError> {
        self.root.eval(t)
    }

    /// Exact symbolic derivative with respect to `t`.
    pub fn differentiate(&self) -> CoeffExpr {
        Self::from_expr(diff::derivative(&self.root))
    }

    /// Evaluates at `t`; if `t` is a removable singular point, returns the
    /// symmetric limit `(e(t - h) + e(t + h)) / 2` instead.
    pub fn eval_or_limit(&self, t: f64, h: f64) -> Result<f64, DomainError> {
        match self.eval(t) {
            Ok(v) => Ok(v),
            Err(e) if e.kind != DomainKind::Overflow => {
                let lo = self.eval(t - h);
                let hi = self.eval(t + h);
                match (lo, hi) {
                    (Ok(a), Ok(b)) if (a - b).abs() <= 1e-3 * (1.0 + a.abs().max(b.abs())) => {
                        Ok(0.5 * (a + b))
                    }
                    _ => Err(e),
                }
            }
            Err(e) => Err(e),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.root.is_constant()
    }

    /// The constant value when the expression is a literal constant.
    pub fn as_const(&self) -> Option<f64> {
        self.root.as_const()
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn neg(&self) -> CoeffExpr {
        Self::from_expr(diff::neg((*self.root).clone()))
    }

    pub fn add(&self, other: &CoeffExpr) -> CoeffExpr {
        Self::from_expr(diff::add((*self.root).clone(), (*other.root).clone()))
    }

    pub fn sub(&self, other: &CoeffExpr) -> CoeffExpr {
        Self::from_expr(diff::sub((*self.root).clone(), (*other.root).clone()))
    }

    pub fn mul(&self, other: &CoeffExpr) -> CoeffExpr {
        Self::from_expr(diff::mul((*self.root).clone(), (*other.root).clone()))
    }

    pub fn div(&self, other: &CoeffExpr) -> CoeffExpr {
        Self::from_expr(diff::div((*self.root).clone(), (*other.root).clone()))
    }

    /// Sum with constant folding; the empty sum is `0`.
    pub fn sum<'a, I: IntoIterator<Item = &'a CoeffExpr>>(terms: I) -> CoeffExpr {
        terms
            .into_iter()
            .fold(CoeffExpr::zero(), |acc, term| acc.add(term))
    }
}

impl PartialEq for CoeffExpr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl std::str::FromStr for CoeffExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CoeffExpr::parse(s)
    }
}

impl Serialize for CoeffExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CoeffExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CoeffExpr::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> CoeffExpr {
        CoeffExpr::parse(s).unwrap()
    }

    #[test]
    fn evaluates_basic_examples() {
        assert_eq!(e("sin(2*t)").eval(0.0).unwrap(), 0.0);
        assert_eq!(e("1").eval(123.4).unwrap(), 1.0);
        assert_eq!(e("t^2 - 3*t + 1").eval(2.0).unwrap(), -1.0);
        assert_eq!(e("exp(t)").eval(0.0).unwrap(), 1.0);
        let v = e("cos(t)*sqrt(t)").eval(4.0).unwrap();
        assert!((v - 4f64.cos() * 2.0).abs() < 1e-15);
        assert!((v + 1.307_287_241_4).abs() < 1e-9);
    }

    #[test]
    fn singular_operations_are_reported() {
        let err = e("1/t").eval(0.0).unwrap_err();
        assert_eq!(err.kind, DomainKind::DivisionByZero);
        assert_eq!(err.t, 0.0);
        assert_eq!(
            e("log(t)").eval(0.0).unwrap_err().kind,
            DomainKind::LogNonPositive
        );
        assert_eq!(
            e("sqrt(t)").eval(-1.0).unwrap_err().kind,
            DomainKind::SqrtNegative
        );
        assert_eq!(
            e("t^(-2)").eval(0.0).unwrap_err().kind,
            DomainKind::DivisionByZero
        );
        assert_eq!(e("exp(t)").eval(1e4).unwrap_err().kind, DomainKind::Overflow);
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "-t^2",
            "(-t)^2",
            "t - (t - 1)",
            "t/(t*2)",
            "2^(-1)*t",
            "-(-t)",
            "sin(t)^3 - -2",
            "1e-20*t + 0.1",
            "abs(t - 3)/sqrt(1 + t^2)",
        ] {
            let a = e(src);
            let b = e(&a.to_string());
            assert_eq!(a, b, "{src} printed as {a}");
        }
    }

    #[test]
    fn removable_singularity_limit() {
        let q = e("sin(t)/t");
        assert!(q.eval(0.0).is_err());
        let v = q.eval_or_limit(0.0, 1e-5).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        // A pole is not removable.
        assert!(e("1/t").eval_or_limit(0.0, 1e-5).is_err());
    }

    #[test]
    fn serde_as_string() {
        let x: CoeffExpr = serde_json::from_str("\"cos(t)\"").unwrap();
        assert_eq!(serde_json::to_string(&x).unwrap(), "\"cos(t)\"");
        assert!(serde_json::from_str::<CoeffExpr>("\"foo(t)\"").is_err());
    }
}
