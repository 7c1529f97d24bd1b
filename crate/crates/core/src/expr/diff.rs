//! Symbolic differentiation and the folding constructors it builds with.
//!
//! Folding is limited to literal constants and the identities `x + 0`,
//! `x * 1`, `x * 0`, `x / 1`, `0 / x`, `x ^ 1` and `x ^ 0`. Folded constants
//! are computed with the same IEEE operations `eval` would use, so values are
//! unchanged. Folds that would produce a non-finite constant are skipped.

use super::{Expr, Func};

fn finite(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Const(v))
}

pub(super) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

pub(super) fn add(a: Expr, b: Expr) -> Expr {
    if let Expr::Neg(inner) = b {
        return sub(a, *inner);
    }
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => finite(x + y).unwrap_or_else(|| bin(Expr::Add, a, b)),
        (Expr::Const(x), _) if *x == 0.0 => b,
        (_, Expr::Const(y)) if *y == 0.0 => a,
        _ => bin(Expr::Add, a, b),
    }
}

pub(super) fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => finite(x - y).unwrap_or_else(|| bin(Expr::Sub, a, b)),
        (Expr::Const(x), _) if *x == 0.0 => neg(b),
        (_, Expr::Const(y)) if *y == 0.0 => a,
        _ => bin(Expr::Sub, a, b),
    }
}

pub(super) fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => finite(x * y).unwrap_or_else(|| bin(Expr::Mul, a, b)),
        (Expr::Const(x), _) | (_, Expr::Const(x)) if *x == 0.0 => Expr::Const(0.0),
        (Expr::Const(x), _) if *x == 1.0 => b,
        (_, Expr::Const(y)) if *y == 1.0 => a,
        (Expr::Const(x), _) if *x == -1.0 => neg(b),
        (_, Expr::Const(y)) if *y == -1.0 => neg(a),
        _ => bin(Expr::Mul, a, b),
    }
}

pub(super) fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) if *y != 0.0 => {
            finite(x / y).unwrap_or_else(|| bin(Expr::Div, a, b))
        }
        (_, Expr::Const(y)) if *y == 1.0 => a,
        (Expr::Const(x), Expr::Const(_)) if *x == 0.0 => bin(Expr::Div, a, b),
        (Expr::Const(x), _) if *x == 0.0 => Expr::Const(0.0),
        _ => bin(Expr::Div, a, b),
    }
}

fn pow(a: Expr, n: i32) -> Expr {
    match (&a, n) {
        (_, 0) => Expr::Const(1.0),
        (_, 1) => a,
        (Expr::Const(x), _) if !(n < 0 && *x == 0.0) => {
            finite(x.powi(n)).unwrap_or_else(|| Expr::Pow(Box::new(a), n))
        }
        _ => Expr::Pow(Box::new(a), n),
    }
}

fn call(func: Func, a: Expr) -> Expr {
    if let Expr::Const(_) = a {
        let folded = Expr::Call(func, Box::new(a));
        return match folded.eval(0.0) {
            Ok(v) => Expr::Const(v),
            Err(_) => folded,
        };
    }
    Expr::Call(func, Box::new(a))
}

fn bin(ctor: fn(Box<Expr>, Box<Expr>) -> Expr, a: Expr, b: Expr) -> Expr {
    ctor(Box::new(a), Box::new(b))
}

pub(super) fn derivative(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var => Expr::Const(1.0),
        Expr::Neg(a) => neg(derivative(a)),
        Expr::Add(a, b) => add(derivative(a), derivative(b)),
        Expr::Sub(a, b) => sub(derivative(a), derivative(b)),
        Expr::Mul(a, b) => add(
            mul(derivative(a), (**b).clone()),
            mul((**a).clone(), derivative(b)),
        ),
        Expr::Div(a, b) => {
            let da = derivative(a);
            let db = derivative(b);
            if db.as_const() == Some(0.0) {
                return div(da, (**b).clone());
            }
            div(
                sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                pow((**b).clone(), 2),
            )
        }
        Expr::Pow(a, n) => mul(
            mul(Expr::Const(*n as f64), pow((**a).clone(), n - 1)),
            derivative(a),
        ),
        Expr::Call(func, a) => {
            let inner = (**a).clone();
            let da = derivative(a);
            if da.as_const() == Some(0.0) {
                return Expr::Const(0.0);
            }
            let outer = match func {
                Func::Sin => call(Func::Cos, inner),
                Func::Cos => neg(call(Func::Sin, inner)),
                Func::Exp => call(Func::Exp, inner),
                Func::Log => return div(da, inner),
                Func::Sqrt => {
                    return div(da, mul(Expr::Const(2.0), call(Func::Sqrt, inner)));
                }
                // abs'(0) = 0 by convention, which is what sign(0) gives.
                Func::Abs => call(Func::Sign, inner),
                Func::Sign => return Expr::Const(0.0),
            };
            mul(outer, da)
        }
    }
}
