//! Seeded generators for random expressions and systems, plus a few fixed
//! reference systems. Used by tests, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{CoeffExpr, Expr, Func};
use crate::system::LinearSystem;

fn coeff(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    // Three decimals keep printed systems readable.
    (rng.gen_range(lo..hi) * 1000.0).round() / 1000.0
}

// Slopes of `c t` stay small so that nested products of leaves keep third
// derivatives moderate on `[0, 10]`.
fn leaf(rng: &mut impl Rng) -> Expr {
    if rng.gen_bool(0.5) {
        Expr::Const(coeff(rng, -2.0, 2.0))
    } else {
        Expr::Mul(Box::new(Expr::Const(coeff(rng, 0.05, 0.3))), Box::new(Expr::Var))
    }
}

fn random_tree(rng: &mut impl Rng, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let sub = |rng: &mut _| Box::new(random_tree(rng, depth - 1));
    match rng.gen_range(0..9) {
        0 => Expr::Add(sub(rng), sub(rng)),
        1 => Expr::Sub(sub(rng), sub(rng)),
        2 => Expr::Mul(sub(rng), sub(rng)),
        3 => Expr::Neg(sub(rng)),
        4 => Expr::Call(Func::Sin, sub(rng)),
        5 => Expr::Call(Func::Cos, sub(rng)),
        // Bounded arguments keep exp, sqrt, log and division away from trouble.
        6 => Expr::Call(Func::Exp, Box::new(Expr::Call(Func::Sin, sub(rng)))),
        7 => {
            let den = Expr::Add(
                Box::new(Expr::Const(2.0)),
                Box::new(Expr::Call(Func::Cos, sub(rng))),
            );
            Expr::Div(sub(rng), Box::new(den))
        }
        _ => {
            let inner = Expr::Call(Func::Sin, sub(rng));
            match rng.gen_range(0..3) {
                0 => Expr::Pow(Box::new(inner), rng.gen_range(2..4)),
                1 => Expr::Call(
                    Func::Sqrt,
                    Box::new(Expr::Add(Box::new(Expr::Const(1.5)), Box::new(inner))),
                ),
                _ => Expr::Call(
                    Func::Log,
                    Box::new(Expr::Add(Box::new(Expr::Const(1.5)), Box::new(inner))),
                ),
            }
        }
    }
}

/// Random expression of the given maximum depth, free of singularities for
/// every real `t`, with moderate derivatives on `[0, 10]`.
pub fn random_expression(rng: &mut impl Rng, depth: usize) -> CoeffExpr {
    CoeffExpr::from_expr(random_tree(rng, depth))
}

/// `c0 + c1 · sin(w t + p)` or `c0 + c1 · t / 5`, parsed from text.
fn bounded_entry(rng: &mut impl Rng, c0_range: (f64, f64), amp: f64) -> String {
    let c0 = coeff(rng, c0_range.0, c0_range.1);
    let c1 = coeff(rng, -amp, amp);
    match rng.gen_range(0..3) {
        0 => format!("{c0} + {c1}*sin({}*t + {})", coeff(rng, 0.2, 2.0), coeff(rng, 0.0, 3.0)),
        1 => format!("{c0} + {c1}*cos({}*t)", coeff(rng, 0.2, 2.0)),
        _ => format!("{c0} + {c1}*t/5"),
    }
}

fn build(rows: Vec<Vec<String>>) -> LinearSystem {
    LinearSystem::from_strings(0.0, &rows).expect("generated entries parse")
}

/// Random system with bounded trigonometric or linear entries and
/// `a12 >= 0.5` on `[0, 5]`.
pub fn random_system(rng: &mut impl Rng, n: usize) -> LinearSystem {
    let rows = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    if j == 0 && k == 1 {
                        let amp = coeff(rng, 0.0, 0.5);
                        let base = coeff(rng, 0.5 + amp, 1.5 + amp);
                        format!("{base} + {amp}*sin({}*t)", coeff(rng, 0.2, 2.0))
                    } else {
                        bounded_entry(rng, (-1.0, 1.0), 0.5)
                    }
                })
                .collect()
        })
        .collect();
    build(rows)
}

/// Random system whose off-diagonal entries are nonnegative for all `t`.
pub fn random_cooperative_system(rng: &mut impl Rng, n: usize) -> LinearSystem {
    let rows = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    if j == k {
                        bounded_entry(rng, (-1.0, 0.5), 0.5)
                    } else {
                        let amp = coeff(rng, 0.0, 0.5);
                        format!(
                            "{} + {amp}*(1 + sin({}*t))",
                            coeff(rng, 0.0, 0.5),
                            coeff(rng, 0.2, 2.0)
                        )
                    }
                })
                .collect()
        })
        .collect();
    build(rows)
}

/// `count` random systems with `n` cycling through 3, 4, 5.
pub fn system_corpus(seed: u64, count: usize) -> Vec<LinearSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_system(&mut rng, 3 + i % 3)).collect()
}

/// `count` cooperative systems with `n` cycling through 3, 4, 5.
pub fn cooperative_corpus(seed: u64, count: usize) -> Vec<LinearSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_cooperative_system(&mut rng, 3 + i % 3)).collect()
}

/// `[[0,1,1],[-1,0,0],[-1,0,0]]`, whose first component is `cos(√2 t)` from
/// `e1`.
pub fn canonical3() -> LinearSystem {
    build(vec![
        vec!["0".into(), "1".into(), "1".into()],
        vec!["-1".into(), "0".into(), "0".into()],
        vec!["-1".into(), "0".into(), "0".into()],
    ])
}

/// Constant diagonal system `d · I`.
pub fn diagonal(d: f64, n: usize) -> LinearSystem {
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { d.to_string() } else { "0".into() }).collect())
        .collect();
    build(rows)
}

/// `φ1` decays while `(φ2, φ3)` rotate.
pub fn rotation_off_first() -> LinearSystem {
    build(vec![
        vec!["-1".into(), "0".into(), "0".into()],
        vec!["0".into(), "0".into(), "1".into()],
        vec!["0".into(), "-1".into(), "0".into()],
    ])
}
