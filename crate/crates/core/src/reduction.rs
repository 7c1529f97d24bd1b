//! Riccati reduction of an n-dimensional linear system.
//!
//! With `φ_{k+1} = y_k φ_1` the system becomes an (n−1)-dimensional quadratic
//! system for `y`, and `φ` is recovered from `y` by an exponential integral.
//! The change of variable `φ_2 = φ̃_2 + Σ ν_k φ_k` with
//! `ν_k = 1 − a_1k/a_12` gives the transformed coefficients `ã`, from which
//! the scalar quantities `A`, `B_k`, `C` follow. `A`, `B_k`, `C` are built by
//! two routes, a closed form in the original entries and an identity in the
//! transformed entries, and the routes are compared numerically.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{CoeffExpr, DomainError};
use crate::integrate::{
    cumulative_quad, NumericError, QuadOptions, Termination, Trajectory, LIMIT_STEP,
};
use crate::system::{LinearSystem, SystemError};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("{0}")]
    Precondition(String),
}

impl From<DomainError> for ReductionError {
    fn from(e: DomainError) -> Self {
        ReductionError::Numeric(e.into())
    }
}

/// Coefficients of the transformed system in `(φ_1, φ̃_2, φ_3, …, φ_n)`.
///
/// Rows `j >= 3` keep `a_j1` and `a_j2`; only their columns `k >= 3` change.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TildeCoeffs {
    pub a21: CoeffExpr,
    pub a22: CoeffExpr,
    /// `ã_2k`, `k = 3..n`.
    pub a2k: Vec<CoeffExpr>,
    /// `ã_jk`, `j, k = 3..n`, indexed `[j-3][k-3]`.
    pub ajk: Vec<Vec<CoeffExpr>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Abc {
    pub a: CoeffExpr,
    /// `B_k`, `k = 3..n`.
    pub b: Vec<CoeffExpr>,
    pub c: CoeffExpr,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedData {
    /// `ν_k`, `k = 3..n`.
    pub nu: Vec<CoeffExpr>,
    pub tilde: TildeCoeffs,
    /// Identity route; the one used by the criteria.
    pub abc: Abc,
    /// Closed form in the original entries, kept for the route diagnostic.
    pub abc_closed_form: Abc,
}

impl ReducedData {
    pub fn new(sys: &LinearSystem) -> Result<Self, SystemError> {
        let nu = compute_nu(sys)?;
        let tilde = compute_tilde(sys)?;
        Ok(ReducedData {
            abc: abc_from_tilde(sys, &tilde),
            abc_closed_form: compute_abc(sys)?,
            nu,
            tilde,
        })
    }
}

/// `μ_k = a_1k / a_12` for `k = 3..n`, folded to `1` when the entries coincide.
pub fn ratios(sys: &LinearSystem) -> Result<Vec<CoeffExpr>, SystemError> {
    sys.require_full_dimension()?;
    let a12 = sys.entry(0, 1);
    Ok((2..sys.n())
        .map(|k| {
            let a1k = sys.entry(0, k);
            if a1k == a12 {
                CoeffExpr::constant(1.0)
            } else {
                a1k.div(a12)
            }
        })
        .collect())
}

pub fn compute_nu(sys: &LinearSystem) -> Result<Vec<CoeffExpr>, SystemError> {
    let one = CoeffExpr::constant(1.0);
    Ok(ratios(sys)?.iter().map(|r| one.sub(r)).collect())
}

pub fn compute_tilde(sys: &LinearSystem) -> Result<TildeCoeffs, SystemError> {
    let mu = ratios(sys)?;
    let nu = compute_nu(sys)?;
    let n = sys.n();
    let a = |j: usize, k: usize| sys.entry(j - 1, k - 1);
    let rest = 3..=n;

    let a21 = a(2, 1).sub(&CoeffExpr::sum(
        &rest.clone().map(|j| nu[j - 3].mul(a(j, 1))).collect::<Vec<_>>(),
    ));
    let a22 = a(2, 2).sub(&CoeffExpr::sum(
        &rest.clone().map(|j| nu[j - 3].mul(a(j, 2))).collect::<Vec<_>>(),
    ));
    let a2k = rest
        .clone()
        .map(|k| {
            let nuk = &nu[k - 3];
            let coupling: Vec<CoeffExpr> = rest
                .clone()
                .map(|j| nu[j - 3].mul(&a(j, k).add(&a(j, 2).mul(nuk))))
                .collect();
            a(2, k)
                .add(&a(2, 2).mul(nuk))
                .add(&mu[k - 3].differentiate())
                .sub(&CoeffExpr::sum(&coupling))
        })
        .collect();
    let ajk = rest
        .clone()
        .map(|j| {
            rest.clone()
                .map(|k| a(j, k).add(&a(j, 2).mul(&nu[k - 3])))
                .collect()
        })
        .collect();
    Ok(TildeCoeffs { a21, a22, a2k, ajk })
}

/// `A`, `B_k`, `C` from the closed-form expressions in the original entries.
pub fn compute_abc(sys: &LinearSystem) -> Result<Abc, SystemError> {
    let mu = ratios(sys)?;
    let n = sys.n();
    let a = |j: usize, k: usize| sys.entry(j - 1, k - 1);
    let rest = 3..=n;
    let one = CoeffExpr::constant(1.0);

    let sum_a: Vec<CoeffExpr> = rest.clone().map(|j| mu[j - 3].mul(a(j, 2))).collect();
    let big_a = a(1, 1).sub(a(2, 2)).sub(&CoeffExpr::sum(&sum_a));
    let sum_c: Vec<CoeffExpr> = rest.clone().map(|j| mu[j - 3].mul(a(j, 1))).collect();
    let big_c = a(2, 1).neg().sub(&CoeffExpr::sum(&sum_c));
    let big_b = rest
        .clone()
        .map(|k| {
            let muk = &mu[k - 3];
            let braces: Vec<CoeffExpr> = rest
                .clone()
                .map(|j| {
                    mu[j - 3]
                        .mul(&a(j, k).sub(a(j, 2)))
                        .add(&a(1, j).mul(&one.sub(muk)))
                })
                .collect();
            a(2, 2)
                .mul(muk)
                .sub(a(2, k))
                .sub(&muk.differentiate())
                .sub(&CoeffExpr::sum(&braces))
        })
        .collect();
    Ok(Abc {
        a: big_a,
        b: big_b,
        c: big_c,
    })
}

/// `A`, `B_k`, `C` from the identities in the transformed coefficients.
pub fn compute_abc_via_tilde(sys: &LinearSystem) -> Result<Abc, SystemError> {
    let tilde = compute_tilde(sys)?;
    Ok(abc_from_tilde(sys, &tilde))
}

fn abc_from_tilde(sys: &LinearSystem, tilde: &TildeCoeffs) -> Abc {
    let n = sys.n();
    let a = |j: usize, k: usize| sys.entry(j - 1, k - 1);
    let rest = 3..=n;
    let a11 = a(1, 1);

    let col2: Vec<&CoeffExpr> = rest.clone().map(|j| a(j, 2)).collect();
    let big_a = a11.sub(&tilde.a22).sub(&CoeffExpr::sum(col2));
    let col1: Vec<&CoeffExpr> = rest.clone().map(|j| a(j, 1)).collect();
    let big_c = tilde.a21.neg().sub(&CoeffExpr::sum(col1));
    let big_b = rest
        .clone()
        .map(|k| {
            let column: Vec<&CoeffExpr> = rest
                .clone()
                .filter(|&j| j != k)
                .map(|j| &tilde.ajk[j - 3][k - 3])
                .collect();
            tilde.a2k[k - 3]
                .neg()
                .sub(&CoeffExpr::sum(column))
                .add(&a11.sub(&tilde.ajk[k - 3][k - 3]))
                .sub(&big_a)
        })
        .collect();
    Abc {
        a: big_a,
        b: big_b,
        c: big_c,
    }
}

/// Largest difference between the two routes for one quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteComparison {
    /// `"A"`, `"B3"`, …, `"C"`.
    pub quantity: String,
    pub max_abs_diff: f64,
    /// Grid point of the largest difference.
    pub at: f64,
    /// Points where either route failed to evaluate.
    pub skipped: usize,
    pub agree: bool,
}

/// Comparison of the closed-form and identity routes on a grid.
///
/// The closed-form `B_k` exceeds the identity route by
/// `−ν_k Σ_j (a_1j − μ_j a_j2)`, so disagreement is expected whenever
/// `ν_k ≢ 0`; the identity route follows from the change of variables and
/// is the one used by the criteria.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteDiagnostic {
    pub tol: f64,
    pub grid_points: usize,
    pub comparisons: Vec<RouteComparison>,
    pub fired: bool,
}

impl RouteDiagnostic {
    pub fn agrees_on(&self, quantity: &str) -> bool {
        self.comparisons
            .iter()
            .find(|c| c.quantity == quantity)
            .is_some_and(|c| c.agree)
    }

    pub fn b_routes_agree(&self) -> bool {
        self.comparisons
            .iter()
            .filter(|c| c.quantity.starts_with('B'))
            .all(|c| c.agree)
    }
}

pub fn route_diagnostic(data: &ReducedData, grid: &[f64], tol: f64) -> RouteDiagnostic {
    let mut pairs: Vec<(String, &CoeffExpr, &CoeffExpr)> =
        vec![("A".into(), &data.abc_closed_form.a, &data.abc.a)];
    for (i, (cf, id)) in data.abc_closed_form.b.iter().zip(&data.abc.b).enumerate() {
        pairs.push((format!("B{}", i + 3), cf, id));
    }
    pairs.push(("C".into(), &data.abc_closed_form.c, &data.abc.c));

    let comparisons: Vec<RouteComparison> = pairs
        .into_iter()
        .map(|(quantity, cf, id)| {
            let mut max_abs_diff = 0.0f64;
            let mut at = grid.first().copied().unwrap_or(0.0);
            let mut skipped = 0;
            for &t in grid {
                match (cf.eval_or_limit(t, LIMIT_STEP), id.eval_or_limit(t, LIMIT_STEP)) {
                    (Ok(x), Ok(y)) => {
                        let d = (x - y).abs();
                        if d > max_abs_diff {
                            max_abs_diff = d;
                            at = t;
                        }
                    }
                    _ => skipped += 1,
                }
            }
            RouteComparison {
                quantity,
                agree: max_abs_diff <= tol,
                max_abs_diff,
                at,
                skipped,
            }
        })
        .collect();
    RouteDiagnostic {
        tol,
        grid_points: grid.len(),
        fired: comparisons.iter().any(|c| !c.agree),
        comparisons,
    }
}

/// Right-hand side of the Riccati system
/// `y_k' = a_{k+1,1} + Σ_j a_{k+1,j+1} y_j − y_k (a_11 + Σ_j a_{1,j+1} y_j)`.
#[derive(Clone, Debug)]
pub struct RiccatiSystem {
    sys: LinearSystem,
}

impl RiccatiSystem {
    pub fn new(sys: &LinearSystem) -> Result<Self, SystemError> {
        sys.require_full_dimension()?;
        Ok(RiccatiSystem { sys: sys.clone() })
    }

    pub fn dim(&self) -> usize {
        self.sys.n() - 1
    }

    pub fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), DomainError> {
        let a = self.sys.sample(t)?;
        let m = self.dim();
        let mut first = a[(0, 0)];
        for j in 0..m {
            first += a[(0, j + 1)] * y[j];
        }
        for k in 0..m {
            let mut v = a[(k + 1, 0)];
            for j in 0..m {
                v += a[(k + 1, j + 1)] * y[j];
            }
            dy[k] = v - y[k] * first;
        }
        Ok(())
    }

    pub fn rhs(&self) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<(), DomainError> + '_ {
        move |t, y, dy| self.eval(t, y, dy)
    }

    /// `Σ_j a_{1,j+1}(t) y_j`, the integrand of `F`.
    pub fn first_row_coupling(&self, t: f64, y: &[f64]) -> Result<f64, DomainError> {
        let mut s = 0.0;
        for (j, yj) in y.iter().enumerate() {
            s += self.sys.entry(0, j + 1).eval(t)? * yj;
        }
        Ok(s)
    }
}

pub fn riccati_rhs(sys: &LinearSystem) -> Result<RiccatiSystem, SystemError> {
    RiccatiSystem::new(sys)
}

/// Rebuilds `φ` from a Riccati trajectory: `φ_1 = φ_1(t_1) exp ∫(a_11 + Σ a_{1,j+1} y_j)`
/// and `φ_{k+1} = y_k φ_1`, sampled at the Riccati step points and joined by
/// cubic Hermite interpolation using `φ' = A(t) φ`.
pub fn reconstruct_phi(
    sys: &LinearSystem,
    riccati: &Trajectory,
    phi1_init: f64,
    opts: &QuadOptions,
) -> Result<Trajectory, ReductionError> {
    if phi1_init == 0.0 || !phi1_init.is_finite() {
        return Err(ReductionError::Precondition(format!(
            "the initial value of φ_1 must be finite and nonzero, got {phi1_init}"
        )));
    }
    let rs = RiccatiSystem::new(sys)?;
    if riccati.dim() != rs.dim() {
        return Err(ReductionError::Precondition(format!(
            "Riccati trajectory has {} components, expected {}",
            riccati.dim(),
            rs.dim()
        )));
    }
    let times = riccati.times().to_vec();
    let t1 = times[0];
    let log_growth = cumulative_quad(
        |t| {
            let y = riccati.eval(t).expect("quadrature node inside the trajectory");
            Ok(sys.entry(0, 0).eval(t)? + rs.first_row_coupling(t, &y)?)
        },
        t1,
        &times,
        opts,
    )?;

    let n = sys.n();
    let mut states = Vec::with_capacity(times.len());
    let mut derivs = Vec::with_capacity(times.len());
    let mut rhs = sys.rhs();
    for ((&t, y), l) in times.iter().zip(riccati.states()).zip(&log_growth) {
        let phi1 = phi1_init * l.exp();
        let mut phi = Vec::with_capacity(n);
        phi.push(phi1);
        phi.extend(y.iter().map(|yk| yk * phi1));
        let mut d = vec![0.0; n];
        rhs(t, &phi, &mut d)?;
        states.push(phi);
        derivs.push(d);
    }
    let mut out = Trajectory::from_hermite(times, states, derivs);
    out.set_termination(riccati.termination());
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EscapeClass {
    Escaped { t_star: f64 },
    Global,
    Undetermined,
}

/// Behaviour of `F(t) = ∫_{t_1}^t Σ a_{1,j+1} y_j` approaching the escape time.
///
/// If `F` were bounded below the interval could be continued past `t*`, so
/// a genuine escape must come with `F → −∞`. `F` is sampled at
/// `t* − d` for geometrically shrinking `d` and fitted against `ln d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FTrend {
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    /// Least-squares slope of `F` against `ln d`.
    pub log_slope: f64,
    pub decreasing: bool,
    pub unbounded_below: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeReport {
    pub class: EscapeClass,
    pub f_trend: Option<FTrend>,
    /// An escape without `F → −∞` contradicts the continuation argument and
    /// points at a numerical artifact.
    pub consistent: bool,
}

pub fn escape_classify(
    sys: &LinearSystem,
    riccati: &Trajectory,
    opts: &QuadOptions,
) -> Result<EscapeReport, ReductionError> {
    let class = match riccati.termination() {
        Termination::Completed => EscapeClass::Global,
        Termination::Escaped { t, .. } => EscapeClass::Escaped { t_star: t },
        Termination::Truncated { .. } => EscapeClass::Undetermined,
    };
    let EscapeClass::Escaped { t_star } = class else {
        return Ok(EscapeReport {
            class,
            f_trend: None,
            consistent: true,
        });
    };
    let rs = RiccatiSystem::new(sys)?;
    let span = t_star - riccati.t_start();
    let distances: Vec<f64> = (0..7)
        .map(|m| 0.1 * span * 10f64.powi(-m))
        .filter(|d| t_star - d > riccati.t_start())
        .collect();
    if distances.len() < 3 {
        return Ok(EscapeReport {
            class,
            f_trend: None,
            consistent: false,
        });
    }
    let grid: Vec<f64> = distances.iter().map(|d| t_star - d).collect();
    let values = cumulative_quad(
        |t| {
            let y = riccati.eval(t).expect("quadrature node inside the trajectory");
            rs.first_row_coupling(t, &y)
        },
        riccati.t_start(),
        &grid,
        opts,
    )?;
    let xs: Vec<f64> = distances.iter().map(|d| d.ln()).collect();
    let log_slope = least_squares_slope(&xs, &values);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let unbounded_below = decreasing && log_slope > 0.5;
    Ok(EscapeReport {
        class,
        f_trend: Some(FTrend {
            distances,
            values,
            log_slope,
            decreasing,
            unbounded_below,
        }),
        consistent: unbounded_below,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate_ode, uniform_grid, OdeOptions};
    use std::f64::consts::{PI, SQRT_2};

    fn sys(rows: &[&[&str]]) -> LinearSystem {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        LinearSystem::from_strings(0.0, &rows).unwrap()
    }

    fn canonical() -> LinearSystem {
        sys(&[&["0", "1", "1"], &["-1", "0", "0"], &["-1", "0", "0"]])
    }

    fn assert_const(e: &CoeffExpr, v: f64) {
        for t in [0.0, 0.7, 3.1, 9.0] {
            let x = e.eval(t).unwrap();
            assert!((x - v).abs() <= 1e-12, "{e} = {x} at {t}, expected {v}");
        }
    }

    #[test]
    fn nu_examples() {
        assert_const(&compute_nu(&canonical()).unwrap()[0], 0.0);
        assert!(compute_nu(&canonical()).unwrap()[0].is_zero());
        let half = sys(&[&["0", "2", "1"], &["0", "0", "0"], &["0", "0", "0"]]);
        assert_const(&compute_nu(&half).unwrap()[0], 0.5);
        let trig = sys(&[&["0", "cos(t)", "sin(2*t)"], &["0", "0", "0"], &["0", "0", "0"]]);
        let nu = &compute_nu(&trig).unwrap()[0];
        for t in [0.2, 1.0, 4.0] {
            assert!((nu.eval(t).unwrap() - (1.0 - 2.0 * t.sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_first_row_entries_leave_coefficients_unchanged() {
        let s = sys(&[
            &["sin(t)", "2 + cos(t)", "2 + cos(t)"],
            &["t", "exp(-t)", "3"],
            &["1", "t^2", "-2"],
        ]);
        let nu = compute_nu(&s).unwrap();
        assert!(nu[0].is_zero());
        let tl = compute_tilde(&s).unwrap();
        for t in [0.0, 1.3, 2.9] {
            assert_eq!(tl.a21.eval(t), s.entry(1, 0).eval(t));
            assert_eq!(tl.a22.eval(t), s.entry(1, 1).eval(t));
            assert_eq!(tl.a2k[0].eval(t), s.entry(1, 2).eval(t));
            assert_eq!(tl.ajk[0][0].eval(t), s.entry(2, 2).eval(t));
        }
    }

    #[test]
    fn tilde_examples() {
        let tl = compute_tilde(&canonical()).unwrap();
        assert_const(&tl.a21, -1.0);
        assert_const(&tl.a22, 0.0);
        assert_const(&tl.a2k[0], 0.0);
        assert_const(&tl.ajk[0][0], 0.0);

        // a_12 = 1, a_13 = 2, so ν_3 = −1 and ã_33 = a_33 − a_32.
        let s = sys(&[&["1", "1", "2"], &["3", "4", "5"], &["6", "7", "8"]]);
        assert_const(&compute_nu(&s).unwrap()[0], -1.0);
        assert_const(&compute_tilde(&s).unwrap().ajk[0][0], 8.0 - 7.0);

        // a_13 = 0 gives ν_3 = 1, so ã_23 = a_22 − a_33 on a diagonal system.
        let diag = sys(&[&["1", "1", "0"], &["0", "2", "0"], &["0", "0", "2"]]);
        assert_const(&compute_tilde(&diag).unwrap().a2k[0], 0.0);
        let diag = sys(&[&["1", "1", "0"], &["0", "2", "0"], &["0", "0", "3"]]);
        assert_const(&compute_tilde(&diag).unwrap().a2k[0], -1.0);
    }

    #[test]
    fn abc_examples() {
        for abc in [
            compute_abc(&canonical()).unwrap(),
            compute_abc_via_tilde(&canonical()).unwrap(),
        ] {
            assert_const(&abc.a, 0.0);
            assert_const(&abc.b[0], 0.0);
            assert_const(&abc.c, 2.0);
        }
        let zero = sys(&[&["0", "1", "0"], &["0", "0", "0"], &["0", "0", "0"]]);
        let abc = compute_abc_via_tilde(&zero).unwrap();
        assert_const(&abc.a, 0.0);
        assert_const(&abc.b[0], 0.0);
        assert_const(&abc.c, 0.0);

        // Third row and column zero, a_13 = 0: reduces to the planar quantities.
        let embed = sys(&[&["sin(t)", "2", "0"], &["-3", "t", "0"], &["0", "0", "0"]]);
        for abc in [compute_abc(&embed).unwrap(), compute_abc_via_tilde(&embed).unwrap()] {
            for t in [0.0, 1.5, 4.0] {
                assert!((abc.a.eval(t).unwrap() - (t.sin() - t)).abs() < 1e-12);
                assert!((abc.c.eval(t).unwrap() - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perturbed_canonical_has_nonzero_b() {
        let s = canonical().with_entry(1, 2, CoeffExpr::constant(1.0));
        assert_const(&compute_abc_via_tilde(&s).unwrap().b[0], -1.0);
    }

    #[test]
    fn routes_agree_on_a_and_c_and_differ_on_b_by_the_known_term() {
        let s = sys(&[
            &["sin(t)", "2 + cos(t)", "t/3", "1 - cos(2*t)"],
            &["0.5", "cos(t)", "1", "t"],
            &["-1", "exp(-t)", "0.3*t", "2"],
            &["sin(3*t)", "1", "-0.5", "cos(t)^2"],
        ]);
        let data = ReducedData::new(&s).unwrap();
        let grid = uniform_grid(0.0, 5.0, 200);
        let diag = route_diagnostic(&data, &grid, 1e-9);
        assert!(diag.agrees_on("A"));
        assert!(diag.agrees_on("C"));
        assert!(diag.fired);

        let mu = ratios(&s).unwrap();
        let nu = compute_nu(&s).unwrap();
        for &t in &grid {
            let m = s.sample(t).unwrap();
            let term: f64 = (2..4).map(|j| m[(0, j)] - mu[j - 2].eval(t).unwrap() * m[(j, 1)]).sum();
            for (k, nu_k) in nu.iter().enumerate() {
                let gap = data.abc_closed_form.b[k].eval(t).unwrap() - data.abc.b[k].eval(t).unwrap();
                let expected = -nu_k.eval(t).unwrap() * term;
                assert!((gap - expected).abs() < 1e-9 * (1.0 + expected.abs()), "t={t} k={k}");
            }
        }
    }

    #[test]
    fn identity_route_matches_change_of_variables() {
        // u = φ̃_2 + Σ φ_k satisfies u' = −C φ_1 + (a_11 − A) u − Σ B_k φ_k.
        let s = sys(&[
            &["0.2", "1.5 + sin(t)", "cos(t)"],
            &["-1", "0.1*t", "0.4"],
            &["0.3", "-0.2", "sin(2*t)"],
        ]);
        let data = ReducedData::new(&s).unwrap();
        let traj = integrate_ode(s.rhs(), &[1.0, 0.3, -0.5], (0.0, 3.0), &OdeOptions::default())
            .unwrap();
        let nu = &data.nu[0];
        let u = |t: f64| {
            let p = traj.eval(t).unwrap();
            p[1] - nu.eval(t).unwrap() * p[2] + p[2]
        };
        for t in [0.5, 1.2, 2.4] {
            let h = 1e-5;
            let du = (u(t + h) - u(t - h)) / (2.0 * h);
            let p = traj.eval(t).unwrap();
            let a11 = s.entry(0, 0).eval(t).unwrap();
            let rhs = -data.abc.c.eval(t).unwrap() * p[0]
                + (a11 - data.abc.a.eval(t).unwrap()) * u(t)
                - data.abc.b[0].eval(t).unwrap() * p[2];
            assert!((du - rhs).abs() < 1e-6, "t={t}: {du} vs {rhs}");
        }
    }

    #[test]
    fn riccati_rhs_examples() {
        let rs = riccati_rhs(&canonical()).unwrap();
        let mut dy = [0.0; 2];
        rs.eval(0.0, &[0.5, -2.0], &mut dy).unwrap();
        assert_eq!(dy, [-1.0 - 0.5 * (0.5 - 2.0), -1.0 + 2.0 * (0.5 - 2.0)]);

        let diag = sys(&[&["1", "0", "0"], &["0", "2", "0"], &["0", "0", "-3"]]);
        riccati_rhs(&diag).unwrap().eval(0.0, &[0.5, 2.0], &mut dy).unwrap();
        assert_eq!(dy, [0.5, -8.0]);

        let only21 = sys(&[&["0", "0", "0"], &["1", "0", "0"], &["0", "0", "0"]]);
        riccati_rhs(&only21).unwrap().eval(0.0, &[3.0, 4.0], &mut dy).unwrap();
        assert_eq!(dy, [1.0, 0.0]);
    }

    #[test]
    fn reconstruction_examples() {
        let diag = sys(&[&["-1", "0", "0"], &["0", "0", "0"], &["0", "0", "0"]]);
        let rs = riccati_rhs(&diag).unwrap();
        let y = integrate_ode(rs.rhs(), &[0.0, 0.0], (0.0, 3.0), &OdeOptions::default()).unwrap();
        let phi = reconstruct_phi(&diag, &y, 1.0, &QuadOptions::default()).unwrap();
        for (t, p) in phi.times().iter().zip(phi.states()) {
            assert!((p[0] - (-t).exp()).abs() < 1e-12);
        }
        assert!(matches!(
            reconstruct_phi(&diag, &y, 0.0, &QuadOptions::default()),
            Err(ReductionError::Precondition(_))
        ));

        let s = canonical();
        let rs = riccati_rhs(&s).unwrap();
        let y = integrate_ode(rs.rhs(), &[0.0, 0.0], (0.0, 1.0), &OdeOptions::default()).unwrap();
        let phi = reconstruct_phi(&s, &y, 1.0, &QuadOptions::default()).unwrap();
        for (t, p) in phi.times().iter().zip(phi.states()) {
            let exact = (SQRT_2 * t).cos();
            assert!((p[0] - exact).abs() <= 1e-6 * exact.abs(), "t={t}");
        }
    }

    #[test]
    fn escape_of_scalar_riccati() {
        let s = sys(&[&["0", "1", "0"], &["0", "0", "0"], &["0", "0", "0"]]);
        let rs = riccati_rhs(&s).unwrap();
        let y = integrate_ode(rs.rhs(), &[-1.0, 0.0], (0.0, 3.0), &OdeOptions::default()).unwrap();
        let r = escape_classify(&s, &y, &QuadOptions::default()).unwrap();
        let EscapeClass::Escaped { t_star } = r.class else {
            panic!("{r:?}")
        };
        assert!((t_star - 1.0).abs() < 1e-6);
        assert!(r.f_trend.unwrap().unbounded_below);
        assert!(r.consistent);
    }

    #[test]
    fn canonical_escape_matches_first_zero() {
        let s = canonical();
        let rs = riccati_rhs(&s).unwrap();
        let y = integrate_ode(rs.rhs(), &[0.0, 0.0], (0.0, 5.0), &OdeOptions::default()).unwrap();
        let r = escape_classify(&s, &y, &QuadOptions::default()).unwrap();
        let EscapeClass::Escaped { t_star } = r.class else {
            panic!("{r:?}")
        };
        assert!((t_star - PI / (2.0 * SQRT_2)).abs() < 1e-6);
        let trend = r.f_trend.unwrap();
        assert!(trend.unbounded_below);
        assert!((trend.log_slope - 1.0).abs() < 0.05, "{}", trend.log_slope);
    }

    #[test]
    fn linear_riccati_is_global() {
        let diag = sys(&[&["-1", "0", "0"], &["0", "2", "0"], &["0", "0", "1"]]);
        let rs = riccati_rhs(&diag).unwrap();
        let y = integrate_ode(rs.rhs(), &[1.0, 1.0], (0.0, 5.0), &OdeOptions::default()).unwrap();
        let r = escape_classify(&diag, &y, &QuadOptions::default()).unwrap();
        assert_eq!(r.class, EscapeClass::Global);
    }
}
