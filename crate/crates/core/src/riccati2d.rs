//! Planar systems `φ' = p11 φ + p12 ψ`, `ψ' = p21 φ + p22 ψ` and scalar
//! Riccati equations `y' + f y² + g y + h = 0`.
//!
//! With `E = p11 − p22`, the planar oscillation tests weigh `p12` by
//! `e^{−∫E}` and `−p21` by `e^{∫E}`. Solutions of the linear equation
//! `ζ' + g ζ + h = 0` are subsolutions of the Riccati equation whenever
//! `f >= 0`, which makes the comparison probe constructive.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::criteria::{sign_witness, CheckKind, Flag, Status, Verdict, Witness};
use crate::expr::{CoeffExpr, DomainError};
use crate::integrate::{
    cumulative_quad, divergence_probe, integrate_ode, quad, sign_test, uniform_grid, ErrorSlot,
    ExprIntegral, LadderVerdict, NumericError, OdeOptions, QuadOptions, Termination, Trajectory,
};
use crate::system::{LinearSystem, SystemError};

#[derive(Debug, Error)]
pub enum PlanarError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("{0}")]
    Precondition(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct System2D {
    pub p11: CoeffExpr,
    pub p12: CoeffExpr,
    pub p21: CoeffExpr,
    pub p22: CoeffExpr,
    pub t0: f64,
}

impl System2D {
    pub fn parse(t0: f64, p11: &str, p12: &str, p21: &str, p22: &str) -> Result<Self, SystemError> {
        let sys = LinearSystem::from_strings(t0, &[vec![p11, p12], vec![p21, p22]])?;
        Self::try_from(&sys)
    }

    /// `E = p11 − p22`.
    pub fn e(&self) -> CoeffExpr {
        if self.p11 == self.p22 {
            CoeffExpr::zero()
        } else {
            self.p11.sub(&self.p22)
        }
    }

    pub fn to_system(&self) -> LinearSystem {
        LinearSystem::new(
            self.t0,
            vec![
                vec![self.p11.clone(), self.p12.clone()],
                vec![self.p21.clone(), self.p22.clone()],
            ],
        )
        .expect("2x2 system")
    }
}

impl TryFrom<&LinearSystem> for System2D {
    type Error = SystemError;

    fn try_from(sys: &LinearSystem) -> Result<Self, SystemError> {
        if sys.n() != 2 {
            return Err(SystemError::Dimension(format!(
                "a planar system needs n = 2, got n = {}",
                sys.n()
            )));
        }
        Ok(System2D {
            p11: sys.entry(0, 0).clone(),
            p12: sys.entry(0, 1).clone(),
            p21: sys.entry(1, 0).clone(),
            p22: sys.entry(1, 1).clone(),
            t0: sys.t0(),
        })
    }
}

/// Coefficients of `y' + f y² + g y + h = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiccatiTriple {
    pub f: CoeffExpr,
    pub g: CoeffExpr,
    pub h: CoeffExpr,
}

impl RiccatiTriple {
    pub fn parse(f: &str, g: &str, h: &str) -> Result<Self, crate::expr::ParseError> {
        Ok(RiccatiTriple {
            f: CoeffExpr::parse(f)?,
            g: CoeffExpr::parse(g)?,
            h: CoeffExpr::parse(h)?,
        })
    }

    pub fn constant(f: f64, g: f64, h: f64) -> Self {
        RiccatiTriple {
            f: CoeffExpr::constant(f),
            g: CoeffExpr::constant(g),
            h: CoeffExpr::constant(h),
        }
    }

    /// `y' = −(f y² + g y + h)`.
    pub fn rhs(&self, t: f64, y: f64) -> Result<f64, DomainError> {
        Ok(-(self.f.eval(t)? * y * y + self.g.eval(t)? * y + self.h.eval(t)?))
    }

    pub fn solve(&self, y0: f64, window: (f64, f64), opts: &OdeOptions) -> Result<Trajectory, NumericError> {
        integrate_ode(
            |t, y, dy| {
                dy[0] = self.rhs(t, y[0])?;
                Ok(())
            },
            &[y0],
            window,
            opts,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanarOptions {
    pub grid_points: usize,
    /// Grid values above `-sign_tol` count as nonnegative.
    pub sign_tol: f64,
    pub quad: QuadOptions,
    /// Ladder values must exceed this to count as diverging.
    pub threshold: f64,
    pub ode: OdeOptions,
}

impl Default for PlanarOptions {
    fn default() -> Self {
        PlanarOptions {
            grid_points: 2001,
            sign_tol: 1e-12,
            quad: QuadOptions::default().with_tol(1e-9),
            threshold: 50.0,
            ode: OdeOptions::default(),
        }
    }
}

/// Whether `∫_a^b min[p12 e^{−∫_a^t E}, −p21 e^{∫_a^t E}] dt >= π` with
/// `p12 >= 0` on `[a, b]`, which forces a zero of `φ` in `[a, b]`.
pub fn interval_oscillation_check(
    sys: &System2D,
    a: f64,
    b: f64,
    opts: &PlanarOptions,
) -> Result<Verdict, PlanarError> {
    if !(b > a) {
        return Err(PlanarError::Precondition(format!("need a < b, got [{a}, {b}]")));
    }
    let base = Verdict::new(CheckKind::PlanarInterval, Status::Inconclusive)
        .param("a", a)
        .param("b", b)
        .param("quad_tol", opts.quad.tol);
    let grid = uniform_grid(a, b, opts.grid_points);
    let (p12_ok, sign) = sign_witness("p12", &grid, &sys.p12, opts.sign_tol);
    if !p12_ok {
        return Ok(Verdict {
            status: Status::Fails,
            ..base.witness(sign)
        });
    }
    let e = sys.e();
    let mut inner = ExprIntegral::new(&e, a, (b - a) / 64.0, &opts.quad);
    let mut slot = ErrorSlot::default();
    let r = quad(
        |t| {
            let w = slot.lift(t, inner.eval(t))?;
            let first = sys.p12.eval(t)? * (-w).exp();
            let second = -sys.p21.eval(t)? * w.exp();
            Ok(first.min(second))
        },
        a,
        b,
        &opts.quad,
    );
    let r = slot.finish(r)?;
    let tol = opts.quad.tol * r.value.abs().max(1.0);
    let status = if r.value >= PI - tol {
        Status::Holds
    } else if r.value + r.error < PI - tol {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    Ok(Verdict {
        status,
        ..base.witness(sign).witness(Witness::Integral {
            label: "min(p12 exp(-int E), -p21 exp(int E))".into(),
            a,
            b,
            value: r.value,
            error: r.error,
            target: PI,
        })
    })
}

/// Divergence evidence for `∫ p12 e^{−∫E}` and `−∫ p21 e^{∫E}` along a ladder,
/// with `p12 >= 0` up to the last horizon.
pub fn planar_oscillation_check(
    sys: &System2D,
    ladder: &[f64],
    opts: &PlanarOptions,
) -> Result<Verdict, PlanarError> {
    if ladder.len() < 4 || ladder.windows(2).any(|w| w[1] <= w[0]) || ladder[0] <= sys.t0 {
        return Err(PlanarError::Precondition(
            "ladder needs at least 4 strictly increasing horizons after t0".into(),
        ));
    }
    let t0 = sys.t0;
    let t_max = ladder[ladder.len() - 1];
    let base = Verdict::new(CheckKind::PlanarOscillation, Status::Inconclusive)
        .evidence()
        .param("ladder", ladder)
        .param("threshold", opts.threshold)
        .caveat("divergence to infinity is inferred from a finite ladder");

    let points = opts.grid_points.max((20.0 * (t_max - t0)).ceil() as usize).min(400_001);
    let grid = uniform_grid(t0, t_max, points);
    let (p12_ok, sign) = sign_witness("p12", &grid, &sys.p12, opts.sign_tol);
    if !p12_ok {
        return Ok(Verdict {
            status: Status::Fails,
            ..base.witness(sign)
        });
    }

    let e = sys.e();
    let step = (ladder[0] - t0).min(1.0);
    let mut ladders = Vec::new();
    for (label, sign_e, coeff) in [
        ("p12 exp(-int E)", -1.0, &sys.p12),
        ("-p21 exp(int E)", 1.0, &sys.p21),
    ] {
        let mut inner = ExprIntegral::new(&e, t0, step, &opts.quad);
        let mut slot = ErrorSlot::default();
        let flip = if sign_e > 0.0 { -1.0 } else { 1.0 };
        let r = divergence_probe(
            |t| {
                let w = slot.lift(t, inner.eval(t))?;
                Ok(flip * coeff.eval(t)? * (sign_e * w).exp())
            },
            t0,
            ladder,
            opts.threshold,
            &opts.quad,
        );
        ladders.push((label, slot.finish(r)?));
    }
    let growing = ladders
        .iter()
        .all(|(_, l)| l.verdict == LadderVerdict::GrowingBeyondThreshold);
    let bounded = ladders.iter().any(|(_, l)| l.verdict == LadderVerdict::Bounded);
    let status = if growing {
        Status::Holds
    } else if bounded {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    let mut v = base.witness(sign);
    for (label, ladder) in ladders {
        v = v.witness(Witness::Ladder {
            label: label.into(),
            ladder,
        });
    }
    Ok(Verdict { status, ..v })
}

/// Solves `ζ' + g ζ + h = 0`, `ζ(t0) = ζ0` by the integrating factor
/// `ζ = e^{−G}(ζ0 − ∫ h e^{G})`, `G = ∫ g`. Requires `f >= 0` on the window,
/// which makes `ζ` a subsolution of the Riccati equation.
pub fn zeta_subsolution(
    triple: &RiccatiTriple,
    zeta0: f64,
    window: (f64, f64),
    opts: &PlanarOptions,
) -> Result<Trajectory, PlanarError> {
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(PlanarError::Precondition(format!("empty window [{t0}, {t1}]")));
    }
    let grid = uniform_grid(t0, t1, opts.grid_points);
    let st = sign_test(&grid, opts.sign_tol, |t| triple.f.eval(t));
    if let Some((t, v)) = st.violation {
        return Err(PlanarError::Precondition(format!(
            "f must be nonnegative for a subsolution, f({t}) = {v}"
        )));
    }
    let step = (t1 - t0) / 64.0;
    let mut big_g = ExprIntegral::new(&triple.g, t0, step, &opts.quad);
    let gs: Vec<f64> = grid.iter().map(|&t| big_g.eval(t)).collect::<Result<_, _>>()?;
    let mut slot = ErrorSlot::default();
    let hs = cumulative_quad(
        |t| {
            let w = slot.lift(t, big_g.eval(t))?;
            Ok(triple.h.eval(t)? * w.exp())
        },
        t0,
        &grid,
        &opts.quad,
    );
    let hs = slot.finish(hs)?;
    let mut states = Vec::with_capacity(grid.len());
    let mut derivs = Vec::with_capacity(grid.len());
    for ((&t, g), hint) in grid.iter().zip(&gs).zip(&hs) {
        let z = (-g).exp() * (zeta0 - hint);
        let dz = -(triple.g.eval(t).map_err(NumericError::from)? * z)
            - triple.h.eval(t).map_err(NumericError::from)?;
        states.push(vec![z]);
        derivs.push(vec![dz]);
    }
    Ok(Trajectory::from_hermite(grid, states, derivs))
}

/// Compares `y' + f1 y² + g1 y + h1 = 0` (from `γ0`) against
/// `y' + f2 y² + g2 y + h2 = 0` (from `y2_init`).
///
/// Hypothesis: `f1 >= 0` and, for every `t` on the window,
/// `∫_{t0}^{t} exp{∫_{t0}^{τ} [f2(η1 + η2) + g2]} [(f1 − f2) y2² + (g1 − g2) y2 + h1 − h2] dτ >= 0`,
/// where `η1`, `η2` are the linear subsolutions of each equation started at
/// `2 y2(t0)`. Conclusion: the first equation's solution exists on the window.
/// The verdict holds when both are verified, fails when the hypothesis is
/// violated, and is inconclusive when the hypothesis holds but the
/// conclusion does not.
pub fn comparison_probe(
    first: &RiccatiTriple,
    second: &RiccatiTriple,
    y2_init: f64,
    gamma0: f64,
    window: (f64, f64),
    opts: &PlanarOptions,
) -> Result<Verdict, PlanarError> {
    if gamma0 < y2_init {
        return Err(PlanarError::Precondition(format!(
            "need gamma0 >= y2(t0), got {gamma0} < {y2_init}"
        )));
    }
    let (t0, t_end) = window;
    if !(t_end > t0) {
        return Err(PlanarError::Precondition(format!("empty window [{t0}, {t_end}]")));
    }
    let mut v = Verdict::new(CheckKind::Comparison, Status::Inconclusive)
        .param("gamma0", gamma0)
        .param("y2_init", y2_init)
        .param("window", [t0, t_end])
        .flag(Flag::InterpretedCoefficients)
        .caveat("unsubscripted f, g, h in the comparison integrand are taken from the second equation")
        .caveat("the subsolutions are the linear ones, started at 2 y2(t0)");

    let grid = uniform_grid(t0, t_end, opts.grid_points);
    let mut hypothesis = true;
    for (label, f) in [("f1", &first.f), ("f2", &second.f)] {
        let (ok, w) = sign_witness(label, &grid, f, opts.sign_tol);
        hypothesis &= ok;
        v = v.witness(w);
    }

    // Comparison solution; an escape shortens the window.
    let y2 = second.solve(y2_init, window, &opts.ode)?;
    let mut hyp_end = t_end;
    if let Some(esc) = y2.escape() {
        hyp_end = y2
            .times()
            .iter()
            .zip(y2.states())
            .take_while(|(_, y)| y[0].abs() <= 1e6)
            .map(|(t, _)| *t)
            .last()
            .unwrap_or(t0);
        v = v
            .witness(Witness::Existence {
                label: "y2".into(),
                t_start: t0,
                t_end: esc.t,
                global: false,
            })
            .caveat(format!(
                "y2 escapes at t = {}; hypotheses checked on [{t0}, {hyp_end}]",
                esc.t
            ));
    }

    if hypothesis && hyp_end > t0 {
        let sub_opts = PlanarOptions {
            grid_points: opts.grid_points,
            ..opts.clone()
        };
        let eta0 = 2.0 * y2_init;
        let eta1 = zeta_subsolution(first, eta0, (t0, hyp_end), &sub_opts)?;
        let eta2 = zeta_subsolution(second, eta0, (t0, hyp_end), &sub_opts)?;
        let exponent_rate = |t: f64| -> Result<f64, DomainError> {
            let e1 = eta1.eval_component(t, 0).unwrap_or(eta0);
            let e2 = eta2.eval_component(t, 0).unwrap_or(eta0);
            Ok(second.f.eval(t)? * (e1 + e2) + second.g.eval(t)?)
        };
        let hgrid = uniform_grid(t0, hyp_end, opts.grid_points);
        let exponents = cumulative_quad(exponent_rate, t0, &hgrid, &opts.quad)?;
        // Between grid points the exponent is interpolated from the running
        // integral at the left node plus a local quadrature.
        let integrand = |t: f64| -> Result<f64, DomainError> {
            let i = hgrid.partition_point(|&s| s <= t).saturating_sub(1);
            let local = quad(exponent_rate, hgrid[i], t, &opts.quad)
                .map(|r| r.value)
                .unwrap_or(0.0);
            let w = exponents[i] + local;
            let y = y2.eval_component(t, 0).unwrap_or(y2_init);
            let bracket = (first.f.eval(t)? - second.f.eval(t)?) * y * y
                + (first.g.eval(t)? - second.g.eval(t)?) * y
                + first.h.eval(t)?
                - second.h.eval(t)?;
            Ok(w.exp() * bracket)
        };
        let running = cumulative_quad(integrand, t0, &hgrid[1..], &opts.quad)?;
        let scale = running.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-9 * scale;
        match hgrid[1..]
            .iter()
            .zip(&running)
            .find(|(_, &val)| val < -tol)
        {
            Some((&t, &value)) => {
                hypothesis = false;
                v = v.witness(Witness::SignViolation {
                    label: "comparison integral".into(),
                    t,
                    value,
                });
            }
            None => {
                let min_value = running.iter().copied().fold(f64::INFINITY, f64::min);
                v = v.witness(Witness::SignCheck {
                    label: "comparison integral".into(),
                    a: t0,
                    b: hyp_end,
                    grid_points: hgrid.len(),
                    min_value,
                });
            }
        }
    }

    let y1 = first.solve(gamma0, (t0, t_end), &opts.ode)?;
    let conclusion = y1.termination() == Termination::Completed;
    v = v.witness(Witness::Existence {
        label: "y1".into(),
        t_start: t0,
        t_end: y1.t_end(),
        global: conclusion,
    });

    v = v
        .flag(if hypothesis {
            Flag::HypothesisVerified
        } else {
            Flag::HypothesisNotVerified
        })
        .flag(if conclusion {
            Flag::ConclusionHolds
        } else {
            Flag::ConclusionFails
        });
    v.status = match (hypothesis, conclusion) {
        (true, true) => Status::Holds,
        (false, _) if v.witnesses.iter().any(Witness::falsifies) => Status::Fails,
        _ => Status::Inconclusive,
    };
    if hypothesis && !conclusion {
        v = v.caveat("hypothesis verified but y1 escapes; suspect a numerical artifact");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation() -> System2D {
        System2D::parse(0.0, "0", "1", "-1", "0").unwrap()
    }

    #[test]
    fn e_examples() {
        assert!(rotation().e().is_zero());
        let s = System2D::parse(0.0, "t", "1", "-1", "1").unwrap();
        for t in [0.0, 2.5] {
            assert_eq!(s.e().eval(t).unwrap(), t - 1.0);
        }
        let same = System2D::parse(0.0, "sin(t)", "1", "0", "sin(t)").unwrap();
        assert!(same.e().is_zero());
    }

    #[test]
    fn interval_threshold_is_pi() {
        let opts = PlanarOptions::default();
        let v = interval_oscillation_check(&rotation(), 0.0, 3.0, &opts).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert!(v.is_well_formed());
        let v = interval_oscillation_check(&rotation(), 0.0, PI, &opts).unwrap();
        assert_eq!(v.status, Status::Holds);
        let v = interval_oscillation_check(&rotation(), 1.0, 1.0 + PI - 1e-6, &opts).unwrap();
        assert_eq!(v.status, Status::Fails);
        let neg = System2D::parse(0.0, "0", "-1", "-1", "0").unwrap();
        let v = interval_oscillation_check(&neg, 0.0, 10.0, &opts).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert!(matches!(v.witnesses[0], Witness::SignViolation { .. }));
    }

    #[test]
    fn interval_check_with_weight() {
        // E = 1: ∫_0^b min(e^{-t}, 4 e^{t}) = 1 − e^{-b} < π.
        let s = System2D::parse(0.0, "1", "1", "-4", "0").unwrap();
        let v = interval_oscillation_check(&s, 0.0, 5.0, &PlanarOptions::default()).unwrap();
        let Witness::Integral { value, .. } = v.witnesses[1] else { panic!() };
        assert!((value - (1.0 - (-5f64).exp())).abs() < 1e-9);
        assert_eq!(v.status, Status::Fails);
    }

    #[test]
    fn ladder_examples() {
        let opts = PlanarOptions::default();
        let ladder = [10.0, 100.0, 1000.0, 10000.0];
        let v = planar_oscillation_check(&rotation(), &ladder, &opts).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert!(v.evidence_only);
        for w in &v.witnesses[1..] {
            let Witness::Ladder { ladder: l, .. } = w else { panic!() };
            for (x, t) in l.values.iter().zip(ladder) {
                assert!((x - t).abs() < 1e-8 * t);
            }
        }

        let decaying = System2D::parse(0.0, "0", "exp(-t)", "-1", "0").unwrap();
        let v = planar_oscillation_check(&decaying, &ladder, &opts).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert!(v.is_well_formed());

        let neg = System2D::parse(0.0, "0", "-1", "-1", "0").unwrap();
        let v = planar_oscillation_check(&neg, &ladder, &opts).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert!(planar_oscillation_check(&rotation(), &[1.0, 2.0, 3.0], &opts).is_err());
    }

    #[test]
    fn ladder_values_monotone_for_nonnegative_integrands() {
        let s = System2D::parse(0.0, "0.1*sin(t)", "1 + cos(t)^2", "-2 + sin(t)", "0").unwrap();
        let v = planar_oscillation_check(&s, &[5.0, 10.0, 20.0, 40.0], &PlanarOptions::default())
            .unwrap();
        for w in &v.witnesses[1..] {
            let Witness::Ladder { ladder, .. } = w else { panic!() };
            assert!(ladder.values.windows(2).all(|p| p[1] >= p[0]));
        }
    }

    fn check_zeta(triple: &RiccatiTriple, z0: f64, window: (f64, f64), exact: impl Fn(f64) -> f64) {
        let z = zeta_subsolution(triple, z0, window, &PlanarOptions::default()).unwrap();
        for &t in z.times().iter().step_by(97) {
            assert!((z.eval_component(t, 0).unwrap() - exact(t)).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn zeta_examples() {
        check_zeta(&RiccatiTriple::constant(1.0, 0.0, -1.0), 0.0, (0.0, 5.0), |t| t);
        check_zeta(&RiccatiTriple::constant(1.0, 1.0, 0.0), 1.0, (0.0, 5.0), |t| (-t).exp());
        assert!(zeta_subsolution(
            &RiccatiTriple::constant(-1.0, 0.0, 0.0),
            0.0,
            (0.0, 1.0),
            &PlanarOptions::default()
        )
        .is_err());
    }

    #[test]
    fn zeta_matches_ode_and_has_small_residual() {
        let triple = RiccatiTriple::parse("1", "t", "1").unwrap();
        let opts = PlanarOptions::default();
        let z = zeta_subsolution(&triple, 0.0, (0.0, 3.0), &opts).unwrap();
        let ode = integrate_ode(
            |t, y, dy| {
                dy[0] = -t * y[0] - 1.0;
                Ok(())
            },
            &[0.0],
            (0.0, 3.0),
            &OdeOptions::default().with_tolerances(1e-12, 1e-14),
        )
        .unwrap();
        for &t in z.times().iter().step_by(50) {
            let a = z.eval_component(t, 0).unwrap();
            let b = ode.eval_component(t, 0).unwrap();
            assert!((a - b).abs() < 1e-8, "t={t}: {a} vs {b}");
        }
        let h = 1e-5;
        for &t in z.times()[1..z.len() - 1].iter().step_by(40) {
            let dz = (z.eval_component(t + h, 0).unwrap() - z.eval_component(t - h, 0).unwrap())
                / (2.0 * h);
            let resid = dz + t * z.eval_component(t, 0).unwrap() + 1.0;
            assert!(resid.abs() < 1e-8, "t={t}: {resid}");
        }
    }

    #[test]
    fn comparison_with_itself_holds() {
        let tr = RiccatiTriple::constant(1.0, 0.0, -1.0);
        let v = comparison_probe(&tr, &tr, 0.0, 0.0, (0.0, 5.0), &PlanarOptions::default())
            .unwrap();
        assert_eq!(v.status, Status::Holds, "{v:?}");
        assert!(v.has_flag(Flag::InterpretedCoefficients));
        assert!(v.is_well_formed());
    }

    #[test]
    fn comparison_hypothesis_violation_is_reported() {
        let first = RiccatiTriple::constant(1.0, 0.0, -1.0);
        let second = RiccatiTriple::constant(1.0, 0.0, 0.0);
        let opts = PlanarOptions::default();
        let v = comparison_probe(&first, &second, 0.0, 0.0, (0.0, 5.0), &opts).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert!(v.has_flag(Flag::HypothesisNotVerified));
        assert!(v.is_well_formed());

        let v = comparison_probe(&first, &second, 0.0, 1.0, (0.0, 5.0), &opts).unwrap();
        assert!(v.has_flag(Flag::HypothesisNotVerified));
        assert!(v.has_flag(Flag::ConclusionHolds));

        assert!(comparison_probe(&first, &second, 1.0, 0.0, (0.0, 5.0), &opts).is_err());
    }

    #[test]
    fn comparison_detects_escape_of_first() {
        // y' = −y² from −1 escapes at t = 1, for both equations.
        let tr = RiccatiTriple::constant(1.0, 0.0, 0.0);
        let v = comparison_probe(&tr, &tr, -1.0, -1.0, (0.0, 3.0), &PlanarOptions::default())
            .unwrap();
        assert!(v.has_flag(Flag::ConclusionFails));
        assert_ne!(v.status, Status::Holds);
    }
}
