//! Nonoscillation of cooperative systems and the stability necessary conditions.
//!
//! If every off-diagonal `a_jk` is nonnegative, each solution with positive
//! initial data stays above `φ_k(t0) e^{∫ a_kk}` componentwise, so it never
//! vanishes. Bounded solutions then need `sup ∫ a_kk < ∞`, and decaying
//! ones need `∫ a_kk → −∞`.

use crate::integrate::{
    cumulative_quad, divergence_probe, integrate_ode, LadderVerdict, OdeOptions, LIMIT_STEP,
};
use crate::system::LinearSystem;

use super::{CheckKind, CriteriaError, CriteriaOptions, Flag, Status, Verdict, Witness};

/// Relative slack allowed in the pointwise lower bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// Checks the off-diagonal sign hypothesis on `window`, the lower bound for
/// each of `inits` (all components positive; defaults to all ones), and the
/// stability necessary conditions along the ladder.
pub fn nonoscillation_check(
    sys: &LinearSystem,
    window: (f64, f64),
    inits: &[Vec<f64>],
    opts: &CriteriaOptions,
) -> Result<Verdict, CriteriaError> {
    let (t0, t_end) = window;
    let n = sys.n();
    if !(t_end > t0) {
        return Err(CriteriaError::Precondition(format!("empty window [{t0}, {t_end}]")));
    }
    let default_init = [vec![1.0; n]];
    let inits: &[Vec<f64>] = if inits.is_empty() { &default_init } else { inits };
    for init in inits {
        if init.len() != n || init.iter().any(|&x| !(x > 0.0)) {
            return Err(CriteriaError::Precondition(format!(
                "initial values must have {n} positive components, got {init:?}"
            )));
        }
    }

    let mut v = Verdict::new(CheckKind::Nonoscillation, Status::Inconclusive)
        .evidence()
        .param("window", [t0, t_end])
        .param("ladder", &opts.ladder)
        .param("stability_threshold", opts.stability_threshold)
        .param("threshold", opts.threshold)
        .caveat("off-diagonal signs are checked on a finite grid")
        .caveat("the stability conditions are necessary, not sufficient");

    let grid = opts.grid(t0, t_end);
    let mut hypothesis = true;
    for j in 0..n {
        for k in (0..n).filter(|&k| k != j) {
            let label = format!("a{}{}", j + 1, k + 1);
            let (ok, w) = super::sign_witness(&label, &grid, sys.entry(j, k), opts.sign_tol);
            if !ok {
                hypothesis = false;
                v = v.witness(w);
            }
        }
    }
    if !hypothesis {
        v.status = Status::Fails;
        return Ok(v);
    }
    v = v.witness(Witness::SignCheck {
        label: "off-diagonal entries".into(),
        a: t0,
        b: t_end,
        grid_points: grid.len(),
        min_value: 0.0,
    });

    // Lower bound along each trajectory.
    let diag_integrals: Vec<Vec<f64>> = (0..n)
        .map(|k| cumulative_quad(|t| sys.entry(k, k).eval_or_limit(t, LIMIT_STEP), t0, &grid, &opts.quad))
        .collect::<Result<_, _>>()?;
    let ode = OdeOptions {
        rel_tol: opts.ode.rel_tol.min(1e-12),
        abs_tol: opts.ode.abs_tol.min(1e-14),
        norm_relative_abs_tol: true,
        ..opts.ode.clone()
    };
    let mut bound_ok = true;
    for init in inits {
        let traj = integrate_ode(sys.rhs(), init, (t0, t_end), &ode)?;
        for k in 0..n {
            let mut min_slack = f64::INFINITY;
            let mut at = t0;
            for (i, &t) in grid.iter().enumerate() {
                let phi = traj.eval_component(t, k).unwrap_or(f64::NAN);
                let bound = init[k] * diag_integrals[k][i].exp();
                let slack = (phi - bound) / phi.abs().max(1.0);
                if !(slack >= min_slack) {
                    min_slack = slack;
                    at = t;
                }
            }
            bound_ok &= min_slack >= -BOUND_SLACK;
            v = v.witness(Witness::Bound {
                component: k + 1,
                init: init.clone(),
                min_slack,
                at,
                tol: BOUND_SLACK,
            });
        }
    }
    if !bound_ok {
        v.status = Status::Fails;
        return Ok(v.caveat("the lower bound failed; the hypothesis grid may be too coarse"));
    }

    // Stability necessary conditions.
    let horizons = opts.horizons(t0);
    let mut not_lyapunov = false;
    let mut not_asymptotic = false;
    for k in 0..n {
        let akk = sys.entry(k, k);
        let growth = divergence_probe(
            |t| akk.eval_or_limit(t, LIMIT_STEP),
            t0,
            &horizons,
            opts.stability_threshold,
            &opts.quad,
        )?;
        let decay = divergence_probe(
            |t| akk.eval_or_limit(t, LIMIT_STEP).map(|x| -x),
            t0,
            &horizons,
            opts.threshold,
            &opts.quad,
        )?;
        if growth.verdict == LadderVerdict::GrowingBeyondThreshold {
            not_lyapunov = true;
        }
        if growth.verdict == LadderVerdict::GrowingBeyondThreshold
            || decay.verdict == LadderVerdict::Bounded
        {
            not_asymptotic = true;
        }
        if decay.verdict == LadderVerdict::Mixed && growth.verdict != LadderVerdict::GrowingBeyondThreshold {
            v = v.caveat(format!(
                "divergence of -int a{0}{0} to infinity is undecided on the ladder",
                k + 1
            ));
        }
        v = v
            .witness(Witness::Ladder {
                label: format!("int a{0}{0}", k + 1),
                ladder: growth,
            })
            .witness(Witness::Ladder {
                label: format!("-int a{0}{0}", k + 1),
                ladder: decay,
            });
    }
    if not_lyapunov {
        v = v.flag(Flag::NotLyapunovStable);
    }
    if not_asymptotic {
        v = v.flag(Flag::NotAsymptoticallyStable);
    }
    v.status = Status::Holds;
    Ok(v.flag(Flag::NonoscillatoryEvidence))
}
