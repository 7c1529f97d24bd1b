//! Criteria expressed through `A`, `B_k`, `C` of the reduced system.

use std::f64::consts::PI;

use crate::expr::{CoeffExpr, DomainError};
use crate::integrate::{
    divergence_probe, quad, ErrorSlot, ExprIntegral, LadderVerdict, LIMIT_STEP,
};
use crate::reduction::{route_diagnostic, ReducedData};
use crate::system::{LinearSystem, RatioOptions, RatioReport};

use super::{CheckKind, CriteriaError, CriteriaOptions, Flag, Status, Verdict, Witness};

struct Prepared {
    data: ReducedData,
    ratios: RatioReport,
}

fn prepare(
    sys: &LinearSystem,
    window: (f64, f64),
    opts: &CriteriaOptions,
) -> Result<Prepared, CriteriaError> {
    sys.require_full_dimension()?;
    let ratios = sys.validate_ratios(window, opts.ratio_grid_points, &RatioOptions::default())?;
    Ok(Prepared {
        data: ReducedData::new(sys)?,
        ratios,
    })
}

/// Attaches ratio caveats; a suspect ratio blocks `Holds`.
fn apply_ratio_report(mut v: Verdict, ratios: &RatioReport) -> Verdict {
    for c in &ratios.caveats {
        v = v.caveat(c.clone());
    }
    if !ratios.well_defined() {
        let ks: Vec<String> = ratios
            .entries
            .iter()
            .filter(|e| e.status == crate::system::RatioStatus::Suspect)
            .map(|e| format!("a_1{}/a_12", e.k))
            .collect();
        v = v
            .flag(Flag::RatioSuspect)
            .caveat(format!("ratio not well defined: {}", ks.join(", ")));
        if v.status == Status::Holds {
            v.status = Status::Inconclusive;
        }
    }
    v
}

fn value(e: &CoeffExpr, t: f64) -> Result<f64, DomainError> {
    e.eval_or_limit(t, LIMIT_STEP)
}

/// Sign pattern `σ_3..σ_n` numbered by the bits of `mask`.
fn pattern(mask: usize, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((mask >> i) & 1) as u8).collect()
}

enum Search {
    Found { t1: f64, t2: f64 },
    NoSignInterval,
    NonpositiveIntegrand,
    Short { best: f64 },
}

/// Suboscillation by sign patterns of `B_k`.
///
/// For every pattern `σ ∈ {0,1}^{n−2}` and start `T`, looks for `[t1, t2] ⊆
/// [T, T_hi]` on which every `(−1)^{σ_k} B_k >= 0` and
/// `∫_{t1}^{t2} min[a_12 e^{−∫_{t1}A}, C e^{∫_{t1}A}] >= π`. `starts`
/// defaults to five points spread over the first half of the window.
pub fn suboscillation_check(
    sys: &LinearSystem,
    window: (f64, f64),
    starts: Option<&[f64]>,
    opts: &CriteriaOptions,
) -> Result<Verdict, CriteriaError> {
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(CriteriaError::Precondition(format!("empty window [{lo}, {hi}]")));
    }
    let starts: Vec<f64> = match starts {
        Some(s) => s.to_vec(),
        None => (0..5).map(|i| lo + (hi - lo) * i as f64 / 8.0).collect(),
    };
    if starts.is_empty() || starts.iter().any(|&s| s < lo || s >= hi) {
        return Err(CriteriaError::Precondition(
            "start points must lie in [T_lo, T_hi)".into(),
        ));
    }
    let mut v = Verdict::new(CheckKind::Suboscillation, Status::Inconclusive)
        .evidence()
        .param("window", [lo, hi])
        .param("starts", &starts)
        .param("grid_step", opts.grid_step)
        .caveat("the condition for every T is checked only on the listed start points")
        .caveat("sign patterns index sigma_3..sigma_n");

    let grid = opts.grid(lo, hi);
    let a12 = sys.entry(0, 1);
    let (a12_ok, w) = super::sign_witness("a12", &grid, a12, opts.sign_tol);
    if !a12_ok {
        return Ok(Verdict {
            status: Status::Fails,
            ..v.witness(w).flag(Flag::PreconditionFailed)
        });
    }
    let prep = prepare(sys, window, opts)?;
    let diag = route_diagnostic(&prep.data, &grid, 1e-9);
    if diag.fired {
        v = v
            .flag(Flag::RouteDisagreement)
            .caveat("B_k uses the identity route; the closed form disagrees on the grid");
    }
    let abc = &prep.data.abc;
    let m = sys.n() - 2;
    let scale = sys.scale_on(&grid[..grid.len().min(200)]);
    let tol = opts.sign_tol * scale;

    let bvals: Vec<Vec<Option<f64>>> = abc
        .b
        .iter()
        .map(|b| grid.iter().map(|&t| value(b, t).ok()).collect())
        .collect();
    // min(a12 e^{−W}, C e^{W}) > 0 exactly where a12 > 0 and C > 0.
    let positive: Vec<bool> = grid
        .iter()
        .map(|&t| {
            matches!((value(a12, t), value(&abc.c, t)), (Ok(x), Ok(c)) if x > 0.0 && c > 0.0)
        })
        .collect();

    let mut all_found = true;
    let mut refuted = false;
    let last_start = starts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for mask in 0..(1usize << m) {
        let sigma = pattern(mask, m);
        let ok: Vec<bool> = (0..grid.len())
            .map(|i| {
                (0..m).all(|k| {
                    let s = if sigma[k] == 1 { -1.0 } else { 1.0 };
                    bvals[k][i].is_some_and(|b| s * b >= -tol)
                })
            })
            .collect();
        for &start in &starts {
            let first = grid.partition_point(|&t| t < start);
            let outcome = search_interval(sys, abc, &grid, &ok, &positive, first, opts)?;
            let witness = match outcome {
                Search::Found { t1, t2 } => Witness::Interval {
                    t1,
                    t2,
                    integral: PI,
                    sigma: Some(sigma.clone()),
                    start: Some(start),
                },
                Search::Short { best } => {
                    all_found = false;
                    Witness::Integral {
                        label: format!("best weighted integral, sigma = {sigma:?}, T = {start}"),
                        a: start,
                        b: hi,
                        value: best,
                        error: 0.0,
                        target: PI,
                    }
                }
                decisive => {
                    all_found = false;
                    refuted |= start == last_start;
                    let reason = if matches!(decisive, Search::NoSignInterval) {
                        "no interval with the required B_k signs"
                    } else {
                        "min(a12 exp(-int A), C exp(int A)) is nonpositive wherever the signs hold"
                    };
                    Witness::NoInterval {
                        start,
                        t_hi: hi,
                        sigma: sigma.clone(),
                        reason: reason.into(),
                    }
                }
            };
            v = v.witness(witness);
        }
    }
    v.status = if refuted {
        Status::Fails
    } else if all_found {
        Status::Holds
    } else {
        Status::Inconclusive
    };
    Ok(apply_ratio_report(v, &prep.ratios))
}

fn search_interval(
    sys: &LinearSystem,
    abc: &crate::reduction::Abc,
    grid: &[f64],
    ok: &[bool],
    positive: &[bool],
    first: usize,
    opts: &CriteriaOptions,
) -> Result<Search, CriteriaError> {
    let a12 = sys.entry(0, 1);
    let mut any_run = false;
    let mut any_positive = false;
    let mut best = f64::NEG_INFINITY;
    let mut i = first;
    while i < grid.len() {
        if !ok[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < grid.len() && ok[j + 1] {
            j += 1;
        }
        if j > i {
            any_run = true;
            any_positive |= positive[i..=j].iter().any(|&p| p);
            let t1 = grid[i];
            let mut inner = ExprIntegral::new(&abc.a, t1, opts.grid_step * 16.0, &opts.quad);
            let mut slot = ErrorSlot::default();
            let mut integrand = |t: f64| -> Result<f64, DomainError> {
                let w = slot.lift(t, inner.eval(t))?;
                Ok((value(a12, t)? * (-w).exp()).min(value(&abc.c, t)? * w.exp()))
            };
            let mut acc = 0.0;
            let mut found = None;
            for p in i..j {
                let panel = quad(&mut integrand, grid[p], grid[p + 1], &opts.quad)?.value;
                if acc + panel >= PI {
                    found = Some((p, acc));
                    break;
                }
                acc += panel;
            }
            best = best.max(acc);
            if let Some((p, base)) = found {
                let (mut a, mut b) = (grid[p], grid[p + 1]);
                for _ in 0..60 {
                    let mid = 0.5 * (a + b);
                    let part = quad(&mut integrand, grid[p], mid, &opts.quad)?.value;
                    if base + part >= PI {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                slot.finish(Ok(()))?;
                return Ok(Search::Found { t1, t2: b });
            }
            slot.finish(Ok(()))?;
        }
        i = j + 1;
    }
    Ok(if !any_run {
        Search::NoSignInterval
    } else if !any_positive {
        Search::NonpositiveIntegrand
    } else {
        Search::Short { best }
    })
}

/// Oscillation by `B_k ≡ 0` and divergence of `∫ a_12 e^{−∫A}` and `∫ C e^{∫A}`.
///
/// `B_k ≡ 0` is tested as a sup norm on a dense grid by both routes; if the
/// routes disagree the verdict is inconclusive. Both inner integrals start
/// at `t0`.
pub fn oscillation_check(sys: &LinearSystem, opts: &CriteriaOptions) -> Result<Verdict, CriteriaError> {
    let t0 = sys.t0();
    let horizons = opts.horizons(t0);
    if horizons.len() < 3 || horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] <= t0 {
        return Err(CriteriaError::Precondition(
            "ladder needs at least 3 strictly increasing positive offsets".into(),
        ));
    }
    let t_max = *horizons.last().unwrap();
    let mut v = Verdict::new(CheckKind::Oscillation, Status::Inconclusive)
        .evidence()
        .param("ladder", &opts.ladder)
        .param("threshold", opts.threshold)
        .param("sup_tol_rel", opts.sup_tol_rel)
        .caveat("B_k = 0 for all t is tested on a finite grid")
        .caveat("divergence to infinity is inferred from a finite ladder")
        .caveat("inner integrals of A are taken from t0");

    let grid = opts.grid(t0, t_max);
    let a12 = sys.entry(0, 1);
    let (a12_ok, w) = super::sign_witness("a12", &grid, a12, opts.sign_tol);
    if !a12_ok {
        return Ok(Verdict {
            status: Status::Fails,
            ..v.witness(w).flag(Flag::PreconditionFailed)
        });
    }
    let prep = prepare(sys, (t0, t_max), opts)?;
    let data = &prep.data;
    let scale = sys.scale_on(&grid[..grid.len().min(500)]);
    let sup_tol = opts.sup_tol_rel * scale;

    let sup = |e: &CoeffExpr| -> f64 {
        grid.iter()
            .map(|&t| value(e, t).map_or(f64::INFINITY, f64::abs))
            .fold(0.0, f64::max)
    };
    let mut identity_zero = true;
    let mut closed_zero = true;
    for (k, (id, cf)) in data.abc.b.iter().zip(&data.abc_closed_form.b).enumerate() {
        let s_id = sup(id);
        let s_cf = sup(cf);
        identity_zero &= s_id <= sup_tol;
        closed_zero &= s_cf <= sup_tol;
        v = v
            .witness(Witness::SupNorm {
                label: format!("B{} (identity route)", k + 3),
                value: s_id,
                tol: sup_tol,
            })
            .witness(Witness::SupNorm {
                label: format!("B{} (closed form)", k + 3),
                value: s_cf,
                tol: sup_tol,
            });
    }
    if identity_zero != closed_zero {
        v = v
            .flag(Flag::RouteDisagreement)
            .caveat("the two B_k routes disagree on whether B_k vanishes");
        return Ok(apply_ratio_report(v, &prep.ratios));
    }
    if !identity_zero {
        v.status = Status::Fails;
        return Ok(apply_ratio_report(v, &prep.ratios));
    }

    let step = (horizons[0] - t0).min(1.0);
    let mut ladders = Vec::new();
    for (label, coeff, sign) in [
        ("a12 exp(-int A)", a12, -1.0),
        ("C exp(int A)", &data.abc.c, 1.0),
    ] {
        let mut inner = ExprIntegral::new(&data.abc.a, t0, step, &opts.quad);
        let mut slot = ErrorSlot::default();
        let r = divergence_probe(
            |t| {
                let w = slot.lift(t, inner.eval(t))?;
                Ok(value(coeff, t)? * (sign * w).exp())
            },
            t0,
            &horizons,
            opts.threshold,
            &opts.quad,
        );
        let ladder = slot.finish(r)?;
        ladders.push(ladder.verdict);
        v = v.witness(Witness::Ladder {
            label: label.into(),
            ladder,
        });
    }
    v.status = if ladders.iter().all(|l| *l == LadderVerdict::GrowingBeyondThreshold) {
        Status::Holds
    } else if ladders.contains(&LadderVerdict::Bounded) {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    Ok(apply_ratio_report(v, &prep.ratios))
}
