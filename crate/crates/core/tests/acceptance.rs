//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;

use oscillab_core::corpus::{canonical3, cooperative_corpus, diagonal, random_expression, system_corpus};
use oscillab_core::criteria::{nonoscillation_check, oscillation_check, BOUND_SLACK};
use oscillab_core::integrate::{integrate_ode, quad, uniform_grid, Termination};
use oscillab_core::reduction::{
    compute_abc, compute_abc_via_tilde, escape_classify, reconstruct_phi, route_diagnostic,
    EscapeClass, RiccatiSystem,
};
use oscillab_core::riccati2d::{interval_oscillation_check, PlanarOptions, System2D};
use oscillab_core::{
    CoeffExpr, CriteriaOptions, Flag, LinearSystem, OdeOptions, QuadOptions, ReducedData, Status,
    Witness,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn tight() -> OdeOptions {
    OdeOptions::default().with_tolerances(1e-12, 1e-14).norm_relative()
}

fn canonical_oscillation() -> Outcome {
    let sys = canonical3();
    for abc in [compute_abc(&sys).map_err(err)?, compute_abc_via_tilde(&sys).map_err(err)?] {
        for t in uniform_grid(0.0, 10.0, 11) {
            let (a, b3, c) = (
                abc.a.eval(t).map_err(err)?,
                abc.b[0].eval(t).map_err(err)?,
                abc.c.eval(t).map_err(err)?,
            );
            ensure!(
                a.abs() <= 1e-12 && b3.abs() <= 1e-12 && (c - 2.0).abs() <= 1e-12,
                "(A, B3, C) = ({a}, {b3}, {c}) at t = {t}"
            );
        }
    }

    let v = oscillation_check(&sys, &CriteriaOptions::default()).map_err(err)?;
    ensure!(v.status == Status::Holds && v.evidence_only, "oscillation check: {:?}", v.status);
    let ladders: Vec<_> = v
        .witnesses
        .iter()
        .filter_map(|w| match w {
            Witness::Ladder { ladder, .. } => Some(ladder),
            _ => None,
        })
        .collect();
    ensure!(ladders.len() == 2, "expected two ladders, got {}", ladders.len());
    for (ladder, factor) in ladders.iter().zip([1.0, 2.0]) {
        for (x, h) in ladder.values.iter().zip(&ladder.horizons) {
            let expected = factor * (h - ladder.t0);
            ensure!((x - expected).abs() <= 1e-9 * expected, "ladder value {x}, expected {expected}");
        }
    }

    let traj = integrate_ode(sys.rhs(), &[1.0, 0.0, 0.0], (0.0, 60.0), &tight().with_events([0]))
        .map_err(err)?;
    let zeros = traj.zeros(0);
    ensure!(zeros.len() == 27, "{} sign changes of phi1, expected 27", zeros.len());
    let worst = zeros
        .iter()
        .enumerate()
        .map(|(k, z)| (z - (k as f64 * PI / SQRT_2 + PI / (2.0 * SQRT_2))).abs())
        .fold(0.0f64, f64::max);
    ensure!(worst <= 1e-6, "crossing error {worst:e}");
    Ok(format!("A=0, B3=0, C=2; ladders (T, 2T); 27 zeros, max crossing error {worst:.1e}"))
}

/// Longest zero-free stretch of `[0, t_end]` given sorted zeros.
fn max_gap(zeros: &[f64], t_end: f64) -> f64 {
    let mut prev = 0.0;
    let mut gap = 0.0f64;
    for &z in zeros.iter().chain(std::iter::once(&t_end)) {
        gap = gap.max(z - prev);
        prev = z;
    }
    gap
}

fn pi_threshold() -> Outcome {
    let sys = System2D::parse(0.0, "0", "1", "-1", "0").map_err(err)?;
    let opts = PlanarOptions::default();
    let short = interval_oscillation_check(&sys, 0.0, 3.0, &opts).map_err(err)?;
    let exact = interval_oscillation_check(&sys, 0.0, PI, &opts).map_err(err)?;
    ensure!(short.status == Status::Fails, "[0, 3] gave {:?}", short.status);
    ensure!(exact.status == Status::Holds, "[0, pi] gave {:?}", exact.status);

    let linear = sys.to_system();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let t_end = 30.0;
    let mut widest_short_window = false;
    for _ in 0..10 {
        let theta: f64 = rng.gen_range(0.0..2.0 * PI);
        let traj = integrate_ode(
            linear.rhs(),
            &[theta.cos(), theta.sin()],
            (0.0, t_end),
            &tight().with_events([0]),
        )
        .map_err(err)?;
        let gap = max_gap(traj.zeros(0), t_end);
        ensure!(gap <= PI + 0.01, "zero-free stretch of length {gap} from angle {theta}");
        widest_short_window |= gap >= PI - 0.1;
    }
    ensure!(widest_short_window, "no init had a zero-free window of length pi - 0.1");
    Ok("Fails on [0, 3], Holds on [0, pi]; 10 inits confirm the threshold".into())
}

fn connection_formulas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let quad_opts = QuadOptions::default().with_tol(1e-13);
    let mut compared = 0usize;
    let mut escaped = 0usize;
    let mut worst = 0.0f64;
    for (i, sys) in system_corpus(2024, 50).iter().enumerate() {
        let n = sys.n();
        let mut init = vec![1.0];
        init.extend((1..n).map(|_| rng.gen_range(-1.0..1.0)));
        let direct = integrate_ode(sys.rhs(), &init, (0.0, 5.0), &tight()).map_err(err)?;
        let rs = RiccatiSystem::new(sys).map_err(err)?;
        let riccati = integrate_ode(rs.rhs(), &init[1..], (0.0, 5.0), &tight()).map_err(err)?;
        if riccati.termination() != Termination::Completed {
            escaped += 1;
        }
        let phi = reconstruct_phi(sys, &riccati, 1.0, &quad_opts).map_err(err)?;
        for (t, p) in phi.times().iter().zip(phi.states()) {
            let d = direct.eval(*t).ok_or_else(|| format!("system {i}: no direct value at {t}"))?;
            if d[0].abs() < 1e-3 {
                continue;
            }
            let norm = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let diff = d.iter().zip(p).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            worst = worst.max(diff / norm);
            compared += 1;
        }
    }
    ensure!(worst <= 1e-6, "max relative error {worst:e}");
    Ok(format!(
        "50 systems, {compared} points, max relative error {worst:.1e}, {escaped} Riccati escapes"
    ))
}

fn dual_routes() -> Outcome {
    let grid = uniform_grid(0.0, 5.0, 200);
    let mut fired = 0usize;
    for (i, sys) in system_corpus(2024, 50).iter().enumerate() {
        let data = ReducedData::new(sys).map_err(err)?;
        let diag = route_diagnostic(&data, &grid, 1e-9);
        ensure!(
            diag.agrees_on("A") && diag.agrees_on("C"),
            "system {i}: A or C routes disagree: {:?}",
            diag.comparisons
        );
        if diag.fired {
            fired += 1;
        } else {
            ensure!(diag.b_routes_agree(), "system {i}: B routes disagree without the diagnostic");
        }
    }
    Ok(format!(
        "A and C agree on 50/50; B agrees on {}/50; closed-form B diagnostic fired on {fired}/50",
        50 - fired
    ))
}

fn min_slacks(v: &oscillab_core::Verdict) -> Vec<f64> {
    v.witnesses
        .iter()
        .filter_map(|w| match w {
            Witness::Bound { min_slack, .. } => Some(*min_slack),
            _ => None,
        })
        .collect()
}

fn nonoscillation_bound() -> Outcome {
    let opts = CriteriaOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut worst = f64::INFINITY;
    for (i, sys) in cooperative_corpus(77, 50).iter().enumerate() {
        let inits: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..sys.n()).map(|_| rng.gen_range(0.1..2.0)).collect())
            .collect();
        let v = nonoscillation_check(sys, (0.0, 10.0), &inits, &opts).map_err(err)?;
        ensure!(v.status == Status::Holds, "system {i}: {:?} {:?}", v.status, v.caveats);
        for s in min_slacks(&v) {
            worst = worst.min(s);
        }
    }
    ensure!(worst >= -BOUND_SLACK, "min slack {worst:e}");

    let diagonals = [
        diagonal(-1.0, 3),
        diagonal(0.1, 4),
        LinearSystem::from_strings(
            0.0,
            &[vec!["sin(t)", "0", "0"], vec!["0", "-0.5", "0"], vec!["0", "0", "cos(2*t) - t/10"]],
        )
        .map_err(err)?,
    ];
    let mut equality = 0.0f64;
    for sys in &diagonals {
        let v = nonoscillation_check(sys, (0.0, 10.0), &[vec![1.5; sys.n()]], &opts).map_err(err)?;
        for s in min_slacks(&v) {
            equality = equality.max(s.abs());
        }
    }
    ensure!(equality <= 1e-10, "diagonal slack {equality:e}");
    Ok(format!("cooperative min slack {worst:.1e}; diagonal |slack| <= {equality:.1e}"))
}

fn stability_conditions() -> Outcome {
    let opts = CriteriaOptions::default();
    let stable = nonoscillation_check(&diagonal(-1.0, 3), (0.0, 10.0), &[], &opts).map_err(err)?;
    ensure!(
        !stable.has_flag(Flag::NotLyapunovStable) && !stable.has_flag(Flag::NotAsymptoticallyStable),
        "diag(-1) flags: {:?}",
        stable.flags
    );
    let growing = diagonal(0.1, 3);
    let unstable = nonoscillation_check(&growing, (0.0, 10.0), &[], &opts).map_err(err)?;
    ensure!(unstable.has_flag(Flag::NotLyapunovStable), "diag(0.1) flags: {:?}", unstable.flags);

    let t_end = 100.0 * 10f64.ln() / 0.1;
    let traj = integrate_ode(growing.rhs(), &[1.0, 1.0, 1.0], (0.0, t_end), &tight()).map_err(err)?;
    let crossing = traj
        .times()
        .iter()
        .zip(traj.states())
        .find(|(_, y)| y[0] > 1e3)
        .map(|(t, _)| *t);
    ensure!(crossing.is_some(), "phi1 stayed below 1e3 up to t = {t_end}");
    Ok(format!(
        "diag(-1) passes both; diag(0.1) not Lyapunov stable, phi1 > 1e3 from t = {:.2}",
        crossing.unwrap()
    ))
}

fn escape_duality() -> Outcome {
    let sys = canonical3();
    let rs = RiccatiSystem::new(&sys).map_err(err)?;
    let y = integrate_ode(rs.rhs(), &[0.0, 0.0], (0.0, 5.0), &OdeOptions::default()).map_err(err)?;
    let report = escape_classify(&sys, &y, &QuadOptions::default()).map_err(err)?;
    let EscapeClass::Escaped { t_star } = report.class else {
        return Err(format!("no escape: {:?}", report.class));
    };
    let first_zero = PI / (2.0 * SQRT_2);
    ensure!((t_star - first_zero).abs() <= 1e-6, "t* = {t_star}, first zero {first_zero}");
    let trend = report.f_trend.ok_or("no F trend")?;
    ensure!(trend.decreasing && trend.unbounded_below, "F trend {trend:?}");
    ensure!(report.consistent, "escape report inconsistent");
    Ok(format!(
        "t* = {t_star:.9}, |t* - pi/(2 sqrt 2)| = {:.1e}; F decreasing, log slope {:.3}",
        (t_star - first_zero).abs(),
        trend.log_slope
    ))
}

fn numerics_floor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-5;
    let mut worst_diff = 0.0f64;
    for _ in 0..200 {
        let e = random_expression(&mut rng, 4);
        let d = e.differentiate();
        for t in uniform_grid(0.0, 10.0, 50) {
            let fd = (e.eval(t + h).map_err(err)? - e.eval(t - h).map_err(err)?) / (2.0 * h);
            let diff = (d.eval(t).map_err(err)? - fd).abs();
            ensure!(diff <= 1e-6, "d/dt {e} at {t}: {diff:e}");
            worst_diff = worst_diff.max(diff);
        }
    }

    let osc = LinearSystem::from_strings(0.0, &[vec!["0", "1"], vec!["-1", "0"]]).map_err(err)?;
    let traj = integrate_ode(osc.rhs(), &[1.0, 0.0], (0.0, 2.0 * PI), &tight()).map_err(err)?;
    let mut worst_cos = 0.0f64;
    for t in uniform_grid(0.0, 2.0 * PI, 1000) {
        let y = traj.eval_component(t, 0).ok_or("cos trajectory too short")?;
        worst_cos = worst_cos.max((y - t.cos()).abs());
    }
    ensure!(worst_cos <= 1e-8, "cos error {worst_cos:e}");

    let cases: [(&str, f64, f64, f64); 20] = [
        ("1", 0.0, 1.0, 1.0),
        ("t", 0.0, 2.0, 2.0),
        ("t^2", 0.0, 3.0, 9.0),
        ("t^3 - 2*t", -1.0, 2.0, 0.75),
        ("sin(t)", 0.0, PI, 2.0),
        ("cos(t)", 0.0, PI / 2.0, 1.0),
        ("exp(t)", 0.0, 1.0, std::f64::consts::E - 1.0),
        ("exp(-t)", 0.0, 10.0, 1.0 - (-10f64).exp()),
        ("1/t", 1.0, std::f64::consts::E, 1.0),
        ("log(t)", 1.0, std::f64::consts::E, 1.0),
        ("sqrt(t)", 0.0, 4.0, 16.0 / 3.0),
        ("abs(t)", -1.0, 2.0, 2.5),
        ("1/(1 + t^2)", 0.0, 1.0, PI / 4.0),
        ("sin(t)^2", 0.0, PI, PI / 2.0),
        ("t*exp(t)", 0.0, 1.0, 1.0),
        ("t*sin(t)", 0.0, PI, PI),
        ("cos(3*t)", 0.0, PI / 6.0, 1.0 / 3.0),
        ("exp(2*t)", 0.0, 0.5, (1f64.exp() - 1.0) / 2.0),
        ("1/sqrt(t)", 1.0, 4.0, 2.0),
        ("sin(t)*cos(t)", 0.0, PI / 2.0, 0.5),
    ];
    let qopts = QuadOptions::default().with_tol(1e-10);
    let mut worst_quad = 0.0f64;
    for (src, a, b, exact) in cases {
        let e = CoeffExpr::parse(src).map_err(err)?;
        let r = quad(|t| e.eval(t), a, b, &qopts).map_err(err)?;
        let diff = (r.value - exact).abs();
        let tol = qopts.tol * exact.abs().max(1.0);
        ensure!(diff <= tol, "integral of {src} on [{a}, {b}]: off by {diff:e} > {tol:e}");
        worst_quad = worst_quad.max(diff);
    }
    Ok(format!(
        "derivative vs FD {worst_diff:.1e}; cos error {worst_cos:.1e}; 20 integrals within {worst_quad:.1e}"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("canonical oscillation end-to-end", canonical_oscillation),
        ("pi-threshold sharpness of the planar interval check", pi_threshold),
        ("connection-formula consistency", connection_formulas),
        ("dual-route A/B/C agreement", dual_routes),
        ("nonoscillation lower bound", nonoscillation_bound),
        ("stability necessary conditions", stability_conditions),
        ("Riccati escape and zero duality", escape_duality),
        ("numerics floor", numerics_floor),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("PASS {} {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {} {name}: panicked", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
