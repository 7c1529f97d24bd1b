use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use oscillab_core::criteria::{
    default_bundle, empirical_classify, nonoscillation_check, oscillation_check,
    suboscillation_check,
};
use oscillab_core::integrate::{integrate_ode, uniform_grid};
use oscillab_core::riccati2d::{
    comparison_probe, interval_oscillation_check, planar_oscillation_check,
};
use oscillab_core::{
    CriteriaOptions, LinearSystem, OdeOptions, PlanarOptions, QuadOptions, ReducedData,
    RiccatiTriple, System2D, Verdict,
};
use serde::Serialize;
use serde_json::json;

use crate::args::{CheckArgs, CheckName, ClassifyArgs, ReduceArgs, SimulateArgs};
use crate::error::CliError;
use crate::output::{csv_line, emit_json};

/// Environment variable capping quadrature subdivisions.
pub const MAX_SUBDIV_VAR: &str = "OSCILLAB_MAX_SUBDIV";

pub fn quad_options(tol: Option<f64>, default: QuadOptions) -> Result<QuadOptions, CliError> {
    let mut q = default;
    if let Some(tol) = tol {
        q.tol = tol;
    }
    if let Ok(v) = std::env::var(MAX_SUBDIV_VAR) {
        q.max_subdivisions = v
            .parse()
            .map_err(|_| CliError::usage(format!("{MAX_SUBDIV_VAR} must be a positive integer, got {v:?}")))?;
    }
    Ok(q)
}

pub fn criteria_options() -> Result<CriteriaOptions, CliError> {
    let d = CriteriaOptions::default();
    Ok(CriteriaOptions {
        quad: quad_options(None, d.quad.clone())?,
        ..d
    })
}

pub fn planar_options() -> Result<PlanarOptions, CliError> {
    let d = PlanarOptions::default();
    Ok(PlanarOptions {
        quad: quad_options(None, d.quad.clone())?,
        ..d
    })
}

pub fn load(path: &Path) -> Result<LinearSystem, CliError> {
    Ok(LinearSystem::load(path)?)
}

pub fn window_or(values: &[f64], default: (f64, f64)) -> Result<(f64, f64), CliError> {
    match values {
        [] => Ok(default),
        [a, b] if b > a => Ok((*a, *b)),
        _ => Err(CliError::usage(format!("window must be `a,b` with a < b, got {values:?}"))),
    }
}

pub fn reduce(args: &ReduceArgs) -> Result<(), CliError> {
    let sys = load(&args.input.input)?;
    let data = ReducedData::new(&sys)?;
    let a = args.t_start.unwrap_or(sys.t0());
    let b = args.t_end.unwrap_or(a + 10.0);
    if !(b > a) || args.points < 2 {
        return Err(CliError::usage(format!("empty grid [{a}, {b}] with {} points", args.points)));
    }
    let n = sys.n();
    let mut out = String::new();
    let mut header = vec!["t".to_string(), "A".into()];
    header.extend((3..=n).map(|k| format!("B{k}")));
    header.push("C".into());
    header.extend((3..=n).map(|k| format!("nu{k}")));
    out.push_str(&header.join(","));
    out.push('\n');
    for t in uniform_grid(a, b, args.points) {
        let mut row = vec![t];
        let mut push = |e: &oscillab_core::CoeffExpr| -> Result<(), CliError> {
            let v = e
                .eval_or_limit(t, oscillab_core::integrate::LIMIT_STEP)
                .map_err(|err| CliError::Numeric(err.to_string()))?;
            row.push(v);
            Ok(())
        };
        push(&data.abc.a)?;
        for bk in &data.abc.b {
            push(bk)?;
        }
        push(&data.abc.c)?;
        for nu in &data.nu {
            push(nu)?;
        }
        out.push_str(&csv_line(&row));
    }
    write_text(args.output.output.as_deref(), &out)
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    trajectory: String,
    zeros: String,
    rows: usize,
    t_end: f64,
    termination: oscillab_core::integrate::Termination,
    zero_counts: Vec<ZeroCount>,
    init: &'a [f64],
}

#[derive(Serialize)]
struct ZeroCount {
    /// 1-based.
    component: usize,
    count: usize,
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let sys = load(&args.input.input)?;
    let n = sys.n();
    if args.init.len() != n {
        return Err(CliError::usage(format!("--init needs {n} values, got {}", args.init.len())));
    }
    let t0 = sys.t0();
    if !(args.t_end > t0) {
        return Err(CliError::usage(format!("--t-end must exceed t0 = {t0}")));
    }
    let events: Vec<usize> = if args.events.is_empty() {
        (1..=n).collect()
    } else {
        args.events.clone()
    };
    if let Some(bad) = events.iter().find(|&&c| c == 0 || c > n) {
        return Err(CliError::usage(format!("event component {bad} outside 1..={n}")));
    }
    let opts = OdeOptions::default()
        .with_tolerances(args.tol.rel_tol, args.tol.abs_tol)
        .norm_relative()
        .with_events(events.iter().map(|c| c - 1));
    let traj = integrate_ode(sys.rhs(), &args.init, (t0, args.t_end), &opts)?;

    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|k| format!("y{k}")));
    let mut csv = header.join(",") + "\n";
    let mut rows = 0;
    match args.samples {
        Some(m) if m >= 2 => {
            for t in uniform_grid(t0, traj.t_end(), m) {
                let mut row = vec![t];
                row.extend(traj.eval(t).expect("sample inside the trajectory"));
                csv.push_str(&csv_line(&row));
                rows += 1;
            }
        }
        Some(m) => return Err(CliError::usage(format!("--samples must be at least 2, got {m}"))),
        None => {
            for (t, y) in traj.times().iter().zip(traj.states()) {
                let mut row = vec![*t];
                row.extend(y);
                csv.push_str(&csv_line(&row));
                rows += 1;
            }
        }
    }
    let zeros_path = args.zeros.clone().unwrap_or_else(|| sibling(&args.output, "zeros.csv"));
    let mut zcsv = String::from("component,t\n");
    let mut zero_counts = Vec::new();
    for &c in &events {
        let zs = traj.zeros(c - 1);
        zero_counts.push(ZeroCount {
            component: c,
            count: zs.len(),
        });
        for z in zs {
            zcsv.push_str(&format!("{c},{}\n", crate::output::fmt_f64(*z)));
        }
    }
    write_text(Some(&args.output), &csv)?;
    write_text(Some(&zeros_path), &zcsv)?;
    let summary = SimulationSummary {
        trajectory: args.output.display().to_string(),
        zeros: zeros_path.display().to_string(),
        rows,
        t_end: traj.t_end(),
        termination: traj.termination(),
        zero_counts,
        init: &args.init,
    };
    emit_json(&summary, None)
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir.join(name),
        _ => PathBuf::from(name),
    }
}

fn parse_vector(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::usage(format!("bad number {x:?} in {s:?}"))))
        .collect()
}

fn triple(parts: &[String], flag: &str) -> Result<RiccatiTriple, CliError> {
    match parts {
        [f, g, h] => RiccatiTriple::parse(f, g, h).map_err(|e| CliError::usage(format!("--{flag}: {e}"))),
        _ => Err(CliError::usage(format!("--{flag} needs three expressions `f,g,h`"))),
    }
}

pub fn run_check(args: &CheckArgs) -> Result<Verdict, CliError> {
    let mut opts = criteria_options()?;
    if !args.ladder.is_empty() {
        opts.ladder = args.ladder.clone();
    }
    if let Some(x) = args.threshold {
        opts.threshold = x;
    }
    if let Some(x) = args.sup_tol {
        opts.sup_tol_rel = x;
    }
    if let Some(x) = args.grid_step {
        opts.grid_step = x;
    }
    opts.quad = quad_options(args.quad_tol, opts.quad)?;
    let mut planar = planar_options()?;
    planar.quad = quad_options(args.quad_tol, planar.quad)?;
    if let Some(x) = args.threshold {
        planar.threshold = x;
    }

    if args.check == CheckName::Comparison {
        let first = triple(&args.first, "first")?;
        let second = triple(&args.second, "second")?;
        let y2 = args.y2_init.ok_or_else(|| CliError::usage("--y2-init is required"))?;
        let gamma0 = args.gamma0.unwrap_or(y2);
        let window = window_or(&args.window, (0.0, 10.0))?;
        return Ok(comparison_probe(&first, &second, y2, gamma0, window, &planar)?);
    }

    let path = args
        .input
        .as_deref()
        .ok_or_else(|| CliError::usage("--input is required for this check"))?;
    let sys = load(path)?;
    let t0 = sys.t0();
    let window = window_or(&args.window, (t0, t0 + 50.0))?;
    let verdict = match args.check {
        CheckName::Suboscillation => {
            let starts = (!args.starts.is_empty()).then_some(args.starts.as_slice());
            suboscillation_check(&sys, window, starts, &opts)?
        }
        CheckName::Oscillation => oscillation_check(&sys, &opts)?,
        CheckName::Nonoscillation => {
            let inits = args.inits.iter().map(|s| parse_vector(s)).collect::<Result<Vec<_>, _>>()?;
            nonoscillation_check(&sys, window, &inits, &opts)?
        }
        CheckName::PlanarOscillation => {
            let planar_sys = System2D::try_from(&sys)?;
            let ladder: Vec<f64> = opts.ladder.iter().map(|l| t0 + l).collect();
            planar_oscillation_check(&planar_sys, &ladder, &planar)?
        }
        CheckName::PlanarInterval => {
            let planar_sys = System2D::try_from(&sys)?;
            let (a, b) = match args.interval.as_slice() {
                [a, b] => (*a, *b),
                _ => return Err(CliError::usage("--interval A B is required")),
            };
            interval_oscillation_check(&planar_sys, a, b, &planar)?
        }
        CheckName::Comparison => unreachable!("handled above"),
    };
    Ok(verdict)
}

pub fn check(args: &CheckArgs) -> Result<(), CliError> {
    let verdict = run_check(args)?;
    emit_json(&verdict, args.output.output.as_deref())
}

pub fn classify(args: &ClassifyArgs) -> Result<(), CliError> {
    let sys = load(&args.input.input)?;
    let bundle = default_bundle(sys.n(), args.seed, args.bundle.max(sys.n()));
    let report = empirical_classify(&sys, &bundle, args.horizon, args.min_zeros, &OdeOptions::default())?;
    let doc = json!({ "seed": args.seed, "classification": report });
    emit_json(&doc, args.output.output.as_deref())
}
