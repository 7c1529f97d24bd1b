//! Aggregate report: ratio validation, route diagnostic, every applicable
//! check and the empirical classifier, each in its own section so that one
//! failure does not abort the rest.

use oscillab_core::criteria::{
    default_bundle, empirical_classify, nonoscillation_check, oscillation_check,
    suboscillation_check,
};
use oscillab_core::integrate::uniform_grid;
use oscillab_core::reduction::{route_diagnostic, RouteDiagnostic};
use oscillab_core::riccati2d::planar_oscillation_check;
use oscillab_core::system::RatioOptions;
use oscillab_core::{
    ClassificationReport, LinearSystem, OdeOptions, RatioReport, ReducedData, System2D, SystemDoc,
    Verdict,
};
use serde::Serialize;

use crate::args::ReportArgs;
use crate::commands::{criteria_options, load, planar_options, window_or};
use crate::error::CliError;
use crate::output::emit_json;

/// Tolerance of the route comparison in the report.
const ROUTE_TOL: f64 = 1e-9;
const ROUTE_POINTS: usize = 200;

#[derive(Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Section<T> {
    Computed { result: T },
    Failed { error: String },
    Skipped { reason: String },
}

impl<T> Section<T> {
    fn from_result<E: std::fmt::Display>(r: Result<T, E>) -> Self {
        match r {
            Ok(result) => Section::Computed { result },
            Err(e) => Section::Failed { error: e.to_string() },
        }
    }

    fn skipped(reason: impl Into<String>) -> Self {
        Section::Skipped { reason: reason.into() }
    }

    fn result(&self) -> Option<&T> {
        match self {
            Section::Computed { result } => Some(result),
            _ => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckSection {
    pub check: &'static str,
    #[serde(flatten)]
    pub section: Section<Verdict>,
}

#[derive(Debug, Serialize)]
pub struct ReportParameters {
    pub window: (f64, f64),
    pub horizon: f64,
    pub min_zeros: usize,
    pub bundle: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub system: SystemDoc,
    pub parameters: ReportParameters,
    pub ratios: Section<RatioReport>,
    pub routes: Section<RouteDiagnostic>,
    pub checks: Vec<CheckSection>,
    pub classification: Section<ClassificationReport>,
    /// Nonoscillation evidence never coexists with (sub)oscillation evidence.
    pub consistent: bool,
    pub caveats: Vec<String>,
}

pub fn build_report(sys: &LinearSystem, args: &ReportArgs) -> Result<Report, CliError> {
    let t0 = sys.t0();
    let window = window_or(&args.window, (t0, t0 + 50.0))?;
    let opts = criteria_options()?;
    let mut caveats = Vec::new();
    let mut checks = Vec::new();

    let (ratios, routes) = if sys.n() >= 3 {
        let ratios = Section::from_result(sys.validate_ratios(
            window,
            opts.ratio_grid_points,
            &RatioOptions::default(),
        ));
        let routes = Section::from_result(ReducedData::new(sys).map(|data| {
            route_diagnostic(&data, &uniform_grid(window.0, window.1, ROUTE_POINTS), ROUTE_TOL)
        }));
        (ratios, routes)
    } else {
        let reason = "ratios a_1k / a_12 need n >= 3";
        (Section::skipped(reason), Section::skipped(reason))
    };

    if sys.n() >= 3 {
        match ratios.result() {
            Some(r) if r.well_defined() => {
                checks.push(CheckSection {
                    check: "suboscillation",
                    section: Section::from_result(suboscillation_check(sys, window, None, &opts)),
                });
                checks.push(CheckSection {
                    check: "oscillation",
                    section: Section::from_result(oscillation_check(sys, &opts)),
                });
            }
            _ => {
                let reason = "ratios a_1k / a_12 are not well defined on the window";
                caveats.push(format!("suboscillation and oscillation checks skipped: {reason}"));
                for check in ["suboscillation", "oscillation"] {
                    checks.push(CheckSection {
                        check,
                        section: Section::skipped(reason),
                    });
                }
            }
        }
    } else {
        let planar = planar_options()?;
        let section = match System2D::try_from(sys) {
            Ok(p) => {
                let ladder: Vec<f64> = opts.ladder.iter().map(|l| t0 + l).collect();
                Section::from_result(planar_oscillation_check(&p, &ladder, &planar))
            }
            Err(e) => Section::Failed { error: e.to_string() },
        };
        checks.push(CheckSection {
            check: "planar-oscillation",
            section,
        });
    }
    checks.push(CheckSection {
        check: "nonoscillation",
        section: Section::from_result(nonoscillation_check(sys, window, &[], &opts)),
    });

    let verdicts: Vec<Verdict> = checks
        .iter()
        .filter_map(|c| c.section.result().cloned())
        .collect();
    let bundle = default_bundle(sys.n(), args.seed, args.bundle.max(sys.n()));
    let classification = Section::from_result(
        empirical_classify(sys, &bundle, args.horizon, args.min_zeros, &OdeOptions::default())
            .map(|r| r.with_verdicts(verdicts)),
    );
    let consistent = classification.result().is_none_or(|r| r.consistent);

    Ok(Report {
        system: sys.to_doc(),
        parameters: ReportParameters {
            window,
            horizon: args.horizon,
            min_zeros: args.min_zeros,
            bundle: bundle.len(),
            seed: args.seed,
        },
        ratios,
        routes,
        checks,
        classification,
        consistent,
        caveats,
    })
}

pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    let sys = load(&args.input.input)?;
    let report = build_report(&sys, args)?;
    emit_json(&report, args.output.output.as_deref())
}
