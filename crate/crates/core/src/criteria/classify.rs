//! Empirical classification by simulating a bundle of solutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::integrate::{integrate_ode, OdeOptions, Trajectory};
use crate::system::LinearSystem;

use super::{CriteriaError, Flag, Status, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EvidenceLabel {
    OscillatoryEvidence,
    SuboscillatoryEvidence,
    NonoscillatoryEvidence,
    Mixed,
}

/// Zero statistics of one simulated solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionEvidence {
    pub init: Vec<f64>,
    /// Sign changes per component over the whole horizon.
    pub zero_counts: Vec<usize>,
    pub last_zero: Vec<Option<f64>>,
    /// Enough sign changes, the last in the final tenth of the horizon, or
    /// identically zero on the final half.
    pub oscillating: Vec<bool>,
    /// No sign change and bounded away from zero on the final half.
    pub nonvanishing: Vec<bool>,
}

impl SolutionEvidence {
    pub fn first_oscillates(&self) -> bool {
        self.oscillating[0]
    }

    /// Some component among `1, 3, …, n` oscillates.
    pub fn sub_oscillates(&self) -> bool {
        self.oscillating
            .iter()
            .enumerate()
            .any(|(k, &o)| k != 1 && o)
    }

    pub fn all_nonvanishing(&self) -> bool {
        self.nonvanishing.iter().all(|&x| x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    /// Label under the all-components reading of nonoscillation.
    pub label: EvidenceLabel,
    /// Whether some solution has a nonvanishing first component on the final
    /// half, the weaker reading of nonoscillation.
    pub first_component_nonoscillatory: bool,
    pub horizon: f64,
    pub min_zeros: usize,
    pub solutions: Vec<SolutionEvidence>,
    pub verdicts: Vec<Verdict>,
    /// Nonoscillation is never reported together with (sub)oscillation.
    pub consistent: bool,
    pub caveats: Vec<String>,
}

impl ClassificationReport {
    /// Attaches criterion verdicts and rechecks consistency against them.
    pub fn with_verdicts(mut self, verdicts: Vec<Verdict>) -> Self {
        self.verdicts = verdicts;
        self.consistent = self.check_consistency();
        self
    }

    fn check_consistency(&self) -> bool {
        let nonosc_verdict = self
            .verdicts
            .iter()
            .any(|v| v.status == Status::Holds && v.has_flag(Flag::NonoscillatoryEvidence));
        let osc_verdict = self.verdicts.iter().any(|v| {
            v.status == Status::Holds
                && matches!(
                    v.check,
                    super::CheckKind::Oscillation | super::CheckKind::Suboscillation
                )
        });
        let osc_label = matches!(
            self.label,
            EvidenceLabel::OscillatoryEvidence | EvidenceLabel::SuboscillatoryEvidence
        );
        let label_ok = !(self.label == EvidenceLabel::NonoscillatoryEvidence
            && self.solutions.iter().all(SolutionEvidence::sub_oscillates));
        label_ok
            && !(nonosc_verdict && (osc_label || osc_verdict))
            && !(self.label == EvidenceLabel::NonoscillatoryEvidence && osc_verdict)
    }
}

/// Canonical basis followed by seeded uniform `[-1, 1]` vectors, `total`
/// vectors in all (at least `n`).
pub fn default_bundle(n: usize, seed: u64, total: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    while out.len() < total {
        out.push((0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect());
    }
    out
}

/// Relative size below which a component counts as identically zero.
const ZERO_REL: f64 = 1e-12;
/// Relative size a nonvanishing component must keep.
const NONVANISHING_REL: f64 = 1e-6;

fn solution_evidence(
    traj: &Trajectory,
    init: &[f64],
    t0: f64,
    horizon: f64,
    min_zeros: usize,
) -> SolutionEvidence {
    let n = init.len();
    let t_end = t0 + horizon;
    let half = t0 + 0.5 * horizon;
    let late = t0 + 0.9 * horizon;
    let tail: Vec<(f64, &Vec<f64>)> = traj
        .times()
        .iter()
        .zip(traj.states())
        .filter(|(t, _)| **t >= half)
        .map(|(t, y)| (*t, y))
        .collect();
    let norm = |y: &[f64]| y.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut ev = SolutionEvidence {
        init: init.to_vec(),
        zero_counts: Vec::with_capacity(n),
        last_zero: Vec::with_capacity(n),
        oscillating: Vec::with_capacity(n),
        nonvanishing: Vec::with_capacity(n),
    };
    for k in 0..n {
        let zeros = traj.zeros(k);
        let last = zeros.last().copied();
        let vanishes = tail.iter().all(|(_, y)| y[k].abs() <= ZERO_REL * norm(y));
        let oscillating =
            vanishes || (zeros.len() >= min_zeros && last.is_some_and(|z| z >= late && z <= t_end));
        let nonvanishing = !zeros.iter().any(|&z| z >= half)
            && tail
                .iter()
                .all(|(_, y)| y[k].abs() >= NONVANISHING_REL * norm(y) && norm(y) > 0.0);
        ev.zero_counts.push(zeros.len());
        ev.last_zero.push(last);
        ev.oscillating.push(oscillating);
        ev.nonvanishing.push(nonvanishing);
    }
    ev
}

/// Simulates every initial vector to `t0 + horizon` and labels the system.
pub fn empirical_classify(
    sys: &LinearSystem,
    bundle: &[Vec<f64>],
    horizon: f64,
    min_zeros: usize,
    ode: &OdeOptions,
) -> Result<ClassificationReport, CriteriaError> {
    let n = sys.n();
    if bundle.len() < 8 {
        return Err(CriteriaError::Precondition(format!(
            "the initial bundle needs at least 8 vectors, got {}",
            bundle.len()
        )));
    }
    if let Some(bad) = bundle.iter().find(|v| v.len() != n) {
        return Err(CriteriaError::Precondition(format!(
            "initial vector {bad:?} does not have {n} components"
        )));
    }
    if !(horizon > 0.0) {
        return Err(CriteriaError::Precondition(format!("horizon must be positive, got {horizon}")));
    }
    let t0 = sys.t0();
    let opts = OdeOptions {
        events: (0..n).collect(),
        norm_relative_abs_tol: true,
        ..ode.clone()
    };
    let mut solutions = Vec::with_capacity(bundle.len());
    for init in bundle {
        let traj = integrate_ode(sys.rhs(), init, (t0, t0 + horizon), &opts)?;
        solutions.push(solution_evidence(&traj, init, t0, horizon, min_zeros));
    }

    let label = if solutions.iter().any(SolutionEvidence::all_nonvanishing) {
        EvidenceLabel::NonoscillatoryEvidence
    } else if solutions.iter().all(SolutionEvidence::first_oscillates) {
        EvidenceLabel::OscillatoryEvidence
    } else if solutions.iter().all(SolutionEvidence::sub_oscillates) {
        EvidenceLabel::SuboscillatoryEvidence
    } else {
        EvidenceLabel::Mixed
    };
    let first_component_nonoscillatory = solutions.iter().any(|s| s.nonvanishing[0]);
    let report = ClassificationReport {
        label,
        first_component_nonoscillatory,
        horizon,
        min_zeros,
        solutions,
        verdicts: Vec::new(),
        consistent: true,
        caveats: vec![
            "labels are evidence over a finite horizon, not proof".into(),
            "nonoscillation requires all components nonvanishing; the first-component reading is reported separately".into(),
        ],
    };
    let consistent = report.check_consistency();
    Ok(ClassificationReport { consistent, ..report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{nonoscillation_check, CriteriaOptions};

    fn sys(rows: &[&[&str]]) -> LinearSystem {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        LinearSystem::from_strings(0.0, &rows).unwrap()
    }

    fn classify(s: &LinearSystem, horizon: f64) -> ClassificationReport {
        let bundle = default_bundle(s.n(), 7, 8);
        empirical_classify(s, &bundle, horizon, 5, &OdeOptions::default()).unwrap()
    }

    #[test]
    fn canonical_is_oscillatory() {
        let s = sys(&[&["0", "1", "1"], &["-1", "0", "0"], &["-1", "0", "0"]]);
        let r = classify(&s, 60.0);
        assert_eq!(r.label, EvidenceLabel::OscillatoryEvidence);
        // φ1 = cos(√2 t) from the first basis vector.
        assert_eq!(r.solutions[0].zero_counts[0], 27);
        for sol in &r.solutions {
            assert!((26..=28).contains(&sol.zero_counts[0]) || sol.oscillating[0]);
        }
        assert!(r.consistent);
    }

    #[test]
    fn decaying_diagonal_is_nonoscillatory() {
        let s = sys(&[&["-1", "0", "0"], &["0", "-1", "0"], &["0", "0", "-1"]]);
        let bundle: Vec<Vec<f64>> = (0..8).map(|i| vec![1.0 + i as f64, 0.5, 2.0]).collect();
        let r = empirical_classify(&s, &bundle, 100.0, 5, &OdeOptions::default()).unwrap();
        assert_eq!(r.label, EvidenceLabel::NonoscillatoryEvidence);
        assert!(r.first_component_nonoscillatory);
        let v = nonoscillation_check(&s, (0.0, 10.0), &[], &CriteriaOptions::default()).unwrap();
        assert!(r.with_verdicts(vec![v]).consistent);
    }

    #[test]
    fn rotation_away_from_first_component_is_suboscillatory() {
        // φ1 decays without sign change; (φ2, φ3) rotate.
        let s = sys(&[&["-1", "0", "0"], &["0", "0", "1"], &["0", "-1", "0"]]);
        let r = classify(&s, 100.0);
        assert_eq!(r.label, EvidenceLabel::SuboscillatoryEvidence);
        assert!(r.first_component_nonoscillatory);
    }

    #[test]
    fn bundle_is_seeded() {
        assert_eq!(default_bundle(4, 3, 10), default_bundle(4, 3, 10));
        assert_ne!(default_bundle(4, 3, 10), default_bundle(4, 4, 10));
        assert_eq!(default_bundle(4, 3, 10)[2], vec![0.0, 0.0, 1.0, 0.0]);
        assert!(empirical_classify(
            &sys(&[&["0", "1"], &["-1", "0"]]),
            &default_bundle(2, 0, 4),
            10.0,
            5,
            &OdeOptions::default()
        )
        .is_err());
    }
}
