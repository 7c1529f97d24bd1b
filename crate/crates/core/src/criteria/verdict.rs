use std::collections::BTreeMap;

use serde::Serialize;

use crate::integrate::{DivergenceLadder, LadderVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

/// Which decision procedure produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Sign patterns of `B_k` plus the `π` integral on witness intervals.
    Suboscillation,
    /// `B_k ≡ 0` plus divergence of both weighted integrals.
    Oscillation,
    /// Nonnegative off-diagonals, the exponential lower bound and the
    /// stability necessary conditions.
    Nonoscillation,
    /// Planar system: divergence of both weighted integrals.
    PlanarOscillation,
    /// Planar system: the weighted integral over `[a, b]` reaches `π`.
    PlanarInterval,
    /// Comparison of two scalar Riccati equations.
    Comparison,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    NonoscillatoryEvidence,
    NotLyapunovStable,
    NotAsymptoticallyStable,
    /// The closed-form and identity routes for `B_k` disagree.
    RouteDisagreement,
    RatioSuspect,
    PreconditionFailed,
    HypothesisVerified,
    HypothesisNotVerified,
    ConclusionHolds,
    ConclusionFails,
    /// Unsubscripted comparison coefficients read as those of the second equation.
    InterpretedCoefficients,
}

/// Numerical data supporting or refuting a verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Interval where the sign conditions hold, with the weighted integral over it.
    Interval {
        t1: f64,
        t2: f64,
        integral: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        sigma: Option<Vec<u8>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        start: Option<f64>,
    },
    /// A start point and sign pattern for which no admissible interval exists.
    NoInterval {
        start: f64,
        t_hi: f64,
        sigma: Vec<u8>,
        reason: String,
    },
    Integral {
        label: String,
        a: f64,
        b: f64,
        value: f64,
        error: f64,
        target: f64,
    },
    Ladder {
        label: String,
        #[serde(flatten)]
        ladder: DivergenceLadder,
    },
    SignViolation {
        label: String,
        t: f64,
        value: f64,
    },
    SignCheck {
        label: String,
        a: f64,
        b: f64,
        grid_points: usize,
        min_value: f64,
    },
    SupNorm {
        label: String,
        value: f64,
        tol: f64,
    },
    Bound {
        /// 1-based component.
        component: usize,
        init: Vec<f64>,
        /// Smallest `φ_k(t) − lower bound(t)` on the grid.
        min_slack: f64,
        at: f64,
        tol: f64,
    },
    Existence {
        label: String,
        t_start: f64,
        t_end: f64,
        global: bool,
    },
    Simulation {
        label: String,
        t: f64,
        value: f64,
    },
}

impl Witness {
    /// Whether this witness on its own refutes the checked condition.
    pub fn falsifies(&self) -> bool {
        match self {
            Witness::NoInterval { .. } | Witness::SignViolation { .. } => true,
            Witness::Integral { value, error, target, .. } => value + error < *target,
            Witness::Ladder { ladder, .. } => ladder.verdict == LadderVerdict::Bounded,
            Witness::SupNorm { value, tol, .. } => value > tol,
            Witness::Bound { min_slack, tol, .. } => *min_slack < -tol,
            Witness::Existence { global, .. } => !global,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub check: CheckKind,
    pub status: Status,
    /// True when an infinite-horizon or universal condition was sampled on
    /// a finite ladder, so `Holds` is evidence rather than a certificate.
    pub evidence_only: bool,
    pub witnesses: Vec<Witness>,
    pub caveats: Vec<String>,
    pub flags: Vec<Flag>,
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl Verdict {
    pub fn new(check: CheckKind, status: Status) -> Self {
        Verdict {
            check,
            status,
            evidence_only: false,
            witnesses: Vec::new(),
            caveats: Vec::new(),
            flags: Vec::new(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn evidence(mut self) -> Self {
        self.evidence_only = true;
        self
    }

    pub fn witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn caveat(mut self, c: impl Into<String>) -> Self {
        self.caveats.push(c.into());
        self
    }

    pub fn flag(mut self, f: Flag) -> Self {
        if !self.flags.contains(&f) {
            self.flags.push(f);
            self.flags.sort();
        }
        self
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("parameter serializes");
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn has_flag(&self, f: Flag) -> bool {
        self.flags.contains(&f)
    }

    /// `Holds` must carry a witness and `Fails` a falsifying one.
    pub fn is_well_formed(&self) -> bool {
        match self.status {
            Status::Holds => !self.witnesses.is_empty(),
            Status::Fails => self.witnesses.iter().any(Witness::falsifies),
            Status::Inconclusive => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formedness() {
        let v = Verdict::new(CheckKind::Oscillation, Status::Holds);
        assert!(!v.is_well_formed());
        let v = v.witness(Witness::SupNorm {
            label: "B3".into(),
            value: 0.0,
            tol: 1e-10,
        });
        assert!(v.is_well_formed());

        let f = Verdict::new(CheckKind::PlanarInterval, Status::Fails).witness(Witness::Integral {
            label: "weighted".into(),
            a: 0.0,
            b: 3.0,
            value: 3.0,
            error: 1e-14,
            target: std::f64::consts::PI,
        });
        assert!(f.is_well_formed());
        let f = Verdict::new(CheckKind::PlanarInterval, Status::Fails).witness(Witness::SignCheck {
            label: "p12".into(),
            a: 0.0,
            b: 1.0,
            grid_points: 10,
            min_value: 1.0,
        });
        assert!(!f.is_well_formed());
    }

    #[test]
    fn json_shape() {
        let v = Verdict::new(CheckKind::PlanarOscillation, Status::Inconclusive)
            .evidence()
            .flag(Flag::RatioSuspect)
            .flag(Flag::NonoscillatoryEvidence)
            .flag(Flag::RatioSuspect)
            .param("threshold", 50.0)
            .witness(Witness::SignViolation {
                label: "p12".into(),
                t: 1.0,
                value: -1.0,
            });
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["check"], "planar-oscillation");
        assert_eq!(j["status"], "Inconclusive");
        assert_eq!(j["flags"], serde_json::json!(["nonoscillatory_evidence", "ratio_suspect"]));
        assert_eq!(j["witnesses"][0]["kind"], "sign_violation");
        assert_eq!(j["parameters"]["threshold"], 50.0);
    }
}
