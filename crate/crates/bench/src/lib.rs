//! Fixtures shared by the benchmarks.

use oscillab_core::corpus::{canonical3, system_corpus};
use oscillab_core::LinearSystem;

pub const EXPRESSIONS: [&str; 4] = [
    "sin(2*t)/cos(t)",
    "t^3 - 3*t + exp(-t/4)*sqrt(1 + t^2)",
    "log(2 + sin(t))*abs(cos(3*t))",
    "(1 + t)^(-2) - 4*t/(3 + cos(t))",
];

/// Canonical oscillator and two seeded random systems of sizes 4 and 5.
pub fn systems() -> Vec<(&'static str, LinearSystem)> {
    let mut random = system_corpus(99, 3).into_iter().skip(1);
    vec![
        ("canonical3", canonical3()),
        ("random4", random.next().expect("corpus has 3 systems")),
        ("random5", random.next().expect("corpus has 3 systems")),
    ]
}
