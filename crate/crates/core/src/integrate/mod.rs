//! Numerical engines: adaptive Runge-Kutta integration with dense output,
//! zero-crossing refinement and blow-up detection; adaptive Gauss-Kronrod
//! quadrature with running-integral and divergence-ladder modes.

mod ladder;
mod ode;
mod quad;
mod running;
mod trajectory;

use serde::Serialize;
use thiserror::Error;

use crate::expr::DomainError;

pub use ladder::{classify_ladder, divergence_probe, DivergenceLadder, LadderVerdict};
pub use ode::{integrate_ode, OdeOptions};
pub use quad::{cumulative_quad, quad, QuadOptions, QuadResult, RunningIntegral};
pub use running::{ErrorSlot, ExprIntegral, LIMIT_STEP};
pub use trajectory::{count_zeros, Escape, Termination, Trajectory};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum NumericError {
    #[error("step size collapsed to {h:e} at t = {t} without blow-up (stiff or singular right-hand side)")]
    StepCollapse { t: f64, h: f64 },
    #[error("quadrature on [{a}, {b}] did not converge: estimate {value} ± {error:e} after {subdivisions} subdivisions")]
    QuadNonConvergence {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// `n` uniformly spaced points covering `[a, b]` inclusive.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            let mut g: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
            g[n - 1] = b;
            g
        }
    }
}

/// Result of a grid sign test `f(t) >= -tol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignTest {
    pub passed: bool,
    /// First grid point where the test failed, with the offending value.
    pub violation: Option<(f64, f64)>,
    pub min_value: f64,
    pub violations: usize,
}

/// Checks `f(t) >= -tol` on every grid point. Evaluation errors count as
/// violations with a NaN value.
pub fn sign_test<F>(grid: &[f64], tol: f64, mut f: F) -> SignTest
where
    F: FnMut(f64) -> Result<f64, DomainError>,
{
    let mut out = SignTest {
        passed: true,
        violation: None,
        min_value: f64::INFINITY,
        violations: 0,
    };
    for &t in grid {
        let v = f(t).unwrap_or(f64::NAN);
        if !(v >= -tol) {
            out.passed = false;
            out.violations += 1;
            if out.violation.is_none() {
                out.violation = Some((t, v));
            }
        }
        if v < out.min_value {
            out.min_value = v;
        }
    }
    out
}
