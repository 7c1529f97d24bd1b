use serde::Serialize;

use super::quad::{cumulative_quad, QuadOptions};
use super::NumericError;
use crate::expr::DomainError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderVerdict {
    /// Strictly increasing over the last three horizons and above the threshold.
    GrowingBeyondThreshold,
    /// Monotone, below the threshold in magnitude, with shrinking increments.
    Bounded,
    Mixed,
}

/// Running integral sampled at increasing horizons; evidence, not proof, of
/// divergence to `+∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceLadder {
    pub t0: f64,
    pub horizons: Vec<f64>,
    pub values: Vec<f64>,
    pub threshold: f64,
    pub verdict: LadderVerdict,
}

/// Classifies ladder values `I(T_1) < … < I(T_m)` with `I(t0) = 0` implied.
pub fn classify_ladder(values: &[f64], threshold: f64) -> LadderVerdict {
    let Some(&last) = values.last() else {
        return LadderVerdict::Mixed;
    };
    let tail = &values[values.len().saturating_sub(3)..];
    if last > threshold && tail.windows(2).all(|w| w[1] > w[0]) {
        return LadderVerdict::GrowingBeyondThreshold;
    }

    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-12 * scale;
    let increments: Vec<f64> = std::iter::once(0.0)
        .chain(values.iter().copied())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect();
    let nondecreasing = increments.iter().all(|d| *d >= -eps);
    let nonincreasing = increments.iter().all(|d| *d <= eps);
    let below = values.iter().all(|v| v.abs() < threshold);
    let first = increments[0].abs();
    let final_step = increments[increments.len() - 1].abs();
    let settling = increments.len() >= 2 && (final_step <= 0.5 * first || final_step <= eps);
    if (nondecreasing || nonincreasing) && below && settling {
        LadderVerdict::Bounded
    } else {
        LadderVerdict::Mixed
    }
}

/// Samples `I(T) = ∫_{t0}^{T} f` at each ladder horizon in one cumulative pass.
pub fn divergence_probe<F>(
    f: F,
    t0: f64,
    ladder: &[f64],
    threshold: f64,
    opts: &QuadOptions,
) -> Result<DivergenceLadder, NumericError>
where
    F: FnMut(f64) -> Result<f64, DomainError>,
{
    if ladder.is_empty() || ladder.windows(2).any(|w| w[1] <= w[0]) || ladder[0] < t0 {
        return Err(NumericError::InvalidInput(
            "ladder horizons must be strictly increasing and not before t0".into(),
        ));
    }
    let values = cumulative_quad(f, t0, ladder, opts)?;
    let verdict = classify_ladder(&values, threshold);
    Ok(DivergenceLadder {
        t0,
        horizons: ladder.to_vec(),
        values,
        threshold,
        verdict,
    })
}
