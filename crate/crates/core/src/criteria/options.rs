use serde::Serialize;

use crate::integrate::{OdeOptions, QuadOptions};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriteriaOptions {
    /// Spacing of the grids used for sign tests and sup norms.
    pub grid_step: f64,
    /// Grid values above `-sign_tol` count as nonnegative.
    pub sign_tol: f64,
    /// `B_k ≡ 0` is accepted when `sup |B_k| <= sup_tol_rel · scale`.
    pub sup_tol_rel: f64,
    /// Divergence ladder, as offsets from `t0`.
    pub ladder: Vec<f64>,
    /// Ladder values above this count as diverging.
    pub threshold: f64,
    /// Lower threshold used for `∫ a_kk` growth in the stability test.
    pub stability_threshold: f64,
    /// Points of the grid used to validate the ratios `a_1k / a_12`.
    pub ratio_grid_points: usize,
    pub quad: QuadOptions,
    pub ode: OdeOptions,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        CriteriaOptions {
            grid_step: 0.01,
            sign_tol: 1e-12,
            sup_tol_rel: 1e-10,
            ladder: vec![25.0, 50.0, 100.0, 200.0],
            threshold: 50.0,
            stability_threshold: 10.0,
            ratio_grid_points: 2001,
            quad: QuadOptions::default().with_tol(1e-10),
            ode: OdeOptions::default(),
        }
    }
}

impl CriteriaOptions {
    /// Grid over `[a, b]` with spacing at most `grid_step`.
    pub fn grid(&self, a: f64, b: f64) -> Vec<f64> {
        let n = ((b - a) / self.grid_step).ceil().max(1.0) as usize + 1;
        crate::integrate::uniform_grid(a, b, n)
    }

    pub(crate) fn horizons(&self, t0: f64) -> Vec<f64> {
        self.ladder.iter().map(|l| t0 + l).collect()
    }
}
