//! The n-dimensional linear system `φ_j' = Σ_k a_jk(t) φ_k` and the
//! well-definedness check for the ratios `a_1k / a_12`.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{CoeffExpr, DomainError, ParseError};
use crate::integrate::uniform_grid;

/// On-disk system definition (JSON or TOML).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub n: usize,
    pub t0: f64,
    pub a: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("entry ({row}, {col}): {source}")]
    Parse {
        row: usize,
        col: usize,
        #[source]
        source: ParseError,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("this operation needs n >= 3, the system has n = {0}")]
    NeedsFullDimension(usize),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed system document: {0}")]
    Format(String),
}

/// Entry `(row, col)` (1-based) failed to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error("a_{row}{col}: {source}")]
pub struct EntryError {
    pub row: usize,
    pub col: usize,
    #[source]
    pub source: DomainError,
}

impl From<EntryError> for DomainError {
    fn from(e: EntryError) -> Self {
        e.source
    }
}

#[derive(Clone, Debug)]
pub struct LinearSystem {
    t0: f64,
    coeffs: Vec<Vec<CoeffExpr>>,
    labels: Option<Vec<String>>,
}

impl LinearSystem {
    /// Builds a system from a square matrix of expressions (0-based rows).
    pub fn new(t0: f64, coeffs: Vec<Vec<CoeffExpr>>) -> Result<Self, SystemError> {
        let n = coeffs.len();
        if n < 2 {
            return Err(SystemError::Dimension(format!("n must be >= 2, got {n}")));
        }
        if let Some((i, row)) = coeffs.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(SystemError::Dimension(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        if !t0.is_finite() {
            return Err(SystemError::Format(format!("t0 must be finite, got {t0}")));
        }
        Ok(LinearSystem {
            t0,
            coeffs,
            labels: None,
        })
    }

    /// Parses a matrix of expression strings.
    pub fn from_strings<S: AsRef<str>>(t0: f64, rows: &[Vec<S>]) -> Result<Self, SystemError> {
        let coeffs = rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| {
                        CoeffExpr::parse(s.as_ref()).map_err(|source| SystemError::Parse {
                            row: i + 1,
                            col: j + 1,
                            source,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(t0, coeffs)
    }

    pub fn from_doc(doc: &SystemDoc) -> Result<Self, SystemError> {
        if doc.a.len() != doc.n {
            return Err(SystemError::Dimension(format!(
                "n = {} but `a` has {} rows",
                doc.n,
                doc.a.len()
            )));
        }
        let mut sys = Self::from_strings(doc.t0, &doc.a)?;
        if let Some(labels) = &doc.labels {
            if labels.len() != doc.n {
                return Err(SystemError::Dimension(format!(
                    "{} labels for n = {}",
                    labels.len(),
                    doc.n
                )));
            }
            sys.labels = Some(labels.clone());
        }
        Ok(sys)
    }

    pub fn from_json_str(s: &str) -> Result<Self, SystemError> {
        let doc: SystemDoc =
            serde_json::from_str(s).map_err(|e| SystemError::Format(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn from_toml_str(s: &str) -> Result<Self, SystemError> {
        let doc: SystemDoc = toml::from_str(s).map_err(|e| SystemError::Format(e.to_string()))?;
        Self::from_doc(&doc)
    }

    /// Loads a JSON or TOML document; `.toml` files are read as TOML,
    /// everything else as JSON.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SystemError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SystemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text),
            _ => Self::from_json_str(&text),
        }
    }

    pub fn to_doc(&self) -> SystemDoc {
        SystemDoc {
            n: self.n(),
            t0: self.t0,
            a: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(|e| e.to_string()).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Entry `a_{row+1, col+1}` (0-based indices).
    pub fn entry(&self, row: usize, col: usize) -> &CoeffExpr {
        &self.coeffs[row][col]
    }

    pub fn rows(&self) -> &[Vec<CoeffExpr>] {
        &self.coeffs
    }

    /// Two-dimensional systems are handled only by the planar criteria.
    pub fn is_planar(&self) -> bool {
        self.n() == 2
    }

    pub fn require_full_dimension(&self) -> Result<(), SystemError> {
        if self.n() < 3 {
            Err(SystemError::NeedsFullDimension(self.n()))
        } else {
            Ok(())
        }
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    /// Replaces one entry (0-based indices).
    pub fn with_entry(mut self, row: usize, col: usize, e: CoeffExpr) -> Self {
        self.coeffs[row][col] = e;
        self
    }

    pub fn sample(&self, t: f64) -> Result<DMatrix<f64>, EntryError> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[(i, j)] = e.eval(t).map_err(|source| EntryError {
                    row: i + 1,
                    col: j + 1,
                    source,
                })?;
            }
        }
        Ok(m)
    }

    /// Right-hand side `φ' = A(t) φ` for the integrator.
    pub fn rhs(&self) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<(), DomainError> + '_ {
        let n = self.n();
        let mut buf = vec![0.0; n * n];
        move |t, y, dy| {
            for (i, row) in self.coeffs.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    buf[i * n + j] = e.eval(t)?;
                }
            }
            for i in 0..n {
                dy[i] = (0..n).map(|j| buf[i * n + j] * y[j]).sum();
            }
            Ok(())
        }
    }

    /// Largest `|a_jk(t)|` over a grid, at least 1; used to scale tolerances.
    pub fn scale_on(&self, grid: &[f64]) -> f64 {
        let mut s = 1.0f64;
        for &t in grid {
            for row in &self.coeffs {
                for e in row {
                    if let Ok(v) = e.eval(t) {
                        s = s.max(v.abs());
                    }
                }
            }
        }
        s
    }

    /// Checks that each `a_1k / a_12`, `k = 3..n`, is well defined on `window`.
    pub fn validate_ratios(
        &self,
        window: (f64, f64),
        grid_points: usize,
        opts: &RatioOptions,
    ) -> Result<RatioReport, SystemError> {
        self.require_full_dimension()?;
        let (lo, hi) = window;
        if !(hi > lo) || grid_points < 2 {
            return Err(SystemError::Format(format!(
                "ratio window [{lo}, {hi}] with {grid_points} points is empty"
            )));
        }
        let grid = uniform_grid(lo, hi, grid_points);
        let h = (hi - lo) / (grid_points - 1) as f64;
        let den = self.entry(0, 1);
        let den_vals: Vec<Option<f64>> = grid.iter().map(|&t| den.eval(t).ok()).collect();
        let flagged: Vec<bool> = den_vals
            .iter()
            .map(|v| v.is_none_or(|x| x.abs() < opts.eps_den))
            .collect();

        // Candidate singular points: flagged grid points and sign changes of
        // a_12 between unflagged neighbours.
        let mut candidates: Vec<f64> = grid
            .iter()
            .zip(&flagged)
            .filter_map(|(&t, &f)| f.then_some(t))
            .collect();
        for i in 0..grid.len() - 1 {
            if let (Some(a), Some(b)) = (den_vals[i], den_vals[i + 1]) {
                if !flagged[i] && !flagged[i + 1] && a * b < 0.0 {
                    candidates.push(bisect_root(den, grid[i], grid[i + 1], a));
                }
            }
        }
        let adjacent_flags = flagged.windows(2).any(|w| w[0] && w[1]);

        let mut entries = Vec::new();
        for col in 2..self.n() {
            let ratio = self.entry(0, col).div(den);
            let flagged_points: Vec<f64> = grid
                .iter()
                .zip(&flagged)
                .filter_map(|(&t, &f)| f.then_some(t))
                .collect();
            let eval_failures: Vec<f64> = grid
                .iter()
                .zip(&flagged)
                .filter(|(&t, &f)| !f && ratio.eval(t).is_err())
                .map(|(&t, _)| t)
                .collect();
            let singular_points: Vec<SingularProbe> = candidates
                .iter()
                .filter_map(|&z| probe_singularity(&ratio, z, h, window))
                .filter(|p| !p.integrable)
                .collect();
            let status = if !adjacent_flags && eval_failures.is_empty() && singular_points.is_empty()
            {
                RatioStatus::WellDefined
            } else {
                RatioStatus::Suspect
            };
            entries.push(RatioEntry {
                k: col + 1,
                status,
                flagged_points,
                eval_failures,
                singular_points,
                ratio,
            });
        }
        Ok(RatioReport {
            window,
            grid_points,
            eps_den: opts.eps_den,
            entries,
            caveats: vec![
                "absolute continuity of a_1k/a_12 is assumed, not checked".to_string(),
            ],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioOptions {
    /// `|a_12(t)|` below this flags a grid point.
    pub eps_den: f64,
}

impl Default for RatioOptions {
    fn default() -> Self {
        RatioOptions { eps_den: 1e-12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RatioStatus {
    WellDefined,
    Suspect,
}

/// Local growth of a ratio next to a zero of its denominator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularProbe {
    pub t: f64,
    /// Slope of `log|μ|` against `log δ` as `δ → 0`; `≤ -1` means `|μ|`
    /// grows at least like `1/δ`, which is not locally integrable.
    pub log_slope: f64,
    pub integrable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioEntry {
    /// Column index `k` of `a_1k` (1-based, `3..=n`).
    pub k: usize,
    pub status: RatioStatus,
    /// Grid points with `|a_12| < eps_den`.
    pub flagged_points: Vec<f64>,
    /// Unflagged grid points where the ratio failed to evaluate.
    pub eval_failures: Vec<f64>,
    /// Zeros of `a_12` next to which the ratio is not integrable.
    pub singular_points: Vec<SingularProbe>,
    /// `μ_k = a_1k / a_12`.
    pub ratio: CoeffExpr,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub window: (f64, f64),
    pub grid_points: usize,
    pub eps_den: f64,
    pub entries: Vec<RatioEntry>,
    pub caveats: Vec<String>,
}

impl RatioReport {
    pub fn well_defined(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.status == RatioStatus::WellDefined)
    }
}

fn bisect_root(f: &CoeffExpr, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        match f.eval(mid) {
            Ok(0.0) => return mid,
            Ok(v) if v.signum() == sa => a = mid,
            Ok(_) => b = mid,
            Err(_) => return mid,
        }
    }
    0.5 * (a + b)
}

/// Samples the ratio at `z ± δ` for geometrically shrinking `δ` and
/// estimates the power-law exponent of its growth.
fn probe_singularity(
    ratio: &CoeffExpr,
    z: f64,
    h: f64,
    window: (f64, f64),
) -> Option<SingularProbe> {
    const NEAR: i32 = 26;
    const FAR: i32 = 16;
    let mut worst: Option<f64> = None;
    let mut any_side = false;
    for side in [-1.0, 1.0] {
        let at = |m: i32| {
            let delta = h * 2f64.powi(-m);
            let t = z + side * delta;
            if t < window.0 || t > window.1 {
                return None;
            }
            ratio.eval(t).ok().map(|v| (delta, v.abs()))
        };
        let (Some((d_far, v_far)), Some((d_near, v_near))) = (at(FAR), at(NEAR)) else {
            continue;
        };
        any_side = true;
        let floor = 1e-300;
        let slope = ((v_near + floor).ln() - (v_far + floor).ln()) / (d_near.ln() - d_far.ln());
        worst = Some(worst.map_or(slope, |w: f64| w.min(slope)));
    }
    if !any_side {
        // Cannot approach the point from either side inside the window.
        let inside = z > window.0 && z < window.1;
        return inside.then_some(SingularProbe {
            t: z,
            log_slope: f64::NEG_INFINITY,
            integrable: false,
        });
    }
    let slope = worst?;
    Some(SingularProbe {
        t: z,
        log_slope: slope,
        integrable: slope > -0.9,
    })
}
