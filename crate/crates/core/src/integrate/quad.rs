//! Globally adaptive 15-point Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::NumericError;
use crate::expr::DomainError;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// 7-point Gauss weights for nodes `XGK[1], XGK[3], XGK[5]` and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    /// Target: `error <= tol · max(1, |value|)`.
    pub tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-11,
            max_subdivisions: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        e = res_asc * (200.0 * e / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), DomainError>
where
    F: FnMut(f64) -> Result<f64, DomainError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x)?;
        let f2 = f(center + x)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (kronrod - gauss) * half;
    let value = kronrod * half;
    let error = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    Ok((value, error))
}

/// Adaptive quadrature of `f` over `[a, b]`; `b < a` integrates backwards.
///
/// Nodes are interior, so `f` is never evaluated at the endpoints.
pub fn quad<F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult, NumericError>
where
    F: FnMut(f64) -> Result<f64, DomainError>,
{
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(NumericError::InvalidInput(format!(
            "quadrature bounds must be finite, got [{a}, {b}]"
        )));
    }
    if b < a {
        let r = quad(f, b, a, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }

    let (value, error) = gk15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut total = value;
    let mut total_err = error;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut subdivisions = 0;

    while total_err > opts.tol * total.abs().max(1.0) {
        if subdivisions >= opts.max_subdivisions {
            return Err(NumericError::QuadNonConvergence {
                a,
                b,
                value: total,
                error: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot split further in floating point; accept the panel.
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        subdivisions += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        if subdivisions % 64 == 0 {
            // Resum to shed accumulated cancellation in the running totals.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }

    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
        subdivisions,
    })
}

/// Running integral `∫_{t0}^{g} f` at every grid point `g`.
///
/// The grid must be nondecreasing; points before `t0` give negative-oriented
/// integrals. Each value is the previous one plus the panel quadrature.
pub fn cumulative_quad<F>(
    mut f: F,
    t0: f64,
    grid: &[f64],
    opts: &QuadOptions,
) -> Result<Vec<f64>, NumericError>
where
    F: FnMut(f64) -> Result<f64, DomainError>,
{
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(NumericError::InvalidInput(
            "cumulative grid must be nondecreasing".into(),
        ));
    }
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = t0;
    for &g in grid {
        acc += quad(&mut f, prev, g, opts)?.value;
        out.push(acc);
        prev = g;
    }
    Ok(out)
}

/// `t ↦ ∫_{t0}^{t} f` with cached values at evenly spaced breakpoints, so
/// each evaluation only integrates over one short panel.
pub struct RunningIntegral<F> {
    f: F,
    t0: f64,
    step: f64,
    cache: Vec<f64>,
    opts: QuadOptions,
}

impl<F> RunningIntegral<F>
where
    F: FnMut(f64) -> Result<f64, DomainError>,
{
    pub fn new(f: F, t0: f64, step: f64, opts: QuadOptions) -> Self {
        assert!(step > 0.0, "breakpoint spacing must be positive");
        RunningIntegral {
            f,
            t0,
            step,
            cache: vec![0.0],
            opts,
        }
    }

    pub fn eval(&mut self, t: f64) -> Result<f64, NumericError> {
        if t <= self.t0 {
            return Ok(-quad(&mut self.f, t, self.t0, &self.opts)?.value);
        }
        let idx = ((t - self.t0) / self.step).floor() as usize;
        while self.cache.len() <= idx {
            let i = self.cache.len();
            let a = self.t0 + self.step * (i - 1) as f64;
            let b = self.t0 + self.step * i as f64;
            let v = self.cache[i - 1] + quad(&mut self.f, a, b, &self.opts)?.value;
            self.cache.push(v);
        }
        let base = self.t0 + self.step * idx as f64;
        Ok(self.cache[idx] + quad(&mut self.f, base, t, &self.opts)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn opts() -> QuadOptions {
        QuadOptions::default()
    }

    #[test]
    fn closed_forms() {
        let r = quad(|t| Ok(t.sin()), 0.0, PI, &opts()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
        let r = quad(|_| Ok(1.0), 0.0, 1.0, &opts()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let r = quad(|_| Ok(1f64.min(1.0)), 0.0, PI, &opts()).unwrap();
        assert!((r.value - PI).abs() < 1e-14);
        let r = quad(|t| Ok(t.sin()), PI, 0.0, &opts()).unwrap();
        assert!((r.value + 2.0).abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity_is_not_evaluated() {
        // ∫_0^1 1/sqrt(t) = 2; the integrand errors at t = 0.
        let r = quad(
            |t| {
                if t == 0.0 {
                    Err(DomainError {
                        kind: crate::expr::DomainKind::DivisionByZero,
                        t,
                    })
                } else {
                    Ok(1.0 / t.sqrt())
                }
            },
            0.0,
            1.0,
            &QuadOptions::default().with_tol(1e-9),
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let o = QuadOptions {
            tol: 1e-14,
            max_subdivisions: 3,
        };
        let err = quad(|t| Ok((50.0 * t).sin().abs()), 0.0, 10.0, &o).unwrap_err();
        assert!(matches!(err, NumericError::QuadNonConvergence { .. }));
    }

    #[test]
    fn cumulative_examples() {
        let v = cumulative_quad(|_| Ok(1.0), 0.0, &[0.0, 1.0, 2.0], &opts()).unwrap();
        assert_eq!(v, vec![0.0, 1.0, 2.0]);
        let v = cumulative_quad(|t| Ok(t.cos()), 0.0, &[0.0, PI / 2.0, PI], &opts()).unwrap();
        assert!((v[1] - 1.0).abs() < 1e-10 && v[2].abs() < 1e-10);
        let grid: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
        let v = cumulative_quad(|t| Ok(t - 1.0), 0.0, &grid, &opts()).unwrap();
        for (g, val) in grid.iter().zip(&v) {
            assert!((val - (g * g / 2.0 - g)).abs() < 1e-12);
        }
    }

    #[test]
    fn running_integral_matches_direct() {
        let mut ri = RunningIntegral::new(|t: f64| Ok(t.cos()), 0.0, 1.0, opts());
        for t in [0.0, 0.3, 2.5, 7.77, 1.0, 15.2, -0.4] {
            let v = ri.eval(t).unwrap();
            assert!((v - t.sin()).abs() < 1e-12, "t = {t}");
        }
    }
}
