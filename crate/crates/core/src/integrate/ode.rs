//! Dormand-Prince 5(4) with Hairer's quartic dense output.

use serde::{Deserialize, Serialize};

use super::trajectory::{Segment, Termination, Trajectory};
use super::NumericError;
use crate::expr::DomainError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Dense-output probes per step when scanning tracked components for sign
/// changes, so that a pair of crossings inside one step is not missed.
const EVENT_PROBES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `‖y‖∞` above which a step collapse is read as finite-time escape.
    pub blow_up: f64,
    /// Minimum step, relative to `max(1, |t|)`.
    pub step_collapse: f64,
    pub max_steps: usize,
    /// Upper bound on the step size; `None` means the whole span.
    pub max_step: Option<f64>,
    /// Components (0-based) whose sign changes are located and refined.
    pub events: Vec<usize>,
    /// Scale `abs_tol` by `‖y‖∞`. Suits linear systems, whose solutions may
    /// decay far below any fixed absolute tolerance.
    #[serde(default)]
    pub norm_relative_abs_tol: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            blow_up: 1e8,
            step_collapse: 1e-12,
            max_steps: 2_000_000,
            max_step: None,
            events: Vec::new(),
            norm_relative_abs_tol: false,
        }
    }
}

impl OdeOptions {
    pub fn with_events(mut self, events: impl IntoIterator<Item = usize>) -> Self {
        self.events = events.into_iter().collect();
        self
    }

    pub fn norm_relative(mut self) -> Self {
        self.norm_relative_abs_tol = true;
        self
    }

    fn abs_scale(&self, norm: f64) -> f64 {
        if self.norm_relative_abs_tol {
            self.abs_tol * norm
        } else {
            self.abs_tol
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

fn norm_inf(y: &[f64]) -> f64 {
    y.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn lincomb(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..out.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Integrates `y' = rhs(t, y)` from `t_span.0` to `t_span.1` (forward only).
///
/// The right-hand side may fail with a [`DomainError`]; a failing trial
/// stage is treated like a rejected step. Escape is flagged when the step
/// size collapses below `step_collapse · max(1, |t|)` while `‖y‖∞` exceeds
/// `blow_up`; a collapse without that growth is an error.
pub fn integrate_ode<F>(
    mut rhs: F,
    y0: &[f64],
    t_span: (f64, f64),
    opts: &OdeOptions,
) -> Result<Trajectory, NumericError>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), DomainError>,
{
    let (t0, t_end) = t_span;
    let m = y0.len();
    if m == 0 {
        return Err(NumericError::InvalidInput("empty state".into()));
    }
    if !(t_end >= t0) || !t0.is_finite() || !t_end.is_finite() {
        return Err(NumericError::InvalidInput(format!(
            "invalid span [{t0}, {t_end}]"
        )));
    }
    if let Some(&c) = opts.events.iter().find(|&&c| c >= m) {
        return Err(NumericError::InvalidInput(format!(
            "event component {c} out of range for dimension {m}"
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(NumericError::InvalidInput("non-finite initial state".into()));
    }

    let mut tracked = vec![false; m];
    for &c in &opts.events {
        tracked[c] = true;
    }
    let mut traj = Trajectory::start(t0, y0.to_vec(), tracked.clone());
    if t_end == t0 {
        return Ok(traj);
    }

    let mut scanners: Vec<ZeroScanner> = (0..m)
        .map(|c| ZeroScanner::new(tracked[c].then(|| y0[c]), t0))
        .collect();

    let span = t_end - t0;
    let h_max = opts.max_step.unwrap_or(span).min(span);

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; m];
    rhs(t, &y, &mut k1)?;
    let mut h = initial_step(&mut rhs, t, &y, &k1, opts, h_max)?;

    let mut k2 = vec![0.0; m];
    let mut k3 = vec![0.0; m];
    let mut k4 = vec![0.0; m];
    let mut k5 = vec![0.0; m];
    let mut k6 = vec![0.0; m];
    let mut k7 = vec![0.0; m];
    let mut ytmp = vec![0.0; m];
    let mut y1 = vec![0.0; m];
    let mut last_rejected = false;
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            traj.set_termination(Termination::Truncated { t });
            return Ok(traj);
        }
        let h_min = opts.step_collapse * t.abs().max(1.0);
        if h < h_min {
            let norm = norm_inf(&y);
            if norm > opts.blow_up {
                traj.set_termination(Termination::Escaped { t, norm });
                return Ok(traj);
            }
            return Err(NumericError::StepCollapse { t, h });
        }
        let mut last = false;
        if t + h >= t_end || t + 1.01 * h >= t_end {
            h = t_end - t;
            last = true;
        }
        steps += 1;

        let stages = (|| -> Result<(), DomainError> {
            lincomb(&mut ytmp, &y, h, &[(A21, &k1)]);
            rhs(t + C2 * h, &ytmp, &mut k2)?;
            lincomb(&mut ytmp, &y, h, &[(A31, &k1), (A32, &k2)]);
            rhs(t + C3 * h, &ytmp, &mut k3)?;
            lincomb(&mut ytmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            rhs(t + C4 * h, &ytmp, &mut k4)?;
            lincomb(
                &mut ytmp,
                &y,
                h,
                &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
            );
            rhs(t + C5 * h, &ytmp, &mut k5)?;
            lincomb(
                &mut ytmp,
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            rhs(t + h, &ytmp, &mut k6)?;
            lincomb(
                &mut y1,
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            rhs(t + h, &y1, &mut k7)?;
            Ok(())
        })();

        let err = match stages {
            Ok(()) => {
                let mut acc = 0.0;
                let abs = opts.abs_scale(norm_inf(&y).max(norm_inf(&y1)));
                for i in 0..m {
                    let e = h
                        * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                            + E7 * k7[i]);
                    let sc = abs + opts.rel_tol * y[i].abs().max(y1[i].abs());
                    if e != 0.0 {
                        acc += (e / sc).powi(2);
                    }
                }
                (acc / m as f64).sqrt()
            }
            Err(_) => f64::INFINITY,
        };

        if !err.is_finite() || err > 1.0 {
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).max(0.2)
            } else {
                0.25
            };
            h *= fac;
            last_rejected = true;
            continue;
        }

        let coeffs: Vec<[f64; 5]> = (0..m)
            .map(|i| {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                [
                    y[i],
                    ydiff,
                    bspl,
                    ydiff - h * k7[i] - bspl,
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]),
                ]
            })
            .collect();
        let t_new = if last { t_end } else { t + h };
        let segment = Segment::Dopri {
            t0: t,
            h,
            coeffs,
            y1: y1.clone(),
        };
        traj.push(t_new, y1.clone(), err, segment);

        let mut crossings = Vec::new();
        {
            let seg = traj.last_segment();
            for &c in &opts.events {
                let probes = (1..EVENT_PROBES)
                    .map(|j| t + h * j as f64 / EVENT_PROBES as f64)
                    .chain(std::iter::once(t_new));
                for tp in probes {
                    let v = if tp == t_new {
                        y1[c]
                    } else {
                        Trajectory::eval_in_segment(seg, tp, c)
                    };
                    let dense = |s| Trajectory::eval_in_segment(seg, s, c);
                    if let Some(z) = scanners[c].observe(tp, v, dense) {
                        crossings.push((c, z));
                    }
                }
            }
        }
        for (c, z) in crossings {
            traj.push_zero(c, z);
        }

        t = t_new;
        std::mem::swap(&mut y, &mut y1);
        std::mem::swap(&mut k1, &mut k7);

        let mut fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h = (h * fac).min(h_max);
    }

    Ok(traj)
}

fn initial_step<F>(
    rhs: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    opts: &OdeOptions,
    h_max: f64,
) -> Result<f64, NumericError>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), DomainError>,
{
    let m = y.len();
    let abs = opts.abs_scale(norm_inf(y));
    let sc: Vec<f64> = y.iter().map(|v| abs + opts.rel_tol * v.abs()).collect();
    let rms = |v: &[f64]| -> f64 {
        let sum: f64 = v
            .iter()
            .zip(&sc)
            .filter(|(a, _)| **a != 0.0)
            .map(|(a, s)| (a / s).powi(2))
            .sum();
        (sum / m as f64).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(h_max);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; m];
    if rhs(t + h0, &y1, &mut f1).is_err() {
        return Ok(h0 * 1e-3);
    }
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(h_max))
}

/// Tracks the sign of one component and brackets crossings.
struct ZeroScanner {
    active: bool,
    last_sign: f64,
    last_t: f64,
    pending_zero: Option<f64>,
}

impl ZeroScanner {
    fn new(v0: Option<f64>, t0: f64) -> Self {
        let (active, v) = match v0 {
            Some(v) => (true, v),
            None => (false, 0.0),
        };
        ZeroScanner {
            active,
            last_sign: sign(v),
            last_t: t0,
            pending_zero: None,
        }
    }

    /// Feeds the next sample; returns a refined crossing time when the sign
    /// flips between the previous nonzero sample and this one.
    fn observe<G: Fn(f64) -> f64>(&mut self, t: f64, v: f64, dense: G) -> Option<f64> {
        if !self.active {
            return None;
        }
        let s = sign(v);
        if s == 0.0 {
            if self.pending_zero.is_none() {
                self.pending_zero = Some(t);
            }
            return None;
        }
        let mut out = None;
        if self.last_sign != 0.0 && s != self.last_sign {
            out = Some(match self.pending_zero {
                Some(z) => z,
                None => bisect(self.last_t, t, self.last_sign, dense),
            });
        }
        self.pending_zero = None;
        self.last_sign = s;
        self.last_t = t;
        out
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Bisection on `[a, b]` where `g(a)` has sign `sign_a` and `g(b)` the opposite.
fn bisect<G: Fn(f64) -> f64>(mut a: f64, mut b: f64, sign_a: f64, g: G) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || b - a <= 1e-13 * a.abs().max(1.0) {
            break;
        }
        let v = g(mid);
        if v == 0.0 {
            return mid;
        }
        if sign(v) == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
