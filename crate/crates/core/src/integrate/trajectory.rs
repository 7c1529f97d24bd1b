use serde::Serialize;

/// Why an integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// Finite-time escape: the step size collapsed while `‖y‖∞` exceeded the
    /// blow-up threshold.
    Escaped { t: f64, norm: f64 },
    /// The step budget ran out before the end of the span.
    Truncated { t: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Escape {
    pub t: f64,
    pub norm: f64,
}

/// Continuous extension over one accepted step.
#[derive(Clone, Debug)]
pub(crate) enum Segment {
    /// Dormand-Prince quartic interpolant, coefficients stored as
    /// `[y0, Δy, bspl, r4, r5]` per component.
    Dopri {
        t0: f64,
        h: f64,
        coeffs: Vec<[f64; 5]>,
        y1: Vec<f64>,
    },
    /// Cubic Hermite interpolant through values and derivatives at both ends.
    Hermite {
        t0: f64,
        h: f64,
        y0: Vec<f64>,
        y1: Vec<f64>,
        f0: Vec<f64>,
        f1: Vec<f64>,
    },
}

impl Segment {
    fn eval_component(&self, t: f64, c: usize) -> f64 {
        match self {
            Segment::Dopri { t0, h, coeffs, y1 } => {
                let theta = (t - t0) / h;
                if theta >= 1.0 {
                    return y1[c];
                }
                let [r1, r2, r3, r4, r5] = coeffs[c];
                if theta <= 0.0 {
                    return r1;
                }
                let theta1 = 1.0 - theta;
                r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)))
            }
            Segment::Hermite {
                t0,
                h,
                y0,
                y1,
                f0,
                f1,
            } => {
                let s = (t - t0) / h;
                if s <= 0.0 {
                    return y0[c];
                }
                if s >= 1.0 {
                    return y1[c];
                }
                let s2 = s * s;
                let s3 = s2 * s;
                let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                let h10 = s3 - 2.0 * s2 + s;
                let h01 = -2.0 * s3 + 3.0 * s2;
                let h11 = s3 - s2;
                h00 * y0[c] + h10 * h * f0[c] + h01 * y1[c] + h11 * h * f1[c]
            }
        }
    }
}

/// Dense numerical solution of an initial value problem.
///
/// Samples are the accepted step endpoints. Between samples the trajectory
/// is evaluated through the per-step continuous extension, which reproduces
/// the samples exactly at the step endpoints.
#[derive(Clone, Debug)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    errors: Vec<f64>,
    segments: Vec<Segment>,
    zeros: Vec<Vec<f64>>,
    tracked: Vec<bool>,
    termination: Termination,
}

impl Trajectory {
    pub(crate) fn start(t0: f64, y0: Vec<f64>, tracked: Vec<bool>) -> Self {
        let dim = y0.len();
        Trajectory {
            dim,
            times: vec![t0],
            states: vec![y0],
            errors: vec![0.0],
            segments: Vec::new(),
            zeros: vec![Vec::new(); dim],
            tracked,
            termination: Termination::Completed,
        }
    }

    pub(crate) fn push(&mut self, t: f64, y: Vec<f64>, error: f64, segment: Segment) {
        self.times.push(t);
        self.states.push(y);
        self.errors.push(error);
        self.segments.push(segment);
    }

    pub(crate) fn push_zero(&mut self, component: usize, t: f64) {
        let zs = &mut self.zeros[component];
        if zs.last().is_some_and(|&last| (t - last).abs() < 1e-8) {
            return;
        }
        zs.push(t);
    }

    pub(crate) fn set_termination(&mut self, termination: Termination) {
        self.termination = termination;
    }

    /// Builds a trajectory with cubic Hermite interpolation from samples and
    /// the derivative at each sample.
    pub fn from_hermite(times: Vec<f64>, states: Vec<Vec<f64>>, derivs: Vec<Vec<f64>>) -> Self {
        assert!(!times.is_empty(), "trajectory needs at least one sample");
        assert_eq!(times.len(), states.len());
        assert_eq!(times.len(), derivs.len());
        let dim = states[0].len();
        let segments = times
            .windows(2)
            .enumerate()
            .map(|(i, w)| Segment::Hermite {
                t0: w[0],
                h: w[1] - w[0],
                y0: states[i].clone(),
                y1: states[i + 1].clone(),
                f0: derivs[i].clone(),
                f1: derivs[i + 1].clone(),
            })
            .collect();
        let n = times.len();
        Trajectory {
            dim,
            times,
            states,
            errors: vec![0.0; n],
            segments,
            zeros: vec![Vec::new(); dim],
            tracked: vec![false; dim],
            termination: Termination::Completed,
        }
    }

    /// Number of components.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    /// Local error estimate (scaled norm) of the step ending at each sample.
    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    /// Samples of one component.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.states.iter().map(|y| y[c]).collect()
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn escape(&self) -> Option<Escape> {
        match self.termination {
            Termination::Escaped { t, norm } => Some(Escape { t, norm }),
            _ => None,
        }
    }

    /// Refined sign-change times of a component (empty unless tracked).
    pub fn zeros(&self, c: usize) -> &[f64] {
        &self.zeros[c]
    }

    pub fn is_tracked(&self, c: usize) -> bool {
        self.tracked.get(c).copied().unwrap_or(false)
    }

    fn segment_index(&self, t: f64) -> Option<usize> {
        if self.segments.is_empty() || t < self.times[0] || t > self.t_end() {
            return None;
        }
        let i = self.times.partition_point(|&s| s <= t);
        Some(i.saturating_sub(1).min(self.segments.len() - 1))
    }

    /// Dense evaluation of one component; `None` outside the covered span.
    pub fn eval_component(&self, t: f64, c: usize) -> Option<f64> {
        if self.segments.is_empty() {
            return (t == self.times[0]).then(|| self.states[0][c]);
        }
        let i = self.segment_index(t)?;
        if t == self.times[i] {
            return Some(self.states[i][c]);
        }
        Some(self.segments[i].eval_component(t, c))
    }

    /// Dense evaluation of the full state; `None` outside the covered span.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        (0..self.dim).map(|c| self.eval_component(t, c)).collect()
    }

    pub(crate) fn last_segment(&self) -> &Segment {
        self.segments.last().expect("no accepted step")
    }

    pub(crate) fn eval_in_segment(segment: &Segment, t: f64, c: usize) -> f64 {
        segment.eval_component(t, c)
    }
}

/// Number of sign changes of a tracked component, with their times.
pub fn count_zeros(traj: &Trajectory, component: usize) -> (usize, Vec<f64>) {
    let zs = traj.zeros(component).to_vec();
    (zs.len(), zs)
}
