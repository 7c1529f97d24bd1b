use super::quad::{QuadOptions, RunningIntegral};
use super::NumericError;
use crate::expr::{CoeffExpr, DomainError, DomainKind};

/// Step used for the symmetric limit at removable singular points.
pub const LIMIT_STEP: f64 = 1e-5;

type BoxedIntegrand<'a> = Box<dyn FnMut(f64) -> Result<f64, DomainError> + 'a>;

/// `t ↦ ∫_{t0}^{t} e(s) ds` for a coefficient expression, exact for
/// constants and cached otherwise. Removable singular points of `e` are
/// passed through by their symmetric limit.
pub struct ExprIntegral<'a> {
    t0: f64,
    constant: Option<f64>,
    running: Option<RunningIntegral<BoxedIntegrand<'a>>>,
}

impl<'a> ExprIntegral<'a> {
    pub fn new(e: &'a CoeffExpr, t0: f64, step: f64, opts: &QuadOptions) -> Self {
        match e.as_const() {
            Some(c) => ExprIntegral {
                t0,
                constant: Some(c),
                running: None,
            },
            None => {
                let f: BoxedIntegrand<'a> = Box::new(move |t| e.eval_or_limit(t, LIMIT_STEP));
                ExprIntegral {
                    t0,
                    constant: None,
                    running: Some(RunningIntegral::new(f, t0, step, opts.clone())),
                }
            }
        }
    }

    pub fn eval(&mut self, t: f64) -> Result<f64, NumericError> {
        match (&mut self.running, self.constant) {
            (_, Some(c)) => Ok(c * (t - self.t0)),
            (Some(r), None) => r.eval(t),
            (None, None) => unreachable!("either constant or running"),
        }
    }
}

/// Carries a non-domain error out of a quadrature integrand, which can only
/// report [`DomainError`]s.
#[derive(Debug, Default)]
pub struct ErrorSlot(Option<NumericError>);

impl ErrorSlot {
    pub fn lift(&mut self, t: f64, r: Result<f64, NumericError>) -> Result<f64, DomainError> {
        match r {
            Ok(v) => Ok(v),
            Err(NumericError::Domain(d)) => Err(d),
            Err(other) => {
                self.0.get_or_insert(other);
                Err(DomainError {
                    kind: DomainKind::Overflow,
                    t,
                })
            }
        }
    }

    /// The captured error takes precedence over the outer result.
    pub fn finish<T>(self, r: Result<T, NumericError>) -> Result<T, NumericError> {
        match self.0 {
            Some(e) => Err(e),
            None => r,
        }
    }
}
