use std::cell::Cell;
use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use super::config::{Algorithm, OptimizerConfig};
use super::steps::{newton_step_at, nqn_step_at, utb_gd_step_at, StepOutcome};
use crate::calculus::{self, Objective};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    GradTol,
    MaxIters,
    NonFinite,
    ScheduleExhausted,
    LineSearchFloor,
    SingularHessian,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::GradTol => "GradTol",
            Termination::MaxIters => "MaxIters",
            Termination::NonFinite => "NonFinite",
            Termination::ScheduleExhausted => "ScheduleExhausted",
            Termination::LineSearchFloor => "LineSearchFloor",
            Termination::SingularHessian => "SingularHessian",
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::ScheduleExhausted { .. } => Termination::ScheduleExhausted,
            Error::LineSearchFloor { .. } => Termination::LineSearchFloor,
            Error::SingularHessian { .. } | Error::SingularDirection { .. } => Termination::SingularHessian,
            _ => Termination::NonFinite,
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// State at iterate `x_k`, plus the step taken from it (absent on the last record).
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub index: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub delta_index: Option<usize>,
    pub gamma: Option<f64>,
    pub w_norm: Option<f64>,
    pub slope: Option<f64>,
    pub halvings: Option<usize>,
    /// Time since the start of the run.
    pub elapsed: Duration,
}

impl IterationRecord {
    pub(crate) fn at(index: usize, x: &[f64], f: f64, grad_norm: f64, elapsed: Duration) -> Self {
        Self {
            index,
            x: x.to_vec(),
            f,
            grad_norm,
            delta_index: None,
            gamma: None,
            w_norm: None,
            slope: None,
            halvings: None,
            elapsed,
        }
    }

    pub(crate) fn attach_step(&mut self, step: &StepOutcome) {
        self.delta_index = step.delta_index;
        self.gamma = Some(step.gamma);
        self.w_norm = Some(step.direction_norm);
        self.slope = Some(step.slope);
        self.halvings = Some(step.halvings);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    /// Message of the error that ended the run, if any.
    pub error: Option<String>,
    pub total_time: Duration,
    pub f_evals: usize,
    pub grad_evals: usize,
    pub hess_evals: usize,
}

impl RunReport {
    pub fn final_record(&self) -> &IterationRecord {
        self.trace.last().expect("trace is never empty")
    }

    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.trace.iter().map(|r| r.x.clone()).collect()
    }
}

struct Counting<'a, O: ?Sized> {
    inner: &'a O,
    f: Cell<usize>,
    g: Cell<usize>,
    h: Cell<usize>,
}

impl<'a, O: Objective + ?Sized> Counting<'a, O> {
    fn new(inner: &'a O) -> Self {
        Self { inner, f: Cell::new(0), g: Cell::new(0), h: Cell::new(0) }
    }
}

impl<O: Objective + ?Sized> Objective for Counting<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.f.set(self.f.get() + 1);
        self.inner.value(x)
    }
    // calculus::{gradient, hessian} consult these exactly once per call.
    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        self.g.set(self.g.get() + 1);
        self.inner.gradient(x)
    }
    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        self.h.set(self.h.get() + 1);
        self.inner.hessian(x)
    }
}

/// Runs `cfg.algorithm` from `x0` until `‖∇f‖ ≤ grad_tol`, `max_iters` steps,
/// or an error, which becomes the termination reason.
///
/// Panics if `x0.len() != f.dim()`.
pub fn run<O: Objective + ?Sized>(f: &O, x0: &[f64], cfg: &OptimizerConfig) -> RunReport {
    run_with(|_| f, x0, cfg)
}

/// Like [`run`], but iteration `k` uses the objective `source(k)`.
///
/// Each objective is used for the whole of its iteration (gradient, Hessian
/// and line search), which is how mini-batch objectives are frozen per step.
pub fn run_with<O, S>(mut source: S, x0: &[f64], cfg: &OptimizerConfig) -> RunReport
where
    O: Objective,
    S: FnMut(usize) -> O,
{
    let start = Instant::now();
    let mut x = DVector::from_column_slice(x0);
    let mut lr = cfg.gd.delta0;
    let mut trace = Vec::new();
    let (mut f_evals, mut grad_evals, mut hess_evals) = (0, 0, 0);
    let mut error = None;

    let termination = 'outer: {
        for k in 0.. {
            let objective = source(k);
            assert_eq!(objective.dim(), x.len(), "initial point dimension does not match the objective");
            let f = Counting::new(&objective);

            let fx = f.value(x.as_slice());
            let grad = calculus::gradient(&f, x.as_slice());
            let gn = grad.as_ref().map(|g| g.norm()).unwrap_or(f64::NAN);
            let mut record = IterationRecord::at(k, x.as_slice(), fx, gn, start.elapsed());

            let outcome = match grad {
                Err(e) => {
                    error = Some(e.to_string());
                    Err(Termination::NonFinite)
                }
                Ok(_) if !fx.is_finite() || !gn.is_finite() => Err(Termination::NonFinite),
                Ok(_) if gn <= cfg.grad_tol => Err(Termination::GradTol),
                Ok(_) if k >= cfg.max_iters => Err(Termination::MaxIters),
                Ok(g) => {
                    let step = match cfg.algorithm {
                        Algorithm::Newton => newton_step_at(&f, &x, &g),
                        Algorithm::UtbGd => utb_gd_step_at(&f, &x, fx, &g, lr, &cfg.gd),
                        alg => nqn_step_at(&f, &x, fx, &g, alg.variant().expect("family member"), cfg),
                    };
                    // A step too small to move x would repeat forever.
                    let step = step.and_then(|s| match s.x_next == x {
                        true => Err(Error::LineSearchFloor { gamma: s.gamma }),
                        false => Ok(s),
                    });
                    step.map_err(|e| {
                        let t = Termination::from_error(&e);
                        error = Some(e.to_string());
                        t
                    })
                }
            };

            f_evals += f.f.get();
            grad_evals += f.g.get();
            hess_evals += f.h.get();

            match outcome {
                Ok(step) => {
                    record.attach_step(&step);
                    trace.push(record);
                    lr = step.gamma;
                    x = step.x_next;
                }
                Err(t) => {
                    trace.push(record);
                    break 'outer t;
                }
            }
        }
        unreachable!("iteration loop only exits through a termination")
    };

    RunReport {
        algorithm: cfg.algorithm,
        trace,
        termination,
        error,
        total_time: start.elapsed(),
        f_evals,
        grad_evals,
        hess_evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::FnObjective;

    fn bowl() -> FnObjective {
        FnObjective::new("bowl", 2, |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.1 * x[0].powi(4))
    }

    #[test]
    fn critical_start_terminates_immediately() {
        let f = FnObjective::new("sq", 2, |x| x[0] * x[0] + x[1] * x[1]);
        let r = run(&f, &[0.0, 0.0], &OptimizerConfig::new(Algorithm::V2, 2));
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.iterations(), 0);
        assert_eq!(r.termination, Termination::GradTol);
    }

    #[test]
    fn every_algorithm_converges_on_a_convex_bowl() {
        for alg in Algorithm::ALL {
            let cfg = OptimizerConfig::new(alg, 2).with_max_iters(500).with_grad_tol(1e-6);
            let r = run(&bowl(), &[3.0, 1.0], &cfg);
            assert_eq!(r.termination, Termination::GradTol, "{alg}: {:?}", r.error);
            assert!(r.final_record().grad_norm <= 1e-6);
            assert!(r.f_evals > 0 && r.grad_evals == r.trace.len());
            if alg == Algorithm::UtbGd {
                assert_eq!(r.hess_evals, 0);
            } else {
                assert_eq!(r.hess_evals, r.iterations());
            }
        }
    }

    #[test]
    fn max_iters_is_respected() {
        let cfg = OptimizerConfig::new(Algorithm::UtbGd, 2).with_max_iters(3);
        let r = run(&bowl(), &[3.0, 1.0], &cfg);
        assert_eq!(r.termination, Termination::MaxIters);
        assert_eq!(r.iterations(), 3);
        assert!(r.final_record().gamma.is_none());
    }

    #[test]
    fn nonfinite_iterate_stops_the_run() {
        // Newton on |x|^{4/3} doubles and flips the iterate until it overflows
        let f = FnObjective::new("f1", 1, |x| x[0].abs().powf(4.0 / 3.0));
        let r = run(&f, &[1.0], &OptimizerConfig::new(Algorithm::Newton, 1).with_max_iters(100_000));
        assert!(matches!(r.termination, Termination::NonFinite | Termination::SingularHessian));
    }

    #[test]
    fn stalled_step_ends_the_run() {
        // the gradient of |x| never shrinks, so the steps eventually stop moving x
        let cone = FnObjective::new("cone", 1, |x| x[0].abs())
            .with_gradient(|x| DVector::from_element(1, x[0].signum()))
            .with_hessian(|_| DMatrix::zeros(1, 1));
        let r = run(&cone, &[0.3], &OptimizerConfig::new(Algorithm::UtbGd, 1).with_max_iters(1_000_000));
        assert_eq!(r.termination, Termination::LineSearchFloor);
        assert!(r.iterations() < 1_000_000);
        assert!(is_nonincreasing_f(&r));
    }

    fn is_nonincreasing_f(r: &RunReport) -> bool {
        r.trace.windows(2).all(|w| w[1].f <= w[0].f)
    }

    #[test]
    fn stochastic_source_is_called_per_iteration() {
        let mut calls = Vec::new();
        let cfg = OptimizerConfig::new(Algorithm::V1, 1).with_max_iters(4).with_grad_tol(0.0);
        let r = run_with(
            |k| {
                calls.push(k);
                FnObjective::new("shifted", 1, move |x| (x[0] - k as f64).powi(2) + x[0].powi(4))
            },
            &[5.0],
            &cfg,
        );
        assert_eq!(calls, vec![0, 1, 2, 3, 4]);
        assert_eq!(r.termination, Termination::MaxIters);
    }
}
