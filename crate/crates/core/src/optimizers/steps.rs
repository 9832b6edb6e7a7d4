use nalgebra::DVector;

use super::config::{GdConfig, LineSearchRule, OptimizerConfig, Variant};
use super::line_search::{armijo_search, weak_descent_search};
use super::run::IterationRecord;
use crate::calculus::{self, Objective};
use crate::error::{Error, Result};
use crate::spectral::{cap_direction, select_delta, step_direction, symmetric_eigendecompose};

/// One accepted update `x_next = x − γ·d`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub x_next: DVector<f64>,
    pub delta_index: Option<usize>,
    pub gamma: f64,
    /// Norm of the uncapped direction (`‖w‖`, or `‖∇f‖` for gradient descent).
    pub direction_norm: f64,
    /// `⟨d, ∇f(x)⟩` for the direction actually searched along.
    pub slope: f64,
    pub halvings: usize,
}

fn finite_or_err(x: &[f64], v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteEvaluation { point: x.to_vec() })
    }
}

pub(crate) fn nqn_step_at<O: Objective + ?Sized>(
    f: &O,
    x: &DVector<f64>,
    fx: f64,
    grad: &DVector<f64>,
    variant: Variant,
    cfg: &OptimizerConfig,
) -> Result<StepOutcome> {
    let hess = calculus::hessian(f, x.as_slice())?;
    let spectrum = symmetric_eigendecompose(&hess)?;
    let choice = select_delta(variant.rule, &spectrum, grad.norm(), &cfg.schedule, cfg.alpha)?;
    let w = step_direction(&choice.spectral, grad)?;
    let d = if variant.cap { cap_direction(&w) } else { w.clone() };
    let slope = d.dot(grad);

    let search = match variant.search {
        LineSearchRule::None => None,
        LineSearchRule::WeakDescent => Some(weak_descent_search(f, x, &d, fx, cfg.max_halvings)),
        LineSearchRule::Armijo => Some(armijo_search(f, x, &d, fx, slope, cfg.max_halvings)),
    };
    let (gamma, halvings) = match search {
        None => (1.0, 0),
        // The floor step is kept only if it does not increase f.
        Some(out) if out.floored && (out.value > fx || out.value.is_nan()) => return Err(Error::LineSearchFloor { gamma: out.gamma }),
        Some(out) => (out.gamma, out.halvings),
    };

    Ok(StepOutcome {
        x_next: x - &d * gamma,
        delta_index: Some(choice.index),
        gamma,
        direction_norm: w.norm(),
        slope,
        halvings,
    })
}

pub(crate) fn newton_step_at<O: Objective + ?Sized>(f: &O, x: &DVector<f64>, grad: &DVector<f64>) -> Result<StepOutcome> {
    let hess = calculus::hessian(f, x.as_slice())?;
    let s = symmetric_eigendecompose(&hess)?;
    if !s.is_numerically_invertible() {
        return Err(Error::SingularHessian { min_abs: s.min_abs_eigenvalue(), threshold: s.singular_threshold() });
    }
    let coeffs = s.eigenvectors().tr_mul(grad).component_div(s.eigenvalues());
    let v = s.eigenvectors() * coeffs;
    Ok(StepOutcome {
        x_next: x - &v,
        delta_index: None,
        gamma: 1.0,
        direction_norm: v.norm(),
        slope: v.dot(grad),
        halvings: 0,
    })
}

pub(crate) fn utb_gd_step_at<O: Objective + ?Sized>(
    f: &O,
    x: &DVector<f64>,
    fx: f64,
    grad: &DVector<f64>,
    prev_lr: f64,
    gd: &GdConfig,
) -> Result<StepOutcome> {
    let gn2 = grad.norm_squared();
    let cap = gd.delta0.max(gd.delta0 * gn2.sqrt().powf(-gd.kappa));
    let trial = |lr: f64| f.value((x - grad * lr).as_slice());
    let armijo = |value: f64, lr: f64| value.is_finite() && value - fx <= -gd.armijo_alpha * lr * gn2;

    let mut lr = prev_lr.min(cap);
    let mut reductions = 0;
    // at lr = 0 the Armijo test holds trivially, so there is nothing to grow
    if lr > 0.0 && armijo(trial(lr), lr) {
        loop {
            let next = lr / gd.beta;
            if next > cap || !armijo(trial(next), next) {
                break;
            }
            lr = next;
        }
    } else {
        loop {
            lr *= gd.beta;
            reductions += 1;
            let value = trial(lr);
            if armijo(value, lr) {
                break;
            }
            if reductions >= gd.max_reductions {
                if value <= fx {
                    break;
                }
                return Err(Error::LineSearchFloor { gamma: lr });
            }
        }
    }
    Ok(StepOutcome {
        x_next: x - grad * lr,
        delta_index: None,
        gamma: lr,
        direction_norm: gn2.sqrt(),
        slope: gn2,
        halvings: reductions,
    })
}

/// One New Q-Newton family update from `x` under `cfg.algorithm`.
///
/// Panics if `cfg.algorithm` is one of the baselines.
pub fn nqn_family_step<O: Objective + ?Sized>(
    f: &O,
    x: &[f64],
    cfg: &OptimizerConfig,
) -> Result<(DVector<f64>, IterationRecord)> {
    let variant = cfg
        .algorithm
        .variant()
        .unwrap_or_else(|| panic!("{} is not a New Q-Newton variant", cfg.algorithm));
    let xv = DVector::from_column_slice(x);
    let fx = finite_or_err(x, f.value(x))?;
    let grad = calculus::gradient(f, x)?;
    let step = nqn_step_at(f, &xv, fx, &grad, variant, cfg)?;
    let mut record = IterationRecord::at(0, x, fx, grad.norm(), std::time::Duration::ZERO);
    record.attach_step(&step);
    Ok((step.x_next, record))
}

/// Classical Newton update `x − (∇²f)⁻¹∇f`.
pub fn newton_step<O: Objective + ?Sized>(f: &O, x: &[f64]) -> Result<DVector<f64>> {
    let grad = calculus::gradient(f, x)?;
    Ok(newton_step_at(f, &DVector::from_column_slice(x), &grad)?.x_next)
}

/// Unbounded Two-way Backtracking GD update; returns `(x_next, learning rate)`.
pub fn utb_gd_step<O: Objective + ?Sized>(f: &O, x: &[f64], prev_lr: f64, gd: &GdConfig) -> Result<(DVector<f64>, f64)> {
    let fx = finite_or_err(x, f.value(x))?;
    let grad = calculus::gradient(f, x)?;
    let step = utb_gd_step_at(f, &DVector::from_column_slice(x), fx, &grad, prev_lr, gd)?;
    Ok((step.x_next, step.gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::FnObjective;
    use crate::optimizers::Algorithm;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn sq() -> FnObjective {
        FnObjective::new("x^2", 1, |x| x[0] * x[0])
            .with_gradient(|x| DVector::from_element(1, 2.0 * x[0]))
            .with_hessian(|_| DMatrix::from_element(1, 1, 2.0))
    }

    #[test]
    fn v2_solves_parabola_in_one_step() {
        let cfg = OptimizerConfig::new(Algorithm::V2, 1);
        let (x, rec) = nqn_family_step(&sq(), &[1.0], &cfg).unwrap();
        assert_eq!(x[0], 0.0);
        assert_eq!(rec.delta_index, Some(0));
        assert_eq!(rec.gamma, Some(1.0));
        assert_eq!(rec.w_norm, Some(1.0));
    }

    #[test]
    fn v4_moves_away_from_maximum() {
        let f = FnObjective::new("-x^2", 1, |x| -x[0] * x[0]);
        let cfg = OptimizerConfig::new(Algorithm::V4, 1);
        let (x, rec) = nqn_family_step(&f, &[1.0], &cfg).unwrap();
        assert!(x[0] > 1.0);
        assert_abs_diff_eq!(rec.w_norm.unwrap(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(rec.slope.unwrap(), 2.0, epsilon = 1e-5);
        // x_next = 1 + γ, and the Armijo test accepts γ = 1 here
        assert_abs_diff_eq!(x[0], 1.0 + rec.gamma.unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn nqn_is_exact_on_spd_quadratic() {
        let q = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]);
        let (qv, qh) = (q.clone(), q.clone());
        let f = FnObjective::new("quad", 2, move |x| {
            let v = DVector::from_column_slice(x);
            0.5 * v.dot(&(&q * &v))
        })
        .with_gradient(move |x| &qv * DVector::from_column_slice(x))
        .with_hessian(move |_| qh.clone());
        let cfg = OptimizerConfig::new(Algorithm::Nqn, 2);
        let (x, rec) = nqn_family_step(&f, &[4.0, -3.0], &cfg).unwrap();
        assert!(x.amax() < 1e-14);
        assert_eq!(rec.delta_index, Some(0));
    }

    #[test]
    fn newton_examples() {
        let quartic = FnObjective::new("x^4", 1, |x| x[0].powi(4))
            .with_gradient(|x| DVector::from_element(1, 4.0 * x[0].powi(3)))
            .with_hessian(|x| DMatrix::from_element(1, 1, 12.0 * x[0] * x[0]));
        assert_abs_diff_eq!(newton_step(&quartic, &[1.0]).unwrap()[0], 2.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(newton_step(&quartic, &[0.0]), Err(Error::SingularHessian { .. })));
    }

    #[test]
    fn gd_examples() {
        let f = FnObjective::new("x^2/2", 1, |x| 0.5 * x[0] * x[0]);
        let (x, lr) = utb_gd_step(&f, &[1.0], 1.0, &GdConfig::default()).unwrap();
        assert_abs_diff_eq!(lr, 1.0);
        assert_abs_diff_eq!(x[0], 0.0, epsilon = 1e-9);

        // cap = max(1, 0.01^{-1/2}) = 10 lets the step grow past δ₀
        let flat = FnObjective::new("0.01x", 1, |x| 0.01 * x[0]);
        let (_, lr) = utb_gd_step(&flat, &[0.0], 1.0, &GdConfig::default()).unwrap();
        let cap: f64 = 10.0;
        assert!(lr > 1.0 && lr <= cap + 1e-9);
        assert!(lr * 1.0 / 0.7 > cap);
    }

    #[test]
    fn gd_backtracks_and_satisfies_armijo() {
        let f = FnObjective::new("5x^2", 1, |x| 5.0 * x[0] * x[0]);
        let gd = GdConfig::default();
        let (x, lr) = utb_gd_step(&f, &[1.0], 1.0, &gd).unwrap();
        assert!(lr < 1.0);
        let g2 = 100.0;
        assert!(f.value(x.as_slice()) - 5.0 <= -gd.armijo_alpha * lr * g2);
    }
}
