//! Objectives and central finite-difference derivatives.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::SymmetricMatrix;

/// A scalar function on `ℝ^m`, optionally with analytic derivatives.
///
/// `value` must be deterministic in `x`. Implementations that do not override
/// `gradient`/`hessian` are differentiated numerically by [`gradient`] and
/// [`hessian`].
pub trait Objective {
    fn dim(&self) -> usize;

    fn name(&self) -> &str {
        "objective"
    }

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, _x: &[f64]) -> Option<DVector<f64>> {
        None
    }

    fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn name(&self) -> &str {
        (**self).name()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        (**self).gradient(x)
    }
    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        (**self).hessian(x)
    }
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
type HessianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Closure-backed [`Objective`]; cheap to clone.
#[derive(Clone)]
pub struct FnObjective {
    name: String,
    dim: usize,
    value: ValueFn,
    gradient: Option<GradientFn>,
    hessian: Option<HessianFn>,
}

impl FnObjective {
    pub fn new(name: impl Into<String>, dim: usize, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), dim, value: Arc::new(value), gradient: None, hessian: None }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(h));
        self
    }

    /// Same function with the analytic derivatives dropped.
    pub fn without_derivatives(&self) -> Self {
        Self { gradient: None, hessian: None, ..self.clone() }
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hessian.is_some()
    }
}

impl fmt::Debug for FnObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnObjective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("gradient", &self.gradient.is_some())
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

impl Objective for FnObjective {
    fn dim(&self) -> usize {
        self.dim
    }
    fn name(&self) -> &str {
        &self.name
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<DVector<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }
    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        self.hessian.as_ref().map(|h| h(x))
    }
}

/// Relative gradient step, `ε^{1/3}`.
pub fn gradient_step() -> f64 {
    f64::EPSILON.cbrt()
}

/// Relative Hessian step, `ε^{1/4}`.
pub fn hessian_step() -> f64 {
    f64::EPSILON.sqrt().sqrt()
}

fn probe<O: Objective + ?Sized>(f: &O, x: &[f64]) -> Result<f64> {
    let v = f.value(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteEvaluation { point: x.to_vec() })
    }
}

fn check_dim<O: Objective + ?Sized>(f: &O, x: &[f64]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    Ok(())
}

/// Central differences with step `ε^{1/3}·max(1, |xᵢ|)`.
pub fn fd_gradient<O: Objective + ?Sized>(f: &O, x: &[f64]) -> Result<DVector<f64>> {
    check_dim(f, x)?;
    let mut xp = x.to_vec();
    let mut g = DVector::zeros(x.len());
    for i in 0..x.len() {
        let h = gradient_step() * x[i].abs().max(1.0);
        xp[i] = x[i] + h;
        let up = probe(f, &xp)?;
        xp[i] = x[i] - h;
        let down = probe(f, &xp)?;
        xp[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    Ok(g)
}

/// Central second differences with step `ε^{1/4}·max(1, |xᵢ|)`, off-diagonal
/// entries from the four-point cross stencil, symmetrized.
pub fn fd_hessian<O: Objective + ?Sized>(f: &O, x: &[f64]) -> Result<SymmetricMatrix> {
    check_dim(f, x)?;
    let m = x.len();
    let steps: Vec<f64> = x.iter().map(|xi| hessian_step() * xi.abs().max(1.0)).collect();
    let center = probe(f, x)?;
    let mut xp = x.to_vec();
    let mut hess = DMatrix::zeros(m, m);
    for i in 0..m {
        let h = steps[i];
        xp[i] = x[i] + h;
        let up = probe(f, &xp)?;
        xp[i] = x[i] - h;
        let down = probe(f, &xp)?;
        xp[i] = x[i];
        hess[(i, i)] = (up - 2.0 * center + down) / (h * h);
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let (hi, hj) = (steps[i], steps[j]);
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                xp[i] = x[i] + si * hi;
                xp[j] = x[j] + sj * hj;
                let v = probe(f, &xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let pp = corner(1.0, 1.0)?;
            let pm = corner(1.0, -1.0)?;
            let mp = corner(-1.0, 1.0)?;
            let mm = corner(-1.0, -1.0)?;
            let v = (pp - pm - mp + mm) / (4.0 * hi * hj);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    SymmetricMatrix::new(hess)
}

/// Analytic gradient when the objective has one, central differences otherwise.
pub fn gradient<O: Objective + ?Sized>(f: &O, x: &[f64]) -> Result<DVector<f64>> {
    check_dim(f, x)?;
    match f.gradient(x) {
        Some(g) if g.iter().all(|v| v.is_finite()) => Ok(g),
        Some(_) => Err(Error::NonFiniteEvaluation { point: x.to_vec() }),
        None => fd_gradient(f, x),
    }
}

/// Analytic Hessian when the objective has one, central differences otherwise.
pub fn hessian<O: Objective + ?Sized>(f: &O, x: &[f64]) -> Result<SymmetricMatrix> {
    check_dim(f, x)?;
    match f.hessian(x) {
        Some(h) => SymmetricMatrix::new(h).map_err(|_| Error::NonFiniteEvaluation { point: x.to_vec() }),
        None => fd_hessian(f, x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_gradient_is_exact() {
        let c = [1.5, -2.0, 0.25];
        let f = FnObjective::new("linear", 3, move |x| x.iter().zip(c).map(|(a, b)| a * b).sum());
        let g = fd_gradient(&f, &[0.3, -7.0, 12.0]).unwrap();
        for (gi, ci) in g.iter().zip(c) {
            // only rounding error remains: about ε·|f|/h
            assert_abs_diff_eq!(*gi, ci, epsilon = 1e-8);
        }
    }

    #[test]
    fn squared_norm_gradient() {
        let f = FnObjective::new("sq", 2, |x| x.iter().map(|v| v * v).sum());
        let g = fd_gradient(&f, &[1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(g[0], 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(g[1], 4.0, epsilon = 1e-8);
    }

    #[test]
    fn quadratic_hessian() {
        let q = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, -2.0, 1.0, 3.0, 0.5, -2.0, 0.5, 6.0]);
        let qc = q.clone();
        let f = FnObjective::new("quad", 3, move |x| {
            let v = DVector::from_column_slice(x);
            0.5 * v.dot(&(&qc * &v))
        });
        let h = fd_hessian(&f, &[0.7, -1.3, 2.2]).unwrap();
        assert!((h.as_matrix() - &q).amax() <= 1e-6 * q.norm().max(1.0));
        assert_eq!(h.as_matrix(), &h.as_matrix().transpose());
    }

    #[test]
    fn cubic_second_derivative() {
        let f = FnObjective::new("cube", 1, |x| x[0].powi(3));
        let h = fd_hessian(&f, &[2.0]).unwrap();
        assert_abs_diff_eq!(h.as_matrix()[(0, 0)], 12.0, epsilon = 1e-5);
    }

    #[test]
    fn nonfinite_probe_is_reported() {
        let f = FnObjective::new("log", 1, |x| x[0].ln());
        match fd_gradient(&f, &[0.0]) {
            Err(Error::NonFiniteEvaluation { point }) => assert!(point[0] <= 0.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(fd_hessian(&f, &[0.0]).is_err());
    }

    #[test]
    fn dimension_is_checked() {
        let f = FnObjective::new("sq", 2, |x| x[0] * x[0] + x[1] * x[1]);
        assert!(matches!(gradient(&f, &[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn analytic_derivatives_take_precedence() {
        let f = FnObjective::new("sq", 1, |x| x[0] * x[0])
            .with_gradient(|_| DVector::from_element(1, 42.0))
            .with_hessian(|_| DMatrix::from_element(1, 1, 7.0));
        assert_eq!(gradient(&f, &[1.0]).unwrap()[0], 42.0);
        assert_eq!(hessian(&f, &[1.0]).unwrap().as_matrix()[(0, 0)], 7.0);
        let plain = f.without_derivatives();
        assert_abs_diff_eq!(gradient(&plain, &[1.0]).unwrap()[0], 2.0, epsilon = 1e-8);
    }
}
