use nalgebra::DVector;

use crate::calculus::Objective;

/// Result of a halving search over `γ ∈ {1, ½, ¼, …}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSearchOutcome {
    pub gamma: f64,
    pub halvings: usize,
    /// `f(x − γd)` at the returned `γ`.
    pub value: f64,
    /// The condition still failed after `max_halvings` halvings; `gamma` is the floor.
    pub floored: bool,
}

fn backtrack<O, A>(f: &O, x: &DVector<f64>, d: &DVector<f64>, max_halvings: usize, accept: A) -> LineSearchOutcome
where
    O: Objective + ?Sized,
    A: Fn(f64, f64) -> bool,
{
    let mut gamma = 1.0;
    let mut halvings = 0;
    loop {
        let trial = x - d * gamma;
        let value = f.value(trial.as_slice());
        if value.is_finite() && accept(gamma, value) {
            return LineSearchOutcome { gamma, halvings, value, floored: false };
        }
        if halvings == max_halvings {
            return LineSearchOutcome { gamma, halvings, value, floored: true };
        }
        gamma *= 0.5;
        halvings += 1;
    }
}

/// Largest `γ = 2^{-k}` with `f(x − γd) − f(x) ≤ −γ·slope/2`.
///
/// `fx = f(x)` and `slope = ⟨d, ∇f(x)⟩ > 0`. Non-finite trial values count as
/// rejections.
pub fn armijo_search<O: Objective + ?Sized>(
    f: &O,
    x: &DVector<f64>,
    d: &DVector<f64>,
    fx: f64,
    slope: f64,
    max_halvings: usize,
) -> LineSearchOutcome {
    backtrack(f, x, d, max_halvings, |gamma, value| value - fx <= -gamma * slope / 2.0)
}

/// Largest `γ = 2^{-k}` with `f(x − γd) ≤ f(x)`.
pub fn weak_descent_search<O: Objective + ?Sized>(
    f: &O,
    x: &DVector<f64>,
    d: &DVector<f64>,
    fx: f64,
    max_halvings: usize,
) -> LineSearchOutcome {
    backtrack(f, x, d, max_halvings, |_, value| value <= fx)
}
